"""
图像导出工具
把光束横截面强度存成 8 位灰度 PNG（类似相机帧），便于快速查看 LG 模的暗核与环
"""

from pathlib import Path
import logging

import numpy as np

logger = logging.getLogger(__name__)

try:
    from PIL import Image

    PIL_AVAILABLE = True
except ImportError:
    PIL_AVAILABLE = False
    logger.warning("PIL not available, intensity frame export will be skipped")


def intensity_frame(intensities: np.ndarray) -> np.ndarray:
    """把强度数组归一化为 0..255 的 uint8；全零输入得到全黑帧"""
    intensities = np.asarray(intensities, dtype=float)
    peak = intensities.max() if intensities.size else 0.0
    if peak <= 0.0:
        return np.zeros(intensities.shape, dtype=np.uint8)
    return np.round(255.0 * intensities / peak).astype(np.uint8)


def save_intensity_frame(intensities: np.ndarray, output_path: Path) -> bool:
    """
    保存强度帧

    Args:
        intensities: 二维强度数组，行对应 y、列对应 x
        output_path: 输出 PNG 路径

    Returns:
        bool: 是否成功保存

    Raises:
        RuntimeError: 如果PIL不可用或保存失败
    """
    if not PIL_AVAILABLE:
        raise RuntimeError(
            "PIL is required for intensity frame export. Install with: pip install Pillow"
        )

    frame = intensity_frame(intensities)
    if frame.ndim != 2:
        raise RuntimeError(f"Intensity frame must be two-dimensional, got shape {frame.shape}")

    try:
        output_path.parent.mkdir(parents=True, exist_ok=True)
        # 图像坐标 y 轴向下，翻转后 +y 朝上
        Image.fromarray(np.ascontiguousarray(np.flipud(frame))).save(output_path, "PNG")
        logger.info(f"✓ Intensity frame {frame.shape[1]}x{frame.shape[0]}: {output_path}")
        return True

    except Exception as e:
        raise RuntimeError(f"Failed to save intensity frame: {e}")
