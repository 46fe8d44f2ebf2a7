"""
b 空间与 q 空间的对偶
散射振幅 f(q) 与概率振幅 a(b) 之间的二维傅里叶变换：
    a(b) = −i/(2πk) ∫ exp(−i q·b) f(q) d²q
以及两种表示下的总截面（Parseval 关系）
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np
from scipy import fft

from .errors import UsageError, ValidationError

logger = logging.getLogger(__name__)

# 边界环上的幅值超过峰值的这一比例时提示回绕
WRAP_AROUND_THRESHOLD = 1e-12


class Space(str, Enum):
    B = "b"
    Q = "q"

    @classmethod
    def parse(cls, value: str) -> "Space":
        normalized = value.strip().lower().replace("_space", "")
        for space in cls:
            if space.value == normalized:
                return space
        raise ValidationError(f"Unknown space tag '{value}', expected 'b' or 'q'")


@dataclass(frozen=True)
class TransverseGrid:
    """
    以原点为中心的均匀二维网格

    每个轴 n 个点，坐标 (j − n/2)·Δ，Δ = 2L/n。
    b 网格与其共轭 q 网格满足 Δq = π/L_b
    """

    n: int
    extent: float

    def __post_init__(self):
        if self.n < 8 or self.n & (self.n - 1):
            raise ValidationError(f"grid size must be a power of two >= 8, got {self.n}")
        if not math.isfinite(self.extent) or self.extent <= 0:
            raise ValidationError(f"grid extent must be positive, got {self.extent!r}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.extent / self.n

    def coordinates(self) -> np.ndarray:
        return (np.arange(self.n) - self.n // 2) * self.spacing

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        """(x, y) 网格，indexing="ij"：samples[i, j] 对应 (x_i, y_j)"""
        axis = self.coordinates()
        return np.meshgrid(axis, axis, indexing="ij")

    def conjugate(self) -> "TransverseGrid":
        return TransverseGrid(self.n, self.n * math.pi / (2.0 * self.extent))


@dataclass(frozen=True, eq=False)
class AmplitudeField:
    """网格上的复振幅 a(b) 或 f(q)，构造后只读"""

    grid: TransverseGrid
    samples: np.ndarray
    space: Space
    wave_number: float

    def __post_init__(self):
        samples = np.array(self.samples, dtype=complex)
        if samples.shape != (self.grid.n, self.grid.n):
            raise ValidationError(
                f"samples shape {samples.shape} does not match grid ({self.grid.n}, {self.grid.n})"
            )
        if not math.isfinite(self.wave_number) or self.wave_number <= 0:
            raise ValidationError(f"wave number must be positive, got {self.wave_number!r}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "space", Space(self.space))

    def scaled(self, factor: complex) -> "AmplitudeField":
        return AmplitudeField(self.grid, self.samples * factor, self.space, self.wave_number)


def _require_space(field: AmplitudeField, expected: Space, operation: str) -> None:
    if field.space is not expected:
        raise UsageError(
            f"{operation} expects a {expected.value}-space field, got {field.space.value}-space"
        )


def boundary_ratio(field: AmplitudeField) -> float:
    """最外圈幅值最大值与全场峰值之比"""
    magnitude = np.abs(field.samples)
    peak = magnitude.max()
    if peak == 0.0:
        return 0.0
    ring = max(magnitude[0, :].max(), magnitude[-1, :].max(), magnitude[:, 0].max(), magnitude[:, -1].max())
    return float(ring / peak)


def _warn_wrap_around(field: AmplitudeField) -> None:
    ratio = boundary_ratio(field)
    if ratio > WRAP_AROUND_THRESHOLD:
        logger.warning(
            f"{field.space.value}-space field reaches {ratio:.3e} of its peak on the grid boundary; "
            "the periodic transform will wrap around and cross sections lose accuracy"
        )


def unitarity_violations(field: AmplitudeField) -> int:
    """|a(b)| > 1 的采样点个数（仅诊断，不强制）"""
    _require_space(field, Space.B, "unitarity check")
    return int(np.count_nonzero(np.abs(field.samples) > 1.0))


def q_to_b(f: AmplitudeField) -> AmplitudeField:
    """
    f(q) → a(b)

    a(b) = −i/(2πk)·Σ_q exp(−i q·b) f(q) Δq²，用居中的 FFT 实现。
    输出网格为输入网格的共轭网格

    Raises:
        UsageError: 输入不是 q 空间
    """
    _require_space(f, Space.Q, "q_to_b")
    _warn_wrap_around(f)

    raw = fft.fftshift(fft.fft2(fft.ifftshift(f.samples), workers=-1))
    prefactor = -1j / (2.0 * math.pi * f.wave_number) * f.grid.spacing**2
    a = AmplitudeField(f.grid.conjugate(), prefactor * raw, Space.B, f.wave_number)

    violations = unitarity_violations(a)
    if violations:
        logger.warning(
            f"{violations} b-space sample(s) exceed |a(b)| = 1; the input f(q) is not a physical "
            "probability amplitude at this normalization"
        )
    return a


def b_to_q(a: AmplitudeField) -> AmplitudeField:
    """
    a(b) → f(q)，q_to_b 的精确离散逆变换

    Raises:
        UsageError: 输入不是 b 空间
    """
    _require_space(a, Space.B, "b_to_q")
    _warn_wrap_around(a)

    q_grid = a.grid.conjugate()
    raw = fft.fftshift(fft.ifft2(fft.ifftshift(a.samples), workers=-1))
    prefactor = 2j * math.pi * a.wave_number / q_grid.spacing**2
    return AmplitudeField(q_grid, prefactor * raw, Space.Q, a.wave_number)


def cross_section_b(a: AmplitudeField) -> float:
    """σ = Σ|a(b)|²·Δb²"""
    _require_space(a, Space.B, "cross_section_b")
    return float(np.sum(np.abs(a.samples) ** 2) * a.grid.spacing**2)


def cross_section_q(f: AmplitudeField) -> float:
    """
    σ = Σ|f(q)|²·Δq² / k²

    k 取角波数（与 q_to_b 中的 −i/(2πk) 一致）；若 k 取 1/λ，则该前因子写作 (2πk)⁻²
    """
    _require_space(f, Space.Q, "cross_section_q")
    return float(np.sum(np.abs(f.samples) ** 2) * f.grid.spacing**2 / f.wave_number**2)


def second_moment(field: AmplitudeField) -> float:
    """以 |field|² 为权的 ⟨r²⟩"""
    x, y = field.grid.mesh()
    weight = np.abs(field.samples) ** 2
    total = weight.sum()
    if total == 0.0:
        raise UsageError("second moment of an all-zero field is undefined")
    return float(np.sum((x**2 + y**2) * weight) / total)


def gaussian_pair(q_grid: TransverseGrid, sigma: float, wave_number: float) -> AmplitudeField:
    """
    q 网格上的解析高斯 f(q) = exp(−q²σ²/2)

    其 b 空间伙伴为 a(b) = −(i/(kσ²))·exp(−b²/(2σ²))
    """
    if not math.isfinite(sigma) or sigma <= 0:
        raise ValidationError(f"sigma must be positive, got {sigma!r}")
    qx, qy = q_grid.mesh()
    samples = np.exp(-(qx**2 + qy**2) * sigma**2 / 2.0)
    return AmplitudeField(q_grid, samples, Space.Q, wave_number)
