"""
多电子乘积组合与关联指标
独立电子近似下联合振幅是单电子振幅之积；动态关联用 P_{1..N} 与 ΠP_j 的偏离刻画
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .errors import UsageError, ValidationError
from .twostate import DriveParameters, amplitudes_degenerate

# |a_j| ≤ 1 的舍入余量
UNIT_DISC_SLACK = 1e-12


@dataclass(frozen=True)
class SingleElectronChannel:
    """电子 j 在给定 b 处指定跃迁的振幅 a_j"""

    amplitude: complex
    label: int

    def __post_init__(self):
        if abs(self.amplitude) > 1.0 + UNIT_DISC_SLACK:
            raise ValidationError(
                f"electron {self.label}: |a| = {abs(self.amplitude)!r} exceeds 1"
            )

    @property
    def probability(self) -> float:
        return abs(self.amplitude) ** 2


@dataclass(frozen=True)
class CorrelationRecord:
    """联合概率、单电子概率、差值 Δ 与比值（ΠP_j = 0 时比值为 None）"""

    joint_probability: float
    single_probabilities: Tuple[float, ...]
    deviation: float
    ratio: Optional[float]

    @property
    def is_independent(self) -> bool:
        return self.deviation == 0.0


def product_amplitude(channels: Sequence[SingleElectronChannel]) -> complex:
    """
    独立电子联合振幅 Π_j a_j

    Raises:
        UsageError: 列表为空
    """
    if not channels:
        raise UsageError("product_amplitude needs at least one electron channel")
    result = 1 + 0j
    for channel in channels:
        result *= channel.amplitude
    return result


def _check_probability(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value < 0.0 or value > 1.0:
        raise ValidationError(f"{name} must lie in [0, 1], got {value!r}")
    return value


def correlation_index(joint: float, singles: Sequence[float]) -> CorrelationRecord:
    """
    关联指标

    Args:
        joint: 联合概率 P_{1..N}
        singles: 各电子概率 P_j

    Returns:
        CorrelationRecord；Δ = 0 即独立电子近似，Δ ≠ 0 表示动态关联

    Raises:
        ValidationError: 概率越界
        UsageError: singles 为空
    """
    if not singles:
        raise UsageError("correlation_index needs at least one single-electron probability")
    joint = _check_probability("joint probability", joint)
    singles = tuple(_check_probability(f"P_{j + 1}", p) for j, p in enumerate(singles))

    # 排序后相乘，结果与电子顺序无关
    product = math.prod(sorted(singles))
    ratio = joint / product if product > 0.0 else None
    return CorrelationRecord(joint, singles, joint - product, ratio)


def independent_electron_record(channels: Sequence[SingleElectronChannel]) -> CorrelationRecord:
    """由乘积振幅构造联合概率并求关联指标，偏离应为零（到舍入）"""
    joint = abs(product_amplitude(channels)) ** 2
    return correlation_index(min(joint, 1.0), [min(c.probability, 1.0) for c in channels])


def two_state_product(drives: Sequence[DriveParameters], tau: float) -> List[SingleElectronChannel]:
    """N 个互不相关的简并二能级电子在 τ 时刻的跃迁振幅 a21"""
    channels = []
    for j, params in enumerate(drives, start=1):
        _, a21 = amplitudes_degenerate(params, tau)
        channels.append(SingleElectronChannel(complex(a21), j))
    return channels
