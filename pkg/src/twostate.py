"""
简并二能级原子的解析解
驱动耦合 H12(b)·cos(2πt/T)，E1 − E2 → 0 时振幅有代数解：
a11 = cos[R·sin(2πτ)]，a21 = i·sin[R·sin(2πτ)]，其中 R = H12(b)·T/h，τ = t/T
"""

import logging
import math
from dataclasses import dataclass
from typing import List, NamedTuple, Sequence, Tuple, Union

import numpy as np
from scipy import optimize

from .beam import BeamKind, BeamProfile, ImpactParameter, intensity_map
from .errors import UsageError, ValidationError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# 完全转移时刻 t = T/4
QUARTER_PERIOD = 0.25


@dataclass(frozen=True)
class DriveParameters:
    """无量纲耦合强度 R = H12·T/h 与振荡周期 T"""

    coupling_strength: float
    period: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.coupling_strength):
            raise ValidationError(f"coupling strength must be finite, got {self.coupling_strength!r}")
        if self.coupling_strength < 0:
            raise ValidationError(
                f"coupling strength must be >= 0 (sign is a phase convention), got {self.coupling_strength!r}"
            )
        if not math.isfinite(self.period) or self.period <= 0:
            raise ValidationError(f"period must be positive, got {self.period!r}")

    @classmethod
    def from_physical(cls, coupling: float, period: float, hbar: float = 1.0) -> "DriveParameters":
        """由物理量 H12、T 构造；h = 2πħ"""
        if not math.isfinite(hbar) or hbar <= 0:
            raise ValidationError(f"hbar must be positive, got {hbar!r}")
        return cls(abs(coupling) * period / (2.0 * math.pi * hbar), period)


def _drive_phase(params: DriveParameters, tau: ArrayLike) -> np.ndarray:
    # 先对周期取模，长时间 τ 也保持精度
    reduced = np.mod(np.asarray(tau, dtype=float), 1.0)
    return params.coupling_strength * np.sin(2.0 * math.pi * reduced)


def _scalar_or_array(values: np.ndarray, like: ArrayLike):
    if np.ndim(like) == 0:
        return np.asarray(values).item()
    return values


def amplitudes_degenerate(
    params: DriveParameters, tau: ArrayLike, phase_sign: int = 1
) -> Tuple[ArrayLike, ArrayLike]:
    """
    简并二能级振幅 (a11, a21)

    Args:
        params: 驱动参数
        tau: 无量纲时间 t/T，可为数组
        phase_sign: a21 的相位约定。+1 与解析式一致；-1 为直接积分薛定谔方程得到的符号

    Returns:
        (a11, a21)，满足 |a11|² + |a21|² = 1
    """
    if phase_sign not in (1, -1):
        raise UsageError(f"phase_sign must be +1 or -1, got {phase_sign!r}")
    phase = _drive_phase(params, tau)
    a11 = np.cos(phase).astype(complex)
    a21 = np.asarray(phase_sign * 1j * np.sin(phase), dtype=complex)
    return _scalar_or_array(a11, tau), _scalar_or_array(a21, tau)


def transition_probability(params: DriveParameters, tau: ArrayLike) -> ArrayLike:
    """跃迁概率 P = sin²[R·sin(2πτ)]"""
    values = np.sin(_drive_phase(params, tau)) ** 2
    return _scalar_or_array(values, tau)


def first_order_probability(params: DriveParameters, tau: ArrayLike) -> ArrayLike:
    """一阶微扰结果 (R·sin 2πτ)²，仅在 P ≪ 1 时可用"""
    values = _drive_phase(params, tau) ** 2
    return _scalar_or_array(values, tau)


class BroadMaximum(NamedTuple):
    """τ = 1/4 处 P 的一阶、二阶导数"""

    first_derivative: float
    second_derivative: float
    tolerance: float = 1e-6

    @property
    def is_broad(self) -> bool:
        return abs(self.first_derivative) < self.tolerance and abs(self.second_derivative) < self.tolerance


def broad_maximum_indicator(
    params: DriveParameters, step: float = 1e-5, tolerance: float = 1e-6
) -> BroadMaximum:
    """
    中心差分求 τ = 1/4 处的 dP/dτ 与 d²P/dτ²

    R = 奇数·π/2 时两者都消失（宽峰），一般 R 只有一阶导数为零
    """
    tau = QUARTER_PERIOD
    p_minus = transition_probability(params, tau - step)
    p_zero = transition_probability(params, tau)
    p_plus = transition_probability(params, tau + step)
    first = (p_plus - p_minus) / (2.0 * step)
    second = (p_plus - 2.0 * p_zero + p_minus) / step**2
    return BroadMaximum(first, second, tolerance)


@dataclass(frozen=True)
class CouplingMap:
    """
    由光束剖面得到的 b → R(b)

    偶极耦合 H12 正比于场强，因此 R(b) = R0·sqrt(I(b)/I_peak)，
    R0 是光强峰值处（高斯光束即 b = 0）的耦合强度
    """

    profile: BeamProfile
    reference_coupling: float

    def __post_init__(self):
        if not math.isfinite(self.reference_coupling) or self.reference_coupling < 0:
            raise ValidationError(f"reference coupling must be >= 0, got {self.reference_coupling!r}")

    @property
    def reference_radius(self) -> float:
        return self.profile.peak_radius()

    def coupling_radial(self, radii: ArrayLike) -> ArrayLike:
        radii = np.asarray(radii, dtype=float)
        peak = self.profile.peak_intensity()
        if peak == 0.0:
            return _scalar_or_array(np.zeros_like(radii), radii)
        ratio = intensity_map(self.profile, radii, np.zeros_like(radii)) / peak
        return _scalar_or_array(self.reference_coupling * np.sqrt(ratio), radii)

    def coupling_at(self, b: ImpactParameter) -> float:
        # 标量模型下强度各向同性，只依赖 |b|
        return float(self.coupling_radial(b.magnitude))

    def drive_at(self, b: ImpactParameter, period: float = 1.0) -> DriveParameters:
        return DriveParameters(self.coupling_at(b), period)


class TransferSample(NamedTuple):
    b: ImpactParameter
    coupling: float
    probability: float


def transfer_scan(
    coupling_map: CouplingMap, b_samples: Sequence[ImpactParameter], tau: float = QUARTER_PERIOD
) -> List[TransferSample]:
    """
    沿碰撞参数扫描转移概率 P = sin²[R(b)·sin(2πτ)]

    Raises:
        UsageError: b_samples 为空
    """
    if not b_samples:
        raise UsageError("transfer_scan needs at least one impact parameter sample")

    samples = []
    for b in b_samples:
        coupling = coupling_map.coupling_at(b)
        probability = transition_probability(DriveParameters(coupling), tau)
        samples.append(TransferSample(b, coupling, float(probability)))

    logger.debug(f"Transfer scan: {len(samples)} samples at tau={tau!r}")
    return samples


def complete_transfer_radii(coupling_map: CouplingMap, max_order: int = 0) -> List[Tuple[int, float]]:
    """
    找出 R(b) = m·π/2（m 为奇数）的碰撞参数，即 τ = 1/4 时完全转移的位置

    Args:
        coupling_map: 耦合映射
        max_order: 最大奇数阶 m，0 表示到 R0 允许的最高阶

    Returns:
        [(m, b), ...]，按 b 升序
    """
    r0 = coupling_map.reference_coupling
    highest = int(math.floor(r0 / (math.pi / 2) + 1e-12))
    if max_order:
        highest = min(highest, max_order)
    orders = [m for m in range(1, highest + 1, 2)]
    profile = coupling_map.profile

    if profile.kind is BeamKind.PLANE_WAVE:
        logger.info("Plane-wave coupling is uniform in b; no transfer radii to locate")
        return []

    found: List[Tuple[int, float]] = []
    if profile.kind is BeamKind.GAUSSIAN:
        for m in orders:
            target = m * math.pi / 2
            found.append((m, profile.waist * math.sqrt(max(math.log(r0 / target), 0.0))))
        return sorted(found, key=lambda item: item[1])

    # LG 剖面非单调：径向扫描找变号，再用 Brent 法细化
    x_max = 4.0 * (2 * profile.radial_index + abs(profile.oam_index) + 1) + 20.0
    radii = np.linspace(0.0, profile.waist * math.sqrt(x_max / 2.0), 4001)
    couplings = np.asarray(coupling_map.coupling_radial(radii))
    for m in orders:
        target = m * math.pi / 2
        if math.isclose(r0, target, rel_tol=1e-12):
            # 峰值恰好等于目标：R(b) 在峰值环上相切，没有变号
            found.append((m, coupling_map.reference_radius))
            continue
        residual = couplings - target
        for i in range(len(radii) - 1):
            if residual[i] == 0.0:
                found.append((m, float(radii[i])))
            elif residual[i] * residual[i + 1] < 0:
                root = optimize.brentq(
                    lambda r: float(coupling_map.coupling_radial(r)) - target,
                    radii[i],
                    radii[i + 1],
                    xtol=1e-15 * profile.waist,
                )
                found.append((m, float(root)))
    return sorted(found, key=lambda item: item[1])
