"""
耦合通道积分器
在相互作用绘景下积分振幅方程
    iħ·ȧ_f = Σ_s exp(i·E_fs·t/ħ)·H_fs(b)·g(t)·a_s
支持任意通道数、失谐与随 b、t 变化的耦合

内部使用自然单位 ħ = 1，时间以周期 T 为单位 (τ = t/T)；物理单位只在边界换算
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from .beam import ImpactParameter
from .duality import AmplitudeField, Space, TransverseGrid
from .errors import IntegrationError, UsageError, ValidationError
from .twostate import CouplingMap, DriveParameters

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-10
DEFAULT_SAMPLES_PER_PERIOD = 1000
# solve_ivp 的 rtol 下限约为 100·eps
MIN_RTOL = 1e-13
HERMITIAN_ATOL = 1e-12

Envelope = Callable[[float], float]


def cosine_envelope(tau: float) -> float:
    """默认时间包络 g = cos(2πt/T)，自变量为 τ = t/T"""
    return math.cos(2.0 * math.pi * tau)


@dataclass(frozen=True)
class ChannelBasis:
    """原子本征态基：能量 E_s 与通道名"""

    energies: Tuple[float, ...]
    labels: Tuple[str, ...]

    def __post_init__(self):
        energies = tuple(float(e) for e in self.energies)
        labels = tuple(str(label) for label in self.labels)
        if not energies:
            raise ValidationError("channel basis needs at least one channel")
        if not all(math.isfinite(e) for e in energies):
            raise ValidationError(f"channel energies must be finite, got {energies}")
        if len(labels) != len(energies):
            raise ValidationError(f"{len(labels)} labels given for {len(energies)} channels")
        if len(set(labels)) != len(labels):
            raise ValidationError(f"channel labels must be unique, got {labels}")
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def of(cls, energies: Sequence[float], labels: Optional[Sequence[str]] = None) -> "ChannelBasis":
        if labels is None:
            labels = [str(i + 1) for i in range(len(energies))]
        return cls(tuple(energies), tuple(labels))

    @property
    def size(self) -> int:
        return len(self.energies)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise UsageError(f"Unknown channel '{label}'. Known channels: {', '.join(self.labels)}")


@dataclass(frozen=True, eq=False)
class Interaction:
    """
    相互作用：厄米耦合矩阵 H_fs（能量单位）乘以空间剖面与时间包络

    Args:
        coupling_matrix: 参考点处的 H_fs
        period: 周期 T
        envelope: g(τ)，默认 cos(2πτ)
        spatial_profile: b → 标度因子，None 表示与 b 无关（平面波）
        hbar: ħ 的数值，默认自然单位 1
    """

    coupling_matrix: np.ndarray
    period: float = 1.0
    envelope: Envelope = cosine_envelope
    spatial_profile: Optional[Callable[[ImpactParameter], float]] = None
    hbar: float = 1.0

    def __post_init__(self):
        matrix = np.array(self.coupling_matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValidationError(f"coupling matrix must be square, got shape {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise ValidationError("coupling matrix has non-finite entries")
        if not np.allclose(matrix, matrix.conj().T, rtol=0.0, atol=HERMITIAN_ATOL):
            raise ValidationError("coupling matrix is not Hermitian (H_fs != conj(H_sf)); norm would not be conserved")
        if not math.isfinite(self.period) or self.period <= 0:
            raise ValidationError(f"period must be positive, got {self.period!r}")
        if not math.isfinite(self.hbar) or self.hbar <= 0:
            raise ValidationError(f"hbar must be positive, got {self.hbar!r}")
        matrix.setflags(write=False)
        object.__setattr__(self, "coupling_matrix", matrix)

    @classmethod
    def two_state(cls, params: DriveParameters, hbar: float = 1.0, envelope: Envelope = cosine_envelope) -> "Interaction":
        """二能级驱动：H12 = R·h/T"""
        h12 = params.coupling_strength * 2.0 * math.pi * hbar / params.period
        return cls(np.array([[0.0, h12], [h12, 0.0]]), params.period, envelope, None, hbar)

    @classmethod
    def from_coupling_map(
        cls, coupling_map: CouplingMap, period: float = 1.0, hbar: float = 1.0, envelope: Envelope = cosine_envelope
    ) -> "Interaction":
        """由光束耦合映射构造随 b 变化的二能级相互作用"""
        base = cls.two_state(DriveParameters(coupling_map.reference_coupling, period), hbar, envelope)
        r0 = coupling_map.reference_coupling

        def scale(b: ImpactParameter) -> float:
            if r0 == 0.0:
                return 0.0
            return coupling_map.coupling_at(b) / r0

        return cls(base.coupling_matrix, period, envelope, scale, hbar)

    def spatial_scale(self, b: ImpactParameter) -> float:
        if self.spatial_profile is None:
            return 1.0
        return float(self.spatial_profile(b))

    def matrix_at(self, b: ImpactParameter) -> np.ndarray:
        return self.coupling_matrix * self.spatial_scale(b)


@dataclass(frozen=True)
class AmplitudeVector:
    """某一时刻的通道振幅 a_s"""

    amplitudes: Tuple[complex, ...]
    time: float = 0.0

    @classmethod
    def basis_state(cls, basis: ChannelBasis, label: str, time: float = 0.0) -> "AmplitudeVector":
        amplitudes = [0j] * basis.size
        amplitudes[basis.index(label)] = 1 + 0j
        return cls(tuple(amplitudes), time)

    @property
    def norm(self) -> float:
        return float(sum(abs(a) ** 2 for a in self.amplitudes))

    def probabilities(self) -> Tuple[float, ...]:
        return tuple(abs(a) ** 2 for a in self.amplitudes)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """等间隔记录的振幅轨迹，times 为物理时间，tau = t/T"""

    labels: Tuple[str, ...]
    times: np.ndarray
    tau: np.ndarray
    amplitudes: np.ndarray
    tolerance: float = DEFAULT_TOLERANCE

    def __len__(self) -> int:
        return len(self.times)

    def __getitem__(self, index: int) -> AmplitudeVector:
        return AmplitudeVector(tuple(complex(a) for a in self.amplitudes[index]), float(self.times[index]))

    def __iter__(self) -> Iterator[AmplitudeVector]:
        for i in range(len(self)):
            yield self[i]

    @property
    def final(self) -> AmplitudeVector:
        if len(self) == 0:
            raise UsageError("trajectory is empty")
        return self[len(self) - 1]

    @property
    def norms(self) -> np.ndarray:
        return np.sum(np.abs(self.amplitudes) ** 2, axis=1)

    @property
    def max_norm_error(self) -> float:
        return float(np.max(np.abs(self.norms - 1.0)))

    def probabilities(self, label: str) -> np.ndarray:
        try:
            column = self.labels.index(str(label))
        except ValueError:
            raise UsageError(f"Unknown channel '{label}'. Known channels: {', '.join(self.labels)}")
        return np.abs(self.amplitudes[:, column]) ** 2


def tau_samples(tau0: float, tau1: float, intervals: int) -> np.ndarray:
    """[τ0, τ1] 上 intervals 等分的 intervals + 1 个点"""
    # j/n 而非 linspace：τ = 1/4 等点精确落在网格上
    samples = tau0 + (tau1 - tau0) * (np.arange(intervals + 1) / intervals)
    # 末点舍入可能越过 τ1，solve_ivp 要求 t_eval 落在区间内
    samples[-1] = tau1
    return samples


def evolve(
    basis: ChannelBasis,
    interaction: Interaction,
    b: ImpactParameter,
    t_span: Tuple[float, float],
    initial: AmplitudeVector,
    tolerance: float = DEFAULT_TOLERANCE,
    samples_per_period: float = DEFAULT_SAMPLES_PER_PERIOD,
    method: str = "RK45",
) -> Trajectory:
    """
    积分耦合通道方程

    Args:
        basis: 通道基
        interaction: 相互作用
        b: 碰撞参数
        t_span: (t0, t1)，物理时间；t1 < t0 时向后积分
        initial: 初始振幅（须归一化）
        tolerance: 归一化漂移的目标容差，(0, 1e-4]；内部以 rtol = tolerance·1e-2、atol = tolerance·1e-4 积分
        samples_per_period: 每个周期的等间隔输出点数
        method: solve_ivp 的显式 Runge-Kutta 方法，默认 4(5) 阶嵌入式 RK45

    Returns:
        Trajectory

    Raises:
        ValidationError: 参数不合法
        IntegrationError: 步长下溢等积分失败
    """
    if not (0.0 < tolerance <= 1e-4):
        raise ValidationError(f"tolerance must lie in (0, 1e-4], got {tolerance!r}")
    if not samples_per_period > 0:
        raise ValidationError(f"samples_per_period must be positive, got {samples_per_period}")
    if interaction.coupling_matrix.shape != (basis.size, basis.size):
        raise ValidationError(
            f"coupling matrix shape {interaction.coupling_matrix.shape} does not match {basis.size} channels"
        )
    if len(initial.amplitudes) != basis.size:
        raise ValidationError(f"initial vector has {len(initial.amplitudes)} entries for {basis.size} channels")
    if abs(initial.norm - 1.0) > 1e-8:
        raise ValidationError(f"initial amplitudes must be normalized, norm={initial.norm!r}")

    period = interaction.period
    hbar = interaction.hbar
    # 无量纲化：C = H·T/h，ε = E·T/ħ
    couplings = interaction.matrix_at(b) * period / (2.0 * math.pi * hbar)
    scaled_energies = np.asarray(basis.energies) * period / hbar
    detuning = scaled_energies[:, None] - scaled_energies[None, :]
    degenerate = not np.any(detuning)
    envelope = interaction.envelope
    generator = -2j * math.pi * couplings

    def rhs(tau, a):
        g = envelope(tau)
        if degenerate:
            return g * (generator @ a)
        return g * ((generator * np.exp(1j * detuning * tau)) @ a)

    tau0, tau1 = t_span[0] / period, t_span[1] / period
    intervals = max(1, int(math.ceil(round(abs(tau1 - tau0) * samples_per_period, 9))))
    tau_eval = tau_samples(tau0, tau1, intervals)
    y0 = np.asarray(initial.amplitudes, dtype=complex)

    logger.debug(f"Integrating {basis.size} channel(s) at b={b} over tau [{tau0!r}, {tau1!r}]")
    if tau0 == tau1:
        tau_eval = tau_eval[:1]
        amplitudes = y0[None, :]
    else:
        solution = solve_ivp(
            rhs,
            (tau0, tau1),
            y0,
            method=method,
            t_eval=tau_eval,
            rtol=max(tolerance * 1e-2, MIN_RTOL),
            atol=tolerance * 1e-4,
            max_step=0.05,
        )
        if not solution.success:
            last = solution.t[-1] if len(solution.t) else tau0
            raise IntegrationError(
                f"Coupled-channel integration failed: {solution.message}",
                time=float(last * period),
                impact_parameter=b,
            )
        amplitudes = solution.y.T

    trajectory = Trajectory(basis.labels, tau_eval * period, tau_eval, amplitudes, tolerance)
    drift = trajectory.max_norm_error
    if drift > 10.0 * tolerance:
        logger.warning(f"Norm drift {drift:.3e} exceeds 10x tolerance ({tolerance:.1e}) at b={b}")
    return trajectory


def final_probability(trajectory: Trajectory, channel: str) -> float:
    """
    最后记录时刻通道 f 的概率 |a_f|²

    Raises:
        UsageError: 轨迹为空或通道不存在
    """
    if len(trajectory) == 0:
        raise UsageError("trajectory is empty")
    return float(trajectory.probabilities(channel)[-1])


def _final_amplitude(trajectory: Trajectory, channel: str) -> complex:
    return complex(trajectory.amplitudes[-1, trajectory.labels.index(str(channel))])


@dataclass
class _GridEvaluator:
    """逐点积分；空间标度相同的点只积分一次"""

    basis: ChannelBasis
    interaction: Interaction
    t_span: Tuple[float, float]
    initial: AmplitudeVector
    channel: str
    tolerance: float
    cache: Dict[float, complex] = field(default_factory=dict)

    def amplitude(self, b: ImpactParameter) -> complex:
        scale = self.interaction.spatial_scale(b)
        if scale not in self.cache:
            # evolve 的 IntegrationError 已带上出错的 b
            trajectory = evolve(self.basis, self.interaction, b, self.t_span, self.initial, self.tolerance)
            self.cache[scale] = _final_amplitude(trajectory, self.channel)
        return self.cache[scale]


def _map_over_grid(
    basis: ChannelBasis,
    interaction: Interaction,
    grid: TransverseGrid,
    t_final: float,
    channel: str,
    initial_channel: Optional[str],
    tolerance: float,
) -> np.ndarray:
    basis.index(channel)
    initial_label = initial_channel if initial_channel is not None else basis.labels[0]
    evaluator = _GridEvaluator(
        basis,
        interaction,
        (0.0, t_final),
        AmplitudeVector.basis_state(basis, initial_label),
        channel,
        tolerance,
    )
    x, y = grid.mesh()
    values = np.empty((grid.n, grid.n), dtype=complex)
    for i in range(grid.n):
        for j in range(grid.n):
            values[i, j] = evaluator.amplitude(ImpactParameter(float(x[i, j]), float(y[i, j])))
    logger.info(f"Evaluated {grid.n * grid.n} grid points with {len(evaluator.cache)} distinct integration(s)")
    return values


def amplitude_map(
    basis: ChannelBasis,
    interaction: Interaction,
    grid: TransverseGrid,
    t_final: float,
    channel: str,
    initial_channel: Optional[str] = None,
    tolerance: float = DEFAULT_TOLERANCE,
    wave_number: float = 1.0,
) -> AmplitudeField:
    """网格上的终态振幅 a_f(b)，可直接交给 duality.cross_section_b"""
    values = _map_over_grid(basis, interaction, grid, t_final, channel, initial_channel, tolerance)
    return AmplitudeField(grid, values, Space.B, wave_number)


def probability_map(
    basis: ChannelBasis,
    interaction: Interaction,
    grid: TransverseGrid,
    t_final: float,
    channel: str,
    initial_channel: Optional[str] = None,
    tolerance: float = DEFAULT_TOLERANCE,
    wave_number: float = 1.0,
) -> AmplitudeField:
    """
    网格上的跃迁概率 P(b) = |a_f(b)|²

    每个网格点独立积分，结果与求值顺序无关
    """
    values = _map_over_grid(basis, interaction, grid, t_final, channel, initial_channel, tolerance)
    return AmplitudeField(grid, np.abs(values) ** 2, Space.B, wave_number)
