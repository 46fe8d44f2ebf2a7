"""
光束横向剖面模型
平面波、高斯包络光束与 Laguerre-Gauss 涡旋光束的横向强度、复场，以及
波长、束腰、瑞利长度与涡旋角之间的几何关系
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

import numpy as np
from scipy import optimize, special

from .errors import ValidationError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


class BeamKind(str, Enum):
    """光束类型"""

    PLANE_WAVE = "PlaneWave"
    GAUSSIAN = "Gaussian"
    LAGUERRE_GAUSS = "LaguerreGauss"

    @classmethod
    def parse(cls, value: str) -> "BeamKind":
        """按名称解析，忽略大小写与连字符"""
        normalized = value.strip().replace("-", "").replace("_", "").lower()
        for kind in cls:
            if kind.value.lower() == normalized:
                return kind
        names = ", ".join(k.value for k in cls)
        raise ValidationError(f"Unknown beam kind '{value}'. Expected one of: {names}")


@dataclass(frozen=True)
class ImpactParameter:
    """横向位移矢量 b（光束轴与靶心之间）"""

    bx: float
    by: float = 0.0

    @classmethod
    def polar(cls, magnitude: float, azimuth: float = 0.0) -> "ImpactParameter":
        return cls(magnitude * math.cos(azimuth), magnitude * math.sin(azimuth))

    @property
    def magnitude(self) -> float:
        return math.hypot(self.bx, self.by)

    @property
    def azimuth(self) -> float:
        return math.atan2(self.by, self.bx)

    def __str__(self) -> str:
        return f"({self.bx!r}, {self.by!r})"


def _require_positive(name: str, value: float) -> None:
    if not math.isfinite(value) or value <= 0:
        raise ValidationError(f"{name} must be a positive finite number, got {value!r}")


def rayleigh_range(wavelength: float, waist: float) -> float:
    """
    由波长与束腰计算瑞利长度 z_R = π·w0²/λ

    Raises:
        ValidationError: λ 或 w0 非正
    """
    _require_positive("wavelength", wavelength)
    _require_positive("waist", waist)
    return math.pi * waist**2 / wavelength


def waist_from_rayleigh_range(wavelength: float, z_r: float) -> float:
    """由瑞利长度反推束腰 w0 = sqrt(λ·z_R/π)"""
    _require_positive("wavelength", wavelength)
    _require_positive("rayleigh_range", z_r)
    return math.sqrt(wavelength * z_r / math.pi)


def vortex_angle(b: float, z_r: float) -> float:
    """
    涡旋角 θ_V = arctan(b/z_R)，取值 [0, π/2)

    Args:
        b: 碰撞参数大小
        z_r: 瑞利长度

    Raises:
        ValidationError: b 为负或 z_R 非正
    """
    if not math.isfinite(b) or b < 0:
        raise ValidationError(f"impact parameter must be nonnegative, got {b!r}")
    _require_positive("rayleigh_range", z_r)
    return math.atan(b / z_r)


def impact_parameter_for_angle(theta: float, z_r: float) -> float:
    """涡旋角的反函数：选定锥角对应的碰撞参数 b = z_R·tan θ_V"""
    if not (0 <= theta < math.pi / 2):
        raise ValidationError(f"vortex angle must lie in [0, pi/2), got {theta!r}")
    _require_positive("rayleigh_range", z_r)
    return z_r * math.tan(theta)


@dataclass(frozen=True)
class BeamProfile:
    """
    横向光场模型

    只描述焦平面 (z = 0)，傍轴近似下强度与 z 无关。
    LG 模不带 (p, ℓ) 相关的归一化常数，peak_field 为整体标度。
    """

    kind: BeamKind
    wavelength: float
    waist: float
    rayleigh_range: float
    oam_index: int = 0
    radial_index: int = 0
    peak_field: float = 1.0
    _peak: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        _require_positive("wavelength", self.wavelength)
        _require_positive("waist", self.waist)
        _require_positive("rayleigh_range", self.rayleigh_range)

        expected = math.pi * self.waist**2
        if abs(self.rayleigh_range * self.wavelength - expected) > 1e-12 * expected:
            raise ValidationError(
                f"Inconsistent beam geometry: z_R*lambda={self.rayleigh_range * self.wavelength!r} "
                f"but pi*w0^2={expected!r}"
            )

        if not math.isfinite(self.peak_field) or self.peak_field < 0:
            raise ValidationError(f"peak_field must be >= 0, got {self.peak_field!r}")
        if self.radial_index < 0:
            raise ValidationError(f"radial_index must be >= 0, got {self.radial_index}")
        if self.kind is not BeamKind.LAGUERRE_GAUSS and (self.oam_index or self.radial_index):
            raise ValidationError(
                f"{self.kind.value} beams carry no mode indices "
                f"(got l={self.oam_index}, p={self.radial_index})"
            )

    @classmethod
    def from_waist(
        cls,
        kind: BeamKind,
        wavelength: float,
        waist: float,
        oam_index: int = 0,
        radial_index: int = 0,
        peak_field: float = 1.0,
    ) -> "BeamProfile":
        return cls(
            kind=kind,
            wavelength=wavelength,
            waist=waist,
            rayleigh_range=rayleigh_range(wavelength, waist),
            oam_index=oam_index,
            radial_index=radial_index,
            peak_field=peak_field,
        )

    @classmethod
    def from_rayleigh_range(
        cls,
        kind: BeamKind,
        wavelength: float,
        z_r: float,
        oam_index: int = 0,
        radial_index: int = 0,
        peak_field: float = 1.0,
    ) -> "BeamProfile":
        waist = waist_from_rayleigh_range(wavelength, z_r)
        # 从 w0 重新计算 z_R，保证 z_R·λ = π·w0² 在舍入意义下精确成立
        return cls.from_waist(kind, wavelength, waist, oam_index, radial_index, peak_field)

    @property
    def is_vortex(self) -> bool:
        return self.kind is BeamKind.LAGUERRE_GAUSS and self.oam_index != 0

    def peak_radius(self) -> float:
        """强度最大处的半径"""
        if "radius" not in self._peak:
            self._peak["radius"] = _locate_peak_radius(self)
        return self._peak["radius"]

    def peak_intensity(self) -> float:
        """强度最大值"""
        return float(_intensity_r2(self, np.asarray(self.peak_radius() ** 2)))


def _radial_factor(profile: BeamProfile, r2: np.ndarray) -> np.ndarray:
    """不含 E0 与方位相位的实场振幅"""
    x = 2.0 * r2 / profile.waist**2
    if profile.kind is BeamKind.PLANE_WAVE:
        return np.ones_like(x)
    if profile.kind is BeamKind.GAUSSIAN:
        return np.exp(-x / 2.0)

    ell = abs(profile.oam_index)
    laguerre = special.eval_genlaguerre(profile.radial_index, ell, x)
    return np.sqrt(x) ** ell * laguerre * np.exp(-x / 2.0)


def _intensity_r2(profile: BeamProfile, r2: np.ndarray) -> np.ndarray:
    x = 2.0 * r2 / profile.waist**2
    e0_sq = profile.peak_field**2
    if profile.kind is BeamKind.PLANE_WAVE:
        return np.full_like(x, e0_sq)
    if profile.kind is BeamKind.GAUSSIAN:
        return e0_sq * np.exp(-x)

    ell = abs(profile.oam_index)
    laguerre = special.eval_genlaguerre(profile.radial_index, ell, x)
    # ℓ ≠ 0 时 x**ℓ 在轴上严格为 0
    return e0_sq * x**ell * laguerre**2 * np.exp(-x)


def _locate_peak_radius(profile: BeamProfile) -> float:
    if profile.kind is not BeamKind.LAGUERRE_GAUSS:
        return 0.0

    ell = abs(profile.oam_index)
    p = profile.radial_index
    if p == 0:
        return profile.waist * math.sqrt(ell / 2.0)

    # 在 x = 2b²/w0² 上密集扫描，再在最大值附近做有界细化
    x_max = 4.0 * (2 * p + ell + 1) + 20.0
    xs = np.linspace(0.0, x_max, 20001)
    values = xs**ell * special.eval_genlaguerre(p, ell, xs) ** 2 * np.exp(-xs)
    i = int(np.argmax(values))
    lo = xs[max(i - 1, 0)]
    hi = xs[min(i + 1, len(xs) - 1)]
    if i == 0:
        x_peak = 0.0
    else:
        result = optimize.minimize_scalar(
            lambda x: -(x**ell * special.eval_genlaguerre(p, ell, x) ** 2 * math.exp(-x)),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-12},
        )
        x_peak = float(result.x)
    logger.debug(f"LG(p={p}, l={profile.oam_index}) peak at x={x_peak!r}")
    return profile.waist * math.sqrt(x_peak / 2.0)


def intensity(profile: BeamProfile, b: ImpactParameter) -> float:
    """
    给定碰撞参数处的光强（单位 E0²）

    PlaneWave: E0²；Gaussian: E0²·exp(−2b²/w0²)；
    LaguerreGauss(ℓ, p): E0²·x^|ℓ|·[L_p^|ℓ|(x)]²·exp(−x)，x = 2b²/w0²
    """
    r2 = b.bx**2 + b.by**2
    return float(_intensity_r2(profile, np.asarray(r2, dtype=float)))


def field_amplitude(profile: BeamProfile, b: ImpactParameter) -> complex:
    """复场振幅，|field|² = intensity；涡旋模带方位相位 exp(iℓφ_b)"""
    r2 = b.bx**2 + b.by**2
    radial = float(_radial_factor(profile, np.asarray(r2, dtype=float)))
    value = profile.peak_field * radial
    if profile.oam_index:
        return complex(value * np.exp(1j * profile.oam_index * b.azimuth))
    return complex(value)


def intensity_map(profile: BeamProfile, bx: ArrayLike, by: ArrayLike) -> np.ndarray:
    """intensity 的向量化版本，bx/by 可为任意可广播的数组"""
    bx = np.asarray(bx, dtype=float)
    by = np.asarray(by, dtype=float)
    return _intensity_r2(profile, bx**2 + by**2)


def field_map(profile: BeamProfile, bx: ArrayLike, by: ArrayLike) -> np.ndarray:
    bx = np.asarray(bx, dtype=float)
    by = np.asarray(by, dtype=float)
    values = profile.peak_field * _radial_factor(profile, bx**2 + by**2).astype(complex)
    if profile.oam_index:
        values = values * np.exp(1j * profile.oam_index * np.arctan2(by, bx))
    return values
