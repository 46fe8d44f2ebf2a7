"""
运行配置
读取 INI 配置文件并应用命令行 --set 覆盖，生成各子命令共享的 RunConfig
"""

import configparser
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

from .beam import BeamKind, BeamProfile
from .errors import DataIOError, ValidationError

logger = logging.getLogger(__name__)

DEFAULT_WAIST = 1e-5
COUPLING_KEY = re.compile(r"^h_(\w+?)_(\w+)$")

# 各节允许的键；channels 节另外接受 h_<f>_<s> 形式的耦合矩阵元
KNOWN_KEYS: Dict[str, Tuple[str, ...]] = {
    "beam": (
        "kind", "wavelength", "waist", "rayleigh_range", "oam_index", "radial_index",
        "peak_field", "b_max", "samples", "azimuth", "image", "image_size",
    ),
    "drive": (
        "coupling_strength", "coupling", "period", "hbar",
        "tau_start", "tau_stop", "samples", "tau",
    ),
    "channels": ("energies", "labels", "initial", "final", "tolerance", "periods", "samples_per_period"),
    "grid": ("n", "extent", "k", "sigma", "space"),
    "output": ("path",),
}


@dataclass(frozen=True)
class BeamConfig:
    kind: BeamKind = BeamKind.GAUSSIAN
    wavelength: float = 5e-7
    waist: Optional[float] = None
    rayleigh_range: Optional[float] = None
    oam_index: int = 0
    radial_index: int = 0
    peak_field: float = 1.0
    b_max: float = 2.0
    samples: int = 200
    azimuth: float = 0.0
    image: Optional[Path] = None
    image_size: int = 256

    def profile(self) -> BeamProfile:
        """由 waist 或 rayleigh_range（二选一）构造光束剖面"""
        if self.rayleigh_range is not None:
            return BeamProfile.from_rayleigh_range(
                self.kind, self.wavelength, self.rayleigh_range,
                self.oam_index, self.radial_index, self.peak_field,
            )
        waist = self.waist if self.waist is not None else DEFAULT_WAIST
        return BeamProfile.from_waist(
            self.kind, self.wavelength, waist, self.oam_index, self.radial_index, self.peak_field
        )


@dataclass(frozen=True)
class DriveConfig:
    coupling_strength: Optional[float] = None
    coupling: Optional[float] = None
    period: float = 1.0
    hbar: float = 1.0
    tau_start: float = 0.0
    tau_stop: float = 1.0
    samples: int = 1000
    tau: float = 0.25

    def resolve_coupling(self, default: float) -> float:
        """R：显式给出的 R，或由 H12·T/h 换算，否则取子命令默认值"""
        if self.coupling_strength is not None:
            return self.coupling_strength
        if self.coupling is not None:
            return abs(self.coupling) * self.period / (2.0 * math.pi * self.hbar)
        return default


@dataclass(frozen=True)
class ChannelConfig:
    energies: Tuple[float, ...] = (0.0, 0.0)
    labels: Optional[Tuple[str, ...]] = None
    couplings: Dict[Tuple[str, str], complex] = field(default_factory=dict)
    initial: str = "1"
    final: str = "2"
    tolerance: float = 1e-10
    periods: float = 1.0
    samples_per_period: int = 1000


@dataclass(frozen=True)
class GridConfig:
    n: int = 256
    extent: float = 10.0
    k: float = 1.0
    sigma: float = 1.0
    space: str = "q"


@dataclass(frozen=True)
class RunConfig:
    """一次运行的全部配置"""

    subcommand: str = ""
    beam: BeamConfig = field(default_factory=BeamConfig)
    drive: DriveConfig = field(default_factory=DriveConfig)
    channels: ChannelConfig = field(default_factory=ChannelConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    output_path: Optional[Path] = None


def _to_float(section: str, key: str, raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ValidationError(f"[{section}] {key}: expected a number, got '{raw}'")
    if not math.isfinite(value):
        raise ValidationError(f"[{section}] {key}: value must be finite, got '{raw}'")
    return value


def _to_int(section: str, key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"[{section}] {key}: expected an integer, got '{raw}'")


def _to_list(raw: str) -> List[str]:
    return [item.strip() for item in raw.split(",") if item.strip()]


def _to_complex(section: str, key: str, raw: str) -> complex:
    parts = _to_list(raw)
    if len(parts) == 1:
        parts.append("0")
    if len(parts) != 2:
        raise ValidationError(f"[{section}] {key}: expected 're, im', got '{raw}'")
    return complex(_to_float(section, key, parts[0]), _to_float(section, key, parts[1]))


def apply_overrides(parser: configparser.ConfigParser, overrides: Iterable[str]) -> None:
    """
    应用 --set section.key=value 覆盖

    Raises:
        ValidationError: 覆盖项格式错误
    """
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ValidationError(f"Override must look like section.key=value, got '{item}'")
        target, value = item.split("=", 1)
        section, key = target.strip().split(".", 1)
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, key.strip(), value.strip())
        logger.debug(f"Override: [{section}] {key.strip()} = {value.strip()}")


def _check_keys(parser: configparser.ConfigParser) -> None:
    for section in parser.sections():
        if section not in KNOWN_KEYS:
            raise ValidationError(f"Unknown config section [{section}]")
        for key in parser[section]:
            if key in KNOWN_KEYS[section]:
                continue
            if section == "channels" and COUPLING_KEY.match(key):
                continue
            raise ValidationError(f"Unknown config key [{section}] {key}")


def _parse_beam(values: configparser.SectionProxy) -> BeamConfig:
    kwargs = {}
    if "kind" in values:
        kwargs["kind"] = BeamKind.parse(values["kind"])
    for key in ("wavelength", "waist", "rayleigh_range", "peak_field", "b_max", "azimuth"):
        if key in values:
            kwargs[key] = _to_float("beam", key, values[key])
    for key in ("oam_index", "radial_index", "samples", "image_size"):
        if key in values:
            kwargs[key] = _to_int("beam", key, values[key])
    if values.get("image"):
        kwargs["image"] = Path(values["image"])

    if "waist" in kwargs and "rayleigh_range" in kwargs:
        raise ValidationError("[beam] give exactly one of waist / rayleigh_range, not both")
    config = BeamConfig(**kwargs)
    if config.samples < 2:
        raise ValidationError(f"[beam] samples must be >= 2, got {config.samples}")
    if config.b_max <= 0:
        raise ValidationError(f"[beam] b_max must be positive, got {config.b_max!r}")
    # 光束几何与模指数在加载时检查
    config.profile()
    return config


def _parse_drive(values: configparser.SectionProxy) -> DriveConfig:
    kwargs = {}
    for key in ("coupling_strength", "coupling", "period", "hbar", "tau_start", "tau_stop", "tau"):
        if key in values:
            kwargs[key] = _to_float("drive", key, values[key])
    if "samples" in values:
        kwargs["samples"] = _to_int("drive", "samples", values["samples"])

    if "coupling_strength" in kwargs and "coupling" in kwargs:
        raise ValidationError("[drive] coupling_strength (R) and coupling (H12 with period) are mutually exclusive")
    config = DriveConfig(**kwargs)
    if config.samples < 2:
        raise ValidationError(f"[drive] samples must be >= 2, got {config.samples}")
    if config.period <= 0 or config.hbar <= 0:
        raise ValidationError("[drive] period and hbar must be positive")
    if config.tau_stop <= config.tau_start:
        raise ValidationError("[drive] tau_stop must exceed tau_start")
    return config


def _parse_channels(values: configparser.SectionProxy) -> ChannelConfig:
    kwargs = {}
    if "energies" in values:
        kwargs["energies"] = tuple(_to_float("channels", "energies", e) for e in _to_list(values["energies"]))
    if "labels" in values:
        kwargs["labels"] = tuple(_to_list(values["labels"]))
    for key in ("initial", "final"):
        if key in values:
            kwargs[key] = values[key].strip()
    for key in ("tolerance", "periods"):
        if key in values:
            kwargs[key] = _to_float("channels", key, values[key])
    if "samples_per_period" in values:
        kwargs["samples_per_period"] = _to_int("channels", "samples_per_period", values["samples_per_period"])

    couplings = {}
    for key in values:
        match = COUPLING_KEY.match(key)
        if match:
            couplings[(match.group(1), match.group(2))] = _to_complex("channels", key, values[key])
    kwargs["couplings"] = couplings

    config = ChannelConfig(**kwargs)
    if config.samples_per_period < 2:
        raise ValidationError(f"[channels] samples_per_period must be >= 2, got {config.samples_per_period}")
    if config.periods <= 0:
        raise ValidationError(f"[channels] periods must be positive, got {config.periods!r}")
    return config


def _parse_grid(values: configparser.SectionProxy) -> GridConfig:
    kwargs = {}
    if "n" in values:
        kwargs["n"] = _to_int("grid", "n", values["n"])
    for key in ("extent", "k", "sigma"):
        if key in values:
            kwargs[key] = _to_float("grid", key, values[key])
    if "space" in values:
        kwargs["space"] = values["space"].strip().lower()
    return GridConfig(**kwargs)


def load_run_config(
    config_path: Optional[Path] = None,
    overrides: Iterable[str] = (),
    subcommand: str = "",
    output_path: Optional[Path] = None,
) -> RunConfig:
    """
    加载运行配置

    Args:
        config_path: INI 配置文件路径，None 表示全部使用默认值
        overrides: --set 覆盖项
        subcommand: 子命令名
        output_path: --out 路径，优先于 [output] path

    Returns:
        RunConfig

    Raises:
        DataIOError: 配置文件不存在或无法解析
        ValidationError: 配置不满足约束
    """
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";",))
    if config_path is not None:
        if not config_path.exists():
            raise DataIOError(f"Config file not found: {config_path}")
        try:
            with open(config_path, "r", encoding="utf-8") as f:
                parser.read_file(f)
        except (OSError, configparser.Error) as e:
            raise DataIOError(f"Failed to read config {config_path}: {e}")
        logger.debug(f"Loaded config: {config_path}")

    apply_overrides(parser, overrides)
    _check_keys(parser)

    def section(name: str) -> configparser.SectionProxy:
        if not parser.has_section(name):
            parser.add_section(name)
        return parser[name]

    if output_path is None and section("output").get("path"):
        output_path = Path(section("output")["path"])

    return RunConfig(
        subcommand=subcommand,
        beam=_parse_beam(section("beam")),
        drive=_parse_drive(section("drive")),
        channels=_parse_channels(section("channels")),
        grid=_parse_grid(section("grid")),
        output_path=output_path,
    )
