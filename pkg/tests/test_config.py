"""INI 配置与 --set 覆盖"""

import math
from pathlib import Path

import pytest

from src.beam import BeamKind
from src.config import DEFAULT_WAIST, load_run_config
from src.errors import DataIOError, ValidationError


def _write(tmp_path: Path, text: str) -> Path:
    path = tmp_path / "run.ini"
    path.write_text(text, encoding="utf-8")
    return path


def test_defaults_without_file():
    config = load_run_config(subcommand="fig2")
    assert config.subcommand == "fig2"
    assert config.beam.kind is BeamKind.GAUSSIAN
    assert config.beam.profile().waist == DEFAULT_WAIST
    assert config.drive.samples == 1000
    assert config.drive.resolve_coupling(2.718) == 2.718
    assert config.channels.tolerance == 1e-10
    assert config.grid.n == 256 and config.grid.extent == 10.0
    assert config.output_path is None


def test_file_sections_are_parsed(tmp_path):
    path = _write(
        tmp_path,
        """
[beam]
kind = LaguerreGauss
wavelength = 8e-7
rayleigh_range = 1e-3
oam_index = 2

[drive]
coupling = 6.283185307179586
period = 2.0

[channels]
energies = 0.0, 0.5, 1.0
labels = g, e, r
h_g_e = 0.5, 0.25
h_e_r = 1.0
initial = g
final = r

[grid]
n = 64
space = B

[output]
path = out/data.csv
""",
    )
    config = load_run_config(path)
    profile = config.beam.profile()
    assert profile.kind is BeamKind.LAGUERRE_GAUSS
    assert profile.oam_index == 2
    assert profile.rayleigh_range == pytest.approx(1e-3, rel=1e-14)
    # R = |H12|·T/h
    assert config.drive.resolve_coupling(0.0) == pytest.approx(2.0)
    assert config.channels.labels == ("g", "e", "r")
    assert config.channels.couplings[("g", "e")] == complex(0.5, 0.25)
    assert config.channels.couplings[("e", "r")] == complex(1.0, 0.0)
    assert config.grid.space == "b"
    assert config.output_path == Path("out/data.csv")


def test_overrides_win_over_file(tmp_path):
    path = _write(tmp_path, "[drive]\ncoupling_strength = 1.0\n")
    config = load_run_config(path, ["drive.coupling_strength=2.5", "beam.samples=10"])
    assert config.drive.coupling_strength == 2.5
    assert config.beam.samples == 10


def test_out_argument_wins_over_output_section(tmp_path):
    path = _write(tmp_path, "[output]\npath = a.csv\n")
    assert load_run_config(path, output_path=Path("b.csv")).output_path == Path("b.csv")


@pytest.mark.parametrize(
    "overrides, message",
    [
        (["drive.bogus=1"], "Unknown config key"),
        (["physics.r=1"], "Unknown config section"),
        (["nodot=1"], "section.key=value"),
        (["drive.coupling_strength=abc"], "expected a number"),
        (["drive.coupling_strength=inf"], "finite"),
        (["drive.samples=1"], "samples"),
        (["drive.coupling_strength=1", "drive.coupling=2"], "mutually exclusive"),
        (["beam.waist=1e-5", "beam.rayleigh_range=1e-3"], "exactly one"),
        (["beam.kind=Bessel"], "Unknown beam kind"),
        (["drive.tau_start=1", "drive.tau_stop=0.5"], "tau_stop"),
        (["channels.periods=0"], "periods"),
    ],
)
def test_invalid_values(overrides, message):
    with pytest.raises(ValidationError, match=message):
        load_run_config(overrides=overrides)


def test_missing_config_file(tmp_path):
    with pytest.raises(DataIOError, match="not found"):
        load_run_config(tmp_path / "missing.ini")


def test_malformed_config_file(tmp_path):
    path = _write(tmp_path, "coupling_strength = 1.0\n")
    with pytest.raises(DataIOError):
        load_run_config(path)


def test_coupling_from_physical_units():
    config = load_run_config(overrides=["drive.coupling=1.0", "drive.period=2.0", "drive.hbar=0.5"])
    assert config.drive.resolve_coupling(99.0) == pytest.approx(1.0 * 2.0 / (2.0 * math.pi * 0.5))
