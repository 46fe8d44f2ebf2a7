"""测试公共设置：把项目根目录加入导入路径"""

import sys
from pathlib import Path

import numpy as np
import pytest

ROOT_DIR = Path(__file__).resolve().parent.parent
if str(ROOT_DIR) not in sys.path:
    sys.path.insert(0, str(ROOT_DIR))

from src.beam import BeamKind, BeamProfile  # noqa: E402


@pytest.fixture
def gaussian_beam() -> BeamProfile:
    return BeamProfile.from_waist(BeamKind.GAUSSIAN, 5e-7, 1e-5)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
