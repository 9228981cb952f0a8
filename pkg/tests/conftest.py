import math

import numpy as np
import pytest

from lateral_bitstar import data_dir
from lateral_bitstar.reference_path import build_reference_path


@pytest.fixture
def straight_path():
    return build_reference_path([(0.0, 0.0, 0.0), (10.0, 0.0, 0.0)], a=0.1, q_bounds=(-2.0, 2.0))


@pytest.fixture(scope="session")
def shipped():
    return data_dir()


def smooth_path(rng: np.random.Generator, n: int = 60, step: float = 0.25, max_curv: float = 0.15):
    """Random gently curving path; curvature radius stays well above the corridor half-width."""
    kappa = np.cumsum(rng.normal(0.0, 0.02, n)).clip(-max_curv, max_curv)
    psi = np.concatenate(([rng.uniform(-math.pi, math.pi)], np.zeros(n - 1)))
    for k in range(1, n):
        psi[k] = psi[k - 1] + kappa[k] * step
    x = np.concatenate(([0.0], np.cumsum(step * np.cos(psi[:-1]))))
    y = np.concatenate(([0.0], np.cumsum(step * np.sin(psi[:-1]))))
    return [(float(a), float(b), float(c)) for a, b, c in zip(x, y, psi)]


_acceptance_lines = []


def record_acceptance(line: str) -> None:
    _acceptance_lines.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
