import sys
from pathlib import Path

import pytest
from hypothesis import settings

from biphoton.dispersion import default_ktp_dispersion, equal_index_dispersion
from biphoton.physics import CrystalConfig, DetectionConfig, PumpConfig

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "scripts"))

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

UM = 1e-6


@pytest.fixture(scope="session")
def ktp():
    return default_ktp_dispersion()


@pytest.fixture(scope="session")
def crystal():
    return CrystalConfig()


@pytest.fixture(scope="session")
def equal_index():
    return equal_index_dispersion(PumpConfig(7.6 * UM).omega)


def setup(w_p_um, w_d_um):
    return PumpConfig(w_p_um * UM), DetectionConfig(w_d_um * UM)


ACCEPTANCE = []


def record(number, name, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {name} :: {detail}"
    ACCEPTANCE.append((number, line))
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE, key=lambda x: x[0]):
            terminalreporter.write_line(line)
