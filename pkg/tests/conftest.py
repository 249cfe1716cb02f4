"""Shared fixtures: the expensive sampled fields and Biot-Savart results
are built once per session and reused across module and acceptance tests."""
import numpy as np
import pytest

import helilab as hl

ACCEPTANCE_LINES: list[tuple[int, str]] = []


def record_acceptance(num: int, ok: bool, detail: str) -> None:
    """Append one pass/fail line for the end-of-run summary, then assert."""
    line = f"ACCEPTANCE {num:2d}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append((num, line))
    print(line)
    assert ok, line


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def ball():
    return hl.Ball((0.0, 0.0, 0.0), 1.0)


@pytest.fixture(scope="session")
def torus21():
    return hl.AxisymTorus(hl.Frame.standard(), 2.0, 1.0)


@pytest.fixture(scope="session")
def tube02():
    # Thin reference tube: unit circle core, eps=0.2, unit flux.
    return hl.make_tube_field(hl.Circle(hl.Frame.standard(), 1.0), 0.2, 1.0)


@pytest.fixture(scope="session")
def tube02_sample(tube02):
    return hl.sample(tube02, hl.build_grid(tube02.support, 0.05))


@pytest.fixture(scope="session")
def tube04():
    return hl.make_tube_field(hl.Circle(hl.Frame.standard(), 1.0), 0.4, 1.0)


@pytest.fixture(scope="session")
def tube04_sample(tube04):
    return hl.sample(tube04, hl.build_grid(tube04.support, 0.08))


@pytest.fixture(scope="session")
def spheromak(ball):
    return hl.make_spheromak(ball)


@pytest.fixture(scope="session")
def spheromak_sample(ball, spheromak):
    field, _ = spheromak
    return hl.sample(field, hl.build_grid(ball, 0.0625))


@pytest.fixture(scope="session")
def spheromak_bs(spheromak_sample):
    return hl.bs_sampled(spheromak_sample)


@pytest.fixture(scope="session")
def basis21(torus21):
    return hl.build_hk_basis([torus21])


@pytest.fixture(scope="session")
def tube06():
    # Tube riding the core of the R=2, a=1 torus; carrier for the
    # harmonic-gauge and helicity-difference scenarios.
    return hl.make_tube_field(hl.Circle(hl.Frame.standard(), 2.0), 0.6, 1.0)


@pytest.fixture(scope="session")
def tube06_torus_sample(tube06, torus21):
    return hl.sample(tube06, hl.build_grid(torus21, 0.1))


@pytest.fixture(scope="session")
def tube06_torus_bs(tube06_torus_sample):
    return hl.bs_sampled(tube06_torus_sample)


@pytest.fixture(scope="session")
def tube06_support_sample(tube06):
    return hl.sample(tube06, hl.build_grid(tube06.support, 0.1))


@pytest.fixture(scope="session")
def hopf_pair():
    t1 = hl.make_tube_field(hl.Circle(hl.Frame.standard(), 1.0), 0.3, 1.0)
    f2 = hl.Frame.from_axis((1.0, 0.0, 0.0), (0.0, 1.0, 0.0))
    t2 = hl.make_tube_field(hl.Circle(f2, 1.0), 0.3, 1.0)
    return t1, t2


@pytest.fixture(scope="session")
def hopf_pair_ball_sample(hopf_pair):
    # Linked supports always intersect each other's bounding spheres, so a
    # union domain cannot hold them; one covering ball does.
    t1, t2 = hopf_pair
    combo = hl.LinearCombination([(1.0, t1), (1.0, t2)])
    grid = hl.build_grid(hl.Ball((0.5, 0.0, 0.0), 1.85), 0.1)
    return hl.sample(combo, grid)
