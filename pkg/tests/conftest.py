from __future__ import annotations

from pathlib import Path

import pytest

from strebel.surface import BoundaryInterval, Cylinder, CylinderDecomposition, Gluing, RaySpec, SimilarPair

DATA = Path(__file__).resolve().parent.parent / "examples_data"

_criteria: dict[int, tuple[str, str]] = {}


def cycle_surface(moduli, labels=None, circumference=1.0) -> CylinderDecomposition:
    """Cylinders arranged in a cycle: side 2 of cylinder i is glued to side 1 of cylinder i+1."""
    k = len(moduli)
    labels = labels or [f"g{i}" for i in range(k)]
    cyls = tuple(Cylinder(lab, circumference, float(m)) for lab, m in zip(labels, moduli))
    glu = tuple(
        Gluing(
            BoundaryInterval(labels[i], 2, 0.0, circumference),
            BoundaryInterval(labels[(i + 1) % k], 1, 0.0, circumference),
        )
        for i in range(k)
    )
    return CylinderDecomposition(1, k, cyls, glu, (-1,) * k + (1,) * k)


def direct_pair(left_moduli, right_moduli, end_distance=0.0) -> SimilarPair:
    """A similar pair on the cycle surface, skipping the similarity search."""
    a, b = cycle_surface(left_moduli), cycle_surface(right_moduli)
    k = len(left_moduli)
    return SimilarPair(RaySpec(a), RaySpec(b), tuple((lab, lab) for lab in a.labels), tuple(range(k)), end_distance)


@pytest.fixture
def data_dir() -> Path:
    return DATA


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and short title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _criteria[n] = (title, "PASS" if rep.outcome == "passed" else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        title, status = _criteria[n]
        terminalreporter.write_line(f"{status} criterion {n:2d}: {title}")
