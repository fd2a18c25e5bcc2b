import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from wrpmesh import WeightField, build_mesh
from wrpmesh.mesh import MeshKind, MeshSpec, Outside, locate

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def lattice_point(mesh, draw, denom=8):
    """Random exact point inside the closed mesh, on a 1/denom sub-lattice."""
    lat = mesh.corner_lattice
    x0, y0 = lat.min(axis=0)
    x1, y1 = lat.max(axis=0)
    while True:
        x = Fraction(draw(st.integers(int(x0) * denom, int(x1) * denom)), denom)
        y = Fraction(draw(st.integers(int(y0) * denom, int(y1) * denom)), denom)
        if not isinstance(locate(mesh, (x, y)), Outside):
            return (x, y)


@st.composite
def meshes(draw, max_side=4):
    kind = draw(st.sampled_from([MeshKind.SQUARE, MeshKind.HEX]))
    w = draw(st.integers(1, max_side))
    h = draw(st.integers(1, max_side))
    return build_mesh(MeshSpec(kind, w, h))


@st.composite
def weighted_meshes(draw, max_side=4, inf_share=0.15):
    mesh = draw(meshes(max_side))
    vals = []
    for _ in range(mesh.n_cells):
        if draw(st.floats(0, 1)) < inf_share:
            vals.append(math.inf)
        else:
            vals.append(draw(st.floats(0.1, 10.0)))
    return mesh, WeightField(mesh, vals)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for an acceptance criterion and fail the test on FAIL."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def report(number, ok, detail):
        lines.append((number, f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"))
        assert ok, detail

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
