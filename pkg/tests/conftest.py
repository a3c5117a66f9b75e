import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from plsplit import generators as g  # noqa: E402

# lines on the genus-2 product used across modules: direction, offset
PRODUCT_LINES = {"h": ((1, 0), (0.137, 1.52)), "v": ((0, 1), (1.41, 0.263)), "s": ((1, 2), (0.17, 2.31))}


def small_windows():
    """Finite fixtures with at most three tets."""
    return [g.single_tet(), g.double_s3(), g.one_vertex_s3(), g.three_tet_closed(), g.tet_chain(2)]


def closed_windows():
    return [g.double_s3(), g.one_vertex_s3(), g.three_tet_closed()]


@pytest.fixture(scope="session")
def product2():
    """S^1 x (genus-2 surface) with three vertical tori over straight lines."""
    from plsplit.surface import realize_surface

    P = g.product(g.genus2_base(4), g.circle_fiber(1))
    out = {}
    for key, (d, o) in PRODUCT_LINES.items():
        curve = g.straight_curve(P.base, 4, d, o)
        coords, params = g.vertical_surface(P, curve)
        out[key] = (realize_surface(P.window, coords, params, name=key), curve, coords, params)
    return P, out


@pytest.fixture(scope="session")
def product_census(product2):
    from plsplit.jsj import census_from_surfaces

    P, surfs = product2
    return census_from_surfaces(P.window, {k: (v[2], v[3]) for k, v in surfs.items()})


@pytest.fixture(scope="session")
def periodic_fx():
    return g.periodic_annulus(8)


@pytest.fixture(scope="session")
def motivating():
    return g.motivating_example()


# ------------------------------------------------------- acceptance lines
_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1][len("test_criterion_") :]
    if report.when == "call" or report.failed:
        _ACCEPTANCE[name] = "PASS" if report.passed and _ACCEPTANCE.get(name) != "FAIL" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        num, _, desc = name.partition("_")
        terminalreporter.write_line(f"criterion {int(num):2d}: {_ACCEPTANCE[name]}  {desc.replace('_', ' ')}")
