import numpy as np
import pytest

from layerheat import Half, Polynomial, contour_nodes, make_problem
from layerheat.assembly import SpectralSystem, assemble_system
from layerheat.errors import SingularNode, TooManyOverflowNodes
from layerheat.spectral import (
    Provenance,
    _runs,
    build_spectral_table,
    build_tables,
    dump_table,
    equilibrated_log_det,
    solve_at_node,
    solve_nodes,
)

EXAMPLES = ["A", "A0", "B", "C", "D"]


@pytest.fixture(scope="module")
def grid():
    return contour_nodes(Half.PLUS)


def test_zero_data_gives_zero_unknowns(grid):
    vp = make_problem((0, 1), (1,), (1, 0, 1, 0), 0, 0, 0.0)
    x, res = solve_at_node(assemble_system(vp, 1j * np.sin(np.pi / 8), 0.1))
    assert np.all(x == 0) and res == 0
    tab = build_spectral_table(vp, grid, 0.1)
    assert np.all(tab.values == 0)


def test_example_a_center_residual(example):
    vp = example("A")
    _, res = solve_at_node(assemble_system(vp, 1j * np.sin(np.pi / 8), 0.1))
    assert res <= 1e-10


@pytest.mark.parametrize("name", EXAMPLES)
def test_table_all_solved_small_residual(example, grid, name):
    tab = build_spectral_table(example(name), grid, 0.1)
    assert tab.interpolated_fraction == 0.0
    assert tab.max_residual <= 1e-10


@pytest.mark.parametrize("name", EXAMPLES + ["E19", "F19"])
def test_nu_parity_on_random_nodes(example, name):
    vp = example(name[0], 19) if name.endswith("19") else example(name)
    rng = np.random.default_rng(7)
    count = 1000 if not name.endswith("19") else 300
    nu = rng.uniform(-4, 4, count) + 1j * rng.uniform(0.02, 4, count)
    X1, r1, _, ok1 = solve_nodes(vp, nu, 0.1)
    X2, r2, _, ok2 = solve_nodes(vp, -nu, 0.1)
    assert ok1.all() and ok2.all()
    scale = np.abs(X1).max(axis=1, keepdims=True)
    assert np.all(np.abs(X1 - X2) <= 1e-10 * scale)
    assert max(r1.max(), r2.max()) <= 1e-10


def test_mirror_matches_independent_solve(example, grid):
    vp = example("C")
    a = build_spectral_table(vp, grid, 0.3)
    b = build_spectral_table(vp, grid, 0.3, mirror=False)
    assert np.all(np.abs(a.values - b.values) <= 1e-12 * np.abs(b.values).max())
    plus, minus = build_tables(vp, grid, 0.3, independent=True)
    np.testing.assert_allclose(minus.values, plus.values, rtol=0, atol=1e-12 * np.abs(plus.values).max())
    assert minus.grid.half is Half.MINUS


@pytest.mark.parametrize("name", EXAMPLES)
def test_systems_are_far_from_singular(example, grid, name):
    d = equilibrated_log_det(example(name), grid.nodes[::10], 0.1)
    assert np.nanmin(d) > np.log(1e-12)


def test_singular_node_detected():
    A = np.array([[1.0, 2.0], [2.0, 4.0]], dtype=complex)
    with pytest.raises(SingularNode):
        solve_at_node(SpectralSystem(A, np.ones(2, complex), 1j, 1.0, 1.0, np.zeros(2)))


def test_overflow_fallback_fills_tails(example):
    vp = example("A")
    g = contour_nodes(Half.PLUS, 10.0, 2001)
    tab = build_spectral_table(vp, g, 0.1, raw_overflow=True)
    interp = tab.provenance == Provenance.INTERPOLATED
    assert 0 < tab.interpolated_fraction <= 0.2
    runs = _runs(interp)
    # only the two tails
    assert len(runs) == 2 and runs[0][0] == 0 and runs[1][1] == len(interp)
    assert np.all(np.isfinite(tab.values))
    assert np.all(tab.residuals[tab.solved] <= 1e-10)


def test_too_many_overflow_nodes(example):
    g = contour_nodes(Half.PLUS, 12.0, 2401)
    with pytest.raises(TooManyOverflowNodes):
        build_spectral_table(example("A"), g, 0.1, raw_overflow=True)


def test_large_ratio_problem_still_solves(grid):
    vp = make_problem((0, 1), (1e-3,), (1, 0, 1, 0), 0, 1, 0.0)
    tab = build_spectral_table(vp, grid, 0.1)
    assert tab.interpolated_fraction == 0.0


def test_table_values_decay_for_homogeneous_data(example, grid):
    tab = build_spectral_table(example("A0"), grid, 0.1)
    mag = np.abs(tab.values).max(axis=1)
    tail = np.abs(grid.theta) >= 0.9 * grid.theta_max
    assert mag[tail].max() <= 1e-8 * mag.max()


def test_threads_give_identical_table(example, grid):
    vp = example("B")
    a = build_spectral_table(vp, grid, 0.1)
    b = build_spectral_table(vp, grid, 0.1, workers=3)
    np.testing.assert_array_equal(a.values, b.values)


def test_dump_table(tmp_path, grid):
    vp = make_problem((0, 0.5, 1), (1, 2), (1, 0, 1, 0), 0, 1, Polynomial((0, 1)))
    tab = build_spectral_table(vp, contour_nodes(Half.PLUS, 3, 33), 0.2)
    path = tmp_path / "t.csv"
    dump_table(tab, path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# half=plus")
    assert lines[1].split(",")[0] == "theta"
    assert len(lines) == 2 + 33
    assert lines[2].endswith("solved")
