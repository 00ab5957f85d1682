import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from layerheat import Polynomial, make_problem
from layerheat.assembly import (
    assemble_imperfect,
    assemble_matrix,
    assemble_perfect,
    assemble_rhs,
    assemble_system,
    equilibrated_systems,
    layout,
    sparsity_mask,
)
from layerheat.errors import OverflowAtArgument, WrongInterfaceKind

NU0 = 1j * math.sin(math.pi / 8)


def block_pattern(n, imperfect):
    """Diagonal pattern of the four (n+2)-blocks as documented for each contact kind."""
    b = n + 2
    if imperfect:
        diags = {(0, 0): (0, 1), (0, 1): (-1, -2), (1, 0): (1, 2), (1, 1): (0, -1)}
    else:
        diags = {(0, 0): (0, -1), (0, 1): (0, -1), (1, 0): (0, 1), (1, 1): (0, 1)}
    P = np.zeros((2 * b, 2 * b), dtype=bool)
    for (bi, bj), ds in diags.items():
        for i in range(b):
            for d in ds:
                if 0 <= i + d < b:
                    P[bi * b + i, bj * b + i + d] = True
    return P


def imperfect_exceptions(n):
    """Corner entries outside the diagonal description: the g1 and h1 columns."""
    b = n + 2
    return {(1, 0), (n + 1, 2 * n + 3), (b, 0), (2 * n + 2, 2 * n + 3)}


def stack(n, imperfect, rng=None):
    rng = rng or np.random.default_rng(n)
    x = np.concatenate([[0], np.cumsum(rng.uniform(0.2, 1.0, n + 1))])
    sig = rng.uniform(0.3, 2.0, n + 1)
    H = rng.uniform(0.2, 3.0, n) if imperfect else None
    return make_problem(x, sig, (1.0, 0.5, 2.0, 1.0), 1.0, -1.0, Polynomial((1, 0.5)), H)


def test_example_a_perfect_pattern_is_exact():
    vp = make_problem((0, 1 / 3, 2 / 3, 1), (1, 1, 1), (1, 0, 1, 0), 0, 1, Polynomial((0, 0, 0, 1)))
    A = assemble_perfect(vp, NU0)
    P = block_pattern(2, False)
    assert not np.any((A != 0) & ~P)
    # only the Robin derivative weights (beta2 = beta4 = 0) drop out
    assert {tuple(map(int, ij)) for ij in np.argwhere(P & (A == 0))} == {(0, 4), (7, 7)}


@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_imperfect_pattern_with_corner_exceptions(n):
    vp = stack(n, True)
    mask = sparsity_mask(vp)
    extra = {tuple(map(int, ij)) for ij in np.argwhere(mask & ~block_pattern(n, True))}
    assert extra == imperfect_exceptions(n)
    assert not np.any(block_pattern(n, True) & ~mask)


@given(st.integers(1, 8), st.booleans(), st.integers(0, 2 ** 31), st.floats(-4, 4), st.floats(0.05, 4))
def test_block_sparsity_random(n, imperfect, seed, re, im):
    vp = stack(n, imperfect, np.random.default_rng(seed))
    A = assemble_matrix(vp, complex(re, im))
    allowed = block_pattern(n, imperfect)
    if imperfect:
        for ij in imperfect_exceptions(n):
            allowed[ij] = True
    assert not np.any((A != 0) & ~allowed)


def test_wrong_interface_kind():
    with pytest.raises(WrongInterfaceKind):
        assemble_imperfect(stack(2, False), NU0)
    with pytest.raises(WrongInterfaceKind):
        assemble_perfect(stack(2, True), NU0)


@given(st.integers(0, 6), st.booleans(), st.floats(-3, 3), st.floats(0.05, 3))
def test_minus_nu_permutes_rows(n, imperfect, re, im):
    vp = stack(n, imperfect and n > 0)
    nu = complex(re, im)
    A, B = assemble_matrix(vp, nu), assemble_matrix(vp, -nu)
    y, z = assemble_rhs(vp, nu, 0.3), assemble_rhs(vp, -nu, 0.3)
    b = n + 2
    perm = np.r_[0, np.arange(b, 2 * b - 1), np.arange(1, b), 2 * b - 1]
    np.testing.assert_allclose(B, A[perm], rtol=1e-13, atol=1e-300)
    np.testing.assert_allclose(z, y[perm], rtol=1e-12)


def test_rhs_ordering_and_scaling():
    vp = make_problem((0, 1 / 3, 2 / 3, 1), (1, 1, 1), (1, 0, 1, 0), 0, 1, Polynomial((0, 0, 0, 1)))
    y = assemble_rhs(vp, NU0, 0.1)
    ys = assemble_rhs(vp, NU0, 0.1, scale_time=0.1)
    np.testing.assert_allclose(ys, y * np.exp(-NU0 ** 2 * 0.1), rtol=1e-13)
    assert y[0] == 0
    assert y[-1] == pytest.approx((np.exp(NU0 ** 2 * 0.1) - 1) / NU0 ** 2, rel=1e-13)


def test_equilibrated_rows_reproduce_raw_system():
    vp = stack(3, True)
    nu = 0.7 + 1.1j
    sysm = assemble_system(vp, nu, 0.4)
    raw = assemble_matrix(vp, nu)
    scale = np.exp(sysm.row_log_scale)
    np.testing.assert_allclose(sysm.matrix * scale[:, None], raw, rtol=1e-12, atol=1e-300)
    np.testing.assert_allclose(np.abs(sysm.matrix).max(axis=1), 1.0, rtol=1e-12)
    y = assemble_rhs(vp, nu, 0.4, scale_time=0.4)
    np.testing.assert_allclose(sysm.rhs * scale, y, rtol=1e-11)


def test_raw_assembly_overflows_but_equilibrated_does_not():
    vp = make_problem((0, 1), (1e-3,), (1, 0, 1, 0), 0, 1, 0.0)
    nu = 1j * 10.0
    with pytest.raises(OverflowAtArgument):
        assemble_matrix(vp, nu)
    A, Y, R, ok = equilibrated_systems(vp, [nu], 0.1)
    assert ok[0] and np.all(np.isfinite(A))
    _, _, _, ok_raw = equilibrated_systems(vp, [nu], 0.1, raw_overflow=True)
    assert not ok_raw[0]


def test_layout_columns_are_a_permutation():
    for imperfect in (False, True):
        vp = stack(4, imperfect)
        lay = layout(vp)
        if imperfect:
            cols = [lay.g1(0), lay.h1] + [lay.g0(l) for l in range(5)] + [lay.h0(l) for l in range(5)]
        else:
            cols = [lay.h0(4), lay.h1] + [lay.g0(l) for l in range(5)] + [lay.g1(l) for l in range(5)]
        assert sorted(cols) == list(range(lay.size))
