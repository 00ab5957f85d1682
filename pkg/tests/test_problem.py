import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from layerheat import (
    BoundarySpec,
    Constant,
    Cosine,
    InterfaceSpec,
    LayerStack,
    Polynomial,
    Problem,
    Sampled,
    make_problem,
    validate,
)
from layerheat.errors import (
    DegenerateBoundaryRow,
    InvalidProblem,
    InvalidSignal,
    LengthMismatch,
    NonIncreasingBreakpoints,
    NonPositiveSigma,
    ZeroContactCoefficient,
)
from layerheat.problem import signal_from_dict


def _problem(breakpoints=(0, 1 / 3, 2 / 3, 1), sigmas=(1, 1, 1), iface=None,
             beta=(1, 0, 1, 0), initial=Constant(0.0)):
    return Problem(LayerStack(breakpoints, sigmas), iface or InterfaceSpec.perfect(),
                   BoundarySpec(beta, Constant(0.0), Constant(1.0)), initial)


def test_example_a_setup_is_valid():
    vp = validate(_problem(initial=Polynomial((0, 0, 0, 1))))
    assert vp.n == 2 and vp.n_layers == 3
    assert vp.x[0] == 0.0 and vp.shift == 0.0


@pytest.mark.parametrize("kwargs, exc", [
    (dict(breakpoints=(0, 0.5, 0.5, 1)), NonIncreasingBreakpoints),
    (dict(sigmas=(1, 0, 1)), NonPositiveSigma),
    (dict(sigmas=(1, -2, 1)), NonPositiveSigma),
    (dict(sigmas=(1, 1)), LengthMismatch),
    (dict(iface=InterfaceSpec.imperfect([0.5, 0.0])), ZeroContactCoefficient),
    (dict(iface=InterfaceSpec.imperfect([0.5])), LengthMismatch),
    (dict(beta=(0, 0, 1, 0)), DegenerateBoundaryRow),
    (dict(beta=(1, 0, 0, 0)), DegenerateBoundaryRow),
    (dict(initial=(Constant(0.0),) * 2), LengthMismatch),
    (dict(initial=Cosine(1, 1)), InvalidSignal),
])
def test_validation_rejects(kwargs, exc):
    with pytest.raises(exc):
        validate(_problem(**kwargs))


def test_all_violations_are_collected():
    with pytest.raises(InvalidProblem) as info:
        validate(_problem(breakpoints=(0, 1, 0.5, 2), sigmas=(1, -1, 1), beta=(0, 0, 1, 0)))
    assert len(info.value.violations) == 3


def test_validated_arrays_are_read_only():
    vp = validate(_problem())
    with pytest.raises(ValueError):
        vp.x[1] = 0.2


def test_validate_is_idempotent():
    vp = validate(_problem())
    assert validate(vp) is vp


def test_shift_moves_left_end_to_zero_and_reexpands_polynomials():
    vp = make_problem((2, 2.5, 3), (1, 2), (1, 0, 1, 0), 0, 1, Polynomial((1, -2, 0.5)))
    np.testing.assert_allclose(vp.x, [0, 0.5, 1])
    assert vp.shift == 2.0
    xs = np.linspace(0, 1, 7)
    np.testing.assert_allclose(vp.initial_value(xs), Polynomial((1, -2, 0.5))(xs + 2), rtol=1e-13)


def test_sampled_initial_condition_is_shifted():
    ic = Sampled((1.0, 1.5, 2.0), (0.0, 1.0, 0.0))
    vp = make_problem((1, 2), (1,), (1, 0, 1, 0), 0, 0, ic)
    assert vp.initial_value(0.5)[0] == pytest.approx(1.0)


def test_to_problem_recovers_original_frame():
    prob = _problem(breakpoints=(-1, 0, 1, 3))
    vp = validate(prob)
    back = vp.to_problem()
    assert back.layers == prob.layers
    assert validate(back) == vp


def test_layer_of_interface_sides():
    vp = validate(_problem())
    assert vp.layer_of(1 / 3, "left") == 0
    assert vp.layer_of(1 / 3, "right") == 1
    assert vp.layer_of(0.0, "left") == 0
    assert vp.layer_of(1.0, "right") == 2


@pytest.mark.parametrize("sig", [Constant(2.5), Polynomial((1, 2, 3)), Cosine(1.0, 2.0),
                                 Sampled((0.0, 1.0), (0.0, 2.0))])
def test_signal_dict_round_trip(sig):
    assert signal_from_dict(sig.to_dict()) == sig


def test_bare_number_reads_as_constant():
    assert signal_from_dict(3) == Constant(3.0)


def test_unknown_signal_type():
    with pytest.raises(InvalidSignal):
        signal_from_dict({"type": "square"})


@given(st.lists(st.floats(0.05, 2.0), min_size=1, max_size=6),
       st.lists(st.floats(0.1, 5.0), min_size=6, max_size=6),
       st.floats(-5, 5))
def test_valid_random_stacks_pass(widths, sigmas, start):
    x = np.concatenate([[start], start + np.cumsum(widths)])
    vp = make_problem(tuple(x), tuple(sigmas[: len(widths)]), (1, 0, 1, 0), 0, 0, 0.0)
    assert vp.x[0] == 0.0
    assert np.all(np.diff(vp.x) > 0)
    assert vp.length == pytest.approx(x[-1] - x[0])
