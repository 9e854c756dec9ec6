import numpy as np
import pytest

from hypothesis import given, settings
from hypothesis import strategies as st
from mock import patch
from scipy.optimize import brentq

from talbotinv.contour import CotangentContour, RationalContour
from talbotinv.errors import ConvergenceError, OutOfRangeError, SingularConfigurationError
from talbotinv.params import (
    OPTIMAL_ALPHA, OPTIMAL_C, RATIONAL_C, RATIONAL_D, LITERATURE_RATES,
    TALBOT_CONTOUR, RATIONAL_CONTOUR, SaddleSolution,
    closed_form_smn, rational_coefficients, from_decay, decay_constraints,
    saddle_residual, solve_saddle, solve_rational_saddle,
    optimize_alpha, derive_rational
)


def test_closed_form_smn():
    sigma, mu, nu = closed_form_smn(OPTIMAL_ALPHA, OPTIMAL_C)
    assert sigma == pytest.approx(0.6122, abs=1e-3)
    assert mu == pytest.approx(0.5017, abs=1e-3)
    assert nu == pytest.approx(0.2645, abs=1e-3)


@pytest.mark.parametrize("alpha,c", [(0.0, 1.0), (1.0, 1.0), (0.6, 0.0), (0.6, -1.0)])
def test_closed_form_smn_raises_out_of_range(alpha, c):
    with pytest.raises(OutOfRangeError):
        closed_form_smn(alpha, c)


def test_closed_form_smn_raises_singular():
    c = 5.0

    def denominator(alpha):
        s2 = np.sin(alpha * np.pi) ** 2
        sh2 = np.sinh(alpha * c) ** 2
        return 2 * alpha * c ** 2 * s2 - np.pi * np.sin(2 * alpha * np.pi) * sh2

    alpha = brentq(denominator, 0.25, 0.45)
    with pytest.raises(SingularConfigurationError, match="not defined"):
        closed_form_smn(alpha, c)


def test_rational_coefficients():
    a, b, e = rational_coefficients(RATIONAL_D, RATIONAL_C)
    assert a == pytest.approx(0.1446, abs=5e-3)
    assert b == pytest.approx(3.0232, abs=5e-3)
    assert e == pytest.approx(0.2339, abs=5e-3)


def test_rational_coefficients_raises():
    with pytest.raises(OutOfRangeError):
        rational_coefficients(0.5, 1.0)
    with pytest.raises(OutOfRangeError):
        rational_coefficients(3.0, 0.0)


def test_from_decay():
    contour = from_decay('cotangent', 0.6, 1.2)
    assert isinstance(contour, CotangentContour)
    assert contour.alpha == 0.6
    assert contour.c == 1.2

    contour = from_decay('rational', 3.0, 1.2)
    assert isinstance(contour, RationalContour)
    assert contour.d == 3.0
    assert contour.c == 1.2


def test_from_decay_raises():
    with pytest.raises(ValueError, match="Unknown contour family"):
        from_decay('hyperbola', 1.0, 1.0)


@pytest.mark.parametrize("contour,c", [(TALBOT_CONTOUR, OPTIMAL_C), (RATIONAL_CONTOUR, RATIONAL_C)])
def test_decay_constraints_at_published_parameters(contour, c):
    assert np.max(np.abs(decay_constraints(contour, c))) <= 1e-12


@given(
    alpha=st.floats(min_value=0.5, max_value=0.85),
    c=st.floats(min_value=0.5, max_value=2.0),
)
@settings(max_examples=50, deadline=None)
def test_decay_constraints_cotangent(alpha, c):
    contour = from_decay('cotangent', alpha, c)
    assert np.max(np.abs(decay_constraints(contour, c))) <= 1e-10


@given(
    d=st.floats(min_value=2.0, max_value=5.0),
    c=st.floats(min_value=0.5, max_value=2.0),
)
@settings(max_examples=50, deadline=None)
def test_decay_constraints_rational(d, c):
    contour = from_decay('rational', d, c)
    assert np.max(np.abs(decay_constraints(contour, c))) <= 1e-10


def test_saddle_residual_at_published_saddle():
    residuals = saddle_residual(OPTIMAL_ALPHA, OPTIMAL_C, 3.4208, -2.3438)
    assert residuals.shape == (3,)
    assert np.max(np.abs(residuals)) <= 2e-3


def test_solve_saddle():
    solution = solve_saddle(OPTIMAL_ALPHA)

    assert isinstance(solution, SaddleSolution)
    assert solution.alpha == OPTIMAL_ALPHA
    assert solution.c == pytest.approx(1.3580, abs=5e-4)
    assert solution.x_s == pytest.approx(3.4208, abs=1e-3)
    assert solution.y_s == pytest.approx(-2.3438, abs=1e-3)
    assert np.max(np.abs(solution.residuals)) <= 1e-10
    assert solution.theta_s == complex(solution.x_s, solution.y_s)


@pytest.mark.parametrize("alpha", [0.51, 0.55, 0.6, 0.7, 0.8, 0.82])
def test_solve_saddle_continuation(alpha):
    solution = solve_saddle(alpha)
    assert solution.x_s > 0
    assert solution.y_s < 0
    assert 0 < solution.c < 1.3581
    assert np.max(np.abs(solution.residuals)) <= 1e-10
    assert np.max(np.abs(decay_constraints(solution.contour, solution.c))) <= 1e-10


def test_solve_saddle_with_guess():
    solution = solve_saddle(0.65, guess=(3.4, -2.3, 1.35))
    reference = solve_saddle(0.65)
    assert solution.c == pytest.approx(reference.c, abs=1e-9)


@pytest.mark.parametrize("alpha", [0.3, 0.95])
def test_solve_saddle_raises_out_of_range(alpha):
    with pytest.raises(OutOfRangeError, match="alpha to be within"):
        solve_saddle(alpha)


def test_solve_saddle_raises_bad_guess():
    with pytest.raises(ValueError, match="initial guess"):
        solve_saddle(0.65, guess=(3.4, 2.3, 1.35))


def test_solve_rational_saddle():
    solution = solve_rational_saddle(RATIONAL_D)
    assert solution.kind == 'rational'
    assert solution.alpha is None
    assert solution.c == pytest.approx(1.311, abs=5e-3)
    assert np.max(np.abs(solution.residuals)) <= 1e-10


def test_optimize_alpha():
    solution = optimize_alpha()
    contour = solution.contour

    assert solution.alpha == pytest.approx(0.6407, abs=5e-4)
    assert solution.c == pytest.approx(1.3580, abs=5e-4)
    assert contour.sigma == pytest.approx(0.6122, abs=1e-3)
    assert contour.mu == pytest.approx(0.5017, abs=1e-3)
    assert contour.nu == pytest.approx(0.2645, abs=1e-3)
    assert solution.x_s == pytest.approx(3.4208, abs=1e-3)
    assert solution.y_s == pytest.approx(-2.3438, abs=1e-3)

    # The decay rate is maximal
    for alpha in [0.6, 0.7]:
        assert solve_saddle(alpha).c < solution.c


def test_optimize_alpha_fails_if_no_trial_converges():
    with patch('talbotinv.params.solve_saddle', side_effect=ConvergenceError('no luck')):
        with pytest.raises(ConvergenceError, match='no luck'):
            optimize_alpha()


def test_derive_rational():
    solution = derive_rational()
    contour = solution.contour

    assert contour.d == pytest.approx(3.0767, abs=5e-3)
    assert solution.c == pytest.approx(1.311, abs=5e-3)
    assert contour.a == pytest.approx(0.1446, abs=5e-3)
    assert contour.b == pytest.approx(3.0232, abs=5e-3)
    assert contour.e == pytest.approx(0.2339, abs=5e-3)


def test_literature_rates():
    rates = list(LITERATURE_RATES.values())
    assert rates == sorted(rates)
    assert max(rates) == OPTIMAL_C


def test_saddle_residual_symmetry():
    residuals = saddle_residual(OPTIMAL_ALPHA, OPTIMAL_C, 3.4208, -2.3438)
    mirrored = saddle_residual(OPTIMAL_ALPHA, OPTIMAL_C, -3.4208, -2.3438)
    assert mirrored[0] == pytest.approx(-residuals[0], abs=1e-14)
    assert mirrored[1:] == pytest.approx(residuals[1:], abs=1e-14)


def test_saddle_residual_is_sensitive_to_c():
    residuals = saddle_residual(OPTIMAL_ALPHA, OPTIMAL_C + 0.1, 3.4208, -2.3438)
    assert abs(residuals[2]) >= 0.05


@pytest.mark.parametrize("alpha", [0.51, 0.82])
def test_closed_form_smn_at_interval_ends(alpha):
    solution = solve_saddle(alpha)
    sigma, mu, nu = closed_form_smn(alpha, solution.c)
    assert np.isfinite(sigma)
    assert mu > 0
    assert nu > 0


def test_optimize_alpha_is_fixed_point():
    solution = optimize_alpha()
    assert solve_saddle(solution.alpha).c == pytest.approx(solution.c, abs=1e-10)


def test_decay_rate_is_unimodal():
    rates = [solve_saddle(alpha).c for alpha in np.linspace(0.51, 0.82, 20)]
    i_max = int(np.argmax(rates))
    assert np.all(np.diff(rates[:i_max + 1]) > 0)
    assert np.all(np.diff(rates[i_max:]) < 0)


def test_rational_rate_is_below_cotangent_rate():
    assert derive_rational().c < optimize_alpha().c
