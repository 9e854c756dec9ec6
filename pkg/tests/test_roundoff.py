import numpy as np
import pytest

from talbotinv.errors import ConvergenceError, NoTurnDetectedError
from talbotinv.params import OPTIMAL_ALPHA, TALBOT_CONTOUR, RATIONAL_CONTOUR
from talbotinv.problems import f1_transform
from talbotinv.quadrature import convergence_sweep, invert
from talbotinv.roundoff import (
    UNIT_ROUNDOFF, MIN_N_STAR, RoundoffModel, critical_N, critical_N_for_precision,
    estimate_k0, roundoff_equation, stabilized_params, detect_Nstar, calibrate
)
from talbotinv.utils import fit_rate, relative_error

from utils.prepare import prepare_synthetic_errors


def test_critical_N():
    assert 23 <= critical_N() <= 25
    assert critical_N(TALBOT_CONTOUR) == pytest.approx(23.58, abs=0.05)
    assert 24 <= critical_N(RATIONAL_CONTOUR) <= 26


def test_critical_N_grows_with_k0():
    assert critical_N(k0=10.0) > critical_N(k0=1.0) > critical_N(k0=0.1)


@pytest.mark.parametrize("d", [16, 32, 64])
def test_critical_N_for_precision(d):
    assert critical_N_for_precision(d) / d == pytest.approx(1.506, abs=0.01)
    assert critical_N_for_precision(d, k0=10.0) > critical_N_for_precision(d)


def test_critical_N_for_precision_raises():
    with pytest.raises(ValueError, match="at least 4 correct digits"):
        critical_N_for_precision(3)


def test_critical_N_raises():
    with pytest.raises(ValueError, match="k0 to be positive"):
        critical_N(k0=0.0)


def test_estimate_k0():
    k0 = estimate_k0(24)
    assert 1 <= k0 <= 3
    assert critical_N(TALBOT_CONTOUR, k0) == pytest.approx(24, rel=1e-10)
    assert estimate_k0(24, epsilon=2 * UNIT_ROUNDOFF) == pytest.approx(2 * k0)


def test_roundoff_model_defaults():
    model = RoundoffModel()
    assert model.N_star == 23
    assert model.shape == OPTIMAL_ALPHA
    assert model(20) is TALBOT_CONTOUR
    assert model(23) is TALBOT_CONTOUR
    assert repr(model) == '<RoundoffModel | cotangent | k0=1, N_star=23>'

    model = RoundoffModel(kind='rational')
    assert model.N_star == 24
    assert model(24) is RATIONAL_CONTOUR


def test_roundoff_model_caches_contours():
    model = RoundoffModel()
    assert model(40) is model(40)


def test_roundoff_model_raises_unknown_family():
    with pytest.raises(ValueError, match="Unknown contour family"):
        RoundoffModel(kind='parabola')


@pytest.mark.parametrize("kind", ['cotangent', 'rational'])
def test_stabilized_params_balance_roundoff(kind):
    model = RoundoffModel(kind=kind)
    N = model.N_star + 2
    contour = stabilized_params(N, model)

    assert contour.kind == kind
    assert contour.c < model.base.c
    assert contour.zeta0 < model.base.zeta0
    assert abs(roundoff_equation(contour.c, N, model)) <= 1e-12


def test_stabilized_params_large_N():
    model = RoundoffModel()
    contour = stabilized_params(200, model)

    assert contour.alpha == OPTIMAL_ALPHA
    assert contour.c * 200 == pytest.approx(-np.log(UNIT_ROUNDOFF), rel=0.02)
    assert 0 < contour.zeta0 <= 1e-3

    # The apex approaches the origin like N^-3
    ratio = contour.zeta0 / stabilized_params(400, model).zeta0
    assert 6 <= ratio <= 10


def test_stabilized_params_apex_term_does_not_grow():
    model = RoundoffModel()
    Ns = np.arange(30, 201, 10)
    growth = [N * model(N).zeta0 for N in Ns]
    assert np.all(np.diff(growth) <= 0)


def test_stabilized_params_keeps_optimal_contour():
    model = RoundoffModel(N_star=10)
    assert stabilized_params(15, model) is TALBOT_CONTOUR


def test_stabilized_params_raises():
    model = RoundoffModel()
    with pytest.raises(ValueError, match="only used for N > N_star"):
        stabilized_params(20, model)

    # No contour of the family balances roundoff if k0 = epsilon
    model = RoundoffModel(k0=UNIT_ROUNDOFF)
    assert model.N_star == MIN_N_STAR
    with pytest.raises(ConvergenceError, match="no solution"):
        model(5)


def test_roundoff_model_raises_small_N_star():
    with pytest.raises(ValueError, match="at least 4"):
        RoundoffModel(N_star=3)


def test_detect_Nstar_synthetic():
    errors = prepare_synthetic_errors()
    assert detect_Nstar(errors) == pytest.approx(24, abs=1)


def test_detect_Nstar_ignores_outliers():
    errors = prepare_synthetic_errors()
    # A single lucky N far below the turn should not move the estimate
    errors[30] = (errors[30][0], 1e-20)
    errors[31] = (errors[31][0], np.nan)
    assert detect_Nstar(errors) == pytest.approx(24, abs=1)


def test_detect_Nstar_matches_critical_N():
    # Without noise, the two error lines cross at the critical node count
    errors = prepare_synthetic_errors(Ns=range(4, 61))
    assert detect_Nstar(errors) == pytest.approx(critical_N(), abs=1)


def test_detect_Nstar_flat_floor():
    # Rounding errors that do not grow: a noisy floor at 1e-15
    rng = np.random.default_rng(seed=0)
    Ns = np.arange(10, 61)
    floor = 1e-15 * 10 ** rng.uniform(-1, 1, size=Ns.size)
    errors = list(zip(Ns, np.exp(-1.358 * (Ns - 6)) + floor))

    # exp(-1.358 (N - 6)) reaches 1e-15 at N = 31.4
    assert detect_Nstar(errors) == pytest.approx(31, abs=2)


def test_detect_Nstar_raises_no_turn():
    errors = [(N, np.exp(-1.358 * N)) for N in range(4, 20)]
    with pytest.raises(NoTurnDetectedError, match="still decreasing"):
        detect_Nstar(errors)


def test_detect_Nstar_raises_short_list():
    with pytest.raises(ValueError, match="at least 6"):
        detect_Nstar([(4, 1e-3), (5, 1e-4)])


def test_calibrate_with_reference():
    model = calibrate(f1_transform(1.0), 1.0, list(range(10, 61)), reference=np.exp(-1.0))
    assert 20 <= model.N_star <= 32
    assert model.k0 == pytest.approx(estimate_k0(model.N_star))


def test_calibrate_without_reference():
    model = calibrate(f1_transform(1.0), 1.0, list(range(10, 61)))
    assert 20 <= model.N_star <= 32


def test_default_model_keeps_error_small():
    transform = f1_transform(1.0)
    model = RoundoffModel()
    for N in range(24, 61, 4):
        result = invert(transform, model(N), N, 1.0)
        assert relative_error(result.value, np.exp(-1.0)) <= 1e-12


def test_error_grows_without_control():
    Ns = list(range(34, 81))
    errors = convergence_sweep(f1_transform(1.0), np.exp(-1.0), 1.0, Ns, TALBOT_CONTOUR)
    rate = fit_rate(*zip(*errors))
    zeta0 = TALBOT_CONTOUR.zeta0
    assert 0.75 * zeta0 <= rate <= 1.25 * zeta0
