import numpy as np
import pytest

from talbotinv.utils import (
    relative_error, compensated_sum, successive_differences, fit_rate
)


def test_relative_error_scalar():
    assert relative_error(1.1, 1.0) == pytest.approx(0.1)
    assert relative_error(-2.0, -2.0) == 0.0


def test_relative_error_vector_uses_max_norm():
    approx = np.array([1.0, 2.1, -4.0])
    reference = np.array([1.0, 2.0, -4.0])
    assert relative_error(approx, reference) == pytest.approx(0.1 / 4)


def test_relative_error_raises():
    with pytest.raises(ValueError, match="do not match"):
        relative_error(np.ones(3), np.ones(4))

    with pytest.raises(ValueError, match="finite and nonzero"):
        relative_error(1.0, 0.0)


def test_compensated_sum_is_exactly_rounded():
    assert compensated_sum([1e16, 1.0, -1e16]) == 1.0
    assert compensated_sum([0.1] * 10) == 1.0


def test_compensated_sum_does_not_depend_on_order():
    rng = np.random.default_rng(seed=0)
    terms = rng.standard_normal(100) * 10.0 ** rng.integers(-8, 8, size=100)
    assert compensated_sum(terms) == compensated_sum(terms[::-1])


def test_compensated_sum_columns():
    terms = np.array([[1e16, 1.0], [1.0, 2.0], [-1e16, 3.0]])
    assert np.array_equal(compensated_sum(terms), [1.0, 6.0])


def test_successive_differences():
    values = [(1, 1.0), (2, 1.5), (3, 1.5)]
    proxies = successive_differences(values)

    assert [n for n, _ in proxies] == [1, 2]
    assert proxies[0][1] == pytest.approx(1 / 3)
    assert proxies[1][1] == 0.0


def test_successive_differences_failed_values():
    values = [(1, 1.0), (2, np.nan), (3, 1.5)]
    proxies = successive_differences(values)
    assert all(np.isnan(e) for _, e in proxies)


def test_fit_rate():
    Ns = np.arange(6, 23)
    assert fit_rate(Ns, np.exp(-1.3 * Ns + 2)) == pytest.approx(-1.3)


def test_fit_rate_ignores_invalid_errors():
    Ns = np.arange(6, 12)
    errors = np.exp(-Ns.astype(float))
    errors[2] = np.nan
    errors[4] = 0.0
    assert fit_rate(Ns, errors) == pytest.approx(-1.0)


def test_fit_rate_raises():
    with pytest.raises(ValueError, match="At least two"):
        fit_rate([1, 2, 3], [1e-3, np.nan, 0])
