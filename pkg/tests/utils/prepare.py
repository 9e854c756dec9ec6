import numpy as np

from talbotinv.quadrature import ScalarTransform, VectorTransform


def prepare_synthetic_errors(c=1.358, zeta0=0.171, epsilon=2.2e-16, Ns=range(4, 41)):
    # Truncation error that decays and roundoff error that grows with N
    return [(N, np.exp(-c * N) + epsilon * np.exp(zeta0 * N)) for N in Ns]


def prepare_diagonal_transform(lambdas):
    lambdas = np.asarray(lambdas, dtype=float)

    def solve(z):
        return 1 / (z + lambdas)

    return VectorTransform(solve, lambdas.size, name='diagonal')


def prepare_counting_transform(fun):
    calls = []

    def counted(z):
        calls.append(z)
        return fun(z)

    return ScalarTransform(counted, name='counted', vectorized=False), calls


def prepare_points_off_cut(n_points, random_state=None, max_abs=5.0):
    rng = np.random.default_rng(seed=random_state)
    re = rng.uniform(-max_abs, max_abs, size=n_points)
    im = rng.uniform(0.01, max_abs, size=n_points) * rng.choice([-1, 1], size=n_points)
    return re + 1j * im
