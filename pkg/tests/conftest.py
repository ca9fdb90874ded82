import numpy as np
import pytest

import qlbreaks as qb


def feasible_interior(family, domain, rng, margin=0.9):
    """Random interior parameter passing the contraction test with margin."""
    for _ in range(200):
        theta = domain.sample_interior(rng)
        if family.contraction(theta, r=domain.r).beta0 < margin:
            return theta
    raise AssertionError(f"could not sample a feasible parameter for {family.name}")


def central_diff_grad(fun, theta, rel_step=1e-6):
    theta = np.asarray(theta, dtype=float)
    g = np.zeros(theta.shape[0])
    for i in range(theta.shape[0]):
        h = rel_step * max(1.0, abs(theta[i]))
        up = theta.copy()
        dn = theta.copy()
        up[i] += h
        dn[i] -= h
        g[i] = (fun(up) - fun(dn)) / (2.0 * h)
    return g


def central_diff_hess(fun_grad, theta, rel_step=1e-6):
    """Central differences of an analytic gradient function."""
    theta = np.asarray(theta, dtype=float)
    d = theta.shape[0]
    H = np.zeros((d, d))
    for i in range(d):
        h = rel_step * max(1.0, abs(theta[i]))
        up = theta.copy()
        dn = theta.copy()
        up[i] += h
        dn[i] -= h
        H[:, i] = (fun_grad(up) - fun_grad(dn)) / (2.0 * h)
    return 0.5 * (H + H.T)


ALL_FAMILIES = [
    qb.AR(1),
    qb.AR(2),
    qb.RiemannianAR(L=20),
    qb.ARCH(1),
    qb.ARCH(2),
    qb.GARCH(1, 1),
    qb.TARCH(1),
    qb.TARCH(2),
]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
