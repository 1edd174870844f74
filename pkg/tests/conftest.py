"""Shared oracles for the test suite.

The quadrature helpers here deliberately go through scipy.integrate.quad
(scalar, independent code path) rather than the package's own vectorized
integrator, so inner products asserted in tests are measured by machinery
the library does not use for them.
"""

import numpy as np
import pytest
from scipy.integrate import quad

import hermscale as hs


def scalar_inner_product(f, g, x_lo=-np.inf, x_hi=np.inf, tol=1e-12):
    val, _ = quad(lambda x: f(x) * g(x), x_lo, x_hi, epsabs=tol, epsrel=1e-12,
                  limit=800)
    return val


def hermite_value(n, x):
    """Single Hermite-function value via the package evaluator."""
    return float(hs.eval_hermite_functions(np.asarray(float(x)), n)[n])


def gram_matrix_by_quadrature(basis, size, tol=1e-12):
    """Gram matrix of the first `size` scaled basis elements by scalar
    adaptive quadrature."""
    g = np.empty((size, size))
    cut = (np.sqrt(2.0 * basis.n_max + 1.0) + 20.0) / basis.beta
    for m in range(size):
        for n in range(m, size):
            fm = lambda x: hs.eval_scaled_basis(basis, np.asarray(x))[m]
            fn = lambda x: hs.eval_scaled_basis(basis, np.asarray(x))[n]
            g[m, n] = g[n, m] = scalar_inner_product(fm, fn, -cut, cut, tol)
    return g


@pytest.fixture(scope="session")
def small_catalog():
    """Catalog slice used by lattice-style checks (kept session-scoped: the
    gaussian_power entries precompute their transform splines)."""
    return [
        hs.plain_gaussian(1.0),
        hs.plain_gaussian(2.0),
        hs.gaussian(1.0, 0.0),
        hs.gaussian(2.0, 1.0),
        hs.algebraic(1.0),
        hs.algebraic(2.0),
        hs.algebraic(3.0),
        hs.gaussian_power(2),
        hs.gaussian_power(4),
    ]
