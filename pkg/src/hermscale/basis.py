"""Orthonormal Hermite functions and scaled bases.

The basis elements are the L2-normalized Hermite functions

    h_0(x) = pi**(-1/4) * exp(-x**2/2),
    h_1(x) = sqrt(2) * pi**(-1/4) * x * exp(-x**2/2),
    h_{n+1}(x) = x*sqrt(2/(n+1))*h_n(x) - sqrt(n/(n+1))*h_{n-1}(x),

and their rescalings phi_n(x) = sqrt(beta) * h_n(beta*x), which remain
orthonormal for every beta > 0.  Everything is evaluated through the
function recurrence (never via Hermite polynomials times a Gaussian, which
overflows long before n ~ 300).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

N_MAX_LIMIT = 100_000

_PI_M4 = np.pi ** -0.25
_SQRT2 = np.sqrt(2.0)
# Below this value of max(x**2)/2 the Gaussian seed is a normal double and
# the plain recurrence is safe; beyond it we carry a separate log-scale.
_DIRECT_SEED_CUTOFF = 600.0


@dataclass(frozen=True)
class ScaledBasis:
    """Truncated scaled Hermite basis: elements phi_0 .. phi_{n_max}."""

    n_max: int
    beta: float = 1.0

    def __post_init__(self):
        if not isinstance(self.n_max, (int, np.integer)) or self.n_max < 0:
            raise ValueError(f"n_max must be a non-negative integer, got {self.n_max}")
        if self.n_max > N_MAX_LIMIT:
            raise ValueError(f"n_max={self.n_max} exceeds guard limit {N_MAX_LIMIT}")
        if not (np.isfinite(self.beta) and self.beta > 0):
            raise ValueError(f"beta must be positive and finite, got {self.beta}")

    @property
    def size(self) -> int:
        return self.n_max + 1

    def dual(self) -> "ScaledBasis":
        """Basis the Fourier transform of this basis spans (beta -> 1/beta)."""
        return ScaledBasis(self.n_max, 1.0 / self.beta)


@dataclass(frozen=True)
class GaussianParams:
    """Parameters of the modulated Gaussian exp(-(x-shift)**2/2 + i*freq*x)."""

    freq: float
    shift: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.freq) and np.isfinite(self.shift)):
            raise ValueError("freq and shift must be finite")

    @property
    def z(self) -> complex:
        return self.freq - 1j * self.shift


@dataclass(frozen=True)
class SpectralCoeffs:
    """Coefficient vector of a function expanded in a ScaledBasis.

    values[n] multiplies phi_n.  Real for the main pipeline; the Fourier
    duality map is the one operation that produces complex entries.
    """

    basis: ScaledBasis
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 1 or v.size != self.basis.size:
            raise ValueError(
                f"coefficient vector must have length {self.basis.size}, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("coefficient vector contains non-finite entries")
        object.__setattr__(self, "values", v)

    @property
    def norm(self) -> float:
        """L2 norm of the represented function (basis is orthonormal)."""
        return float(np.linalg.norm(self.values))


def _validate_points(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("evaluation points must be finite")
    return x


def eval_hermite_functions(x, n_max: int) -> np.ndarray:
    """Values h_0(x) .. h_{n_max}(x) by upward recurrence.

    Returns shape (n_max+1,) + shape(x).  For |x| large enough that the
    Gaussian seed underflows, the recurrence runs on seed-relative values
    with a per-point log-scale, so entries near the turning point stay
    correct for any n within the guard limit.
    """
    if not isinstance(n_max, (int, np.integer)) or n_max < 0:
        raise ValueError(f"n_max must be a non-negative integer, got {n_max}")
    if n_max > N_MAX_LIMIT:
        raise ValueError(f"n_max={n_max} exceeds guard limit {N_MAX_LIMIT}")
    x = _validate_points(x)
    shape = x.shape
    xv = np.atleast_1d(x).ravel()
    out = np.empty((n_max + 1, xv.size))

    if xv.size == 0:
        return out.reshape((n_max + 1,) + shape)

    if np.max(xv * xv) / 2.0 <= _DIRECT_SEED_CUTOFF:
        out[0] = _PI_M4 * np.exp(-0.5 * xv * xv)
        if n_max >= 1:
            out[1] = _SQRT2 * xv * out[0]
        for n in range(1, n_max):
            out[n + 1] = (xv * np.sqrt(2.0 / (n + 1)) * out[n]
                          - np.sqrt(n / (n + 1)) * out[n - 1])
    else:
        # Seed-relative recurrence: v_n = h_n(x) * exp(-ls), ls tracked per point.
        ls = -0.5 * xv * xv - 0.25 * np.log(np.pi)
        v0 = np.ones_like(xv)
        v1 = _SQRT2 * xv
        out[0] = np.exp(ls)
        if n_max >= 1:
            out[1] = v1 * np.exp(ls)
        for n in range(1, n_max):
            v2 = xv * np.sqrt(2.0 / (n + 1)) * v1 - np.sqrt(n / (n + 1)) * v0
            big = np.abs(v2) > 1e250
            if big.any():
                scale = np.where(big, 1e-250, 1.0)
                v1 = v1 * scale
                v2 = v2 * scale
                ls = ls + np.where(big, np.log(1e250), 0.0)
            out[n + 1] = v2 * np.exp(ls)
            v0, v1 = v1, v2
    return out.reshape((n_max + 1,) + shape)


def eval_scaled_basis(basis: ScaledBasis, x) -> np.ndarray:
    """Values phi_0(x) .. phi_N(x) with phi_n(x) = sqrt(beta)*h_n(beta*x)."""
    x = _validate_points(x)
    return np.sqrt(basis.beta) * eval_hermite_functions(basis.beta * x, basis.n_max)


def synthesize(coeffs: SpectralCoeffs, x) -> np.ndarray:
    """Evaluate the represented function sum_n c_n phi_n at points x."""
    phi = eval_scaled_basis(coeffs.basis, x)
    return np.tensordot(coeffs.values, phi, axes=(0, 0))


def derivative_matrix(basis: ScaledBasis) -> np.ndarray:
    """Matrix mapping coefficients in `basis` to coefficients of the derivative.

    phi_n' = beta*(sqrt(n/2)*phi_{n-1} - sqrt((n+1)/2)*phi_{n+1}), so D has
    shape (N+2, N+1) with D[n-1, n] = beta*sqrt(n/2) and
    D[n+1, n] = -beta*sqrt((n+1)/2); the output lives in ScaledBasis(N+1, beta).
    """
    n = basis.n_max
    d = np.zeros((n + 2, n + 1))
    ks = np.arange(n + 1)
    d[ks[1:] - 1, ks[1:]] = basis.beta * np.sqrt(ks[1:] / 2.0)
    d[ks + 1, ks] = -basis.beta * np.sqrt((ks + 1) / 2.0)
    return d


def differentiate(coeffs: SpectralCoeffs) -> SpectralCoeffs:
    """Coefficients of the derivative, one basis index longer."""
    d = derivative_matrix(coeffs.basis)
    return SpectralCoeffs(ScaledBasis(coeffs.basis.n_max + 1, coeffs.basis.beta),
                          d @ coeffs.values)


def gaussian_coefficients(params: GaussianParams, n_max: int) -> np.ndarray:
    """Expansion coefficients of exp(-(x-s)**2/2 + i*k*x) in the unscaled basis.

    c_n = pi**(1/4) * exp(-z**2/4 - s**2/2) * (i*z)**n / sqrt(2**n * n!) with
    z = k - i*s; the ratio (i*z)/sqrt(2(n+1)) is accumulated term by term so
    2**n * n! never appears.
    """
    if not isinstance(n_max, (int, np.integer)) or n_max < 0:
        raise ValueError(f"n_max must be a non-negative integer, got {n_max}")
    z = params.z
    c = np.empty(n_max + 1, dtype=complex)
    c[0] = np.pi ** 0.25 * np.exp(-z * z / 4.0 - params.shift ** 2 / 2.0)
    for n in range(n_max):
        c[n + 1] = c[n] * (1j * z) / np.sqrt(2.0 * (n + 1))
    return c


def gaussian_coefficients_recurrence(m: float, k: float, n_max: int,
                                     c0: complex, c1: complex) -> np.ndarray:
    """Coefficients of exp(-m*x**2 + i*k*x) from the three-term recurrence

        c_{n+1} = ik/(2m+1) * sqrt(2/(n+1)) * c_n
                  - (2m-1)/(2m+1) * sqrt(n/(n+1)) * c_{n-1},

    seeded with the caller-supplied c0, c1.
    """
    if not isinstance(n_max, (int, np.integer)) or n_max < 1:
        raise ValueError(f"n_max must be an integer >= 1, got {n_max}")
    if m < 0:
        raise ValueError(f"m must be non-negative, got {m}")
    c = np.empty(n_max + 1, dtype=complex)
    c[0] = c0
    c[1] = c1
    lead = 1j * k / (2.0 * m + 1.0)
    trail = (2.0 * m - 1.0) / (2.0 * m + 1.0)
    for n in range(1, n_max):
        c[n + 1] = (lead * np.sqrt(2.0 / (n + 1)) * c[n]
                    - trail * np.sqrt(n / (n + 1)) * c[n - 1])
    return c


def fourier_dual_coeffs(coeffs: SpectralCoeffs) -> SpectralCoeffs:
    """Coefficients of the Fourier transform of the represented function.

    F[phi_n^beta] = (-i)**n * phi_n^(1/beta), so the transform of
    sum c_n phi_n^beta is sum ((-i)**n c_n) phi_n^(1/beta): multiply entry n
    by (-i)**n and relabel the basis scale.  Preserves the coefficient
    2-norm; applying it twice is the parity map c_n -> (-1)**n c_n.
    """
    n = coeffs.basis.n_max
    phases = np.array([1.0, -1.0j, -1.0, 1.0j])[np.arange(n + 1) % 4]
    return SpectralCoeffs(coeffs.basis.dual(),
                          np.asarray(coeffs.values, dtype=complex) * phases)
