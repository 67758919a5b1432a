"""Bessel-family evaluations and zero tables.

Every solver in this package ultimately leans on K_nu, I_nu and J_nu: the
decaying boundary-symbol solution is sqrt(x) K_nu(i xi x), the interval
eigenfunctions are sqrt(x) J_nu(j_{nu,n} x), and the Poisson lifts combine
K_nu and I_nu.  Evaluation is delegated to scipy.special (AMOS/Cephes), which
already switches between ascending series, continued fractions and asymptotic
expansions internally; this module adds the domain checks, explicit overflow
signalling and the general-order zero tables the rest of the package needs.

Conventions: orders are real and nonnegative; complex arguments of K_nu are
required to satisfy Re z > 0 (principal branch).  Callers holding the root
convention Im xi < 0 pass i*xi*x, which then has positive real part.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import special as _sp

from .config import DEFAULTS
from .errors import DomainError, OverflowSignalled, ZeroSearchError

__all__ = [
    "BesselEval",
    "BesselZeroTable",
    "eval_K",
    "eval_I",
    "eval_J",
    "eval_J_deriv",
    "bessel_zeros",
    "sqrtx_K",
    "sqrtx_I",
]


@dataclass(frozen=True)
class BesselEval:
    """One evaluation record: value and derivative at a point."""

    order: float
    argument: complex
    value: complex
    derivative: complex


@dataclass(frozen=True)
class BesselZeroTable:
    """First zeros of J_nu, strictly increasing, residual below 1e-13."""

    order: float
    zeros: np.ndarray = field(repr=False)

    def __post_init__(self):
        z = np.asarray(self.zeros, dtype=float)
        if z.ndim != 1 or z.size == 0:
            raise ValueError("zero table must be a nonempty 1-d array")
        if np.any(z <= 0) or np.any(np.diff(z) <= 0):
            raise ValueError("zeros must be positive and strictly increasing")
        object.__setattr__(self, "zeros", z)

    def __len__(self):
        return self.zeros.size

    def __getitem__(self, n):
        return self.zeros[n]


def _check_order(nu):
    nu = float(nu)
    if nu < 0:
        raise DomainError(f"order must be nonnegative, got nu={nu}")
    return nu


def _guard(value, what, nu, z):
    v = np.asarray(value)
    if np.any(~np.isfinite(v)):
        raise OverflowSignalled(f"{what}(nu={nu}, z={z}) overflowed")
    return value


def eval_K(nu, z, derivative=False):
    """Modified Bessel function K_nu(z), Re z > 0.

    Returns K_nu(z), or a BesselEval carrying K_nu'(z) as well.  Overflow is
    raised as OverflowSignalled rather than returned as inf; arguments in the
    closed left half plane are a domain error (principal branch only).
    """
    nu = _check_order(nu)
    zarr = np.asarray(z, dtype=complex)
    if np.any(zarr.real <= 0):
        raise DomainError("eval_K requires Re z > 0 (principal branch)")
    zin = zarr if np.iscomplexobj(np.asarray(z)) or zarr.imag.any() else zarr.real
    val = _guard(_sp.kv(nu, zin), "K", nu, z)
    if not derivative:
        return val if np.ndim(z) else complex(val)
    der = _guard(_sp.kvp(nu, zin), "K'", nu, z)
    return BesselEval(nu, complex(zarr), complex(val), complex(der))


def eval_I(nu, z, derivative=False):
    """Modified Bessel function I_nu(z); small-z behaviour (z/2)^nu / Gamma(1+nu)."""
    nu = _check_order(nu)
    zarr = np.asarray(z, dtype=complex)
    zin = zarr if np.iscomplexobj(np.asarray(z)) or zarr.imag.any() else zarr.real
    val = _guard(_sp.iv(nu, zin), "I", nu, z)
    if not derivative:
        return val if np.ndim(z) else complex(val)
    der = _guard(_sp.ivp(nu, zin), "I'", nu, z)
    return BesselEval(nu, complex(zarr), complex(val), complex(der))


def eval_J(nu, x):
    """Bessel function of the first kind J_nu(x) for real x > 0."""
    nu = _check_order(nu)
    xarr = np.asarray(x, dtype=float)
    if np.any(xarr <= 0):
        raise DomainError("eval_J requires x > 0")
    val = _guard(_sp.jv(nu, xarr), "J", nu, x)
    return val if np.ndim(x) else float(val)


def eval_J_deriv(nu, x):
    nu = _check_order(nu)
    return _sp.jvp(nu, np.asarray(x, dtype=float))


def _mcmahon_guess(nu, n):
    """McMahon first-order guess (n + nu/2 - 1/4) pi for the n-th zero of J_nu."""
    return (n + 0.5 * nu - 0.25) * np.pi


def bessel_zeros(nu, count, settings=DEFAULTS):
    """First ``count`` positive zeros of J_nu, Newton-refined until |J_nu| < 1e-13.

    Starts from the McMahon guess; for small n and larger nu the guess is
    safeguarded by bisection brackets so Newton cannot hop across zeros.
    """
    nu = _check_order(nu)
    count = int(count)
    if count < 1:
        raise DomainError("count must be >= 1")
    zeros = np.empty(count)
    lower = max(nu, 1e-8)  # first zero of J_nu exceeds nu
    for n in range(1, count + 1):
        x = max(_mcmahon_guess(nu, n), lower * 1.0001 + 0.1)
        lo, hi = lower, np.inf
        converged = False
        for _ in range(settings.bessel_zero_max_newton):
            f = _sp.jv(nu, x)
            if abs(f) < settings.bessel_zero_residual:
                converged = True
                break
            fp = _sp.jvp(nu, x)
            step = f / fp if fp != 0 else np.nan
            xn = x - step
            if not np.isfinite(xn) or xn <= lo or xn >= hi:
                xn = 0.5 * (lo + (hi if np.isfinite(hi) else x + np.pi))
            if _sp.jv(nu, x) * _sp.jv(nu, xn) < 0:
                lo, hi = (min(x, xn), max(x, xn))
            x = xn
        if not converged:
            raise ZeroSearchError(
                f"zero {n} of J_{nu} did not converge below "
                f"{settings.bessel_zero_residual}"
            )
        zeros[n - 1] = x
        lower = x
    return BesselZeroTable(nu, zeros)


def sqrtx_K(nu, tau, x):
    """sqrt(x) K_nu(tau x) on an array of x > 0; the decaying radial branch."""
    x = np.asarray(x, dtype=float)
    return np.sqrt(x) * _guard(_sp.kv(nu, tau * x), "K", nu, "tau*x")


def sqrtx_I(nu, tau, x):
    """sqrt(x) I_nu(tau x); the growing branch, O(x^{1/2+nu}) at the origin."""
    x = np.asarray(x, dtype=float)
    return np.sqrt(x) * _guard(_sp.iv(nu, tau * x), "I", nu, "tau*x")
