from functools import lru_cache
import logging
import math

import numpy as np
from scipy.special import gamma

from errors import ConvergenceError, DimensionMismatch, DomainError
from models import JonesParams, MollifierSpec, QuadConfig, TestFunctionalSpec
from services.quadrature import integrate_interval, integrate_semi_infinite

logger = logging.getLogger("sdspace.jones_kernel")


def _check_a(a):
    if not a > 1:
        raise DomainError(f"Jones exponent a must exceed 1, got {a}")


def _scalar(value):
    value = np.asarray(value)
    return complex(value) if value.ndim == 0 else value


def eval_g(x, y, a):
    """g(x, y) = exp(-y^a e^{iax})"""
    _check_a(a)
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise DomainError("g is defined for y >= 0 only")
    x = np.asarray(x, dtype=float)
    return _scalar(np.exp(-(y ** a) * np.exp(1j * a * x)))


def g_partials(x, y, a):
    """Closed-form (dg/dx, dg/dy)"""
    g = np.asarray(eval_g(x, y, a))
    y = np.asarray(y, dtype=float)
    rot = np.exp(1j * a * np.asarray(x, dtype=float))
    dx = g * (-1j * a * y ** a * rot)
    dy = g * (-a * y ** (a - 1.0) * rot)
    return _scalar(dx), _scalar(dy)


def h_at_zero(a):
    _check_a(a)
    return float(gamma(1.0 / a + 1.0))


def window_half_width(a):
    return math.pi / (2.0 * a)


def eval_h_closed(x, a):
    h0 = h_at_zero(a)
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < window_half_width(a)
    return _scalar(np.where(inside, h0 * np.exp(-1j * x), 0.0))


def h_quad_result(x, a, tol=1e-10):
    _check_a(a)
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    if math.cos(a * x) <= 0:
        raise ConvergenceError(
            f"h(x) diverges at x={x} for a={a}: outside the window |x| < {window_half_width(a)}"
        )
    # g only vanishes like exp(-y^a cos(ax)); rel_tol keeps tiny panels from over-refining
    cfg = QuadConfig(abs_tol=tol, max_panels_per_axis=8192)
    return integrate_semi_infinite(lambda y: np.exp(-(y ** a) * np.exp(1j * a * x)), cfg)


def eval_h_quad(x, a, tol=1e-10):
    result = h_quad_result(x, a, tol)
    if not result.converged:
        raise ConvergenceError(
            f"h quadrature at x={x}, a={a} missed tol={tol}", err_est=result.err_est
        )
    return complex(result.value)


def _bump_raw(u, eps):
    u = np.asarray(u, dtype=float)
    inside = np.abs(u) < eps
    denom = np.where(inside, u * u - eps * eps, -1.0)
    return np.where(inside, np.exp(eps * eps / denom), 0.0)


@lru_cache(maxsize=64)
def mollifier_constant(k):
    eps = JonesParams.for_level(k).eps_k
    mass = integrate_interval(
        lambda u: _bump_raw(u, eps), (-eps, eps), QuadConfig(abs_tol=1e-13 * eps)
    )
    c_k = 1.0 / mass.value.real
    logger.debug(f"Mollifier constant c_{k} = {c_k:.15g}")
    return c_k


def mollifier_spec(k):
    eps = JonesParams.for_level(k).eps_k
    return MollifierSpec(k, mollifier_constant(k), (-eps, eps))


def mollifier_eval(k, u):
    eps = JonesParams.for_level(k).eps_k
    value = mollifier_constant(k) * _bump_raw(u, eps)
    return float(value) if np.ndim(value) == 0 else value


def _mollified_exponential(k, lo, hi, tol):
    """Integral of f_k(z) e^{iz} over [lo, hi]"""
    return integrate_interval(
        lambda z: mollifier_eval(k, z) * np.exp(1j * z), (lo, hi), QuadConfig(abs_tol=tol)
    )


@lru_cache(maxsize=128)
def alpha(k, tol=1e-12):
    eps = JonesParams.for_level(k).eps_k
    result = _mollified_exponential(k, -eps, eps, tol)
    if not result.converged:
        raise ConvergenceError(f"alpha({k}) quadrature did not converge", err_est=result.err_est)
    return complex(result.value)


def xi_closed(u, k, n):
    if n < 1:
        raise DomainError("dimension must be positive")
    eps = JonesParams.for_level(k).eps_k
    u = np.asarray(u, dtype=float)
    return _scalar(np.where(np.abs(u) <= eps, np.exp(1j * u) / n, 0.0))


def chi(u, k, tol=1e-12):
    """(f_k * h_k)(u) with h_k the closed-form h for a = a_k"""
    params = JonesParams.for_level(k)
    eps = params.eps_k
    lo, hi = max(-eps, u - 2.0 * eps), min(eps, u + 2.0 * eps)
    if hi <= lo:
        return 0j
    result = _mollified_exponential(k, lo, hi, tol)
    if not result.converged:
        raise ConvergenceError(f"chi({u}) quadrature did not converge", err_est=result.err_est)
    return h_at_zero(params.a_k) * np.exp(-1j * u) * complex(result.value)


def xi_mollified(u, k, n, tol=1e-10):
    if n < 1:
        raise DomainError("dimension must be positive")
    params = JonesParams.for_level(k)
    norm = n * h_at_zero(params.a_k) * np.conj(alpha(k))
    values = [np.conj(chi(float(v), k, tol * 1e-2)) / norm for v in np.atleast_1d(u).ravel()]
    if np.ndim(u) == 0:
        return complex(values[0])
    return np.asarray(values).reshape(np.shape(u))


def eval_E(spec: TestFunctionalSpec, x):
    """E(x) for one point (n,) or a batch (N, n)"""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != spec.n:
        raise DimensionMismatch(f"E_{spec.m} lives in R^{spec.n}, got a point in R^{x.shape[-1]}")
    offsets = x - spec.center_array
    eps = spec.eps_k
    return np.where(np.abs(offsets) <= eps, np.exp(1j * offsets) / spec.n, 0.0)
