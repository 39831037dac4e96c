"""Bulk parameters of the deformed ensemble at a reference point.

Inside the limit support the local eigenvalue statistics around z0 are
governed by a depth parameter t0, the unique root in (0, tau] of

    g(t) = sum_alpha tau * c_alpha / (|z0 - a_alpha|^2 + t) - 1,

and by two derived sums P0, P1 evaluated at t0.  The combination
sigma^2 = t0 * P1 + |P0|^2 / P1 sets the mean local density sigma^2/pi
and the sqrt(N sigma^2) rescaling that maps eigenvalues near z0 onto
unit-density point processes.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, NotBulkError
from .model import BULK, DeformationSpec, classify_point, validate_spec

#: Required residual |g(t0)| of the returned fixed point.
T0_RESIDUAL = 1e-12


@dataclass(frozen=True)
class BulkParameters:
    """Local scaling data at a bulk reference point."""

    z0: complex
    t0: float
    p0: complex
    p1: float
    sigma_sq: float
    predicted_density: float


def _fixed_point_residual(spec: DeformationSpec, z0: complex, t: float) -> float:
    """g(t) = sum tau*c/(f+t) - 1 with f_alpha = |z0 - a_alpha|^2."""
    terms = [spec.tau * c / (abs(complex(a) - z0) ** 2 + t) for a, c in spec.atoms]
    return math.fsum(terms) - 1.0


def solve_t0(spec: DeformationSpec, z0: complex) -> float:
    """Solve g(t0) = 0 on (0, tau] at a bulk point.

    g is strictly decreasing with g(0+) > 0 in the bulk and g(tau) <= 0
    always (each term is at most c_alpha there), so bisection on
    [0, tau] brackets the root.  The bracket is shrunk to width 1e-15
    and polished with a few Newton steps; the result satisfies
    |g(t0)| < T0_RESIDUAL.
    """
    validate_spec(spec)
    cls = classify_point(spec, z0)
    if cls.tag != BULK:
        raise NotBulkError(
            f"z0={z0} is {cls.tag} (P00={cls.p00:.6g}, threshold {1.0 / spec.tau:.6g}); "
            "the fixed point is only defined strictly inside the support")

    f = np.abs(spec.atom_locations() - z0) ** 2
    w = spec.tau * spec.atom_weights()

    def g(t):
        return math.fsum(w / (f + t)) - 1.0

    def g_prime(t):
        return -math.fsum(w / (f + t) ** 2)

    lo, hi = 0.0, float(spec.tau)
    for _ in range(200):
        if hi - lo <= 1e-15:
            break
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    for _ in range(3):
        step = g(t) / g_prime(t)
        t_new = t - step
        if not (0.0 < t_new <= spec.tau):
            break
        t = t_new
    if abs(g(t)) >= T0_RESIDUAL:
        raise ConvergenceError(
            f"fixed-point residual {g(t):.3e} at t0={t!r} exceeds {T0_RESIDUAL}")
    return float(t)


def bulk_parameters(spec: DeformationSpec, z0: complex) -> BulkParameters:
    """Evaluate t0, P0, P1, sigma^2 and the predicted density at z0."""
    z0 = complex(z0)
    t0 = solve_t0(spec, z0)
    a = spec.atom_locations()
    c = spec.atom_weights()
    denom = (np.abs(a - z0) ** 2 + t0) ** 2
    p1 = float(math.fsum(c / denom))
    p0 = complex(math.fsum(c * (a.real - z0.real) / denom),
                 math.fsum(c * (a.imag - z0.imag) / denom))
    sigma_sq = t0 * p1 + abs(p0) ** 2 / p1
    return BulkParameters(z0=z0, t0=t0, p0=p0, p1=p1,
                          sigma_sq=sigma_sq, predicted_density=sigma_sq / math.pi)


def rescale_factor(params: BulkParameters, N: int) -> float:
    """Zoom factor sqrt(N * sigma^2) mapping eigenvalues near z0 to
    unit mean density."""
    if N < 1:
        raise ValueError(f"N must be at least 1, got {N}")
    return math.sqrt(N * params.sigma_sq)


def params_to_json_dict(params: BulkParameters) -> dict:
    """JSON-ready mapping of the bulk parameters."""
    return {
        "z0": {"re": params.z0.real, "im": params.z0.imag},
        "t0": params.t0,
        "p0": {"re": params.p0.real, "im": params.p0.imag},
        "p1": params.p1,
        "sigma_sq": params.sigma_sq,
        "predicted_density": params.predicted_density,
    }
