"""Bulk-parameter tests: the t0 equation, derived quantities, and the
rescaling factor."""

import math

import numpy as np
import pytest

from ginlab.errors import AtomCollisionError, NotBulkError
from ginlab.examples import shipped_cases
from ginlab.model import DeformationSpec
from ginlab.bulk import bulk_parameters, rescale_factor, solve_t0

PURE = DeformationSpec(tau=1.0, atoms=((0j, 1.0),))
TWO = DeformationSpec(tau=2.0, atoms=((1 + 0j, 0.5), (-1 + 0j, 0.5)))


def t0_residual(spec, z0, t0):
    return math.fsum(
        spec.tau * c / (abs(complex(a) - z0) ** 2 + t0) for a, c in spec.atoms) - 1.0


def bisect_t0(spec, z0, iters=200):
    """Test-local oracle: plain interval bisection, no polish."""
    lo, hi = 0.0, spec.tau
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if t0_residual(spec, z0, mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ----------------------------------------------------------------- solve_t0

def test_t0_pure_closed_form_sweep():
    rng = np.random.default_rng(11)
    for _ in range(20):
        z0 = complex(*rng.uniform(-0.6, 0.6, size=2))
        if abs(z0) > 0.95 or abs(z0) < 1e-3:
            continue
        t0 = solve_t0(PURE, z0)
        assert abs(t0 - (1.0 - abs(z0) ** 2)) < 1e-12


def test_t0_pure_scaled_tau():
    spec = DeformationSpec(tau=4.0, atoms=((0j, 1.0),))
    t0 = solve_t0(spec, 0.6)
    assert t0 == pytest.approx(4.0 - 0.36, abs=1e-12)


def test_t0_two_atom_origin():
    assert solve_t0(TWO, 0.0) == pytest.approx(1.0, abs=1e-12)


def test_t0_matches_bisection_oracle():
    spec = DeformationSpec(tau=1.0, atoms=((1 + 0j, 0.5), (-1 + 0j, 0.5)))
    z0 = 0.9 + 0j
    assert solve_t0(spec, z0) == pytest.approx(bisect_t0(spec, z0), abs=1e-10)


def test_t0_residual_on_shipped_cases():
    for case in shipped_cases():
        t0 = solve_t0(case.spec, case.z0)
        assert 0.0 < t0 <= case.spec.tau
        assert abs(t0_residual(case.spec, case.z0, t0)) < 1e-12


def test_t0_random_multi_atom_residuals():
    rng = np.random.default_rng(7)
    spec = DeformationSpec(
        tau=1.5,
        atoms=((0j, 0.4), (1.2 + 0j, 0.3), (-0.8 + 0.9j, 0.3)))
    hits = 0
    for _ in range(200):
        z0 = complex(*rng.uniform(-1.2, 1.2, size=2))
        try:
            t0 = solve_t0(spec, z0)
        except (NotBulkError, AtomCollisionError):
            continue
        hits += 1
        assert abs(t0_residual(spec, z0, t0)) < 1e-12
    assert hits > 50


def test_t0_outside_bulk_raises():
    with pytest.raises(NotBulkError):
        solve_t0(PURE, 1.5)
    with pytest.raises(NotBulkError):
        solve_t0(PURE, 1.0)      # the edge itself is excluded


def test_t0_at_atom_raises():
    with pytest.raises(AtomCollisionError):
        solve_t0(PURE, 0.0)


# ---------------------------------------------------------- bulk_parameters

def test_pure_bulk_parameters():
    params = bulk_parameters(PURE, 0.3)
    assert params.t0 == pytest.approx(0.91, abs=1e-12)
    assert params.p1 == pytest.approx(1.0, abs=1e-12)
    assert params.p0 == pytest.approx(-0.3, abs=1e-12)
    assert params.sigma_sq == pytest.approx(1.0, abs=1e-12)
    assert params.predicted_density == pytest.approx(1.0 / math.pi, abs=1e-12)


def test_pure_density_is_flat():
    rng = np.random.default_rng(5)
    for _ in range(20):
        z0 = complex(*rng.uniform(-0.55, 0.55, size=2))
        if abs(z0) > 0.9 or abs(z0) < 1e-3:
            continue
        params = bulk_parameters(PURE, z0)
        assert params.sigma_sq == pytest.approx(1.0, abs=1e-12)


def test_two_atom_origin_parameters():
    params = bulk_parameters(TWO, 0.0)
    assert params.t0 == pytest.approx(1.0, abs=1e-12)
    assert params.p0 == pytest.approx(0.0, abs=1e-12)
    assert params.p1 == pytest.approx(0.25, abs=1e-12)
    assert params.sigma_sq == pytest.approx(0.25, abs=1e-12)


def test_predicted_density_is_sigma_over_pi():
    for case in shipped_cases():
        params = bulk_parameters(case.spec, case.z0)
        assert params.predicted_density == params.sigma_sq / math.pi


def test_sigma_sq_positive_across_bulk_boxes():
    for case in shipped_cases():
        xmin, xmax, ymin, ymax = case.bulk_box
        for x in np.linspace(xmin, xmax, 5):
            for y in np.linspace(ymin, ymax, 5):
                z = complex(x, y)
                if any(z == complex(a) for a in case.spec.atom_locations()):
                    continue
                params = bulk_parameters(case.spec, z)
                assert params.sigma_sq > 0
                assert params.p1 > 0


def test_parameters_translation_covariance():
    # shifting every atom and z0 together leaves t0, p1, sigma_sq fixed
    rng = np.random.default_rng(17)
    base = DeformationSpec(tau=1.2, atoms=((0.4 + 0j, 0.55), (-0.6 + 0.3j, 0.45)))
    z0 = 0.1 + 0.1j
    ref = bulk_parameters(base, z0)
    for _ in range(10):
        shift = complex(*rng.uniform(-3, 3, size=2))
        moved = DeformationSpec(
            tau=base.tau,
            atoms=tuple((complex(a) + shift, c) for a, c in base.atoms))
        got = bulk_parameters(moved, z0 + shift)
        assert got.t0 == pytest.approx(ref.t0, abs=1e-12)
        assert got.p1 == pytest.approx(ref.p1, abs=1e-12)
        assert got.sigma_sq == pytest.approx(ref.sigma_sq, abs=1e-10)
        assert abs(got.p0 - ref.p0) < 1e-10


def test_parameters_rotation_covariance():
    base = DeformationSpec(tau=1.2, atoms=((0.4 + 0j, 0.55), (-0.6 + 0.3j, 0.45)))
    z0 = 0.1 + 0.1j
    ref = bulk_parameters(base, z0)
    for theta in np.linspace(0.3, 5.9, 7):
        u = np.exp(1j * theta)
        spun = DeformationSpec(
            tau=base.tau,
            atoms=tuple((u * complex(a), c) for a, c in base.atoms))
        got = bulk_parameters(spun, u * z0)
        assert got.t0 == pytest.approx(ref.t0, abs=1e-12)
        assert got.sigma_sq == pytest.approx(ref.sigma_sq, abs=1e-10)
        assert abs(got.p0 - u * ref.p0) < 1e-10


# ------------------------------------------------------------ rescaling

def test_rescale_factor_pure():
    params = bulk_parameters(PURE, 0.3)
    assert rescale_factor(params, 1024) == pytest.approx(32.0, abs=1e-9)


def test_rescale_factor_two_atom():
    params = bulk_parameters(TWO, 0.0)
    assert rescale_factor(params, 256) == pytest.approx(8.0, abs=1e-9)


def test_rescale_factor_rejects_bad_N():
    params = bulk_parameters(PURE, 0.3)
    with pytest.raises(ValueError):
        rescale_factor(params, 0)
