"""Matrix sampling and eigenvalue tests."""

import numpy as np
import pytest

import ginlab.matrixlab as matrixlab
from ginlab.errors import ConvergenceError
from ginlab.matrixlab import (eigenvalues, haar_unitaries, haar_unitary,
                              sample_matrix)
from ginlab.model import DeformationSpec, build_mean_matrix

PURE = DeformationSpec(tau=1.0, atoms=((0j, 1.0),))
TWO = DeformationSpec(tau=1.0, atoms=((1 + 0j, 0.5), (-1 + 0j, 0.5)))


# -------------------------------------------------------------- sampling

def test_sample_matrix_mean_and_variance():
    # With N=2 the noise variance per entry is tau/N = 1/2.
    reps = 20000
    acc_mean = 0.0 + 0.0j
    acc_var = 0.0
    for k in range(reps):
        X = sample_matrix(TWO, 2, seed=99, trial_index=k)
        G = X - build_mean_matrix(TWO, 2)
        acc_mean += G[0, 0]
        acc_var += abs(G[0, 1]) ** 2
    mean = acc_mean / reps
    var = acc_var / reps
    # E|G_jk|^2 = 1/2, Var(|G|^2) = (1/2)^2, so 4 sigma ~ 4*(1/2)/sqrt(reps)
    assert abs(mean) < 4 * np.sqrt(0.5 / reps)
    assert abs(var - 0.5) < 4 * 0.5 / np.sqrt(reps)


def test_sample_matrix_scales_variance_with_tau():
    spec = DeformationSpec(tau=4.0, atoms=((0j, 1.0),))
    reps = 5000
    acc = 0.0
    for k in range(reps):
        X = sample_matrix(spec, 2, seed=5, trial_index=k)
        acc += abs(X[1, 0]) ** 2
    assert abs(acc / reps - 2.0) < 4 * 2.0 / np.sqrt(reps)


def test_sample_matrix_adds_mean():
    spec = DeformationSpec(tau=1e-12, atoms=((2 + 3j, 1.0),))
    X = sample_matrix(spec, 8, seed=0)
    assert np.allclose(np.diag(X), 2 + 3j, atol=1e-5)


def test_sample_matrix_deterministic_per_key():
    a = sample_matrix(PURE, 16, seed=123, trial_index=7)
    b = sample_matrix(PURE, 16, seed=123, trial_index=7)
    c = sample_matrix(PURE, 16, seed=123, trial_index=8)
    d = sample_matrix(PURE, 16, seed=124, trial_index=7)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_sample_matrix_uses_probe_block():
    spec = DeformationSpec(tau=1e-12, atoms=((1 + 0j, 1.0),), r0=3)
    X = sample_matrix(spec, 10, z0=0.5j, seed=1)
    diag = np.round(np.diag(X), 3)
    assert int(np.sum(diag == 0.5j)) == 3


# ------------------------------------------------------------ eigenvalues

def test_eigenvalues_of_diagonal_matrix():
    X = np.diag(np.array([3 + 0j, -1 + 2j, 0.5 - 0.5j]))
    lam = eigenvalues(X).eigenvalues
    expected = np.array(sorted([3 + 0j, -1 + 2j, 0.5 - 0.5j],
                               key=lambda z: (z.real, z.imag)))
    assert np.allclose(lam, expected, atol=1e-12)


def test_eigenvalues_of_nilpotent_matrix():
    X = np.zeros((4, 4), dtype=complex)
    X[0, 1] = X[1, 2] = X[2, 3] = 1.0
    assert np.allclose(eigenvalues(X).eigenvalues, 0.0, atol=1e-12)


def test_eigenvalues_of_companion_matrix():
    # companion of z^2 - 2z + 2, roots 1 +/- i (ties in the real part
    # land on either side of 1.0, so compare by imaginary part)
    X = np.array([[0, -2], [1, 2]], dtype=complex)
    lam = eigenvalues(X).eigenvalues
    lam = lam[np.argsort(lam.imag)]
    assert np.allclose(lam, [1 - 1j, 1 + 1j], atol=1e-12)


def test_eigenvalues_permutation_invariant():
    rng = np.random.default_rng(8)
    X = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
    perm = rng.permutation(12)
    P = np.eye(12)[perm]
    lam1 = eigenvalues(X).eigenvalues
    lam2 = eigenvalues(P @ X @ P.T).eigenvalues
    assert np.allclose(lam1, lam2, atol=1e-9)


def test_eigenvalues_sorted_lexicographically():
    rng = np.random.default_rng(9)
    X = rng.normal(size=(40, 40)) + 1j * rng.normal(size=(40, 40))
    lam = eigenvalues(X).eigenvalues
    keys = list(zip(lam.real, lam.imag))
    assert keys == sorted(keys)


def test_trace_audit_catches_corrupted_solver(monkeypatch):
    X = np.diag(np.arange(1.0, 9.0)).astype(complex)

    def bad_eigvals(_):
        return np.arange(1.0, 9.0).astype(complex) + 0.1

    monkeypatch.setattr(matrixlab.np.linalg, "eigvals", bad_eigvals)
    with pytest.raises(ConvergenceError):
        eigenvalues(X)


def test_spectral_radius_of_pure_sample():
    X = sample_matrix(PURE, 512, seed=2)
    lam = eigenvalues(X).eigenvalues
    radius = np.max(np.abs(lam))
    assert 0.9 < radius < 1.2


def test_two_atom_sample_has_two_clusters():
    spec = DeformationSpec(tau=0.05, atoms=((1 + 0j, 0.5), (-1 + 0j, 0.5)))
    lam = eigenvalues(sample_matrix(spec, 200, seed=3)).eigenvalues
    near_plus = np.sum(np.abs(lam - 1) < 0.5)
    near_minus = np.sum(np.abs(lam + 1) < 0.5)
    assert near_plus == 100
    assert near_minus == 100


# -------------------------------------------------------------- unitaries

def test_haar_batch_is_unitary():
    U = haar_unitaries(6, 50, seed=4)
    assert U.shape == (50, 6, 6)
    eye = np.eye(6)
    for k in range(50):
        assert np.allclose(U[k] @ U[k].conj().T, eye, atol=1e-12)


def test_haar_determinism_and_single_draw():
    U1 = haar_unitaries(4, 3, seed=10)
    U2 = haar_unitaries(4, 3, seed=10)
    assert np.array_equal(U1, U2)
    V = haar_unitary(4, seed=10)
    assert V.shape == (4, 4)


def test_haar_first_entry_moment():
    # E|U_11|^2 = 1/n for Haar unitaries
    n, count = 4, 40000
    U = haar_unitaries(n, count, seed=6)
    m = np.mean(np.abs(U[:, 0, 0]) ** 2)
    assert abs(m - 1.0 / n) < 4 * (1.0 / n) / np.sqrt(count)


def test_haar_phase_invariance_of_moments():
    # column phases are fixed deterministically, but |entries| stay Haar;
    # check the joint second moment E|U_ij|^2 = 1/n for all i,j
    n, count = 3, 30000
    U = haar_unitaries(n, count, seed=12)
    second = np.mean(np.abs(U) ** 2, axis=0)
    assert np.allclose(second, 1.0 / n, atol=4 * (1.0 / n) / np.sqrt(count))
