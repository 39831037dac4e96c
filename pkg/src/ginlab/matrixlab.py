"""Finite-N sampling: deformed Gaussian matrices, spectra, Haar unitaries.

Matrix draws are keyed by (seed, trial_index) so a campaign can farm
trials out to workers in any order and still produce identical spectra.
Eigenvalues come from LAPACK's nonsymmetric solver via numpy; every
spectrum is audited against the first two trace identities before it is
accepted, since a silent eigensolver failure would poison all the
statistics built downstream.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .model import DeformationSpec, mean_diagonal, validate_spec
from .rng import complex_gaussians, stream

#: Relative scale of the allowed |sum(lambda) - tr X| residual.
TRACE_TOL = 1e-8
#: Relative scale of the allowed |sum(lambda^2) - tr X^2| residual.
TRACE2_TOL = 1e-6


@dataclass(frozen=True)
class SpectrumSample:
    """Eigenvalues of one matrix draw plus provenance and diagnostics."""

    eigenvalues: np.ndarray   # complex, sorted by (real, imag)
    N: int
    seed: int
    trial_index: int
    trace_residual: float
    trace2_residual: float


def sample_matrix(spec: DeformationSpec, N: int, z0: complex = None,
                  seed: int = 0, trial_index: int = 0) -> np.ndarray:
    """Draw X = X0 + G with iid complex Gaussian noise of variance tau/N.

    The draw is a pure function of (spec, N, z0, seed, trial_index).
    """
    validate_spec(spec)
    diag = mean_diagonal(spec, N, z0)
    rng = stream(seed, trial_index)
    X = complex_gaussians(rng, (N, N), spec.tau / N)
    X[np.diag_indices(N)] += diag
    return X


def eigenvalues(X: np.ndarray, seed: int = 0, trial_index: int = 0) -> SpectrumSample:
    """Full spectrum of a square matrix, audited and deterministically ordered.

    The trace identities sum(lambda) = tr X and sum(lambda^2) = tr X^2
    must hold within floating-point slack proportional to N; a violation
    (or a LAPACK convergence failure) raises ConvergenceError so the
    caller can resample the trial.
    """
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {X.shape}")
    N = X.shape[0]
    try:
        lam = np.linalg.eigvals(X)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver failed on trial {trial_index}: {exc}") from exc

    tr1 = complex(np.trace(X))
    tr2 = complex(np.einsum("ij,ji->", X, X))
    r1 = abs(complex(lam.sum()) - tr1)
    r2 = abs(complex((lam * lam).sum()) - tr2)
    bound1 = TRACE_TOL * N * (1.0 + abs(tr1))
    bound2 = TRACE2_TOL * N * (1.0 + abs(tr2))
    if r1 > bound1 or r2 > bound2:
        raise ConvergenceError(
            f"trace identity violated on trial {trial_index}: "
            f"|sum(lam)-trX|={r1:.3e} (bound {bound1:.3e}), "
            f"|sum(lam^2)-trX^2|={r2:.3e} (bound {bound2:.3e})")

    order = np.lexsort((lam.imag, lam.real))
    return SpectrumSample(eigenvalues=lam[order], N=N, seed=int(seed),
                          trial_index=int(trial_index),
                          trace_residual=float(r1), trace2_residual=float(r2))


def haar_unitaries(n: int, count: int, seed: int = 0) -> np.ndarray:
    """Stack of `count` independent Haar-distributed n x n unitaries.

    QR of a complex Ginibre matrix with the R diagonal rephased to the
    positive real axis; that phase fix is what makes the distribution
    exactly Haar rather than merely unitary.
    """
    if n < 1 or count < 1:
        raise ValueError(f"need n >= 1 and count >= 1, got n={n}, count={count}")
    rng = stream(seed, 0)
    G = complex_gaussians(rng, (count, n, n), 1.0)
    Q, R = np.linalg.qr(G)
    d = np.einsum("...ii->...i", R)
    mod = np.abs(d)
    phase = np.where(mod > 0.0, d / np.where(mod > 0.0, mod, 1.0), 1.0)
    return Q * phase[..., None, :]


def haar_unitary(n: int, seed: int = 0) -> np.ndarray:
    """Single Haar-distributed n x n unitary."""
    return haar_unitaries(n, 1, seed)[0]
