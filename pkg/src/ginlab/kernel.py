"""Ginibre bulk kernel and its determinantal correlation functions.

After the sqrt(N sigma^2) zoom at a bulk point, local eigenvalue
statistics converge to the determinantal point process with kernel

    K(z, w) = (1/pi) exp(-|z|^2/2 - |w|^2/2 + z * conj(w)),

independent of the deformation.  The n-point intensity is the
determinant of the kernel matrix, and the radial pair correlation is
g(r) = 1 - exp(-r^2).
"""

import math
from dataclasses import dataclass

import numpy as np

#: Magnitude below which a negative correlation determinant is treated
#: as floating-point noise and clamped to zero.
DET_CLAMP = 1e-12


@dataclass(frozen=True)
class KernelPrediction:
    """Kernel matrix and n-point intensity for a finite point set."""

    points: np.ndarray        # complex, shape (n,)
    kernel_matrix: np.ndarray # complex Hermitian, shape (n, n)
    correlation: float


def ginibre_kernel(z: complex, w: complex):
    """Bulk kernel K(z, w); broadcasts over array arguments."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    expo = (-0.5 * (z.real ** 2 + z.imag ** 2)
            - 0.5 * (w.real ** 2 + w.imag ** 2)
            + z * np.conj(w))
    out = np.exp(expo) / math.pi
    return out if out.ndim else complex(out)


def kernel_matrix(points) -> np.ndarray:
    """Hermitian matrix K(z_i, z_j) over a point set."""
    pts = np.asarray(points, dtype=complex).ravel()
    if pts.size == 0:
        raise ValueError("need at least one point")
    return np.asarray(ginibre_kernel(pts[:, None], pts[None, :]))


def npoint_correlation(points) -> float:
    """n-point intensity det[K(z_i, z_j)] of the limiting process.

    The determinant of a Hermitian positive semidefinite matrix is real
    and nonnegative; tiny negative values from rounding are clamped.
    """
    K = kernel_matrix(points)
    det = np.linalg.det(K).real
    if det < 0.0:
        if det < -DET_CLAMP:
            raise ArithmeticError(
                f"correlation determinant {det:.3e} below the clamp window; "
                "points are likely pathological")
        det = 0.0
    return float(det)


def predict(points) -> KernelPrediction:
    """Bundle the kernel matrix and intensity for a point set."""
    pts = np.asarray(points, dtype=complex).ravel()
    K = kernel_matrix(pts)
    det = np.linalg.det(K).real
    det = 0.0 if -DET_CLAMP < det < 0.0 else det
    return KernelPrediction(points=pts, kernel_matrix=K, correlation=float(det))


def predicted_pair_correlation(r):
    """Radial pair correlation g(r) = 1 - exp(-r^2) of the bulk process."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("pair-correlation radius must be nonnegative")
    out = -np.expm1(-(r ** 2))
    return out if out.ndim else float(out)
