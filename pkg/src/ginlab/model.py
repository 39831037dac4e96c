"""Mean-matrix model for additively deformed Ginibre ensembles.

The random matrix under study is X = X0 + G where G has iid centered
complex Gaussian entries of variance tau/N and X0 is a fixed diagonal
deformation.  Its leading diagonal carries t atom values a_alpha with
macroscopic multiplicities proportional to weights c_alpha, optionally
followed by r0 copies of a probe location z0, a fixed finite block and
a run of forced zeros.

As N grows the spectrum fills the region where the atom potential

    P00(z) = sum_alpha c_alpha / |a_alpha - z|^2

exceeds 1/tau.  This module owns the spec container, its validation,
point classification against that region, numerical tracing of the
boundary curve {P00 = 1/tau}, and construction of the size-N mean
matrix with the deterministic multiplicity rounding rule.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AtomCollisionError,
    DimensionError,
    DuplicateAtomError,
    EmptyLevelSetError,
    NonpositiveParamError,
    WeightSumError,
)

#: |sum of weights - 1| allowed by validation.
WEIGHT_TOL = 1e-12
#: Half-width of the band around P00 = 1/tau classified as "Edge".
EDGE_BAND = 1e-9
#: Residual |P00 - 1/tau| required of every traced boundary vertex.
BOUNDARY_RESIDUAL = 1e-10

BULK = "Bulk"
EDGE = "Edge"
EXTERIOR = "Exterior"


@dataclass(frozen=True)
class DeformationSpec:
    """Deformation data defining the ensemble.

    Parameters
    ----------
    tau : float
        Entry-variance scale; each noise entry has E|G_jk|^2 = tau/N.
    atoms : tuple of (complex, float)
        Distinct atom locations with positive weights summing to one.
        Weights set the macroscopic block multiplicities r_alpha ~ c_alpha*N.
    r0 : int
        Multiplicity of the probe block (filled with the reference point
        z0 when the mean matrix is built).
    finite_block : tuple of complex
        Diagonal of a fixed, size-independent block.  A normal block is
        unitarily diagonalizable without changing the spectrum of X, so
        only its eigenvalues are carried.
    R0 : int
        Number of forced zero diagonal entries (zero padding rank).
    """

    tau: float
    atoms: tuple = ()
    r0: int = 0
    finite_block: tuple = ()
    R0: int = 0

    def atom_locations(self) -> np.ndarray:
        return np.array([a for a, _ in self.atoms], dtype=complex)

    def atom_weights(self) -> np.ndarray:
        return np.array([c for _, c in self.atoms], dtype=float)


@dataclass(frozen=True)
class PointClass:
    """Classification of a reference point against the limit support."""

    tag: str          # one of BULK, EDGE, EXTERIOR
    p00: float        # atom potential at the point


@dataclass(frozen=True)
class BoundaryCurve:
    """Polyline approximation of the support boundary {P00 = 1/tau}.

    Closed loops repeat their first vertex at the end; open chains
    (curves leaving the window) do not.
    """

    polylines: list = field(default_factory=list)   # list of complex ndarrays
    grid_resolution: float = 0.0


def validate_spec(spec: DeformationSpec) -> DeformationSpec:
    """Check structural constraints on a deformation spec.

    Returns the spec unchanged on success so calls can be chained.
    """
    if not isinstance(spec.tau, (int, float)) or not math.isfinite(spec.tau):
        raise NonpositiveParamError(f"tau must be a finite number, got {spec.tau!r}")
    if spec.tau <= 0:
        raise NonpositiveParamError(f"tau must be positive, got {spec.tau}")

    if len(spec.atoms) == 0:
        raise WeightSumError("spec needs at least one atom (weights must sum to 1)")
    weights = [c for _, c in spec.atoms]
    for (a, c) in spec.atoms:
        if not math.isfinite(c) or c <= 0:
            raise NonpositiveParamError(f"atom weight must be positive, got {c} at {a}")
        za = complex(a)
        if not (math.isfinite(za.real) and math.isfinite(za.imag)):
            raise NonpositiveParamError(f"atom location must be finite, got {a!r}")
    total = math.fsum(weights)
    if abs(total - 1.0) > WEIGHT_TOL:
        raise WeightSumError(f"atom weights sum to {total!r}, expected 1 within {WEIGHT_TOL}")

    locs = [complex(a) for a, _ in spec.atoms]
    for i in range(len(locs)):
        for j in range(i + 1, len(locs)):
            if locs[i] == locs[j]:
                raise DuplicateAtomError(f"atoms {i} and {j} share location {locs[i]}")

    for name, value in (("r0", spec.r0), ("R0", spec.R0)):
        if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < 0:
            raise NonpositiveParamError(f"{name} must be a nonnegative integer, got {value!r}")
    for b in spec.finite_block:
        zb = complex(b)
        if not (math.isfinite(zb.real) and math.isfinite(zb.imag)):
            raise NonpositiveParamError(f"finite_block entry must be finite, got {b!r}")
    return spec


def p00(spec: DeformationSpec, z0: complex) -> float:
    """Atom potential sum_alpha c_alpha / |a_alpha - z0|^2."""
    terms = []
    for a, c in spec.atoms:
        f = abs(complex(a) - z0) ** 2
        if f == 0.0:
            raise AtomCollisionError(f"reference point {z0} coincides with atom {a}")
        terms.append(c / f)
    return math.fsum(terms)


def classify_point(spec: DeformationSpec, z0: complex) -> PointClass:
    """Classify z0 as Bulk / Edge / Exterior relative to the limit support.

    Bulk means P00(z0) > 1/tau with clearance EDGE_BAND; Edge is the
    band |P00 - 1/tau| <= EDGE_BAND around the boundary.
    """
    value = p00(spec, z0)
    threshold = 1.0 / spec.tau
    if value > threshold + EDGE_BAND:
        tag = BULK
    elif value < threshold - EDGE_BAND:
        tag = EXTERIOR
    else:
        tag = EDGE
    return PointClass(tag=tag, p00=value)


def _level_values(spec: DeformationSpec, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """P00 - 1/tau on broadcast coordinate arrays.

    A sample point hitting an atom exactly evaluates to +inf, which is
    the correct sign side (deep inside the support), so grids are free
    to contain the atoms.
    """
    out = np.zeros(np.broadcast(x, y).shape, dtype=float)
    with np.errstate(divide="ignore"):
        for a, c in spec.atoms:
            za = complex(a)
            out += c / ((x - za.real) ** 2 + (y - za.imag) ** 2)
    return out - 1.0 / spec.tau


# Marching-squares segment table.  Cell corners are indexed
# bl, br, tr, tl (bits 0..3, bit set = positive side); entries list the
# pairs of local edges (B, R, T, L) joined by a contour segment.
_CASES = {
    0: [], 15: [],
    1: [("L", "B")], 14: [("L", "B")],
    2: [("B", "R")], 13: [("B", "R")],
    4: [("R", "T")], 11: [("R", "T")],
    8: [("T", "L")], 7: [("T", "L")],
    3: [("L", "R")], 12: [("L", "R")],
    6: [("B", "T")], 9: [("B", "T")],
    # 5 and 10 are saddles, resolved by the cell-center sample.
}


def trace_boundary(spec: DeformationSpec, window, resolution: float) -> BoundaryCurve:
    """Trace {P00 = 1/tau} inside an axis-aligned window.

    Marching squares on a uniform grid finds crossing cells; every
    crossing edge is then refined by bisection along that edge until
    |P00 - 1/tau| < BOUNDARY_RESIDUAL at the vertex.  Segments are
    chained into polylines, one per connected boundary piece.

    Parameters
    ----------
    spec : DeformationSpec
    window : (xmin, xmax, ymin, ymax)
        The window may contain atoms; the level curve typically loops
        around them.
    resolution : float
        Grid pitch; also the geometric fidelity of the polylines.

    Raises
    ------
    EmptyLevelSetError
        If no grid cell straddles the level set.
    """
    validate_spec(spec)
    xmin, xmax, ymin, ymax = map(float, window)
    if not (xmin < xmax and ymin < ymax):
        raise ValueError(f"window must satisfy xmin<xmax, ymin<ymax, got {window}")
    if not (resolution > 0 and math.isfinite(resolution)):
        raise ValueError(f"resolution must be positive, got {resolution}")

    nx = int(math.ceil((xmax - xmin) / resolution)) + 1
    ny = int(math.ceil((ymax - ymin) / resolution)) + 1
    xs = xmin + resolution * np.arange(nx)
    ys = ymin + resolution * np.arange(ny)
    # F[i, j] = P00(xs[i] + 1j*ys[j]) - 1/tau
    F = _level_values(spec, xs[:, None], ys[None, :])
    pos = F > 0.0

    # --- collect crossing edges --------------------------------------
    # Horizontal edge ('h', i, j): (xs[i], ys[j]) -- (xs[i+1], ys[j]).
    # Vertical   edge ('v', i, j): (xs[i], ys[j]) -- (xs[i], ys[j+1]).
    h_cross = pos[:-1, :] != pos[1:, :]
    v_cross = pos[:, :-1] != pos[:, 1:]
    edge_keys = [("h", i, j) for i, j in zip(*np.nonzero(h_cross))]
    edge_keys += [("v", i, j) for i, j in zip(*np.nonzero(v_cross))]
    if not edge_keys:
        raise EmptyLevelSetError(
            "level set P00 = 1/tau does not cross the window at this resolution")

    p_lo = np.empty((len(edge_keys), 2))
    p_hi = np.empty((len(edge_keys), 2))
    f_lo = np.empty(len(edge_keys))
    f_hi = np.empty(len(edge_keys))
    for k, (kind, i, j) in enumerate(edge_keys):
        if kind == "h":
            p_lo[k] = (xs[i], ys[j])
            p_hi[k] = (xs[i + 1], ys[j])
            f_lo[k], f_hi[k] = F[i, j], F[i + 1, j]
        else:
            p_lo[k] = (xs[i], ys[j])
            p_hi[k] = (xs[i], ys[j + 1])
            f_lo[k], f_hi[k] = F[i, j], F[i, j + 1]

    # --- bisection refinement (vectorized over all crossing edges) ---
    mid = 0.5 * (p_lo + p_hi)
    f_mid = _level_values(spec, mid[:, 0], mid[:, 1])
    for _ in range(200):
        if np.all(np.abs(f_mid) < BOUNDARY_RESIDUAL):
            break
        take_lo = (f_mid > 0.0) == (f_lo > 0.0)
        p_lo[take_lo] = mid[take_lo]
        f_lo[take_lo] = f_mid[take_lo]
        p_hi[~take_lo] = mid[~take_lo]
        f_hi[~take_lo] = f_mid[~take_lo]
        mid = 0.5 * (p_lo + p_hi)
        f_mid = _level_values(spec, mid[:, 0], mid[:, 1])
    vertices = mid[:, 0] + 1j * mid[:, 1]
    vertex_of = {key: k for k, key in enumerate(edge_keys)}

    # --- per-cell segments -------------------------------------------
    local_edges = {
        "B": lambda i, j: ("h", i, j),
        "T": lambda i, j: ("h", i, j + 1),
        "L": lambda i, j: ("v", i, j),
        "R": lambda i, j: ("v", i + 1, j),
    }
    segments = []
    cell_i, cell_j = np.nonzero(
        h_cross[:, :-1] | h_cross[:, 1:] | v_cross[:-1, :] | v_cross[1:, :])
    for i, j in zip(cell_i, cell_j):
        case = (int(pos[i, j]) | (int(pos[i + 1, j]) << 1)
                | (int(pos[i + 1, j + 1]) << 2) | (int(pos[i, j + 1]) << 3))
        if case in _CASES:
            pairs = _CASES[case]
        else:
            # Saddle: sample the true field at the cell center.
            cx, cy = xs[i] + 0.5 * resolution, ys[j] + 0.5 * resolution
            center_pos = _level_values(spec, np.array(cx), np.array(cy)) > 0.0
            if case == 5:     # bl, tr positive
                pairs = [("L", "T"), ("B", "R")] if center_pos else [("L", "B"), ("R", "T")]
            else:             # case 10: br, tl positive
                pairs = [("L", "B"), ("R", "T")] if center_pos else [("L", "T"), ("B", "R")]
        for ea, eb in pairs:
            segments.append((vertex_of[local_edges[ea](i, j)],
                             vertex_of[local_edges[eb](i, j)]))

    # --- chain segments into polylines --------------------------------
    polylines = [vertices[chain] for chain in _chain_segments(segments, len(vertices))]
    polylines.sort(key=lambda p: (len(p), p[0].real, p[0].imag))
    return BoundaryCurve(polylines=polylines, grid_resolution=float(resolution))


def _chain_segments(segments, n_vertices):
    """Order undirected segments into vertex-index chains.

    Open chains are walked from endpoints of odd degree first, then the
    remaining segments form closed loops (first index repeated at the
    end).  Chains are returned as lists of vertex indices.
    """
    adjacency = [[] for _ in range(n_vertices)]
    for s, (u, v) in enumerate(segments):
        adjacency[u].append((v, s))
        adjacency[v].append((u, s))
    used = [False] * len(segments)

    def walk(start):
        chain = [start]
        current = start
        while True:
            step = next(((nxt, s) for nxt, s in adjacency[current] if not used[s]), None)
            if step is None:
                return chain
            nxt, s = step
            used[s] = True
            chain.append(nxt)
            current = nxt

    chains = []
    for v in range(n_vertices):
        if len(adjacency[v]) % 2 == 1:
            while any(not used[s] for _, s in adjacency[v]):
                chains.append(walk(v))
    for s, (u, _) in enumerate(segments):
        if not used[s]:
            chains.append(walk(u))
    return chains


def write_boundary_csv(curve: BoundaryCurve, path) -> None:
    """Write polylines as rows of (curve_id, x, y)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["curve_id", "x", "y"])
        for cid, line in enumerate(curve.polylines):
            for z in line:
                writer.writerow([cid, repr(float(z.real)), repr(float(z.imag))])


def block_multiplicities(spec: DeformationSpec, N: int) -> list:
    """Integer atom multiplicities for matrix size N.

    The N - (r0 + len(finite_block) + R0) slots left for atoms are split
    proportionally to the weights: floor(c_alpha * M) each, with the
    remaining slots handed out by largest fractional part (ties broken
    by atom order).  The result sums to M exactly and each multiplicity
    differs from c_alpha * N by a bounded amount.
    """
    validate_spec(spec)
    fixed = spec.r0 + len(spec.finite_block) + spec.R0
    t = len(spec.atoms)
    if N < fixed + t:
        raise DimensionError(
            f"N={N} too small: need at least {fixed + t} "
            f"(fixed blocks {fixed} plus one slot per atom)")
    M = N - fixed
    weights = spec.atom_weights()
    base = np.floor(weights * M).astype(int)
    fractions = weights * M - base
    leftover = M - int(base.sum())
    order = sorted(range(t), key=lambda k: (-fractions[k], k))
    for k in order[:leftover]:
        base[k] += 1
    return [int(r) for r in base]


def mean_diagonal(spec: DeformationSpec, N: int, z0: complex = None) -> np.ndarray:
    """Length-N diagonal of the mean matrix X0.

    Layout: atom blocks in spec order, then r0 copies of z0, the finite
    block, and R0 zeros.  z0 is required exactly when r0 > 0.
    """
    counts = block_multiplicities(spec, N)
    if spec.r0 > 0 and z0 is None:
        raise ValueError("z0 is required when the spec has a probe block (r0 > 0)")
    parts = [np.full(r, complex(a), dtype=complex)
             for (a, _), r in zip(spec.atoms, counts)]
    if spec.r0 > 0:
        parts.append(np.full(spec.r0, complex(z0), dtype=complex))
    if spec.finite_block:
        parts.append(np.array([complex(b) for b in spec.finite_block], dtype=complex))
    if spec.R0 > 0:
        parts.append(np.zeros(spec.R0, dtype=complex))
    return np.concatenate(parts) if parts else np.zeros(0, dtype=complex)


def build_mean_matrix(spec: DeformationSpec, N: int, z0: complex = None) -> np.ndarray:
    """Dense N x N diagonal mean matrix X0."""
    return np.diag(mean_diagonal(spec, N, z0))
