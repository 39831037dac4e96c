"""Empirical local statistics of sampled spectra.

Eigenvalues near the reference point are rescaled by sqrt(N sigma^2) so
the limiting process has unit mean density; the estimators below then
measure that density, the radial pair correlation (with an edge
correction so only points at distance >= r_max from the window rim
anchor pairs), and the nearest-neighbour spacing distribution, for
comparison against the kernel predictions.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .bulk import BulkParameters, rescale_factor
from .errors import InsufficientDataError
from .matrixlab import SpectrumSample

#: Minimum disk count for a density estimate.
MIN_DENSITY_COUNT = 50
#: Minimum total pair count for a pair-correlation histogram.
MIN_PAIR_COUNT = 200
#: Default minimum point count for a spacing ECDF.
MIN_SPACING_POINTS = 200
#: Margin (in rescaled units) trimmed off the window for spacing owners,
#: so every owner's true nearest neighbour is visible inside the window.
SPACING_MARGIN = 2.0


@dataclass(frozen=True)
class ECDF:
    """Empirical cumulative distribution: sorted values and step heights."""

    values: np.ndarray
    cdf: np.ndarray

    def evaluate(self, x) -> np.ndarray:
        """Right-continuous ECDF evaluated at x."""
        x = np.asarray(x, dtype=float)
        return np.searchsorted(self.values, x, side="right") / len(self.values)


@dataclass(frozen=True)
class PairHistogram:
    """Radial pair-correlation estimate on uniform bins."""

    bin_centers: np.ndarray
    values: np.ndarray
    counts: np.ndarray


@dataclass(frozen=True)
class LocalStatistics:
    """Rescaled local point configurations pooled over trials."""

    rescaled_points: list          # one complex ndarray per trial
    window_rho: float
    n_trials: int
    N: int
    sigma_sq: float

    def total_points(self) -> int:
        return int(sum(len(p) for p in self.rescaled_points))


def extract_local(sample: SpectrumSample, params: BulkParameters, rho: float) -> np.ndarray:
    """Rescaled eigenvalues sqrt(N sigma^2) * (lambda - z0) within |.| <= rho."""
    if rho <= 0:
        raise ValueError(f"window radius must be positive, got {rho}")
    factor = rescale_factor(params, sample.N)
    z = factor * (sample.eigenvalues - params.z0)
    return z[np.abs(z) <= rho]


def collect_local(samples, params: BulkParameters, rho: float) -> LocalStatistics:
    """Pool rescaled windows from a list of same-size spectrum samples."""
    samples = list(samples)
    if not samples:
        raise InsufficientDataError("no spectrum samples supplied")
    sizes = {s.N for s in samples}
    if len(sizes) != 1:
        raise ValueError(f"samples mix matrix sizes {sorted(sizes)}")
    points = [extract_local(s, params, rho) for s in samples]
    return LocalStatistics(rescaled_points=points, window_rho=float(rho),
                           n_trials=len(samples), N=samples[0].N,
                           sigma_sq=params.sigma_sq)


def density_estimate(stats: LocalStatistics) -> float:
    """Mean point density over the half-radius disk.

    Counting in |z| <= rho/2 rather than the full window keeps the
    estimate clear of boundary depletion.  The limiting process has
    density 1/pi after rescaling.
    """
    if stats.n_trials < 1:
        raise InsufficientDataError("density estimate needs at least one trial")
    r_in = 0.5 * stats.window_rho
    total = sum(int(np.count_nonzero(np.abs(p) <= r_in)) for p in stats.rescaled_points)
    if total < MIN_DENSITY_COUNT:
        raise InsufficientDataError(
            f"only {total} points in the inner disk, need {MIN_DENSITY_COUNT}; "
            "increase trials, N, or the window radius")
    return total / (math.pi * r_in ** 2 * stats.n_trials)


def pair_correlation_estimate(stats: LocalStatistics, r_max: float,
                              n_bins: int) -> PairHistogram:
    """Edge-corrected radial pair correlation on [0, r_max].

    Pairs are ordered: the anchor point must lie in the eroded window
    |z| <= rho - r_max (so its full r_max-ball is observed), the partner
    anywhere in the window.  Each annulus count is normalised by
    annulus_area * (1/pi) * n_anchors, the expectation for a unit-rate
    ideal gas, so values near 1 mean Poisson-like behaviour at that
    separation.
    """
    if not (0 < r_max <= 0.5 * stats.window_rho):
        raise ValueError(
            f"r_max must lie in (0, rho/2] = (0, {0.5 * stats.window_rho}], got {r_max}")
    if n_bins < 4:
        raise ValueError(f"need at least 4 bins, got {n_bins}")
    edges = np.linspace(0.0, r_max, n_bins + 1)
    counts = np.zeros(n_bins, dtype=np.int64)
    n_anchors = 0
    for pts in stats.rescaled_points:
        if len(pts) < 2:
            continue
        anchor_idx = np.nonzero(np.abs(pts) <= stats.window_rho - r_max)[0]
        if anchor_idx.size == 0:
            continue
        n_anchors += anchor_idx.size
        d = np.abs(pts[anchor_idx, None] - pts[None, :])
        d[np.arange(anchor_idx.size), anchor_idx] = np.inf  # drop self pairs
        d = d[d <= r_max]
        counts += np.histogram(d, bins=edges)[0]
    total_pairs = int(counts.sum())
    if n_anchors == 0 or total_pairs < MIN_PAIR_COUNT:
        raise InsufficientDataError(
            f"{total_pairs} pairs from {n_anchors} anchors; need {MIN_PAIR_COUNT} pairs")
    areas = math.pi * (edges[1:] ** 2 - edges[:-1] ** 2)
    expected = areas * (1.0 / math.pi) * n_anchors
    values = counts / expected
    centers = 0.5 * (edges[:-1] + edges[1:])
    return PairHistogram(bin_centers=centers, values=values, counts=counts)


def nn_spacing_ecdf(stats: LocalStatistics, min_points: int = MIN_SPACING_POINTS) -> ECDF:
    """ECDF of nearest-neighbour distances.

    Spacing owners are restricted to |z| <= rho - SPACING_MARGIN while
    candidate neighbours come from the whole window; at unit density a
    margin of 2 makes a truncated nearest neighbour vanishingly rare.
    """
    if stats.total_points() < min_points:
        raise InsufficientDataError(
            f"{stats.total_points()} local points, need {min_points} for a spacing ECDF")
    spacings = []
    owner_rho = stats.window_rho - SPACING_MARGIN
    for pts in stats.rescaled_points:
        if len(pts) < 2:
            continue
        owner_idx = np.nonzero(np.abs(pts) <= owner_rho)[0]
        if owner_idx.size == 0:
            continue
        d = np.abs(pts[owner_idx, None] - pts[None, :])
        d[np.arange(owner_idx.size), owner_idx] = np.inf
        spacings.append(d.min(axis=1))
    if not spacings:
        raise InsufficientDataError(
            "no spacing owners inside the eroded window; widen the window")
    values = np.sort(np.concatenate(spacings))
    return ECDF(values=values, cdf=np.arange(1, len(values) + 1) / len(values))


def ks_distance(a: ECDF, b: ECDF) -> float:
    """Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|."""
    if len(a.values) == 0 or len(b.values) == 0:
        raise ValueError("both ECDFs must be nonempty")
    grid = np.concatenate([a.values, b.values])
    return float(np.max(np.abs(a.evaluate(grid) - b.evaluate(grid))))


@dataclass(frozen=True)
class ComparisonReport:
    """Empirical-versus-predicted summary for one (spec, z0, N) run."""

    density_hat: float
    density_theory: float
    density_rel_err: float
    g_of_r: PairHistogram
    ks_spacing_vs_ginibre: float
    counts: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "density_hat": self.density_hat,
            "density_theory": self.density_theory,
            "density_rel_err": self.density_rel_err,
            "g_of_r": {
                "bin_centers": [float(x) for x in self.g_of_r.bin_centers],
                "values": [float(x) for x in self.g_of_r.values],
                "counts": [int(x) for x in self.g_of_r.counts],
            },
            "ks_spacing_vs_ginibre": self.ks_spacing_vs_ginibre,
            "counts": {k: int(v) for k, v in sorted(self.counts.items())},
        }


def build_report(stats: LocalStatistics, baseline: ECDF,
                 r_max: float, n_bins: int) -> ComparisonReport:
    """Assemble the comparison report for one pooled local sample.

    `baseline` is the spacing ECDF of a matched pure-Ginibre run; the
    KS distance against it is the spacing universality figure of merit.
    """
    density = density_estimate(stats)
    theory = 1.0 / math.pi
    hist = pair_correlation_estimate(stats, r_max, n_bins)
    spacing = nn_spacing_ecdf(stats)
    ks = ks_distance(spacing, baseline)
    counts = {
        "local_points": stats.total_points(),
        "pairs": int(hist.counts.sum()),
        "spacings": len(spacing.values),
        "trials": stats.n_trials,
    }
    return ComparisonReport(density_hat=density, density_theory=theory,
                            density_rel_err=abs(density - theory) / theory,
                            g_of_r=hist, ks_spacing_vs_ginibre=ks, counts=counts)


def write_histogram_csv(hist: PairHistogram, path) -> None:
    """Write a pair histogram as rows of (r, value, count)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["r", "g", "count"])
        for r, g, n in zip(hist.bin_centers, hist.values, hist.counts):
            writer.writerow([repr(float(r)), repr(float(g)), int(n)])


def write_ecdf_csv(ecdf: ECDF, path) -> None:
    """Write an ECDF as rows of (value, cdf)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["value", "cdf"])
        for v, c in zip(ecdf.values, ecdf.cdf):
            writer.writerow([repr(float(v)), repr(float(c))])
