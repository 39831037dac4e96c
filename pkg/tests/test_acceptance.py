"""End-to-end acceptance suite.

One test per acceptance criterion, each reporting a single PASS/FAIL
line on the live terminal. The heavy statistical criteria share two
module-scoped N=1024 sampling campaigns (240 trials each: the 40-trial
runs required by the density criteria are their first-40 slices, since
trials are keyed per index). Expect roughly 15-20 minutes single-core
for the whole module; everything is deterministic given the pinned
seeds.
"""

import json
import math
import time

import numpy as np
import pytest

from ginlab.bulk import bulk_parameters, solve_t0
from ginlab.checks import (check_amplitude_maximum, check_hciz,
                           check_potential_peak)
from ginlab.cli import main
from ginlab.examples import shipped_cases
from ginlab.kernel import (kernel_matrix, npoint_correlation,
                           predicted_pair_correlation)
from ginlab.model import DeformationSpec
from ginlab.pipeline import (BASELINE_SPEC, BASELINE_Z0, _BASELINE_SALT,
                             run_trials)
from ginlab.rng import derive_key
from ginlab.stats import (collect_local, density_estimate, ks_distance,
                          nn_spacing_ecdf, pair_correlation_estimate)

TWO_ATOM = DeformationSpec(tau=2.0, atoms=((1 + 0j, 0.5), (-1 + 0j, 0.5)), R0=2)
Z0 = 0j
#: Master seed of the N=1024 campaigns. Chosen up front, then verified;
#: the 40-trial density criteria have ~2.5% estimator sigma against a 5%
#: tolerance, so an unlucky seed could fail honestly.
MASTER = 1001
TREND_MASTERS = (1, 2, 3)
DENSITY_THEORY = 1.0 / math.pi
RHO = 5.0


@pytest.fixture(scope="module")
def announce(request):
    reporter = request.config.pluginmanager.get_plugin("terminalreporter")

    def _announce(criterion, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}"
        if reporter is not None:
            reporter.write_line(line)
        else:
            print(line)

    return _announce


@pytest.fixture(scope="module")
def two_1024():
    seed = derive_key(MASTER, 1024)
    return run_trials(TWO_ATOM, Z0, 1024, seed, trials=240)


@pytest.fixture(scope="module")
def pure_1024():
    seed = derive_key(MASTER ^ _BASELINE_SALT, 1024)
    return run_trials(BASELINE_SPEC, BASELINE_Z0, 1024, seed, trials=240)


def test_criterion_1_fixed_point_solver(announce):
    started = time.perf_counter()
    pure = DeformationSpec(tau=1.0, atoms=((0j, 1.0),))
    rng = np.random.default_rng(2024)
    worst_closed = 0.0
    found = 0
    while found < 20:
        z0 = complex(*rng.uniform(-0.7, 0.7, size=2))
        if not (1e-3 < abs(z0) < 0.95):
            continue
        found += 1
        worst_closed = max(worst_closed,
                           abs(solve_t0(pure, z0) - (1.0 - abs(z0) ** 2)))
    worst_residual = 0.0
    for case in shipped_cases():
        if len(case.spec.atoms) < 2:
            continue
        t0 = solve_t0(case.spec, case.z0)
        residual = math.fsum(
            case.spec.tau * c / (abs(complex(a) - case.z0) ** 2 + t0)
            for a, c in case.spec.atoms) - 1.0
        worst_residual = max(worst_residual, abs(residual))
    elapsed = time.perf_counter() - started
    passed = worst_closed < 1e-12 and worst_residual < 1e-12 and elapsed < 1.0
    announce(1, passed,
             f"t0 solver: closed-form dev {worst_closed:.2e}, multi-atom "
             f"residual {worst_residual:.2e}, {elapsed:.3f}s")
    assert worst_closed < 1e-12
    assert worst_residual < 1e-12
    assert elapsed < 1.0


def test_criterion_2_circular_law_density(pure_1024, announce):
    params = bulk_parameters(BASELINE_SPEC, BASELINE_Z0)
    assert params.sigma_sq == pytest.approx(1.0, abs=1e-12)
    stats = collect_local(pure_1024[:40], params, RHO)
    density = density_estimate(stats)
    rel = abs(density - DENSITY_THEORY) / DENSITY_THEORY
    announce(2, rel < 0.05,
             f"pure density N=1024 T=40: {density:.5f} vs {DENSITY_THEORY:.5f} "
             f"(rel err {rel:.4f}, tol 0.05)")
    assert rel < 0.05


def test_criterion_3_deformed_density(two_1024, announce):
    params = bulk_parameters(TWO_ATOM, Z0)
    assert params.t0 == pytest.approx(1.0, abs=1e-12)
    assert params.sigma_sq == pytest.approx(0.25, abs=1e-12)
    stats = collect_local(two_1024[:40], params, RHO)
    density = density_estimate(stats)
    rel = abs(density - DENSITY_THEORY) / DENSITY_THEORY
    # raw density per unit physical area: multiply both sides by N sigma^2
    raw_hat = density * 1024 * params.sigma_sq
    raw_theory = DENSITY_THEORY * 1024 * params.sigma_sq
    rel_raw = abs(raw_hat - raw_theory) / raw_theory
    passed = rel < 0.07 and rel_raw < 0.07
    announce(3, passed,
             f"two-atom density N=1024 T=40: rescaled rel err {rel:.4f} "
             f"(tol 0.07), raw {raw_hat:.1f} vs {raw_theory:.1f} per unit area")
    assert rel < 0.07
    assert rel_raw < 0.07


def test_criterion_4_pair_correlation(two_1024, announce):
    params = bulk_parameters(TWO_ATOM, Z0)
    stats = collect_local(two_1024, params, RHO)
    hist = pair_correlation_estimate(stats, r_max=2.5, n_bins=6)
    theory = predicted_pair_correlation(hist.bin_centers)
    qualified = hist.counts >= 500
    assert qualified.any(), "no bin reached 500 pairs; criterion would be vacuous"
    max_dev = float(np.max(np.abs(hist.values - theory)[qualified]))
    announce(4, max_dev < 0.08,
             f"pair correlation: {int(qualified.sum())}/{len(hist.counts)} bins "
             f">=500 pairs, max |ghat - (1-exp(-r^2))| = {max_dev:.4f} (tol 0.08)")
    assert max_dev < 0.08


def test_criterion_5_spacing_universality(two_1024, pure_1024, announce):
    two_stats = collect_local(two_1024, bulk_parameters(TWO_ATOM, Z0), RHO)
    pure_stats = collect_local(pure_1024,
                               bulk_parameters(BASELINE_SPEC, BASELINE_Z0), RHO)
    two_ecdf = nn_spacing_ecdf(two_stats)
    pure_ecdf = nn_spacing_ecdf(pure_stats)
    n_two, n_pure = len(two_ecdf.values), len(pure_ecdf.values)
    matched = abs(n_two - n_pure) / max(n_two, n_pure) < 0.1
    ks = ks_distance(two_ecdf, pure_ecdf)
    announce(5, matched and ks < 0.05,
             f"NN spacing deformed vs pure: {n_two}/{n_pure} points, "
             f"KS = {ks:.4f} (tol 0.05)")
    assert matched
    assert ks < 0.05


def test_criterion_6_rate_trend(announce):
    params = bulk_parameters(TWO_ATOM, Z0)
    seed_results = []
    details = []
    for master in TREND_MASTERS:
        errs = []
        for N in (256, 512, 1024):
            samples = run_trials(TWO_ATOM, Z0, N, derive_key(master, N),
                                 trials=40)
            density = density_estimate(collect_local(samples, params, RHO))
            errs.append(abs(density - DENSITY_THEORY) / DENSITY_THEORY)
        comps = [errs[0] >= errs[1], errs[1] >= errs[2], errs[0] >= errs[2]]
        seed_results.append(sum(comps) >= 2)
        details.append(f"seed {master}: " +
                       "/".join(f"{e:.3f}" for e in errs) +
                       (" ok" if seed_results[-1] else " fail"))
    passed = sum(seed_results) >= 2
    announce(6, passed,
             "density_rel_err trend over N=256/512/1024, " + "; ".join(details))
    assert passed


def test_criterion_7_variational_checks(announce):
    started = time.perf_counter()
    failures = []
    for case in shipped_cases():
        if not check_potential_peak(case.spec, case.z0).passed:
            failures.append(f"potential_peak/{case.name}")
        if not check_amplitude_maximum(case.spec, case.z0).passed:
            failures.append(f"amplitude_maximum/{case.name}")
    rel = check_hciz(2, [0.0, 1.0], [0.0, 1.0], 1.0,
                     mc_samples=1_000_000, seed=2024)
    if rel >= 0.01:
        failures.append(f"hciz rel_err {rel:.4f}")
    elapsed = time.perf_counter() - started
    passed = not failures and elapsed < 120.0
    announce(7, passed,
             f"variational checks on all shipped specs, HCIZ rel err "
             f"{rel:.2e} at 1e6 samples, {elapsed:.1f}s" +
             (f"; failures: {failures}" if failures else ""))
    assert not failures
    assert elapsed < 120.0


def test_criterion_8_kernel_properties(announce):
    rng = np.random.default_rng(88)
    worst_invariance = 0.0
    min_eig = np.inf
    worst_coincidence = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 6))
        pts = rng.normal(size=n) + 1j * rng.normal(size=n)
        base = npoint_correlation(pts)
        shift = complex(*rng.normal(size=2))
        phase = np.exp(1j * rng.uniform(0, 2 * math.pi))
        worst_invariance = max(
            worst_invariance,
            abs(npoint_correlation(pts + shift) - base),
            abs(npoint_correlation(phase * pts) - base))
        K = kernel_matrix(pts)
        min_eig = min(min_eig, float(np.linalg.eigvalsh(K).min()))
        doubled = np.concatenate([pts, pts[:1]])
        worst_coincidence = max(worst_coincidence,
                                abs(npoint_correlation(doubled)))
    passed = (worst_invariance < 1e-10 and min_eig > -1e-12
              and worst_coincidence < 1e-10)
    announce(8, passed,
             f"kernel: invariance dev {worst_invariance:.2e} (tol 1e-10), "
             f"min Gram eigenvalue {min_eig:.2e}, coincidence "
             f"{worst_coincidence:.2e} over 100 point sets")
    assert worst_invariance < 1e-10
    assert min_eig > -1e-12
    assert worst_coincidence < 1e-10


def test_criterion_9_determinism(tmp_path, announce):
    cfg = {
        "spec": {"tau": 2.0,
                 "atoms": [{"re": 1.0, "im": 0.0, "c": 0.5},
                           {"re": -1.0, "im": 0.0, "c": 0.5}],
                 "r0": 0, "finite_block": [], "R0": 2},
        "z0": {"re": 0.0, "im": 0.0},
        "N_list": [64],
        "trials": 24,
        "master_seed": 5,
        "window_rho": 4.0,
        "pair_r_max": 2.0,
        "pair_bins": 4,
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    dirs = (tmp_path / "a", tmp_path / "b")
    for d in dirs:
        code = main(["run", "--config", str(cfg_path), "--output-dir", str(d)])
        assert code == 0

    manifests = []
    identical = True
    for d in dirs:
        manifests.append(json.loads((d / "manifest.json").read_text()))
    for name in manifests[0]["artifacts"]:
        with open(dirs[0] / name, "rb") as fa, open(dirs[1] / name, "rb") as fb:
            if fa.read() != fb.read():
                identical = False
    stripped = []
    for m in manifests:
        m = dict(m)
        m.pop("created_at")
        m.pop("timings")
        m["config"] = dict(m["config"], output_dir=None, jobs=1)
        stripped.append(m)
    manifests_equal = stripped[0] == stripped[1]
    announce(9, identical and manifests_equal,
             f"repeated run: {len(manifests[0]['artifacts'])} artifacts "
             f"byte-identical={identical}, manifests (minus timestamps) "
             f"equal={manifests_equal}")
    assert identical
    assert manifests_equal
