"""Command line interface.

Subcommands:

* model  -- classify the reference point, solve the bulk parameters,
            optionally trace the support boundary.
* run    -- execute a sampling campaign and write reports + manifest.
* verify -- run the variational check suite and write its report.
* report -- render summary CSV and figures from a campaign manifest.

Exit codes: 0 success, 2 invalid spec/config, 3 reference point outside
the bulk, 4 numerical failure (non-convergence, insufficient data,
failing checks), 5 missing artifact.
"""

import argparse
import csv
import json
import os
import sys

import numpy as np

from .bulk import bulk_parameters, params_to_json_dict
from .config import (canonical_json, config_hash, load_config,
                     resolve_output_dir, validate_config)
from .errors import (GeometryError, MissingArtifactError, NumericalError,
                     ValidationError)
from .model import BULK, classify_point, trace_boundary, write_boundary_csv
from .pipeline import load_manifest, run_campaign, verify_all

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NOT_BULK = 3
EXIT_NUMERICAL = 4
EXIT_MISSING = 5


def _add_config_options(sub):
    sub.add_argument("--config", required=True, help="JSON config file")
    sub.add_argument("--set", dest="overrides", action="append", default=[],
                     metavar="KEY=VALUE",
                     help="override a config key (repeatable), e.g. --set trials=8")
    sub.add_argument("--trials", type=int, default=None)
    sub.add_argument("--master-seed", type=int, default=None)
    sub.add_argument("--z0.re", dest="z0_re", type=float, default=None)
    sub.add_argument("--z0.im", dest="z0_im", type=float, default=None)
    sub.add_argument("--window-rho", type=float, default=None)
    sub.add_argument("--jobs", type=int, default=None)
    sub.add_argument("--output-dir", default=None)
    sub.add_argument("--dump-spectra", action="store_true", default=None)


def _collect_overrides(args) -> list:
    overrides = list(args.overrides)
    direct = {
        "trials": args.trials,
        "master_seed": args.master_seed,
        "z0.re": args.z0_re,
        "z0.im": args.z0_im,
        "window_rho": args.window_rho,
        "jobs": args.jobs,
        "output_dir": args.output_dir,
    }
    for key, value in direct.items():
        if value is not None:
            overrides.append(f"{key}={value}")
    if args.dump_spectra:
        overrides.append("dump_spectra=true")
    return overrides


def cmd_model(args) -> int:
    cfg = load_config(args.config, _collect_overrides(args))
    validate_config(cfg)
    out_dir = resolve_output_dir(cfg)
    os.makedirs(out_dir, exist_ok=True)

    cls = classify_point(cfg.spec, cfg.z0)
    if cls.tag != BULK:
        print(f"z0={cfg.z0} classified {cls.tag} "
              f"(P00={cls.p00:.6g}, threshold={1.0 / cfg.spec.tau:.6g}); "
              "bulk parameters are only defined strictly inside the support",
              file=sys.stderr)
        return EXIT_NOT_BULK

    params = bulk_parameters(cfg.spec, cfg.z0)
    doc = {
        "classification": cls.tag,
        "p00": cls.p00,
        "threshold": 1.0 / cfg.spec.tau,
        "config_hash": config_hash(cfg),
    }
    doc.update(params_to_json_dict(params))

    artifacts = []
    if cfg.boundary_window is not None:
        curve = trace_boundary(cfg.spec, cfg.boundary_window,
                               cfg.boundary_resolution)
        boundary_path = os.path.join(out_dir, "boundary.csv")
        write_boundary_csv(curve, boundary_path)
        artifacts.append(boundary_path)
        doc["boundary"] = {"n_curves": len(curve.polylines),
                           "resolution": curve.grid_resolution,
                           "csv": os.path.basename(boundary_path)}
        from .plotting import plot_boundary
        fig_path = os.path.join(out_dir, "boundary.png")
        plot_boundary(curve.polylines,
                      [complex(a) for a, _ in cfg.spec.atoms],
                      fig_path, z0=cfg.z0)
        artifacts.append(fig_path)

    model_path = os.path.join(out_dir, "model.json")
    with open(model_path, "w") as fh:
        fh.write(canonical_json(doc))
        fh.write("\n")
    print(f"z0={cfg.z0}: {cls.tag}, t0={params.t0:.12g}, "
          f"sigma_sq={params.sigma_sq:.12g}, "
          f"density={params.predicted_density:.12g}")
    for path in [model_path] + artifacts:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = load_config(args.config, _collect_overrides(args))
    manifest = run_campaign(cfg)
    out_dir = resolve_output_dir(cfg)
    for row in manifest["results"]:
        print(f"N={row['N']}: density_rel_err={row['density_rel_err']:.4f}, "
              f"KS={row['ks_spacing_vs_ginibre']:.4f}")
    print(f"wrote {os.path.join(out_dir, 'manifest.json')}")
    return EXIT_OK


def cmd_verify(args) -> int:
    report = verify_all(hciz_samples=args.hciz_samples, seed=args.seed,
                        grid_resolution=args.grid_resolution)
    out_dir = args.output_dir or os.environ.get("GINLAB_OUTPUT_DIR") or os.getcwd()
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "verification_report.json")
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for entry in report["checks"]:
        status = "PASS" if entry["passed"] else "FAIL"
        detail = (f"rel_err={entry['rel_err']:.3e}" if "rel_err" in entry
                  else f"gap={entry['max_gap']:.3e}")
        warn = "  [warning]" if entry.get("warning") else ""
        print(f"[{status}] {entry['check']}/{entry['case']}: {detail}{warn}")
    print(f"wrote {path}")
    return EXIT_OK if report["passed"] else EXIT_NUMERICAL


def _read_csv_columns(path, columns):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return [data[:, i] for i in range(columns)]


def cmd_report(args) -> int:
    manifest = load_manifest(args.manifest)
    base = os.path.dirname(os.path.abspath(args.manifest))
    reports = []
    for row in manifest["results"]:
        with open(os.path.join(base, row["report"])) as fh:
            reports.append(json.load(fh))
    reports.sort(key=lambda r: r["N"])

    summary_path = os.path.join(base, "summary.csv")
    fields = ["N", "trials", "density_hat", "density_theory", "density_rel_err",
              "density_hat_raw", "density_theory_raw", "ks_spacing_vs_ginibre"]
    with open(summary_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(fields + ["local_points", "pairs", "spacings"])
        for rep in reports:
            writer.writerow([repr(rep[f]) if isinstance(rep[f], float) else rep[f]
                             for f in fields]
                            + [rep["counts"]["local_points"], rep["counts"]["pairs"],
                               rep["counts"]["spacings"]])
    written = [summary_path]

    if not args.no_figures:
        from . import plotting
        density_fig = os.path.join(base, "density_trend.png")
        plotting.plot_density_trend([(r["N"], r["density_hat"]) for r in reports],
                                    reports[0]["density_theory"], density_fig)
        written.append(density_fig)
        for rep in reports:
            N = rep["N"]
            g = rep["g_of_r"]
            fig = os.path.join(base, f"pair_correlation_N{N}.png")
            plotting.plot_pair_correlation(g["bin_centers"], g["values"],
                                           g["counts"], fig, N=N)
            written.append(fig)
            run_path = os.path.join(base, f"spacing_ecdf_N{N}.csv")
            base_path = os.path.join(base, f"baseline_spacing_ecdf_N{N}.csv")
            if not (os.path.isfile(run_path) and os.path.isfile(base_path)):
                raise MissingArtifactError(
                    f"spacing ECDF CSVs for N={N} missing next to the manifest")
            rv, rc = _read_csv_columns(run_path, 2)
            bv, bc = _read_csv_columns(base_path, 2)
            fig = os.path.join(base, f"spacing_ecdf_N{N}.png")
            plotting.plot_spacing_ecdfs(rv, rc, bv, bc, fig, N=N,
                                        ks=rep["ks_spacing_vs_ginibre"])
            written.append(fig)

    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ginlab",
        description="Deformed Ginibre ensembles: bulk parameters, sampling "
                    "campaigns, and universality statistics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_model = sub.add_parser("model", help="classify z0 and solve bulk parameters")
    _add_config_options(p_model)
    p_model.set_defaults(func=cmd_model)

    p_run = sub.add_parser("run", help="run a sampling campaign")
    _add_config_options(p_run)
    p_run.set_defaults(func=cmd_run)

    p_verify = sub.add_parser("verify", help="run the variational check suite")
    p_verify.add_argument("--hciz-samples", type=int, default=1_000_000,
                          help="Monte Carlo samples per unitary-average case")
    p_verify.add_argument("--seed", type=int, default=2024)
    p_verify.add_argument("--grid-resolution", type=float, default=0.05)
    p_verify.add_argument("--output-dir", default=None)
    p_verify.set_defaults(func=cmd_verify)

    p_report = sub.add_parser("report", help="render summary and figures")
    p_report.add_argument("--manifest", required=True)
    p_report.add_argument("--no-figures", action="store_true")
    p_report.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except GeometryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_BULK
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except MissingArtifactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING


if __name__ == "__main__":
    sys.exit(main())
