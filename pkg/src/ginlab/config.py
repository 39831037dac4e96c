"""Run configuration: JSON loading, overrides, validation, hashing.

A config file bundles a deformation spec with a reference point and
campaign sizing.  Command-line overrides use dotted keys ("z0.re",
"trials") so scripted sweeps can reuse one base file.  The canonical
JSON form of a config is hashed into every manifest, which is what ties
artifacts back to the exact inputs that produced them.
"""

import hashlib
import json
import math
import os
from dataclasses import dataclass, replace
from importlib import resources

from .errors import ConfigError, MissingArtifactError
from .model import DeformationSpec, block_multiplicities, validate_spec

#: Minimum zero-padding rank required of campaign specs; the padding
#: pins deterministic kernel directions that the perturbation theory
#: of the smallest singular values relies on.
MIN_PADDING = 2


def complex_from_json(obj) -> complex:
    if isinstance(obj, (int, float)):
        return complex(float(obj), 0.0)
    try:
        return complex(float(obj["re"]), float(obj.get("im", 0.0)))
    except (TypeError, KeyError) as exc:
        raise ConfigError(f"expected a number or {{re, im}} object, got {obj!r}") from exc


def complex_to_json(z: complex) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def spec_from_json_dict(d: dict) -> DeformationSpec:
    """Build a DeformationSpec from its JSON object form."""
    try:
        atoms = tuple((complex_from_json(a), float(a["c"])) for a in d["atoms"])
        spec = DeformationSpec(
            tau=float(d["tau"]),
            atoms=atoms,
            r0=int(d.get("r0", 0)),
            finite_block=tuple(complex_from_json(b) for b in d.get("finite_block", ())),
            R0=int(d.get("R0", 0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed spec object: {exc}") from exc
    return spec


def spec_to_json_dict(spec: DeformationSpec) -> dict:
    return {
        "tau": spec.tau,
        "atoms": [{"re": complex(a).real, "im": complex(a).imag, "c": c}
                  for a, c in spec.atoms],
        "r0": spec.r0,
        "finite_block": [complex_to_json(b) for b in spec.finite_block],
        "R0": spec.R0,
    }


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a sampling campaign needs, in one hashable record."""

    spec: DeformationSpec
    z0: complex
    N_list: tuple
    trials: int
    master_seed: int
    window_rho: float = 5.0
    pair_r_max: float = 2.5
    pair_bins: int = 25
    jobs: int = 1
    dump_spectra: bool = False
    output_dir: str = None
    boundary_window: tuple = None      # (xmin, xmax, ymin, ymax) or None
    boundary_resolution: float = 0.05


def config_from_json_dict(d: dict) -> ExperimentConfig:
    try:
        spec = spec_from_json_dict(d["spec"])
        cfg = ExperimentConfig(
            spec=spec,
            z0=complex_from_json(d["z0"]),
            N_list=tuple(int(n) for n in d["N_list"]),
            trials=int(d["trials"]),
            master_seed=int(d["master_seed"]),
            window_rho=float(d.get("window_rho", 5.0)),
            pair_r_max=float(d.get("pair_r_max", 2.5)),
            pair_bins=int(d.get("pair_bins", 25)),
            jobs=int(d.get("jobs", 1)),
            dump_spectra=bool(d.get("dump_spectra", False)),
            output_dir=d.get("output_dir"),
            boundary_window=(tuple(float(v) for v in d["boundary_window"])
                             if d.get("boundary_window") is not None else None),
            boundary_resolution=float(d.get("boundary_resolution", 0.05)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    return cfg


def config_to_json_dict(cfg: ExperimentConfig) -> dict:
    return {
        "spec": spec_to_json_dict(cfg.spec),
        "z0": complex_to_json(cfg.z0),
        "N_list": list(cfg.N_list),
        "trials": cfg.trials,
        "master_seed": cfg.master_seed,
        "window_rho": cfg.window_rho,
        "pair_r_max": cfg.pair_r_max,
        "pair_bins": cfg.pair_bins,
        "jobs": cfg.jobs,
        "dump_spectra": cfg.dump_spectra,
        "output_dir": cfg.output_dir,
        "boundary_window": (list(cfg.boundary_window)
                            if cfg.boundary_window is not None else None),
        "boundary_resolution": cfg.boundary_resolution,
    }


def apply_overrides(cfg: ExperimentConfig, overrides) -> ExperimentConfig:
    """Apply "dotted.key=value" strings on top of a loaded config.

    Supported keys: trials, master_seed, window_rho, pair_r_max,
    pair_bins, jobs, dump_spectra, output_dir, N_list (comma separated),
    z0.re, z0.im.
    """
    scalar_casts = {
        "trials": int, "master_seed": int, "jobs": int, "pair_bins": int,
        "window_rho": float, "pair_r_max": float,
        "boundary_resolution": float,
        "output_dir": str,
    }
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, _, raw = item.partition("=")
        key = key.strip()
        raw = raw.strip()
        try:
            if key in scalar_casts:
                cfg = replace(cfg, **{key: scalar_casts[key](raw)})
            elif key == "dump_spectra":
                cfg = replace(cfg, dump_spectra=raw.lower() in ("1", "true", "yes"))
            elif key == "N_list":
                cfg = replace(cfg, N_list=tuple(int(v) for v in raw.split(",") if v))
            elif key == "z0.re":
                cfg = replace(cfg, z0=complex(float(raw), cfg.z0.imag))
            elif key == "z0.im":
                cfg = replace(cfg, z0=complex(cfg.z0.real, float(raw)))
            else:
                raise ConfigError(f"unknown override key {key!r}")
        except ValueError as exc:
            raise ConfigError(f"bad value in override {item!r}: {exc}") from exc
    return cfg


def load_config(path, overrides=()) -> ExperimentConfig:
    """Read a JSON config file and apply overrides (not yet validated)."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return apply_overrides(config_from_json_dict(data), overrides)


def validate_config(cfg: ExperimentConfig) -> ExperimentConfig:
    """Check campaign-level constraints beyond spec validity."""
    validate_spec(cfg.spec)
    if cfg.spec.R0 < MIN_PADDING:
        raise ConfigError(
            f"campaign specs need zero padding R0 >= {MIN_PADDING}, got {cfg.spec.R0}")
    if not cfg.N_list:
        raise ConfigError("N_list must contain at least one matrix size")
    for N in cfg.N_list:
        block_multiplicities(cfg.spec, N)   # raises DimensionError if too small
    if cfg.trials < 1:
        raise ConfigError(f"trials must be >= 1, got {cfg.trials}")
    if cfg.master_seed < 0:
        raise ConfigError(f"master_seed must be >= 0, got {cfg.master_seed}")
    if not (cfg.window_rho > 0 and math.isfinite(cfg.window_rho)):
        raise ConfigError(f"window_rho must be positive, got {cfg.window_rho}")
    if not (0 < cfg.pair_r_max <= 0.5 * cfg.window_rho):
        raise ConfigError(
            f"pair_r_max must be in (0, window_rho/2], got {cfg.pair_r_max}")
    if cfg.pair_bins < 4:
        raise ConfigError(f"pair_bins must be >= 4, got {cfg.pair_bins}")
    if cfg.jobs < 1:
        raise ConfigError(f"jobs must be >= 1, got {cfg.jobs}")
    if not (math.isfinite(cfg.z0.real) and math.isfinite(cfg.z0.imag)):
        raise ConfigError(f"z0 must be finite, got {cfg.z0}")
    if cfg.boundary_window is not None:
        if len(cfg.boundary_window) != 4:
            raise ConfigError("boundary_window must be [xmin, xmax, ymin, ymax]")
        if not (cfg.boundary_resolution > 0):
            raise ConfigError("boundary_resolution must be positive")
    return cfg


def resolve_output_dir(cfg: ExperimentConfig) -> str:
    """Config value, else the GINLAB_OUTPUT_DIR environment, else cwd."""
    return cfg.output_dir or os.environ.get("GINLAB_OUTPUT_DIR") or os.getcwd()


def canonical_json(obj) -> str:
    """Deterministic JSON text (sorted keys, fixed separators)."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def load_schema(name: str) -> dict:
    """Packaged JSON schema describing one artifact kind.

    Available names: "campaign_manifest", "run_report",
    "verification_report".
    """
    ref = resources.files("ginlab") / "schemas" / f"{name}.schema.json"
    try:
        return json.loads(ref.read_text())
    except FileNotFoundError as exc:
        raise MissingArtifactError(f"no packaged schema named {name!r}") from exc


def config_hash(cfg: ExperimentConfig) -> str:
    """sha256 of the canonical config JSON, minus output routing."""
    d = config_to_json_dict(cfg)
    d.pop("output_dir")
    d.pop("jobs")          # worker count must not change results
    return hashlib.sha256(canonical_json(d).encode()).hexdigest()
