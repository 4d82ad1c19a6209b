"""Experiment configuration: defaults, JSON parsing, validation.

A config is one JSON document::

    {"command": "chsck", "parameters": {"beta": 0.3}, "seed": 0,
     "output_path": "chsck.csv", "workers": 1}

Missing parameters take the command defaults; every range violation is
collected and reported together with its field path.
"""

import json
import os
from dataclasses import dataclass, field

from .chsck import ChsckParams
from .ensembles import LAWS
from .errors import ConfigError
from .langevin import LangevinParams
from .rng import U64_MASK

DEFAULTS = {
    "sample": {"N": 100, "entry_law": "gaussian-orthogonal", "diagonal_variance": None},
    "spectrum": {
        "N": 100,
        "entry_law": "gaussian-orthogonal",
        "diagonal_variance": None,
        "tol_eig": 1e-10,
        "tol_orth": 1e-10,
        "vectors": False,
    },
    "specialfn": {"x_min": 0.0, "x_max": 10.0, "points": 101},
    "chsck": {"c": 1.0, "beta": 0.5, "T": 10.0, "dt": 1e-3, "stride": 1},
    "limits": {"c": 1.0, "beta_min": 0.05, "beta_max": 0.60, "beta_step": 0.05},
    "langevin": {
        "N": 1000,
        "c": 1.0,
        "beta": 0.5,
        "dt": 1e-3,
        "T": 5.0,
        "runs": 8,
        "mode": "diagonal",
        "sigma_source": "semicircle",
        "stride": 1,
    },
    "hit": {"Ns": [200], "trials": 20, "epsilon": 0.5, "algorithm": "gd", "k": 5},
    "scaling": {"Ns": [250, 500, 1000, 2000], "trials": 20, "epsilon": 0.5, "algorithm": "gd", "k": 5},
}

DEFAULT_OUTPUT = {
    "sample": "matrix.wigm",
    "spectrum": "spectrum.csv",
    "specialfn": "specialfn.csv",
    "chsck": "chsck.csv",
    "limits": "limits.csv",
    "langevin": "langevin_out",
    "hit": "hit_out",
    "scaling": "scaling_out",
}

COMMANDS = tuple(DEFAULTS)


@dataclass
class ExperimentConfig:
    command: str
    parameters: dict = field(default_factory=dict)
    output_path: str = ""
    seed: int = 0
    workers: int = 1

    def to_dict(self):
        return {
            "command": self.command,
            "parameters": dict(self.parameters),
            "output_path": self.output_path,
            "seed": self.seed,
            "workers": self.workers,
        }


def serialize(cfg: ExperimentConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True)


def default_workers() -> int:
    env = os.environ.get("SSKDYN_WORKERS")
    if env is None:
        return 1
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"SSKDYN_WORKERS must be an integer, got {env!r}")


def parse(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return doc


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _is_num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _coerce(params, defaults, errors):
    out = {}
    for key, value in params.items():
        path = f"parameters.{key}"
        if key not in defaults:
            errors.append((path, f"unknown parameter {key!r}"))
            continue
        d = defaults[key]
        if isinstance(d, bool):
            if not isinstance(value, bool):
                errors.append((path, f"{key} must be true or false"))
                continue
        elif isinstance(d, int):
            if not (_is_int(value) or (isinstance(value, float) and value.is_integer())):
                errors.append((path, f"{key} must be an integer"))
                continue
            value = int(value)
        elif isinstance(d, float) or (d is None and key == "diagonal_variance"):
            if value is not None and not _is_num(value):
                errors.append((path, f"{key} must be a number"))
                continue
            value = None if value is None else float(value)
        elif isinstance(d, list):
            if not isinstance(value, list) or not all(_is_int(v) for v in value):
                errors.append((path, f"{key} must be a list of integers"))
                continue
            value = [int(v) for v in value]
        elif isinstance(d, str):
            if not isinstance(value, str):
                errors.append((path, f"{key} must be a string"))
                continue
        out[key] = value
    merged = dict(defaults)
    merged.update(out)
    return merged


def _range_checks(command, p, errors):
    def bad(key, msg):
        errors.append((f"parameters.{key}", msg))

    if command in ("sample", "spectrum"):
        if p["N"] < 1:
            bad("N", "N must be a positive integer")
        if p["entry_law"] not in LAWS:
            bad("entry_law", f"entry_law must be one of {list(LAWS)}")
        if p["diagonal_variance"] is not None and not p["diagonal_variance"] > 0:
            bad("diagonal_variance", "diagonal_variance must be positive")
    if command == "spectrum":
        for key in ("tol_eig", "tol_orth"):
            if not p[key] > 0:
                bad(key, f"{key} must be positive")
    elif command == "specialfn":
        if p["x_min"] < 0:
            bad("x_min", "x_min must be non-negative")
        if not p["x_max"] > p["x_min"]:
            bad("x_max", "x_max must exceed x_min")
        if p["x_max"] > 300:
            bad("x_max", "x_max must be at most 300 (I_n(2x) overflows beyond)")
        if p["points"] < 2:
            bad("points", "points must be at least 2")
    elif command == "chsck":
        for key, msg in ChsckParams(p["c"], p["beta"], p["T"], p["dt"]).violations():
            bad(key, msg)
        if p["stride"] < 1:
            bad("stride", "stride must be at least 1")
    elif command == "limits":
        if not p["c"] > 0:
            bad("c", "c must be positive")
        if not p["beta_min"] > 0:
            bad("beta_min", "beta_min must be positive")
        if not p["beta_max"] >= p["beta_min"]:
            bad("beta_max", "beta_max must be >= beta_min")
        if not p["beta_step"] > 0:
            bad("beta_step", "beta_step must be positive")
    elif command == "langevin":
        lp = LangevinParams(N=p["N"], beta=p["beta"], c=p["c"], dt=p["dt"], T=p["T"], mode=p["mode"])
        for key, msg in lp.violations():
            bad(key, msg)
        if p["runs"] < 1:
            bad("runs", "runs must be at least 1")
        if p["sigma_source"] not in ("semicircle", "matrix"):
            bad("sigma_source", "sigma_source must be 'semicircle' or 'matrix'")
        if p["mode"] == "full" and p["sigma_source"] != "matrix":
            bad("mode", "mode 'full' requires sigma_source 'matrix'")
        if p["stride"] < 1:
            bad("stride", "stride must be at least 1")
    elif command in ("hit", "scaling"):
        Ns = p["Ns"]
        floor = 100 if command == "scaling" else 2
        if not Ns:
            bad("Ns", "Ns must not be empty")
        elif any(n < floor for n in Ns):
            bad("Ns", f"every N must be at least {floor}")
        if command == "scaling" and len(set(Ns)) < 2:
            bad("Ns", "a scaling fit needs at least two distinct N")
        tmin = 10 if command == "scaling" else 1
        if p["trials"] < tmin:
            bad("trials", f"trials must be at least {tmin}")
        if not 0 < p["epsilon"] < 1:
            bad("epsilon", "epsilon must lie in (0, 1)")
        if p["algorithm"] not in ("gd", "power"):
            bad("algorithm", "algorithm must be 'gd' or 'power'")
        if p["k"] < 2 or (Ns and p["k"] > min(Ns)):
            bad("k", "k must lie in [2, min(Ns)]")


def normalize(doc: dict) -> ExperimentConfig:
    """Validate a parsed document; raise ConfigError listing every violation."""
    errors = []
    command = doc.get("command")
    if command not in DEFAULTS:
        raise ConfigError(f"unknown command {command!r}; expected one of {list(COMMANDS)}", [("command", "unknown command")])
    for key in doc:
        if key not in ("command", "parameters", "output_path", "seed", "workers"):
            errors.append((key, f"unknown field {key!r}"))
    params = doc.get("parameters") or {}
    if not isinstance(params, dict):
        errors.append(("parameters", "parameters must be an object"))
        params = {}
    merged = _coerce(params, DEFAULTS[command], errors)
    seed = doc.get("seed", 0)
    if not _is_int(seed) or not 0 <= seed <= U64_MASK:
        errors.append(("seed", "seed must be a 64-bit unsigned integer"))
    workers = doc.get("workers")
    if workers is None:
        workers = default_workers()
    if not _is_int(workers) or workers < 1:
        errors.append(("workers", "workers must be a positive integer"))
    out = doc.get("output_path") or DEFAULT_OUTPUT[command]
    if not isinstance(out, str):
        errors.append(("output_path", "output_path must be a string"))
    if not any(path.startswith("parameters.") for path, _ in errors):
        _range_checks(command, merged, errors)
    if command == "sample" and isinstance(out, str) and out.endswith(".csv") and merged["N"] > 100:
        errors.append(("output_path", "CSV matrix export needs N <= 100; use a .wigm path"))
    if errors:
        lines = "; ".join(f"{p}: {m}" for p, m in errors)
        raise ConfigError(f"invalid config: {lines}", errors)
    return ExperimentConfig(command, merged, out, int(seed), int(workers))


def validate(text: str) -> ExperimentConfig:
    """Parse and validate a JSON config document."""
    return normalize(parse(text))
