"""Command-line front end: ``sskdyn <command> [--config PATH] [flags]``.

Flags override the JSON config, which overrides the defaults. Every
command writes plain CSV/JSON artifacts; plotting is left to other tools.
"""

import argparse
import json
import math
import os
import sys
from functools import partial
from pathlib import Path

import numpy as np

from . import io, rng
from ._parallel import pmap
from .chsck import ChsckParams, equilibrium_limits, limit_values, solve_volterra
from .config import COMMANDS, DEFAULTS, ExperimentConfig, normalize, parse
from .ensembles import WignerSpec, moment_audit, sample_wigner
from .errors import ConfigError, SskdynError
from .hitting import fit_scaling, hitting_records, scaling_experiment
from .langevin import LangevinParams, ensemble_mean, simulate_diagonal, simulate_full, simulate_semicircle
from .semicircle_fn import bessel_i, charfn_semicircle, dmgf_semicircle, mgf_semicircle
from .spectral import eig_sym

EXIT_IO = 6
EXIT_USAGE = 7


def _wigner(p, seed):
    return WignerSpec(N=p["N"], entry_law=p["entry_law"], diagonal_variance=p["diagonal_variance"], seed=seed)


def _prepare_file(path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _prepare_dir(path):
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _run_sample(cfg):
    p = cfg.parameters
    spec = _wigner(p, cfg.seed)
    J = sample_wigner(spec)
    out = _prepare_file(cfg.output_path)
    if out.suffix == ".csv":
        io.write_matrix_csv(out, J)
    else:
        io.write_wigm(out, J)
    audit = moment_audit(J, spec)
    audit_path = out.with_name(out.name + ".audit.json")
    io.write_json(audit_path, {k: getattr(audit, k) for k in audit.__dataclass_fields__})
    return [out, audit_path]


def _run_spectrum(cfg):
    p = cfg.parameters
    J = sample_wigner(_wigner(p, cfg.seed))
    sp = eig_sym(J, p["tol_eig"], p["tol_orth"])
    out = _prepare_file(cfg.output_path)
    io.write_spectrum_csv(out, sp.eigenvalues)
    written = [out]
    if p["vectors"]:
        vpath = out.with_name(out.stem + ".vectors.wigm")
        io.write_wigm(vpath, sp.eigenvectors)
        written.append(vpath)
    return written


def _run_specialfn(cfg):
    p = cfg.parameters
    xs = np.linspace(p["x_min"], p["x_max"], p["points"])
    cols = {
        "x": xs,
        "I0": [bessel_i(0, x) for x in xs],
        "I1": [bessel_i(1, x) for x in xs],
        "I2": [bessel_i(2, x) for x in xs],
        "mgf": [mgf_semicircle(x) for x in xs],
        "dmgf": [dmgf_semicircle(x) for x in xs],
        "charfn": [charfn_semicircle(x) for x in xs],
    }
    out = _prepare_file(cfg.output_path)
    io.write_columns(out, cols)
    return [out]


def _run_chsck(cfg):
    p = cfg.parameters
    sol = solve_volterra(ChsckParams(p["c"], p["beta"], p["T"], p["dt"]))
    s = slice(None, None, p["stride"])
    out = _prepare_file(cfg.output_path)
    io.write_columns(out, {"t": sol.grid[s], "K": sol.Kdiag[s], "H": sol.H[s], "logRtilde": sol.logRtilde[s]})
    return [out]


def beta_grid(lo, hi, step):
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 12) for i in range(n)]


def _run_limits(cfg):
    p = cfg.parameters
    rows = []
    for b in beta_grid(p["beta_min"], p["beta_max"], p["beta_step"]):
        lv = limit_values(p["c"], b)
        eq = equilibrium_limits(p["c"], b)
        rows.append((b, lv.H_inf, lv.HK_ratio_inf, eq.H_inf, eq.HK_ratio_inf))
    out = _prepare_file(cfg.output_path)
    io.write_csv(out, ["beta", "H_inf", "HK_ratio_inf", "H_inf_equilibrium", "HK_ratio_inf_equilibrium"], rows)
    return [out]


def _langevin_run(p, J, rotation, sigmas, seed):
    lp = LangevinParams(N=p["N"], beta=p["beta"], c=p["c"], dt=p["dt"], T=p["T"], seed=seed, mode=p["mode"])
    if p["sigma_source"] == "semicircle":
        return simulate_semicircle(lp)
    if p["mode"] == "full":
        return simulate_full(J, lp)
    return simulate_diagonal(lp, sigmas, rotation=rotation)


def _run_langevin(cfg):
    p = cfg.parameters
    J = rotation = sigmas = None
    if p["sigma_source"] == "matrix":
        J = sample_wigner(WignerSpec(N=p["N"], seed=rng.derive_seed(cfg.seed, 2)))
        sp = eig_sym(J)
        sigmas, rotation = sp.eigenvalues, sp.eigenvectors.T
    seeds = [(cfg.seed + r) & rng.U64_MASK for r in range(p["runs"])]
    runs = pmap(partial(_langevin_run, p, J, rotation, sigmas), seeds, cfg.workers)
    outdir = _prepare_dir(cfg.output_path)
    s = slice(None, None, p["stride"])
    written = []
    for run in runs:
        path = outdir / f"run_{run.seed}.csv"
        io.write_columns(path, {"t": run.grid[s], "K_N": run.K_N[s], "H_N": run.H_N[s]})
        written.append(path)
    em = ensemble_mean(runs)
    cols = {"t": em.grid, "K_mean": em.K_mean, "K_se": em.K_se, "H_mean": em.H_mean, "H_se": em.H_se}
    cp = ChsckParams(p["c"], p["beta"], p["T"], p["dt"])
    if not cp.violations():
        sol = solve_volterra(cp)
        if sol.grid.shape == em.grid.shape:
            cols["K_limit"] = sol.Kdiag
            cols["H_limit"] = sol.H
    agg = outdir / "aggregate.csv"
    io.write_columns(agg, {k: np.asarray(v)[s] for k, v in cols.items()})
    written.append(agg)
    return written


def _records_csv(path, records):
    header = ["N", "trial", "epsilon", "T_eps", "lower", "upper", "initial_overlap", "gap"]
    rows = [(r.N, r.trial, r.epsilon, r.T_eps, r.lower_bound, r.upper_bound, r.initial_overlap, r.gap) for r in records]
    io.write_csv(path, header, rows)


def _fit_dict(fit):
    return {k: getattr(fit, k) for k in fit.__dataclass_fields__}


def _sandwich_violations(records):
    return sum(1 for r in records if not r.lower_bound <= r.T_eps <= r.upper_bound)


def _run_hit(cfg):
    p = cfg.parameters
    records, failures = hitting_records(p["Ns"], p["trials"], p["epsilon"], p["algorithm"], cfg.seed, p["k"], cfg.workers)
    summary = {
        "algorithm": p["algorithm"],
        "epsilon": p["epsilon"],
        "records": len(records),
        "failures": len(failures),
        "sandwich_violations": _sandwich_violations(records),
    }
    try:
        summary["fit"] = _fit_dict(fit_scaling(records, p["algorithm"], p["epsilon"], p["trials"], len(failures)))
    except SskdynError as exc:
        summary["fit"] = None
        summary["fit_error"] = str(exc)
    outdir = _prepare_dir(cfg.output_path)
    _records_csv(outdir / "records.csv", records)
    io.write_json(outdir / "summary.json", summary)
    return [outdir / "records.csv", outdir / "summary.json"]


def _run_scaling(cfg):
    p = cfg.parameters
    fit, records = scaling_experiment(p["Ns"], p["trials"], p["epsilon"], p["algorithm"], cfg.seed, cfg.workers, p["k"])
    outdir = _prepare_dir(cfg.output_path)
    _records_csv(outdir / "records.csv", records)
    summary = {"fit": _fit_dict(fit), "sandwich_violations": _sandwich_violations(records)}
    io.write_json(outdir / "summary.json", summary)
    return [outdir / "records.csv", outdir / "summary.json"]


RUNNERS = {
    "sample": _run_sample,
    "spectrum": _run_spectrum,
    "specialfn": _run_specialfn,
    "chsck": _run_chsck,
    "limits": _run_limits,
    "langevin": _run_langevin,
    "hit": _run_hit,
    "scaling": _run_scaling,
}


def run(cfg: ExperimentConfig):
    """Execute a validated config; returns the list of artifact paths."""
    if cfg.command not in RUNNERS:
        raise ConfigError(f"unknown command {cfg.command!r}")
    return RUNNERS[cfg.command](cfg)


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _flag_type(default):
    if isinstance(default, bool):
        return None
    if isinstance(default, int):
        return int
    if isinstance(default, list):
        return _int_list
    if isinstance(default, str):
        return str
    return float


def build_parser():
    parser = _Parser(prog="sskdyn", description="Spherical SK dynamics experiments.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True
    for cmd in COMMANDS:
        sp = sub.add_parser(cmd, help=f"run the {cmd} experiment")
        sp.add_argument("--config", metavar="PATH", help="JSON config file")
        sp.add_argument("--seed", type=int, default=argparse.SUPPRESS)
        sp.add_argument("--out", dest="output_path", metavar="PATH", default=argparse.SUPPRESS)
        sp.add_argument("--workers", type=int, default=argparse.SUPPRESS)
        sp.add_argument("--print-config", action="store_true", help="echo the normalized config and exit")
        for key, default in DEFAULTS[cmd].items():
            names = [f"--{key}"]
            if "_" in key:
                names.append(f"--{key.replace('_', '-')}")
            if isinstance(default, bool):
                sp.add_argument(*names, dest=f"p_{key}", action=argparse.BooleanOptionalAction, default=argparse.SUPPRESS)
            else:
                sp.add_argument(*names, dest=f"p_{key}", type=_flag_type(default), default=argparse.SUPPRESS)
    return parser


def config_from_args(args) -> ExperimentConfig:
    ns = vars(args)
    if ns.get("config"):
        doc = parse(Path(ns["config"]).read_text())
        if doc.get("command", args.command) != args.command:
            raise ConfigError(f"config file is for {doc.get('command')!r}, not {args.command!r}", [("command", "mismatch")])
    else:
        doc = {}
    doc["command"] = args.command
    params = doc.get("parameters")
    params = dict(params) if isinstance(params, dict) else ({} if params is None else params)
    if not isinstance(params, dict):
        raise ConfigError("parameters must be an object", [("parameters", "parameters must be an object")])
    for key, value in ns.items():
        if key.startswith("p_"):
            params[key[2:]] = value
        elif key in ("seed", "output_path", "workers"):
            doc[key] = value
    doc["parameters"] = params
    return normalize(doc)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.print_config:
            print(json.dumps(cfg.to_dict(), indent=2, sort_keys=True))
            return 0
        written = run(cfg)
    except SskdynError as exc:
        print(f"sskdyn: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"sskdyn: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    for path in written:
        print(os.fspath(path))
    return 0


if __name__ == "__main__":
    sys.exit(main())
