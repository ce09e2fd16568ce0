"""Command-line driver.

Exit codes: 0 success, 2 configuration error, 3 tail-bound or tolerance failure.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from .bargmann import DEFAULT_C_TILDE, DEFAULT_TAIL_EPS, feasible_abs_w
from .errors import ConfigError, TailBoundError, WilsonLabError
from .estimator import auto_workspace, positivity_probe, potential, wilson_mc
from .functionals import make_wgrid
from .lie import (build_basis, casimir, casimir_formula, jacobi_residual, standard_rep,
                  structure_constants)
from .records import RunRecord, append_jsonl, csv_text, write_csv
from .selftest import run_selftest
from .surface import RectSurface, area, nu_norm_closed_form, nu_norm_kernel, nu_norm_limit

COMMANDS = ("algebra", "area", "nu-norm", "wilson", "sweep", "potential", "probe", "selftest")
EXIT_OK, EXIT_CONFIG, EXIT_TOLERANCE = 0, 2, 3


def float_list(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"expected a comma-separated list of numbers, got {text!r}") from None


def degree_value(text):
    if str(text) == "auto":
        return "auto"
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"degree must be 'auto' or an integer, got {text!r}") from None


@dataclass
class RunConfig:
    command: str
    group: str = "su"
    n: int = 2
    kappa: list = field(default_factory=lambda: [4.0])
    a: tuple = (0.5, 0.0, 0.0)
    t: float = 0.5
    degree: object = "auto"
    tail_eps: float = DEFAULT_TAIL_EPS
    samples: int = 10_000
    w_nodes: int = 512
    seed: int = 0
    c_tilde: float = DEFAULT_C_TILDE
    r: list = field(default_factory=lambda: [0.0, 1.0, 2.0, 3.0])
    out: str | None = None
    csv: str | None = None
    format: str = "csv"

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.group not in ("su", "so"):
            raise ConfigError(f"--group must be 'su' or 'so', got {self.group!r}")
        if not self.kappa or any(not k > 0 for k in self.kappa):
            raise ConfigError("--kappa values must be positive")
        if any(b <= a for a, b in zip(self.kappa, self.kappa[1:])):
            raise ConfigError(f"--kappa list must be strictly increasing, got {self.kappa}")
        if not math.hypot(*self.a) > 0:
            raise ConfigError("spatial edge (--ax, --ay, --az) must be non-zero")
        if not self.t > 0:
            raise ConfigError("--t must be positive")
        if self.degree != "auto" and self.degree < 1:
            raise ConfigError("--degree must be 'auto' or >= 1")
        for name in ("tail_eps", "samples", "w_nodes", "c_tilde"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"--{name.replace('_', '-')} must be positive")
        if self.samples < 2:
            raise ConfigError("--samples must be at least 2")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("--seed must be a 64-bit unsigned integer")
        if any(x < 0 for x in self.r):
            raise ConfigError("--r values must be non-negative")
        if self.format not in ("csv", "jsonl"):
            raise ConfigError("--format must be csv or jsonl")

    @property
    def surface(self) -> RectSurface:
        return RectSurface(tuple(self.a), self.t)


CONVERTERS = {
    "group": str, "n": int, "kappa": float_list, "ax": float, "ay": float, "az": float,
    "t": float, "degree": degree_value, "tail_eps": float, "samples": int, "w_nodes": int,
    "seed": int, "c_tilde": float, "r": float_list, "out": str, "csv": str, "format": str,
}


def read_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment."""
    out = {}
    try:
        fh = open(path)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from None
    with fh:
        for num, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{num}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in CONVERTERS:
                raise ConfigError(f"{path}:{num}: unknown key {key!r}")
            try:
                out[key] = CONVERTERS[key](val)
            except ValueError:
                raise ConfigError(f"{path}:{num}: bad value for {key}: {val!r}") from None
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wilson-lab", description="Wilson-loop experiments on a truncated Fock space.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="key=value file; command-line flags take precedence")
    p.add_argument("--group", choices=("su", "so"))
    p.add_argument("--n", type=int, help="matrix size of the group")
    p.add_argument("--kappa", type=float_list, help="comma-separated, strictly increasing")
    p.add_argument("--ax", type=float)
    p.add_argument("--ay", type=float)
    p.add_argument("--az", type=float)
    p.add_argument("--t", type=float, help="temporal edge T")
    p.add_argument("--degree", type=degree_value, help="truncation degree or 'auto'")
    p.add_argument("--tail-eps", dest="tail_eps", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--w-nodes", dest="w_nodes", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--c-tilde", dest="c_tilde", type=float)
    p.add_argument("--r", type=float_list, help="comma-separated R values for `potential`")
    p.add_argument("--out", help="append the JSON-lines run record here")
    p.add_argument("--csv", help="write the result table here")
    p.add_argument("--format", choices=("csv", "jsonl"), help="what to print on stdout")
    return p


def make_config(ns: argparse.Namespace) -> RunConfig:
    vals = read_config_file(ns.config) if ns.config else {}
    for key in CONVERTERS:
        v = getattr(ns, key, None)
        if v is not None:
            vals[key] = v
    cfg = RunConfig(command=ns.command)
    a = list(cfg.a)
    for i, key in enumerate(("ax", "ay", "az")):
        if key in vals:
            a[i] = vals.pop(key)
    cfg.a = tuple(float(x) for x in a)
    for key, v in vals.items():
        setattr(cfg, key, v)
    cfg.validate()
    return cfg


# ------------------------------------------------------------------ commands


def cmd_algebra(cfg: RunConfig):
    basis = build_basis(cfg.group, cfg.n)
    cas = casimir(standard_rep(basis)).matrix
    expected = casimir_formula(cfg.group, cfg.n)
    c = structure_constants(basis)
    row = {
        "group": cfg.group, "n": cfg.n, "dim_g": basis.dim_g, "casimir": expected,
        "casimir_max_dev": float(np.max(np.abs(cas - expected * np.eye(cfg.n)))),
        "jacobi_residual": jacobi_residual(c),
        "orthonormality_dev": float(np.max(np.abs(basis.gram() - np.eye(basis.dim_g)))),
    }
    return [row], {}


def cmd_area(cfg: RunConfig):
    s = cfg.surface
    return [{"ax": s.a[0], "ay": s.a[1], "az": s.a[2], "T": s.T, "area": area(s)}], {}


def cmd_nu_norm(cfg: RunConfig):
    s = cfg.surface
    limit = nu_norm_limit(s, cfg.c_tilde)
    rows = []
    for k in cfg.kappa:
        val = nu_norm_kernel(s, k, c_tilde=cfg.c_tilde)
        rows.append({
            "kappa": k, "nu_norm_kernel": val, "closed_form": nu_norm_closed_form(s, k, cfg.c_tilde),
            "limit": limit, "relative_deviation": (limit - val) / limit,
        })
    return rows, {}


def _estimate_rows(cfg: RunConfig, kappas):
    basis = build_basis(cfg.group, cfg.n)
    rep, sc = standard_rep(basis), structure_constants(basis)
    grid = make_wgrid(cfg.w_nodes, cfg.seed)
    rows, diags = [], {}
    for k in kappas:
        ws = auto_workspace(cfg.surface, k, cfg.degree, cfg.tail_eps, cfg.c_tilde)
        res = wilson_mc(cfg.surface, k, rep, sc, cfg.samples, grid, cfg.seed,
                        workspace=ws, tail_eps=cfg.tail_eps)
        rows.append({
            "kappa": k,
            "estimate": res.trace_estimate.real,
            "std_error": res.std_error,
            "paper_closed_form": res.paper_closed_form,
            "oracle": res.oracle_value,
            "area": res.area,
            "estimate_imag": res.trace_estimate.imag,
            "unweighted_estimate": res.free_field_estimate.real,
            "unweighted_std_error": res.free_field_std_error,
            "v_measured": res.v_measured,
            "v_kernel": res.v_kernel,
            "oracle_minus_paper": res.oracle_minus_paper,
            "mean_density": res.mean_density,
            "mean_density_se": res.mean_density_se,
            "degree": res.diagnostics["degree"],
        })
        diags[f"kappa={k:g}"] = res.diagnostics
    return rows, diags


def cmd_wilson(cfg: RunConfig):
    return _estimate_rows(cfg, cfg.kappa[:1])


def cmd_sweep(cfg: RunConfig):
    return _estimate_rows(cfg, cfg.kappa)


def cmd_potential(cfg: RunConfig):
    table = potential(cfg.group, cfg.n, cfg.r)
    rows = [{"group": cfg.group, "n": cfg.n, "R": r, "V": v} for r, v in table.rows]
    return rows, {"slope": table.slope, "fit_residual": table.fit_residual,
                  "log_ratio_residual": table.log_ratio_residual, "casimir": table.casimir}


def cmd_probe(cfg: RunConfig):
    basis = build_basis(cfg.group, cfg.n)
    rep, sc = standard_rep(basis), structure_constants(basis)
    grid = make_wgrid(cfg.w_nodes, cfg.seed)
    rows, diags = [], {}
    for k in cfg.kappa:
        ws = auto_workspace(cfg.surface, k, cfg.degree, cfg.tail_eps, cfg.c_tilde)
        pr = positivity_probe(cfg.surface, k, rep, sc, cfg.samples, grid, cfg.seed,
                              workspace=ws, tail_eps=cfg.tail_eps)
        rows.append({
            "kappa": k, "min_eigenvalue": pr.min_eigenvalue, "min_eigenvalue_se": pr.min_eigenvalue_se,
            "magnitude": pr.magnitude, "magnitude_se": pr.magnitude_se,
            "fourth_moment": pr.fourth_moment, "fourth_moment_se": pr.fourth_moment_se,
        })
        diags[f"kappa={k:g}"] = pr.diagnostics
    return rows, diags


def cmd_selftest(cfg: RunConfig):
    rows = run_selftest()
    failed = [r["check"] for r in rows if not r["passed"]]
    return rows, {"failed": failed}


HANDLERS = {
    "algebra": cmd_algebra, "area": cmd_area, "nu-norm": cmd_nu_norm, "wilson": cmd_wilson,
    "sweep": cmd_sweep, "potential": cmd_potential, "probe": cmd_probe, "selftest": cmd_selftest,
}


def run(cfg: RunConfig) -> RunRecord:
    rows, diags = HANDLERS[cfg.command](cfg)
    return RunRecord(command=cfg.command, config=asdict(cfg), results=rows, diagnostics=diags)


def tail_hint(cfg: RunConfig, exc: TailBoundError) -> str:
    s = cfg.surface
    sig = s.max_abs_sigma()
    d = 30 if cfg.degree == "auto" else cfg.degree
    r = feasible_abs_w(d, cfg.tail_eps, cfg.c_tilde)
    return (f"{exc}\nfeasible combination: degree {d} supports kappa <= {2 * r / sig:.4g} "
            f"at |a| = {s.a_norm:g}, T = {s.T:g}; or shrink the surface to max|sigma| <= "
            f"{2 * r / max(cfg.kappa):.4g} at kappa = {max(cfg.kappa):g}")


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = make_config(ns)
        record = run(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TailBoundError as exc:
        print(f"tail bound: {tail_hint(cfg, exc)}", file=sys.stderr)
        return EXIT_TOLERANCE
    except WilsonLabError as exc:
        print(f"tolerance failure: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE

    if cfg.out:
        append_jsonl(cfg.out, record)
    if cfg.csv:
        write_csv(cfg.csv, record.results)
    if cfg.format == "jsonl":
        print(record.to_json())
    else:
        sys.stdout.write(csv_text(record.results))
    if cfg.command == "selftest" and record.diagnostics["failed"]:
        print("selftest failed: " + ", ".join(record.diagnostics["failed"]), file=sys.stderr)
        return EXIT_TOLERANCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
