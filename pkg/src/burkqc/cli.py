"""Command-line front end: run one experiment, write a CSV body and a manifest.

Exit codes: 0 all assertions passed, 1 an assertion failed, 2 usage error,
3 input/output or data error.
"""
from __future__ import annotations

import argparse
import math
import os
import platform
import re
import sys
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from . import __version__, kernels
from .algebra import IDENTITY, Mat2, from_real
from .beltrami import (NonConvergedError, area_residual, constant_mu, default_workers, grid_problem,
                       iteration_bound, radial_alpha_mu, random_smooth_mu, read_grid, solve_principal,
                       write_grid)
from .convexity import (alpha_profile, baker_ericksen_check, broken_power_profile, example_certificate,
                        exp_profile, minors_certificate_check, power_profile, radial_jensen_gap,
                        radial_mean, random_certificate, random_nonexpanding_profile, rank_one_scan,
                        split_decompose, tilted_power_profile)
from .functionals import evaluate, format_functional, p_of_K, parse_functional
from .inequalities import (AREA_COLUMNS, FAIL, burkholder_area_check, f_area_check, llogl_check,
                           w_area_check, weighted_burkholder_check)
from .ledger import csv_text, git_hash, manifest_text, parse_cell, parse_key_values, read_rows

EXIT_OK, EXIT_ASSERT, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


# ----------------------------------------------------------- value parsers

_ANGLE = re.compile(r"^([-+]?[0-9.]*)\*?pi(?:/([0-9.]+))?$")


def parse_real(s: str) -> float:
    """A float, or a multiple of pi such as 'pi/3' or '2*pi/3'."""
    s = s.strip()
    m = _ANGLE.match(s)
    if m:
        num = m.group(1)
        c = float(num) if num not in ("", "+", "-") else (-1.0 if num == "-" else 1.0)
        return c * math.pi / (float(m.group(2)) if m.group(2) else 1.0)
    return float(s)


def parse_complex(s: str) -> complex:
    return complex(s.strip().replace(" ", "").replace("i", "j"))


def parse_matrix(s: str) -> Mat2:
    vals = [float(x) for x in s.split(",")]
    if len(vals) != 4:
        raise ValueError("matrix needs four comma-separated entries m11,m12,m21,m22")
    return from_real(*vals)


def parse_pair(s: str):
    a, b = (float(x) for x in s.split(","))
    return (a, b)


def parse_levels(s: str):
    return [tuple(int(v) for v in lv.split("x")) for lv in s.split(",")]


def _choice(*opts):
    def conv(s):
        if s not in opts:
            raise ValueError(f"expected one of {', '.join(opts)}")
        return s
    return conv


def _optional(conv):
    def f(s):
        return None if s in (None, "", "none") else conv(s)
    return f


def _spec_params(body: str) -> Dict[str, str]:
    out = {}
    for item in filter(None, body.split(",")):
        if "=" not in item:
            raise ValueError(f"malformed parameter {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _take(prm, name, *allowed):
    extra = set(prm) - set(allowed)
    if extra:
        raise ValueError(f"unknown parameters {sorted(extra)} for {name}")


def make_profile(text: str, seed: int = 0):
    """exp | identity | power:alpha=,lam= | alpha:alpha= | tilted:a=,b= | broken:a_in=,a_out=,r0= | random"""
    name, _, body = text.partition(":")
    prm = _spec_params(body)
    if name == "exp":
        _take(prm, name)
        return exp_profile()
    if name == "identity":
        _take(prm, name)
        return power_profile(1.0)
    if name == "power":
        _take(prm, name, "alpha", "lam")
        return power_profile(float(prm["alpha"]), float(prm.get("lam", 1.0)))
    if name == "alpha":
        _take(prm, name, "alpha")
        return alpha_profile(float(prm["alpha"]))
    if name == "tilted":
        _take(prm, name, "a", "b")
        return tilted_power_profile(float(prm["a"]), float(prm["b"]))
    if name == "broken":
        _take(prm, name, "a_in", "a_out", "r0")
        return broken_power_profile(float(prm["a_in"]), float(prm["a_out"]), float(prm["r0"]))
    if name == "random":
        _take(prm, name)
        return random_nonexpanding_profile(np.random.default_rng(seed))
    raise ValueError(f"unknown profile {text!r}")


def make_problem(text: str, N: int, L: float, seed: int = 0):
    """const:a=,arg= | radial:alpha= | random:sup=,phase= | zero | file:PATH"""
    name, _, body = text.partition(":")
    if name == "file":
        try:
            samples, Lf = read_grid(body)
        except (OSError, ValueError) as exc:
            raise DataError(f"cannot read grid {body!r}: {exc}") from exc
        try:
            return grid_problem(samples, Lf)
        except ValueError as exc:
            raise DataError(f"grid {body!r}: {exc}") from exc
    prm = _spec_params(body)
    if name == "zero":
        _take(prm, name)
        return constant_mu(0.0, N, L)
    if name == "const":
        _take(prm, name, "a", "arg")
        a = parse_complex(prm["a"])
        if "arg" in prm:
            a = abs(a) * complex(math.cos(parse_real(prm["arg"])), math.sin(parse_real(prm["arg"])))
        return constant_mu(a, N, L)
    if name == "radial":
        _take(prm, name, "alpha")
        return radial_alpha_mu(float(prm["alpha"]), N, L)
    if name == "random":
        _take(prm, name, "sup", "phase")
        return random_smooth_mu(np.random.default_rng(seed), float(prm.get("sup", 0.5)), N, L,
                                parse_real(prm.get("phase", "0")))
    raise ValueError(f"unknown mu spec {text!r}")


def make_certificate(text: str, seed: int = 0):
    if text in ("example", "paper-ex"):
        return example_certificate()
    if text == "random":
        return random_certificate(np.random.default_rng(seed))
    raise ValueError(f"unknown certificate {text!r}")


# ------------------------------------------------------------ run results

@dataclass
class Result:
    columns: List[str]
    rows: List[list]
    passed: bool = True
    text: Optional[str] = None       # replaces the CSV body when set
    meta: Dict[str, object] = field(default_factory=dict)

    def body(self) -> str:
        return self.text if self.text is not None else csv_text(self.columns, self.rows)


SCAN_COLUMNS = ["functional", "test", "n", "min_value", "witness", "seed"]
RADIAL_COLUMNS = ["functional", "profile", "mean", "jensen_gap", "integrability_threshold", "boundary_value"]
SOLVE_COLUMNS = ["mu", "N", "L", "iterations", "residual", "status", "k", "b1", "max_b2_8",
                 "area_residual", "conformality", "check", "pass"]
SPLIT_COLUMNS = ["G", "H", "G0", "H0", "c", "verdict", "BE_ok", "min_H1", "remainder_max"]
MINORS_COLUMNS = ["functional", "certificate", "lhs", "rhs", "refuted", "linear_error", "det_error",
                  "mass_error"]


def _fmt_value(x) -> str:
    if hasattr(x, "is_inf"):
        if x.is_inf:
            return "inf"
        x = x.value
    return f"{float(x):.15g}"


def cmd_eval(P, seed):
    E = P["functional"]
    v = evaluate(E, P["matrix"])
    passed = True
    if P["expect"] is not None:
        passed = v.is_finite and abs(v.value - P["expect"]) <= P["tol"]
    return Result(["value"], [[v]], passed, text=_fmt_value(v) + "\n")


def cmd_scan(P, seed):
    E = P["functional"]
    if P["test"] == "baker-ericksen":
        rep = baker_ericksen_check(E, P["n"], seed)
    else:
        rep = rank_one_scan(E, P["sampler"], P["n"], P["h"], seed)
    ok = {"none": True, "convex": rep.min_value >= -P["tol"], "violation": rep.min_value < -P["tol"]}
    return Result(SCAN_COLUMNS, [rep.row()], ok[P["expect"]])


def cmd_radial(P, seed):
    E, prof = P["functional"], make_profile(P["profile"], seed)
    m = radial_mean(E, prof)
    gap = radial_jensen_gap(E, prof)
    passed = True
    if P["expect"] is not None:
        passed = m.is_finite and abs(m.value - P["expect"]) <= P["tol"]
    return Result(RADIAL_COLUMNS, [[format_functional(E), prof.label, m, "" if gap is None else gap,
                                    prof.integrability_threshold, prof.boundary_value]], passed)


def _oracle_ok(sol, a: complex, tol: float = 1e-3):
    Z = sol.f.points()
    inner = np.abs(Z) <= 0.8
    derr = max(np.max(np.abs(sol.f_z.samples[inner] - 1)), np.max(np.abs(sol.f_zbar.samples[inner] - a)))
    b = sol.laurent.b
    return (derr <= tol and abs(b[0] - a) <= tol and np.max(np.abs(b[1:8])) <= tol
            and sol.iterations <= iteration_bound(abs(a), sol.tol))


def cmd_solve(P, seed):
    prob = make_problem(P["mu"], P["N"], P["L"], seed)
    sol = solve_principal(prob, P["tol"], P["max_iter"], P["method"])
    res = area_residual(sol)
    passed = sol.converged
    if P["check"] == "area":
        passed = passed and abs(res) <= P["check_tol"]
    elif P["check"] == "oracle":
        if not P["mu"].startswith("const"):
            raise UsageError("check=oracle needs a const mu")
        a = complex(np.mean(prob.mu.samples[np.abs(prob.mu.points()) < 0.5]))
        passed = passed and _oracle_ok(sol, a)
    if P["grid_out"]:
        try:
            write_grid(P["grid_out"], sol.f)
        except OSError as exc:
            raise DataError(str(exc)) from exc
    b = sol.laurent.b
    row = [prob.label, sol.N, sol.L, sol.iterations, sol.residual, sol.status, prob.k, complex(b[0]),
           float(np.max(np.abs(b[1:8]))), res, sol.laurent.conformality, P["check"], passed]
    return Result(SOLVE_COLUMNS, [row], passed)


def _p_values(text: str, K: float, k: float):
    out = []
    for item in text.split(","):
        item = item.strip()
        if item == "pK":
            out.append(p_of_K(K))
        elif item == "max":
            out.append(1 + 1 / k if k > 0 else math.inf)
        else:
            out.append(float(item))
    return out


def cmd_area(P, seed):
    prob = make_problem(P["mu"], P["N"], P["L"], seed)
    sol = solve_principal(prob)
    if not sol.converged:
        raise NonConvergedError("solver did not converge")
    kind = P["inequality"]
    if kind == "burkholder":
        reps = [burkholder_area_check(sol, p, P["tol"], seed=seed) for p in _p_values(P["p"], prob.K, prob.k)]
    elif kind == "w":
        reps = [w_area_check(sol, P["tol"], seed=seed)]
    else:
        reps = [f_area_check(sol, P["tol"], seed=seed)]
    return Result(AREA_COLUMNS, [r.row() for r in reps], all(r.status != FAIL for r in reps))


def cmd_weighted(P, seed):
    prob = make_problem(P["mu"], P["N"], P["L"], seed)
    sol = solve_principal(prob)
    if not sol.converged:
        raise NonConvergedError("solver did not converge")
    reps = [weighted_burkholder_check(sol, p, P["tol"], seed=seed) for p in _p_values(P["p"], prob.K, prob.k)]
    return Result(AREA_COLUMNS, [r.row() for r in reps], all(r.status != FAIL for r in reps))


def cmd_split(P, seed):
    rep = split_decompose(P["G"], P["H"], P["t_range"], P["s_range"], P["grid"], P["tol"])
    passed = P["expect"] is None or rep.verdict == P["expect"]
    return Result(SPLIT_COLUMNS, [[P["G"], P["H"], rep.G0, rep.H0, rep.c, rep.verdict, rep.BE_ok, rep.min_H1,
                                   rep.remainder_max]], passed)


def cmd_minors(P, seed):
    E = P["functional"]
    cert = make_certificate(P["certificate"], seed)
    if P["scale"] != 1.0:
        cert = cert.scaled(P["scale"])
    r = minors_certificate_check(E, cert, P["tol"])
    ok = {"none": True, "refuted": r.polyconvexity_refuted, "not-refuted": not r.polyconvexity_refuted}
    return Result(MINORS_COLUMNS, [[format_functional(E), P["certificate"], r.lhs, r.rhs, r.polyconvexity_refuted,
                                    *r.relation_errors]], ok[P["expect"]])


def cmd_llogl(P, seed):
    rep = llogl_check(make_profile(P["profile"], seed), P["tol"])
    return Result(AREA_COLUMNS, [rep.row()], rep.status != FAIL)


def cmd_minimize(P, seed):
    from .minimizer import (MIN_COLUMNS, all_iterates_above, burkholder_min_experiment, ec_min_experiment,
                            elastic_min_experiment)
    cfg_kw = {"backend": P["backend"]} if P["backend"] else {}
    exp = P["experiment"]
    if exp == "burkholder":
        rep = burkholder_min_experiment(P["matrix"], P["K"], P["p"], P["levels"], P["starts"], seed, P["amp"],
                                        **cfg_kw)
        return Result(MIN_COLUMNS, rep.rows(), rep.passed)
    rings, sectors = P["levels"][0]
    if exp == "ec":
        rep = ec_min_experiment(P["c"], rings, sectors, P["starts"], seed, P["amp"], **cfg_kw)
        return Result(MIN_COLUMNS, rep.rows(), all_iterates_above(rep))
    fs = P["functional"] or parse_functional("W+normpow:q=2")
    rep = elastic_min_experiment(fs, P["matrix"], rings, sectors, seed=seed, amp=P["amp"], **cfg_kw)
    return Result(MIN_COLUMNS, rep.rows(), rep.monotone and math.isfinite(rep.max_K))


@dataclass
class Param:
    conv: Callable
    default: Optional[str]
    help: str = ""
    required: bool = False


def _grid_params():
    return {"N": Param(int, "512", "grid size (power of two)"), "L": Param(float, "2.0", "half-width of the box")}


COMMANDS: Dict[str, tuple] = {
    "eval": (cmd_eval, "evaluate a functional at one matrix", {
        "functional": Param(parse_functional, None, "functional text form", True),
        "matrix": Param(parse_matrix, "1,0,0,1", "m11,m12,m21,m22"),
        "expect": Param(_optional(float), None, "expected value"),
        "tol": Param(float, "1e-12"),
    }),
    "scan-rank1": (cmd_scan, "random rank-one (or Baker-Ericksen) convexity scan", {
        "functional": Param(parse_functional, None, "", True),
        "sampler": Param(str, "cone:K=3", "gaussian | positive | cone:K= | near-cone:K="),
        "n": Param(int, "10000"),
        "h": Param(_optional(float), None, "fixed finite-difference step"),
        "test": Param(_choice("rank1", "baker-ericksen"), "rank1"),
        "expect": Param(_choice("none", "convex", "violation"), "none"),
        "tol": Param(float, "1e-8"),
    }),
    "radial": (cmd_radial, "mean of a functional over a radial stretching", {
        "functional": Param(parse_functional, None, "", True),
        "profile": Param(str, "exp", make_profile.__doc__),
        "expect": Param(_optional(float), None),
        "tol": Param(float, "1e-8"),
    }),
    "solve": (cmd_solve, "principal solution of a Beltrami equation", {
        "mu": Param(str, None, make_problem.__doc__, True),
        **_grid_params(),
        "tol": Param(float, "1e-10", "Neumann iteration tolerance"),
        "max_iter": Param(int, "200"),
        "method": Param(_choice("cell", "multiplier"), "cell"),
        "check": Param(_choice("none", "area", "oracle"), "none"),
        "check_tol": Param(float, "1e-2", "area residual bound for check=area"),
        "grid_out": Param(_optional(str), None, "write the solution f to this grid file"),
    }),
    "area-check": (cmd_area, "Burkholder, W or F area inequality on a solved map", {
        "inequality": Param(_choice("burkholder", "w", "f"), "burkholder"),
        "mu": Param(str, None, make_problem.__doc__, True),
        **_grid_params(),
        "p": Param(str, "2", "comma list of exponents; pK = 2K/(K-1)"),
        "tol": Param(_optional(float), None, "default: calibrated"),
    }),
    "weighted-check": (cmd_weighted, "weighted Burkholder bound on a solved map", {
        "mu": Param(str, None, make_problem.__doc__, True),
        **_grid_params(),
        "p": Param(str, "max", "comma list of exponents; max = 1 + 1/k"),
        "tol": Param(float, "5e-2"),
    }),
    "split": (cmd_split, "analyse E = G(det) + H(K)", {
        "G": Param(str, "0"),
        "H": Param(str, "0"),
        "t_range": Param(parse_pair, "1e-4,1e4"),
        "s_range": Param(parse_pair, "1,1e4"),
        "grid": Param(int, "4096"),
        "tol": Param(float, "1e-6"),
        "expect": Param(_optional(_choice("RANK_ONE_CONVEX", "NOT_RANK_ONE_CONVEX", "INCONCLUSIVE")), None),
    }),
    "minors": (cmd_minors, "minors-relation certificate against polyconvexity", {
        "functional": Param(parse_functional, None, "", True),
        "certificate": Param(_choice("example", "paper-ex", "random"), "example"),
        "scale": Param(float, "1.0"),
        "tol": Param(float, "1e-9"),
        "expect": Param(_choice("none", "refuted", "not-refuted"), "none"),
    }),
    "llogl": (cmd_llogl, "sharp L log L inequality on a radial profile", {
        "profile": Param(str, "exp", make_profile.__doc__),
        "tol": Param(float, "1e-8"),
    }),
    "minimize": (cmd_minimize, "discrete energy minimization experiments", {
        "experiment": Param(_choice("burkholder", "ec", "elastic"), "burkholder"),
        "functional": Param(_optional(parse_functional), None, "elastic experiment energy"),
        "matrix": Param(parse_matrix, "1,0,0,1", "affine boundary trace"),
        "K": Param(float, "2"),
        "p": Param(float, "3"),
        "c": Param(float, "0.1"),
        "levels": Param(parse_levels, "48x96", "comma list of RINGSxSECTORS"),
        "starts": Param(int, "5"),
        "amp": Param(float, "0.05", "amplitude of the random start perturbation"),
        "backend": Param(_optional(_choice("cython", "python")), None),
    }),
}


@dataclass
class RunConfig:
    command: str
    params: Dict[str, str] = field(default_factory=dict)
    seed: int = 0
    output: Optional[str] = None

    def resolved(self) -> Dict[str, str]:
        """All parameters as text with defaults filled in (unknown keys rejected)."""
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        spec = COMMANDS[self.command][2]
        unknown = set(self.params) - set(spec)
        if unknown:
            raise UsageError(f"unknown keys for {self.command}: {', '.join(sorted(unknown))}")
        out = {}
        for k, p in spec.items():
            v = self.params.get(k, p.default)
            if v is None and p.required:
                raise UsageError(f"{self.command}: missing required key {k!r}")
            out[k] = v
        return out

    def converted(self) -> dict:
        spec = COMMANDS[self.command][2]
        out = {}
        for k, v in self.resolved().items():
            try:
                out[k] = spec[k].conv(v) if v is not None else None
            except (ValueError, TypeError, KeyError) as exc:
                raise UsageError(f"bad value for {k}: {v!r} ({exc})") from exc
        return out

    def text(self) -> str:
        rec = {"command": self.command, "seed": self.seed}
        rec.update({f"param.{k}": ("" if v is None else v) for k, v in self.resolved().items()})
        return manifest_text(rec)


def _input_files(cfg: RunConfig) -> List[str]:
    mu = cfg.params.get("mu", "")
    return [mu[5:]] if mu.startswith("file:") else []


def input_hash(cfg: RunConfig) -> str:
    data = cfg.text().encode()
    for path in _input_files(cfg):
        try:
            with open(path, "rb") as fh:
                data += fh.read()
        except OSError as exc:
            raise DataError(f"cannot read {path}: {exc}") from exc
    return git_hash(data)


def execute(cfg: RunConfig) -> Result:
    fn = COMMANDS[cfg.command][0]
    P = cfg.converted()
    try:
        return fn(P, cfg.seed)
    except (UsageError, DataError):
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def manifest(cfg: RunConfig, result: Result, wall: float) -> str:
    import scipy
    P = cfg.resolved()
    rec = {"command": cfg.command, "seed": cfg.seed}
    rec.update({f"param.{k}": ("" if v is None else v) for k, v in P.items()})
    rec.update({
        "output": cfg.output or "-",
        "version.burkqc": __version__,
        "version.python": platform.python_version(),
        "version.numpy": np.__version__,
        "version.scipy": scipy.__version__,
        "kernel_backend": kernels.BACKEND,
        "fft_workers": default_workers(),
        "wall_time_s": round(wall, 3),
        "input_hash": input_hash(cfg),
        "output_hash": git_hash(result.body().encode()),
        "rows": len(result.rows),
        "passed": result.passed,
    })
    rec.update({f"meta.{k}": v for k, v in result.meta.items()})
    return manifest_text(rec)


def config_from_text(text: str) -> RunConfig:
    """RunConfig from key=value lines: command, seed, output, and parameters
    given either bare (``mu=...``) or prefixed (``param.mu=...``)."""
    kv = parse_key_values(text)
    if "command" not in kv:
        raise UsageError("config has no command")
    params = {}
    for k, v in kv.items():
        if k in ("command", "seed", "output"):
            continue
        name = k[6:] if k.startswith("param.") else k
        if "." in name:
            raise UsageError(f"unknown key {k!r}")
        if name in params:
            raise UsageError(f"duplicate parameter {name!r}")
        if v != "":
            params[name] = v
    out = kv.get("output")
    try:
        seed = int(kv.get("seed", "0"))
    except ValueError as exc:
        raise UsageError(f"bad seed {kv['seed']!r}") from exc
    return RunConfig(kv["command"], params, seed, None if out in (None, "-") else out)


def _write(path: Optional[str], text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w") as fh:
        fh.write(text)


def run(cfg: RunConfig, manifest_path: Optional[str] = None) -> int:
    """Execute, write the CSV body and the manifest, return the exit status."""
    t0 = time.perf_counter()
    result = execute(cfg)
    wall = time.perf_counter() - t0
    try:
        _write(cfg.output, result.body())
        man = manifest(cfg, result, wall)
        if manifest_path is None and cfg.output not in (None, "-"):
            manifest_path = cfg.output + ".manifest"
        if manifest_path is None:
            sys.stderr.write(man)
        else:
            _write(manifest_path, man)
    except OSError as exc:
        raise DataError(str(exc)) from exc
    return EXIT_OK if result.passed else EXIT_ASSERT


def _cells_match(a: str, b: str, rtol: float) -> bool:
    if a == b:
        return True
    x, y = parse_cell(a), parse_cell(b)
    if isinstance(x, (int, float, complex)) and isinstance(y, (int, float, complex)) \
            and not isinstance(x, bool) and not isinstance(y, bool):
        return abs(x - y) <= rtol * max(1.0, abs(x), abs(y))
    return False


def replay(manifest_file: str, csv_file: Optional[str] = None, rtol: float = 1e-9,
           output: Optional[str] = None) -> int:
    """Recompute a recorded run and compare every CSV cell with the recorded body."""
    try:
        with open(manifest_file) as fh:
            text = fh.read()
    except OSError as exc:
        raise DataError(str(exc)) from exc
    kv = parse_key_values(text)
    cfg = config_from_text("\n".join(f"{k}={v}" for k, v in kv.items()
                                      if k in ("command", "seed", "output") or k.startswith("param.")))
    recorded_path = csv_file or cfg.output
    result = execute(cfg)
    body = result.body()
    hash_match = git_hash(body.encode()) == kv.get("output_hash")
    mismatches = 0
    n = len(result.rows)
    if recorded_path:
        try:
            with open(recorded_path) as fh:
                recorded = fh.read()
        except OSError as exc:
            raise DataError(str(exc)) from exc
        if result.text is not None:
            old, new = [recorded.strip().split(",")], [body.strip().split(",")]
        else:
            old = [list(r.values()) for r in read_rows(recorded)]
            new = [list(r.values()) for r in read_rows(body)]
        if len(old) != len(new):
            mismatches = max(len(old), len(new))
        else:
            mismatches = sum(not _cells_match(a, b, rtol) for ro, rn in zip(old, new) for a, b in zip(ro, rn))
    elif not hash_match:
        mismatches = n
    rows = [[cfg.command, n, mismatches, hash_match, result.passed]]
    _write(output, csv_text(["command", "rows", "mismatches", "hash_match", "passed"], rows))
    return EXIT_OK if mismatches == 0 and result.passed else EXIT_ASSERT


# ------------------------------------------------------------------ main

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="burkqc", description="Quasiconformal energy experiments.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, (_, help_text, spec) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text, description=help_text)
        for k, p in spec.items():
            d = f" (default {p.default})" if p.default is not None else (" (required)" if p.required else "")
            sp.add_argument(f"--{k}", dest=f"param_{k}", default=None, help=(p.help or "") + d)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--config", help="key=value lines; flags override")
        sp.add_argument("--output", "-o", help="CSV path (default stdout)")
        sp.add_argument("--manifest", help="manifest path (default OUTPUT.manifest, or stderr)")
    rp = sub.add_parser("run", help="run a key=value config file that names its command")
    rp.add_argument("config")
    rp.add_argument("--output", "-o")
    rp.add_argument("--manifest")
    pp = sub.add_parser("replay", help="recompute a run from its manifest and compare rows")
    pp.add_argument("manifest_file")
    pp.add_argument("--csv", help="recorded CSV (default: the manifest's output)")
    pp.add_argument("--rtol", type=float, default=1e-9)
    pp.add_argument("--output", "-o")
    return ap


def _read_config(path: str) -> Dict[str, str]:
    try:
        with open(path) as fh:
            return parse_key_values(fh.read())
    except OSError as exc:
        raise DataError(f"cannot read config {path}: {exc}") from exc
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def config_from_args(args) -> RunConfig:
    if args.command == "run":
        kv = _read_config(args.config)
        cfg = config_from_text("\n".join(f"{k}={v}" for k, v in kv.items()))
        if args.output:
            cfg.output = args.output
        return cfg
    params, seed, output = {}, 0, None
    if args.config:
        kv = _read_config(args.config)
        if "command" in kv and kv.pop("command") != args.command:
            raise UsageError("config names a different command")
        try:
            seed = int(kv.pop("seed", seed))
        except ValueError as exc:
            raise UsageError("bad seed") from exc
        output = kv.pop("output", None)
        params.update({k[6:] if k.startswith("param.") else k: v for k, v in kv.items()})
    for k in COMMANDS[args.command][2]:
        v = getattr(args, f"param_{k}")
        if v is not None:
            params[k] = v
    if args.seed is not None:
        seed = args.seed
    if args.output:
        output = args.output
    return RunConfig(args.command, params, seed, output)


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        if args.command == "replay":
            return replay(args.manifest_file, args.csv, args.rtol, args.output)
        cfg = config_from_args(args)
        cfg.resolved()
        return run(cfg, args.manifest)
    except UsageError as exc:
        print(f"burkqc: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"burkqc: data error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NonConvergedError as exc:
        print(f"burkqc: {exc}", file=sys.stderr)
        return EXIT_ASSERT


if __name__ == "__main__":
    sys.exit(main())
