"""``pfh-twist`` command line.

Every command writes CSV (or a short key/value report) to stdout or
``--output``.  CSV output starts with the schema line ``# pfh-twist-lab v1``;
rationals print as ``p/q`` and floats with 12 significant digits.  Usage
errors exit with 2, invariant violations with 1 and a JSON report on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from dataclasses import dataclass, field, fields
from fractions import Fraction
from pathlib import Path

from . import __version__
from .action import action_eq, path_action
from .asymptotics import (K_RULES, EpsilonInfeasible, convergence_table, identity_report, random_path,
                          step1_path)
from .complex import (GradingMismatch, NoClass, all_elliptic_cycle, boundary_of, d_squared_zero,
                      differential, grading_window, homology_rank, min_max)
from .growth import check_divergence, growth_report
from .index import index_report, pick_check
from .lattice_path import LatticePath, PathSyntaxError, validate
from .profile import ProfileError, calabi, load_profile, parse_twist, validate_profile
from .spectral import EmptyGrading, Mismatch, c_dk_bracket, c_dk_exact, monotonicity_check, shift_law_check
from .spectrum import Violation, spec_d, spectrality_check

SCHEMA = "# pfh-twist-lab v1"


class UsageError(Exception):
    pass


class InvariantFailure(Exception):
    def __init__(self, violations: list[dict]):
        super().__init__(f"{len(violations)} invariant violation(s)")
        self.violations = violations


@dataclass
class RunConfig:
    profile: str = "quadratic"
    brute_cap: int = 10
    homology_cap: int = 5
    spectrality_tol: float = 1e-8
    identity_tol: float = 1e-6
    threads: int | None = None
    output: str | None = None
    extra: dict = field(default_factory=dict)

    def validate(self):
        if self.brute_cap < 1 or self.homology_cap < 1:
            raise UsageError("caps must be positive")
        if self.spectrality_tol <= 0 or self.identity_tol <= 0:
            raise UsageError("tolerances must be positive")
        if self.threads is not None and self.threads < 1:
            raise UsageError("threads must be positive")

    @classmethod
    def load(cls, path: str) -> "RunConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from exc
        names = {f.name for f in fields(cls)} - {"extra"}
        known = {k: v for k, v in raw.items() if k in names}
        return cls(**known, extra={k: v for k, v in raw.items() if k not in names})


# --------------------------------------------------------------------------
# formatting


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


class Output:
    def __init__(self, path: str | None):
        self.path = path
        self.buffer = io.StringIO()

    def csv(self, header: list[str], rows):
        self.buffer.write(SCHEMA + "\n")
        writer = csv.writer(self.buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])

    def kv(self, pairs):
        for key, value in pairs:
            self.buffer.write(f"{key}: {fmt(value)}\n")

    def line(self, text: str):
        self.buffer.write(text + "\n")

    def flush(self):
        text = self.buffer.getvalue()
        if self.path:
            Path(self.path).write_text(text)
        else:
            sys.stdout.write(text)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _trunc_list(text: str) -> list[int | None]:
    out = []
    for x in text.split(","):
        x = x.strip()
        if not x:
            continue
        if x in ("inf", "none"):
            out.append(None)
            continue
        try:
            out.append(int(x))
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"bad truncation index {x!r}") from exc
    return out


def _window(text: str) -> tuple[Fraction, Fraction]:
    try:
        a, b = (Fraction(x.strip()) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected 'a,b', got {text!r}") from exc
    return a, b


def _path(text: str) -> LatticePath:
    try:
        return LatticePath.parse(text)
    except PathSyntaxError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def degree_ramp(dmax: int, cap: int) -> list[int]:
    """``1..min(dmax, cap)``, then every tenth degree up to ``dmax``, then ``dmax``."""
    ds = set(range(1, min(dmax, cap) + 1))
    ds.update(range(10 * (cap // 10 + 1), dmax + 1, 10))
    ds.add(dmax)
    return sorted(d for d in ds if d >= 1)


# --------------------------------------------------------------------------
# commands


def cmd_profile(args, cfg, out: Output):
    profile = load_profile(args.file or cfg.profile)
    problems = validate_profile(profile, strict=not args.non_strict)
    desc = profile.describe()
    out.kv([("name", desc["name"]), ("kind", desc["kind"]), ("h(1)", desc["h(1)"]),
            ("h'(1)", desc["h'(1)"]), ("I", desc["I"]), ("Cal", desc["Cal"]),
            ("violations", len(problems))])
    if problems:
        raise InvariantFailure([{"check": "profile", "message": p} for p in problems])


def cmd_index(args, cfg, out: Output):
    path = args.path
    rep = index_report(path)
    pick = pick_check(path)
    out.kv([("path", str(path)), ("j+", rep.j_plus), ("j-", rep.j_minus), ("j", rep.j),
            ("d", rep.degree), ("h", rep.h_count), ("I", rep.index), ("pick", pick.status)])
    if pick.status == "mismatch":
        raise InvariantFailure([{"check": "pick", "path": str(path)}])


def cmd_action(args, cfg, out: Output):
    profile = load_profile(cfg.profile)
    problems = validate(args.path, profile)
    if problems:
        raise UsageError("; ".join(problems))
    value = path_action(args.path, profile)
    out.kv([("path", str(args.path)), ("y", value.start_term)]
           + [(f"edge {e}", v) for e, v in zip(args.path.edges, value.breakdown)]
           + [("A", value.value)])


def _complex_violations(d: int, profile, ks) -> tuple[list, list]:
    rows, bad = [], []
    for k in ks:
        try:
            mat = differential(d, k, profile)
        except GradingMismatch as exc:
            bad.append({"check": "grading", "d": d, "k": k, "message": str(exc)})
            continue
        squared = d_squared_zero(d, k, profile)
        sigma = all_elliptic_cycle(d, k, profile)
        closed = boundary_of(sigma, d, k, profile) == 0
        sources = 0
        for col in mat.columns:
            sources |= col
        hit_elliptic = any(mat.rows.generators[r].h_count == 0
                           for r in range(len(mat.rows)) if sources >> r & 1)
        rows.append((d, k, len(mat.cols), len(mat.entries()), squared, closed, not hit_elliptic))
        if not squared:
            bad.append({"check": "d_squared", "d": d, "k": k})
        if not closed:
            bad.append({"check": "elliptic_cycle", "d": d, "k": k})
        if hit_elliptic:
            bad.append({"check": "elliptic_source", "d": d, "k": k})
    return rows, bad


def cmd_complex(args, cfg, out: Output):
    profile = load_profile(cfg.profile)
    if args.d > cfg.homology_cap:
        raise UsageError(f"--d {args.d} exceeds the homology cap {cfg.homology_cap}")
    rows, bad = _complex_violations(args.d, profile, grading_window(args.d))
    out.csv(["d", "k", "generators", "entries", "d_squared_zero", "elliptic_cycle_closed",
             "sources_have_h"], rows)
    if bad:
        raise InvariantFailure(bad)


def cmd_homology(args, cfg, out: Output):
    profile = load_profile(cfg.profile)
    if args.d > cfg.homology_cap:
        raise UsageError(f"--d {args.d} exceeds the homology cap {cfg.homology_cap}")
    rows = []
    for k in grading_window(args.d):
        rank = homology_rank(args.d, k, profile)
        rows.append((args.d, k, rank, min_max(args.d, k, profile) if rank == 1 else None))
    out.csv(["d", "k", "rank", "minmax"], rows)


def cmd_minmax(args, cfg, out: Output):
    profile = load_profile(cfg.profile)
    if args.d > cfg.homology_cap:
        raise UsageError(f"--d {args.d} exceeds the homology cap {cfg.homology_cap}")
    try:
        value = min_max(args.d, args.k, profile)
    except NoClass as exc:
        raise InvariantFailure([{"check": "rank", "d": args.d, "k": args.k, "message": str(exc)}])
    rank = homology_rank(args.d, args.k, profile)
    out.csv(["d", "k", "rank", "minmax"], [(args.d, args.k, rank, value)])


def cmd_spectral(args, cfg, out: Output):
    profile = load_profile(cfg.profile)
    d = args.d
    ks = [args.k] if args.k is not None else [k for k in grading_window(d) if (k - d) % 2 == 0]
    rows = []
    for k in ks:
        if args.method == "brute":
            if d > cfg.brute_cap:
                raise UsageError(f"--d {d} exceeds the brute-force cap {cfg.brute_cap}; use --method bracket")
            try:
                rows.append((d, k, c_dk_exact(d, k, profile, cap=cfg.brute_cap), None, None, "brute"))
            except EmptyGrading:
                rows.append((d, k, None, None, None, "empty"))
        else:
            try:
                b = c_dk_bracket(d, k, profile)
            except EmptyGrading:
                rows.append((d, k, None, None, None, "empty"))
                continue
            rows.append((d, k, None, b.lo, b.hi, "bracket"))
    out.csv(["d", "k", "value", "lo", "hi", "method"], rows)


def cmd_converge(args, cfg, out: Output):
    profile = load_profile(cfg.profile)
    ds = args.d_list or degree_ramp(args.dmax, cfg.brute_cap)
    rows = convergence_table(profile, ds, args.rule, brute_cap=cfg.brute_cap)
    out.csv(["d", "k", "estimate", "err", "lo", "hi"],
            [(r.d, r.k, r.estimate, r.error, r.lo, r.hi) for r in rows])


def cmd_isoperimetric(args, cfg, out: Output):
    profile = load_profile(cfg.profile)
    top = profile.slope_bound()
    rng = random.Random(args.seed)
    paths = [random_path(rng, rng.randint(1, args.dmax), top) for _ in range(args.paths)]
    rep = identity_report(profile, paths, energies=(None, Fraction(2 * top + 3)))
    tol = cfg.identity_tol
    out.kv([("paths", rep.paths_checked), ("boundary_length", rep.boundary_length),
            ("boundary_expected", rep.boundary_expected), ("boundary_rel_err", rep.boundary_rel_err),
            ("lambda_rel_err_max", rep.worst_lambda_rel_err), ("lambda_e_rel_err_max", rep.worst_lambda_e_rel_err),
            ("isoperimetric_violations", len(rep.isoperimetric_violations)),
            ("step2_violations", len(rep.step2_violations))])
    bad = []
    if rep.boundary_rel_err > tol:
        bad.append({"check": "boundary_length", "rel_err": rep.boundary_rel_err})
    if rep.worst_lambda_rel_err > tol or rep.worst_lambda_e_rel_err > tol:
        bad.append({"check": "lambda_length", "rel_err": max(rep.worst_lambda_rel_err, rep.worst_lambda_e_rel_err)})
    bad += [{"check": "isoperimetric", "curve": c, "path": p} for c, p in rep.isoperimetric_violations]
    bad += [{"check": "step2", "path": p} for p in rep.step2_violations]
    if bad:
        raise InvariantFailure(bad)


def cmd_spectrum(args, cfg, out: Output):
    profile = load_profile(cfg.profile)
    window = spec_d(profile, args.d, args.window)
    out.csv(["d", "value"], [(args.d, v) for v in window.values])
    out.line(f"# min_gap {fmt(window.min_gap)}")


def cmd_infinite_twist(args, cfg, out: Output):
    try:
        f = parse_twist(args.f)
    except ProfileError as exc:
        raise UsageError(str(exc)) from exc
    ds = args.d_list or sorted({max(1, args.dmax // 8), max(1, args.dmax // 2), args.dmax})
    reports = growth_report(f, args.i, ds)
    rows = []
    for rep in reports:
        for p in rep.points:
            mid = (p.slope_lo + p.slope_hi) / 2
            rows.append(("inf" if rep.truncation is None else rep.truncation, rep.calabi, p.d, mid,
                         p.slope_lo, p.slope_hi))
    out.csv(["i", "Cal_i", "d", "slope", "lo", "hi"], rows)
    out.line(f"# divergent_calabi {fmt(check_divergence(f).divergent)}")


def selftest(profile, cfg: RunConfig, report) -> list[dict]:
    """Run the invariant suite; ``report(name, ok)`` is called once per check."""
    bad: list[dict] = []

    def check(name, fn):
        try:
            ok = bool(fn())
        except (Mismatch, Violation, GradingMismatch, NoClass, EpsilonInfeasible, AssertionError) as exc:
            ok = False
            bad.append({"check": name, "message": str(exc)})
        else:
            if not ok:
                bad.append({"check": name})
        report(name, ok)

    hcap = min(cfg.homology_cap, 4)
    for d in range(1, hcap + 1):
        window = grading_window(d)
        check(f"complex d={d}", lambda d=d, w=window: not _complex_violations(d, profile, w)[1])
        check(f"homology d={d}", lambda d=d, w=window: all(
            homology_rank(d, k, profile) == (1 if (k - d) % 2 == 0 else 0) for k in w))
        check(f"minmax=max d={d}", lambda d=d, w=window: all(
            action_eq(min_max(d, k, profile), c_dk_exact(d, k, profile)) for k in w if (k - d) % 2 == 0))
    for d in range(1, min(cfg.brute_cap, 6) + 1):
        ks = range(-d - 2 * d - 2, d + 1)
        check(f"laws d={d}", lambda d=d, ks=ks: shift_law_check(d, profile, ks) and monotonicity_check(d, profile, ks))
    check("spectrality", lambda: spectrality_check(
        [(d, k, c_dk_exact(d, k, profile)) for d in range(1, hcap + 1) for k in range(-d, d + 1, 2)],
        profile, cfg.spectrality_tol))
    rng = random.Random(0)
    top = profile.slope_bound()
    rep = identity_report(profile, [random_path(rng, rng.randint(1, 8), top) for _ in range(50)])
    check("isoperimetric", lambda: rep.boundary_rel_err <= cfg.identity_tol
          and rep.worst_lambda_rel_err <= cfg.identity_tol and not rep.isoperimetric_violations
          and not rep.step2_violations)
    check("step1 d=40", lambda: step1_path(0.2, 40, profile) is not None)
    check("bracket d=8", lambda: all(
        c_dk_bracket(8, k, profile).lo <= c_dk_exact(8, k, profile) <= c_dk_bracket(8, k, profile).hi
        for k in range(-8, 9, 2)))
    return bad


def cmd_selftest(args, cfg, out: Output):
    profile = load_profile(cfg.profile)
    bad = selftest(profile, cfg, lambda name, ok: out.line(f"{'PASS' if ok else 'FAIL'} {name}"))
    out.line(f"# calabi {fmt(calabi(profile))}")
    if bad:
        raise InvariantFailure(bad)


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--profile", help="built-in profile name or JSON profile file (default: quadratic)")
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("-o", "--output", help="write output to this file")
    common.add_argument("--threads", type=int, help="worker threads (overrides PFH_THREADS)")

    parser = argparse.ArgumentParser(prog="pfh-twist", description="Combinatorial PFH of monotone twists.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", parents=[common], help="validate a profile")
    p.add_argument("action", choices=["check"])
    p.add_argument("file", nargs="?")
    p.add_argument("--non-strict", action="store_true", help="allow h' and h'' to vanish")
    p.set_defaults(run=cmd_profile)

    p = sub.add_parser("index", parents=[common], help="grading of a path")
    p.add_argument("--path", type=_path, required=True, help="e.g. '0; (1,0)x2:E; (2,1)x1:H'")
    p.set_defaults(run=cmd_index)

    p = sub.add_parser("action", parents=[common], help="action of a path")
    p.add_argument("--path", type=_path, required=True)
    p.set_defaults(run=cmd_action)

    p = sub.add_parser("complex", parents=[common], help="verify the chain complex")
    p.add_argument("action", choices=["verify"])
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(run=cmd_complex)

    p = sub.add_parser("homology", parents=[common], help="homology ranks and min-max values")
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(run=cmd_homology)

    p = sub.add_parser("minmax", parents=[common], help="min-max value of one class")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(run=cmd_minmax)

    p = sub.add_parser("spectral", parents=[common], help="spectral invariants c_{d,k}")
    p.add_argument("--d", type=int, required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--k", type=int)
    group.add_argument("--all", action="store_true", help="every grading in the window (default)")
    p.add_argument("--method", choices=["brute", "bracket"], default="brute")
    p.set_defaults(run=cmd_spectral)

    p = sub.add_parser("converge", parents=[common], help="Calabi convergence table")
    p.add_argument("--dmax", type=int, required=True)
    p.add_argument("--rule", choices=K_RULES, default="k=-d")
    p.add_argument("--d-list", type=_int_list, help="explicit degrees instead of the default ramp")
    p.set_defaults(run=cmd_converge)

    p = sub.add_parser("isoperimetric", parents=[common], help="dual-norm identity report")
    p.add_argument("--paths", type=int, default=100)
    p.add_argument("--dmax", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(run=cmd_isoperimetric)

    p = sub.add_parser("spectrum", parents=[common], help="order-d action spectrum in a window")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--window", type=_window, required=True, help="a,b")
    p.set_defaults(run=cmd_spectrum)

    p = sub.add_parser("infinite-twist", parents=[common], help="growth of c_d/d for truncated twists")
    p.add_argument("--f", required=True, help="power:<e>, linear:<a> or zero")
    p.add_argument("--i", type=_trunc_list, default=[2, 4, 8], help="truncation indices; 'inf' = none")
    p.add_argument("--dmax", type=int, default=200)
    p.add_argument("--d-list", type=_int_list)
    p.set_defaults(run=cmd_infinite_twist)

    p = sub.add_parser("selftest", parents=[common], help="run the invariant suite")
    p.set_defaults(run=cmd_selftest)
    return parser


def _config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    if args.profile:
        cfg.profile = args.profile
    if args.output:
        cfg.output = args.output
    if args.threads is not None:
        cfg.threads = args.threads
    cfg.validate()
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = None
    try:
        cfg = _config(args)
        for name in ("d", "dmax", "paths"):
            value = getattr(args, name, None)
            if value is not None and value < 1:
                raise UsageError(f"--{name} must be positive")
        if cfg.threads is not None:
            os.environ["PFH_THREADS"] = str(cfg.threads)
        out = Output(cfg.output)
        args.run(args, cfg, out)
        out.flush()
        return 0
    except (UsageError, ProfileError) as exc:
        parser.print_usage(sys.stderr)
        print(f"pfh-twist: error: {exc}", file=sys.stderr)
        return 2
    except InvariantFailure as exc:
        if out is not None:
            out.flush()
        json.dump({"violations": exc.violations}, sys.stderr, default=str)
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
