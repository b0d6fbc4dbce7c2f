"""Command-line entry point.

Exit status: 0 success, 1 usage error, 2 hypothesis violated, 3 budget or
tolerance failure. Verdicts such as "not semistable" are reported in the
output, not through the exit status.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
import time
from typing import Sequence

import numpy as np

from . import io
from .errors import GeonumError
from .field import parse_field
from .lattice import chi, degree

COMMANDS = ("field", "h0", "h1", "rr", "hn", "semistable", "vanish", "moduli", "zeta", "selftest")


class UsageError(GeonumError):
    code = "usage"
    exit_status = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _complex(text: str) -> complex:
    t = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(t)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text}") from exc


def _grid(text: str) -> tuple[int, int, int]:
    parts = text.lower().split("x")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("grid must look like NXxNVxNT")
    return tuple(int(p) for p in parts)  # type: ignore[return-value]


def _range(text: str) -> tuple[float, float, int]:
    a, b, n = text.split(":")
    return float(a), float(b), int(n)


def _default_threads() -> int:
    env = os.environ.get("GEONUM_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def build_parser() -> tuple[_Parser, dict[str, _Parser]]:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key = value file; command-line flags take precedence")
    common.add_argument("--output", choices=("json", "plain"), default="json")
    common.add_argument("--json", dest="output", action="store_const", const="json", help="same as --output json")
    common.add_argument("--out", dest="out_path", help="write the report here instead of stdout")
    common.add_argument("--threads", type=int, default=None, help="worker count (env GEONUM_THREADS)")
    common.add_argument("--tol", type=_positive, default=1e-12)

    lat = _Parser(add_help=False)
    lat.add_argument("--field", default="Q", help='"Q" or "Q(sqrt D)"')
    lat.add_argument("--lattice", default=None, help="diag:a,b | std:n | basis:r1;r2 | random:n,deg,spread,seed | file.json")

    p = _Parser(prog="geonum", description="Numerics for metrized lattices over Q and quadratic fields.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    subs: dict[str, _Parser] = {}

    s = sub.add_parser("field", parents=[common], help="field invariants")
    s.add_argument("--field", default="Q")
    subs["field"] = s

    for name, hlp in (("h0", "log of the Gaussian lattice count"), ("h1", "h0 of the omega-twisted dual"),
                      ("rr", "Riemann-Roch residual")):
        s = sub.add_parser(name, parents=[common, lat], help=hlp)
        if name != "rr":
            s.add_argument("--method", choices=("auto", "direct", "dual"), default="auto")
        subs[name] = s

    s = sub.add_parser("hn", parents=[common, lat], help="Harder-Narasimhan polygon")
    s.add_argument("--restrict", action="store_true", help="restrict scalars to Q first")
    s.add_argument("--margin", type=float, default=1.0)
    s.add_argument("--max-rank", type=int, default=None)
    subs["hn"] = s

    s = sub.add_parser("semistable", parents=[common, lat], help="semistability verdict")
    s.add_argument("--margin", type=float, default=1.0)
    s.add_argument("--max-rank", type=int, default=None)
    subs["semistable"] = s

    s = sub.add_parser("vanish", parents=[common, lat], help="vanishing probes and bounds")
    s.add_argument("action", choices=("probe", "bounds"))
    s.add_argument("--twist-deg", type=float, default=1.0)
    s.add_argument("--steps", type=int, default=30)
    subs["vanish"] = s

    s = sub.add_parser("moduli", parents=[common], help="sampled extrema of h0")
    s.add_argument("action", choices=("extremal",))
    s.add_argument("--field", default="Q")
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--d", type=float, default=None)
    s.add_argument("--samples", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--csv", dest="csv_path")
    s.add_argument("--duality", action="store_true", help="also report duality residuals")
    subs["moduli"] = s

    s = sub.add_parser("zeta", parents=[common], help="non-abelian zeta over Q, rank 1 or 2")
    s.add_argument("action", nargs="?", choices=("eval", "residues", "grid"), default="eval")
    s.add_argument("--rank", type=int, choices=(1, 2), default=1)
    s.add_argument("--s", type=_complex, default=None)
    s.add_argument("--grid", type=_grid, default=None, help="rank 2 quadrature grid NXxNVxNT")
    s.add_argument("--method", choices=("quadrature", "monte-carlo"), default="quadrature")
    s.add_argument("--samples", type=int, default=20000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--re", type=_range, default=(0.05, 0.95, 10), help="grid action: lo:hi:count")
    s.add_argument("--im", type=_range, default=(0.0, 30.0, 31), help="grid action: lo:hi:count")
    s.add_argument("--csv", dest="csv_path")
    subs["zeta"] = s

    s = sub.add_parser("selftest", parents=[common], help="run the acceptance checks")
    s.add_argument("--only", default=None, help="comma separated criterion numbers")
    subs["selftest"] = s
    return p, subs


def read_config(path: str) -> dict[str, str]:
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            m = re.match(r"^([A-Za-z_][\w-]*)\s*[=:]\s*(.*)$", line)
            if not m:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            out[m.group(1).replace("-", "_")] = m.group(2).strip()
    return out


_REQUIRED = {c: ("lattice",) for c in ("h0", "h1", "rr", "hn", "semistable", "vanish")}
_REQUIRED["moduli"] = ("n", "d")


def parse_args(argv: Sequence[str]) -> argparse.Namespace:
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        cfg = read_config(args.config)
        sp = subs[args.command]
        actions = {a.dest: a for a in sp._actions}
        unknown = sorted(set(cfg) - set(actions) - {"command", "config"})
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        defaults = {}
        for k, v in cfg.items():
            if k in ("command", "config"):
                continue
            a = actions[k]
            if isinstance(a, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
                defaults[k] = v.lower() in ("1", "true", "yes", "on")
            else:
                defaults[k] = v
        sp.set_defaults(**defaults)
        args = parser.parse_args(argv)
    for key in _REQUIRED.get(args.command, ()):
        if getattr(args, key) is None:
            raise UsageError(f"--{key} is required (flag or config key)")
    if args.threads is None:
        args.threads = _default_threads()
    if args.threads < 1:
        raise UsageError("--threads must be at least 1")
    return args


def _lattice(args):
    return io.parse_lattice(args.lattice, args.field)


def _theta_record(t) -> dict:
    rec = t.to_record()
    rec["error_kind"] = "certified"
    return rec


def cmd_field(args) -> dict:
    F = parse_field(args.field)
    rec = F.to_record()
    rec.update({"degree": F.degree, "log_disc": F.log_disc, "log_disc_error": 0.0, "error_kind": "exact"})
    return rec


def cmd_h0(args) -> dict:
    from .theta import h0

    L = _lattice(args)
    return {"h0": _theta_record(h0(L, args.tol, method=args.method)), "degree": degree(L)}


def cmd_h1(args) -> dict:
    from .theta import h1

    L = _lattice(args)
    return {"h1": _theta_record(h1(L, args.tol, method=args.method)), "degree": degree(L)}


def cmd_rr(args) -> dict:
    from .theta import rr_check

    L = _lattice(args)
    r = rr_check(L, args.tol)
    return {
        "residual": r.residual,
        "residual_error": r.error,
        "error_kind": "certified",
        "h0": r.h0.h0,
        "h1": r.h1.h0,
        "degree": r.degree,
        "chi": chi(L),
    }


def _polygon_record(p) -> dict:
    rec = p.to_record()
    rec["degree_error"] = 1e-9
    rec["error_kind"] = "tie tolerance of the exhaustive search"
    return rec


def cmd_hn(args) -> dict:
    from .stability import DEFAULT_MAX_RANK, canonical_polygon_over_Q, hn_filtration

    L = _lattice(args)
    cap = args.max_rank or DEFAULT_MAX_RANK
    p = canonical_polygon_over_Q(L, args.margin, cap) if args.restrict else hn_filtration(L, args.margin, cap)
    return _polygon_record(p)


def cmd_semistable(args) -> dict:
    from .stability import DEFAULT_MAX_RANK, is_semistable, max_slope_sublattice, slope

    L = _lattice(args)
    cap = args.max_rank or DEFAULT_MAX_RANK
    h = max_slope_sublattice(L, args.margin, cap)
    return {
        "semistable": bool(is_semistable(L, 1e-9, args.margin, cap)),
        "slope": slope(L),
        "max_slope": h.slope,
        "slope_error": 1e-9,
        "error_kind": "tie tolerance of the exhaustive search",
        "destabilizer_rank": h.of_rank,
        "destabilizer": [list(g) for g in h.generators],
    }


def cmd_vanish(args) -> dict:
    from .theta import h0, h1
    from .vanishing import effective_h0_bound, effective_h1_bound, scaling_decay_probe

    L = _lattice(args)
    if args.action == "probe":
        return scaling_decay_probe(L, args.twist_deg, args.steps, args.tol).to_record()
    a, b = h0(L, args.tol), h1(L, args.tol)
    return {
        "degree": degree(L),
        "h0": a.h0,
        "h0_error": a.h0_error,
        "h1": b.h0,
        "h1_error": b.h0_error,
        "h0_bound": effective_h0_bound(L),
        "h1_bound": effective_h1_bound(L),
        "error_kind": "certified",
    }


def cmd_moduli(args) -> dict:
    from .vanishing import extremal_duality_residual, extremal_values_estimate

    est = extremal_values_estimate(parse_field(args.field), args.n, args.d, args.samples, args.seed, args.tol)
    rec = est.to_record()
    rec["error_kind"] = "observed extrema, no error bound"
    rec["h0_error"] = args.tol
    if args.duality:
        rec["duality_residual_max"], rec["duality_residual_min"] = extremal_duality_residual(est, args.tol)
    if args.csv_path:
        io.write_csv(args.csv_path, ("sample_id", "degree", "h0", "semistable"), est.draws)
    return rec


def cmd_zeta(args) -> dict:
    from .zeta import pole_check, rank1_zeta, rank2_zeta

    tol = args.tol if args.rank == 1 else max(args.tol, 1e-8)

    def fn(s):
        if args.rank == 1:
            return rank1_zeta(s, tol)
        return rank2_zeta(s, args.grid, tol, args.method, args.samples, args.seed)

    if args.action == "eval":
        if args.s is None:
            raise UsageError("zeta eval needs --s")
        return fn(args.s).to_record()
    if args.action == "residues":
        return {
            "rank": args.rank,
            "residue_at_1": pole_check(fn, 1),
            "residue_at_0": pole_check(fn, 0),
            "error_kind": "Richardson extrapolation, estimated",
        }
    rows = []
    for x in np.linspace(*args.re[:2], args.re[2]):
        for y in np.linspace(*args.im[:2], args.im[2]):
            z = fn(complex(x, y))
            rows.append((x, y, z.value.real, z.value.imag, abs(z.value), z.abs_error))
    if args.csv_path:
        io.write_csv(args.csv_path, ("re_s", "im_s", "re_value", "im_value", "abs_value", "abs_error"), rows)
    return {"rank": args.rank, "points": len(rows), "max_abs_error": max(r[5] for r in rows), "csv": args.csv_path}


def cmd_selftest(args) -> dict:
    from .acceptance import run_all

    which = None if not args.only else [int(t) for t in args.only.split(",")]
    results = run_all(which)
    for r in results:
        print(r.line(), file=sys.stderr)
    return {
        "passed": all(r.passed for r in results),
        "criteria": [{"number": r.number, "title": r.title, "passed": r.passed, "seconds": r.seconds,
                      "detail": r.detail} for r in results],
    }


HANDLERS = {
    "field": cmd_field,
    "h0": cmd_h0,
    "h1": cmd_h1,
    "rr": cmd_rr,
    "hn": cmd_hn,
    "semistable": cmd_semistable,
    "vanish": cmd_vanish,
    "moduli": cmd_moduli,
    "zeta": cmd_zeta,
    "selftest": cmd_selftest,
}

_ECHO_SKIP = {"output", "out_path", "config", "command"}


def _plain(obj, prefix="") -> list[str]:
    if isinstance(obj, dict):
        lines = []
        for k in sorted(obj):
            lines += _plain(obj[k], f"{prefix}{k}.")
        return lines
    return [f"{prefix[:-1]}: {obj}"]


def _emit(report: dict, args) -> None:
    fmt = getattr(args, "output", "json") if args is not None else "json"
    text = io.dumps(report) if fmt != "plain" else "\n".join(_plain(io._clean(report)))
    path = getattr(args, "out_path", None) if args is not None else None
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    t0 = time.perf_counter()
    args = None
    try:
        args = parse_args(argv)
        inputs = {k: v for k, v in vars(args).items() if k not in _ECHO_SKIP}
        result = HANDLERS[args.command](args)
        report = {"command": args.command, "inputs": inputs, "result": result, "error": None}
        status = 0
        if args.command == "selftest" and not result["passed"]:
            status = 3
    except GeonumError as exc:
        report = {"command": getattr(args, "command", None), "result": None,
                  "error": {"code": exc.code, "message": str(exc)}}
        status = exc.exit_status
    except (ValueError, OSError) as exc:
        report = {"command": getattr(args, "command", None), "result": None,
                  "error": {"code": "usage", "message": str(exc)}}
        status = 1
    report["wall_time"] = round(time.perf_counter() - t0, 6)
    if status == 1 and args is None:
        print(f"geonum: {report['error']['message']}", file=sys.stderr)
    _emit(report, args)
    return status


if __name__ == "__main__":
    sys.exit(main())
