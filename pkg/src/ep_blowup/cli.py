"""Command-line entry point: ``ep-blowup <subcommand> ...``.

Exit status is 0 on success, 1 for invalid input, 2 when ``verify`` finds a
failing check.  A ``--config FILE`` of ``key=value`` lines may supply any
option of the chosen subcommand; flags given on the command line win.
"""
from __future__ import annotations

import argparse
import json
import math
import re
import sys
from pathlib import Path

from . import criterion, dynamics, sweep, verification
from .dynamics import InitialDatum
from .exceptions import InadmissibleDatumError, IntegrationError
from .profiles import GaussianPulse, Tabulated, radial_grid

METHOD_NAMES = {"closed": "closed-form", "oracle": "oracle", "both": "both"}


class UsageError(Exception):
    """Bad command-line or config input; reported and mapped to exit status 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --------------------------------------------------------------------------
# value parsers


def _floats(text, n, what):
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) != n:
        raise argparse.ArgumentTypeError(f"{what} needs {n} comma-separated numbers, got {text!r}")
    out = []
    for i, p in enumerate(parts, start=1):
        try:
            x = float(p)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{what} item {i} ({p!r}) is not a number") from None
        if not math.isfinite(x):
            raise argparse.ArgumentTypeError(f"{what} item {i} ({p!r}) is not finite")
        out.append(x)
    return out


def parse_datum(text):
    return _floats(text, 4, "--datum F0,G0,u0,v0")


def parse_tol(text):
    atol, rtol = _floats(text, 2, "--tol A,R")
    if not (atol > 0 and rtol > 0):
        raise argparse.ArgumentTypeError(f"tolerances must be > 0, got {text!r}")
    return atol, rtol


def parse_range(text):
    """``LO:HI:N`` with LO < HI finite and integer N >= 2."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"range {text!r} must have the form LO:HI:N")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"range {text!r}: LO and HI must be numbers") from None
    try:
        n = int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"range {text!r}: N ({parts[2]!r}) must be an integer") from None
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise argparse.ArgumentTypeError(f"range {text!r}: bounds must be finite")
    if not lo < hi:
        raise argparse.ArgumentTypeError(f"range {text!r}: LO must be < HI")
    if n < 2:
        raise argparse.ArgumentTypeError(f"range {text!r}: N must be >= 2")
    return lo, hi, n


def _positive(kind):
    def parse(text):
        try:
            x = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{text!r} is not a valid {kind.__name__}") from None
        if not x > 0 or (kind is float and not math.isfinite(x)):
            raise argparse.ArgumentTypeError(f"{text!r} must be > 0")
        return x
    return parse


def _nonneg_float(text):
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not (x >= 0 and math.isfinite(x)):
        raise argparse.ArgumentTypeError(f"{text!r} must be finite and >= 0")
    return x


def read_config(path):
    """``key=value`` lines; ``#`` starts a comment; keys use flag names without dashes."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    out = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.lstrip("-").replace("_", "-")] = value
    return out


# --------------------------------------------------------------------------
# parser


def build_parser():
    p = _Parser(prog="ep-blowup", description=(
        "Classify characteristics of the radial d=4 pressureless Euler-Poisson system as "
        "globally smooth or blowing up, integrate them, and scan parameter planes."))
    p.add_argument("--config", metavar="FILE",
                   help="key=value file supplying options of the subcommand (flags win)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_method(sp):
        sp.add_argument("--method", choices=sorted(METHOD_NAMES), default="closed",
                        help="closed form, integration oracle, or both (default: %(default)s)")
        sp.add_argument("--margin", type=_nonneg_float, default=dynamics.DEFAULT_MARGIN,
                        help="|q*| at or below this is Marginal (default: %(default)g)")

    def add_workers(sp):
        sp.add_argument("--workers", type=_positive(int), default=1,
                        help="worker threads (default: %(default)s)")

    c = sub.add_parser("classify", help="classify one datum")
    c.add_argument("--datum", type=parse_datum, required=True, metavar="F0,G0,u0,v0")
    c.add_argument("--r0", type=_nonneg_float, default=1.0,
                   help="radius of the characteristic; does not affect the verdict (default: %(default)s)")
    add_method(c)
    c.add_argument("--json", metavar="FILE", help="also write verdict and constants as JSON")

    s = sub.add_parser("simulate", help="integrate one characteristic and write the time series")
    s.add_argument("--datum", type=parse_datum, required=True, metavar="F0,G0,u0,v0")
    s.add_argument("--r0", type=_nonneg_float, default=1.0, help="initial radius (default: %(default)s)")
    s.add_argument("--horizon", type=_positive(float), default=dynamics.TWO_PI,
                   help="final time (default: 2 pi)")
    s.add_argument("--tol", type=parse_tol, default=(dynamics.DEFAULT_ATOL, dynamics.DEFAULT_RTOL),
                   metavar="A,R", help="absolute and relative tolerance (default: 1e-10,1e-10)")
    s.add_argument("--explosion", type=_positive(float), default=dynamics.DEFAULT_EXPLOSION,
                   help="stop once |(u, v)| exceeds this (default: %(default)g)")
    s.add_argument("--out", required=True, metavar="FILE",
                   help="CSV output; metadata goes to FILE.json")

    pr = sub.add_parser("profile", help="scan every characteristic of a radial profile")
    src = pr.add_mutually_exclusive_group(required=True)
    src.add_argument("--gaussian", type=float, metavar="A", help="E0 = A r exp(-r^2/2), V0 = 0")
    src.add_argument("--table", metavar="FILE", help="CSV with header r,V0,E0")
    pr.add_argument("--r-max", type=_nonneg_float, default=6.0, help="largest r0 (default: %(default)s)")
    pr.add_argument("--r-step", type=_positive(float), default=0.05, help="grid step (default: %(default)s)")
    add_method(pr)
    add_workers(pr)
    pr.add_argument("--out", required=True, metavar="FILE", help="CSV of r0,q_star,verdict,t_star")

    sc = sub.add_parser("scan", help="classify a grid over a parameter plane")
    sc.add_argument("--plane", choices=sorted(sweep.PLANES), required=True,
                    help="zero-velocity: x=G0, y=divE0; zero-field: x=F0, y=divV0")
    sc.add_argument("--x", type=parse_range, required=True, metavar="LO:HI:N")
    sc.add_argument("--y", type=parse_range, required=True, metavar="LO:HI:N")
    add_method(sc)
    add_workers(sc)
    sc.add_argument("--out", required=True, metavar="FILE",
                    help="CSV grid; summary JSON goes to FILE.summary.json")

    f = sub.add_parser("figure", help="reproduce a panel of the domain-of-smoothness figure")
    f.add_argument("--which", choices=sorted(sweep.FIGURE_DEFAULTS), required=True,
                   help="fig1-left: G0 in [-1, 0.24], divE0 in [-2, 2]; "
                        "fig1-right: F0, divV0 in [-2, 2]")
    f.add_argument("--resolution", type=_positive(int), default=100,
                   help="cells per axis (default: %(default)s)")
    add_method(f)
    add_workers(f)
    f.add_argument("--out", required=True, metavar="FILE",
                   help="CSV grid; summary JSON goes to FILE.summary.json")

    v = sub.add_parser("verify", help="run the verification suite")
    v.add_argument("--seed", type=int, default=42, help="RNG seed (default: %(default)s)")
    v.add_argument("--cases", type=_positive(int), default=1000,
                   help="number of random data (default: %(default)s)")
    v.add_argument("--frontier-resolution", type=_positive(int), default=200,
                   help="cells per axis of the frontier scan (default: %(default)s)")
    add_workers(v)
    v.add_argument("--out", metavar="FILE",
                   help="text report; JSON goes to FILE.json (default: print to stdout)")
    return p


def _join_negative_values(argv):
    # argparse takes "-2:2:6" for an option; glue such values onto their flag
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if (tok.startswith("--") and "=" not in tok and i + 1 < len(argv)
                and re.match(r"-[\d.]", argv[i + 1])):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def _apply_config(parser, argv):
    """Parse ``argv`` with config values injected ahead of the command-line flags."""
    argv = _join_negative_values(argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    command = next((a for a in rest if not a.startswith("-")), None)
    if not known.config or command not in COMMANDS:
        return parser.parse_args(argv)
    conf = read_config(known.config)
    sub = parser._subparsers._group_actions[0].choices[command]
    options = {a.option_strings[0].lstrip("-"): a for a in sub._actions if a.option_strings}
    injected = []
    for key, value in conf.items():
        if key not in options:
            raise UsageError(f"{known.config}: unknown option {key!r} for {command}")
        act = options[key]
        if isinstance(act, argparse._StoreTrueAction):
            if value.lower() in ("1", "true", "yes"):
                injected.append(act.option_strings[0])
        else:
            injected.append(f"{act.option_strings[0]}={value}")
    # the subcommand parser keeps the last occurrence, so command-line flags win
    i = argv.index(command)
    return parser.parse_args(argv[:i + 1] + injected + argv[i + 1:])


# --------------------------------------------------------------------------
# commands


def _datum(values, r0=1.0):
    return InitialDatum(*values, r0=r0)


def _fmt_t(t):
    return "-" if t is None or (isinstance(t, float) and math.isnan(t)) else f"{t:.6f}"


def cmd_classify(ns):
    d = _datum(ns.datum, ns.r0)
    method = METHOD_NAMES[ns.method]
    cell = sweep.classify_datum(d, method, ns.margin)
    line = f"{cell.verdict} q*={cell.q_star:.6g} t*={_fmt_t(cell.t_star)} method={method}"
    if method == "both":
        line += f" closed={cell.closed_verdict} oracle={cell.oracle_verdict}"
    print(line)
    if ns.json:
        out = {"datum": {"F0": d.F0, "G0": d.G0, "u0": d.u0, "v0": d.v0, "r0": d.r0},
               "verdict": cell.verdict, "q_star": cell.q_star, "t_star": cell.t_star,
               "method": method, "closed_verdict": cell.closed_verdict,
               "oracle_verdict": cell.oracle_verdict}
        if not d.is_harmonic and (d.u0 or d.v0):
            try:
                out["constants"] = criterion.criterion_constants(d).to_dict()
            except ValueError:
                pass
        Path(ns.json).write_text(json.dumps(out, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_simulate(ns):
    d = _datum(ns.datum, ns.r0)
    atol, rtol = ns.tol
    series = dynamics.integrate_characteristic(d, ns.horizon, rtol=rtol, atol=atol,
                                               explosion=ns.explosion)
    series.to_csv(ns.out)
    ev = series.events
    first = ev["q_zero"][0] if ev["q_zero"] else None
    status = "BlowUp" if first is not None else "NoBlowUp"
    print(f"{status} t*={_fmt_t(first)} samples={len(series.t)} -> {ns.out}")
    return 0


def cmd_profile(ns):
    if ns.gaussian is not None:
        prof = GaussianPulse(ns.gaussian)
    else:
        try:
            prof = Tabulated.from_csv(ns.table)
        except OSError as exc:
            raise UsageError(f"cannot read profile table {ns.table}: {exc.strerror}") from None
    r_min = getattr(prof, "r_min", 0.0)
    r_max = min(ns.r_max, prof.r_max)
    grid = radial_grid(r_max, ns.r_step, r_min)
    res = sweep.scan_radial(prof, grid, METHOD_NAMES[ns.method], ns.margin, ns.workers)
    res.to_csv(ns.out)
    bound = "" if res.blowup_time_bound is None else f" t*<={res.blowup_time_bound:.6f}"
    print(f"{res.global_verdict} worst_r0={res.worst_r0:.6g} "
          f"q*_min={float(min(res.q_star)):.6g}{bound} -> {ns.out}")
    return 0


def _finish_scan(result, out):
    result.to_csv(out)
    result.write_summary(str(out) + ".summary.json")
    counts = result.counts()
    parts = " ".join(f"{k}={v}" for k, v in counts.items())
    frac = result.disagreement_fraction()
    extra = "" if frac is None else f" disagreement={frac:.4%}"
    print(f"{parts}{extra} -> {out}")
    return 0


def cmd_scan(ns):
    (xlo, xhi, nx), (ylo, yhi, ny) = ns.x, ns.y
    req = sweep.ScanRequest(ns.plane, (xlo, xhi), (ylo, yhi), (nx, ny),
                            METHOD_NAMES[ns.method], ns.margin)
    return _finish_scan(sweep.scan_plane(req, ns.workers), ns.out)


def cmd_figure(ns):
    plane, xb, yb, _ = sweep.FIGURE_DEFAULTS[ns.which]
    req = sweep.ScanRequest(plane, xb, yb, ns.resolution, METHOD_NAMES[ns.method], ns.margin)
    return _finish_scan(sweep.scan_plane(req, ns.workers), ns.out)


def cmd_verify(ns):
    rep = verification.run_all(ns.seed, ns.cases, workers=ns.workers,
                               frontier_resolution=ns.frontier_resolution)
    text = rep.to_text()
    if ns.out:
        Path(ns.out).write_text(text)
        Path(str(ns.out) + ".json").write_text(rep.to_json())
    else:
        sys.stdout.write(text)
    print(f"{'PASS' if rep.ok else 'FAIL'} {len(rep.checks) - len(rep.failed)}/{len(rep.checks)} checks"
          + (f" -> {ns.out}" if ns.out else ""))
    return 0 if rep.ok else 2


COMMANDS = {"classify": cmd_classify, "simulate": cmd_simulate, "profile": cmd_profile,
            "scan": cmd_scan, "figure": cmd_figure, "verify": cmd_verify}


def run(argv=None):
    """Run the CLI with ``argv`` (defaults to ``sys.argv[1:]``); returns the exit status."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        ns = _apply_config(parser, argv)
        return COMMANDS[ns.command](ns)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (InadmissibleDatumError, ValueError, IntegrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
