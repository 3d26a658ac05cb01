"""Command-line entry point: ``padeinterp {twostate,pade,spectrum,fit}``.

Exit codes are 0 on success, 1 when a computation fails and 2 for usage or
validation errors.  Any option can also come from a ``key = value`` config
file given with ``--config``; command-line flags win over the file, and the
file wins over built-in defaults.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Sequence

import numpy as np

from . import fit, pade2p, quarkonium, radial, twostate
from .perturb import METHODS

EXIT_OK, EXIT_COMPUTE, EXIT_USAGE = 0, 1, 2
VERIFY_BUDGET_MEV = 5.0


class UsageError(ValueError):
    pass


def parse_grid(text: str) -> np.ndarray:
    """``lo:hi:count`` -> inclusive linspace."""
    try:
        lo, hi, count = text.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError:
        raise UsageError(f"grid must look like lo:hi:count, got {text!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo < 0:
        raise UsageError("grid bounds must be finite and non-negative")
    if count < 1 or hi < lo or (count == 1 and hi != lo) or (count > 1 and hi == lo):
        raise UsageError(f"invalid grid {text!r}: need lo < hi with count >= 2, or lo == hi with count 1")
    return np.linspace(lo, hi, count)


def parse_interval(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise UsageError(f"interval must look like lo:hi, got {text!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise UsageError(f"invalid interval {text!r}")
    return lo, hi


def read_config(path: str | Path) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment, dashes in keys become underscores."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _positive(name: str, value: float | None) -> None:
    if value is not None and not (math.isfinite(value) and value > 0):
        raise UsageError(f"--{name.replace('_', '-')} must be positive and finite, got {value}")


@contextmanager
def _output(path: str | None):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


# commands

def cmd_twostate(args) -> int:
    lambdas = parse_grid(args.grid)
    rows = twostate.error_table(lambdas)
    with _output(args.output) as fh:
        twostate.write_csv(rows, fh)
    worst = max(rows, key=lambda r: abs(r.relative_error_pct))
    _say(f"max relative error {worst.relative_error_pct:.4f}% at lambda = {worst.lam:g}")
    return EXIT_OK


def cmd_pade(args) -> int:
    lo, hi = parse_interval(args.interval)
    try:
        small, large = pade2p.read_series(Path(args.series).read_text())
    except OSError as exc:
        raise UsageError(str(exc)) from None
    r = pade2p.build_two_point_pade(small, large)
    doc = {
        "order": r.order,
        "numerator": list(r.num.coeffs),
        "denominator": list(r.den.coeffs),
        "condition_number": r.condition_number,
        "interval": [lo, hi],
        "poles": [
            {
                "location": q.location,
                "multiplicity": q.multiplicity,
                "residue_sign": q.residue_sign,
                "residue": None if math.isnan(q.residue) else q.residue,
                "zero_distance": None if math.isinf(q.zero_distance) else q.zero_distance,
            }
            for q in pade2p.pole_report(r, lo, hi)
        ],
    }
    with _output(args.output) as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    return EXIT_OK


def _params_from_args(args) -> quarkonium.QuarkoniumParams:
    base = quarkonium.REFERENCE_FITS[args.preset].as_dict() if args.preset else {}
    for name in ("alpha", "lam", "m_c", "m_b", "V_c", "V_b"):
        v = getattr(args, name)
        if v is not None:
            base[name] = v
    missing = [k for k in ("alpha", "lam", "m_c", "m_b", "V_c", "V_b") if k not in base]
    if missing:
        raise UsageError(f"missing parameters: {', '.join(missing)} (or use --preset)")
    p = quarkonium.QuarkoniumParams(**base)
    try:
        p.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return p


def _levels(args) -> list[quarkonium.LevelDatum]:
    try:
        return quarkonium.load_levels(args.data)
    except (OSError, quarkonium.LevelFileError) as exc:
        raise UsageError(str(exc)) from None


def cmd_spectrum(args) -> int:
    p = _params_from_args(args)
    data = _levels(args)
    report = quarkonium.spectrum_report(p, data, args.order, args.method, with_oracle=args.oracle or args.verify)
    status = EXIT_OK
    if args.verify:
        worst = max(abs(lv["predicted_mev"] - lv["oracle_mev"]) for lv in report["levels"])
        report["verify"] = {"budget_mev": VERIFY_BUDGET_MEV, "max_abs_diff_mev": worst,
                            "passed": worst <= VERIFY_BUDGET_MEV}
        if worst > VERIFY_BUDGET_MEV:
            _say(f"verify failed: Padé and direct integration differ by {worst:.2f} MeV")
            status = EXIT_COMPUTE
    with _output(args.output) as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    _say(f"{'level':<14}{'measured':>10}{'predicted':>11}{'oracle':>10}")
    for lv in report["levels"]:
        oracle = f"{lv['oracle_mev']:10.1f}" if lv["oracle_mev"] is not None else f"{'-':>10}"
        _say(f"{lv['name']:<14}{lv['measured_mev']:10.1f}{lv['predicted_mev']:11.1f}{oracle}")
    _say(f"fit quality {report['fit_quality_mev2']:.3f} MeV^2")
    return status


def _read_starts(path: str, constrained: bool) -> list[quarkonium.QuarkoniumParams]:
    try:
        doc = json.loads(Path(path).read_text())
        starts = [quarkonium.QuarkoniumParams(**d) for d in doc]
    except (OSError, ValueError, TypeError) as exc:
        raise UsageError(f"bad starts file {path}: {exc}") from None
    if not starts:
        raise UsageError("starts file lists no parameter sets")
    return [fit.apply_constraint(p) for p in starts] if constrained else starts


def cmd_fit(args) -> int:
    data = _levels(args)
    starts = _read_starts(args.starts, args.constrained) if args.starts else None
    result = fit.fit_spectrum(
        data, args.order, args.constrained, starts, seed=args.seed, method=args.method,
        max_iter=args.max_iter, record_trace=args.trace is not None,
    )
    with _output(args.output) as fh:
        fit.dump_json(result, fh)
    if args.trace:
        with open(args.trace, "w", newline="") as fh:
            fit.write_trace(result, fh)
    b = result.best
    _say(f"{'constrained' if result.constrained else 'unconstrained'} fit, order {result.order}"
         + (" (unstable order)" if result.unstable else ""))
    for lv in result.levels["levels"]:
        _say(f"  {lv['name']:<14}{lv['measured_mev']:10.1f}{lv['predicted_mev']:11.1f}")
    _say(f"  alpha {b.alpha:.4f}  lam {b.lam:.4f} GeV^2  m_c {b.m_c:.0f}  m_b {b.m_b:.0f}"
         f"  V_c {b.V_c:.0f}  V_b {b.V_b:.0f} MeV")
    _say(f"  fit quality {result.quality:.3g} MeV^2")
    if result.constrained:
        _say(f"  constraint residual {result.constraint_residual:.2e} MeV")
    return EXIT_OK


# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="padeinterp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value file supplying option defaults")
        p.add_argument("-o", "--output", help="output file (default stdout)")
        return p

    p = common(sub.add_parser("twostate", help="two-state error table as CSV"))
    p.add_argument("--grid", default="0:5:101", help="lambda grid lo:hi:count")
    p.set_defaults(func=cmd_twostate)

    p = common(sub.add_parser("pade", help="build a two-point Padé from a series file"))
    p.add_argument("series", help="file with 'small: c0 ..' and 'large: p e0 ..' lines")
    p.add_argument("--interval", default="0:1.05", help="pole scan interval lo:hi")
    p.set_defaults(func=cmd_pade)

    def physics(p):
        p.add_argument("--order", type=int, default=2, choices=(1, 2, 3))
        p.add_argument("--method", default=quarkonium.DEFAULT_METHOD, choices=METHODS)
        p.add_argument("--data", help=f"levels CSV (default: packaged file or ${quarkonium.DATA_DIR_ENV})")

    p = common(sub.add_parser("spectrum", help="predicted S levels at given parameters"))
    physics(p)
    p.add_argument("--preset", choices=sorted(quarkonium.REFERENCE_FITS))
    for name in ("alpha", "lam", "m_c", "m_b", "V_c", "V_b"):
        p.add_argument("--" + name.replace("_", "-"), dest=name, type=float)
    p.add_argument("--oracle", action="store_true", help="also integrate the radial equation")
    p.add_argument("--verify", action="store_true",
                   help=f"fail if Padé and direct integration differ by more than {VERIFY_BUDGET_MEV:g} MeV")
    p.set_defaults(func=cmd_spectrum)

    p = common(sub.add_parser("fit", help="fit the potential parameters to measured levels"))
    physics(p)
    p.add_argument("--constrained", action="store_true", help="impose V_b - V_c = 2 (m_b - m_c)")
    p.add_argument("--starts", help="JSON list of parameter objects to start from")
    p.add_argument("--seed", type=int, default=fit.DEFAULT_SEED)
    p.add_argument("--max-iter", type=int, default=3000)
    p.add_argument("--trace", help="CSV file for the per-iteration best quality")
    p.set_defaults(func=cmd_fit)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config:
        return args
    sub = next(a for a in parser._subparsers._group_actions if isinstance(a, argparse._SubParsersAction))
    subparser = sub.choices[args.command]
    actions = {a.dest: a for a in subparser._actions}
    values = {}
    for key, raw in read_config(args.config).items():
        action = actions.get(key)
        if action is None or key in ("config", "help", "func"):
            raise UsageError(f"unknown option {key!r} in {args.config}")
        if isinstance(action, argparse._StoreTrueAction):
            if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise UsageError(f"{key} must be a boolean, got {raw!r}")
            values[key] = raw.lower() in ("true", "1", "yes")
            continue
        try:
            value = action.type(raw) if action.type else raw
        except ValueError:
            raise UsageError(f"bad value for {key}: {raw!r}") from None
        if action.choices is not None and value not in action.choices:
            raise UsageError(f"{key} must be one of {list(action.choices)}, got {value!r}")
        values[key] = value
    subparser.set_defaults(**values)
    return parser.parse_args(argv)


def _validate(args) -> None:
    for name in ("lam", "m_c", "m_b", "V_c", "V_b"):
        if hasattr(args, name):
            _positive(name, getattr(args, name))
    alpha = getattr(args, "alpha", None)
    if alpha is not None and not (math.isfinite(alpha) and alpha >= 0):
        raise UsageError(f"--alpha must be non-negative and finite, got {alpha}")
    if getattr(args, "max_iter", 1) < 1:
        raise UsageError("--max-iter must be at least 1")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _apply_config(parser, argv)
        _validate(args)
        return args.func(args)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0)
    except UsageError as exc:
        _say(f"error: {exc}")
        return EXIT_USAGE
    except OSError as exc:
        _say(f"error: {exc}")
        return EXIT_USAGE
    except quarkonium.PoleInRangeError as exc:
        _say(f"error: {exc}")
        return EXIT_COMPUTE
    except fit.AllStartsPenalizedError as exc:
        _say(f"error: {exc}")
        return EXIT_COMPUTE
    except (pade2p.SingularSystemError, radial.GridTooSmallError, ArithmeticError, RuntimeError) as exc:
        _say(f"error: {exc}")
        return EXIT_COMPUTE
    except ValueError as exc:
        _say(f"error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
