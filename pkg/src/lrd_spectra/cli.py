"""
Command-line front end.

Verbs: ``models list``, ``eval``, ``verify`` and ``figure``.  Exit codes:
0 ok, 2 usage or configuration error, 3 numeric non-convergence (the CSV is
still written, with a ``flag`` column), 4 inconclusive verification.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings

from . import figures
from .asymptotics import CONFIRMED, FAILED_AS_PREDICTED, THEOREMS, verify_theorem_pair
from .errors import ConfigError, LRDSpectraError
from .functionals import var_ball_bruteforce, var_sphere_bruteforce
from .models import MODEL_IDS, QUANTITIES, catalog, get_model

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_INCONCLUSIVE = 0, 2, 3, 4
MC_QUANTITIES = ("b_n_mc", "l_n_mc")

_VERDICT_WORD = {CONFIRMED: "CONFIRMED", FAILED_AS_PREDICTED: "FAILED_AS_PREDICTED"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _parse_params(items):
    out = {}
    for item in items or ():
        key, sep, val = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"parameter {item!r} is not of the form key=value")
        try:
            num = float(val)
        except ValueError as exc:
            raise ConfigError(f"parameter {key!r} needs a numeric value") from exc
        out[key] = int(num) if key == "n" and num.is_integer() else num
    return out


def _write(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_models_list(args):
    rows = [(e.id, " ".join(f"{k}={figures.fmt(v)}" for k, v in e.params.items()) or "-", e.provenance)
            for e in catalog()]
    w0 = max(len(r[0]) for r in rows)
    w1 = max(len(r[1]) for r in rows)
    lines = [f"{'id':<{w0}}  {'params':<{w1}}  provenance"]
    lines += [f"{a:<{w0}}  {b:<{w1}}  {c}" for a, b, c in rows]
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _mc_values(spec, quantity, points, samples, seed):
    fn = var_ball_bruteforce if quantity == "b_n_mc" else var_sphere_bruteforce
    c = spec.covariance_model()
    # one seed per grid index keeps rows independent of evaluation order
    return [fn(c, float(x), samples=samples, seed=seed + i)[0] for i, x in enumerate(points)]


def cmd_eval(args):
    if not args.model or not args.quantity or not args.grid:
        raise ConfigError("eval needs --model, --quantity and --grid")
    spec = get_model(args.model, **_parse_params(args.param))
    points = figures.parse_grid(args.grid).points()
    if args.quantity in MC_QUANTITIES:
        if args.seed is None:
            raise ConfigError("Monte Carlo quantities need --seed")
        if spec.is_directional:
            raise ConfigError("Monte Carlo variances are defined for isotropic models only")
        values, flags = _mc_values(spec, args.quantity, points, args.samples, args.seed), [False] * len(points)
    else:
        if args.quantity not in QUANTITIES:
            raise ConfigError(f"unknown quantity {args.quantity!r}")
        if spec.is_directional and args.theta is None:
            raise ConfigError("directional models need --theta")
        values, flags = figures.evaluate(spec, args.quantity, points, theta=args.theta, tol=args.tol)
    bad = any(flags) or any(not math.isfinite(v) for v in values)
    if bad:
        header = ["point", "value", "flag"]
        rows = [[x, v, "nonconverged" if f or not math.isfinite(v) else "ok"]
                for x, v, f in zip(points, values, flags)]
    else:
        header, rows = ["point", "value"], [[x, v] for x, v in zip(points, values)]
    _write(figures.to_csv(header, rows), args.out)
    return EXIT_NUMERIC if bad else EXIT_OK


def cmd_verify(args):
    if not args.model or not args.theorem:
        raise ConfigError("verify needs --model and --theorem")
    if args.theorem not in THEOREMS:
        raise ConfigError(f"unknown theorem {args.theorem!r}; choose from {', '.join(THEOREMS)}")
    kw = {"tol": args.tol} if args.tol else {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = verify_theorem_pair(args.model, args.theorem, **kw, **_parse_params(args.param))
    word = _VERDICT_WORD.get(rep.verdict, "INCONCLUSIVE")
    lines = [word, f"model {rep.model}  theorem {rep.theorem}"]
    lines += [f"  {note}" for note in rep.notes]
    if rep.scales:
        lines.append("scale,side_a,side_b,ratio")
        for row in zip(rep.scales, rep.side_a_values, rep.side_b_values, rep.ratio_trace):
            lines.append(",".join(figures.fmt(v) for v in row))
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_INCONCLUSIVE if word == "INCONCLUSIVE" else EXIT_OK


def cmd_figure(args):
    text, flagged = figures.figure_csv(args.figure_id)
    _write(text, args.out)
    return EXIT_NUMERIC if flagged else EXIT_OK


def build_parser():
    p = _Parser(prog="lrd-spectra", description="Spectral transforms and asymptotic checks for "
                "long-range dependent isotropic random fields.")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    models = sub.add_parser("models", help="catalogue operations")
    models.add_argument("action", choices=["list"])
    models.add_argument("--out")
    models.set_defaults(func=cmd_models_list)

    common = _Parser(add_help=False)
    common.add_argument("--model", help=f"one of: {', '.join(MODEL_IDS)}")
    common.add_argument("--param", action="append", metavar="K=V", help="model parameter (repeatable)")
    common.add_argument("--tol", type=float)
    common.add_argument("--out", help="output path (default: stdout)")

    ev = sub.add_parser("eval", parents=[common], help="evaluate a quantity on a grid")
    ev.add_argument("--quantity", help=f"one of: {', '.join(QUANTITIES + MC_QUANTITIES)}")
    ev.add_argument("--grid", help="<lin|log>:<min>:<max>:<count>")
    ev.add_argument("--theta", type=float, help="direction for directional models")
    ev.add_argument("--seed", type=int, help="required for Monte Carlo quantities")
    ev.add_argument("--samples", type=int, default=1_000_000)
    ev.set_defaults(func=cmd_eval)

    ver = sub.add_parser("verify", parents=[common], help="check an Abelian/Tauberian pair")
    ver.add_argument("--theorem", help=f"one of: {', '.join(THEOREMS)}")
    ver.set_defaults(func=cmd_verify)

    fig = sub.add_parser("figure", help="export the data series of a figure")
    fig.add_argument("figure_id")
    fig.add_argument("--out")
    fig.set_defaults(func=cmd_figure)
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "tol", None) is not None and not args.tol > 0:
            raise ConfigError("--tol must be positive")
        return args.func(args)
    except LRDSpectraError as exc:
        # bad configuration, unknown model ids, bad parameters, unavailable quantities
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
