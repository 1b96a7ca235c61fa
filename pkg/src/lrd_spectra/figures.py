"""
Grid parsing, CSV rendering and the figure-data tables.

Figure grids live in a versioned JSON file shipped with the package
(``data/figure_defaults.json``); the environment variable
``LRD_SPECTRA_DEFAULTS`` may point to a replacement.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import warnings
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import ConfigError, NonConvergenceWarning
from .models import get_model, model_eval

DEFAULTS_ENV = "LRD_SPECTRA_DEFAULTS"
DIGITS = 12


@dataclass(frozen=True)
class GridSpec:
    spacing: str
    lo: float
    hi: float
    count: int

    def points(self):
        if self.spacing == "log":
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)


def parse_grid(text):
    """
    Parse ``<spacing>:<min>:<max>:<count>`` with spacing ``lin`` or ``log``.

    >>> parse_grid("log:1e-2:1:3").points().tolist()
    [0.01, 0.1, 1.0]
    """
    parts = str(text).split(":")
    if len(parts) != 4:
        raise ConfigError(f"grid {text!r} is not of the form spacing:min:max:count")
    spacing = {"lin": "lin", "linear": "lin", "log": "log"}.get(parts[0])
    if spacing is None:
        raise ConfigError(f"grid spacing must be 'lin' or 'log', got {parts[0]!r}")
    try:
        lo, hi, count = float(parts[1]), float(parts[2]), int(parts[3])
    except ValueError as exc:
        raise ConfigError(f"bad number in grid {text!r}") from exc
    if count < 2:
        raise ConfigError("grid count must be at least 2")
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        raise ConfigError("grid needs finite min < max")
    if spacing == "log" and lo <= 0:
        raise ConfigError("log grid needs min > 0")
    return GridSpec(spacing, lo, hi, count)


def fmt(x):
    """Locale-independent rendering with 12 significant digits."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    out = f"{x:.{DIGITS}g}"
    return "0" if out == "-0" else out


def evaluate(spec, quantity, points, *, theta=None, power=0.0, tol=None):
    """
    Evaluate ``x^power * quantity(x)`` over ``points``.

    Returns ``(values, flags)``; a flag is set where a numeric path warned
    about non-convergence or failed outright (the value is then NaN).
    """
    values, flags = [], []
    for x in points:
        arg = (float(x), float(theta)) if spec.is_directional else float(x)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", NonConvergenceWarning)
            try:
                v = model_eval(spec, quantity, arg, tol=tol)
                bad = any(issubclass(w.category, NonConvergenceWarning) for w in caught)
            except ArithmeticError:
                v, bad = math.nan, True
        values.append(v * float(x) ** power if power else v)
        flags.append(bad)
    return values, flags


def to_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([c if isinstance(c, str) else fmt(c) for c in row])
    return buf.getvalue()


def load_defaults(path=None):
    path = path or os.environ.get(DEFAULTS_ENV)
    try:
        if path:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        else:
            data = json.loads(resources.files("lrd_spectra").joinpath("data/figure_defaults.json")
                              .read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read figure defaults: {exc}") from exc
    if "figures" not in data:
        raise ConfigError("figure defaults file has no 'figures' table")
    return data


def figure_ids(defaults=None):
    return tuple((defaults or load_defaults())["figures"])


def _abscissa(quantity):
    return "lambda" if quantity in ("G", "g") else ("rho" if quantity == "f" else "r")


def figure_table(fig_id, defaults=None):
    """
    Header and rows of the data series behind figure ``fig_id``.

    Plain figures give one abscissa column plus one column per series;
    log-log figures give natural logs of both; ``thetas`` figures give one
    column per direction; surface figures give ``(r, theta, value)`` triples.
    """
    table = (defaults or load_defaults())["figures"]
    if fig_id not in table:
        raise ConfigError(f"unknown figure {fig_id!r}; known: {', '.join(table)}")
    cfg = table[fig_id]
    try:
        spec = get_model(cfg["model"], **cfg.get("params", {}))
        grid = parse_grid(cfg["grid"]).points()
        series = cfg["series"]
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"figure {fig_id!r} entry is malformed: {exc}") from exc
    xname = _abscissa(series[0]["quantity"])
    flagged = False

    if cfg.get("surface"):
        thetas = parse_grid(cfg["theta_grid"]).points()
        s = series[0]
        header = [xname, "theta", s["name"]]
        rows = []
        for th in thetas:
            vals, fl = evaluate(spec, s["quantity"], grid, theta=th, power=s.get("power", 0))
            flagged |= any(fl)
            rows.extend([x, th, v] for x, v in zip(grid, vals))
        return header, rows, flagged

    cols, header = [], [xname]
    if "thetas" in cfg:
        s = series[0]
        for th in cfg["thetas"]:
            vals, fl = evaluate(spec, s["quantity"], grid, theta=th, power=s.get("power", 0))
            cols.append(vals)
            flagged |= any(fl)
            header.append(f"{s['name']}(theta={fmt(th)})")
    else:
        for s in series:
            vals, fl = evaluate(spec, s["quantity"], grid, theta=0.0, power=s.get("power", 0))
            cols.append(vals)
            flagged |= any(fl)
            header.append(s["name"])
    xs = list(grid)
    if cfg.get("loglog"):
        header[0] = "log_" + xname
        xs = [math.log(x) for x in xs]
        cols = [[math.log(v) if v > 0 else math.nan for v in c] for c in cols]
    rows = [[x, *vals] for x, *vals in zip(xs, *cols)]
    return header, rows, flagged


def figure_csv(fig_id, defaults=None):
    header, rows, flagged = figure_table(fig_id, defaults)
    return to_csv(header, rows), flagged


__all__ = ["GridSpec", "parse_grid", "fmt", "evaluate", "to_csv", "load_defaults", "figure_ids",
           "figure_table", "figure_csv", "DEFAULTS_ENV"]
