"""Explicit bound constants and the two-sided basic and improved estimates.

For the ND case the criterion constant is the supremum over x of
mu(0,x) * nu(x,D); for DN it is sup of nu(0,x) * mu(x,D).  The eigenvalue is
positive exactly when the constant is finite, and then it is bracketed
between the reciprocal of the constant and a quarter of it.  The first
iteration step sharpens this to the improved constants delta1 (lower side)
and delta1' (upper side, always within [delta, 2*delta]).

Every supremum is a full grid scan followed by derivative-free
golden-section refinement on the bracketing panels; the objectives are
continuous but only piecewise smooth through the tables, so no derivatives
are assumed.  Divergence is decided from the overflow flags of the table,
never by comparing floats against a cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CriterionDegenerateError
from .measures import MeasureTable, prefix_integral, suffix_integral

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_INVPHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def golden_max(fun, lo: float, hi: float, iters: int = 70) -> tuple[float, float]:
    """Golden-section maximization of a continuous scalar function on [lo, hi]."""
    a, b = float(lo), float(hi)
    h = b - a
    if h <= 0:
        return a, fun(a)
    c = a + _INVPHI2 * h
    d = a + _INVPHI * h
    yc, yd = fun(c), fun(d)
    for _ in range(iters):
        if yc > yd:
            b, d, yd = d, c, yc
            h *= _INVPHI
            c = a + _INVPHI2 * h
            yc = fun(c)
        else:
            a, c, yc = c, d, yd
            h *= _INVPHI
            d = a + _INVPHI * h
            yd = fun(d)
    return (c, yc) if yc > yd else (d, yd)


def _scan_refine(xs: np.ndarray, node_vals: np.ndarray, objective) -> tuple[float, float]:
    """Grid argmax plus golden refinement over the two bracketing panels."""
    k = int(np.nanargmax(node_vals))
    lo = xs[max(k - 1, 0)]
    hi = xs[min(k + 1, len(xs) - 1)]
    x_star, v_star = golden_max(objective, lo, hi)
    if node_vals[k] >= v_star:
        return float(xs[k]), float(node_vals[k])
    return float(x_star), float(v_star)


def _tail_at(table: MeasureTable, which: str, x: float) -> float:
    tail = table.mu_tail if which == "mu" else table.nu_tail
    d = table.dmu if which == "mu" else table.dnu
    g = table.grid
    i = int(np.searchsorted(g, min(x, table.right_end), side="right") - 1)
    i = min(max(i, 0), table.n_panels - 1)
    frac = (x - g[i]) / (g[i + 1] - g[i])
    return float(max(tail[i] - d[i] * frac, 0.0))


def _head_at(table: MeasureTable, which: str, x: float) -> float:
    cum = table.mu_cum if which == "mu" else table.nu_cum
    d = table.dmu if which == "mu" else table.dnu
    g = table.grid
    i = int(np.searchsorted(g, min(x, table.right_end), side="right") - 1)
    i = min(max(i, 0), table.n_panels - 1)
    frac = (x - g[i]) / (g[i + 1] - g[i])
    return float(cum[i] + d[i] * frac)


def delta(case: str, table: MeasureTable) -> tuple[float, float]:
    """The criterion constant and its argmax; inf when a flagged mass makes it so."""
    if case == "ND":
        if table.nu_divergent or table.mu_divergent:
            return math.inf, math.nan
        node_vals = table.mu_cum * table.nu_tail

        def objective(x):
            return _head_at(table, "mu", x) * _tail_at(table, "nu", x)

    elif case in ("DN", "NN"):
        if table.mu_divergent or table.nu_divergent:
            return math.inf, math.nan
        node_vals = table.nu_cum * table.mu_tail

        def objective(x):
            return _head_at(table, "nu", x) * _tail_at(table, "mu", x)

    else:
        raise ValueError(f"unknown case {case!r}")
    x_star, v = _scan_refine(table.grid, node_vals, objective)
    return v, x_star


def basic_bounds(case: str, table: MeasureTable) -> tuple[float, float]:
    """(1/(4 delta), 1/delta); the pair (0, 0) marks a zero eigenvalue."""
    d, _ = delta(case, table)
    if math.isinf(d):
        return 0.0, 0.0
    return 1.0 / (4.0 * d), 1.0 / d


def delta1(case: str, table: MeasureTable) -> tuple[float, float]:
    """First-step lower-bound constant: the supremum the seed function
    produces under the double-integral transform, via prefix/suffix sums."""
    d, _ = delta(case, table)
    if math.isinf(d):
        raise CriterionDegenerateError("criterion constant is infinite, eigenvalue is 0")
    g = table.grid
    if case == "ND":
        seed = table.nu_tail
        s = np.sqrt(seed)
        head = prefix_integral(table, s, "mu")  # int_0^x sqrt(seed) dmu
        tail = suffix_integral(table, seed * s, "mu")  # int_x^D seed^{3/2} dmu
        with np.errstate(divide="ignore", invalid="ignore"):
            node_vals = np.where(s > 0, s * head + tail / np.where(s > 0, s, 1.0), 0.0)

        def objective(x):
            k = int(np.searchsorted(g, x, side="right") - 1)
            k = min(max(k, 0), table.n_panels - 1)
            sx = math.sqrt(_tail_at(table, "nu", x))
            if sx <= 0:
                return 0.0
            head_x = head[k] + 0.5 * (s[k] + sx) * table.mu_between(g[k], x)
            w_x = _tail_at(table, "nu", x) * sx
            tail_x = tail[k + 1] + 0.5 * (w_x + seed[k + 1] * s[k + 1]) * table.mu_between(x, g[k + 1])
            return sx * head_x + tail_x / sx

    elif case in ("DN", "NN"):
        seed = table.nu_cum
        s = np.sqrt(seed)
        head = prefix_integral(table, seed * s, "mu")  # int_0^x seed^{3/2} dmu
        tail = suffix_integral(table, s, "mu")  # int_x^D sqrt(seed) dmu
        with np.errstate(divide="ignore", invalid="ignore"):
            node_vals = np.where(s > 0, head / np.where(s > 0, s, 1.0) + s * tail, 0.0)

        def objective(x):
            k = int(np.searchsorted(g, x, side="right") - 1)
            k = min(max(k, 0), table.n_panels - 1)
            sx = math.sqrt(_head_at(table, "nu", x))
            if sx <= 0:
                return 0.0
            w_x = _head_at(table, "nu", x) * sx
            head_x = head[k] + 0.5 * (seed[k] * s[k] + w_x) * table.mu_between(g[k], x)
            tail_x = tail[k + 1] + 0.5 * (sx + s[k + 1]) * table.mu_between(x, g[k + 1])
            return head_x / sx + sx * tail_x

    else:
        raise ValueError(f"unknown case {case!r}")
    x_star, v = _scan_refine(g, node_vals, objective)
    return v, x_star


def delta1_prime(case: str, table: MeasureTable) -> tuple[float, float]:
    """First-step upper-bound constant (the x1 -> D limit of the localized
    family); always lands in [delta, 2*delta]."""
    d, _ = delta(case, table)
    if math.isinf(d):
        raise CriterionDegenerateError("criterion constant is infinite, eigenvalue is 0")
    g = table.grid
    if case == "ND":
        seed = table.nu_tail
        tail_sq = suffix_integral(table, seed**2, "mu")
        with np.errstate(divide="ignore", invalid="ignore"):
            node_vals = np.where(seed > 0, table.mu_cum * seed + tail_sq / np.where(seed > 0, seed, 1.0), 0.0)

        def objective(x):
            k = int(np.searchsorted(g, x, side="right") - 1)
            k = min(max(k, 0), table.n_panels - 1)
            px = _tail_at(table, "nu", x)
            if px <= 0:
                return 0.0
            t_x = tail_sq[k + 1] + 0.5 * (px**2 + seed[k + 1] ** 2) * table.mu_between(x, g[k + 1])
            return _head_at(table, "mu", x) * px + t_x / px

    elif case in ("DN", "NN"):
        seed = table.nu_cum
        head_sq = prefix_integral(table, seed**2, "mu")
        with np.errstate(divide="ignore", invalid="ignore"):
            node_vals = np.where(
                seed > 0,
                head_sq / np.where(seed > 0, seed, 1.0) + seed * table.mu_tail,
                0.0,
            )

        def objective(x):
            k = int(np.searchsorted(g, x, side="right") - 1)
            k = min(max(k, 0), table.n_panels - 1)
            px = _head_at(table, "nu", x)
            if px <= 0:
                return 0.0
            h_x = head_sq[k] + 0.5 * (seed[k] ** 2 + px**2) * table.mu_between(g[k], x)
            return h_x / px + px * _tail_at(table, "mu", x)

    else:
        raise ValueError(f"unknown case {case!r}")
    x_star, v = _scan_refine(g, node_vals, objective)
    return v, x_star


@dataclass
class BoundsReport:
    """The basic and improved two-sided estimates for one problem."""

    case: str
    delta: float
    lower_basic: float | None
    upper_basic: float | None
    delta1: float | None
    delta1_prime: float | None
    lower_improved: float | None
    upper_improved: float | None
    argmax_x: dict[str, float]
    positivity: str  # "positive" | "zero"

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "delta": self.delta,
            "lower_basic": self.lower_basic,
            "upper_basic": self.upper_basic,
            "delta1": self.delta1,
            "delta1_prime": self.delta1_prime,
            "lower_improved": self.lower_improved,
            "upper_improved": self.upper_improved,
            "argmax_x": dict(self.argmax_x),
            "positivity": self.positivity,
        }


def compute_report(case: str, table: MeasureTable) -> BoundsReport:
    """Criterion constant, basic bracket, and the first-step improvements.

    For the double-Neumann case only the criterion applies (it decides
    positivity of the spectral gap); the improved constants describe the
    ND/DN eigenvalue and are left unset there.
    """
    d, xd = delta(case, table)
    if math.isinf(d):
        return BoundsReport(
            case=case,
            delta=math.inf,
            lower_basic=0.0,
            upper_basic=0.0,
            delta1=None,
            delta1_prime=None,
            lower_improved=None,
            upper_improved=None,
            argmax_x={},
            positivity="zero",
        )
    lower, upper = 1.0 / (4.0 * d), 1.0 / d
    if case == "NN":
        # the criterion decides positivity of the spectral gap, but the
        # two-sided bracket belongs to the ND/DN eigenvalue, not the gap
        return BoundsReport(
            case=case,
            delta=d,
            lower_basic=None,
            upper_basic=None,
            delta1=None,
            delta1_prime=None,
            lower_improved=None,
            upper_improved=None,
            argmax_x={"delta": xd},
            positivity="positive",
        )
    d1, x1 = delta1(case, table)
    d1p, x1p = delta1_prime(case, table)
    return BoundsReport(
        case=case,
        delta=d,
        lower_basic=lower,
        upper_basic=upper,
        delta1=d1,
        delta1_prime=d1p,
        lower_improved=1.0 / d1,
        upper_improved=1.0 / d1p,
        argmax_x={"delta": xd, "delta1": x1, "delta1_prime": x1p},
        positivity="positive",
    )
