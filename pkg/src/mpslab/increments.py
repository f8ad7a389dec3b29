"""a-, b- and c-family increments, moment summaries and related diagnostics."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from datetime import date, timedelta
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from .ticks import SessionIndex, TickSeries


class IncrementKind(enum.Enum):
    A = "A"
    B = "B"
    C = "C"
    CR = "CR"
    CW = "CW"
    CH = "CH"
    CI = "CI"
    A1 = "A1"
    A2 = "A2"


class EmptySample(ValueError):
    pass


class EmptyRange(ValueError):
    pass


class CurrentOutsideLimits(ValueError):
    pass


@dataclass(frozen=True)
class IncrementSample:
    kind: IncrementKind
    unit: str                       # "s" or "ticks"
    values: np.ndarray
    origin: tuple = ()
    defined: bool = True

    def __len__(self):
        return len(self.values)


def _sample(kind, unit, values, origin=(), defined=True):
    return IncrementSample(kind, unit, np.asarray(values, dtype=np.int64), tuple(origin), defined)


def a_increments(times, origin=()) -> IncrementSample:
    t = np.asarray(times, dtype=np.int64)
    if t.size < 2:
        return _sample(IncrementKind.A, "s", [], origin, defined=False)
    return _sample(IncrementKind.A, "s", np.diff(t), origin)


def b_increments(prices, origin=()) -> IncrementSample:
    p = np.asarray(prices, dtype=np.int64)
    if p.size < 2:
        return _sample(IncrementKind.B, "ticks", [], origin, defined=False)
    return _sample(IncrementKind.B, "ticks", np.diff(p), origin)


def forward_increments(values):
    """Forward convention x[i+1] - x[i], i = 1..N-1; same multiset as np.diff."""
    v = np.asarray(values, dtype=np.int64)
    return np.array([v[i + 1] - v[i] for i in range(v.size - 1)], dtype=np.int64)


def range_arrays(series: TickSeries, index: SessionIndex):
    """Yield (session_pos, range_pos, times, prices) for every range."""
    t = series.times()
    p = series.prices()
    for s_i, r_i, r in index.iter_ranges():
        yield s_i, r_i, t[r.first:r.stop], p[r.first:r.stop]


def pooled(series: TickSeries, index: SessionIndex, kind: IncrementKind) -> IncrementSample:
    """All a- or b-increments of a contract pooled over its ranges."""
    fn = a_increments if kind is IncrementKind.A else b_increments
    parts = [fn(tt if kind is IncrementKind.A else pp).values
             for _, _, tt, pp in range_arrays(series, index) if len(tt) >= 2]
    vals = np.concatenate(parts) if parts else np.array([], dtype=np.int64)
    return _sample(kind, "s" if kind is IncrementKind.A else "ticks", vals,
                   (series.contract.symbol,), defined=bool(parts))


def _pause_kind(prev: date, nxt: date, session_days: set) -> IncrementKind:
    skipped = [prev + timedelta(days=k) for k in range(1, (nxt - prev).days)]
    if any(d.weekday() < 5 and d not in session_days for d in skipped):
        return IncrementKind.CH
    if skipped:
        return IncrementKind.CW
    return IncrementKind.CR


def c_family(series: TickSeries, index: SessionIndex) -> dict:
    """c-increments across sessions (split into CR/CW/CH) and CI inside them.

    A pause that skips a weekday with no declared session counts as a
    holiday; one that only skips Saturday/Sunday is a weekend.
    """
    p = series.prices()
    sym = series.contract.symbol
    out = {k: [] for k in (IncrementKind.C, IncrementKind.CR, IncrementKind.CW,
                           IncrementKind.CH, IncrementKind.CI)}
    days = {s.day for s in index.sessions}
    prev = None
    for s in index.sessions:
        filled = [r for r in s.ranges if r.count]
        if filled and prev is not None and prev[1] is not None:
            c = int(p[filled[0].first] - p[prev[1]])
            kind = _pause_kind(prev[0], s.day, days)
            out[IncrementKind.C].append(c)
            out[kind].append(c)
        for r0, r1 in zip(filled, filled[1:]):
            out[IncrementKind.CI].append(int(p[r1.first] - p[r0.stop - 1]))
        prev = (s.day, filled[-1].stop - 1 if filled else None)
    return {k: _sample(k, "ticks", v, (sym,), defined=bool(v)) for k, v in out.items()}


def a1_a2_increments(series: TickSeries, index: SessionIndex):
    """Open-to-first-tick and last-tick-to-close waits; empty ranges give their full length."""
    local = np.fromiter((t.local_s for t in series.ticks), dtype=np.int64, count=len(series))
    a1, a2 = [], []
    for _, _, r in index.iter_ranges():
        if r.count == 0:
            a1.append(r.close_s - r.open_s)
            a2.append(r.close_s - r.open_s)
        else:
            a1.append(int(local[r.first] - r.open_s))
            a2.append(int(r.close_s - local[r.stop - 1]))
    sym = (series.contract.symbol,)
    return _sample(IncrementKind.A1, "s", a1, sym), _sample(IncrementKind.A2, "s", a2, sym)


def reconstruct(series: TickSeries, index: SessionIndex):
    """Rebuild local times and prices from the first tick plus increments.

    Times chain through a-increments inside ranges and a2 + pause + a1
    between ranges; prices through b-increments and c/ci-increments.
    """
    ranges = [r for _, _, r in index.iter_ranges()]
    if any(r.count == 0 for r in ranges):
        raise EmptyRange("reconstruction needs at least one tick per range")
    if not ranges:
        return np.array([], dtype=np.int64), np.array([], dtype=np.int64)
    local = np.fromiter((t.local_s for t in series.ticks), dtype=np.int64, count=len(series))
    p = series.prices()
    a1, a2 = a1_a2_increments(series, index)
    times = [int(local[ranges[0].first])]
    prices = [int(p[ranges[0].first])]
    for k, r in enumerate(ranges):
        if k:
            gap = int(a2.values[k - 1]) + (r.open_s - ranges[k - 1].close_s) + int(a1.values[k])
            times.append(times[-1] + gap)
            prices.append(prices[-1] + int(p[r.first] - p[ranges[k - 1].stop - 1]))
        seg_t = local[r.first:r.stop]
        seg_p = p[r.first:r.stop]
        for da, db in zip(a_increments(seg_t).values, b_increments(seg_p).values):
            times.append(times[-1] + int(da))
            prices.append(prices[-1] + int(db))
    return np.array(times, dtype=np.int64), np.array(prices, dtype=np.int64)


# -- moments ---------------------------------------------------------------

@dataclass(frozen=True)
class MomentSummary:
    size: int
    mean: float
    std: float
    skewness: float | None
    excess_kurtosis: float | None
    min: float
    n_min: int
    max: float
    n_max: int


def moments(values) -> MomentSummary:
    """Sample moments in the usual spreadsheet convention.

    std uses n-1; skewness is the adjusted Fisher-Pearson G1 (needs n >= 3)
    and excess kurtosis is G2 (needs n >= 4). Both are None (undefined)
    when the sample is too small or has zero spread.
    """
    x = np.asarray(values)
    n = x.size
    if n == 0:
        raise EmptySample("moments of an empty sample")
    if np.issubdtype(x.dtype, np.integer):
        mean = int(x.sum()) / n
    else:
        mean = float(x.mean())
    d = x - mean
    m2 = float(np.mean(d * d))
    std = math.sqrt(m2 * n / (n - 1)) if n > 1 else 0.0
    skew = kurt = None
    if m2 > 0:
        m3 = float(np.mean(d ** 3))
        m4 = float(np.mean(d ** 4))
        g1 = m3 / m2 ** 1.5
        g2 = m4 / m2 ** 2 - 3.0
        if n >= 3:
            skew = g1 * math.sqrt(n * (n - 1)) / (n - 2)
        if n >= 4:
            kurt = (n - 1) / ((n - 2) * (n - 3)) * ((n + 1) * g2 + 6)
    lo, hi = x.min(), x.max()
    return MomentSummary(
        size=n, mean=mean, std=std, skewness=skew, excess_kurtosis=kurt,
        min=lo.item(), n_min=int(np.count_nonzero(x == lo)),
        max=hi.item(), n_max=int(np.count_nonzero(x == hi)),
    )


def moments_from_counts(values, counts) -> MomentSummary:
    return moments(np.repeat(np.asarray(values), np.asarray(counts)))


def population_kurtosis(values) -> float:
    """Plain m4/m2^2 (3 for a Gaussian)."""
    x = np.asarray(values, dtype=float)
    d = x - x.mean()
    return float(np.mean(d ** 4) / np.mean(d ** 2) ** 2)


# -- empirical distributions ---------------------------------------------

@dataclass(frozen=True)
class Ecdf:
    points: tuple   # ((value, cumulative fraction), ...)

    def __call__(self, x) -> float:
        """Left-continuous ECDF: fraction of observations strictly below x."""
        v = [p[0] for p in self.points]
        j = int(np.searchsorted(v, x, side="left"))
        return 0.0 if j == 0 else self.points[j - 1][1]


def ecdf(values) -> Ecdf:
    x = np.asarray(values)
    if x.size == 0:
        raise EmptySample("ecdf of an empty sample")
    u, c = np.unique(x, return_counts=True)
    cum = np.cumsum(c)
    n = int(cum[-1])
    pts = tuple((u[i].item(), float(cum[i]) / n) for i in range(u.size))
    pts = pts[:-1] + ((pts[-1][0], 1.0),)
    return Ecdf(pts)


def epdf(values):
    x = np.asarray(values)
    if x.size == 0:
        raise EmptySample("epdf of an empty sample")
    u, c = np.unique(x, return_counts=True)
    return [(u[i].item(), c[i] / x.size) for i in range(u.size)]


# -- ratios and identities -------------------------------------------------

def rho_ba(a_values, b_values) -> float:
    """Mean b-increment per second of mean a-increment."""
    return float(np.mean(b_values)) / float(np.mean(a_values))


def wald_price_change(duration_s, mean_b, mean_a) -> float:
    """Approximate last-minus-first price from a range duration and the mean increments."""
    return duration_s * (mean_b / mean_a)


def rho_bc(last_minus_first, c_increment):
    """Intra-session move over the preceding c-increment; None when c is zero."""
    if c_increment == 0:
        return None
    return Fraction(last_minus_first, c_increment)


def mean_price_order_identity(prices) -> Fraction:
    """|mean P - (P1 + (N-1)*mean dP - sum(i*dP_i)/N)|, dP_i = P_{i+1} - P_i.

    Evaluated in exact rationals, so the residual is exactly zero.
    """
    p = [int(v) for v in prices]
    n = len(p)
    if n < 2:
        return Fraction(0)
    dp = [p[i + 1] - p[i] for i in range(n - 1)]
    mean_p = Fraction(sum(p), n)
    mean_dp = Fraction(sum(dp), n - 1)
    weighted = sum((i + 1) * d for i, d in enumerate(dp))
    rhs = p[0] + (n - 1) * mean_dp - Fraction(weighted, n)
    return abs(mean_p - rhs)


_TRANSFORMS: Mapping[str, Callable] = {
    "identity": lambda v: v,
    "abs": np.abs,
    "square": lambda v: v * v,
}


def conditional_b_given_a(a_values, b_values, transform="identity", tail_from=None) -> dict:
    """Moment summaries of (transformed) b-increments for each a-increment value.

    With `tail_from`, all a >= tail_from are pooled under the key
    ("tail", lowest, highest).
    """
    a = np.asarray(a_values, dtype=np.int64)
    b = _TRANSFORMS[transform](np.asarray(b_values, dtype=np.int64))
    if a.shape != b.shape:
        raise ValueError("a and b samples must pair up")
    out = {}
    head = a if tail_from is None else a[a < tail_from]
    for v in np.unique(head):
        out[int(v)] = moments(b[a == v])
    if tail_from is not None:
        mask = a >= tail_from
        if mask.any():
            out[("tail", int(a[mask].min()), int(a[mask].max()))] = moments(b[mask])
    return out


def range_pairs(series: TickSeries, index: SessionIndex):
    """Paired (a, b) increments pooled over all ranges."""
    aa, bb = [], []
    for _, _, tt, pp in range_arrays(series, index):
        if len(tt) >= 2:
            aa.append(np.diff(tt))
            bb.append(np.diff(pp))
    if not aa:
        return np.array([], dtype=np.int64), np.array([], dtype=np.int64)
    return np.concatenate(aa), np.concatenate(bb)


def limit_capacity(settle_prev: int, limit: int, current: int):
    """Number of price classes allowed by daily limits, all in ticks.

    Returns (K_max, K_down, K_up) with K_max = 2*limit + 1 and
    K_down + K_up + 1 == K_max for any current price inside the limits.
    """
    if limit <= 0 or settle_prev <= limit:
        raise ValueError("need limit > 0 and previous settlement above the limit")
    down, up = settle_prev - limit, settle_prev + limit
    if not down <= current <= up:
        raise CurrentOutsideLimits(f"{current} outside [{down}, {up}]")
    return 2 * limit + 1, current - down, up - current


INCREMENT_COLUMNS = ["Type", "Ticker", "Size", "Mean", "Min", "n_min", "Max",
                     "n_max", "StdDev", "Skew", "E-Kurt"]


def summary_row(kind: str, ticker: str, m: MomentSummary | None):
    """One summary-table row; undefined statistics print as 'undefined'."""
    def g(x, digits=5):
        return "undefined" if x is None else f"{x:.{digits}g}"
    if m is None:
        return [kind, ticker, "0"] + ["undefined"] * 8
    return [kind, ticker, str(m.size), g(m.mean), g(m.min, 12), str(m.n_min),
            g(m.max, 12), str(m.n_max), g(m.std), g(m.skewness, 3), g(m.excess_kurtosis, 4)]
