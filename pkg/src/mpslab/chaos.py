"""Correlation integral, correlation dimension, a seeded normal generator and
a finite-difference Bachelier walk to compare real increments against."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree


class TooShort(ValueError):
    pass


class TooFewPoints(ValueError):
    pass


class DegenerateCurve(ValueError):
    pass


class BadParams(ValueError):
    pass


def embed(series, m: int) -> np.ndarray:
    """Cut the series into consecutive non-overlapping chunks of length m."""
    x = np.asarray(series, dtype=float)
    if m < 1:
        raise ValueError("m must be >= 1")
    if x.size < m:
        raise TooShort(f"{x.size} values cannot fill a chunk of {m}")
    n = x.size // m
    return x[: n * m].reshape(n, m)


def default_r_grid(points: np.ndarray, size: int = 40) -> np.ndarray:
    """Geometric grid from the smallest nonzero to just past the largest pair distance."""
    pts = np.unique(points, axis=0)
    if pts.shape[0] < 2:
        return np.geomspace(1e-3, 1.0, size)
    # under the max-coordinate norm the diameter is the widest coordinate range
    hi = float(np.max(pts.max(axis=0) - pts.min(axis=0)))
    d, _ = cKDTree(pts).query(pts, k=2, p=np.inf)
    lo = float(d[:, 1].min())
    grid = np.geomspace(lo, hi, size)
    grid[-1] = np.nextafter(hi, np.inf)
    return grid


@dataclass(frozen=True)
class EmbeddingConfig:
    m: int
    r_grid: np.ndarray | None = None
    norm: str = "chebyshev"

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.r_grid is not None:
            g = np.asarray(self.r_grid, dtype=float)
            if g.ndim != 1 or np.any(g <= 0) or np.any(np.diff(g) <= 0):
                raise ValueError("r grid must be positive and strictly increasing")


@dataclass(frozen=True)
class CorrelationCurve:
    r: np.ndarray
    pairs: np.ndarray        # unique pairs with distance < r
    n_points: int
    meta: dict = field(default_factory=dict)

    @property
    def C(self) -> np.ndarray:
        total = self.n_points * (self.n_points - 1) // 2
        return self.pairs / total

    def loglog(self):
        """(ln r, ln C) for points with C > 0."""
        c = self.C
        keep = c > 0
        return np.log(self.r[keep]), np.log(c[keep])


def _pairs_naive(points: np.ndarray, r: np.ndarray, block: int = 512) -> np.ndarray:
    n = points.shape[0]
    hist = np.zeros(r.size + 1, dtype=np.int64)
    for start in range(0, n - 1, block):
        a = points[start:start + block]
        b = points[start + 1:]
        d = np.max(np.abs(a[:, None, :] - b[None, :, :]), axis=2)
        # row i of the block pairs with b[i:] only, so every pair counts once
        mask = np.arange(b.shape[0])[None, :] >= np.arange(a.shape[0])[:, None]
        # d < r[k] exactly when k >= searchsorted(r, d, "right")
        idx = np.searchsorted(r, d[mask], side="right")
        hist += np.bincount(idx, minlength=r.size + 1)
    return np.cumsum(hist)[:-1]


def _pairs_boxed(points: np.ndarray, r: np.ndarray) -> np.ndarray:
    tree = cKDTree(points)
    # count_neighbors uses <=; stepping r down one ulp turns that into <
    r_eff = np.nextafter(r, -np.inf)
    ordered = tree.count_neighbors(tree, r_eff, p=np.inf, cumulative=True)
    n = points.shape[0]
    self_pairs = np.where(r_eff >= 0, n, 0)
    return (np.asarray(ordered, dtype=np.int64) - self_pairs) // 2


def correlation_integral(points, config: EmbeddingConfig, algorithm: str = "boxed") -> CorrelationCurve:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.shape[0] < 2:
        raise TooFewPoints("need at least two points")
    r = np.asarray(config.r_grid if config.r_grid is not None else default_r_grid(pts), dtype=float)
    if algorithm == "naive":
        pairs = _pairs_naive(pts, r)
    elif algorithm == "boxed":
        pairs = _pairs_boxed(pts, r)
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    return CorrelationCurve(r, pairs, pts.shape[0],
                            {"norm": config.norm, "m": config.m, "algorithm": algorithm})


def estimate_dimension(curve: CorrelationCurve, window: int = 5, min_pairs: int = 100):
    """Steepest least-squares slope of ln C against ln r over a sliding window.

    Radii where fewer than min_pairs pairs are inside are skipped; their
    slopes are dominated by counting noise. Returns (nu, (r_lo, r_hi)).
    """
    c = curve.C
    usable = (c > 0) & (c < 1) & (curve.pairs >= min_pairs)
    if not np.any((c > 0) & (c < 1)):
        if np.all(c == c[0]):
            return 0.0, None
        raise DegenerateCurve("no radius with 0 < C < 1")
    x = np.log(curve.r[usable])
    y = np.log(c[usable])
    # plateaus of discrete data: keep one point per distinct ln C
    _, first = np.unique(y, return_index=True)
    first.sort()
    x, y = x[first], y[first]
    if x.size < 3:
        raise DegenerateCurve(f"only {x.size} usable points")
    w = min(window, x.size)
    best, span = -math.inf, None
    for i in range(x.size - w + 1):
        slope = np.polyfit(x[i:i + w], y[i:i + w], 1)[0]
        if slope > best:
            best, span = float(slope), (float(math.exp(x[i])), float(math.exp(x[i + w - 1])))
    return best, span


# generators

LCG_A = 6364136223846793005
LCG_C = 1442695040888963407
_MASK = (1 << 64) - 1


class Lcg64:
    """64-bit linear congruential generator; uniforms use the top 53 bits."""

    _BLOCK = 4096

    def __init__(self, seed: int):
        self.state = seed & _MASK
        # s_{j} = A_j s_0 + C_j for j = 1..BLOCK, all mod 2^64
        a = np.empty(self._BLOCK, dtype=np.uint64)
        c = np.empty(self._BLOCK, dtype=np.uint64)
        aj, cj = 1, 0
        for j in range(self._BLOCK):
            aj, cj = (aj * LCG_A) & _MASK, (cj * LCG_A + LCG_C) & _MASK
            a[j], c[j] = aj, cj
        self._a, self._c = a, c

    def next_u64(self) -> int:
        self.state = (self.state * LCG_A + LCG_C) & _MASK
        return self.state

    def uniform(self, size: int) -> np.ndarray:
        """size doubles in [0, 1)."""
        out = np.empty(size, dtype=float)
        done = 0
        while done < size:
            k = min(self._BLOCK, size - done)
            with np.errstate(over="ignore"):
                s = self._a[:k] * np.uint64(self.state) + self._c[:k]
            out[done:done + k] = (s >> np.uint64(11)).astype(float) * 2.0 ** -53
            self.state = int(s[-1])
            done += k
        return out


def box_muller(gen: Lcg64, size: int) -> np.ndarray:
    """Standard normals, two per pair of uniforms."""
    pairs = (size + 1) // 2
    u = gen.uniform(2 * pairs).reshape(pairs, 2)
    rad = np.sqrt(-2.0 * np.log1p(-u[:, 0]))   # 1 - u is in (0, 1]
    ang = 2.0 * math.pi * u[:, 1]
    z = np.column_stack((rad * np.cos(ang), rad * np.sin(ang))).ravel()
    return z[:size]


@dataclass(frozen=True)
class SimulatedSeries:
    times: np.ndarray     # whole seconds
    prices: np.ndarray    # real valued, not on any tick lattice

    def b_increments(self) -> np.ndarray:
        return np.diff(self.prices)


def simulate_bachelier(P1: float, drift: float, sigma: float, n: int,
                       time_scale: float, seed: int) -> SimulatedSeries:
    """P_i = P_{i-1} + drift + sigma Z_i for i = 2..n; t_1 = 0, t_i = int(time_scale i)."""
    if n < 2 or sigma < 0 or time_scale <= 0:
        raise BadParams("need n >= 2, sigma >= 0, time_scale > 0")
    z = box_muller(Lcg64(seed), n - 1)
    steps = drift + sigma * z
    prices = np.concatenate(([float(P1)], P1 + np.cumsum(steps)))
    i = np.arange(1, n + 1)
    times = np.floor(time_scale * i).astype(np.int64)
    times[0] = 0
    return SimulatedSeries(times, prices)


def curve_lines(curve: CorrelationCurve) -> list[str]:
    x, y = curve.loglog()
    return ["ln_r,ln_C"] + [f"{a:.10f},{b:.10f}" for a, b in zip(x, y)]
