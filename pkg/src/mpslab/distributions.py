"""Distribution families for increments: Weibull, Kumaraswamy, Gamma, zeta
(Zipf-Mandelbrot, Riemann, Hurwitz) and a discretized Frechet-type extreme law.

Everything here is a pure evaluator except the two fitters at the bottom.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import optimize, special


class DomainError(ValueError):
    pass


class BadParams(ValueError):
    pass


class RankOutOfDomain(ValueError):
    pass


class NoConvergence(RuntimeError):
    pass


class DegenerateClasses(ValueError):
    pass


# special functions

def gamma_fn(x: float) -> float:
    if x <= 0 and float(x).is_integer():
        raise DomainError(f"gamma has a pole at {x}")
    return math.gamma(x)


def beta_fn(p: float, q: float) -> float:
    if p <= 0 or q <= 0:
        raise DomainError(f"beta needs p, q > 0, got {p}, {q}")
    return math.exp(special.betaln(p, q))


# B_0 .. B_26, even indices only past B_1
BERNOULLI = {
    0: Fraction(1), 1: Fraction(-1, 2),
    2: Fraction(1, 6), 4: Fraction(-1, 30), 6: Fraction(1, 42),
    8: Fraction(-1, 30), 10: Fraction(5, 66), 12: Fraction(-691, 2730),
    14: Fraction(7, 6), 16: Fraction(-3617, 510), 18: Fraction(43867, 798),
    20: Fraction(-174611, 330), 22: Fraction(854513, 138),
    24: Fraction(-236364091, 2730), 26: Fraction(8553103, 6),
}


# Weibull

@dataclass(frozen=True)
class WeibullParams:
    x_u: float
    x_o: float
    m: float

    def __post_init__(self):
        if not (self.x_o > 0 and self.m > 0):
            raise BadParams(f"need x_o > 0 and m > 0: {self}")


def weibull_cdf(p: WeibullParams, x: float) -> float:
    if x <= p.x_u:
        return 0.0
    return -math.expm1(-((x - p.x_u) / p.x_o) ** p.m)


def weibull_pdf(p: WeibullParams, x: float) -> float:
    if x < p.x_u or (x == p.x_u and p.m < 1):
        return 0.0 if x < p.x_u else math.inf
    y = (x - p.x_u) / p.x_o
    return p.m / p.x_o * y ** (p.m - 1) * math.exp(-y ** p.m)


def weibull_central_moment(p: WeibullParams, k: int) -> float:
    g1 = math.gamma(1 + 1 / p.m)
    s = sum(math.comb(k, j) * (-1) ** j * g1 ** j * math.gamma(1 + (k - j) / p.m)
            for j in range(k + 1))
    return p.x_o ** k * s


def weibull_moments(p: WeibullParams):
    mean = p.x_u + p.x_o * math.gamma(1 + 1 / p.m)
    mu2 = weibull_central_moment(p, 2)
    mu3 = weibull_central_moment(p, 3)
    mu4 = weibull_central_moment(p, 4)
    return mean, mu2, mu3 / mu2 ** 1.5, mu4 / mu2 ** 2 - 3


# Kumaraswamy with an optional point mass F0 at z_min

@dataclass(frozen=True)
class KumaraswamyParams:
    a: float
    b: float
    z_max: float
    z_min: float = 0.0
    F0: float = 0.0

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and self.z_max > self.z_min and 0 <= self.F0 < 1):
            raise BadParams(f"invalid Kumaraswamy parameters: {self}")

    @property
    def Q(self) -> float:
        return self.z_max - self.z_min


def kumaraswamy_cdf(p: KumaraswamyParams, z: float) -> float:
    if z < p.z_min:
        return 0.0
    if z >= p.z_max:
        return 1.0
    x = (z - p.z_min) / p.Q
    # 1 - (1 - x^a)^b without cancellation for tiny x^a
    core = -math.expm1(p.b * math.log1p(-x ** p.a)) if x > 0 else 0.0
    return p.F0 + (1 - p.F0) * core


def kumaraswamy_pdf(p: KumaraswamyParams, z: float) -> float:
    if z < p.z_min or z > p.z_max:
        return 0.0
    x = (z - p.z_min) / p.Q
    if x == 0:
        if p.a == 1:
            return p.b * (1 - p.F0) / p.Q
        return math.inf if p.a < 1 else 0.0
    if x == 1 and p.b < 1:
        return math.inf
    return (1 - p.F0) * p.a * p.b * x ** (p.a - 1) * (1 - x ** p.a) ** (p.b - 1) / p.Q


def kumaraswamy_bar(p: KumaraswamyParams, n: int, binning: str = "half") -> float:
    """Probability mass assigned to integer n by integrating the density.

    binning="half": n covers [n-0.5, n+0.5] (0 covers [0, 0.5]);
    binning="unit": n covers [n, n+1].
    """
    if binning == "half":
        lo, hi = max(n - 0.5, p.z_min), n + 0.5
    elif binning == "unit":
        lo, hi = n, n + 1
    else:
        raise ValueError(f"unknown binning {binning!r}")
    # continuous part only; the point mass is not a bar height
    cont = lambda z: (kumaraswamy_cdf(p, z) - p.F0) if z >= p.z_min else 0.0
    return cont(hi) - cont(lo)


def kumaraswamy_alpha(p: KumaraswamyParams, k: int) -> float:
    """k-th raw moment, point mass included."""
    s = sum(math.comb(k, j) * p.z_min ** (k - j) * p.Q ** j * beta_fn(1 + j / p.a, p.b)
            for j in range(k + 1))
    return p.z_min ** k * p.F0 + p.b * (1 - p.F0) * s


def kumaraswamy_mu(p: KumaraswamyParams, k: int) -> float:
    R = p.z_min - kumaraswamy_alpha(p, 1)
    s = sum(math.comb(k, j) * p.Q ** (k - j) * R ** j * beta_fn(1 + (k - j) / p.a, p.b)
            for j in range(k + 1))
    return R ** k * p.F0 + p.b * (1 - p.F0) * s


def kumaraswamy_moments(p: KumaraswamyParams):
    """(mean, std, skewness, excess kurtosis)."""
    mu2 = kumaraswamy_mu(p, 2)
    return (kumaraswamy_alpha(p, 1), math.sqrt(mu2),
            kumaraswamy_mu(p, 3) / mu2 ** 1.5, kumaraswamy_mu(p, 4) / mu2 ** 2 - 3)


def _kuma_shape(a: float, b: float):
    # skew and excess kurtosis for z_min = 0, F0 = 0; z_max drops out
    lb = [special.betaln(1 + j / a, b) for j in range(5)]
    # raw moments divided by mean^j keeps magnitudes sane for tiny a
    lm1 = math.log(b) + lb[1]
    m = [math.exp(math.log(b) + lb[j] - j * lm1) for j in range(5)]
    mu2 = m[2] - 1
    mu3 = m[3] - 3 * m[2] + 2
    mu4 = m[4] - 4 * m[3] + 6 * m[2] - 3
    return mu3 / mu2 ** 1.5, mu4 / mu2 ** 2 - 3


# Gamma

@dataclass(frozen=True)
class GammaParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise BadParams(f"need alpha, beta > 0: {self}")


def gamma_moments(p: GammaParams):
    return p.alpha / p.beta, p.alpha / p.beta ** 2, 2 / math.sqrt(p.alpha), 6 / p.alpha


# zeta family

_B2K = [float(BERNOULLI[2 * k]) / math.factorial(2 * k) for k in range(1, 14)]


def hurwitz_zeta(S: float, Q: float, N: int = 20, M: int = 13) -> float:
    """sum_{i>=0} (i+Q)^-S by a direct sum to N and Euler-Maclaurin tail of order M."""
    if not (S > 1 and Q > 0):
        raise DomainError(f"hurwitz_zeta needs S > 1, Q > 0, got S={S}, Q={Q}")
    if M > 13:
        raise DomainError("Bernoulli table stops at B_26")
    head = math.fsum((i + Q) ** -S for i in range(N))
    x = N + Q
    tail = x ** (1 - S) / (S - 1) + x ** -S / 2
    rising = S  # S (S+1) ... (S+2k-2)
    corr = []
    for k in range(1, M + 1):
        corr.append(_B2K[k - 1] * x ** (1 - S - 2 * k) * rising)
        rising *= (S + 2 * k - 1) * (S + 2 * k)
    return head + tail + math.fsum(corr)


def riemann_zeta(S: float) -> float:
    return hurwitz_zeta(S, 1.0)


@dataclass(frozen=True)
class ZetaParams:
    S: float
    Q: float | None = None
    N: int | None = None

    def __post_init__(self):
        if not self.S > 1 and self.N is None:
            raise BadParams("S must exceed 1 for infinite support")
        if self.Q is not None and self.Q <= 0 and self.N is None:
            raise BadParams("Q must be positive")
        if self.N is not None and self.N < 1:
            raise BadParams("N must be >= 1")

    @property
    def family(self) -> str:
        if self.N is not None:
            return "zipf_mandelbrot"
        return "riemann" if self.Q is None else "hurwitz"


def zeta_pmf(p: ZetaParams, rank: int) -> float:
    fam = p.family
    if fam == "zipf_mandelbrot":
        if not 1 <= rank <= p.N:
            raise RankOutOfDomain(f"rank {rank} outside 1..{p.N}")
        q = p.Q or 0.0
        norm = math.fsum((i + q) ** -p.S for i in range(1, p.N + 1))
        return (rank + q) ** -p.S / norm
    if fam == "riemann":
        if rank < 1:
            raise RankOutOfDomain(f"rank {rank} < 1")
        return rank ** -p.S / riemann_zeta(p.S)
    if rank < 0:
        raise RankOutOfDomain(f"rank {rank} < 0")
    return (rank + p.Q) ** -p.S / hurwitz_zeta(p.S, p.Q)


# extreme values

def fisher_tippett_pdf(kind: str, x: float, k: float = 1.0) -> float:
    if kind == "I":
        return math.exp(-x - math.exp(-x))
    if kind == "II":
        if x <= 0:
            raise DomainError("type II needs x > 0")
        return k / x ** (k + 1) * math.exp(-x ** -k)
    if kind == "III":
        if x >= 0:
            raise DomainError("type III needs x < 0")
        return k * (-x) ** (k - 1) * math.exp(-(-x) ** k)
    raise ValueError(f"unknown type {kind!r}")


@dataclass(frozen=True)
class ExtremeType2Params:
    k: float
    b: float
    a: float = 0.0
    M: int = 200

    def __post_init__(self):
        if not (self.k > 0 and self.b > 0 and self.a >= 0 and self.M >= 2):
            raise BadParams(f"invalid type II parameters: {self}")


def frechet_pdf2(p: ExtremeType2Params, x):
    """k b (bx+a)^-(k+1) exp(-(bx+a)^-k); accepts scalars or arrays."""
    u = p.b * np.asarray(x, dtype=float) + p.a
    if np.any(u <= 0):
        raise DomainError("PDF^II needs x > -a/b")
    out = p.k * p.b * u ** (-p.k - 1) * np.exp(-u ** -p.k)
    return float(out) if np.ndim(out) == 0 else out


def pdf2_derivative(p: ExtremeType2Params, x: float, order: int) -> float:
    """Closed-form odd derivatives (1, 3, 5) of PDF^II."""
    k = p.k
    u = p.b * x + p.a
    f = frechet_pdf2(p, x)
    w = u ** -k
    s = p.b / u
    if order == 1:
        return f * s * (k * w - k - 1)
    if order == 3:
        poly = (-k ** 3 * w ** 3 + 6 * (k ** 3 + k ** 2) * w ** 2
                - (7 * k ** 3 + 18 * k ** 2 + 11 * k) * w
                + k ** 3 + 6 * k ** 2 + 11 * k + 6)
        return -f * s ** 3 * poly
    if order == 5:
        poly = (k ** 5 * w ** 5 - 15 * (k ** 5 + k ** 4) * w ** 4
                + (65 * k ** 5 + 150 * k ** 4 + 85 * k ** 3) * w ** 3
                - (90 * k ** 5 + 375 * k ** 4 + 510 * k ** 3 + 225 * k ** 2) * w ** 2
                + (31 * k ** 5 + 225 * k ** 4 + 595 * k ** 3 + 675 * k ** 2 + 274 * k) * w
                - k ** 5 - 15 * k ** 4 - 85 * k ** 3 - 225 * k ** 2 - 274 * k - 120)
        return f * s ** 5 * poly
    raise ValueError("only orders 1, 3 and 5 are provided")


def euler_maclaurin_terms(p: ExtremeType2Params):
    """B_2/2! f'(M), B_4/4! f'''(M), B_6/6! f^(5)(M)."""
    M = p.M
    return tuple(float(BERNOULLI[2 * j]) / math.factorial(2 * j) * pdf2_derivative(p, M, 2 * j - 1)
                 for j in (1, 2, 3))


def extreme_pmf2_denominator(p: ExtremeType2Params, flipped_signs: bool = False) -> float:
    """sum_{n>=1} PDF^II(n): direct sum below M plus an Euler-Maclaurin tail.

    flipped_signs=True adds the derivative corrections instead of subtracting
    them and takes the third derivative with the opposite sign. Some published
    tabulations were produced that way; the option exists only to reproduce them.
    """
    M = p.M
    head = math.fsum(frechet_pdf2(p, np.arange(1, M)).tolist())
    u = p.b * M + p.a
    integral_and_half = 1 - math.exp(-u ** -p.k) * (1 - p.k * p.b / (2 * u ** (p.k + 1)))
    t1, t3, t5 = euler_maclaurin_terms(p)
    if flipped_signs:
        corr = t1 - t3 + t5
    else:
        corr = -(t1 + t3 + t5)
    return head + integral_and_half + corr


def extreme_pmf2(p: ExtremeType2Params, n, denominator: float | None = None,
                 flipped_signs: bool = False):
    if denominator is None:
        denominator = extreme_pmf2_denominator(p, flipped_signs)
    arr = np.asarray(n)
    if np.any(arr < 0):
        raise DomainError("PMF^II is defined on non-negative integers")
    pos = np.where(arr > 0, arr, 1)
    out = np.where(arr > 0, frechet_pdf2(p, pos) / denominator, 0.0)
    return float(out) if np.ndim(out) == 0 else out


# fitting

def _minimize(fun: Callable, x0, restarts: int = 4, maxiter: int = 100_000, xatol: float = 1e-10):
    best = None
    x = np.asarray(x0, dtype=float)
    for _ in range(restarts + 1):
        r = optimize.minimize(fun, x, method="Nelder-Mead",
                              options={"maxiter": maxiter, "maxfev": maxiter,
                                       "xatol": xatol, "fatol": 1e-14, "adaptive": True})
        if best is None or r.fun < best.fun - 1e-15:
            best = r
        elif np.allclose(r.x, x, rtol=1e-9, atol=xatol):
            break
        x = r.x
    if not np.all(np.isfinite(best.x)) or not np.isfinite(best.fun):
        raise NoConvergence(best.message)
    if best.nit >= maxiter:
        raise NoConvergence("iteration cap reached")
    return best


@dataclass(frozen=True)
class KumaraswamyFit:
    params: KumaraswamyParams
    shape_error: float       # summed |relative error| of skew and excess kurtosis
    location_error: float    # summed |relative error| of mean and std


def fit_kumaraswamy_moments(mean: float, std: float, skew: float, ekurt: float,
                            start=(0.1, 4.0)) -> KumaraswamyFit:
    if not std > 0:
        raise BadParams("target std must be positive")
    if skew is None or ekurt is None:
        raise BadParams("target skewness and excess kurtosis must be defined")

    def shape_err(v):
        a, b = np.exp(v)
        try:
            s, e = _kuma_shape(a, b)
        except (ValueError, OverflowError, ZeroDivisionError):
            return 1e9
        if not (math.isfinite(s) and math.isfinite(e)):
            return 1e9
        return abs(s - skew) / abs(skew) + abs(e - ekurt) / abs(ekurt)

    r1 = _minimize(shape_err, np.log(start))
    a, b = (float(v) for v in np.exp(r1.x))
    unit = KumaraswamyParams(a, b, 1.0)
    m1, s1, _, _ = kumaraswamy_moments(unit)

    # mean and std both scale linearly with z_max; the optimum is at one of
    # the two single-target solutions or between them
    cands = [mean / m1, std / s1]
    loc_err = lambda z: abs(z * m1 - mean) / abs(mean) + abs(z * s1 - std) / std
    z_max = min(cands, key=loc_err)
    return KumaraswamyFit(KumaraswamyParams(a, b, z_max), float(r1.fun), loc_err(z_max))


@dataclass(frozen=True)
class ClassBin:
    lo: float
    hi: float
    observed: int


@dataclass(frozen=True)
class Chi2Fit:
    family: str
    params: tuple
    chi2: float
    dof: int
    probabilities: tuple
    observed: tuple


def class_probabilities(family: str, params: Sequence[float], classes: Sequence[ClassBin]):
    """Per-class model probabilities.

    Discrete families treat (lo, hi) as an inclusive integer range; the
    continuous Kumaraswamy family uses CDF(hi) - CDF(lo).
    """
    if family == "hurwitz":
        S, Q = params
        z = hurwitz_zeta(S, Q)
        return np.array([math.fsum((n + Q) ** -S for n in range(int(c.lo), int(c.hi) + 1)) / z
                         for c in classes])
    if family == "riemann":
        (S,) = params
        z = riemann_zeta(S)
        return np.array([math.fsum(n ** -S for n in range(int(c.lo), int(c.hi) + 1)) / z
                         for c in classes])
    if family == "extreme2":
        k, b = params[:2]
        a = params[2] if len(params) > 2 else 0.0
        p = ExtremeType2Params(k, b, a)
        d = extreme_pmf2_denominator(p)
        return np.array([float(np.sum(extreme_pmf2(p, np.arange(int(c.lo), int(c.hi) + 1), d)))
                         for c in classes])
    if family == "kumaraswamy":
        a, b, z_max = params
        p = KumaraswamyParams(a, b, z_max)
        return np.array([kumaraswamy_cdf(p, c.hi) - kumaraswamy_cdf(p, c.lo) for c in classes])
    raise ValueError(f"unknown family {family!r}")


def chi2_statistic(observed, probabilities) -> float:
    obs = np.asarray(observed, dtype=float)
    expected = obs.sum() * np.asarray(probabilities, dtype=float)
    if np.any(expected <= 0):
        return math.inf
    return float(np.sum((obs - expected) ** 2 / expected))


_DEFAULT_BOX = {
    "hurwitz": ([1.001, 0.001], [50.0, 1e4]),
    "riemann": ([1.001], [50.0]),
    "extreme2": ([1e-6, 1e-6], [100.0, 100.0]),
    "kumaraswamy": ([1e-4, 1e-4, 1e-6], [100.0, 1e4, 1e9]),
}


def fit_chi2(family: str, classes: Sequence[ClassBin], start: Sequence[float],
             box: tuple | None = None) -> Chi2Fit:
    """Minimize Pearson's chi-square over the family parameters inside a box."""
    if len(classes) < 2:
        raise DegenerateClasses("need at least two classes")
    lo, hi = map(np.asarray, box or _DEFAULT_BOX[family])
    obs = [c.observed for c in classes]

    def cost(v):
        if np.any(v <= lo) or np.any(v >= hi):
            return 1e300
        try:
            return chi2_statistic(obs, class_probabilities(family, v, classes))
        except (DomainError, BadParams, OverflowError, ZeroDivisionError):
            return 1e300

    r = _minimize(cost, start)
    probs = class_probabilities(family, r.x, classes)
    dof = len(classes) - 1 - len(start)
    return Chi2Fit(family, tuple(float(v) for v in r.x), float(r.fun), dof,
                   tuple(float(p) for p in probs), tuple(obs))
