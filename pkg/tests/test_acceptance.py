"""Acceptance criteria, one PASS/FAIL line each.

Run under pytest (lines appear in the terminal summary) or directly with
`python tests/test_acceptance.py`.
"""
import csv
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

import _props  # noqa: E402
from mpslab import chaos, distributions as D, increments, mps, ote, stattests  # noqa: E402
from mpslab.ticks import lookup_contract  # noqa: E402

DATA = _props.DATA
ES = lookup_contract("ES")
CLOSES_ACCOUNT = mps.AccountConfig(112750, 112750, 102500, 466)


def _es_closes():
    with open(DATA / "es_closes.csv") as fh:
        prices = [ES.to_ticks(r["price"]) for r in csv.DictReader(fh)]
    with open(DATA / "es_closes_columns.csv") as fh:
        rows = list(csv.DictReader(fh))
    cols = {k: [int(r[k]) for r in rows] for k in rows[0]}
    return prices, cols


def _classes(name):
    with open(DATA / name) as fh:
        return list(csv.DictReader(fh))


# 1

def crit_1():
    prices, cols = _es_closes()
    want = [189068, 48454, 615044, 3442400, 5891080]
    got = [mps.pl(mps.Strategy.from_column(cols[k]), prices, ES, 466) for k in cols]
    bad = [(k, g, w) for k, g, w in zip(cols, got, want) if g != w]
    detail = ", ".join(f"{g / 100:.2f}" for g in got)
    if bad:
        detail += "; mismatch " + ", ".join(f"{k} {g} vs {w} cents" for k, g, w in bad)
    return not bad, detail


# 2

def crit_2():
    rng = np.random.default_rng(20131122)
    start = time.perf_counter()
    bad = []
    for _ in range(1000):
        n = int(rng.integers(1, 13))
        prices = [int(v) for v in rng.integers(0, 7, n)]
        cost = int(rng.choice([0, 1, 466]))
        dp = mps.pl(mps.mps0(prices, ES, cost), prices, ES, cost)
        bf = _props.brute_force_pl(prices, ES.tick_value_cents, cost)
        if dp != bf:
            bad.append((prices, cost, dp, bf))
    took = time.perf_counter() - start
    ok = not bad and took < 30
    return ok, f"1000 chains, {len(bad)} mismatches, {took:.1f} s"


# 3

def crit_3():
    prices, cols = _es_closes()
    notes = []
    ok = True
    trades = []
    for name, fn, want_pl in (("MPS1", mps.mps1, 3442400), ("MPS2", mps.mps2, 5891080)):
        s = fn(prices, ES, CLOSES_ACCOUNT)
        if s.column(len(prices)) != cols[name]:
            ok = False
            notes.append(f"{name} column differs")
        got = mps.pl(s, prices, ES, 466)
        if got != want_pl:
            ok = False
            notes.append(f"{name} PL {got} vs {want_pl} cents")
        summ = mps.summarize(s, prices, None, ES, CLOSES_ACCOUNT)
        if summ.largest_drawdown != -466:
            ok = False
            notes.append(f"{name} drawdown {summ.largest_drawdown}")
        trades.append(summ.trades)
    s0 = mps.mps0(prices, ES, 466)
    trades.insert(0, len(mps.aggregate_trades(s0, prices, ES, 466)))
    if trades != [8, 8, 14]:
        ok = False
        notes.append(f"trades {trades}")
    detail = f"columns, drawdown -4.66, trades {'/'.join(map(str, trades))}"
    return ok, detail + ("; " + "; ".join(notes) if notes else "")


# 4

def crit_4():
    chain = [ES.to_ticks("1792"), ES.to_ticks("1803.25")]
    thr = mps.do_nothing_threshold(chain, ES)
    at = mps.mps0(chain, ES, 28125)
    below = mps.mps0(chain, ES, 28124)
    tr = mps.aggregate_trades(below, chain, ES, 28124)
    ok = thr == 28125 and not at.actions and [t.pl_cents for t in tr] == [2]
    return ok, f"threshold {thr / 100:.2f}, trade at 281.24: {[t.pl_cents for t in tr]} cents"


# 5

def crit_5():
    rng = np.random.default_rng(5)
    checked = 0
    for _ in range(300):
        n = int(rng.integers(2, 40))
        steps = rng.integers(1, 4, n - 1) * rng.choice([-1, 1], n - 1)
        prices = [int(v) for v in 5000 + np.concatenate(([0], np.cumsum(steps)))]
        # one tick pays more than two reversals at this cost, so the trade set is fixed
        c = int(rng.integers(1, ES.tick_value_cents // 4))
        s0, sc = mps.mps0(prices, ES, 0), mps.mps0(prices, ES, c)
        if s0 != sc:
            return False, f"trade set changed for {prices} at {c}"
        n_trades = len(mps.aggregate_trades(s0, prices, ES, 0))
        ratio = Fraction(mps.pl(s0, prices, ES, 0) - mps.pl(sc, prices, ES, c), 2 * n_trades * c)
        if ratio != 1:
            return False, f"ratio {ratio} for {prices} at {c}"
        checked += 1
    return True, f"{checked} chains, ratio exactly 1"


# 6

ZBM13_P = ["0.584630058", "0.173952889", "0.078165303", "0.042982386", "0.026656006",
            "0.017906011", "0.012733336", "0.009449749", "0.007249441"]
ZBM13_SQ = (2.385873201, 1.510384234)


def direct_zeta(S, Q, terms=10**7):
    i = np.arange(terms, dtype=float)
    head = math.fsum((i + Q) ** -S)
    x = terms + Q
    # tail from the integral, trapezoid end and first derivative correction
    tail = x ** (1 - S) / (S - 1) + 0.5 * x ** -S + S * x ** (-S - 1) / 12
    return head + tail


def crit_6():
    worst = 0.0
    for S, Q in (ZBM13_SQ, (1.5, 0.5), (3.0, 2.0), (2.0, 1.0)):
        worst = max(worst, abs(D.hurwitz_zeta(S, Q) / direct_zeta(S, Q) - 1))
    zp = D.ZetaParams(*ZBM13_SQ)
    got = [f"{D.zeta_pmf(zp, k):.9f}" for k in range(9)]
    rows = _classes("zbm13_abs_b.csv")
    cl = [D.ClassBin(int(r["lo"]), int(r["hi"]), int(r["observed"])) for r in rows]
    chi2 = D.chi2_statistic([c.observed for c in cl], D.class_probabilities("hurwitz", ZBM13_SQ, cl))
    ok = worst < 1e-12 and got == ZBM13_P and abs(chi2 - 13.215) <= 0.001
    return ok, (f"max rel err {worst:.1e}, p values {'match' if got == ZBM13_P else got}, "
                f"chi2 {chi2:.6f}")


# 7

def crit_7():
    p10 = D.ExtremeType2Params(2.50205129050786, 0.145521989804209)
    den = D.extreme_pmf2_denominator(p10)
    den_ok = abs(den - 1.0000039587885819) <= 1e-12
    terms = D.euler_maclaurin_terms(D.ExtremeType2Params(3.955386, 0.142783))
    printed = ["-7.130872262e-11", "1.230723154e-15", "-5.219062910e-20"]
    got = [f"{t:.9e}" for t in terms]
    terms_ok = got == printed
    rows = _classes("zsn13_extremes.csv")
    cl = [D.ClassBin(int(r["lo"]), int(r["hi"]), int(r["observed"])) for r in rows]
    chi2 = D.chi2_statistic([c.observed for c in cl],
                            D.class_probabilities("extreme2", (p10.k, p10.b), cl))
    chi2_ok = abs(chi2 - 7.368) <= 0.005
    detail = (f"denominator {den!r} ({'ok' if den_ok else f'off by {den - 1.0000039587885819:.1e}'}), "
              f"terms {', '.join(got)} ({'ok' if terms_ok else 'printed ' + ', '.join(printed)}), "
              f"chi2 {chi2:.4f}")
    return den_ok and terms_ok and chi2_ok, detail


# 8

KUMARASWAMY_ROWS = [
    ("2013-03-01", (0.08021, 2.565, 1642.2), (6.4605, 45.495, 13.4, 234.2)),
    ("2013-03-04", (0.06680, 3.807, 10317.7), (3.5658, 58.506, 41.4, 2559)),
    ("2013-04-05", (0.1179, 4.016, 2105.7), (3.4886, 26.754, 18.3, 493.6)),
    ("2013-06-17", (0.06680, 3.807, 10317.7), (12.091, 56.331, 10.3, 152.6)),
]


def crit_8():
    bad = []
    for day, params, theory in KUMARASWAMY_ROWS:
        got = D.kumaraswamy_moments(D.KumaraswamyParams(*params))
        err = max(abs(g / t - 1) for g, t in zip(got, theory))
        if err > 0.005:
            bad.append(f"{day} off by {err:.0%}")
    return not bad, f"{len(KUMARASWAMY_ROWS) - len(bad)}/{len(KUMARASWAMY_ROWS)} rows within 0.5%" + (
        "; " + ", ".join(bad) if bad else "")


# 9

def crit_9():
    rows = _classes("aincr_classes.csv")
    stat, dof = stattests.pearson_chi2([int(r["observed"]) for r in rows],
                                       [float(r["p"]) for r in rows], 3)
    return abs(stat - 8.653) <= 0.01 and dof == 3, f"chi2 {stat:.4f}, dof {dof}"


# 10

ZBM13_B_COUNTS = (list(range(-7, 9)), [2, 2, 2, 1, 14, 59, 1808, 101598, 1770, 65, 18, 7, 1, 2, 0, 1])


def crit_10():
    m = increments.moments_from_counts(*ZBM13_B_COUNTS)
    got = {"mean": f"{m.mean:.2e}", "std": f"{m.std:.3f}", "skew": f"{m.skewness:.3f}",
           "kurtosis": f"{m.excess_kurtosis + 3:.1f}"}
    want = {"mean": "-9.50e-06", "std": "0.215", "skew": "0.194", "kurtosis": "26.3"}
    bad = [k for k in want if got[k] != want[k]]
    detail = ", ".join(f"{k} {got[k]}" for k in got)
    if bad:
        detail += "; printed " + ", ".join(f"{k} {want[k]}" for k in bad)
    return not bad, detail


# 11

def crit_11():
    e = increments.ecdf([1, 2, 2, 5, 5, 5, 7, 8, 9, 9])
    want = ((1, 0.1), (2, 0.3), (5, 0.6), (7, 0.7), (8, 0.8), (9, 1.0))
    return e.points == want, f"{e.points}"


# 12

def crit_12():
    a = increments.wald_price_change(75600, -0.00018459, 3.4886)
    b = increments.wald_price_change(75600, -0.0077511, 3.8548)
    ok = abs(a + 4.0001731) <= 1e-3 and abs(b + 152.014) <= 1e-3
    return ok, f"{a:.7f}, {b:.3f}"


# 13

def crit_13():
    with open(DATA / "independence_reference.csv") as fh:
        rows = list(csv.DictReader(fh))
    bad = []
    for r in rows:
        n, ma, mb = int(r["n"]), int(r["m_A"]), int(r["m_B"])
        el, ei = stattests.eps_l(n, ma, mb), stattests.eps_i(n, ma, mb)
        if float(f"{el:.2g}") != float(r["eps_L"]) or float(f"{ei:.2g}") != float(r["eps_I"]):
            bad.append(f"{r['table']} {r['Ticker']}")
    return not bad, f"{len(rows) - len(bad)}/{len(rows)} rows" + ("; " + ", ".join(bad) if bad else "")


# 14

def crit_14():
    cfg = chaos.EmbeddingConfig(3)
    pts = chaos.embed(chaos.Lcg64(14).uniform(3000), 3)
    same = True
    for p in (pts, np.round(pts * 5)):
        a = chaos.correlation_integral(p, cfg, "naive")
        b = chaos.correlation_integral(p, cfg, "boxed")
        same &= bool(np.array_equal(a.pairs, b.pairs))
    start = time.perf_counter()
    big = chaos.embed(chaos.Lcg64(12345).uniform(200_000), 2)
    curve = chaos.correlation_integral(big, chaos.EmbeddingConfig(2), "boxed")
    nu, _ = chaos.estimate_dimension(curve)
    took = time.perf_counter() - start
    ok = same and 1.9 <= nu <= 2.1 and took < 60
    return ok, f"boxed == naive: {same}, nu {nu:.4f} on 1e5 points in {took:.1f} s"


# 15

def crit_15():
    costs = ote.CostPair(4999, 466)
    n_min, pl_min, _ = ote.pl_lattice(ES, costs)
    birth = ote.birth_strategy_expectation(19598, ES, costs)
    per_session = 4147 / 184
    ok = (n_min, pl_min) == (8, 9068) and abs(birth + 402) <= 0.5 and f"{per_session:.1f}" == "22.5"
    return ok, f"n_min {n_min}, pl_min {pl_min / 100:.2f}, birth {birth / 100:.2f}, {per_session:.1f}/session"


# 16

def _fixture_props(name):
    spec, series, index = _props.load_fixture(name)
    _props.check_reconstruction(series, index)
    a = increments.pooled(series, index, increments.IncrementKind.A)
    _props.check_ecdf(a.values)
    costs = ote.CostPair(spec.tick_value_cents, 466)
    account = mps.AccountConfig(112750, 112750, 102500, 466)
    for prices, times in _props.session_chains(series, index):
        s0 = mps.mps0(prices, spec, 466)
        _props.check_reversal(s0)
        for s in (s0, mps.mps1(prices, spec, account), mps.mps2(prices, spec, account)):
            _props.check_no_losing(mps.aggregate_trades(s, prices, spec, 466))
        _props.check_lattice(ote.extract_otes(prices, times, spec, costs), spec, costs)


@settings(max_examples=150, deadline=None)
@given(_props.price_chains, st.sampled_from([0, 1, 466, 1250, 3000]))
def _random_strategy_props(prices, cost):
    account = mps.AccountConfig(250000, 112750, 102500, cost)
    s0 = mps.mps0(prices, ES, cost)
    _props.check_reversal(s0)
    for s in (s0, mps.mps1(prices, ES, account), mps.mps2(prices, ES, account)):
        _props.check_no_losing(mps.aggregate_trades(s, prices, ES, cost))
    costs = ote.CostPair(cost, cost // 2)
    _props.check_lattice(ote.extract_otes(prices, list(range(len(prices))), ES, costs), ES, costs)
    _props.check_ecdf(prices)


@settings(max_examples=60, deadline=None)
@given(_props.synthetic_feed())
def _random_feed_props(feed):
    _, series, index = _props.parse_feed(*feed)
    _props.check_reconstruction(series, index)
    a = increments.pooled(series, index, increments.IncrementKind.A).values
    if len(a):
        _props.check_ecdf(a)


def crit_16():
    try:
        for name in _props.FIXTURES:
            _fixture_props(name)
        _random_strategy_props()
        _random_feed_props()
    except AssertionError as exc:
        return False, f"violation: {exc}"
    return True, "both fixture files and randomized chains/feeds"


CRITERIA = {
    1: ("P&L of the five strategy columns", crit_1),
    2: ("MPS0 equals brute force", crit_2),
    3: ("MPS1/MPS2 on the ES closes", crit_3),
    4: ("do-nothing threshold", crit_4),
    5: ("cost linearity", crit_5),
    6: ("Hurwitz zeta", crit_6),
    7: ("extreme PMF", crit_7),
    8: ("Kumaraswamy moments", crit_8),
    9: ("Pearson chi2 on the a-increment classes", crit_9),
    10: ("moment conventions on the ZBM13 b-counts", crit_10),
    11: ("ECDF worked example", crit_11),
    12: ("Wald illustration", crit_12),
    13: ("independence thresholds", crit_13),
    14: ("correlation dimension", crit_14),
    15: ("OTE lattice", crit_15),
    16: ("property suites", crit_16),
}


def run_one(k):
    title, fn = CRITERIA[k]
    ok, detail = fn()
    return ok, f"{'PASS' if ok else 'FAIL'} criterion {k}: {title}: {detail}"


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k, request):
    from conftest import ACCEPTANCE_LINES
    ok, line = run_one(k)
    request.config.stash[ACCEPTANCE_LINES].append(line)
    print(line)
    assert ok, line


if __name__ == "__main__":
    failed = 0
    for k in sorted(CRITERIA):
        ok, line = run_one(k)
        failed += not ok
        print(line, flush=True)
    sys.exit(1 if failed else 0)
