"""Property checks shared by the property tests and the acceptance run.

Each check raises AssertionError with a short reason on the first violation.
"""
import itertools
from datetime import date, timedelta
from pathlib import Path

import numpy as np
from hypothesis import strategies as st

from mpslab import increments, ticks
from mpslab.ote import pl_lattice

DATA = Path(__file__).parent / "data"

FIXTURES = {"esz13": "ES", "zcn13": "ZC"}


def load_fixture(name):
    spec = ticks.lookup_contract(FIXTURES[name])
    with open(DATA / f"{name}_sample.txt") as fh:
        series = ticks.parse_time_sales(fh, spec)
    with open(DATA / f"{name}_calendar.csv") as fh:
        cal = ticks.parse_calendar(fh)
    return spec, series, ticks.segment_sessions(series, cal)


def session_chains(series, index):
    """(prices, utc times) per session, ranges concatenated."""
    p, t = series.prices(), series.times()
    out = []
    for s in index.sessions:
        if s.count:
            lo, hi = s.ranges[0].first, s.ranges[-1].stop
            out.append(([int(v) for v in p[lo:hi]], [int(v) for v in t[lo:hi]]))
    return out


_ENUM = {}


def _positions(n):
    if n not in _ENUM:
        _ENUM[n] = np.array(list(itertools.product((-1, 0, 1), repeat=n)), dtype=np.int64)
    return _ENUM[n]


def brute_force_pl(prices, tv, cost):
    """Best PL over every unit-position sequence, closed at the last price."""
    q = _positions(len(prices))
    p = np.asarray(prices, dtype=np.int64)
    gain = q[:, :-1] @ np.diff(p) * tv if len(p) > 1 else np.zeros(len(q), dtype=np.int64)
    prev = np.concatenate([np.zeros((len(q), 1), dtype=np.int64), q], axis=1)
    turnover = np.abs(np.diff(prev, axis=1)).sum(axis=1) + np.abs(q[:, -1])
    return int((gain - cost * turnover).max())


def check_reversal(strategy):
    u = [a.units for a in strategy.actions]
    if not u:
        return
    assert len(u) >= 2, f"single action {u}"
    assert all(x * y < 0 for x, y in zip(u, u[1:])), f"signs do not alternate: {u}"
    assert abs(u[0]) == 1 and abs(u[-1]) == 1, f"boundary sizes {u[0]}, {u[-1]}"
    assert all(abs(x) == 2 for x in u[1:-1]), f"interior sizes {u}"


def check_no_losing(trades):
    bad = [tr for tr in trades if tr.pl_cents <= 0]
    assert not bad, f"losing or break-even trade {bad[0]}"


def check_lattice(elements, spec, costs):
    _, pl_min, step = pl_lattice(spec, costs)
    for e in elements:
        q, r = divmod(e.profit_cents - pl_min, step)
        assert r == 0 and q >= 0, f"profit {e.profit_cents} off the lattice ({pl_min} + {step} i)"


def check_ecdf(values):
    e = increments.ecdf(values)
    xs = [x for x, _ in e.points]
    ps = [p for _, p in e.points]
    assert xs == sorted(set(xs)) and len(xs) == len(set(values)), "one step per distinct value"
    assert all(a < b for a, b in zip(ps, ps[1:])), "probabilities not strictly increasing"
    assert ps[-1] == 1.0, f"ends at {ps[-1]}"


def check_reconstruction(series, index):
    times, prices = increments.reconstruct(series, index)
    local = [tk.local_s for tk in series.ticks]
    assert list(times) == local, "times differ"
    assert list(prices) == list(series.prices()), "prices differ"


# random Time & Sales feeds on a fixed two-range calendar

CAL_RANGES = (("09:00", "11:00"), ("12:00", "14:00"))


@st.composite
def synthetic_feed(draw, max_sessions=3, max_ticks=25):
    """(text, calendar lines) for 1..max_sessions weekday sessions."""
    spec = ticks.lookup_contract("ZC")
    n_days = draw(st.integers(1, max_sessions))
    day0 = date(2013, 4, 1)
    price = draw(st.integers(2000, 3000))
    lines, cal = [], ["date,open1,close1,open2,close2"]
    for d in range(n_days):
        day = day0 + timedelta(days=d)
        cal.append(f"{day}," + ",".join(f"{o},{c}" for o, c in CAL_RANGES))
        for open_, _ in CAL_RANGES:
            h = int(open_[:2])
            k = draw(st.integers(1, max_ticks))
            offs = sorted(draw(st.lists(st.integers(0, 7200), min_size=k, max_size=k)))
            for off in offs:
                price = max(1, price + draw(st.integers(-3, 3)))
                hh, rem = divmod(h * 3600 + off, 3600)
                mm, ss = divmod(rem, 60)
                size = draw(st.integers(1, 50))
                lines.append(f"{day} {hh:02d}:{mm:02d}:{ss:02d}.000-05 "
                             f"{ticks.format_price(price, spec)} {size} T")
    return "\n".join(lines) + "\n", cal


def parse_feed(text, cal):
    spec = ticks.lookup_contract("ZC")
    series = ticks.parse_time_sales(text, spec)
    return spec, series, ticks.segment_sessions(series, ticks.parse_calendar(cal))


price_chains = st.lists(st.integers(0, 40), min_size=1, max_size=60)
