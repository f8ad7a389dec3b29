"""
Optimal trading elements on a sample of ESZ13 ticks
===================================================

MPS0 trades found with a filtering cost f and valued with a trading
cost t. Their profits sit on a lattice pl_min + k * tick value.
"""
from pathlib import Path

from mpslab import ote, ticks

data = Path(__file__).parents[1] / "tests" / "data"
es = ticks.lookup_contract("ES")
with open(data / "esz13_sample.txt") as fh:
    series = ticks.parse_time_sales(fh, es)
with open(data / "esz13_calendar.csv") as fh:
    index = ticks.segment_sessions(series, ticks.parse_calendar(fh))

p, t = series.prices(), series.times()
sessions = [(p[s.ranges[0].first:s.ranges[-1].stop].tolist(),
             t[s.ranges[0].first:s.ranges[-1].stop].tolist())
            for s in index.sessions if s.count]

for f in (466, 1250, 4999, 12500):
    costs = ote.CostPair(f, 466)
    elems = ote.extract_session_otes(sessions, es, costs)
    n_min, pl_min, step = ote.pl_lattice(es, costs)
    ks = sorted({ote.profit_index(e.profit_cents, es, costs) for e in elems})
    print(f"f = {f / 100:6.2f}: {len(elems):4d} OTEs, n_min = {n_min}, "
          f"pl_min = {pl_min / 100:.2f}, lattice indices {ks[:6]}...")

# the same lattice index on another contract
zb = ticks.lookup_contract("ZB")
c = ote.CostPair(4999, 466)
print()
print("ES 115.68 on the lattice maps to ZB", ote.map_contracts(es, c, zb, c, 11568) / 100)
