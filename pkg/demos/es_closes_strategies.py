"""
Maximum profit strategies on fifteen ES closes
==============================================

Buy and hold, a hand-made chain of trades and the three maximum profit
strategies, all on the same daily closes with a $4.66 cost per contract.
"""
import csv
from pathlib import Path

from mpslab import mps
from mpslab.mps import Strategy
from mpslab.ticks import lookup_contract

es = lookup_contract("ES")
with open(Path(__file__).parents[1] / "tests" / "data" / "es_closes.csv") as fh:
    prices = [es.to_ticks(row["price"]) for row in csv.DictReader(fh)]

# one contract needs $1127.50 initial margin; start with exactly that
account = mps.AccountConfig(112750, 112750, 102500, 466)

hold = Strategy.from_column([1] + [0] * 13 + [-1])
hunch = Strategy.from_column([1, 0, 0, 0, -1, 1, -1, 1, 0, 0, -1, 0, 0, 0, 0])

for name, s in [("buy and hold", hold), ("hunches", hunch),
                ("mps0", mps.mps0(prices, es, 466)),
                ("mps1", mps.mps1(prices, es, account)),
                ("mps2", mps.mps2(prices, es, account))]:
    col = s.column(len(prices))
    print(f"{name:13s} {mps.pl(s, prices, es, 466) / 100:>10.2f}  {col}")

# the summary block for the add-on strategy
summary = mps.summarize(mps.mps2(prices, es, account), prices, None, es, account)
print()
print("\n".join(summary.lines()[:8]))

# at a high enough cost nothing is worth doing
print()
print("do-nothing cost:", mps.do_nothing_threshold(prices, es) / 100)
sweep = mps.cost_sweep(prices, es, [0, 466, 5000, 20000, 60000])
for c, p, n in zip(sweep.costs, sweep.profits, sweep.trades):
    print(f"  cost {c / 100:7.2f}  profit {p / 100:9.2f}  trades {n}")
