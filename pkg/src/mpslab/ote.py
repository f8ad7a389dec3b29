"""Optimal trading elements: MPS0 trades found with a filtering cost and
valued at a trading cost, plus their profit lattice and cross-contract map."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .increments import Ecdf, MomentSummary, ecdf, epdf, moments
from .mps import aggregate_trades, mps0
from .ticks import ContractSpec


class MismatchedFCost(ValueError):
    pass


class EmptyElements(ValueError):
    pass


class Direction(enum.Enum):
    BOTE = "BOTE"      # entered with a buy
    SOTE = "SOTE"      # entered with a sell


@dataclass(frozen=True)
class CostPair:
    f_cost_cents: int
    t_cost_cents: int

    def __post_init__(self):
        if not 0 <= self.t_cost_cents <= self.f_cost_cents:
            raise ValueError("need 0 <= t-cost <= f-cost")


@dataclass(frozen=True)
class OteElement:
    direction: Direction
    entry_index: int
    entry_time: int
    entry_price: int
    exit_index: int
    exit_time: int
    exit_price: int
    profit_cents: int
    session: int = 0
    notes: dict = field(default_factory=dict, compare=False)

    @property
    def duration_s(self) -> int:
        return self.exit_time - self.entry_time


def extract_otes(prices: Sequence[int], times: Sequence[int], spec: ContractSpec,
                 costs: CostPair, session: int = 0) -> list[OteElement]:
    """OTEs of one session chain."""
    strat = mps0(prices, spec, costs.f_cost_cents)
    out = []
    for tr in aggregate_trades(strat, prices, spec, costs.t_cost_cents, times):
        out.append(OteElement(Direction.BOTE if tr.units > 0 else Direction.SOTE,
                              tr.entry_index, int(times[tr.entry_index]), tr.entry_price,
                              tr.exit_index, int(times[tr.exit_index]), tr.exit_price,
                              tr.pl_cents, session))
    return out


def extract_session_otes(sessions: Sequence[tuple], spec: ContractSpec,
                         costs: CostPair) -> list[OteElement]:
    """sessions: iterable of (prices, times); OTEs never cross a session boundary."""
    out = []
    for k, (p, t) in enumerate(sessions):
        out.extend(extract_otes(p, t, spec, costs, k))
    return out


def pl_lattice(spec: ContractSpec, costs: CostPair):
    """(n_min, pl_min, step): every OTE profit is pl_min + step * i, i >= 0."""
    tv = spec.tick_value_cents
    n_min = 2 * costs.f_cost_cents // tv + 1
    return n_min, tv * n_min - 2 * costs.t_cost_cents, tv


def profit_index(pl_cents: int, spec: ContractSpec, costs: CostPair) -> int:
    tv = spec.tick_value_cents
    q, r = divmod(pl_cents + 2 * costs.t_cost_cents, tv)
    if r:
        raise ValueError(f"{pl_cents} is not on the profit lattice")
    return q - 1 - 2 * costs.f_cost_cents // tv


def map_contracts(spec1: ContractSpec, costs1: CostPair, spec2: ContractSpec,
                  costs2: CostPair, pl1_cents: int) -> int:
    """Profit of contract 2 at the lattice index contract 1's profit sits on."""
    if costs1.f_cost_cents != costs2.f_cost_cents:
        raise MismatchedFCost("both contracts must be filtered with the same f-cost")
    i = profit_index(pl1_cents, spec1, costs1)
    tv2 = spec2.tick_value_cents
    return tv2 * (i + 1 + 2 * costs2.f_cost_cents // tv2) - 2 * costs2.t_cost_cents


@dataclass(frozen=True)
class OteStats:
    profits: MomentSummary
    durations: MomentSummary
    count: int
    sessions: int
    profit_ecdf: Ecdf
    index_ecdf: Ecdf
    profit_epdf: list

    @property
    def mean_per_session(self) -> float:
        return self.count / self.sessions


def ote_stats(elements: Sequence[OteElement], sessions: int, spec: ContractSpec,
              costs: CostPair) -> OteStats:
    if not elements:
        raise EmptyElements("no OTEs")
    profits = np.array([e.profit_cents for e in elements], dtype=np.int64)
    durations = np.array([e.duration_s for e in elements], dtype=np.int64)
    idx = [profit_index(int(v), spec, costs) for v in profits]
    return OteStats(moments(profits), moments(durations), len(elements), sessions,
                    ecdf(profits), ecdf(idx), epdf(profits))


def birth_strategy_expectation(elements, spec: ContractSpec, costs: CostPair) -> float:
    """Expected result per trade of entering each OTE at its birth price.

    elements is either a list of OTEs or their mean profit in cents.
    """
    if isinstance(elements, (int, float)):
        mean = float(elements)
    else:
        if not elements:
            raise EmptyElements("no OTEs")
        mean = sum(e.profit_cents for e in elements) / len(elements)
    n_min, _, _ = pl_lattice(spec, costs)
    return mean - 2 * spec.tick_value_cents * n_min


OTE_COLUMNS = "F-Cost,N_OTE,Mean,Min,n_min,Max,n_max,StdDev,Skew,E-Kurt"


def ote_row(costs: CostPair, m: MomentSummary, divisor: float = 100.0) -> str:
    """Table row; profits in dollars by default, durations with divisor=1."""
    f = lambda v: "" if v is None else f"{v:.5g}"
    return (f"{costs.f_cost_cents / 100:.2f},{m.size},{f(m.mean / divisor)},"
            f"{m.min / divisor:g},{m.n_min},{m.max / divisor:g},{m.n_max},"
            f"{f(m.std / divisor)},{f(m.skewness)},{f(m.excess_kurtosis)}")
