"""Exact P&L accounting and the maximum profit strategies MPS0, MPS1, MPS2.

Prices are integer tick counts, money is integer cents. A strategy is a list
of (tick index, signed units) actions.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence


from .ticks import ContractSpec

INT64_MAX = 2 ** 63 - 1


class IndexOutOfRange(IndexError):
    pass


class InsufficientAccount(ValueError):
    pass


class NonZeroNet(ValueError):
    pass


class EmptyChain(ValueError):
    pass


class PositionOverflow(OverflowError):
    pass


@dataclass(frozen=True)
class Action:
    index: int
    units: int


@dataclass(frozen=True)
class Strategy:
    actions: tuple[Action, ...]

    def __post_init__(self):
        idx = [a.index for a in self.actions]
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("action indices must be strictly increasing")
        if any(a.units == 0 for a in self.actions):
            raise ValueError("zero-unit action")

    @classmethod
    def from_column(cls, column: Sequence[int]) -> "Strategy":
        return cls(tuple(Action(i, int(u)) for i, u in enumerate(column) if u))

    def column(self, n: int) -> list[int]:
        out = [0] * n
        for a in self.actions:
            out[a.index] = a.units
        return out

    @property
    def net(self) -> int:
        return sum(a.units for a in self.actions)

    def __len__(self):
        return len(self.actions)


@dataclass(frozen=True)
class AccountConfig:
    initial_account_cents: int
    initial_margin_cents: int
    maintenance_margin_cents: int
    cost_cents: int

    def __post_init__(self):
        if self.initial_margin_cents <= 0 or self.initial_account_cents <= 0:
            raise ValueError("account and initial margin must be positive")
        if self.maintenance_margin_cents > self.initial_margin_cents:
            raise ValueError("maintenance margin exceeds initial margin")
        if self.cost_cents < 0:
            raise ValueError("negative cost")


def _check(value: int) -> int:
    if abs(value) > INT64_MAX:
        raise PositionOverflow(f"{value} does not fit in 64 bits")
    return value


def pl(strategy: Strategy, prices: Sequence[int], spec: ContractSpec, cost_cents: int) -> int:
    """PL = tv (n_last sum U - sum n_i U_i) - C sum |U_i| - C |sum U|.

    n_last is the last price of the chain; an open position is offset there.
    """
    if not strategy.actions:
        return 0
    n = len(prices)
    if strategy.actions[-1].index >= n or strategy.actions[0].index < 0:
        raise IndexOutOfRange("action outside the price chain")
    last = int(prices[-1])
    net = strategy.net
    value = last * net - sum(int(prices[a.index]) * a.units for a in strategy.actions)
    costs = cost_cents * (sum(abs(a.units) for a in strategy.actions) + abs(net))
    return _check(spec.tick_value_cents * value - costs)


# MPS0

def mps0(prices: Sequence[int], spec: ContractSpec, cost_cents: int, variant: str = "l") -> Strategy:
    """Most profitable chain of unit positions, closed at the last price.

    Among equal-profit chains the one with fewest trades wins, so break-even
    trades never appear. Remaining ties: the l variant acts as early as it
    can (largest move first, buying before selling), the r variant waits.
    """
    if variant not in ("l", "r"):
        raise ValueError("variant is 'l' or 'r'")
    p = [int(x) for x in prices]
    n = len(p)
    if n == 0:
        return Strategy(())
    tv = spec.tick_value_cents
    big = n + 2
    states = (-1, 0, 1)
    # value[i][s]: best score from tick i on, holding s before acting at i
    value = [[0, 0, 0] for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        for si, s in enumerate(states):
            if i == n - 1:
                value[i][si] = -cost_cents * abs(s) * big
                continue
            best = None
            for qi, q in enumerate(states):
                v = _step_score(s, q, p[i], p[i + 1], tv, cost_cents, big) + value[i + 1][qi]
                if best is None or v > best:
                    best = v
            value[i][si] = best

    order = _preference(variant)
    actions = []
    pos = 0
    for i in range(n - 1):
        best = value[i][pos + 1]
        for q in order(pos):
            v = _step_score(pos, q, p[i], p[i + 1], tv, cost_cents, big) + value[i + 1][q + 1]
            if v == best:
                break
        if q != pos:
            actions.append(Action(i, q - pos))
        pos = q
    if pos:
        actions.append(Action(n - 1, -pos))
    return Strategy(tuple(actions))


def _step_score(s, q, price, next_price, tv, cost, big):
    trade = 1 if q != 0 and q != s else 0
    return (q * (next_price - price) * tv - cost * abs(q - s)) * big - trade


def _preference(variant):
    def l_order(pos):
        moves = [q for q in (-1, 0, 1) if q != pos]
        moves.sort(key=lambda q: (-abs(q - pos), -(q - pos)))
        return moves + [pos]

    def r_order(pos):
        return [pos] + l_order(pos)[:-1]

    return l_order if variant == "l" else r_order


def positions(strategy: Strategy, n: int) -> list[int]:
    """Position held after acting at each tick."""
    out, pos = [], 0
    col = strategy.column(n)
    for u in col:
        pos += u
        out.append(pos)
    return out


# reinvesting strategies

def _reinvest(prices, spec, account: AccountConfig, between_swings: bool, variant="l") -> Strategy:
    if account.initial_account_cents < account.initial_margin_cents:
        raise InsufficientAccount("account below one initial margin")
    p = [int(x) for x in prices]
    n = len(p)
    base = mps0(p, spec, account.cost_cents, variant)
    if not base.actions:
        return base
    target_dir = {a.index: 0 for a in base.actions}
    for i, q in enumerate(positions(base, n)):
        if i in target_dir:
            target_dir[i] = (q > 0) - (q < 0)
    tv, C, im = spec.tick_value_cents, account.cost_cents, account.initial_margin_cents
    # price of the next swing at or after each tick
    swing_price = [0] * n
    nxt = p[-1]
    for i in range(n - 1, -1, -1):
        if i in target_dir:
            nxt = p[i]
        swing_price[i] = nxt
    cash = account.initial_account_cents
    pos = 0
    actions = []
    for i in range(n):
        if i:
            cash += pos * (p[i] - p[i - 1]) * tv
        a = 0
        if i in target_dir:
            d = target_dir[i]
            if d == 0:
                a = -pos
            else:
                # size from equity left after offsetting the current position
                a = d * ((cash - C * abs(pos)) // im) - pos
        elif between_swings and pos:
            size = cash // im
            # an add-on lot must still earn more than its round trip at the swing
            gain = tv * (swing_price[i] - p[i]) * (1 if pos > 0 else -1)
            if size > abs(pos) and gain > 2 * C:
                a = (size - abs(pos)) * (1 if pos > 0 else -1)
        if a:
            cash -= C * abs(a)
            pos = _check(pos + a)
            actions.append(Action(i, a))
        _check(cash)
    return Strategy(tuple(actions))


def mps1(prices, spec: ContractSpec, account: AccountConfig, variant: str = "l") -> Strategy:
    return _reinvest(prices, spec, account, False, variant)


def mps2(prices, spec: ContractSpec, account: AccountConfig, variant: str = "l") -> Strategy:
    return _reinvest(prices, spec, account, True, variant)


# trades

@dataclass(frozen=True)
class Trade:
    entry_index: int
    entry_price: int
    units: int               # signed: positive long
    exit_index: int
    exit_price: int
    pl_cents: int
    duration_s: int

    @property
    def pl_per_unit(self) -> float:
        return self.pl_cents / abs(self.units)


def aggregate_trades(strategy: Strategy, prices: Sequence[int], spec: ContractSpec,
                     cost_cents: int, times: Sequence[int] | None = None) -> list[Trade]:
    """Split a zero-net strategy into first-in first-out unit lots."""
    if strategy.net != 0:
        raise NonZeroNet(f"net action {strategy.net}")
    t = list(range(len(prices))) if times is None else [int(x) for x in times]
    tv = spec.tick_value_cents
    lots: deque = deque()          # [index, signed units]
    trades = []
    for act in strategy.actions:
        u = act.units
        while u and lots and (lots[0][1] > 0) != (u > 0):
            idx, lu = lots[0]
            k = min(abs(lu), abs(u))
            sign = 1 if lu > 0 else -1
            move = (int(prices[act.index]) - int(prices[idx])) * sign
            trades.append(Trade(idx, int(prices[idx]), sign * k, act.index, int(prices[act.index]),
                                _check(k * (tv * move - 2 * cost_cents)), t[act.index] - t[idx]))
            if k == abs(lu):
                lots.popleft()
            else:
                lots[0][1] = lu - sign * k
            u += sign * k
        if u:
            lots.append([act.index, u])
    return trades


# summary

SUMMARY_FIELDS = (
    ("total_pl", "Total P&L"), ("total_pl_unit", "Total P&L/unit"),
    ("gross_profit", "Gross profit"), ("gross_profit_unit", "Gross profit/unit"),
    ("gross_loss", "Gross loss"), ("gross_loss_unit", "Gross loss/unit"),
    ("trades", "Total number of trades"), ("wins", "Number of winning trades"),
    ("losses", "Number of losing trades"),
    ("avg_profit", "Average profit"), ("avg_profit_unit", "Average profit/unit"),
    ("avg_loss", "Average loss"), ("avg_loss_unit", "Average loss/unit"),
    ("largest_win", "Largest winning trade"), ("largest_win_unit", "Largest winning trade/unit"),
    ("largest_loss", "Largest losing trade"), ("largest_loss_unit", "Largest losing trade/unit"),
    ("max_consecutive_wins", "Max number of consecutive wins"),
    ("max_consecutive_losses", "Max number of consecutive losses"),
    ("max_consecutive_profit", "Maximum consecutive profit"),
    ("max_consecutive_profit_unit", "Maximum consecutive profit/unit"),
    ("max_consecutive_loss", "Maximum consecutive loss"),
    ("max_consecutive_loss_unit", "Maximum consecutive loss/unit"),
    ("elapsed_s", "Total elapsed seconds"),
    ("position_s", "Total trade seconds on positions"),
    ("profit_s", "Total trade profit seconds"),
    ("loss_s", "Total trade loss seconds"),
    ("max_account", "Maximum account value"), ("min_account", "Minimum account value"),
    ("largest_drawdown", "Largest drawdown"), ("average_drawdown", "Average drawdown"),
)


@dataclass(frozen=True)
class StrategySummary:
    total_pl: int
    total_pl_unit: float
    gross_profit: int
    gross_profit_unit: float
    gross_loss: int
    gross_loss_unit: float
    trades: int
    wins: int
    losses: int
    avg_profit: float
    avg_profit_unit: float
    avg_loss: float
    avg_loss_unit: float
    largest_win: int
    largest_win_unit: float
    largest_loss: int
    largest_loss_unit: float
    max_consecutive_wins: int
    max_consecutive_losses: int
    max_consecutive_profit: int
    max_consecutive_profit_unit: float
    max_consecutive_loss: int
    max_consecutive_loss_unit: float
    elapsed_s: int
    position_s: int
    profit_s: int
    loss_s: int
    max_account: int
    min_account: int
    largest_drawdown: int
    average_drawdown: float

    @property
    def parallelization(self) -> float:
        return self.position_s / self.elapsed_s if self.elapsed_s else 0.0

    def lines(self) -> list[str]:
        """Report lines; money is printed in dollars."""
        out = []
        for name, label in SUMMARY_FIELDS:
            v = getattr(self, name)
            money = not name.startswith(("trades", "wins", "losses", "max_consecutive_w",
                                         "max_consecutive_l")) and not name.endswith("_s")
            out.append(f"{label}={_fmt(v / 100 if money else v)}")
        return out


def _fmt(v) -> str:
    if isinstance(v, int):
        return str(v)
    return f"{v:.6f}".rstrip("0").rstrip(".") if v == v else "nan"


def account_path(strategy: Strategy, prices: Sequence[int], spec: ContractSpec,
                 account: AccountConfig) -> list[int]:
    """Initial account followed by post-action equity at every tick."""
    tv, C = spec.tick_value_cents, account.cost_cents
    col = strategy.column(len(prices))
    cash = account.initial_account_cents
    out = [cash]
    pos = 0
    for i, u in enumerate(col):
        if i:
            cash += pos * (int(prices[i]) - int(prices[i - 1])) * tv
        cash -= C * abs(u)
        pos += u
        out.append(cash)
    return out


def drawdowns(path: Sequence[int]) -> list[int]:
    """Equity minus running peak at every tick; path[0] is the opening account."""
    out, peak = [], path[0]
    for v in path[1:]:
        peak = max(peak, v)
        out.append(v - peak)
    return out


def _runs(values, pred):
    best_n, best_sum, best_unit = 0, 0, 0.0
    n, s, su = 0, 0, 0.0
    for pl_, unit in values:
        if pred(pl_):
            n, s, su = n + 1, s + pl_, su + unit
            if n > best_n:
                best_n = n
            if abs(s) > abs(best_sum):
                best_sum, best_unit = s, su
        else:
            n, s, su = 0, 0, 0.0
    return best_n, best_sum, best_unit


def summarize(strategy: Strategy, prices: Sequence[int], times: Sequence[int] | None,
              spec: ContractSpec, account: AccountConfig) -> StrategySummary:
    n = len(prices)
    t = list(range(n)) if times is None else [int(x) for x in times]
    trades = sorted(aggregate_trades(strategy, prices, spec, account.cost_cents, t),
                    key=lambda tr: (tr.exit_index, tr.entry_index))
    wins = [tr for tr in trades if tr.pl_cents > 0]
    losses = [tr for tr in trades if tr.pl_cents <= 0]
    unit = lambda ts: sum(tr.pl_per_unit for tr in ts)
    total = sum(tr.pl_cents for tr in trades)
    gp, gl = sum(tr.pl_cents for tr in wins), sum(tr.pl_cents for tr in losses)
    seq = [(tr.pl_cents, tr.pl_per_unit) for tr in trades]
    cw, cw_sum, cw_unit = _runs(seq, lambda v: v > 0)
    cl, cl_sum, cl_unit = _runs(seq, lambda v: v <= 0)
    path = account_path(strategy, prices, spec, account)
    dd = drawdowns(path)
    avg = lambda s, k: s / k if k else 0.0
    return StrategySummary(
        total_pl=total, total_pl_unit=unit(trades),
        gross_profit=gp, gross_profit_unit=unit(wins),
        gross_loss=gl, gross_loss_unit=unit(losses),
        trades=len(trades), wins=len(wins), losses=len(losses),
        avg_profit=avg(gp, len(wins)), avg_profit_unit=avg(unit(wins), len(wins)),
        avg_loss=avg(gl, len(losses)), avg_loss_unit=avg(unit(losses), len(losses)),
        largest_win=max((tr.pl_cents for tr in wins), default=0),
        largest_win_unit=max((tr.pl_per_unit for tr in wins), default=0.0),
        largest_loss=min((tr.pl_cents for tr in losses), default=0),
        largest_loss_unit=min((tr.pl_per_unit for tr in losses), default=0.0),
        max_consecutive_wins=cw, max_consecutive_losses=cl,
        max_consecutive_profit=cw_sum, max_consecutive_profit_unit=cw_unit,
        max_consecutive_loss=cl_sum, max_consecutive_loss_unit=cl_unit,
        elapsed_s=(t[-1] - t[0]) if n else 0,
        position_s=sum(tr.duration_s for tr in trades),
        profit_s=sum(tr.duration_s for tr in wins),
        loss_s=sum(tr.duration_s for tr in losses),
        max_account=max(path), min_account=min(path),
        largest_drawdown=min(dd, default=0),
        average_drawdown=avg(sum(dd), len(dd)),
    )


# thresholds, sweeps, spectra

def do_nothing_threshold(prices: Sequence[int], spec: ContractSpec) -> float:
    """k (P_max - P_min) / 2 in cents."""
    if len(prices) == 0:
        raise EmptyChain("no prices")
    return spec.tick_value_cents * (max(prices) - min(prices)) / 2


@dataclass(frozen=True)
class CostSweep:
    costs: tuple[int, ...]
    profits: tuple[int, ...]
    trades: tuple[int, ...]


def cost_sweep(prices: Sequence[int], spec: ContractSpec, costs: Sequence[int]) -> CostSweep:
    if list(costs) != sorted(costs):
        raise ValueError("cost grid must be ascending")
    prof, ntr = [], []
    for c in costs:
        s = mps0(prices, spec, c)
        prof.append(pl(s, prices, spec, c))
        ntr.append(len(aggregate_trades(s, prices, spec, c)))
    return CostSweep(tuple(costs), tuple(prof), tuple(ntr))


def transaction_spectrum(strategy: Strategy, times: Sequence[int] | None = None) -> list[tuple]:
    return [(a.index, a.index if times is None else int(times[a.index]), a.units)
            for a in strategy.actions]
