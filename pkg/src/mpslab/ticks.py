"""Time & Sales parsing, contract table and session segmentation.

Prices are kept as integer multiples of the contract tick (delta) and money
as integer cents, so nothing downstream accumulates float error.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from datetime import date, datetime, time, timedelta, timezone
from decimal import Decimal, InvalidOperation
from typing import Iterable, Sequence

import numpy as np


class TickDataError(ValueError):
    """Base class for ingestion and segmentation problems."""


class MalformedLine(TickDataError):
    pass


class NonLatticePrice(TickDataError):
    pass


class NegativeSize(TickDataError):
    pass


class TickOutsideCalendar(TickDataError):
    pass


class TimeOrderError(TickDataError):
    pass


class EmptySegment(TickDataError):
    pass


@dataclass(frozen=True)
class ContractSpec:
    symbol: str
    delta: Decimal
    tick_value_cents: int
    point_value_cents: int
    initial_margin_cents: int = 0
    maintenance_margin_cents: int = 0
    months: frozenset = frozenset()
    # some feeds quote in multiples of the official tick (NG reports 0.01
    # while delta is 0.001); used only when presenting increments
    report_divisor: int = 1

    def __post_init__(self):
        if not isinstance(self.delta, Decimal):
            object.__setattr__(self, "delta", Decimal(str(self.delta)))
        if self.delta <= 0 or self.tick_value_cents <= 0:
            raise ValueError(f"{self.symbol}: delta and tick value must be positive")
        if self.point_value_cents * self.delta != self.tick_value_cents:
            raise ValueError(f"{self.symbol}: point value times delta != tick value")
        if self.maintenance_margin_cents > self.initial_margin_cents:
            raise ValueError(f"{self.symbol}: maintenance margin above initial margin")

    def to_ticks(self, price) -> int:
        q = Decimal(str(price)) / self.delta
        if q != q.to_integral_value():
            raise NonLatticePrice(f"{price} is not a multiple of {self.delta}")
        return int(q)

    def to_price(self, ticks: int) -> Decimal:
        return ticks * self.delta


_MONTHS_ALL = "FGHJKMNQUVXZ"

# symbol, delta, tick value in cents, listed months
_TABLE = [
    ("ZB", "0.03125", 3125, "HMUZ"),
    ("ZC", "0.25", 1250, "HKNUZ"),
    ("ZS", "0.25", 1250, "FHKNQUX"),
    ("ZW", "0.25", 1250, "HKNUZ"),
    ("6A", "0.0001", 1000, "HMUZ"),
    ("6B", "0.0001", 625, "HMUZ"),
    ("6C", "0.0001", 1000, "HMUZ"),
    ("6E", "0.0001", 1250, "HMUZ"),
    ("6J", "0.0001", 1250, "HMUZ"),
    ("ES", "0.25", 1250, "HMUZ"),
    ("GE", "0.0025", 625, _MONTHS_ALL),
    ("LE", "0.025", 1000, "GJMQVZ"),
    ("HE", "0.025", 1000, "GJKMQVZ"),
    ("CL", "0.01", 1000, _MONTHS_ALL),
    ("GC", "0.1", 1000, _MONTHS_ALL),
    ("HG", "0.0005", 1250, _MONTHS_ALL),
    ("NG", "0.001", 1000, _MONTHS_ALL),
    ("SI", "0.005", 2500, "FHKNUZ"),
]

_MARGINS = {"ES": (112750, 102500)}
_REPORT_DIVISOR = {"NG": 10}


def builtin_contract_table() -> list[ContractSpec]:
    out = []
    for sym, d, tv, months in _TABLE:
        delta = Decimal(d)
        im, mm = _MARGINS.get(sym, (0, 0))
        out.append(ContractSpec(
            symbol=sym, delta=delta, tick_value_cents=tv,
            point_value_cents=int(tv / delta),
            initial_margin_cents=im, maintenance_margin_cents=mm,
            months=frozenset(months), report_divisor=_REPORT_DIVISOR.get(sym, 1),
        ))
    return out


def lookup_contract(symbol: str) -> ContractSpec | None:
    """Find a contract by product symbol or full ticker (ESM13 -> ES)."""
    symbol = symbol.upper()
    table = {c.symbol: c for c in builtin_contract_table()}
    if symbol in table:
        return table[symbol]
    if len(symbol) > 2 and symbol[:2] in table and symbol[2] in _MONTHS_ALL:
        return table[symbol[:2]]
    return None


@dataclass(frozen=True, slots=True)
class Tick:
    time_s: int            # UTC epoch seconds
    price_ticks: int
    volume: int
    indicator: str = "T"
    millis: int = 0
    utc_offset_min: int = 0

    @property
    def local_s(self) -> int:
        return self.time_s + 60 * self.utc_offset_min


@dataclass(frozen=True)
class TickSeries:
    contract: ContractSpec
    ticks: tuple = ()

    def __len__(self):
        return len(self.ticks)

    def times(self) -> np.ndarray:
        return np.fromiter((t.time_s for t in self.ticks), dtype=np.int64, count=len(self.ticks))

    def prices(self) -> np.ndarray:
        return np.fromiter((t.price_ticks for t in self.ticks), dtype=np.int64, count=len(self.ticks))

    def volumes(self) -> np.ndarray:
        return np.fromiter((t.volume for t in self.ticks), dtype=np.int64, count=len(self.ticks))


def _parse_stamp(day: str, clock: str, lineno: int):
    # clock looks like 08:33:23.000-06 (offset may also be +05:30 or absent)
    body, sign, off = clock, "", ""
    for s in "+-":
        pos = clock.rfind(s)
        if pos > 0:
            body, sign, off = clock[:pos], s, clock[pos + 1:]
            break
    try:
        if "." in body:
            hms, frac = body.split(".")
            millis = int(frac.ljust(3, "0")[:3])
        else:
            hms, millis = body, 0
        naive = datetime.strptime(f"{day} {hms}", "%Y-%m-%d %H:%M:%S")
        if sign:
            hh, _, mm = off.partition(":")
            offset = int(hh) * 60 + int(mm or 0)
            offset = -offset if sign == "-" else offset
        else:
            offset = 0
    except ValueError as exc:
        raise MalformedLine(f"line {lineno}: bad timestamp {day} {clock}") from exc
    local = int(naive.replace(tzinfo=timezone.utc).timestamp())
    return local - 60 * offset, millis, offset


def parse_line(line: str, spec: ContractSpec, lineno: int = 0) -> Tick:
    parts = line.split()
    if len(parts) != 5:
        raise MalformedLine(f"line {lineno}: expected 5 fields, got {len(parts)}")
    day, clock, price, size, ind = parts
    t, millis, offset = _parse_stamp(day, clock, lineno)
    try:
        p = Decimal(price)
        v = int(size)
    except (InvalidOperation, ValueError) as exc:
        raise MalformedLine(f"line {lineno}: bad price or size") from exc
    if v < 0:
        raise NegativeSize(f"line {lineno}: negative size {v}")
    try:
        n = spec.to_ticks(p)
    except NonLatticePrice as exc:
        raise NonLatticePrice(f"line {lineno}: {exc}") from None
    if n < 0:
        raise NonLatticePrice(f"line {lineno}: negative price {price}")
    if ind == "T" and v < 1:
        raise NegativeSize(f"line {lineno}: trade with size {v}")
    return Tick(t, n, v, ind, millis, offset)


def parse_time_sales(lines: Iterable[str], spec: ContractSpec,
                     indicators: Sequence[str] | None = ("T",)) -> TickSeries:
    """Parse `YYYY-MM-DD HH:MM:SS.mmm-TZ price size IND` records.

    File order is kept as is: with one-second stamps the arrival order is
    the only ordering information there is.
    """
    if isinstance(lines, str):
        lines = io.StringIO(lines)
    ticks = []
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        tk = parse_line(line, spec, lineno)
        if indicators is None or tk.indicator in indicators:
            ticks.append(tk)
    return TickSeries(spec, tuple(ticks))


def format_price(ticks: int, spec: ContractSpec) -> str:
    s = format(spec.to_price(ticks).normalize(), "f")
    return s


def format_tick(tk: Tick, spec: ContractSpec) -> str:
    local = datetime.fromtimestamp(tk.local_s, tz=timezone.utc)
    off = tk.utc_offset_min
    sign = "-" if off < 0 else "+"
    hh, mm = divmod(abs(off), 60)
    tz = f"{sign}{hh:02d}" + (f":{mm:02d}" if mm else "")
    return (f"{local:%Y-%m-%d %H:%M:%S}.{tk.millis:03d}{tz} "
            f"{format_price(tk.price_ticks, spec)} {tk.volume} {tk.indicator}")


def format_time_sales(series: TickSeries) -> list[str]:
    return [format_tick(t, series.contract) for t in series.ticks]


# -- calendar and sessions --------------------------------------------------

@dataclass(frozen=True)
class CalendarDay:
    day: date
    ranges: tuple   # ((open_local_s, close_local_s), ...)


def _clock(s: str) -> time:
    return datetime.strptime(s.strip(), "%H:%M:%S" if s.count(":") == 2 else "%H:%M").time()


def _local_epoch(d: date, t: time) -> int:
    return int(datetime.combine(d, t, tzinfo=timezone.utc).timestamp())


def calendar_day(day: date, *clock_pairs: tuple[str, str]) -> CalendarDay:
    """Build one session from wall-clock range bounds.

    A first range whose open is later than its close starts on the previous
    calendar day (17:00 - 15:15 style overnight sessions).
    """
    ranges = []
    for k, (o, c) in enumerate(clock_pairs):
        to, tc = _clock(o), _clock(c)
        od = day - timedelta(days=1) if (k == 0 and to >= tc) else day
        lo, hi = _local_epoch(od, to), _local_epoch(day, tc)
        if hi <= lo or (ranges and lo <= ranges[-1][1]):
            raise ValueError(f"{day}: ranges must be ordered and disjoint")
        ranges.append((lo, hi))
    return CalendarDay(day, tuple(ranges))


def parse_calendar(lines: Iterable[str]) -> list[CalendarDay]:
    """Read `date,open1,close1[,open2,close2...]` rows (local exchange time)."""
    if isinstance(lines, str):
        lines = io.StringIO(lines)
    days = []
    for row in csv.reader(lines):
        if not row or row[0].startswith("#") or not row[0].strip():
            continue
        if row[0].strip().lower() == "date":
            continue
        cells = [c.strip() for c in row if c.strip()]
        if len(cells) < 3 or len(cells) % 2 == 0:
            raise ValueError(f"bad calendar row: {row}")
        d = date.fromisoformat(cells[0])
        pairs = list(zip(cells[1::2], cells[2::2]))
        days.append(calendar_day(d, *pairs))
    days.sort(key=lambda c: c.day)
    return days


@dataclass(frozen=True)
class Range:
    open_s: int     # local wall-clock seconds, same scale as Tick.local_s
    close_s: int
    first: int      # index into TickSeries.ticks
    count: int

    @property
    def stop(self) -> int:
        return self.first + self.count


@dataclass(frozen=True)
class Session:
    day: date
    ranges: tuple

    @property
    def count(self) -> int:
        return sum(r.count for r in self.ranges)


@dataclass(frozen=True)
class SessionIndex:
    sessions: tuple

    @property
    def total(self) -> int:
        return sum(s.count for s in self.sessions)

    def iter_ranges(self):
        for s_i, s in enumerate(self.sessions):
            for r_i, r in enumerate(s.ranges):
                yield s_i, r_i, r


def segment_sessions(series: TickSeries, calendar: Sequence[CalendarDay]) -> SessionIndex:
    """Assign each tick to exactly one (session, range).

    Ticks must appear in file order inside declared ranges; a stamp that
    goes backwards inside a session is rejected rather than re-sorted.
    Range bounds are inclusive at one-second resolution.
    """
    bounds = []
    for s_i, cd in enumerate(calendar):
        for r_i, (lo, hi) in enumerate(cd.ranges):
            bounds.append((lo, hi, s_i, r_i))
    bounds.sort()
    for a, b in zip(bounds, bounds[1:]):
        if b[0] <= a[1]:
            raise ValueError("calendar ranges overlap")
    starts = np.array([b[0] for b in bounds], dtype=np.int64)

    counts = {}
    firsts = {}
    last_slot = -1
    last_t = None
    for i, tk in enumerate(series.ticks):
        t = tk.local_s
        j = int(np.searchsorted(starts, t, side="right")) - 1
        if j < 0 or t > bounds[j][1]:
            raise TickOutsideCalendar(f"tick {i} at {format_tick(tk, series.contract)} is in no declared range")
        if j < last_slot:
            raise TimeOrderError(f"tick {i} goes back to an earlier range")
        if j == last_slot and t < last_t:
            raise TimeOrderError(f"tick {i} time decreases inside a range")
        if j != last_slot:
            if j in firsts:
                raise TimeOrderError(f"tick {i} re-enters a finished range")
            firsts[j] = i
        counts[j] = counts.get(j, 0) + 1
        last_slot, last_t = j, t

    sessions = []
    pos = 0
    slot = {(b[2], b[3]): j for j, b in enumerate(bounds)}
    for s_i, cd in enumerate(calendar):
        rs = []
        for r_i, (lo, hi) in enumerate(cd.ranges):
            j = slot[(s_i, r_i)]
            n = counts.get(j, 0)
            first = firsts.get(j, pos)
            rs.append(Range(lo, hi, first, n))
            pos = first + n
        sessions.append(Session(cd.day, tuple(rs)))
    return SessionIndex(tuple(sessions))


def dollar_range(prices_ticks, spec: ContractSpec) -> int:
    """Money equivalent of the high-low range of a segment, in cents."""
    p = np.asarray(prices_ticks if not isinstance(prices_ticks, TickSeries)
                   else prices_ticks.prices())
    if p.size == 0:
        raise EmptySegment("empty segment")
    return spec.tick_value_cents * int(p.max() - p.min())
