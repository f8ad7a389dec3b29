"""Command-line front end: `mpslab <command> ...`."""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import tempfile
from decimal import Decimal, InvalidOperation
from pathlib import Path

import numpy as np

from . import chaos, distributions as dist, increments as inc, mps, ote, stattests, ticks


class UsageError(Exception):
    pass


# plumbing

def _cents(dollars: str | None) -> int | None:
    if dollars is None:
        return None
    try:
        v = Decimal(dollars) * 100
    except InvalidOperation:
        raise UsageError(f"not an amount: {dollars!r}") from None
    if v != v.to_integral_value():
        raise UsageError(f"{dollars} has fractions of a cent")
    return int(v)


def _out_dir(args) -> Path:
    d = Path(args.out or os.environ.get("MPSLAB_OUT") or ".")
    d.mkdir(parents=True, exist_ok=True)
    return d


def _write(path: Path, lines) -> Path:
    """Write text atomically: temp file in the same directory, then rename."""
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w", newline="") as fh:
        for line in lines:
            fh.write(line + "\n")
    os.replace(tmp, path)
    return path


def _csv_line(cells) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="").writerow(cells)
    return buf.getvalue()


def _contract(args, path: str | None = None) -> ticks.ContractSpec:
    sym = args.contract or (Path(path).stem.split("_")[0] if path else None)
    spec = ticks.lookup_contract(sym) if sym else None
    if spec is None:
        raise UsageError(f"unknown contract {sym!r}; pass --contract")
    return spec


def _load_series(args):
    spec = _contract(args, args.file)
    with open(args.file) as fh:
        try:
            series = ticks.parse_time_sales(fh, spec)
        except ticks.TickDataError as exc:
            raise type(exc)(f"{args.file}: {exc}") from None
    return spec, series


def _load_index(args, series):
    if not args.calendar:
        raise UsageError("this command needs --calendar")
    with open(args.calendar) as fh:
        cal = ticks.parse_calendar(fh)
    return ticks.segment_sessions(series, cal)


# commands

def cmd_parse(args) -> int:
    spec, series = _load_series(args)
    print(f"{len(series)} ticks")
    if len(series):
        p = series.prices()
        print(f"contract={spec.symbol}")
        print(f"first={ticks.format_tick(series.ticks[0], spec)}")
        print(f"last={ticks.format_tick(series.ticks[-1], spec)}")
        print(f"min_price={ticks.format_price(int(p.min()), spec)}")
        print(f"max_price={ticks.format_price(int(p.max()), spec)}")
        print(f"volume={int(series.volumes().sum())}")
    if args.calendar:
        idx = _load_index(args, series)
        ranges = sum(len(s.ranges) for s in idx.sessions)
        print(f"sessions={len(idx.sessions)} ranges={ranges}")
    return 0


def cmd_increments(args) -> int:
    spec, series = _load_series(args)
    idx = _load_index(args, series)
    sym = spec.symbol
    rows = [inc.INCREMENT_COLUMNS]

    def add(label, sample):
        m = inc.moments(sample.values) if len(sample) else None
        rows.append(inc.summary_row(label, sym, m))

    add("A", inc.pooled(series, idx, inc.IncrementKind.A))
    add("B", inc.pooled(series, idx, inc.IncrementKind.B))
    for kind, sample in inc.c_family(series, idx).items():
        add(kind.value, sample)
    a1, a2 = inc.a1_a2_increments(series, idx)
    add("A1", a1)
    add("A2", a2)
    # per session and range
    for s_i, r_i, tt, pp in inc.range_arrays(series, idx):
        day = idx.sessions[s_i].day.isoformat()
        add(f"A {day} r{r_i + 1}", inc.a_increments(tt))
        add(f"B {day} r{r_i + 1}", inc.b_increments(pp))
    path = _write(_out_dir(args) / "increments.csv", [_csv_line(r) for r in rows])
    print(path)
    return 0


def cmd_conditional(args) -> int:
    spec, series = _load_series(args)
    idx = _load_index(args, series)
    a, b = inc.range_pairs(series, idx)
    table = inc.conditional_b_given_a(a, b, args.transform, args.tail_from)
    rows = ["a," + ",".join(inc.INCREMENT_COLUMNS[2:])]
    for key, m in table.items():
        label = key if isinstance(key, int) else f"{key[1]}-{key[2]}"
        rows.append(_csv_line([label] + inc.summary_row("", "", m)[2:]))
    path = _write(_out_dir(args) / f"conditional_{args.transform}.csv", rows)
    print(path)
    return 0


def _read_classes(path):
    out = []
    with open(path) as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                lo, hi, obs = float(row[0]), float(row[1]), int(row[2])
            except ValueError:
                continue  # header
            out.append(dist.ClassBin(lo, hi, obs))
    return out


_FIT_START = {"hurwitz": [2.0, 1.0], "riemann": [2.0], "extreme2": [3.0, 0.2],
              "kumaraswamy": [0.1, 4.0, 2000.0]}


def cmd_fit(args) -> int:
    out = _out_dir(args)
    if args.moments:
        mean, std, skew, ek = (float(v) for v in args.moments.split(","))
        f = dist.fit_kumaraswamy_moments(mean, std, skew, ek)
        p = f.params
        m = dist.kumaraswamy_moments(p)
        lines = ["a,b,z_max,mean,std,skew,ekurt,shape_error,location_error",
                 f"{p.a:.6g},{p.b:.6g},{p.z_max:.6g},{m[0]:.6g},{m[1]:.6g},{m[2]:.6g},"
                 f"{m[3]:.6g},{f.shape_error:.4g},{f.location_error:.4g}"]
        for line in lines:
            print(line)
        _write(out / "fit_kumaraswamy_moments.csv", lines)
        return 0
    if not args.classes:
        raise UsageError("fit needs --classes or --moments")
    classes = _read_classes(args.classes)
    start = [float(v) for v in args.start.split(",")] if args.start else _FIT_START[args.family]
    if args.params:
        params = [float(v) for v in args.params.split(",")]
        probs = dist.class_probabilities(args.family, params, classes)
        chi2 = dist.chi2_statistic([c.observed for c in classes], probs)
        fit = dist.Chi2Fit(args.family, tuple(params), chi2, len(classes) - 1 - len(params),
                           tuple(probs), tuple(c.observed for c in classes))
    else:
        fit = dist.fit_chi2(args.family, classes, start)
    n = sum(fit.observed)
    lines = ["family,params,chi2,dof",
             f"{fit.family},{' '.join(f'{v:.10g}' for v in fit.params)},{fit.chi2:.10g},{fit.dof}",
             "lo,hi,observed,p,expected,contribution"]
    for c, p in zip(classes, fit.probabilities):
        e = n * p
        lines.append(f"{c.lo:g},{c.hi:g},{c.observed},{p:.9f},{e:.7f},{(c.observed - e) ** 2 / e:.9f}")
    for line in lines[:2]:
        print(line)
    _write(out / f"fit_{args.family}.csv", lines)
    return 0


def cmd_independence(args) -> int:
    spec, series = _load_series(args)
    idx = _load_index(args, series)
    a, b = inc.range_pairs(series, idx)
    table = stattests.contingency(a, b, "absolute" if args.absolute else "signed")
    res = stattests.independence_tests(table)
    rows = [stattests.INDEPENDENCE_COLUMNS, stattests.independence_row(spec.symbol, res)]
    print(rows[1])
    print(f"L_n {res.l_verdict}; I_n {res.i_verdict}")
    _write(_out_dir(args) / "independence.csv", rows)
    cells = ["a,b,k,diff"] + [f"{x},{y},{k},{d:.6g}"
                              for x, y, k, d in stattests.kolmogorov_cells(table, args.min_count)]
    _write(_out_dir(args) / "kolmogorov_cells.csv", cells)
    return 0


def _read_numbers(path):
    vals = []
    with open(path) as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            try:
                vals.append(float(row[-1]))
            except ValueError:
                continue
    return np.array(vals)


def cmd_corrdim(args) -> int:
    if args.series:
        x = _read_numbers(args.series)
    else:
        spec, series = _load_series(args)
        idx = _load_index(args, series)
        _, x = inc.range_pairs(series, idx)
    pts = chaos.embed(x, args.embedding)
    curve = chaos.correlation_integral(pts, chaos.EmbeddingConfig(args.embedding), args.algorithm)
    nu, span = chaos.estimate_dimension(curve)
    _write(_out_dir(args) / f"corrdim_m{args.embedding}.txt", chaos.curve_lines(curve))
    print(f"m={args.embedding} nu={nu:.4f} window={span} norm=chebyshev algorithm={args.algorithm}")
    return 0


def cmd_simulate(args) -> int:
    s = chaos.simulate_bachelier(args.p1, args.drift, args.sigma, args.n, args.time_scale, args.seed)
    lines = ["time_s,price"] + [f"{t},{p:.10f}" for t, p in zip(s.times, s.prices)]
    print(_write(_out_dir(args) / "bachelier.csv", lines))
    return 0


def _read_prices(path, spec):
    out = []
    with open(path) as fh:
        for row in csv.reader(fh):
            if not row or not row[-1].strip():
                continue
            try:
                out.append(spec.to_ticks(Decimal(row[-1].strip())))
            except InvalidOperation:
                continue  # header
    return out


def cmd_mps(args) -> int:
    cost = _cents(args.cost) if args.cost is not None else args.cost_cents
    if cost is None:
        raise UsageError("pass --cost (dollars) or --cost-cents")
    if args.prices:
        # a bare price list carries no symbol; ES unless told otherwise
        spec = ticks.lookup_contract(args.contract or "ES")
        if spec is None:
            raise UsageError(f"unknown contract {args.contract!r}")
        prices = _read_prices(args.prices, spec)
        times = list(range(len(prices)))
    else:
        spec, series = _load_series(args)
        prices = series.prices().tolist()
        times = series.times().tolist()
    margin = _cents(args.margin) if args.margin else spec.initial_margin_cents
    account_c = _cents(args.account) if args.account else margin
    if not margin:
        raise UsageError(f"{spec.symbol} has no built-in margin; pass --margin")
    acc = mps.AccountConfig(account_c, margin, min(spec.maintenance_margin_cents or margin, margin), cost)
    build = {"mps0": lambda: mps.mps0(prices, spec, cost, args.variant),
             "mps1": lambda: mps.mps1(prices, spec, acc, args.variant),
             "mps2": lambda: mps.mps2(prices, spec, acc, args.variant)}
    strat = build[args.strategy]()
    out = _out_dir(args)
    summary = mps.summarize(strat, prices, times, spec, acc)
    lines = summary.lines() + [f"Parallelization coefficient={summary.parallelization:.6f}"]
    for line in lines:
        print(line)
    _write(out / f"{args.strategy}_summary.txt", lines)
    _write(out / f"{args.strategy}_spectrum.csv",
           ["tick_index,time_s,units"] + [f"{i},{t},{u}" for i, t, u in
                                          mps.transaction_spectrum(strat, times)])
    if args.sweep:
        grid = sorted(_cents(v) for v in args.sweep.split(","))
        sw = mps.cost_sweep(prices, spec, grid)
        _write(out / "cost_sweep.csv", ["cost,profit,trades"] + [
            f"{c / 100:.2f},{p / 100:.2f},{n}" for c, p, n in zip(sw.costs, sw.profits, sw.trades)])
    return 0


def cmd_ote(args) -> int:
    spec, series = _load_series(args)
    idx = _load_index(args, series)
    t_cost = _cents(args.t_cost)
    sessions = []
    t_all, p_all = series.times(), series.prices()
    for s in idx.sessions:
        filled = [r for r in s.ranges if r.count]
        if filled:
            lo, hi = filled[0].first, filled[-1].stop
            sessions.append((p_all[lo:hi].tolist(), t_all[lo:hi].tolist()))
    out = _out_dir(args)
    prof_rows, dur_rows = [ote.OTE_COLUMNS], [ote.OTE_COLUMNS]
    for f in args.f_cost.split(","):
        costs = ote.CostPair(_cents(f), t_cost)
        elems = ote.extract_session_otes(sessions, spec, costs)
        n_min, pl_min, step = ote.pl_lattice(spec, costs)
        print(f"f-cost={f} n_min={n_min} pl_min={pl_min / 100:.2f} step={step / 100:.2f} "
              f"N_OTE={len(elems)} sessions={len(sessions)}")
        if not elems:
            continue
        st = ote.ote_stats(elems, len(sessions), spec, costs)
        print(f"mean_per_session={st.mean_per_session:.4g} "
              f"birth_expectation={ote.birth_strategy_expectation(elems, spec, costs) / 100:.4f}")
        prof_rows.append(ote.ote_row(costs, st.profits))
        dur_rows.append(ote.ote_row(costs, st.durations, divisor=1))
        _write(out / f"ote_ecdf_{f}.csv", ["profit,F"] + [f"{v / 100:.2f},{c:.6f}"
                                                         for v, c in st.profit_ecdf.points])
        _write(out / f"ote_epdf_{f}.csv", ["profit,p"] + [f"{v / 100:.2f},{c:.6f}"
                                                         for v, c in st.profit_epdf])
    _write(out / "ote_profits.csv", prof_rows)
    _write(out / "ote_durations.csv", dur_rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mpslab", description="tick data, increments and maximum profit strategies")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("file", nargs="?", help="Time & Sales file")
        p.add_argument("--contract", help="symbol such as ES or ESZ13")
        p.add_argument("--calendar", help="session calendar CSV")
        p.add_argument("--out", help="output directory (default $MPSLAB_OUT or .)")
        return p

    p = common(sub.add_parser("parse", help="validate and summarize a file"))
    p.set_defaults(func=cmd_parse)
    p = common(sub.add_parser("increments", help="a-, b-, c-increment summary table"))
    p.set_defaults(func=cmd_increments)
    p = common(sub.add_parser("conditional", help="b-increments conditioned on a-increments"))
    p.add_argument("--transform", choices=["identity", "abs", "square"], default="identity")
    p.add_argument("--tail-from", type=int)
    p.set_defaults(func=cmd_conditional)

    p = sub.add_parser("fit", help="chi-square or moment fits")
    p.add_argument("--family", choices=sorted(_FIT_START), default="hurwitz")
    p.add_argument("--classes", help="CSV of lo,hi,observed")
    p.add_argument("--start", help="comma separated starting parameters")
    p.add_argument("--params", help="evaluate these parameters instead of fitting")
    p.add_argument("--moments", help="mean,std,skew,ekurt for a Kumaraswamy moment fit")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit)

    p = common(sub.add_parser("independence", help="independence tests of a- and b-increments"))
    p.add_argument("--absolute", action="store_true", help="use |b|")
    p.add_argument("--min-count", type=int, default=50)
    p.set_defaults(func=cmd_independence)

    p = sub.add_parser("corrdim", help="correlation integral curve")
    p.add_argument("file", nargs="?")
    p.add_argument("--series", help="one number per line instead of a tick file")
    p.add_argument("--contract")
    p.add_argument("--calendar")
    p.add_argument("--embedding", type=int, default=2)
    p.add_argument("--algorithm", choices=["naive", "boxed"], default="boxed")
    p.add_argument("--out")
    p.set_defaults(func=cmd_corrdim)

    p = sub.add_parser("simulate", help="Bachelier random walk")
    p.add_argument("--p1", type=float, default=714.0)
    p.add_argument("--drift", type=float, default=-0.001937775)
    p.add_argument("--sigma", type=float, default=0.52755)
    p.add_argument("--n", type=int, default=19611)
    p.add_argument("--time-scale", type=float, default=3.8548)
    p.add_argument("--seed", type=int, default=21325476)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("mps", help="maximum profit strategies")
    p.add_argument("file", nargs="?")
    p.add_argument("--prices", help="CSV with the price in the last column")
    p.add_argument("--contract", help="default ES for --prices input")
    p.add_argument("--strategy", choices=["mps0", "mps1", "mps2"], default="mps0")
    p.add_argument("--variant", choices=["l", "r"], default="l")
    p.add_argument("--cost", help="dollars per contract per transaction")
    p.add_argument("--cost-cents", type=int)
    p.add_argument("--margin", help="initial margin in dollars")
    p.add_argument("--account", help="initial account in dollars")
    p.add_argument("--sweep", help="comma separated costs in dollars")
    p.add_argument("--out")
    p.set_defaults(func=cmd_mps)

    p = common(sub.add_parser("ote", help="optimal trading elements"))
    p.add_argument("--f-cost", required=True, help="dollars; comma separated for several")
    p.add_argument("--t-cost", required=True, help="dollars")
    p.set_defaults(func=cmd_ote)
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command in ("parse", "increments", "conditional", "independence", "ote") and not args.file:
            raise UsageError("missing input file")
        if args.command == "mps" and not (args.file or args.prices):
            raise UsageError("mps needs a tick file or --prices")
        if args.command == "corrdim" and not (args.file or args.series):
            raise UsageError("corrdim needs a tick file or --series")
        return args.func(args)
    except UsageError as exc:
        print(f"mpslab: usage error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, OSError, RuntimeError) as exc:
        print(f"mpslab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
