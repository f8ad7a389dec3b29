"""Pearson goodness of fit and partition-based independence tests for
(a-increment, b-increment) pairs."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class ZeroExpected(ValueError):
    pass


class EmptyTable(ValueError):
    pass


def pearson_chi2(observed: Sequence[int], probabilities: Sequence[float], n_fitted: int = 0):
    """(statistic, dof). The probabilities need not sum to one; N is sum(observed)."""
    obs = np.asarray(observed, dtype=float)
    p = np.asarray(probabilities, dtype=float)
    if obs.size < 2 or obs.size != p.size:
        raise ValueError("need at least two classes with matching probabilities")
    expected = obs.sum() * p
    if np.any(expected <= 0):
        raise ZeroExpected("a class has zero expected count")
    stat = float(np.sum((obs - expected) ** 2 / expected))
    return stat, obs.size - 1 - n_fitted


@dataclass(frozen=True)
class ContingencyTable:
    a_events: np.ndarray
    b_events: np.ndarray
    counts: np.ndarray          # k_ij, shape (len(a_events), len(b_events))

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def row_margins(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_margins(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    @property
    def m_a(self) -> int:
        return len(self.a_events)

    @property
    def m_b(self) -> int:
        return len(self.b_events)

    @property
    def m_ab(self) -> int:
        return int(np.count_nonzero(self.counts))

    def differences(self) -> np.ndarray:
        """nu_AB - nu_A nu_B per cell."""
        n = self.n
        joint = self.counts / n
        return joint - np.outer(self.row_margins / n, self.col_margins / n)


def contingency(a_values, b_values, b_transform: str = "signed") -> ContingencyTable:
    a = np.asarray(a_values, dtype=np.int64)
    b = np.asarray(b_values, dtype=np.int64)
    if a.shape != b.shape:
        raise ValueError("a and b must pair up")
    if b_transform == "absolute":
        b = np.abs(b)
    elif b_transform != "signed":
        raise ValueError(f"unknown transform {b_transform!r}")
    a_ev, ai = np.unique(a, return_inverse=True)
    b_ev, bi = np.unique(b, return_inverse=True)
    counts = np.zeros((a_ev.size, b_ev.size), dtype=np.int64)
    np.add.at(counts, (ai, bi), 1)
    return ContingencyTable(a_ev, b_ev, counts)


def merge_tables(tables: Sequence[ContingencyTable]) -> ContingencyTable:
    a_ev = np.unique(np.concatenate([t.a_events for t in tables]))
    b_ev = np.unique(np.concatenate([t.b_events for t in tables]))
    counts = np.zeros((a_ev.size, b_ev.size), dtype=np.int64)
    for t in tables:
        counts[np.ix_(np.searchsorted(a_ev, t.a_events), np.searchsorted(b_ev, t.b_events))] += t.counts
    return ContingencyTable(a_ev, b_ev, counts)


def eps_l(n: int, m_a: int, m_b: int) -> float:
    return math.sqrt(2 * math.log(2)) * math.sqrt(m_a * m_b / n)


def eps_i(n: int, m_a: int, m_b: int) -> float:
    return m_a * m_b * (2 * math.log(n + m_a * m_b) + 1) / n


@dataclass(frozen=True)
class IndependenceResult:
    n: int
    m_a: int
    m_b: int
    m_ab: int
    L_n: float
    I_n: float
    chi2_n: float
    eps_L: float
    eps_I: float
    xi: float

    @property
    def l_verdict(self) -> str:
        return "reject" if self.L_n > self.eps_L else "cannot reject"

    @property
    def i_verdict(self) -> str:
        return "reject" if self.I_n > self.eps_I else "cannot reject"


def independence_tests(table: ContingencyTable) -> IndependenceResult:
    n = table.n
    if n == 0:
        raise EmptyTable("no pairs")
    joint = table.counts / n
    prod = np.outer(table.row_margins / n, table.col_margins / n)
    L = float(np.sum(np.abs(joint - prod)))
    nz = joint > 0
    I = float(2 * np.sum(joint[nz] * np.log(joint[nz] / prod[nz])))
    chi2 = float(np.sum((joint - prod) ** 2 / prod))
    ma, mb = table.m_a, table.m_b
    xi = (n * chi2 - ma * mb) / math.sqrt(2 * ma * mb)
    return IndependenceResult(n, ma, mb, table.m_ab, L, max(I, 0.0), chi2,
                              eps_l(n, ma, mb), eps_i(n, ma, mb), xi)


def kolmogorov_cells(table: ContingencyTable, min_count: int = 50):
    """(a, b, k, nu_AB - nu_A nu_B) for every cell with at least min_count pairs."""
    diff = table.differences()
    rows = []
    for i, j in zip(*np.nonzero(table.counts >= min_count)):
        rows.append((int(table.a_events[i]), int(table.b_events[j]),
                     int(table.counts[i, j]), float(diff[i, j])))
    return rows


INDEPENDENCE_COLUMNS = "Ticker,n,m_A,m_B,m_AB,L_n,I_n,chi2_n,eps_L,eps_I,xi"


def independence_row(ticker: str, r: IndependenceResult) -> str:
    return (f"{ticker},{r.n},{r.m_a},{r.m_b},{r.m_ab},{r.L_n:.6g},{r.I_n:.6g},"
            f"{r.chi2_n:.6g},{r.eps_L:.6g},{r.eps_I:.6g},{r.xi:.6g}")
