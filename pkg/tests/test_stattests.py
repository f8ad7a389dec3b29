import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

import _props
from mpslab import increments, stattests as S


def test_pearson_by_hand():
    obs = np.array([20890, 667, 60, 22, 20, 6, 5])
    p = np.array([0.9639, 0.03041, 0.003513, 0.001199, 0.0006975, 0.0001485, 0.0001659])
    stat, dof = S.pearson_chi2(obs, p, 3)
    expected = p * obs.sum()
    assert dof == 3
    assert stat == pytest.approx(float(np.sum((obs - expected) ** 2 / expected)), rel=1e-14)


def test_pearson_zero_expected():
    with pytest.raises(S.ZeroExpected):
        S.pearson_chi2([1, 2], [1.0, 0.0])


def test_contingency_margins():
    t = S.contingency([0, 0, 1, 1, 1], [1, -1, 1, 1, 0])
    assert t.n == 5
    assert list(t.a_events) == [0, 1] and list(t.b_events) == [-1, 0, 1]
    assert t.counts.sum() == 5
    assert list(t.row_margins) == [2, 3] and list(t.col_margins) == [1, 1, 3]
    assert (t.m_a, t.m_b) == (2, 3)
    ab = S.contingency([0, 0, 1], [1, -1, -1], "absolute")
    assert list(ab.b_events) == [1]


def test_product_table_is_independent():
    # counts built as an exact product of margins
    rows, cols = np.array([2, 3, 5]), np.array([1, 4])
    a, b = [], []
    for i, r in enumerate(rows):
        for j, c in enumerate(cols):
            a += [i] * int(r * c)
            b += [j] * int(r * c)
    res = S.independence_tests(S.contingency(a, b))
    assert res.L_n == pytest.approx(0, abs=1e-15)
    assert res.I_n == pytest.approx(0, abs=1e-15)
    assert res.chi2_n == pytest.approx(0, abs=1e-15)


@given(st.lists(st.tuples(st.integers(0, 5), st.integers(-3, 3)), min_size=1, max_size=300))
def test_statistic_bounds(pairs):
    a, b = zip(*pairs)
    res = S.independence_tests(S.contingency(a, b))
    assert 0 <= res.L_n <= 2
    assert res.I_n >= 0
    assert res.chi2_n >= -1e-12


def test_log_likelihood_matches_g_test():
    rng = np.random.default_rng(3)
    a = rng.integers(0, 4, 500)
    b = (a + rng.integers(0, 3, 500)) % 5
    t = S.contingency(a, b)
    res = S.independence_tests(t)
    g, _, _, _ = stats.chi2_contingency(t.counts, correction=False, lambda_="log-likelihood")
    assert res.I_n * t.n == pytest.approx(g, rel=1e-10)
    chi2, _, _, _ = stats.chi2_contingency(t.counts, correction=False)
    assert res.chi2_n * t.n == pytest.approx(chi2, rel=1e-10)


def test_merge_tables():
    t1 = S.contingency([0, 1], [1, 1])
    t2 = S.contingency([1, 2], [0, 1])
    m = S.merge_tables([t1, t2])
    assert m.n == 4
    assert list(m.a_events) == [0, 1, 2] and list(m.b_events) == [0, 1]
    assert m.counts[1].tolist() == [1, 1]


def test_empty_table():
    with pytest.raises(S.EmptyTable):
        S.independence_tests(S.ContingencyTable(np.array([]), np.array([]), np.zeros((0, 0), dtype=int)))


def test_thresholds_zcn13_row():
    assert f"{S.eps_l(2799609, 1098, 44):.2g}" == "0.15"
    assert f"{S.eps_i(2799609, 1098, 44):.2g}" == "0.53"


def test_kolmogorov_cells_threshold():
    a = [0] * 60 + [1] * 10
    b = [0] * 60 + [1] * 10
    cells = S.kolmogorov_cells(S.contingency(a, b), 50)
    assert len(cells) == 1 and cells[0][:3] == (0, 0, 60)


def test_fixture_row_schema():
    _, series, index = _props.load_fixture("esz13")
    a, b = increments.range_pairs(series, index)
    res = S.independence_tests(S.contingency(a, b))
    row = S.independence_row("ESZ13", res)
    assert len(row.split(",")) == len(S.INDEPENDENCE_COLUMNS.split(","))
    assert res.l_verdict in ("reject", "cannot reject")
