import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liptree.model import (
    Backend,
    BignumBudgetError,
    LevelTable,
    ModelParams,
    base_table,
    build_tables,
    level_step,
    root_distribution,
    support_bound,
    truncate_tables,
)


def test_params_validation():
    ModelParams(2, 1, 1)
    for bad in [(1, 1, 1), (2, 0, 1), (2, 1, 0), (0, 5, 5)]:
        with pytest.raises(ValueError):
            ModelParams(*bad)


def test_support_bound():
    assert support_bound(ModelParams(2, 1, 3)) == 3
    assert support_bound(ModelParams(5, 4, 2)) == 8
    assert support_bound(ModelParams(2, 1, 1)) == 1


def test_base_table():
    t1 = base_table(ModelParams(2, 1, 1))
    assert t1.weights == [1, 1]
    t3 = base_table(ModelParams(2, 3, 2))
    assert all(t3.weight(t) == 1 for t in range(-3, 4))
    assert t3.weight(4) == 0
    assert t1.weight(2) == 0


def test_level_step_hand_values():
    params = ModelParams(2, 1, 3)
    t2 = level_step(base_table(params), params)
    assert t2.weights == [9, 4, 1]
    t3 = level_step(t2, params)
    assert t3.weights == [289, 196, 25, 1]

    params3 = ModelParams(3, 1, 2)
    assert level_step(base_table(params3), params3).weights == [27, 8, 1]


def test_level_step_params_mismatch():
    params = ModelParams(2, 1, 2)
    other = ModelParams(2, 2, 2)
    with pytest.raises(ValueError):
        level_step(base_table(params), other)


def test_build_tables_exact():
    tables = build_tables(ModelParams(2, 1, 3), Backend.EXACT)
    assert [t.level for t in tables] == [1, 2, 3]
    assert tables[-1].weights == [289, 196, 25, 1]


def test_build_tables_log_base_case():
    tables = build_tables(ModelParams(2, 1, 1), Backend.LOG)
    assert np.allclose(tables[0].weights, 0.0)
    assert tables[0].normalizer_log == 0.0


def test_bignum_budget_refusal():
    with pytest.raises(BignumBudgetError):
        build_tables(ModelParams(2, 1, 10), Backend.EXACT, bit_budget=100)
    # LOG never refuses
    build_tables(ModelParams(2, 1, 10), Backend.LOG, bit_budget=100)


@pytest.mark.parametrize("d,M,k", [(2, 1, 4), (3, 2, 3), (2, 3, 3), (4, 1, 3)])
def test_recursion_consistency_exact(d, M, k):
    # every stored weight equals the d-th power of the previous-level window sum
    params = ModelParams(d, M, k)
    tables = build_tables(params, Backend.EXACT)
    for prev, cur in zip(tables, tables[1:]):
        for t in range(cur.radius + 1):
            window = sum(prev.weight(t + i) for i in range(-M, M + 1))
            assert cur.weight(t) == window**d


@pytest.mark.parametrize("d,M,k", [(2, 1, 6), (3, 2, 4), (2, 4, 4)])
def test_backend_agreement(d, M, k):
    params = ModelParams(d, M, k)
    exact = build_tables(params, Backend.EXACT)
    logd = build_tables(params, Backend.LOG)
    for te, tl in zip(exact, logd):
        for t in range(te.radius + 1):
            ref = math.log(te.weight(t))
            assert abs(tl.log_weight(t) - ref) <= 1e-9 * max(1.0, abs(ref))


@pytest.mark.parametrize("backend", [Backend.EXACT, Backend.LOG])
def test_support_and_symmetry(backend):
    params = ModelParams(3, 2, 3)
    for table in build_tables(params, backend):
        radius = table.level * params.M
        assert table.radius == radius
        for t in range(radius + 1):
            assert table.log_weight(t) > float("-inf")
            assert table.log_weight(t) == table.log_weight(-t)  # mirrored storage
        assert table.log_weight(radius + 1) == float("-inf")
        if backend is Backend.EXACT:
            assert table.weight(radius + 5) == 0


def test_root_distribution_exact_small():
    dist = root_distribution(build_tables(ModelParams(2, 1, 2), Backend.EXACT))
    assert dist.exact_total == 19
    assert dist.prob_exact(0) == 9 * dist.prob_exact(2)
    assert float(dist.prob_exact(0)) == pytest.approx(9 / 19)
    assert float(dist.prob_exact(1)) == pytest.approx(4 / 19)
    assert float(dist.prob_exact(-2)) == pytest.approx(1 / 19)
    assert sum(dist.prob_exact(t) for t in range(-2, 3)) == 1


def test_root_distribution_d3():
    dist = root_distribution(build_tables(ModelParams(3, 1, 2), Backend.EXACT))
    assert dist.exact_total == 45
    assert dist.prob(0) == pytest.approx(0.6)


def test_root_distribution_depth1_uniform():
    dist = root_distribution(build_tables(ModelParams(2, 1, 1), Backend.EXACT))
    assert [dist.prob(t) for t in (-1, 0, 1)] == pytest.approx([1 / 3] * 3)


@pytest.mark.parametrize("backend", [Backend.EXACT, Backend.LOG])
def test_root_distribution_normalized(backend):
    dist = root_distribution(build_tables(ModelParams(3, 2, 4), backend))
    total = sum(dist.prob(t) for t in range(-dist.radius, dist.radius + 1))
    assert abs(total - 1.0) <= 1e-12
    assert dist.prob(5) == dist.prob(-5)
    assert dist.logp(dist.radius + 1) == float("-inf")
    assert dist.total_log_count == pytest.approx(
        math.log(root_distribution(build_tables(ModelParams(3, 2, 4), Backend.EXACT)).exact_total),
        rel=1e-9,
    )


def test_truncate_tables():
    tables = build_tables(ModelParams(2, 1, 4), Backend.EXACT)
    sub = truncate_tables(tables, 2)
    assert sub[-1].params.k == 2
    assert root_distribution(sub).exact_total == 19
    with pytest.raises(ValueError):
        truncate_tables(tables, 5)


def test_deep_log_build_completes():
    tables = build_tables(ModelParams(2, 10, 100), Backend.LOG)
    assert tables[-1].radius == 1000
    assert np.isfinite(np.asarray(tables[-1].weights)).all()


@settings(max_examples=25, deadline=None)
@given(
    d=st.integers(2, 4),
    M=st.integers(1, 3),
    k=st.integers(1, 4),
)
def test_property_log_matches_exact_when_feasible(d, M, k):
    params = ModelParams(d, M, k)
    try:
        exact = build_tables(params, Backend.EXACT, bit_budget=200_000)
    except BignumBudgetError:
        return
    logd = build_tables(params, Backend.LOG)
    for te, tl in zip(exact, logd):
        logs_e = te.rel_log_weights() + 0.0
        abs_e = np.array([math.log(w) for w in te.weights])
        abs_l = np.asarray(tl.weights) + tl.normalizer_log
        assert np.all(np.abs(abs_l - abs_e) <= 1e-9 * np.maximum(1.0, np.abs(abs_e)))
        assert logs_e.shape == abs_l.shape
