import math

import numpy as np
import pytest

from liptree.model import (
    Backend,
    LevelTable,
    ModelParams,
    build_tables,
    root_distribution,
    truncate_tables,
)
from liptree.verify import (
    check_alpha_condition,
    check_continuous_tail,
    check_decay,
    check_double_exponential,
    check_root_zero_bound,
    check_strengthened_d2,
    check_unimodality,
    decay_alpha,
    scan_depth_limit,
    verify_instance,
)


def exact_table(d, M, k, weights):
    return LevelTable(ModelParams(d, M, k), k, Backend.EXACT, weights)


def corrupted_dist(d, M, k, weights):
    params = ModelParams(d, M, k)
    tables = build_tables(params, Backend.EXACT)
    tables[-1] = exact_table(d, M, k, weights)
    return root_distribution(tables), tables


# --- unimodality --------------------------------------------------------


def test_unimodality_passes_on_real_tables():
    for table in build_tables(ModelParams(2, 1, 2), Backend.EXACT):
        assert check_unimodality(table).status == "pass"


def test_unimodality_allows_ties():
    report = check_unimodality(exact_table(2, 3, 1, [1, 1, 1, 1]))
    assert report.status == "pass"
    assert report.worst_margin == 0.0


def test_unimodality_negative_control():
    report = check_unimodality(exact_table(2, 1, 2, [4, 9, 1]))
    assert report.status == "fail"
    assert report.witness == (0, 2)


# --- decay ---------------------------------------------------------------


def test_decay_alpha_values():
    assert decay_alpha(2) == pytest.approx(0.9)
    assert float(decay_alpha(3)) == pytest.approx((3 / 4) ** 3)


def test_decay_d2():
    report = check_decay(build_tables(ModelParams(2, 1, 2), Backend.EXACT))
    assert report.status == "pass"
    # worst ratio 1/4 at t=1: log margin = log(0.9) - log(0.25)
    assert report.worst_margin == pytest.approx(math.log(0.9) - math.log(0.25))


def test_decay_d3():
    report = check_decay(build_tables(ModelParams(3, 1, 2), Backend.EXACT))
    assert report.status == "pass"
    assert report.worst_margin == pytest.approx(math.log(27 / 64) - math.log(1 / 8))


def test_decay_vacuous_at_depth_one():
    report = check_decay(build_tables(ModelParams(5, 3, 1), Backend.EXACT))
    assert report.status == "vacuous"


def test_decay_negative_control():
    tables = build_tables(ModelParams(2, 1, 2), Backend.EXACT)
    tables[-1] = exact_table(2, 1, 2, [9, 4, 4])  # ratio G(2)/G(1) = 1 > 9/10
    assert check_decay(tables).status == "fail"


# --- strengthened d=2 ----------------------------------------------------


def test_strengthened_d2_small_M():
    tables = build_tables(ModelParams(2, 1, 3), Backend.EXACT)
    report = check_strengthened_d2(tables)
    assert report.status == "pass"
    # the alpha^2 branch would also hold here: worst ratio 25/196 < 0.81
    top = tables[-1]
    assert top.weight(2) / top.weight(1) < 0.81


def test_strengthened_d2_large_M():
    report = check_strengthened_d2(build_tables(ModelParams(2, 11, 8), Backend.LOG))
    assert report.status == "pass"
    assert "piecewise" in report.detail


def test_strengthened_d2_rejects_other_d():
    with pytest.raises(ValueError):
        check_strengthened_d2(build_tables(ModelParams(3, 1, 2), Backend.EXACT))


def test_strengthened_d2_negative_control():
    tables = build_tables(ModelParams(2, 1, 2), Backend.EXACT)
    tables[-1] = exact_table(2, 1, 2, [9, 4, 4])
    assert check_strengthened_d2(tables).status == "fail"


# --- alpha condition ------------------------------------------------------


def test_alpha_condition():
    assert check_alpha_condition(9 / 10, 2, 10)
    assert check_alpha_condition((3 / 4) ** 3, 3, 1)
    assert not check_alpha_condition(0.5, 2, 100)
    with pytest.raises(ValueError):
        check_alpha_condition(1.5, 2, 1)


# --- double exponential ---------------------------------------------------


def test_double_exponential_hand_values():
    dist = root_distribution(build_tables(ModelParams(2, 1, 3), Backend.EXACT))
    report = check_double_exponential(dist)
    assert report.status == "pass"
    # t=1: 25/289 vs 0.9; t=2: 1/289 vs 0.81 -- the binding margin is at t=1
    assert report.worst_margin == pytest.approx(math.log(0.9) - math.log(25 / 289))
    assert report.witness == (1, 3)


def test_double_exponential_vacuous_depth_one():
    dist = root_distribution(build_tables(ModelParams(2, 1, 1), Backend.EXACT))
    assert check_double_exponential(dist).status == "vacuous"


def test_double_exponential_negative_control():
    dist, _ = corrupted_dist(2, 1, 2, [9, 9, 9])
    assert check_double_exponential(dist).status == "fail"


# --- root zero bound -------------------------------------------------------


def test_root_zero_bound_examples():
    for d, M, k, p0_cap in [(2, 1, 2, 2 / 3), (3, 1, 2, 0.8), (2, 1, 1, 2 / 3)]:
        tables = build_tables(ModelParams(d, M, k), Backend.EXACT)
        dist = root_distribution(tables)
        report = check_root_zero_bound(dist, tables[-1])
        assert report.status == "pass"
        assert dist.prob(0) <= p0_cap


def test_root_zero_bound_negative_control():
    dist, tables = corrupted_dist(2, 1, 2, [100, 1, 1])
    assert check_root_zero_bound(dist, tables[-1]).status == "fail"


# --- continuous tail --------------------------------------------------------


def test_continuous_tail_passes():
    for d, k in [(2, 8), (3, 6)]:
        report = check_continuous_tail(d, k, 64)
        assert report.status == "pass"
        assert report.worst_margin > 0


def test_continuous_tail_vacuous_beyond_support():
    report = check_continuous_tail(2, 3, 64, xs=[3.0, 4.0])
    assert report.status == "vacuous"


def test_continuous_tail_negative_control():
    params = ModelParams(2, 64, 8)
    tables = build_tables(params, Backend.LOG)
    flat = LevelTable(params, 8, Backend.LOG, np.zeros(tables[-1].radius + 1))
    tables[-1] = flat
    assert check_continuous_tail(2, 8, 64, tables=tables).status == "fail"


# --- depth scan --------------------------------------------------------------


def test_scan_depth_limit():
    rows = scan_depth_limit(2, 1, 4)
    assert [k for k, _, _ in rows] == [1, 2, 3, 4]
    assert rows[0][1] == pytest.approx(0.24561403508771934)
    assert all(0 <= tv1 <= 1 and 0 <= tv2 <= 1 for _, tv1, tv2 in rows)
    with pytest.raises(ValueError):
        scan_depth_limit(2, 1, 2)


# --- per-instance driver ------------------------------------------------------


@pytest.mark.parametrize("backend", [Backend.EXACT, Backend.LOG])
def test_verify_instance_verdicts_agree_across_backends(backend):
    reports = verify_instance(ModelParams(2, 2, 4), backend)
    assert all(r.ok for r in reports)
    claims = {r.claim for r in reports}
    assert claims == {
        "unimodality",
        "exponential-decay",
        "strengthened-decay-d2",
        "double-exponential-tail",
        "root-zero-probability",
    }


def test_verify_grid_small():
    from liptree.verify import verify_grid

    reports = verify_grid(ds=(2, 3), Ms=range(1, 3), k_max=6)
    assert all(r.status == "pass" for r in reports)
    assert {r.claim for r in reports} == {
        "unimodality",
        "exponential-decay",
        "strengthened-decay-d2",
        "double-exponential-tail",
        "root-zero-probability",
    }


def test_verify_instance_log_truncation_consistency():
    # the prefix of a deep build is exactly the shallow build
    deep = build_tables(ModelParams(2, 1, 8), Backend.LOG)
    reports = verify_instance(ModelParams(2, 1, 5), tables=truncate_tables(deep, 5))
    assert all(r.ok for r in reports)
