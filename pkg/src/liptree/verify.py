"""Machine checks of the proved inequalities on computed tables.

Every check compares in exact integer/rational arithmetic when the tables
come from the EXACT backend, and in log-space with a small float tolerance
when they come from the LOG backend.  The tolerance only absorbs rounding;
the inequalities themselves have real slack on every instance.

Statuses: "pass", "fail", and "vacuous" (every compared left side was zero,
as in the k = 1 base cases of the decay lemmas).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .model import (
    Backend,
    LevelTable,
    ModelParams,
    NEG_INF,
    RootDistribution,
    build_tables,
    root_distribution,
    truncate_tables,
)

LOG_TOL = 1e-9


def decay_alpha(d: int) -> Fraction:
    """Per-M-step decay ratio: 9/10 for d = 2, (3/4)^d for d >= 3."""
    return Fraction(9, 10) if d == 2 else Fraction(3, 4) ** d


@dataclass
class VerificationReport:
    claim: str
    params: ModelParams
    status: str  # pass | fail | vacuous
    worst_margin: float  # minimum log-scale slack over all compared entries
    witness: "tuple | None" = None  # (t, level) or similar locating the worst margin
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status != "fail"

    def to_dict(self) -> dict:
        p = self.params
        return {
            "claim": self.claim,
            "params": {"d": p.d, "M": p.M, "k": p.k},
            "status": self.status,
            "worst_margin": self.worst_margin,
            "witness": list(self.witness) if self.witness is not None else None,
            "detail": self.detail,
        }


class _MarginTracker:
    """Accumulates comparisons lhs_log <= rhs_log and keeps the worst slack."""

    def __init__(self, tol: float):
        self.tol = tol
        self.worst = math.inf
        self.witness = None
        self.compared = 0
        self.exact_violation = False
        self.float_violation = False

    def add(self, margin: float, witness, exact_ok: "bool | None" = None) -> None:
        """One comparison; when exact_ok is given it alone decides the verdict
        and the float margin is kept for reporting only."""
        self.compared += 1
        if exact_ok is False:
            self.exact_violation = True
        elif exact_ok is None and margin < -self.tol:
            self.float_violation = True
        if margin < self.worst:
            self.worst = margin
            self.witness = witness

    def report(self, claim: str, params: ModelParams, detail: str = "") -> VerificationReport:
        if self.compared == 0:
            return VerificationReport(claim, params, "vacuous", math.inf, None, detail)
        status = "fail" if (self.exact_violation or self.float_violation) else "pass"
        margin = self.worst if math.isfinite(self.worst) else math.inf
        return VerificationReport(claim, params, status, margin, self.witness, detail)


def _tol_for(backend: Backend) -> float:
    return 0.0 if backend is Backend.EXACT else LOG_TOL


def check_unimodality(table: LevelTable) -> VerificationReport:
    """G(t+1, j) <= G(t, j) for all t >= 0 (ties allowed)."""
    tracker = _MarginTracker(_tol_for(table.backend))
    logs = table.rel_log_weights()
    exact = table.backend is Backend.EXACT
    for t in range(table.radius):
        margin = float(logs[t] - logs[t + 1])
        exact_ok = table.weights[t + 1] <= table.weights[t] if exact else None
        tracker.add(margin, (t, table.level), exact_ok)
    return tracker.report("unimodality", table.params, f"level {table.level}")


def _ratio_check(
    tables: list[LevelTable],
    claim: str,
    bound_for_t,  # t -> Fraction upper bound on G(t+M, j) / G(t, j), or None to skip
    detail: str = "",
) -> VerificationReport:
    params = tables[-1].params
    M = params.M
    tracker = _MarginTracker(_tol_for(tables[-1].backend))
    for table in tables:
        exact = table.backend is Backend.EXACT
        logs = table.rel_log_weights()
        for t in range(1, table.radius + 1):
            bound = bound_for_t(t)
            if bound is None:
                continue
            shifted = t + M
            if shifted > table.radius:
                continue  # G(t+M, j) = 0: vacuous entry
            log_bound = math.log(bound)
            margin = log_bound - float(logs[shifted] - logs[t])
            exact_ok = None
            if exact:
                exact_ok = (
                    table.weights[shifted] * bound.denominator
                    <= bound.numerator * table.weights[t]
                )
            tracker.add(margin, (t, table.level), exact_ok)
    return tracker.report(claim, params, detail)


def check_decay(tables: list[LevelTable]) -> VerificationReport:
    """G(t+M, j) <= alpha * G(t, j) for t >= 1 at every level."""
    alpha = decay_alpha(tables[-1].params.d)
    return _ratio_check(tables, "exponential-decay", lambda t: alpha, f"alpha={alpha}")


def check_strengthened_d2(tables: list[LevelTable]) -> VerificationReport:
    """Piecewise-strengthened d=2 decay: alpha for 1 <= t < ceil(M/4), alpha^2 beyond.

    For M <= 10 the strengthened form is not claimed; only the single-alpha
    statement is required there.
    """
    params = tables[-1].params
    if params.d != 2:
        raise ValueError(f"strengthened decay check requires d=2, got d={params.d}")
    alpha = Fraction(9, 10)
    if params.M <= 10:
        return _ratio_check(
            tables, "strengthened-decay-d2", lambda t: alpha, "single-alpha regime (M<=10)"
        )
    m = -(-params.M // 4)  # ceil(M/4)
    return _ratio_check(
        tables,
        "strengthened-decay-d2",
        lambda t: alpha if t < m else alpha * alpha,
        f"piecewise at m={m}",
    )


def check_alpha_condition(alpha: float, d: int, M: int) -> bool:
    """Closed-form sufficiency condition on the decay constant:
    ((1 + a + (1 - a + a^2)/M) / (2 + 1/M))^d <= a.
    """
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    lhs = ((1 + alpha + (1 - alpha + alpha * alpha) / M) / (2 + 1 / M)) ** d
    return lhs <= alpha


def check_double_exponential(dist: RootDistribution) -> VerificationReport:
    """p(M+t) <= alpha^(d^floor((t-1)/M)) * p(0) for every t >= 1 in support."""
    params = dist.params
    d, M = params.d, params.M
    alpha = decay_alpha(d)
    log_alpha = math.log(alpha)
    tracker = _MarginTracker(LOG_TOL if dist.exact_counts is None else 0.0)
    for t in range(1, dist.radius - M + 1):
        exponent = d ** ((t - 1) // M)
        rhs_log = exponent * log_alpha
        lhs_log = dist.logp(M + t) - dist.logp(0)
        exact_ok = None
        if dist.exact_counts is not None:
            bound = alpha**exponent
            exact_ok = (
                dist.exact_counts[M + t] * bound.denominator
                <= bound.numerator * dist.exact_counts[0]
            )
        tracker.add(rhs_log - lhs_log, (t, params.k), exact_ok)
    return tracker.report("double-exponential-tail", params, f"alpha={alpha}")


def check_root_zero_bound(dist: RootDistribution, table: LevelTable) -> VerificationReport:
    """p(0) <= 1 / (1 + 2^(1-d) M), via the step G(M, k) >= 2^(-d) G(0, k)."""
    params = dist.params
    d, M = params.d, params.M
    if table.level != params.k:
        raise ValueError("root-zero check needs the level-k table")
    tracker = _MarginTracker(LOG_TOL if dist.exact_counts is None else 0.0)

    cap = Fraction(1, 1) + Fraction(M, 2 ** (d - 1))  # 1/p(0) lower bound
    margin_a = -(dist.logp(0) + math.log(float(cap)))
    exact_ok_a = None
    if dist.exact_counts is not None:
        exact_ok_a = dist.prob_exact(0) * cap <= 1
    tracker.add(margin_a, (0, params.k), exact_ok_a)

    ratio = Fraction(1, 2**d)  # G(M,k)/G(0,k) lower bound
    margin_b = (table.rel_log_weight(M) - table.rel_log_weight(0)) - math.log(float(ratio))
    exact_ok_b = None
    if table.backend is Backend.EXACT:
        exact_ok_b = table.weight(M) * ratio.denominator >= ratio.numerator * table.weight(0)
    tracker.add(margin_b, (M, params.k), exact_ok_b)
    return tracker.report("root-zero-probability", params)


def default_tail_grid(k: int) -> list[float]:
    """x values 0.5, 1, 1.5, ..., k-1 for the continuous tail check."""
    return [0.5 * i for i in range(1, 2 * (k - 1) + 1)]


def check_continuous_tail(
    d: int,
    k: int,
    grid_M: int,
    xs: "list[float] | None" = None,
    tables: "list[LevelTable] | None" = None,
) -> VerificationReport:
    """Continuous-model tail bound Pr(f(v_0) >= 1+x) <= 2^(d+2) alpha^(d^(ceil(x)-1)),
    checked through its proof's discretization at Lipschitz constant grid_M.

    ``tables`` may inject prebuilt (possibly corrupted) tables for testing.
    """
    if xs is None:
        xs = default_tail_grid(k)
    if tables is None:
        tables = build_tables(ModelParams(d=d, M=grid_M, k=k), Backend.LOG)
    params = tables[-1].params
    dist = root_distribution(tables)
    alpha = float(decay_alpha(d))
    tracker = _MarginTracker(LOG_TOL)
    for x in xs:
        if grid_M < 1 / x:
            raise ValueError(f"grid_M={grid_M} too coarse for x={x}")
        t0 = math.ceil(x * grid_M)
        terms = [dist.logp(grid_M + t) for t in range(t0, dist.radius - grid_M + 1)]
        terms = [v for v in terms if v > NEG_INF]
        if not terms:
            continue  # value would exceed the support bound: vacuous at this x
        m = max(terms)
        lhs = m + math.log(sum(math.exp(v - m) for v in terms))
        rhs = (d + 2) * math.log(2.0) + d ** (math.ceil(x) - 1) * math.log(alpha)
        tracker.add(rhs - lhs, (x, k))
    return tracker.report(
        "continuous-tail", params, f"proxy at grid_M={grid_M}, alpha={alpha}"
    )


def scan_depth_limit(
    d: int, M: int, k_max: int
) -> list[tuple[int, float, float]]:
    """Total-variation distances between root laws at nearby depths.

    Returns (k, TV(law_k, law_{k+1}), TV(law_k, law_{k+2})) for k = 1..k_max.
    Exploratory data only; no inequality is asserted.
    """
    if k_max < 3:
        raise ValueError(f"k_max must be >= 3, got {k_max}")
    params_top = ModelParams(d=d, M=M, k=k_max + 2)
    tables = build_tables(params_top, Backend.LOG)

    def law(k: int) -> np.ndarray:
        dist = root_distribution(truncate_tables(tables, k))
        full = dist.probs_full()
        radius = k * M
        padded = np.zeros(2 * (k_max + 2) * M + 1)
        center = (k_max + 2) * M
        padded[center - radius : center + radius + 1] = full
        return padded

    laws = {k: law(k) for k in range(1, k_max + 3)}
    out = []
    for k in range(1, k_max + 1):
        tv1 = 0.5 * float(np.abs(laws[k] - laws[k + 1]).sum())
        tv2 = 0.5 * float(np.abs(laws[k] - laws[k + 2]).sum())
        out.append((k, tv1, tv2))
    return out


def _fold_reports(claim: str, params: ModelParams, reports: list[VerificationReport]) -> VerificationReport:
    real = [r for r in reports if r.status != "vacuous"]
    if not real:
        return VerificationReport(claim, params, "vacuous", math.inf)
    worst = min(real, key=lambda r: r.worst_margin)
    status = "fail" if any(r.status == "fail" for r in real) else "pass"
    return VerificationReport(claim, params, status, worst.worst_margin, worst.witness, worst.detail)


def verify_grid(
    ds: tuple = (2, 3, 4, 5),
    Ms: range = range(1, 21),
    k_max: int = 30,
) -> list[VerificationReport]:
    """Full verification grid (LOG backend), one folded report per claim per (d, M).

    Claims are proved theorems on every instance, so any failure here is an
    implementation bug.
    """
    out: list[VerificationReport] = []
    for d in ds:
        for M in Ms:
            params = ModelParams(d=d, M=M, k=k_max)
            tables = build_tables(params, Backend.LOG)
            out.append(_fold_reports(
                "unimodality", params, [check_unimodality(t) for t in tables]))
            out.append(check_decay(tables))
            if d == 2:
                out.append(check_strengthened_d2(tables))
            dbl, zero = [], []
            for k in range(1, k_max + 1):
                sub = truncate_tables(tables, k)
                dist = root_distribution(sub)
                dbl.append(check_double_exponential(dist))
                zero.append(check_root_zero_bound(dist, sub[-1]))
            out.append(_fold_reports("double-exponential-tail", params, dbl))
            out.append(_fold_reports("root-zero-probability", params, zero))
    return out


def verify_instance(
    params: ModelParams,
    backend: Backend = Backend.LOG,
    tables: "list[LevelTable] | None" = None,
) -> list[VerificationReport]:
    """Run every discrete-model check on one instance."""
    if tables is None:
        tables = build_tables(params, backend)
    dist = root_distribution(tables)
    reports = [check_unimodality(t) for t in tables]
    reports.append(check_decay(tables))
    if params.d == 2:
        reports.append(check_strengthened_d2(tables))
    reports.append(check_double_exponential(dist))
    reports.append(check_root_zero_bound(dist, tables[-1]))
    return reports
