"""Level tables for grounded M-Lipschitz functions on rooted d-ary trees.

A grounded function assigns an integer to every vertex of the complete
d-ary tree of depth k, changes by at most M along each edge, and is 0 on
all leaves.  G(t, j) counts the functions on the depth-j tree whose root
value is t.  Tables are built level by level through the recursion

    G(t, j) = ( sum_{|i| <= M} G(t + i, j - 1) )^d

in one of two backends: EXACT (arbitrary-precision integers) or LOG
(per-level max-normalized log weights, with the normalizer accumulated
so absolute log counts stay recoverable).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

NEG_INF = float("-inf")

#: Refuse EXACT computations once a single weight would exceed this many bits.
DEFAULT_BIT_BUDGET = 1 << 26


class Backend(str, Enum):
    EXACT = "exact"
    LOG = "log"


class BignumBudgetError(RuntimeError):
    """The EXACT backend would produce integers beyond the bit budget."""


@dataclass(frozen=True)
class ModelParams:
    """Branching factor d, Lipschitz constant M, and tree depth k."""

    d: int
    M: int
    k: int

    def __post_init__(self):
        for name, value, low in (("d", self.d, 2), ("M", self.M, 1), ("k", self.k, 1)):
            if not isinstance(value, int) or isinstance(value, bool) or value < low:
                raise ValueError(f"{name} must be an integer >= {low}, got {value!r}")


def support_bound(params: ModelParams) -> int:
    """Largest possible |f(v)|: every vertex is within k edges of a leaf."""
    return params.k * params.M


@dataclass
class LevelTable:
    """Weights G(t, level) for one level, stored for t >= 0 and mirrored on read.

    EXACT backend: ``weights`` is a list of nonnegative ints, weights[t] = G(t, level).
    LOG backend: ``weights`` is a float array ell with max(ell) = 0 and
    log G(t, level) = ell[t] + normalizer_log.
    """

    params: ModelParams
    level: int
    backend: Backend
    weights: "list[int] | np.ndarray"
    normalizer_log: float = 0.0

    @property
    def radius(self) -> int:
        return self.level * self.params.M

    def weight(self, t: int) -> int:
        """Exact count G(t, level); zero outside the support."""
        if self.backend is not Backend.EXACT:
            raise ValueError("exact weights only available in the EXACT backend")
        t = abs(t)
        return self.weights[t] if t <= self.radius else 0

    def rel_log_weight(self, t: int) -> float:
        """log G(t, level) up to the per-level normalizer; -inf outside support."""
        t = abs(t)
        if t > self.radius:
            return NEG_INF
        if self.backend is Backend.EXACT:
            return math.log(self.weights[t])
        return float(self.weights[t])

    def log_weight(self, t: int) -> float:
        """Absolute log G(t, level); -inf outside the support."""
        t = abs(t)
        if t > self.radius:
            return NEG_INF
        if self.backend is Backend.EXACT:
            return math.log(self.weights[t])
        return float(self.weights[t]) + self.normalizer_log

    def rel_log_weights(self) -> np.ndarray:
        """Normalizer-relative log weights for t = 0..radius."""
        if self.backend is Backend.EXACT:
            return np.array([math.log(w) for w in self.weights], dtype=float)
        return np.asarray(self.weights, dtype=float)


def base_table(params: ModelParams, backend: Backend = Backend.EXACT) -> LevelTable:
    """Level-1 table: G(t, 1) = 1 for |t| <= M, the root value is free."""
    M = params.M
    if backend is Backend.EXACT:
        return LevelTable(params, 1, backend, [1] * (M + 1))
    return LevelTable(params, 1, backend, np.zeros(M + 1), normalizer_log=0.0)


def level_step(
    prev: LevelTable,
    params: ModelParams,
    bit_budget: int = DEFAULT_BIT_BUDGET,
) -> LevelTable:
    """One application of the recursion: window-sum the previous level, raise to d."""
    if prev.params != params:
        raise ValueError(f"table params {prev.params} do not match {params}")
    d, M = params.d, params.M
    r_prev = prev.radius
    r_new = r_prev + M

    if prev.backend is Backend.EXACT:
        g = prev.weights
        # prefix sums over the mirrored support t = -r_prev..r_prev
        full = [g[abs(t)] for t in range(-r_prev, r_prev + 1)]
        prefix = [0]
        for w in full:
            prefix.append(prefix[-1] + w)
        new_weights = []
        for t in range(r_new + 1):
            lo = max(t - M, -r_prev)
            hi = min(t + M, r_prev)
            window = prefix[hi + r_prev + 1] - prefix[lo + r_prev]
            if window.bit_length() * d > bit_budget:
                raise BignumBudgetError(
                    f"EXACT weight at level {prev.level + 1}, t={t} needs about "
                    f"{window.bit_length() * d} bits, over the {bit_budget}-bit budget"
                )
            new_weights.append(window**d)
        return LevelTable(params, prev.level + 1, Backend.EXACT, new_weights)

    # LOG backend: per-window log-sum-exp anchored at the window maximum.
    ell = np.asarray(prev.weights, dtype=float)
    full = np.concatenate([ell[:0:-1], ell])  # t = -r_prev..r_prev
    padded = np.concatenate([np.full(2 * M, NEG_INF), full, np.full(2 * M, NEG_INF)])
    windows = sliding_window_view(padded, 2 * M + 1)  # centers t = -r_new..r_new
    wmax = windows.max(axis=1)
    with np.errstate(invalid="ignore"):
        logw = wmax + np.log(np.exp(windows - wmax[:, None]).sum(axis=1))
    raw = d * logw[r_new:]  # keep t >= 0
    shift = float(raw.max())
    return LevelTable(
        params,
        prev.level + 1,
        Backend.LOG,
        raw - shift,
        normalizer_log=d * prev.normalizer_log + shift,
    )


def build_tables(
    params: ModelParams,
    backend: Backend = Backend.EXACT,
    bit_budget: int = DEFAULT_BIT_BUDGET,
) -> list[LevelTable]:
    """Tables for levels 1..k."""
    tables = [base_table(params, backend)]
    for _ in range(params.k - 1):
        tables.append(level_step(tables[-1], params, bit_budget=bit_budget))
    return tables


def truncate_tables(tables: "list[LevelTable]", k: int) -> "list[LevelTable]":
    """First k levels, retagged for depth k (level j of a depth-k' model is the
    same table as level j of any shallower model)."""
    params = tables[-1].params
    if not 1 <= k <= len(tables):
        raise ValueError(f"cannot truncate {len(tables)} levels to k={k}")
    sub_params = ModelParams(d=params.d, M=params.M, k=k)
    return [
        LevelTable(sub_params, t.level, t.backend, t.weights, t.normalizer_log)
        for t in tables[:k]
    ]


@dataclass
class RootDistribution:
    """Law of the root value f(v_0) for a uniform draw, with log-space access."""

    params: ModelParams
    rel_logp: np.ndarray = field(repr=False)  # log p(t) for t = 0..kM
    total_log_count: float
    exact_counts: "list[int] | None" = None
    exact_total: "int | None" = None

    @property
    def radius(self) -> int:
        return support_bound(self.params)

    def logp(self, t: int) -> float:
        t = abs(t)
        return float(self.rel_logp[t]) if t <= self.radius else NEG_INF

    def prob(self, t: int) -> float:
        return math.exp(self.logp(t)) if abs(t) <= self.radius else 0.0

    def prob_exact(self, t: int) -> Fraction:
        if self.exact_counts is None:
            raise ValueError("exact probabilities require the EXACT backend")
        t = abs(t)
        count = self.exact_counts[t] if t <= self.radius else 0
        return Fraction(count, self.exact_total)

    def probs_full(self) -> np.ndarray:
        """Probabilities over t = -radius..radius."""
        half = np.exp(self.rel_logp)
        return np.concatenate([half[:0:-1], half])


def root_distribution(tables: "list[LevelTable]") -> RootDistribution:
    """Normalize the deepest table into the root law p(t) = G(t,k) / |L_M(d,k)|."""
    top = tables[-1]
    params = top.params
    if top.level != params.k:
        raise ValueError(f"tables end at level {top.level}, expected k={params.k}")

    if top.backend is Backend.EXACT:
        counts = list(top.weights)
        total = counts[0] + 2 * sum(counts[1:])
        log_total = math.log(total)
        rel_logp = np.array([math.log(c) - log_total for c in counts])
        return RootDistribution(params, rel_logp, log_total, counts, total)

    ell = np.asarray(top.weights, dtype=float)
    # mirrored total: t=0 once, t>=1 twice; max(ell) = 0 so no re-anchoring needed
    log_total_rel = math.log(float(np.exp(ell[0]) + 2.0 * np.exp(ell[1:]).sum()))
    return RootDistribution(params, ell - log_total_rel, top.normalizer_log + log_total_rel)
