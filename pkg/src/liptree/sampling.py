"""Sampling grounded Lipschitz functions.

Discrete model: exact uniform samples drawn top-down from the level tables,
conditioning each child on its parent through the counting weights (integer
arithmetic in the EXACT backend, so the draw is exactly uniform).

Continuous model: systematic-scan single-site Gibbs over the polytope of
real-valued grounded 1-Lipschitz functions; each conditional is uniform on
an interval determined by the current neighbor values.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .model import Backend, LevelTable, ModelParams
from .oracle import internal_count, tree_size, vertex_depth

_MASK64 = (1 << 64) - 1

DEFAULT_SWEEPS = 1000


def derive_seed(seed: int, index: int) -> int:
    """splitmix64-style substream seed for run number `index`."""
    x = (seed + (index + 1) * 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


@dataclass
class TreeFunction:
    """One grounded function in breadth-first vertex order (root at index 0).

    ``M`` is the Lipschitz constant for the discrete model and None for the
    continuous (unit-Lipschitz, real-valued) model.
    """

    d: int
    k: int
    M: "int | None"
    values: list

    @property
    def continuous(self) -> bool:
        return self.M is None

    @property
    def root_value(self):
        return self.values[0]


def validate_tree_function(fn: TreeFunction) -> None:
    """Check the Lipschitz and grounding constraints; raises on violation."""
    d, k = fn.d, fn.k
    n = tree_size(d, k)
    if len(fn.values) != n:
        raise ValueError(f"expected {n} values, got {len(fn.values)}")
    lip = 1.0 if fn.continuous else fn.M
    n_internal = internal_count(d, k)
    for i in range(n_internal, n):
        if fn.values[i] != 0:
            raise ValueError(f"leaf {i} has nonzero value {fn.values[i]}")
    for i in range(1, n):
        parent = (i - 1) // d
        gap = abs(fn.values[i] - fn.values[parent])
        if gap > lip + 1e-12:
            raise ValueError(f"edge ({parent}, {i}) violates Lipschitz: gap {gap}")


def _draw_from_counts(weights: list[int], rng: random.Random) -> int:
    """Index drawn proportionally to integer weights, exactly."""
    total = sum(weights)
    r = rng.randrange(total)
    acc = 0
    for idx, w in enumerate(weights):
        acc += w
        if r < acc:
            return idx
    raise AssertionError("unreachable")


def _draw_from_logits(logits: list[float], rng: random.Random) -> int:
    m = max(logits)
    probs = [math.exp(v - m) for v in logits]
    total = sum(probs)
    r = rng.random() * total
    acc = 0.0
    for idx, p in enumerate(probs):
        acc += p
        if r < acc:
            return idx
    return len(probs) - 1  # rounding fell off the end


def sample_exact(tables: list[LevelTable], seed: int) -> TreeFunction:
    """One uniform sample from L_M(d,k), drawn root-first through the tables."""
    params = tables[-1].params
    d, M, k = params.d, params.M, params.k
    exact = tables[-1].backend is Backend.EXACT
    rng = random.Random(seed & _MASK64)

    n = tree_size(d, k)
    n_internal = internal_count(d, k)
    values = [0] * n

    # root value from the level-k marginal
    top = tables[-1]
    support = list(range(-top.radius, top.radius + 1))
    if exact:
        idx = _draw_from_counts([top.weight(t) for t in support], rng)
    else:
        idx = _draw_from_logits([top.rel_log_weight(t) for t in support], rng)
    values[0] = support[idx]

    for i in range(n_internal):
        child_level = k - vertex_depth(i, d) - 1  # remaining depth below each child
        if child_level == 0:
            continue  # children are leaves, already 0
        table = tables[child_level - 1]
        t = values[i]
        choices = list(range(t - M, t + M + 1))
        if exact:
            weights = [table.weight(s) for s in choices]
        else:
            weights = [table.rel_log_weight(s) for s in choices]
        for c in range(d * i + 1, d * i + d + 1):
            if exact:
                idx = _draw_from_counts(weights, rng)
            else:
                idx = _draw_from_logits(weights, rng)
            values[c] = choices[idx]
    return TreeFunction(d=d, k=k, M=M, values=values)


def empirical_root_distribution(
    draw: Callable[[int], TreeFunction], n: int, seed: int
) -> Counter:
    """Root-value histogram over n independent runs on derived substreams."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    hist: Counter = Counter()
    for i in range(n):
        hist[draw(derive_seed(seed, i))] += 1
    return hist


def _gibbs_update_site(vals: np.ndarray, i: int, d: int, rng: np.random.Generator) -> None:
    """Resample vertex i uniformly on its conditional interval, all chains at once."""
    children = vals[:, d * i + 1 : d * i + d + 1]
    lo = children.max(axis=1) - 1.0
    hi = children.min(axis=1) + 1.0
    if i > 0:
        parent = vals[:, (i - 1) // d]
        lo = np.maximum(lo, parent - 1.0)
        hi = np.minimum(hi, parent + 1.0)
    vals[:, i] = lo + (hi - lo) * rng.random(vals.shape[0])


def gibbs_chains(
    d: int, k: int, sweeps: int, n_chains: int, seed: int
) -> np.ndarray:
    """Final states of n_chains independent Gibbs chains, shape (n_chains, n_vertices).

    Chains start from the all-zeros function; one sweep updates every internal
    vertex once in breadth-first order.
    """
    if sweeps < 1:
        raise ValueError(f"sweeps must be >= 1, got {sweeps}")
    n = tree_size(d, k)
    n_internal = internal_count(d, k)
    rng = np.random.default_rng(seed & _MASK64)
    vals = np.zeros((n_chains, n))
    for _ in range(sweeps):
        for i in range(n_internal):
            _gibbs_update_site(vals, i, d, rng)
    return vals


def sample_continuous_gibbs(d: int, k: int, sweeps: int, seed: int) -> TreeFunction:
    """One approximate uniform sample from the continuous grounded polytope."""
    vals = gibbs_chains(d, k, sweeps, 1, seed)
    return TreeFunction(d=d, k=k, M=None, values=[float(v) for v in vals[0]])


def sample_root_values_gibbs(
    d: int, k: int, sweeps: int, n_chains: int, seed: int
) -> np.ndarray:
    """Root values of independent Gibbs chains (the marginal the theory bounds)."""
    return gibbs_chains(d, k, sweeps, n_chains, seed)[:, 0]


def tree_function_to_json_dict(fn: TreeFunction, seed: int) -> dict:
    """JSON-lines record for one emitted sample."""
    if fn.continuous:
        values = [float(f"{v:.17g}") for v in fn.values]
        m: "int | str" = "continuous"
    else:
        values = list(fn.values)
        m = fn.M
    return {"seed": seed, "d": fn.d, "M_or_continuous": m, "k": fn.k, "values": values}
