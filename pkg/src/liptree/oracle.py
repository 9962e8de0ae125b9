"""Independent ground truth for the counting tables.

``enumerate_functions`` walks every grounded M-Lipschitz function directly
from the definition (no level recursion), so it can cross-check the table
builder on tiny instances.  ``continuous_root_density`` approximates the
root density of the real-valued model by rescaling the discrete law at a
fine Lipschitz constant, which is exactly the discretization the continuous
result is proved through.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Backend, ModelParams, build_tables, root_distribution

DEFAULT_BUDGET = 10**8


class BudgetExceededError(RuntimeError):
    """The a-priori enumeration bound exceeds the allowed budget."""


def tree_size(d: int, k: int) -> int:
    """Total number of vertices of the depth-k complete d-ary tree."""
    return (d ** (k + 1) - 1) // (d - 1)


def internal_count(d: int, k: int) -> int:
    """Number of non-leaf vertices (breadth-first indices 0..n-1)."""
    return (d**k - 1) // (d - 1)


def vertex_depth(i: int, d: int) -> int:
    """Depth of breadth-first index i (root 0; children of i are d*i+1..d*i+d)."""
    depth = 0
    first_next = 1  # first index of the next level
    level_size = d
    while i >= first_next:
        first_next += level_size
        level_size *= d
        depth += 1
    return depth


@dataclass
class CountProfile:
    """Exact per-root-value counts from direct enumeration."""

    params: ModelParams
    per_root_value: dict[int, int]  # t >= 0 only; counts are symmetric in t
    total: int

    def count(self, t: int) -> int:
        return self.per_root_value.get(abs(t), 0)

    def to_json_dict(self) -> dict:
        """JSON form with counts as decimal strings (they can be arbitrarily big)."""
        p = self.params
        return {
            "d": p.d,
            "M": p.M,
            "k": p.k,
            "total": str(self.total),
            "per_root_value": {str(t): str(c) for t, c in sorted(self.per_root_value.items())},
        }


def enumerate_functions(params: ModelParams, budget: int = DEFAULT_BUDGET) -> CountProfile:
    """Count all grounded M-Lipschitz functions by assigning internal vertices
    depth-first in breadth-first index order, pruning infeasible values early.

    A value at a vertex with r tree levels below it extends to the leaves iff
    its magnitude is at most r*M, so the pruned walk visits exactly the valid
    functions.
    """
    d, M, k = params.d, params.M, params.k
    n_internal = internal_count(d, k)
    bound = (2 * k * M + 1) ** n_internal
    if bound > budget:
        raise BudgetExceededError(
            f"enumeration bound {bound} exceeds budget {budget} for {params}"
        )

    depths = [vertex_depth(i, d) for i in range(n_internal)]
    values = [0] * n_internal
    counts: dict[int, int] = {}

    def rec(i: int) -> None:
        if i == n_internal:
            root = values[0]
            counts[root] = counts.get(root, 0) + 1
            return
        reach = (k - depths[i]) * M  # max magnitude still groundable
        lo, hi = -reach, reach
        if i > 0:
            parent = values[(i - 1) // d]
            lo = max(lo, parent - M)
            hi = min(hi, parent + M)
        for v in range(lo, hi + 1):
            values[i] = v
            rec(i + 1)

    rec(0)
    total = sum(counts.values())
    per_root = {t: c for t, c in counts.items() if t >= 0}
    return CountProfile(params, per_root, total)


def continuous_root_density(d: int, k: int, grid_M: int) -> tuple[np.ndarray, np.ndarray]:
    """Root density of the continuous grounded Lipschitz model on the grid
    x = t / grid_M, via the discrete law at Lipschitz constant grid_M.

    Returns (xs, density) over t = -k*grid_M .. k*grid_M.
    """
    if grid_M < 8:
        raise ValueError(f"grid_M must be >= 8, got {grid_M}")
    params = ModelParams(d=d, M=grid_M, k=k)
    dist = root_distribution(build_tables(params, Backend.LOG))
    radius = k * grid_M
    ts = np.arange(-radius, radius + 1)
    xs = ts / grid_M
    density = grid_M * dist.probs_full()
    return xs, density
