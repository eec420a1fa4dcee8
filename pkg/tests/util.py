"""Shared helpers: random feasible instances and brute-force oracles.

The oracles enumerate disjoint column subsets directly (bitmask DFS) and
stay independent of the branch-and-bound path they are used to check.
"""

from __future__ import annotations

import numpy as np


def random_instance(rng, n_rows, n_cols, max_parts=5, ensure_feasible=False):
    """Random exact-cover instance seeded with row partitions.

    Two random partitions of the rows seed the column pool (so feasible
    solutions of different sizes exist), padded with random subsets.
    Truncation to n_cols can destroy both partitions unless
    ``ensure_feasible`` keeps the first one intact.
    """
    keep, cols = [], []
    for which in range(2):
        k = int(rng.integers(1, max_parts + 1))
        assign = rng.integers(0, k, size=n_rows)
        parts = [np.nonzero(assign == g)[0] for g in range(k)]
        parts = [p for p in parts if p.size]
        if which == 0 and ensure_feasible:
            keep = parts
        else:
            cols.extend(parts)
    while len(keep) + len(cols) < n_cols:
        mask = rng.random(n_rows) < rng.uniform(0.1, 0.5)
        idx = np.nonzero(mask)[0]
        if idx.size:
            cols.append(idx)
    rng.shuffle(cols)
    cols = (keep + cols)[:max(n_cols, len(keep))]
    rng.shuffle(cols)
    c = rng.normal(size=len(cols))
    return tuple(cols), c


def _masks(columns, n_rows):
    full = (1 << n_rows) - 1
    masks = []
    for col in columns:
        m = 0
        for i in col:
            m |= 1 << int(i)
        masks.append(m)
    return masks, full


def brute_force_best_partition(columns, c, n_rows, ell):
    """Exhaustive search over disjoint subsets of at most ell columns.

    Returns (objective, selected tuple) of the best exact cover, or None
    when no feasible partition exists.
    """
    masks, full = _masks(columns, n_rows)
    best = [None]

    def dfs(start, union, chosen, obj):
        if union == full:
            if best[0] is None or obj > best[0][0]:
                best[0] = (obj, tuple(chosen))
            return
        if len(chosen) >= ell:
            return
        for j in range(start, len(masks)):
            if masks[j] & union:
                continue
            chosen.append(j)
            dfs(j + 1, union | masks[j], chosen, obj + c[j])
            chosen.pop()

    dfs(0, 0, [], 0.0)
    return best[0]


def brute_force_cover_sizes(columns, n_rows):
    """All achievable exact-cover sizes, by exhaustive disjoint DFS."""
    masks, full = _masks(columns, n_rows)
    sizes = set()

    def dfs(start, union, count):
        if union == full:
            sizes.add(count)
            return
        for j in range(start, len(masks)):
            if masks[j] & union:
                continue
            dfs(j + 1, union | masks[j], count + 1)

    dfs(0, 0, 0)
    return sizes
