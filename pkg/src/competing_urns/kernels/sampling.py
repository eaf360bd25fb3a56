"""Discrete sampling proportional to integer counts.

Small systems use a linear cumulative scan; larger ones a Fenwick tree of
prefix sums (``tree`` has length ``n + 1``; an empty tree means scan).
"""

from __future__ import annotations

import numpy as np

from .._accel import njit

TREE_THRESHOLD = 64


def make_tree(weights: np.ndarray) -> np.ndarray:
    n = weights.shape[0]
    if n <= TREE_THRESHOLD:
        return np.zeros(0, dtype=np.int64)
    tree = np.zeros(n + 1, dtype=np.int64)
    for i in range(n):
        fenwick_add(tree, i, int(weights[i]))
    return tree


@njit
def fenwick_add(tree, i, delta):
    n = tree.shape[0] - 1
    j = i + 1
    while j <= n:
        tree[j] += delta
        j += j & (-j)


@njit
def fenwick_find(tree, r):
    """Smallest 0-based index whose inclusive prefix sum exceeds ``r``."""
    n = tree.shape[0] - 1
    pos = 0
    mask = 1
    while mask * 2 <= n:
        mask *= 2
    while mask > 0:
        nxt = pos + mask
        if nxt <= n and tree[nxt] <= r:
            pos = nxt
            r -= tree[nxt]
        mask //= 2
    return pos


@njit
def linear_find(weights, r):
    acc = 0
    n = weights.shape[0]
    for i in range(n):
        acc += weights[i]
        if r < acc:
            return i
    return n - 1


@njit
def draw_index(u, total):
    """Map ``u`` in [0, 1) to an integer in ``[0, total)``."""
    r = np.int64(u * total)
    if r >= total:
        r = total - 1
    return r


@njit
def select(weights, tree, r):
    if tree.shape[0] > 0:
        return fenwick_find(tree, r)
    return linear_find(weights, r)


@njit
def bump(weights, tree, i, delta):
    weights[i] += delta
    if tree.shape[0] > 0:
        fenwick_add(tree, i, delta)
