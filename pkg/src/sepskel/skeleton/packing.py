"""Weighted set packing of overlapping separators."""

import itertools

import numpy as np


def normalized_weights(weights, M, alive):
    """``w_i / (w_i + sum of alive overlapping w_j)`` for alive ``i``, else -inf."""
    w = np.asarray(weights, dtype=np.float64)
    wa = np.where(alive, w, 0.0)
    denom = w + M.astype(np.float64) @ wa
    out = np.divide(w, denom, out=np.zeros_like(w), where=denom > 0)
    return np.where(alive, out, -np.inf)


def greedy_pack(weights, M):
    """Greedy packing by opportunity-cost-normalized weight.

    Repeatedly keeps the alive separator with the highest normalized weight
    (ties go to the lower index) and discards everything overlapping it.

    Returns
    -------
    list of int
        Selected indices in selection order.
    """
    w = np.asarray(weights, dtype=np.float64)
    M = np.asarray(M, dtype=bool)
    n = len(w)
    if M.shape != (n, n):
        raise ValueError("overlap matrix shape does not match weights")
    alive = np.ones(n, dtype=bool)
    selected = []
    while alive.any():
        i = int(np.argmax(normalized_weights(w, M, alive)))
        selected.append(i)
        alive[i] = False
        alive &= ~M[i]
    return selected


def brute_force_pack(weights, M):
    """Exhaustive maximum-weight packing (small inputs only)."""
    w = np.asarray(weights, dtype=np.float64)
    M = np.asarray(M, dtype=bool)
    n = len(w)
    best, best_set = -1.0, ()
    for r in range(n + 1):
        for sub in itertools.combinations(range(n), r):
            if any(M[a, b] for a, b in itertools.combinations(sub, 2)):
                continue
            total = float(w[list(sub)].sum()) if sub else 0.0
            if total > best:
                best, best_set = total, sub
    return list(best_set), best


def is_packing(selected, M):
    return not any(M[a, b] for a, b in itertools.combinations(selected, 2))


def is_maximal(selected, M):
    """No unselected index can be added without overlapping the selection."""
    sel = np.zeros(len(M), dtype=bool)
    sel[list(selected)] = True
    blocked = M[sel].any(axis=0) | sel
    return bool(blocked.all())
