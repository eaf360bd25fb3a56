from __future__ import annotations

import numpy as np

from .._accel import njit


@njit
def csr_matvec(indptr, indices, x, out):
    n = indptr.shape[0] - 1
    for v in range(n):
        s = 0.0
        for p in range(indptr[v], indptr[v + 1]):
            s += x[indices[p]]
        out[v] = s


@njit
def shifted_power_iteration(indptr, indices, tol, max_iter):
    """Power iteration on ``A + I`` from the all-ones vector.

    Returns ``(lambda, pi, residual, iterations)`` with ``lambda`` the
    Rayleigh quotient of ``A`` at the final iterate; ``iterations == -1``
    signals that ``max_iter`` was exhausted.
    """
    n = indptr.shape[0] - 1
    x = np.ones(n) / np.sqrt(n)
    ax = np.empty(n)
    lam = 0.0
    res = np.inf
    for it in range(max_iter + 1):
        csr_matvec(indptr, indices, x, ax)
        lam = 0.0
        for v in range(n):
            lam += x[v] * ax[v]
        res = 0.0
        for v in range(n):
            d = ax[v] - lam * x[v]
            res += d * d
        res = np.sqrt(res)
        if res <= tol:
            return lam, x, res, it
        if it == max_iter:
            break
        norm = 0.0
        for v in range(n):
            ax[v] += x[v]
            norm += ax[v] * ax[v]
        norm = np.sqrt(norm)
        for v in range(n):
            x[v] = ax[v] / norm
    return lam, x, res, -1
