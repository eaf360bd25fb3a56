"""Urn run on the Risk graph with the bad-event monitors evaluated every step.

Vertex 0 is the centre and periphery pair ``i`` is ``2i+1, 2i+2``. At step
``k`` (before the ``k``-th event fires) the monitors are

    A_k   balls at the centre
    B_k   balls in the periphery
    r_k(v), r_k(j)  share of periphery balls at vertex v / of colour j
    f(k)  = 1/3 - alpha - sum_{i=n}^{n+k-1} i^{-3/2}

and the bad events are A_k > (k n)^{1/6}, B_k < 3n + k/2, r_k(v) = 0 for a
periphery vertex, and r_k(j) < f(k) for a colour. T is the first step at
which one of them holds; Y_k(j) = r_k(j) - f(k) for k <= T and is frozen
afterwards.
"""

from __future__ import annotations

import numpy as np

from .._accel import njit
from .urn import nucleate, pick_vertex

EV_A, EV_B, EV_C, EV_D = 0, 1, 2, 3


@njit
def _monitors(colour, count, s, n, alpha_f, k, rv, rj):
    """Fill ``rv``/``rj``; returns ``(A, B, bad_mask)``."""
    A = count[0]
    B = 0
    for v in range(1, 2 * s + 1):
        B += count[v]
    for j in range(s):
        rj[j] = 0.0
    zero_v = False
    for v in range(1, 2 * s + 1):
        if count[v] == 0:
            zero_v = True
        if B > 0:
            rv[v - 1] = count[v] / B
            if count[v] > 0:
                rj[colour[v]] += count[v]
        else:
            rv[v - 1] = 0.0
    low_j = False
    for j in range(s):
        if B > 0:
            rj[j] /= B
        if rj[j] < alpha_f:
            low_j = True
    bad = 0
    if A > (k * n) ** (1.0 / 6.0):
        bad |= 1 << EV_A
    if B < 3 * n + k / 2.0:
        bad |= 1 << EV_B
    if zero_v:
        bad |= 1 << EV_C
    if low_j:
        bad |= 1 << EV_D
    return A, B, bad


@njit
def run_risk(indptr, indices, colour, count, ctot, tree, ist, fst, sel, clk, s, n, alpha,
             max_steps, stride, rec_step, rec_A, rec_B, rec_rv, rec_rj, rec_f, rec_Y,
             first_hit, tstop, sample_k, y_before, y_after, ext_step):
    """Advance from step 0 to ``max_steps``.

    Every ``stride`` steps (``stride > 0``) the monitor values at the current
    step go to ``rec_*``; the buffers must hold ``max_steps // stride + 1``
    rows. ``first_hit[e]`` receives the first step of bad event ``e`` (-1 if
    none) and ``tstop[0]`` the stopping time T. For each ``sample_k[i]``,
    ``y_before[i]`` and ``y_after[i]`` receive Y at that step and the next.
    Returns the number of steps taken.
    """
    rv = np.empty(2 * s, dtype=np.float64)
    rj = np.empty(s, dtype=np.float64)
    Y = np.empty(s, dtype=np.float64)
    deltas = np.empty(2 * s, dtype=np.int64)
    f = 1.0 / 3.0 - alpha
    comp = 0.0                      # Kahan compensation for the running sum
    nsamp = sample_k.shape[0]
    si = 0
    nrec = 0
    for e in range(4):
        first_hit[e] = -1
    tstop[0] = -1
    k = 0
    while True:
        A, B, bad = _monitors(colour, count, s, n, f, k, rv, rj)
        for e in range(4):
            if (bad >> e) & 1 and first_hit[e] < 0:
                first_hit[e] = k
        if tstop[0] < 0:
            for j in range(s):
                Y[j] = rj[j] - f
            if bad != 0:
                tstop[0] = k
        # Y_k with k = sample_k[si] is y_before, Y_{k+1} is y_after
        if si > 0 and sample_k[si - 1] == k - 1:
            for j in range(s):
                y_after[si - 1, j] = Y[j]
        if si < nsamp and sample_k[si] == k:
            for j in range(s):
                y_before[si, j] = Y[j]
            si += 1
        if stride > 0 and k % stride == 0:
            rec_step[nrec] = k
            rec_A[nrec] = A
            rec_B[nrec] = B
            rec_f[nrec] = f
            for v in range(2 * s):
                rec_rv[nrec, v] = rv[v]
            for j in range(s):
                rec_rj[nrec, j] = rj[j]
                rec_Y[nrec, j] = Y[j]
            nrec += 1
        total = ist[0]
        if k >= max_steps or total <= 0:
            return k
        dt = clk.exponential(1.0 / total)
        v = pick_vertex(count, tree, total, sel.random())
        alive = ist[2]
        nucleate(indptr, indices, colour, count, ctot, tree, ist, v, deltas)
        fst[0] += dt
        ist[1] += 1
        if ist[2] < alive:
            for c in range(s):
                if ctot[c] == 0 and ext_step[c] < 0:
                    ext_step[c] = k + 1
        # f(k+1) = f(k) - (n+k)^{-3/2}
        term = -((n + k) ** -1.5) - comp
        t = f + term
        comp = (t - f) - term
        f = t
        k += 1
