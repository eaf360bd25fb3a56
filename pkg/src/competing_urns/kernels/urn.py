"""Event loop of the s-type annihilating urn process.

State is carried in flat arrays so the loop can be resumed:
``colour[v]`` (-1 when empty), ``count[v]``, per-colour totals ``ctot``,
``ist = [total_balls, step, colours_alive]`` and ``fst = [time]``.
"""

from __future__ import annotations

import numpy as np

from .._accel import njit
from .sampling import bump, draw_index, select

RUNNING = 0
MONOCHROMATIC = 1
STEP_BUDGET = 2
TIME_BUDGET = 3
EXTINCT = 4
TOTAL_REACHED = 5
BUFFER_FULL = 6
BOOKKEEPING_ERROR = -1

DEBUG_PERIOD = 1024


@njit
def nucleate(indptr, indices, colour, count, ctot, tree, ist, v, deltas):
    """One ball at ``v`` sends a copy of itself to every neighbour."""
    c = colour[v]
    k = 0
    for p in range(indptr[v], indptr[v + 1]):
        u = indices[p]
        if count[u] == 0:
            colour[u] = c
            bump(count, tree, u, 1)
            ctot[c] += 1
            ist[0] += 1
            deltas[k] = 1
        elif colour[u] == c:
            bump(count, tree, u, 1)
            ctot[c] += 1
            ist[0] += 1
            deltas[k] = 1
        else:
            cu = colour[u]
            bump(count, tree, u, -1)
            ctot[cu] -= 1
            if ctot[cu] == 0:
                ist[2] -= 1
            ist[0] -= 1
            if count[u] == 0:
                colour[u] = -1
            deltas[k] = -1
        k += 1
    return k


@njit
def pick_vertex(count, tree, total, u):
    return select(count, tree, draw_index(u, total))


@njit
def run_urn(indptr, indices, colour, count, ctot, tree, ist, fst, sel, clk,
            max_steps, max_time, stop_mono, min_total, stride,
            rec_step, rec_time, rec_colour, rec_count, nrec,
            cp_times, cp_step, cp_colour, cp_count, cp_pos, ext_step, ext_time, debug):
    """Advance until a stop condition fires; returns a status code.

    Stride samples go to ``rec_*`` (``nrec[0]`` filled so far) and the loop
    returns ``BUFFER_FULL`` when they run out. Fixed-time checkpoints go to
    ``cp_*``: the state at time ``t`` is the one in force just before the
    first event later than ``t``. ``ext_step``/``ext_time`` receive the step
    and time at which each colour loses its last ball (entries already set
    are kept).
    """
    n = count.shape[0]
    maxdeg = 0
    for v in range(n):
        d = indptr[v + 1] - indptr[v]
        if d > maxdeg:
            maxdeg = d
    deltas = np.empty(max(maxdeg, 1), dtype=np.int64)
    cap = rec_step.shape[0]
    ncp = cp_times.shape[0]
    while True:
        total = ist[0]
        if total <= 0:
            return EXTINCT
        if stop_mono and ist[2] <= 1:
            return MONOCHROMATIC
        if ist[1] >= max_steps:
            return STEP_BUDGET
        if min_total > 0 and total >= min_total:
            return TOTAL_REACHED
        if stride > 0 and nrec[0] >= cap:
            return BUFFER_FULL
        dt = clk.exponential(1.0 / total)
        t_new = fst[0] + dt
        while cp_pos[0] < ncp and cp_times[cp_pos[0]] < t_new:
            j = cp_pos[0]
            cp_step[j] = ist[1]
            for v in range(n):
                cp_colour[j, v] = colour[v]
                cp_count[j, v] = count[v]
            cp_pos[0] += 1
        if t_new > max_time:
            return TIME_BUDGET
        v = pick_vertex(count, tree, total, sel.random())
        alive = ist[2]
        nucleate(indptr, indices, colour, count, ctot, tree, ist, v, deltas)
        fst[0] = t_new
        ist[1] += 1
        if ist[2] < alive:
            for c in range(ctot.shape[0]):
                if ctot[c] == 0 and ext_step[c] < 0:
                    ext_step[c] = ist[1]
                    ext_time[c] = t_new
        if debug and ist[1] % DEBUG_PERIOD == 0:
            s = 0
            for w in range(n):
                s += count[w]
            if s != ist[0]:
                return BOOKKEEPING_ERROR
        if stride > 0 and ist[1] % stride == 0:
            j = nrec[0]
            rec_step[j] = ist[1]
            rec_time[j] = fst[0]
            for w in range(n):
                rec_colour[j, w] = colour[w]
                rec_count[j, w] = count[w]
            nrec[0] += 1
