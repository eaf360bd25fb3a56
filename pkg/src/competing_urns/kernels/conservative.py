"""Conservative (merging) urn system with optional marks.

Arrays: ``rb[0]`` red, ``rb[1]`` blue, ``pp`` purple counts; ``ms[c]`` marked
balls of colour ``c`` (only the first nucleator's colour is ever marked),
``ps`` marked purple; ``w`` per-vertex total of all balls (sampling weights).
``ist = [total, step, merges, rb_created, mark_colour, purple_created]`` with
``mark_colour = -1`` before the first nucleation; ``fst = [time, tau1]``.
"""

from __future__ import annotations

import numpy as np

from .._accel import njit
from .sampling import bump, draw_index, select

PURPLE = 2

I_TOTAL, I_STEP, I_MERGES, I_CREATED, I_MARK, I_PCREATED = 0, 1, 2, 3, 4, 5

RUNNING = 0
STEP_BUDGET = 2
TIME_BUDGET = 3
EXTINCT = 4
HORIZON = 7
BUFFER_FULL = 6


@njit
def pick_ball(rb, ms, pp, ps, w, tree, total, u1, u2):
    """Uniform ball: vertex by weight, then a kind within the urn.

    Returns ``(vertex, colour, marked)`` with colour 2 for purple. Within an
    urn the order is marked red, red, marked blue, blue, marked purple, purple.
    """
    v = select(w, tree, draw_index(u1, total))
    r = draw_index(u2, w[v])
    for c in range(2):
        if r < ms[c, v]:
            return v, c, 1
        if r < rb[c, v]:
            return v, c, 0
        r -= rb[c, v]
    if r < ps[v]:
        return v, PURPLE, 1
    return v, PURPLE, 0


@njit
def mark_jump(rb, ms, ps, mc, u):
    """Move marks from purple to unmarked balls of the marked colour at ``u``."""
    if mc < 0:
        return 0
    free = rb[mc, u] - ms[mc, u]
    j = ps[u] if ps[u] < free else free
    if j > 0:
        ps[u] -= j
        ms[mc, u] += j
    return j


@njit
def nucleate(indptr, indices, rb, ms, pp, ps, w, tree, ist, fst, marking, v, c, m):
    """Fire one ball of colour ``c`` (``m`` = marked) at ``v``."""
    if marking and ist[I_MARK] < 0 and c < PURPLE:
        ist[I_MARK] = c
        fst[1] = fst[0]
        m = 1
    mc = ist[I_MARK] if marking else -1
    for p in range(indptr[v], indptr[v + 1]):
        u = indices[p]
        if c == PURPLE:
            pp[u] += 1
            if m:
                ps[u] += 1
            bump(w, tree, u, 1)
            ist[I_TOTAL] += 1
            ist[I_PCREATED] += 1
        else:
            ist[I_CREATED] += 1
            o = 1 - c
            if rb[o, u] > 0:
                # the pair merges into one purple ball at u
                if ms[o, u] > 0:
                    ms[o, u] -= 1
                    rb[o, u] -= 1
                    pp[u] += 1
                    ps[u] += 1
                else:
                    rb[o, u] -= 1
                    pp[u] += 1
                    if m:
                        ps[u] += 1
                ist[I_MERGES] += 1
            else:
                rb[c, u] += 1
                if m:
                    ms[c, u] += 1
                bump(w, tree, u, 1)
                ist[I_TOTAL] += 1
        mark_jump(rb, ms, ps, mc, u)


@njit
def run_conservative(indptr, indices, rb, ms, pp, ps, w, tree, ist, fst, sel, clk, marking,
                     max_steps, max_time, horizon_after_first, stride,
                     rec_step, rec_time, rec_counts, nrec):
    """Advance the conservative system; ``rec_counts`` rows hold R,B,P,B*,P*... per vertex.

    ``horizon_after_first >= 0`` stops at time ``tau1 + horizon`` (the state
    in force at that time is left in place).
    """
    n = w.shape[0]
    cap = rec_step.shape[0]
    while True:
        total = ist[I_TOTAL]
        if total <= 0:
            return EXTINCT
        if ist[I_STEP] >= max_steps:
            return STEP_BUDGET
        if stride > 0 and nrec[0] >= cap:
            return BUFFER_FULL
        dt = clk.exponential(1.0 / total)
        t_new = fst[0] + dt
        if horizon_after_first >= 0 and ist[I_MARK] >= 0 and t_new > fst[1] + horizon_after_first:
            return HORIZON
        if t_new > max_time:
            return TIME_BUDGET
        u1 = sel.random()
        u2 = sel.random()
        v, c, m = pick_ball(rb, ms, pp, ps, w, tree, total, u1, u2)
        fst[0] = t_new
        nucleate(indptr, indices, rb, ms, pp, ps, w, tree, ist, fst, marking, v, c, m)
        ist[I_STEP] += 1
        if stride > 0 and ist[I_STEP] % stride == 0:
            j = nrec[0]
            rec_step[j] = ist[I_STEP]
            rec_time[j] = fst[0]
            for x in range(n):
                rec_counts[j, 0 * n + x] = rb[0, x]
                rec_counts[j, 1 * n + x] = rb[1, x]
                rec_counts[j, 2 * n + x] = pp[x]
                rec_counts[j, 3 * n + x] = ms[0, x]
                rec_counts[j, 4 * n + x] = ms[1, x]
                rec_counts[j, 5 * n + x] = ps[x]
            nrec[0] += 1
