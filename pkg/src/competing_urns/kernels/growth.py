"""Event loop of the s-type growth model on Z^2 (or the half-plane y >= 0).

The coloured set lives on a dense grid of ``TILE`` x ``TILE`` tiles of
packed ``bits``-bit cells (``0`` = uncoloured, ``c + 1`` = colour ``c``):
``grid[tx, ty, ry, byte]`` with ``bits = grid.shape[3] * 8 // TILE``. Cell
``(gx, gy)`` = ``(x - x0, y - y0)``; ``x0`` and ``y0`` are multiples of
``TILE``. Tiling keeps row and column fills cache-local. The caller
re-allocates the grid when the coloured bounding box gets within ``MARGIN``
of an edge. ``stepcol`` (step each site was coloured) is optional: an empty
array disables it.

Boundary edges ``(source site, direction)`` are kept in ``E[:ne]`` with lazy
deletion: an entry whose target has since been coloured is stale, and is
swap-removed when drawn. The number of live edges per colour is exact in
``ecount``. ``ist`` = [live edges, step, coloured sites, xmin, xmax, ymin,
ymax, conflict x, conflict y]; ``fst`` = [time].
"""

from __future__ import annotations

import numpy as np

from .._accel import njit
from .sampling import draw_index

DX = np.array([1, 0, -1, 0], dtype=np.int64)
DY = np.array([0, 1, 0, -1], dtype=np.int64)

MARGIN = 3

I_LIVE, I_STEP, I_NCOL, I_XMIN, I_XMAX, I_YMIN, I_YMAX, I_CX, I_CY = range(9)

RUNNING = 0
SINGLE_COLOUR = 1
STEP_BUDGET = 2
TIME_BUDGET = 3
NO_BOUNDARY = 4
NEED_GROW = 5
BUFFER_FULL = 6
CONFLICT = -2


MAX_COLOURS = 15
TILE = 64
TILE_SHIFT = 6


def cell_bits(n_colours: int) -> int:
    return 2 if n_colours <= 3 else 4


@njit
def get(grid, gx, gy):
    """Colour of cell ``(gx, gy)``, -1 if uncoloured."""
    b = grid.shape[3] >> 3           # 2 or 4 bits; rows hold TILE * b / 8 bytes
    lx = gx & (TILE - 1)
    sh = (lx & (8 // b - 1)) * b
    v = grid[gx >> TILE_SHIFT, gy >> TILE_SHIFT, gy & (TILE - 1), (lx * b) >> 3]
    return np.int64((v >> sh) & ((1 << b) - 1)) - 1


@njit
def put(grid, gx, gy, c):
    b = grid.shape[3] >> 3
    lx = gx & (TILE - 1)
    sh = (lx & (8 // b - 1)) * b
    tx = gx >> TILE_SHIFT
    ty = gy >> TILE_SHIFT
    ry = gy & (TILE - 1)
    k = (lx * b) >> 3
    old = np.int64(grid[tx, ty, ry, k])
    grid[tx, ty, ry, k] = np.uint8((old & ~(((1 << b) - 1) << sh)) | ((c + 1) << sh))


def new_grid(ntx: int, nty: int, bits: int) -> np.ndarray:
    return np.zeros((ntx, nty, TILE, TILE * bits // 8), dtype=np.uint8)


@njit
def _grow_rows(a, extra):
    b = np.empty((a.shape[0] + extra, a.shape[1]), dtype=a.dtype)
    b[: a.shape[0]] = a
    return b


@njit
def _paint_loop(grid, stepcol, x0, y0, halfplane, c, step, E, ecount, scount, ist, q, pos,
                close):
    """Body of :func:`paint`; ``pos`` = [head, tail, kept, ne, status].

    Returns before any write that could overflow ``E`` or ``q`` (status 1) so
    that neither array is re-bound inside the loop, which keeps it tight.
    """
    head = pos[0]
    tail = pos[1]
    kept = pos[2]
    ne = pos[3]
    status = 0
    while head < tail:
        if ne + 4 > E.shape[0] or tail + 4 > q.shape[0]:
            status = 1
            break
        x = q[head, 0]
        y = q[head, 1]
        head += 1
        if get(grid, x - x0, y - y0) >= 0:
            if head > 1:
                continue       # queued twice; already handled
        else:
            put(grid, x - x0, y - y0, c)
            if stepcol.shape[0] > 0:
                stepcol[x - x0, y - y0] = step
            scount[c] += 1
            ist[I_NCOL] += 1
            if x < ist[I_XMIN]:
                ist[I_XMIN] = x
            if x > ist[I_XMAX]:
                ist[I_XMAX] = x
            if y < ist[I_YMIN]:
                ist[I_YMIN] = y
            if y > ist[I_YMAX]:
                ist[I_YMAX] = y
            for d in range(4):
                zx = x + DX[d]
                zy = y + DY[d]
                if halfplane and zy < 0:
                    continue
                cz = get(grid, zx - x0, zy - y0)
                if cz >= 0:
                    ecount[cz] -= 1
                    ist[I_LIVE] -= 1
                else:
                    E[ne, 0] = x
                    E[ne, 1] = y
                    E[ne, 2] = d
                    ne += 1
                    ecount[c] += 1
                    ist[I_LIVE] += 1
        q[kept, 0] = x
        q[kept, 1] = y
        kept += 1
        if not close:
            continue
        for d in range(4):
            zx = x + DX[d]
            zy = y + DY[d]
            if halfplane and zy < 0:
                continue
            if get(grid, zx - x0, zy - y0) >= 0:
                continue
            # four neighbours: a conflict needs the two others to share a colour
            same = 0
            o1 = -1
            o2 = -1
            for e in range(4):
                wy = zy + DY[e]
                if halfplane and wy < 0:
                    continue
                cw = get(grid, zx + DX[e] - x0, wy - y0)
                if cw == c:
                    same += 1
                elif cw >= 0:
                    if o1 < 0:
                        o1 = cw
                    else:
                        o2 = cw
            if same < 2:
                continue
            if o1 >= 0 and o1 == o2:
                ist[I_CX] = zx
                ist[I_CY] = zy
                status = 2
                break
            q[tail, 0] = zx
            q[tail, 1] = zy
            tail += 1
        if status == 2:
            break
    pos[0] = head
    pos[1] = tail
    pos[2] = kept
    pos[3] = ne
    pos[4] = status


@njit
def paint(grid, stepcol, x0, y0, halfplane, sx, sy, c, step, E, ne, ecount, scount, ist,
          q, close):
    """Colour ``(sx, sy)`` with ``c`` unless already coloured and, if ``close``,
    every site then forced by the two-neighbour rule for ``c``.

    ``q`` is a scratch queue, grown as needed. Returns ``(E, ne, q, qn, ok)``:
    ``q[:qn]`` lists the start site followed by the sites coloured by the
    closure. ``ok`` is False on a conflict, with the site stored in
    ``ist[I_CX], ist[I_CY]``. Sites are coloured when dequeued, so one site
    may be queued twice; the second copy is dropped.
    """
    q[0, 0] = sx
    q[0, 1] = sy
    pos = np.zeros(5, dtype=np.int64)
    pos[1] = 1
    pos[3] = ne
    while True:
        _paint_loop(grid, stepcol, x0, y0, halfplane, c, step, E, ecount, scount, ist, q, pos,
                    close)
        if pos[4] == 1:
            if pos[3] + 4 > E.shape[0]:
                # a large closure leaves most of its own pushes stale
                pos[3] = compact(grid, x0, y0, E, pos[3])
                if 2 * (pos[3] + 4) > E.shape[0]:
                    E = _grow_rows(E, E.shape[0] + 16)
            if pos[1] + 4 > q.shape[0]:
                q = _grow_rows(q, q.shape[0] + 16)
            continue
        return E, pos[3], q, pos[2], pos[4] == 0


@njit
def compact(grid, x0, y0, E, ne):
    """Drop stale edges in place, preserving order; returns the new length."""
    k = 0
    for i in range(ne):
        tx = E[i, 0] + DX[E[i, 2]]
        ty = E[i, 1] + DY[E[i, 2]]
        if get(grid, tx - x0, ty - y0) < 0:
            if k != i:
                E[k, 0] = E[i, 0]
                E[k, 1] = E[i, 1]
                E[k, 2] = E[i, 2]
            k += 1
    return k


@njit
def draw_edge(grid, x0, y0, E, ne, sel):
    """Uniform live edge; stale entries met on the way are removed.

    Returns ``(index, ne)``.
    """
    while True:
        i = draw_index(sel.random(), ne)
        tx = E[i, 0] + DX[E[i, 2]]
        ty = E[i, 1] + DY[E[i, 2]]
        if get(grid, tx - x0, ty - y0) < 0:
            return i, ne
        ne -= 1
        E[i, 0] = E[ne, 0]
        E[i, 1] = E[ne, 1]
        E[i, 2] = E[ne, 2]


@njit
def live_colours(ecount):
    k = 0
    for c in range(ecount.shape[0]):
        if ecount[c] > 0:
            k += 1
    return k


@njit
def run_growth(grid, stepcol, x0, y0, halfplane, E, ne, ecount, scount, ist, fst, sel, clk,
               max_steps, max_time, stop_single, stride, rec_step, rec_time, rec_scount,
               rec_ecount, nrec, last_event):
    """Advance until a stop condition; returns ``(code, E, ne, queue, qn)``.

    ``queue[:qn]`` are the sites coloured by the last event (nucleation site
    first) and ``last_event`` = [source x, source y, direction, colour].
    """
    W = grid.shape[0] * TILE
    H = grid.shape[1] * TILE
    q = np.zeros((64, 2), dtype=np.int64)
    qn = 0
    cap = rec_step.shape[0]
    n_col = ecount.shape[0]
    while True:
        live = ist[I_LIVE]
        if live <= 0:
            return NO_BOUNDARY, E, ne, q, qn
        if stop_single and live_colours(ecount) <= 1:
            return SINGLE_COLOUR, E, ne, q, qn
        if ist[I_STEP] >= max_steps:
            return STEP_BUDGET, E, ne, q, qn
        if (ist[I_XMIN] - x0 < MARGIN or x0 + W - 1 - ist[I_XMAX] < MARGIN
                or ist[I_YMIN] - y0 < MARGIN or y0 + H - 1 - ist[I_YMAX] < MARGIN):
            return NEED_GROW, E, ne, q, qn
        if stride > 0 and nrec[0] >= cap:
            return BUFFER_FULL, E, ne, q, qn
        dt = clk.exponential(1.0 / live)
        t_new = fst[0] + dt
        if t_new > max_time:
            return TIME_BUDGET, E, ne, q, qn
        i, ne = draw_edge(grid, x0, y0, E, ne, sel)
        sx = E[i, 0]
        sy = E[i, 1]
        d = E[i, 2]
        c = get(grid, sx - x0, sy - y0)
        tx = sx + DX[d]
        ty = sy + DY[d]
        ist[I_STEP] += 1
        fst[0] = t_new
        last_event[0] = sx
        last_event[1] = sy
        last_event[2] = d
        last_event[3] = c
        E, ne, q, qn, ok = paint(grid, stepcol, x0, y0, halfplane, tx, ty, c, ist[I_STEP],
                                 E, ne, ecount, scount, ist, q, True)
        if not ok:
            return CONFLICT, E, ne, q, qn
        if ne > 2 * ist[I_LIVE] + 1024:
            ne = compact(grid, x0, y0, E, ne)
        if stride > 0 and ist[I_STEP] % stride == 0:
            j = nrec[0]
            rec_step[j] = ist[I_STEP]
            rec_time[j] = fst[0]
            for k in range(n_col):
                rec_scount[j, k] = scount[k]
                rec_ecount[j, k] = ecount[k]
            nrec[0] += 1
