"""Outer-boundary walk and segment decomposition on the packed growth grid.

A unit boundary segment is stored by its start vertex ``(vx, vy)`` and
heading ``h`` (0 +x, 1 +y, 2 -x, 3 -y); the coloured unit square lies on
its left, so loops run counter-clockwise. Square ``(cx, cy)`` covers
``[cx, cx + 1] x [cy, cy + 1]``.
"""

from __future__ import annotations

import numpy as np

from .._accel import njit
from .growth import TILE, get

WALL = -2


@njit
def left_cell(vx, vy, h):
    """Square on the left of the unit segment leaving ``(vx, vy)`` along ``h``."""
    if h == 0:
        return vx, vy
    if h == 1:
        return vx - 1, vy
    if h == 2:
        return vx - 1, vy - 1
    return vx, vy - 1


@njit
def occupant(grid, x0, y0, halfplane, cx, cy):
    """Colour of square ``(cx, cy)``; -1 if empty, ``WALL`` below the half-plane."""
    if halfplane and cy < 0:
        return WALL
    gx = cx - x0
    gy = cy - y0
    if gx < 0 or gy < 0 or gx >= grid.shape[0] * TILE or gy >= grid.shape[1] * TILE:
        return -1
    return get(grid, gx, gy)


@njit
def trace(grid, x0, y0, halfplane, sx, sy, h0, vx, vy, hd, col):
    """Walk the boundary from vertex ``(sx, sy)`` with heading ``h0``.

    Turning rule at each vertex: right if the square ahead-right is filled,
    straight if only the square ahead-left is, else left. Preferring right
    keeps diagonal contacts inside the loop (closed-square connectivity).
    The walk stops on returning to its start (plane) or when the next segment
    would run along the wall (half-plane). Returns the number of segments,
    or -1 if the output arrays are too short.
    """
    cap = vx.shape[0]
    n = 0
    x = sx
    y = sy
    h = h0
    while True:
        if n == cap:
            return -1
        cx, cy = left_cell(x, y, h)
        vx[n] = x
        vy[n] = y
        hd[n] = h
        col[n] = occupant(grid, x0, y0, halfplane, cx, cy)
        n += 1
        if h == 0:
            x += 1
        elif h == 1:
            y += 1
        elif h == 2:
            x -= 1
        else:
            y -= 1
        rx, ry = left_cell(x, y, (h + 3) % 4)
        lx, ly = left_cell(x, y, h)
        if occupant(grid, x0, y0, halfplane, rx, ry) != -1:
            h = (h + 3) % 4
        elif occupant(grid, x0, y0, halfplane, lx, ly) == -1:
            h = (h + 1) % 4
        if not halfplane and x == sx and y == sy and h == h0:
            return n
        if halfplane:
            cx, cy = left_cell(x, y, h)
            if cy < 0:
                return n


@njit
def decompose(hd, lab, start, closed, entries, seg_entry, turn):
    """Signed stretch lengths walking from segment ``start``.

    A stretch ends at a corner or where the label changes; a change strictly
    inside a side adds a 0 entry after the stretch. For closed loops the
    walk returns to ``start``, which must follow a corner or a label change;
    a mid-side change there yields a trailing 0. ``seg_entry[i]`` receives
    the entry index of segment ``i`` and ``turn[e]`` the turn after entry
    ``e`` (0 none, 1 left, 3 right). Returns the number of entries, or -1
    when ``start`` is not a valid starting gap.
    """
    n = hd.shape[0]
    if closed:
        p = (start - 1) % n
        if hd[p] == hd[start] and lab[p] == lab[start]:
            return -1
    m = 0
    length = 0
    cur = lab[start]
    for j in range(n):
        i = (start + j) % n if closed else j
        if j > 0:
            p = (start + j - 1) % n if closed else j - 1
            corner = hd[i] != hd[p]
            brk = lab[i] != lab[p]
            if corner or brk:
                entries[m] = cur * length
                turn[m] = (hd[i] - hd[p]) % 4
                m += 1
                if brk and not corner:
                    entries[m] = 0
                    turn[m] = 0
                    m += 1
                length = 0
                cur = lab[i]
        seg_entry[i] = m
        length += 1
    last = (start + n - 1) % n if closed else n - 1
    entries[m] = cur * length
    turn[m] = (hd[start] - hd[last]) % 4 if closed else 0
    m += 1
    if closed and hd[start] == hd[last] and lab[start] != lab[last]:
        entries[m] = 0
        turn[m] = 0
        m += 1
    return m


@njit
def row_extreme(grid, x0, y0, y, xmin, xmax, leftmost):
    """Leftmost (or rightmost) filled square in row ``y`` within
    ``[xmin, xmax]``; ``xmin - 1`` if the row is empty."""
    if leftmost:
        for x in range(xmin, xmax + 1):
            if occupant(grid, x0, y0, False, x, y) >= 0:
                return x
    else:
        for x in range(xmax, xmin - 1, -1):
            if occupant(grid, x0, y0, False, x, y) >= 0:
                return x
    return xmin - 1


@njit
def count_components8(cells):
    """Number of 8-connected components of the filled squares (``cells >= 0``)."""
    W = cells.shape[0]
    H = cells.shape[1]
    seen = np.zeros((W, H), dtype=np.uint8)
    stack = np.empty((64, 2), dtype=np.int64)
    comps = 0
    for i in range(W):
        for j in range(H):
            if cells[i, j] < 0 or seen[i, j]:
                continue
            comps += 1
            seen[i, j] = 1
            stack[0, 0] = i
            stack[0, 1] = j
            top = 1
            while top > 0:
                top -= 1
                a = stack[top, 0]
                b = stack[top, 1]
                for da in range(-1, 2):
                    for db in range(-1, 2):
                        u = a + da
                        v = b + db
                        if u < 0 or v < 0 or u >= W or v >= H:
                            continue
                        if cells[u, v] < 0 or seen[u, v]:
                            continue
                        seen[u, v] = 1
                        if top == stack.shape[0]:
                            bigger = np.empty((2 * top, 2), dtype=np.int64)
                            bigger[:top] = stack
                            stack = bigger
                        stack[top, 0] = u
                        stack[top, 1] = v
                        top += 1
    return comps
