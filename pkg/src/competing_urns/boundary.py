"""Outer boundary of the growth droplet and its signed segment vector D.

Each coloured site is a closed unit square. Once the squares form one
connected set, its outer boundary splits into monochromatic intervals;
walking it counter-clockwise from a colour break and cutting at every
corner and every colour change gives the signed stretch lengths D (red
positive, blue negative), with a 0 after each change that falls strictly
inside a side. With 2k intervals there are 4k + 4 entries, and while k
stays fixed each nucleation on the outer boundary acts on D like one step
of the two-type urn on the cycle C_{4k+4}: the two neighbours of the
nucleating entry move by its sign. On the half-plane the boundary is an arc
between two points of the axis and the cycle becomes a path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BoundaryError, DropletDisconnected, Monochromatic
from .growth import HALFPLANE, GrowthState, growth_step
from .kernels import boundary as K

ANCHOR_RULE = ("urn identities are carried across events through an unaffected side; "
               "an anchor break hit by a nucleation stays with the entry on its "
               "counter-clockwise side")

_OFF = 1 << 29     # coordinates stay far inside +-2^29 (grid budget)


def _keys(cx: np.ndarray, cy: np.ndarray, d: np.ndarray) -> np.ndarray:
    return ((cx + _OFF) << 33) | ((cy + _OFF) << 2) | d


def edge_key(site: tuple[int, int], direction: int) -> int:
    """Key of the boundary segment between ``site`` and its neighbour in ``direction``."""
    return int(_keys(np.int64(site[0]), np.int64(site[1]), np.int64(direction)))


@dataclass(frozen=True)
class BoundaryLoop:
    """Unit segments of the outer boundary.

    ``vx, vy`` is the start vertex and ``heading`` the direction of travel
    (0 +x, 1 +y, 2 -x, 3 -y) of each segment; ``cells`` are the coloured
    squares beside them, ``colour`` their colours and ``labels`` the signs
    used for D. Closed loops run counter-clockwise from the bottom edge of
    the lowest, then leftmost, square; half-plane arcs run left to right.
    ``anchor`` is the segment after the first colour break (0 for arcs).
    """
    vx: np.ndarray = field(repr=False)
    vy: np.ndarray = field(repr=False)
    heading: np.ndarray = field(repr=False)
    cells: np.ndarray = field(repr=False)
    colour: np.ndarray = field(repr=False)
    labels: np.ndarray = field(repr=False)
    closed: bool
    anchor: int

    def __len__(self) -> int:
        return int(self.heading.size)

    @property
    def keys(self) -> np.ndarray:
        """One integer per segment, matching :func:`edge_key` of its growth edge."""
        d = (self.heading + (3 if not self._reversed else 1)) % 4
        return _keys(self.cells[:, 0], self.cells[:, 1], d)

    @property
    def _reversed(self) -> bool:
        return not self.closed

    @property
    def intervals(self) -> int:
        """Number of maximal monochromatic intervals."""
        changes = int(np.count_nonzero(self.colour != np.roll(self.colour, 1)))
        if self.closed:
            return changes if changes else 1
        return int(np.count_nonzero(self.colour[1:] != self.colour[:-1])) + 1

    @property
    def k(self) -> int:
        """Intervals of each colour on a closed loop; all intervals on an arc."""
        if self.closed:
            n = int(np.count_nonzero(self.colour != np.roll(self.colour, 1)))
            return n // 2
        return self.intervals

    def corners(self) -> tuple[int, int]:
        """``(outer, inner)`` corner counts: left and right turns along the walk."""
        h = self.heading
        nxt = np.roll(h, -1) if self.closed else h[1:]
        cur = h if self.closed else h[:-1]
        turn = (nxt - cur) % 4
        left, right = int(np.count_nonzero(turn == 1)), int(np.count_nonzero(turn == 3))
        return (left, right) if not self._reversed else (right, left)

    def vertices(self) -> np.ndarray:
        return np.column_stack([self.vx, self.vy])


@dataclass(frozen=True)
class DVector:
    """Signed stretch lengths; ``turns[i]`` is the turn after entry ``i``
    (0 none, 1 left, 3 right) and ``segment_entry`` maps loop segments to
    entries."""
    entries: tuple[int, ...]
    k: int
    closed: bool
    turns: tuple[int, ...]
    segment_entry: np.ndarray = field(repr=False, compare=False)
    start: int = 0

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def segments(self) -> int:
        """Number of non-empty straight monochromatic segments."""
        return sum(1 for e in self.entries if e != 0)


# tracing ------------------------------------------------------------------

def is_connected(state: GrowthState) -> bool:
    """Whether the coloured squares form one set (corner contact counts)."""
    cells, _, _ = state.window()
    return K.count_components8(cells) == 1


def _trace_raw(state: GrowthState):
    xmin, xmax, ymin, ymax = state.bbox
    if state.halfplane:
        xr = int(K.row_extreme(state.grid, state.x0, state.y0, 0, xmin, xmax, False))
        if xr < xmin:
            raise BoundaryError("coloured set does not touch the half-plane boundary")
        sx, sy, h0 = xr + 1, 0, 1
    else:
        xl = int(K.row_extreme(state.grid, state.x0, state.y0, ymin, xmin, xmax, True))
        sx, sy, h0 = xl, ymin, 0
    cap = 1024
    while True:
        vx = np.empty(cap, dtype=np.int64)
        vy = np.empty(cap, dtype=np.int64)
        hd = np.empty(cap, dtype=np.int64)
        col = np.empty(cap, dtype=np.int64)
        n = K.trace(state.grid, state.x0, state.y0, state.halfplane, sx, sy, h0, vx, vy, hd, col)
        if n >= 0:
            return vx[:n], vy[:n], hd[:n], col[:n]
        cap *= 4


def _labels(colour: np.ndarray, n_colours: int, closed: bool) -> np.ndarray:
    if n_colours <= 2:
        return np.where(colour == 0, 1, -1).astype(np.int64)
    # more colours: relabel the intervals alternately along the walk
    change = np.zeros(colour.size, dtype=np.int64)
    change[1:] = colour[1:] != colour[:-1]
    idx = np.cumsum(change)
    n_int = int(idx[-1]) + 1 if colour.size else 0
    if closed and n_int > 1 and colour[0] == colour[-1]:
        idx[idx == idx[-1]] = 0
        n_int -= 1
    if closed and n_int > 1 and n_int % 2:
        raise BoundaryError("an odd number of intervals cannot be relabelled alternately")
    return np.where(idx % 2 == 0, 1, -1).astype(np.int64)


def _make_loop(state: GrowthState, raw) -> BoundaryLoop:
    vx, vy, hd, col = raw
    cells = np.empty((hd.size, 2), dtype=np.int64)
    for h in range(4):
        sel = hd == h
        cx, cy = K.left_cell(0, 0, h)
        cells[sel, 0] = vx[sel] + cx
        cells[sel, 1] = vy[sel] + cy
    closed = not state.halfplane
    if not closed:
        # walked right to left along the arc; read it left to right
        ex = vx + np.array([1, 0, -1, 0])[hd]
        ey = vy + np.array([0, 1, 0, -1])[hd]
        vx, vy = ex[::-1].copy(), ey[::-1].copy()
        hd = ((hd + 2) % 4)[::-1].copy()
        col = col[::-1].copy()
        cells = cells[::-1].copy()
    lab = _labels(col, state.n_colours, closed)
    anchor = 0
    if closed:
        brk = np.flatnonzero(lab != np.roll(lab, 1))
        anchor = int(brk[0]) if brk.size else 0
    return BoundaryLoop(vx, vy, hd, cells, col, lab, closed, anchor)


def trace_outer_boundary(state: GrowthState, check_connected: bool = True) -> BoundaryLoop:
    """Outer boundary of the coloured squares, colours taken from the square
    beside each unit segment. Inner holes are ignored.

    Raises :class:`DropletDisconnected` before the squares form one set.
    """
    if state.n_coloured == 0:
        raise BoundaryError("no coloured sites")
    if check_connected:
        cells, _, _ = state.window()
        comps = int(K.count_components8(cells))
        if comps != 1:
            raise DropletDisconnected(comps)
    return _make_loop(state, _trace_raw(state))


# decomposition --------------------------------------------------------------

def decompose_boundary(loop: BoundaryLoop, start: int | None = None) -> DVector:
    """D entries walking from the anchor (or from segment ``start``).

    Raises :class:`Monochromatic` when there is no colour break on a closed
    loop, or fewer than two intervals on an arc.
    """
    k = loop.k
    if (loop.closed and k == 0) or (not loop.closed and k < 2):
        raise Monochromatic()
    s = loop.anchor if start is None else int(start) % len(loop)
    n = len(loop)
    entries = np.empty(2 * n + 2, dtype=np.int64)
    seg = np.empty(n, dtype=np.int64)
    turn = np.empty(2 * n + 2, dtype=np.int64)
    m = K.decompose(loop.heading, loop.labels, s, loop.closed, entries, seg, turn)
    if m < 0:
        raise BoundaryError(f"segment {s} does not follow a corner or a colour break")
    return DVector(tuple(int(e) for e in entries[:m]), k, loop.closed,
                   tuple(int(t) for t in turn[:m]), seg, s)


def expected_length(k: int, closed: bool) -> int:
    """Entries for ``k`` intervals per colour (closed) or ``k`` intervals (arc).

    Closed: one entry per corner plus two per break inside a side, and
    outer corners exceed inner ones by 4, giving 4k + 4. An arc turns by a
    half rather than a full revolution, so the corner excess is 2 and the
    same count gives 2k + 1.
    """
    return 4 * k + 4 if closed else 2 * k + 1


def reconstruct(loop: BoundaryLoop, D: DVector) -> np.ndarray:
    """Vertices rebuilt from the starting vertex and heading, the entry
    lengths and the turn after each entry; equals
    ``loop.vertices()`` rotated to ``D.start`` for a consistent pair."""
    x, y, h = int(loop.vx[D.start]), int(loop.vy[D.start]), int(loop.heading[D.start])
    dx, dy = (1, 0, -1, 0), (0, 1, 0, -1)
    out = []
    for e, t in zip(D.entries, D.turns):
        for _ in range(abs(e)):
            out.append((x, y))
            x += dx[h]
            y += dy[h]
        h = (h + t) % 4
    return np.array(out, dtype=np.int64).reshape(-1, 2)


def urn_update(entries: tuple[int, ...], i: int, closed: bool) -> tuple[int, ...]:
    """One urn step on D: the neighbours of entry ``i`` move by its sign."""
    out = list(entries)
    s = (entries[i] > 0) - (entries[i] < 0)
    m = len(out)
    for j in (i - 1, i + 1):
        if closed:
            out[j % m] += s
        elif 0 <= j < m:
            out[j] += s
    return tuple(out)


# coupled check --------------------------------------------------------------

@dataclass
class CorrespondenceReport:
    geometry: str
    events: int = 0
    events_checked: int = 0
    silent_events: int = 0
    tau0_step: int | None = None
    k_history: list[tuple[int, int]] = field(default_factory=list)
    windows: list[dict] = field(default_factory=list)
    divergences: list[dict] = field(default_factory=list)
    anchor_rule: str = ANCHOR_RULE

    @property
    def ok(self) -> bool:
        return not self.divergences

    def to_dict(self) -> dict:
        return {
            "geometry": self.geometry,
            "events": self.events,
            "events_checked": self.events_checked,
            "silent_events": self.silent_events,
            "tau0_step": self.tau0_step,
            "k_history": [list(p) for p in self.k_history],
            "windows": self.windows,
            "divergences": self.divergences,
            "anchor_rule": self.anchor_rule,
        }


@dataclass
class _Frame:
    loop: BoundaryLoop
    keys: np.ndarray
    entries: tuple[int, ...]
    seg_entry: np.ndarray      # loop segment -> persistent entry index
    k: int


def _frame(loop: BoundaryLoop) -> _Frame:
    D = decompose_boundary(loop)
    return _Frame(loop, loop.keys, D.entries, D.segment_entry.copy(), D.k)


def _realign(old: _Frame, loop: BoundaryLoop, i: int):
    """Decompose ``loop`` and express it in ``old``'s entry numbering, using a
    side at cyclic distance >= 2 from the nucleating entry ``i`` (such a side
    neither moves nor changes length). Returns ``(entries, seg_entry)`` or
    None when no reference side can be matched."""
    D = decompose_boundary(loop)
    m = len(old.entries)
    if len(D) != m:
        return None
    new_keys = loop.keys
    cands = sorted(range(m), key=lambda e: -min((e - i) % m, (i - e) % m)) if old.loop.closed \
        else sorted(range(m), key=lambda e: -abs(e - i))
    for e in cands:
        dist = min((e - i) % m, (i - e) % m) if old.loop.closed else abs(e - i)
        if dist < 2 or old.entries[e] == 0:
            continue
        segs = np.flatnonzero(old.seg_entry == e)
        hit = np.flatnonzero(new_keys == old.keys[segs[0]])
        if hit.size != 1:
            continue
        g = int(D.segment_entry[hit[0]])
        if old.loop.closed:
            shift = g - e
            ent = tuple(D.entries[(p + shift) % m] for p in range(m))
            seg = (D.segment_entry - shift) % m
        else:
            if g != e:
                return None
            ent, seg = D.entries, D.segment_entry.copy()
        return ent, seg
    return None


def coupled_equivalence_check(state: GrowthState, *, rng: np.random.Generator,
                              clock: np.random.Generator | None = None, events: int,
                              stop_when_single: bool = False,
                              max_divergences: int = 100) -> CorrespondenceReport:
    """Run ``events`` growth events on ``state`` in place, recomputing the
    outer boundary after each one and comparing D with one urn step.

    Events before the squares connect are not checked. A window is a maximal
    run of events with constant interval count; the count changing closes
    the window (an increase is recorded as a divergence). Inside a window an
    event whose edge is not on the outer boundary must leave the boundary
    unchanged; any other event must give exactly the urn update of the
    entry holding its edge.
    """
    geom = state.geometry
    closed = geom != HALFPLANE
    rep = CorrespondenceReport(geom)
    frame: _Frame | None = None
    connected = False
    k_prev = None
    win: dict | None = None

    def open_window(loop: BoundaryLoop, step: int):
        nonlocal frame, win
        k = loop.k
        if (closed and k >= 1) or (not closed and k >= 2):
            frame = _frame(loop)
            m = len(frame.entries)
            if m != expected_length(k, closed):
                rep.divergences.append({"step": step, "kind": "entry count", "k": k, "m": m})
            win = {"start_step": step, "end_step": step, "k": k, "m": m, "events": 0}
            rep.windows.append(win)
        else:
            frame, win = None, None

    def note_k(step: int, k: int):
        nonlocal k_prev
        if k != k_prev:
            if k_prev is not None and k > k_prev:
                rep.divergences.append({"step": step, "kind": "interval count increased",
                                        "old": k_prev, "new": k})
            rep.k_history.append((step, k))
            k_prev = k

    if is_connected(state):
        connected = True
        rep.tau0_step = state.step
        loop = trace_outer_boundary(state, check_connected=False)
        note_k(state.step, loop.k)
        open_window(loop, state.step)

    for _ in range(events):
        if state.n_boundary == 0 or len(rep.divergences) >= max_divergences:
            break
        if stop_when_single and state.boundary_colours().__len__() <= 1:
            break
        ev = growth_step(state, rng, clock)
        rep.events += 1
        step = state.step
        if not connected:
            if not is_connected(state):
                continue
            connected = True
            rep.tau0_step = step
            loop = trace_outer_boundary(state, check_connected=False)
            note_k(step, loop.k)
            open_window(loop, step)
            continue
        loop = _make_loop(state, _trace_raw(state))
        k = loop.k
        if (closed and k == 0) or (not closed and k < 2):
            # the interval count never increases, so no window can open again
            note_k(step, k)
            break
        changed = k != k_prev
        note_k(step, k)
        if frame is None or changed:
            open_window(loop, step)
            continue
        src, tgt = ev.edge
        d = [(1, 0), (0, 1), (-1, 0), (0, -1)].index((tgt[0] - src[0], tgt[1] - src[1]))
        hit = np.flatnonzero(frame.keys == edge_key(src, d))
        rep.events_checked += 1
        win["events"] += 1
        win["end_step"] = step
        if hit.size == 0:
            rep.silent_events += 1
            same = (len(loop) == len(frame.loop) and np.array_equal(loop.vx, frame.loop.vx)
                    and np.array_equal(loop.vy, frame.loop.vy)
                    and np.array_equal(loop.colour, frame.loop.colour))
            if not same:
                rep.divergences.append({"step": step, "kind": "silent event moved the boundary"})
                open_window(loop, step)
            continue
        i = int(frame.seg_entry[hit[0]])
        predicted = urn_update(frame.entries, i, closed)
        got = _realign(frame, loop, i)
        if got is None or got[0] != predicted:
            rep.divergences.append({"step": step, "kind": "urn rule", "entry": i,
                                    "before": list(frame.entries), "predicted": list(predicted),
                                    "observed": None if got is None else list(got[0])})
            open_window(loop, step)
            continue
        frame = _Frame(loop, loop.keys, got[0], got[1], k)
    return rep


def verify_correspondence(config, geometry: str, *, events: int, master_seed: int,
                          max_replicas: int = 10_000, events_per_replica: int = 3000) -> dict:
    """Coupled checks on successive replicas from ``config`` until ``events``
    window events have been checked.

    A replica ends when its droplet has a single interval (nothing left to
    check) or after ``events_per_replica`` events. Returns the merged report.
    """
    from . import rng as R
    from .growth import init_growth

    total = {"geometry": geometry, "replicas": 0, "events": 0, "events_checked": 0,
             "silent_events": 0, "windows": 0, "claim1_checked": 0, "divergences": [],
             "k_history": [], "anchor_rule": ANCHOR_RULE}
    r = 0
    while total["events_checked"] < events and r < max_replicas:
        state = init_growth(config, geometry)
        sel, clk = R.streams(master_seed, r)
        rep = coupled_equivalence_check(state, rng=sel, clock=clk,
                                        events=min(events_per_replica,
                                                   events - total["events_checked"] + 50))
        total["replicas"] += 1
        total["events"] += rep.events
        total["events_checked"] += rep.events_checked
        total["silent_events"] += rep.silent_events
        total["windows"] += len(rep.windows)
        total["claim1_checked"] += len(rep.windows)
        total["divergences"] += [dict(d, replica=r) for d in rep.divergences]
        total["k_history"].append([list(p) for p in rep.k_history])
        r += 1
    return total
