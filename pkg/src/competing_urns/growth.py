"""Two-type (and s-type) growth on Z^2 with rates 0, 1 and infinity.

An uncoloured site takes colour ``c`` at rate 1 when it has one neighbour of
colour ``c`` and instantly when it has two or more. Equivalently: pick a
uniform ordered boundary edge (coloured site, uncoloured neighbour), colour
the target with the source's colour, then close under the two-neighbour
rule. A site with one red and one blue neighbour is the target of two
edges, which realises the two competing unit-rate clocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import ConflictDetected, GrowthError, IllegalInitialConfiguration, NoBoundary
from .kernels import growth as K

PLANE = "plane"
HALFPLANE = "halfplane"

STOP_REASONS = {
    K.SINGLE_COLOUR: "single colour boundary",
    K.STEP_BUDGET: "step budget",
    K.TIME_BUDGET: "time budget",
    K.NO_BOUNDARY: "no boundary",
}
SITE_BUDGET = "site budget"

# With 2-bit cells, 4 * 2**30 cells is 1 GiB of grid, enough for two-type
# droplets of about 10**5 events. Step tracking costs 4 bytes a cell, so it
# gets a smaller cap.
DEFAULT_MAX_CELLS = 4 << 30
TRACKED_MAX_CELLS = 1 << 26
GROW_FACTOR = 1.15

Site = tuple[int, int]


def _neighbours(x: int, y: int):
    return ((x + 1, y), (x, y + 1), (x - 1, y), (x, y - 1))


@dataclass
class GrowthState:
    grid: np.ndarray = field(repr=False)      # packed, see kernels.growth
    stepcol: np.ndarray = field(repr=False)   # (0, 0) when steps are not tracked
    x0: int
    y0: int
    geometry: str
    n_colours: int
    E: np.ndarray = field(repr=False)
    ne: int
    ecount: np.ndarray
    scount: np.ndarray
    ist: np.ndarray = field(repr=False)
    fst: np.ndarray = field(repr=False)
    max_cells: int = DEFAULT_MAX_CELLS

    @property
    def halfplane(self) -> bool:
        return self.geometry == HALFPLANE

    @property
    def step(self) -> int:
        return int(self.ist[K.I_STEP])

    @property
    def time(self) -> float:
        return float(self.fst[0])

    @property
    def n_boundary(self) -> int:
        return int(self.ist[K.I_LIVE])

    @property
    def n_coloured(self) -> int:
        return int(self.ist[K.I_NCOL])

    @property
    def bbox(self) -> tuple[int, int, int, int]:
        return tuple(int(v) for v in self.ist[K.I_XMIN:K.I_YMAX + 1])

    def in_geometry(self, y: int) -> bool:
        return not self.halfplane or y >= 0

    @property
    def shape(self) -> tuple[int, int]:
        return self.grid.shape[0] * K.TILE, self.grid.shape[1] * K.TILE

    @property
    def tracks_steps(self) -> bool:
        return self.stepcol.shape[0] > 0

    def colour_at(self, x: int, y: int) -> int:
        gx, gy = x - self.x0, y - self.y0
        W, H = self.shape
        if 0 <= gx < W and 0 <= gy < H:
            return int(K.get(self.grid, gx, gy))
        return -1

    def window(self) -> tuple[np.ndarray, int, int]:
        """Unpacked colours (-1 = uncoloured) over the bounding box, with its
        lower-left corner ``(x, y)``."""
        xmin, xmax, ymin, ymax = self.bbox
        T = K.TILE
        ta, tb = (xmin - self.x0) // T, (xmax - self.x0) // T + 1
        ua, ub = (ymin - self.y0) // T, (ymax - self.y0) // T + 1
        tiles = self.grid[ta:tb, ua:ub]
        bits = tiles.shape[3] * 8 // T
        per = 8 // bits                             # cells per byte
        parts = [(tiles >> (bits * j)) & ((1 << bits) - 1) for j in range(per)]
        cells = np.stack(parts, axis=-1)            # tx, ty, ry, byte, j
        cells = cells.transpose(0, 3, 4, 1, 2).reshape((tb - ta) * T, (ub - ua) * T)
        cells = cells.astype(np.int8) - 1
        lx = xmin - self.x0 - ta * T
        ly = ymin - self.y0 - ua * T
        return cells[lx:lx + xmax - xmin + 1, ly:ly + ymax - ymin + 1], xmin, ymin

    @property
    def colours(self) -> dict[Site, int]:
        """Sparse view ``{(x, y): colour}`` of the coloured set."""
        cells, x0, y0 = self.window()
        xs, ys = np.nonzero(cells >= 0)
        cs = cells[xs, ys]
        return {(int(x) + x0, int(y) + y0): int(c) for x, y, c in zip(xs, ys, cs)}

    def sites(self) -> np.ndarray:
        """``(m, 4)`` array of x, y, colour, step coloured (-1 when steps are
        not tracked), sorted by (step, x, y)."""
        cells, x0, y0 = self.window()
        xs, ys = np.nonzero(cells >= 0)
        if self.tracks_steps:
            steps = self.stepcol[xs + x0 - self.x0, ys + y0 - self.y0].astype(np.int64)
        else:
            steps = np.full(xs.size, -1, dtype=np.int64)
        out = np.column_stack([xs + x0, ys + y0, cells[xs, ys].astype(np.int64), steps])
        order = np.lexsort((out[:, 1], out[:, 0], out[:, 3]))
        return out[order]

    def live_edges(self) -> list[tuple[Site, Site]]:
        """Current boundary edges as ordered (coloured, uncoloured) pairs."""
        out = []
        for sx, sy, d in self.E[: self.ne]:
            t = (int(sx + K.DX[d]), int(sy + K.DY[d]))
            if self.colour_at(*t) < 0:
                out.append(((int(sx), int(sy)), t))
        return out

    def boundary_colours(self) -> set[int]:
        return {int(c) for c in np.flatnonzero(self.ecount > 0)}

    def copy(self) -> "GrowthState":
        return GrowthState(self.grid.copy(), self.stepcol.copy(), self.x0, self.y0,
                           self.geometry, self.n_colours, self.E.copy(), self.ne,
                           self.ecount.copy(), self.scount.copy(), self.ist.copy(),
                           self.fst.copy(), self.max_cells)

    # grid management -------------------------------------------------------

    def _needs_grow(self) -> bool:
        xmin, xmax, ymin, ymax = self.bbox
        W, H = self.shape
        m = K.MARGIN
        return (xmin - self.x0 < m or self.x0 + W - 1 - xmax < m
                or ymin - self.y0 < m or self.y0 + H - 1 - ymax < m)

    def _grow(self) -> bool:
        """Re-allocate the grid around the bounding box, with ``GROW_FACTOR``
        slack per side; False when that would exceed ``max_cells``."""
        T = K.TILE
        xmin, xmax, ymin, ymax = self.bbox
        w_need = xmax - xmin + 1 + 2 * (K.MARGIN + 1)
        h_need = ymax - ymin + 1 + 2 * (K.MARGIN + 1)
        W2 = int(w_need * GROW_FACTOR) + T
        H2 = int(h_need * GROW_FACTOR) + T
        if W2 * H2 > self.max_cells:
            f = (self.max_cells / (W2 * H2)) ** 0.5
            W2 = max(w_need + T, int(W2 * f))
            H2 = max(h_need + T, int(H2 * f))
        ntx, nty = -(-W2 // T), -(-H2 // T)
        if ntx * nty * T * T > self.max_cells:
            return False
        # tile-aligned origin with the bounding box roughly centred
        nx0 = (xmin - (ntx * T - (xmax - xmin + 1)) // 2) // T * T
        ny0 = (ymin - (nty * T - (ymax - ymin + 1)) // 2) // T * T
        if (xmin - nx0 < K.MARGIN + 1 or nx0 + ntx * T - 1 - xmax < K.MARGIN + 1
                or ymin - ny0 < K.MARGIN + 1 or ny0 + nty * T - 1 - ymax < K.MARGIN + 1):
            ntx += 1
            nty += 1
            if ntx * nty * T * T > self.max_cells:
                return False
        grid = K.new_grid(ntx, nty, self.grid.shape[3] * 8 // T)
        # copy the old tiles that overlap the bounding box
        ta, tb = (xmin - self.x0) // T, (xmax - self.x0) // T + 1
        ua, ub = (ymin - self.y0) // T, (ymax - self.y0) // T + 1
        ox, oy = (self.x0 - nx0) // T, (self.y0 - ny0) // T
        grid[ta + ox:tb + ox, ua + oy:ub + oy] = self.grid[ta:tb, ua:ub]
        if self.tracks_steps:
            stepcol = np.full((ntx * T, nty * T), -1, dtype=np.int32)
            cx, dx = xmin - self.x0, xmax - self.x0 + 1
            cy, dy = ymin - self.y0, ymax - self.y0 + 1
            sx, sy = self.x0 - nx0, self.y0 - ny0
            stepcol[cx + sx:dx + sx, cy + sy:dy + sy] = self.stepcol[cx:dx, cy:cy + (dy - cy)]
            self.stepcol = stepcol
        self.grid, self.x0, self.y0 = grid, nx0, ny0
        return True


@dataclass(frozen=True)
class GrowthEvent:
    edge: tuple[Site, Site]
    colour: int
    dt: float
    closure_sites: np.ndarray = field(repr=False)   # (m, 2), closure order


@dataclass
class GrowthTrajectory:
    steps: np.ndarray
    times: np.ndarray
    site_counts: np.ndarray   # (samples, colours)
    edge_counts: np.ndarray   # (samples, colours)
    final: GrowthState
    stop_reason: str


def _parse_colour(tok: str) -> int:
    names = {"red": 0, "blue": 1, "green": 2, "r": 0, "b": 1, "g": 2}
    return names[tok.lower()] if tok.lower() in names else int(tok)


def parse_growth_init(text: str) -> dict[Site, int]:
    """Lines ``x y colour``; ``#`` comments allowed."""
    out: dict[Site, int] = {}
    for no, raw in enumerate(text.splitlines(), 1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        toks = s.split()
        if len(toks) != 3:
            raise GrowthError(f"line {no}: expected 'x y colour', got {s!r}")
        site = (int(toks[0]), int(toks[1]))
        if site in out:
            raise GrowthError(f"line {no}: site {site} listed twice")
        out[site] = _parse_colour(toks[2])
    return out


def read_growth_init(path: str | Path) -> dict[Site, int]:
    return parse_growth_init(Path(path).read_text(encoding="utf-8"))


def validate_initial(config: Mapping[Site, int], geometry: str = PLANE) -> None:
    """Raise unless every uncoloured site has at most one neighbour of each colour."""
    if not config:
        raise GrowthError("initial configuration is empty")
    for (x, y), c in config.items():
        if c < 0:
            raise GrowthError(f"negative colour at {(x, y)}")
        if geometry == HALFPLANE and y < 0:
            raise GrowthError(f"site {(x, y)} lies outside the half-plane y >= 0")
    checked = set()
    for (x, y) in sorted(config):
        for z in _neighbours(x, y):
            if z in config or z in checked:
                continue
            checked.add(z)
            if geometry == HALFPLANE and z[1] < 0:
                continue
            seen: dict[int, int] = {}
            for w in _neighbours(*z):
                if w in config:
                    cw = config[w]
                    seen[cw] = seen.get(cw, 0) + 1
                    if seen[cw] >= 2:
                        raise IllegalInitialConfiguration(z, cw)


def init_growth(config: Mapping[Site, int], geometry: str = PLANE, n_colours: int | None = None,
                validate: bool = True, max_cells: int | None = None,
                track_steps: bool = True) -> GrowthState:
    """Growth state at time 0.

    ``validate=False`` admits configurations that violate the two-neighbour
    condition (used to exercise :func:`closure`). ``track_steps`` records the
    step at which each site was coloured, at 4 bytes per grid cell; it also
    lowers the default ``max_cells`` to ``TRACKED_MAX_CELLS``.
    """
    if geometry not in (PLANE, HALFPLANE):
        raise ValueError(f"unknown geometry {geometry!r}")
    if validate:
        validate_initial(config, geometry)
    elif not config:
        raise GrowthError("initial configuration is empty")
    s = max(max(config.values()) + 1, n_colours or 0, 2)
    if s > K.MAX_COLOURS:
        raise GrowthError(f"at most {K.MAX_COLOURS} colours are supported, got {s}")
    if max_cells is None:
        max_cells = TRACKED_MAX_CELLS if track_steps else DEFAULT_MAX_CELLS
    xs = [p[0] for p in config]
    ys = [p[1] for p in config]
    xmin, xmax, ymin, ymax = min(xs), max(xs), min(ys), max(ys)
    T = K.TILE
    pad = K.MARGIN + 1
    x0 = (xmin - pad) // T * T
    y0 = (ymin - pad) // T * T
    ntx = (xmax + pad - x0) // T + 1
    nty = (ymax + pad - y0) // T + 1
    ist = np.array([0, 0, 0, xmin, xmax, ymin, ymax, 0, 0], dtype=np.int64)
    stepcol = np.full((ntx * T, nty * T) if track_steps else (0, 0), -1, dtype=np.int32)
    st = GrowthState(K.new_grid(ntx, nty, K.cell_bits(s)), stepcol, x0, y0, geometry, s,
                     np.zeros((64, 3), dtype=np.int64), 0, np.zeros(s, dtype=np.int64),
                     np.zeros(s, dtype=np.int64), ist, np.zeros(1), max_cells)
    q = np.zeros((8, 2), dtype=np.int64)
    for (x, y) in sorted(config):
        st.E, st.ne, _, _, _ = K.paint(st.grid, st.stepcol, st.x0, st.y0, st.halfplane, x, y,
                                       int(config[(x, y)]), 0, st.E, st.ne, st.ecount,
                                       st.scount, st.ist, q, False)
    return st


def closure(state: GrowthState, colour: int, frontier: Iterable[Site]) -> list[Site]:
    """Colour, in place, every site forced by the two-neighbour rule for ``colour``
    starting from ``frontier`` (sites that just received ``colour``)."""
    out: list[Site] = []
    for (x, y) in frontier:
        if state.colour_at(x, y) != colour:
            raise GrowthError(f"frontier site {(x, y)} does not carry colour {colour}")
        while state._needs_grow():
            if not state._grow():
                raise GrowthError("grid budget exceeded during closure")
        state.E, state.ne, q, qn, ok = K.paint(
            state.grid, state.stepcol, state.x0, state.y0, state.halfplane, x, y, colour,
            state.step, state.E, state.ne, state.ecount, state.scount, state.ist,
            np.zeros((64, 2), dtype=np.int64), True)
        if not ok:
            raise ConflictDetected((int(state.ist[K.I_CX]), int(state.ist[K.I_CY])))
        out += [(int(a), int(b)) for a, b in q[1:qn]]
    return out


def _run(state: GrowthState, sel, clk, max_steps, max_time, stop_single, stride, cap):
    s = state.n_colours
    rec_step = np.zeros(cap, dtype=np.int64)
    rec_time = np.zeros(cap)
    rec_sc = np.zeros((cap, s), dtype=np.int64)
    rec_ec = np.zeros((cap, s), dtype=np.int64)
    nrec = np.zeros(1, dtype=np.int64)
    last = np.zeros(4, dtype=np.int64)
    while True:
        code, state.E, state.ne, q, qn = K.run_growth(
            state.grid, state.stepcol, state.x0, state.y0, state.halfplane, state.E, state.ne,
            state.ecount, state.scount, state.ist, state.fst, sel, clk, max_steps, max_time,
            stop_single, stride, rec_step, rec_time, rec_sc, rec_ec, nrec, last)
        if code == K.NEED_GROW:
            if not state._grow():
                return SITE_BUDGET, (rec_step, rec_time, rec_sc, rec_ec, nrec), last, q, qn
            continue
        if code == K.CONFLICT:
            raise ConflictDetected((int(state.ist[K.I_CX]), int(state.ist[K.I_CY])))
        return code, (rec_step, rec_time, rec_sc, rec_ec, nrec), last, q, qn


def growth_step(state: GrowthState, rng: np.random.Generator,
                clock: np.random.Generator | None = None) -> GrowthEvent:
    """One nucleation plus its closure, in place."""
    if state.n_boundary <= 0:
        raise NoBoundary()
    clock = rng if clock is None else clock
    t0 = state.time
    code, _, last, q, qn = _run(state, rng, clock, np.int64(state.step + 1), np.inf, False, 0, 0)
    if code == SITE_BUDGET:
        raise GrowthError("grid budget exceeded")
    if code == K.NO_BOUNDARY:
        raise NoBoundary()
    sx, sy, d, c = (int(v) for v in last)
    src = (sx, sy)
    tgt = (sx + int(K.DX[d]), sy + int(K.DY[d]))
    sites = q[1:qn].copy()
    return GrowthEvent((src, tgt), c, state.time - t0, sites)


def run_growth(state: GrowthState, *, rng: np.random.Generator,
               clock: np.random.Generator | None = None, max_steps: int | None = None,
               max_time: float | None = None, single_colour_boundary: bool = False,
               stride: int = 0) -> GrowthTrajectory:
    """Run in place until a stop condition.

    Stop reasons: ``single colour boundary`` (every live boundary edge leaves
    one colour), ``step budget``, ``time budget``, ``no boundary``, and
    ``site budget`` when the grid would exceed ``state.max_cells``.
    """
    if max_steps is None and max_time is None and not single_colour_boundary:
        raise ValueError("run_growth needs at least one stop condition")
    clock = rng if clock is None else clock
    chunks = []
    cap = 256 if stride else 0
    while True:
        code, rec, _, _, _ = _run(state, rng, clock,
                                  np.int64(2**62 if max_steps is None else max_steps),
                                  np.inf if max_time is None else float(max_time),
                                  bool(single_colour_boundary), np.int64(stride), cap)
        k = int(rec[4][0])
        chunks.append(tuple(a[:k] for a in rec[:4]))
        if code == K.BUFFER_FULL:
            cap = min(cap * 4, 1 << 16)
            continue
        break
    reason = code if isinstance(code, str) else STOP_REASONS[int(code)]
    return GrowthTrajectory(*(np.concatenate([c[i] for c in chunks]) for i in range(4)),
                            state, reason)


# oracles ------------------------------------------------------------------

def recompute_boundary(state: GrowthState) -> set[tuple[Site, Site]]:
    """Boundary edges recomputed from the coloured set alone."""
    cols = state.colours
    out = set()
    for (x, y) in cols:
        for z in _neighbours(x, y):
            if z not in cols and state.in_geometry(z[1]):
                out.add(((x, y), z))
    return out


def closure_violations(state: GrowthState) -> list[tuple[Site, int]]:
    """Uncoloured sites with two or more neighbours of one colour (full rescan)."""
    cols = state.colours
    bad = []
    cand = {z for (x, y) in cols for z in _neighbours(x, y)
            if z not in cols and state.in_geometry(z[1])}
    for z in sorted(cand):
        seen: dict[int, int] = {}
        for w in _neighbours(*z):
            if w in cols:
                seen[cols[w]] = seen.get(cols[w], 0) + 1
        bad += [(z, c) for c, k in seen.items() if k >= 2]
    return bad


def brute_force_closure(config: Mapping[Site, int], colour: int,
                        geometry: str = PLANE) -> dict[Site, int]:
    """Fixpoint by repeated scans of the bounding window (independent oracle)."""
    cols = dict(config)
    while True:
        xs = [p[0] for p in cols]
        ys = [p[1] for p in cols]
        added = []
        for x in range(min(xs) - 1, max(xs) + 2):
            for y in range(min(ys) - 1, max(ys) + 2):
                if (x, y) in cols or (geometry == HALFPLANE and y < 0):
                    continue
                k = sum(cols.get(w) == colour for w in _neighbours(x, y))
                if k >= 2:
                    added.append((x, y))
        if not added:
            return cols
        for s in added:
            cols[s] = colour


def sample_edges(state: GrowthState, rng: np.random.Generator, k: int) -> list[tuple[Site, Site]]:
    """``k`` draws of the engine's edge sampler on the frozen state (the state
    itself is untouched; stale entries are dropped from a private copy)."""
    if state.n_boundary <= 0:
        raise NoBoundary()
    E = state.E.copy()
    ne = state.ne
    out = []
    for _ in range(k):
        i, ne = K.draw_edge(state.grid, state.x0, state.y0, E, ne, rng)
        sx, sy, d = (int(v) for v in E[i])
        out.append(((sx, sy), (sx + int(K.DX[d]), sy + int(K.DY[d]))))
    return out
