"""The s-type annihilating urn process on a finite graph.

At each event a ball is chosen uniformly from all balls present and a ball
of its colour is sent to every neighbouring urn, where it annihilates one
ball of a different colour if there is one. In continuous time every ball
carries a unit-rate clock, so holding times are exponential with rate equal
to the current number of balls.

Colours are ``0..s-1``; for two types colour 0 is red and 1 is blue and the
signed view ``Z(v)`` is ``+balls`` for red, ``-balls`` for blue.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptySystem, Extinct, MixedUrn, NegativeCount, NotAPath, UrnError
from .graph import Graph
from .kernels import urn as K
from .kernels.sampling import make_tree

RED, BLUE = 0, 1
COLOUR_NAMES = {"red": RED, "blue": BLUE, "r": RED, "b": BLUE, "green": 2, "g": 2}

STOP_REASONS = {
    K.MONOCHROMATIC: "monochromatic",
    K.STEP_BUDGET: "step budget",
    K.TIME_BUDGET: "time budget",
    K.EXTINCT: "extinct",
    K.TOTAL_REACHED: "total reached",
}


@dataclass
class UrnState:
    graph: Graph
    colour: np.ndarray
    count: np.ndarray
    n_colours: int
    ctot: np.ndarray = field(repr=False)
    tree: np.ndarray = field(repr=False)
    ist: np.ndarray = field(repr=False)
    fst: np.ndarray = field(repr=False)

    @property
    def total_balls(self) -> int:
        return int(self.ist[0])

    @property
    def step(self) -> int:
        return int(self.ist[1])

    @property
    def time(self) -> float:
        return float(self.fst[0])

    @property
    def colours_alive(self) -> int:
        return int(self.ist[2])

    @property
    def counts(self) -> list[tuple[int | None, int]]:
        return [(None if c < 0 else int(c), int(b)) for c, b in zip(self.colour, self.count)]

    @property
    def signed(self) -> np.ndarray:
        """Signed two-type view ``Z``; only meaningful for two colours."""
        return signed_view(self.colour, self.count)

    def copy(self) -> "UrnState":
        return UrnState(self.graph, self.colour.copy(), self.count.copy(), self.n_colours,
                        self.ctot.copy(), self.tree.copy(), self.ist.copy(), self.fst.copy())

    def is_monochromatic(self) -> bool:
        return self.colours_alive <= 1

    def recount(self) -> int:
        return int(self.count.sum())


def signed_view(colour: np.ndarray, count: np.ndarray) -> np.ndarray:
    z = np.where(colour == RED, count, -count)
    return np.where(count == 0, 0, z).astype(np.int64)


@dataclass(frozen=True)
class UrnEvent:
    vertex: int
    colour: int
    dt: float
    deltas: tuple[int, ...]


@dataclass
class Trajectory:
    """Stride samples of an urn run.

    ``counts`` and ``colours`` are ``(len(steps), n)`` arrays. Fixed-time
    checkpoint samples, when requested, are kept in ``checkpoints``.
    """

    steps: np.ndarray
    times: np.ndarray
    colours: np.ndarray
    counts: np.ndarray
    initial: UrnState
    final: UrnState
    stop_reason: str
    checkpoints: "CheckpointSamples | None" = None
    extinction_steps: np.ndarray | None = None   # -1 for colours still alive
    extinction_times: np.ndarray | None = None

    def __len__(self):
        return len(self.steps)

    def signed(self) -> np.ndarray:
        return signed_view(self.colours, self.counts)


@dataclass
class CheckpointSamples:
    times: np.ndarray
    steps: np.ndarray
    colours: np.ndarray
    counts: np.ndarray
    reached: int

    def signed(self) -> np.ndarray:
        return signed_view(self.colours, self.counts)


def init_urn_state(g: Graph, config: Sequence[tuple[int | None, int]],
                   n_colours: int | None = None) -> UrnState:
    """Build a state at time 0 from per-vertex ``(colour, balls)`` records."""
    if len(config) != g.n:
        raise UrnError(f"configuration has {len(config)} entries for {g.n} vertices")
    colour = np.full(g.n, -1, dtype=np.int64)
    count = np.zeros(g.n, dtype=np.int64)
    for v, (c, b) in enumerate(config):
        b = int(b)
        if b < 0:
            raise NegativeCount(v, b)
        if (b > 0) != (c is not None):
            raise MixedUrn(v)
        if c is not None:
            if int(c) < 0:
                raise MixedUrn(v)
            colour[v] = int(c)
            count[v] = b
    if count.sum() == 0:
        raise EmptySystem()
    s = int(max(colour.max() + 1, n_colours or 0, 2))
    ctot = np.zeros(s, dtype=np.int64)
    np.add.at(ctot, colour[count > 0], count[count > 0])
    ist = np.array([count.sum(), 0, np.count_nonzero(ctot)], dtype=np.int64)
    return UrnState(g, colour, count, s, ctot, make_tree(count), ist, np.zeros(1))


def from_signed(g: Graph, z: Iterable[int]) -> UrnState:
    """Two-type state from a signed vector (positive = red)."""
    cfg = [(RED, x) if x > 0 else (BLUE, -x) if x < 0 else (None, 0) for x in map(int, z)]
    return init_urn_state(g, cfg, 2)


def single_colour(g: Graph, x: Iterable[int]) -> UrnState:
    """One-type state with ``x[v]`` balls of colour 0 at ``v``."""
    return init_urn_state(g, [(RED, b) if b > 0 else (None, 0) for b in map(int, x)], 1)


def apply_nucleation(state: UrnState, v: int) -> tuple[int, ...]:
    """Fire one ball at ``v``; returns per-neighbour count changes."""
    if state.count[v] <= 0:
        raise UrnError(f"no ball at vertex {v}")
    g = state.graph
    deltas = np.empty(max(g.degree[v], 1), dtype=np.int64)
    k = K.nucleate(g.indptr, g.indices, state.colour, state.count, state.ctot, state.tree,
                   state.ist, v, deltas)
    state.ist[1] += 1
    return tuple(int(d) for d in deltas[:k])


def select_vertex(state: UrnState, u: float) -> int:
    """Vertex holding the ball at uniform position ``u`` in [0, 1)."""
    return int(K.pick_vertex(state.count, state.tree, state.ist[0], u))


def step(state: UrnState, rng: np.random.Generator,
         clock: np.random.Generator | None = None) -> UrnEvent:
    """Apply one event in place.

    The holding time is drawn from ``clock`` (default ``rng``) before the
    ball is selected from ``rng``, matching the order used by
    :func:`run_until`.
    """
    total = state.total_balls
    if total <= 0:
        raise Extinct()
    clock = rng if clock is None else clock
    dt = float(clock.exponential(1.0 / total))
    v = select_vertex(state, rng.random())
    c = int(state.colour[v])
    deltas = apply_nucleation(state, v)
    state.fst[0] += dt
    return UrnEvent(v, c, dt, deltas)


def run_until(state: UrnState, *, max_steps: int | None = None, max_time: float | None = None,
              stop_when_monochromatic: bool = False, min_total: int | None = None,
              stride: int = 1, rng: np.random.Generator,
              clock: np.random.Generator | None = None,
              checkpoints: Sequence[float] | None = None,
              record: bool = True, debug: bool = False) -> Trajectory:
    """Run the process in place until the first stop condition fires.

    ``min_total`` stops once the number of balls reaches that value.
    ``checkpoints`` requests fixed continuous-time samples; they are taken in
    addition to stride samples (set ``record=False`` to skip the latter).
    """
    if max_steps is None and max_time is None and not stop_when_monochromatic and not min_total:
        raise ValueError("run_until needs at least one stop condition")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    clock = rng if clock is None else clock
    g = state.graph
    initial = state.copy()
    n = g.n
    max_steps_i = np.int64(2**62) if max_steps is None else np.int64(max_steps)
    max_time_f = np.inf if max_time is None else float(max_time)
    cps = np.asarray(sorted(checkpoints or ()), dtype=float)
    cp_step = np.zeros(len(cps), dtype=np.int64)
    cp_colour = np.zeros((len(cps), n), dtype=np.int64)
    cp_count = np.zeros((len(cps), n), dtype=np.int64)
    cp_pos = np.zeros(1, dtype=np.int64)
    # samples at t <= 0 are the initial state
    while cp_pos[0] < len(cps) and cps[cp_pos[0]] <= state.time:
        j = cp_pos[0]
        cp_step[j], cp_colour[j], cp_count[j] = state.step, state.colour, state.count
        cp_pos[0] += 1

    ext_step = np.where(state.ctot > 0, -1, 0).astype(np.int64)
    ext_time = np.where(state.ctot > 0, -1.0, 0.0)
    chunks = []
    cap = 256
    stride_eff = stride if record else 0
    while True:
        rec_step = np.zeros(cap if record else 0, dtype=np.int64)
        rec_time = np.zeros(cap if record else 0)
        rec_colour = np.zeros((cap if record else 0, n), dtype=np.int64)
        rec_count = np.zeros((cap if record else 0, n), dtype=np.int64)
        nrec = np.zeros(1, dtype=np.int64)
        code = K.run_urn(g.indptr, g.indices, state.colour, state.count, state.ctot, state.tree,
                         state.ist, state.fst, rng, clock, max_steps_i, max_time_f,
                         bool(stop_when_monochromatic), np.int64(min_total or 0),
                         np.int64(stride_eff), rec_step, rec_time, rec_colour, rec_count, nrec,
                         cps, cp_step, cp_colour, cp_count, cp_pos, ext_step, ext_time,
                         bool(debug))
        k = int(nrec[0])
        chunks.append((rec_step[:k], rec_time[:k], rec_colour[:k], rec_count[:k]))
        if code == K.BUFFER_FULL:
            cap = min(cap * 4, 1 << 16)
            continue
        if code == K.BOOKKEEPING_ERROR:
            raise UrnError(f"cached total {state.total_balls} != recount {state.recount()} "
                           f"at step {state.step}")
        break

    cp = None
    if len(cps):
        cp = CheckpointSamples(cps, cp_step, cp_colour, cp_count, int(cp_pos[0]))
    return Trajectory(
        np.concatenate([c[0] for c in chunks]),
        np.concatenate([c[1] for c in chunks]),
        np.concatenate([c[2] for c in chunks]),
        np.concatenate([c[3] for c in chunks]),
        initial, state, STOP_REASONS[int(code)], cp, ext_step, ext_time)


def survivors(state: UrnState) -> set[int]:
    return {int(c) for c in np.flatnonzero(state.ctot > 0)}


def relabel_alternating(state: UrnState) -> UrnState:
    """Map an s-type state on a path to a two-type one.

    Maximal runs of equal colour along the path are coloured red, blue, red,
    ... in order. An empty urn splits a run only when the colours on either
    side of it differ. Ball counts are unchanged.
    """
    g = state.graph
    if not g.is_path():
        raise NotAPath(f"graph {g.name or g.n} is not a path in index order")
    cfg: list[tuple[int | None, int]] = []
    label = RED
    prev = None
    for c, b in state.counts:
        if b == 0:
            cfg.append((None, 0))
            continue
        if prev is not None and c != prev:
            label = BLUE if label == RED else RED
        prev = c
        cfg.append((label, b))
    out = init_urn_state(g, cfg, 2)
    out.fst[0] = state.time
    out.ist[1] = state.step
    return out


def run_count(state: UrnState) -> int:
    """Number of maximal monochromatic runs along a path (empty urns skipped)."""
    runs, prev = 0, None
    for c, b in state.counts:
        if b == 0:
            continue
        if c != prev:
            runs += 1
        prev = c
    return runs


def parse_init(text: str, g: Graph) -> list[tuple[int | None, int]]:
    """Parse ``vertex colour count`` lines (``#`` comments allowed).

    Colours are integers or one of red/blue/green. Unlisted vertices are empty.
    """
    cfg: list[tuple[int | None, int]] = [(None, 0)] * g.n
    for no, raw in enumerate(text.splitlines(), 1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        toks = s.split()
        if len(toks) != 3:
            raise UrnError(f"line {no}: expected 'vertex colour count', got {s!r}")
        v = int(toks[0])
        if not 0 <= v < g.n:
            raise UrnError(f"line {no}: vertex {v} out of range")
        c = COLOUR_NAMES.get(toks[1].lower())
        c = int(toks[1]) if c is None else c
        b = int(toks[2])
        cfg[v] = (c, b) if b > 0 else (None, 0)
        if b < 0:
            raise NegativeCount(v, b)
    return cfg


def read_init(path: str | Path, g: Graph) -> UrnState:
    return init_urn_state(g, parse_init(Path(path).read_text(encoding="utf-8"), g))
