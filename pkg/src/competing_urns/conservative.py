"""Merging ("purple ball") coupling of the two-type urn process, and marks.

Instead of annihilating, a red and a blue ball meeting in an urn merge into a
purple ball. Purple balls keep nucleating (producing purple offspring) but
never interact, so ``R - B`` evolves exactly like the annihilating system.

With marking on, the ``d(v)`` offspring of the first nucleation are marked,
marked balls produce marked offspring, a marked ball that merges yields a
marked purple ball, and a mark on a purple ball jumps to an unmarked ball of
the marked colour sharing its urn. Then, with ``M`` the marked balls and
``Y = R - B_unmarked + P_marked`` (signs flipped when the first nucleator
is red), ``Z = Y - M`` holds exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BeforeFirstNucleation, Extinct, MarkInvariantViolated
from .graph import Graph
from .kernels import conservative as K
from .kernels.sampling import make_tree
from .urn import BLUE, RED, UrnEvent, UrnState, apply_nucleation

PURPLE = K.PURPLE


@dataclass
class ConservativeState:
    graph: Graph
    rb: np.ndarray          # (2, n): red, blue
    pp: np.ndarray          # purple
    ms: np.ndarray          # (2, n): marked red, marked blue
    ps: np.ndarray          # marked purple
    marking: bool
    w: np.ndarray = field(repr=False)
    tree: np.ndarray = field(repr=False)
    ist: np.ndarray = field(repr=False)
    fst: np.ndarray = field(repr=False)
    initial_rb_total: int = 0

    R = property(lambda self: self.rb[RED])
    B = property(lambda self: self.rb[BLUE])
    P = property(lambda self: self.pp)

    @property
    def B_star(self) -> np.ndarray:
        return self.ms[BLUE]

    @property
    def R_star(self) -> np.ndarray:
        return self.ms[RED]

    @property
    def P_star(self) -> np.ndarray:
        return self.ps

    @property
    def time(self) -> float:
        return float(self.fst[0])

    @property
    def tau1(self) -> float | None:
        return float(self.fst[1]) if self.mark_colour is not None else None

    @property
    def step(self) -> int:
        return int(self.ist[K.I_STEP])

    @property
    def total_balls(self) -> int:
        return int(self.ist[K.I_TOTAL])

    @property
    def merges(self) -> int:
        return int(self.ist[K.I_MERGES])

    @property
    def created(self) -> int:
        return int(self.ist[K.I_CREATED])

    @property
    def purple_created(self) -> int:
        return int(self.ist[K.I_PCREATED])

    @property
    def mark_colour(self) -> int | None:
        mc = int(self.ist[K.I_MARK])
        return None if mc < 0 else mc

    @property
    def Z(self) -> np.ndarray:
        return self.rb[RED] - self.rb[BLUE]

    @property
    def M(self) -> np.ndarray:
        """Signed marked-ball vector (negative when the first nucleator is red)."""
        mc = self._require_marks()
        m = self.ms[mc] + self.ps
        return -m if mc == RED else m

    @property
    def Y(self) -> np.ndarray:
        mc = self._require_marks()
        oc = 1 - mc
        y = self.rb[oc] - (self.rb[mc] - self.ms[mc]) + self.ps
        return -y if mc == RED else y

    def _require_marks(self) -> int:
        mc = self.mark_colour
        if mc is None:
            raise BeforeFirstNucleation()
        return mc

    def copy(self) -> "ConservativeState":
        return ConservativeState(self.graph, self.rb.copy(), self.pp.copy(), self.ms.copy(),
                                 self.ps.copy(), self.marking, self.w.copy(), self.tree.copy(),
                                 self.ist.copy(), self.fst.copy(), self.initial_rb_total)


def MarkedState(g: Graph, z, **kw) -> ConservativeState:  # noqa: N802 - mirrors the type name
    return init_conservative(g, z, marking=True, **kw)


def init_conservative(g: Graph, z, marking: bool = False, purple=None) -> ConservativeState:
    """Conservative state from a signed vector ``z`` (positive = red)."""
    z = np.asarray(z, dtype=np.int64)
    if z.shape != (g.n,):
        raise ValueError(f"expected {g.n} entries, got {z.shape}")
    if not z.any() and purple is None:
        from .errors import EmptySystem
        raise EmptySystem()
    rb = np.zeros((2, g.n), dtype=np.int64)
    rb[RED] = np.maximum(z, 0)
    rb[BLUE] = np.maximum(-z, 0)
    pp = np.zeros(g.n, dtype=np.int64) if purple is None else np.asarray(purple, dtype=np.int64).copy()
    w = rb.sum(axis=0) + pp
    ist = np.array([w.sum(), 0, 0, 0, -1, 0], dtype=np.int64)
    return ConservativeState(g, rb, pp, np.zeros((2, g.n), dtype=np.int64),
                             np.zeros(g.n, dtype=np.int64), marking, w, make_tree(w), ist,
                             np.zeros(2), int(rb.sum()))


def from_urn(state: UrnState, marking: bool = False) -> ConservativeState:
    return init_conservative(state.graph, state.signed, marking)


def pick(state: ConservativeState, u1: float, u2: float) -> tuple[int, int, int]:
    v, c, m = K.pick_ball(state.rb, state.ms, state.pp, state.ps, state.w, state.tree,
                          state.ist[K.I_TOTAL], u1, u2)
    return int(v), int(c), int(m)


def apply(state: ConservativeState, v: int, c: int, m: int) -> None:
    g = state.graph
    K.nucleate(g.indptr, g.indices, state.rb, state.ms, state.pp, state.ps, state.w, state.tree,
               state.ist, state.fst, state.marking, v, c, m)
    state.ist[K.I_STEP] += 1


def step_conservative(state: ConservativeState, rng: np.random.Generator,
                      clock: np.random.Generator | None = None) -> UrnEvent:
    """One event: a uniform ball among red, blue and purple nucleates."""
    total = state.total_balls
    if total <= 0:
        raise Extinct()
    clock = rng if clock is None else clock
    dt = float(clock.exponential(1.0 / total))
    v, c, m = pick(state, rng.random(), rng.random())
    before = state.rb[:, state.graph.adjacency[v]].sum(axis=0) + state.pp[list(state.graph.adjacency[v])]
    state.fst[0] += dt
    apply(state, v, c, m)
    after = state.rb[:, state.graph.adjacency[v]].sum(axis=0) + state.pp[list(state.graph.adjacency[v])]
    return UrnEvent(v, c, dt, tuple(int(x) for x in after - before))


step_marked = step_conservative


def coupled_step(cons: ConservativeState, plain: UrnState, rng: np.random.Generator) -> tuple[int, int]:
    """Advance ``cons`` by one event and ``plain`` too unless a purple ball fired.

    Given that the conservative draw lands on a red or blue ball, it is a
    uniform ball of the plain system (whose red/blue counts coincide), so
    the pair is a valid coupling.
    """
    v, c, m = pick(cons, rng.random(), rng.random())
    apply(cons, v, c, m)
    if c != PURPLE:
        want = RED if plain.signed[v] > 0 else BLUE
        if plain.count[v] == 0 or want != c:
            raise AssertionError(f"coupling broken at vertex {v}: plain has no colour {c}")
        apply_nucleation(plain, v)
    return v, c


def check_identity_ZRB(cons: ConservativeState, plain: UrnState) -> bool:  # noqa: N802
    return bool(np.array_equal(cons.rb[RED] - cons.rb[BLUE], plain.signed))


def check_mark_invariants(state: ConservativeState) -> None:
    """Raise if a marks invariant fails (bounds, one marked colour, rule (e))."""
    if np.any(np.minimum(state.rb[RED], state.rb[BLUE]) != 0):
        v = int(np.flatnonzero(np.minimum(state.rb[RED], state.rb[BLUE]))[0])
        raise AssertionError(f"red and blue coexist at vertex {v}")
    if np.any(state.ms > state.rb) or np.any(state.ps > state.pp) or np.any(state.ms < 0):
        raise AssertionError("marked count exceeds ball count")
    mc = state.mark_colour
    if mc is None:
        if state.ms.any() or state.ps.any():
            raise AssertionError("marks present before the first nucleation")
        return
    if state.ms[1 - mc].any():
        raise AssertionError("a ball of the unmarked colour carries a mark")
    bad = np.flatnonzero((state.rb[mc] - state.ms[mc] > 0) & (state.ps > 0))
    if bad.size:
        raise MarkInvariantViolated(int(bad[0]))


def check_identity_ZYM(state: ConservativeState) -> bool:  # noqa: N802
    """``Z == Y - M``; raises if marks are not in normal form first."""
    state._require_marks()
    check_mark_invariants(state)
    return bool(np.array_equal(state.Z, state.Y - state.M))


def check_ledger(state: ConservativeState) -> bool:
    """Red+blue mass bookkeeping: sum(R+B) + 2*merges - created == initial."""
    return int(state.rb.sum()) + 2 * state.merges - state.created == state.initial_rb_total


def run_conservative(state: ConservativeState, *, rng: np.random.Generator,
                     clock: np.random.Generator | None = None, max_steps: int | None = None,
                     max_time: float | None = None, horizon_after_first: float | None = None,
                     stride: int = 0):
    """Run in place; returns ``(stop_code, steps, times, counts)``.

    ``counts`` rows are R, B, P, R*, B*, P* concatenated per vertex.
    """
    g = state.graph
    clock = rng if clock is None else clock
    n = g.n
    chunks = []
    cap = 256 if stride else 0
    while True:
        rs = np.zeros(cap, dtype=np.int64)
        rt = np.zeros(cap)
        rc = np.zeros((cap, 6 * n), dtype=np.int64)
        nrec = np.zeros(1, dtype=np.int64)
        code = K.run_conservative(
            g.indptr, g.indices, state.rb, state.ms, state.pp, state.ps, state.w, state.tree,
            state.ist, state.fst, rng, clock, state.marking,
            np.int64(2**62 if max_steps is None else max_steps),
            np.inf if max_time is None else float(max_time),
            -1.0 if horizon_after_first is None else float(horizon_after_first),
            np.int64(stride), rs, rt, rc, nrec)
        k = int(nrec[0])
        chunks.append((rs[:k], rt[:k], rc[:k]))
        if code != K.BUFFER_FULL:
            break
        cap = min(cap * 4, 1 << 16)
    return (int(code), np.concatenate([c[0] for c in chunks]),
            np.concatenate([c[1] for c in chunks]), np.concatenate([c[2] for c in chunks]))
