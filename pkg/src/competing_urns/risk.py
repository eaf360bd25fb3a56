"""Coexistence monitors on the Risk graph.

Start: each periphery pair of ``risk(s)`` holds ``n`` balls per vertex of
its own colour and the centre is empty. The monitors follow the proportion
of periphery balls of each colour against the slowly decreasing floor
``f(k)``, and stop at the first step ``T`` where any of four bad events
holds (too many balls at the centre, too few in the periphery, an empty
periphery vertex, a colour share below the floor).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import WrongGraphFamily
from .graph import Graph, risk, risk_pairs
from .kernels import risk as K
from .urn import Trajectory, UrnState, init_urn_state

DEFAULT_ALPHA = 0.01
DEFAULT_N_GRID = (5, 20, 100)
EVENTS = ("A", "B", "C", "D")


def f_floor(k: int, n: int, alpha: float = DEFAULT_ALPHA) -> float:
    """``1/3 - alpha - sum_{i=n}^{n+k-1} i^{-3/2}``, exactly rounded sum."""
    return math.fsum([1.0 / 3.0, -alpha] + [-(i ** -1.5) for i in range(n, n + k)])


def f_lower_bound(n: int, alpha: float = DEFAULT_ALPHA) -> float:
    """Infimum of ``f`` over ``k``: the tail sum bounded by ``n^{-3/2} + 2/sqrt(n)``."""
    return 1.0 / 3.0 - alpha - (n ** -1.5 + 2.0 / math.sqrt(n))


def _check_family(g: Graph) -> int:
    s = (g.n - 1) // 2
    if g.n < 5 or g.n % 2 == 0 or g != risk(s):
        raise WrongGraphFamily(f"graph {g.name or g.n} is not a Risk graph")
    return s


def initial_state(s: int, n: int) -> UrnState:
    """Colour ``i`` on both vertices of periphery pair ``i``, ``n`` balls each."""
    g = risk(s)
    cfg: list[tuple[int | None, int]] = [(None, 0)] * g.n
    for i, (a, b) in enumerate(risk_pairs(s)):
        cfg[a] = (i, n)
        cfg[b] = (i, n)
    return init_urn_state(g, cfg, s)


@dataclass
class RiskMonitorReport:
    """Monitor series at the sampled steps plus first-hit steps.

    ``r_v`` has one column per periphery vertex (vertex ``v`` is column
    ``v - 1``), ``r_j`` and ``Y`` one per colour. ``first_hit`` maps each
    bad event to its first step or None; ``T`` is the earliest of them.
    """
    n: int
    alpha: float
    steps: np.ndarray
    A: np.ndarray
    B: np.ndarray
    r_v: np.ndarray
    r_j: np.ndarray
    f: np.ndarray
    Y: np.ndarray
    first_hit: dict[str, int | None]
    T: int | None
    sample_k: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    Y_before: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    Y_after: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    final: UrnState | None = field(default=None, repr=False)
    extinction_steps: np.ndarray | None = None

    @property
    def all_alive(self) -> bool:
        return self.final is not None and self.final.colours_alive == self.final.n_colours


def run_risk(state: UrnState, *, n: int, alpha: float = DEFAULT_ALPHA,
             rng: np.random.Generator, clock: np.random.Generator | None = None,
             max_steps: int, stride: int = 0,
             sample_k: tuple[int, ...] = ()) -> RiskMonitorReport:
    """Run the urn on a Risk graph in place from step 0, monitoring every step.

    ``sample_k`` lists steps ``k < max_steps`` at which ``Y_k`` and
    ``Y_{k+1}`` are kept for increment statistics.
    """
    s = _check_family(state.graph)
    if state.step != 0:
        raise ValueError("monitors count steps from the initial configuration")
    ks = np.asarray(sorted(sample_k), dtype=np.int64)
    if ks.size and (ks[0] < 0 or ks[-1] >= max_steps):
        raise ValueError("sample steps must lie in [0, max_steps)")
    clock = rng if clock is None else clock
    g = state.graph
    cap = max_steps // stride + 1 if stride > 0 else 0
    rec_step = np.zeros(cap, dtype=np.int64)
    rec_A = np.zeros(cap, dtype=np.int64)
    rec_B = np.zeros(cap, dtype=np.int64)
    rec_rv = np.zeros((cap, 2 * s))
    rec_rj = np.zeros((cap, s))
    rec_f = np.zeros(cap)
    rec_Y = np.zeros((cap, s))
    first = np.zeros(4, dtype=np.int64)
    tstop = np.zeros(1, dtype=np.int64)
    yb = np.full((ks.size, s), np.nan)
    ya = np.full((ks.size, s), np.nan)
    ext = np.where(state.ctot > 0, -1, 0).astype(np.int64)
    taken = K.run_risk(g.indptr, g.indices, state.colour, state.count, state.ctot, state.tree,
               state.ist, state.fst, rng, clock, s, n, float(alpha), np.int64(max_steps),
               np.int64(stride), rec_step, rec_A, rec_B, rec_rv, rec_rj, rec_f, rec_Y,
               first, tstop, ks, yb, ya, ext)
    m = int(taken) // stride + 1 if cap else 0
    hits = {e: (int(h) if h >= 0 else None) for e, h in zip(EVENTS, first)}
    return RiskMonitorReport(n, alpha, rec_step[:m], rec_A[:m], rec_B[:m], rec_rv[:m],
                             rec_rj[:m], rec_f[:m], rec_Y[:m], hits,
                             int(tstop[0]) if tstop[0] >= 0 else None, ks, yb, ya, state, ext)


def risk_monitors(traj: Trajectory, n: int, alpha: float = DEFAULT_ALPHA) -> RiskMonitorReport:
    """Monitors recomputed from the recorded samples of a plain urn run.

    Straightforward numpy over the stored rows; first hits are exact only
    when the trajectory was recorded with stride 1 from step 0.
    """
    s = _check_family(traj.final.graph)
    steps = np.concatenate([[traj.initial.step], traj.steps])
    colours = np.vstack([traj.initial.colour, traj.colours])
    counts = np.vstack([traj.initial.count, traj.counts])
    A = counts[:, 0].copy()
    per = counts[:, 1:]
    B = per.sum(axis=1)
    safe = np.where(B > 0, B, 1)
    r_v = np.where(B[:, None] > 0, per / safe[:, None], 0.0)
    r_j = np.zeros((steps.size, s))
    for j in range(s):
        r_j[:, j] = np.where(colours[:, 1:] == j, per, 0).sum(axis=1) / safe
    f = np.array([f_floor(int(k), n, alpha) for k in steps])
    bad = {
        "A": A > (steps * n) ** (1.0 / 6.0),
        "B": B < 3 * n + steps / 2.0,
        "C": (per == 0).any(axis=1),
        "D": (r_j < f[:, None]).any(axis=1),
    }
    hits = {e: (int(steps[np.argmax(b)]) if b.any() else None) for e, b in bad.items()}
    any_bad = np.logical_or.reduce(list(bad.values()))
    T = int(steps[np.argmax(any_bad)]) if any_bad.any() else None
    Y = r_j - f[:, None]
    if T is not None:
        Y[steps > T] = Y[np.searchsorted(steps, T)]
    return RiskMonitorReport(n, alpha, steps, A, B, r_v, r_j, f, Y, hits, T, final=traj.final,
                             extinction_steps=traj.extinction_steps)
