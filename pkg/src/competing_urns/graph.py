"""Finite simple connected graphs, family generators and edge-list files."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import (
    Disconnected,
    DuplicateEdge,
    EdgeListFormatError,
    IndexOutOfRange,
    ParameterTooSmall,
    SelfLoop,
)


@dataclass(frozen=True)
class Graph:
    """Immutable undirected graph on vertices ``0..n-1``.

    ``adjacency[v]`` is the sorted tuple of neighbours of ``v``. The CSR
    arrays ``indptr``/``indices`` carry the same information for kernels.
    """

    n: int
    adjacency: tuple[tuple[int, ...], ...]
    name: str = ""
    indptr: np.ndarray = field(init=False, repr=False, compare=False)
    indices: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(a) for a in self.adjacency])
        indices = np.fromiter((u for a in self.adjacency for u in a), dtype=np.int64,
                              count=int(indptr[-1]))
        indptr.setflags(write=False)
        indices.setflags(write=False)
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", indices)

    @property
    def degree(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.adjacency)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    @property
    def num_edges(self) -> int:
        return int(self.indptr[-1]) // 2

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1.0
        return a

    def is_path(self) -> bool:
        """True when vertices ``0..n-1`` form the path in index order."""
        if self.n == 1:
            return True
        return self.num_edges == self.n - 1 and all(
            (v + 1) in self.adjacency[v] for v in range(self.n - 1))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.adjacency == other.adjacency

    def __hash__(self):
        return hash((self.n, self.adjacency))


def build_graph(n: int, edges: Iterable[tuple[int, int]], name: str = "") -> Graph:
    """Validate ``edges`` and return a connected simple graph on ``n`` vertices."""
    if n < 1:
        raise ParameterTooSmall(f"vertex count must be positive, got {n}")
    adj: list[set[int]] = [set() for _ in range(n)]
    for u, v in edges:
        u, v = int(u), int(v)
        if not (0 <= u < n and 0 <= v < n):
            raise IndexOutOfRange(u, v, n)
        if u == v:
            raise SelfLoop(u)
        if v in adj[u]:
            raise DuplicateEdge(u, v)
        adj[u].add(v)
        adj[v].add(u)

    seen = [False] * n
    seen[0] = True
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if not seen[w]:
                seen[w] = True
                queue.append(w)
    if not all(seen):
        raise Disconnected(seen.index(False))
    return Graph(n, tuple(tuple(sorted(a)) for a in adj), name)


def cycle(k: int) -> Graph:
    if k < 3:
        raise ParameterTooSmall(f"cycle needs k >= 3, got {k}")
    return build_graph(k, [(i, (i + 1) % k) for i in range(k)], f"cycle:{k}")


def path(length: int) -> Graph:
    """Path on ``length`` vertices ``0-1-...-(length-1)``."""
    if length < 1:
        raise ParameterTooSmall(f"path needs at least 1 vertex, got {length}")
    return build_graph(length, [(i, i + 1) for i in range(length - 1)], f"path:{length}")


def complete(m: int) -> Graph:
    if m < 2:
        raise ParameterTooSmall(f"complete graph needs m >= 2, got {m}")
    return build_graph(m, [(i, j) for i in range(m) for j in range(i + 1, m)], f"complete:{m}")


def risk(s: int) -> Graph:
    """``s`` triangles sharing the centre vertex 0.

    Periphery pair ``i`` (0-based) is vertices ``2i+1`` and ``2i+2``.
    """
    if s < 2:
        raise ParameterTooSmall(f"risk graph needs s >= 2, got {s}")
    edges = []
    for i in range(s):
        a, b = 2 * i + 1, 2 * i + 2
        edges += [(0, a), (0, b), (a, b)]
    return build_graph(2 * s + 1, edges, f"risk:{s}")


def risk_pairs(s: int) -> list[tuple[int, int]]:
    return [(2 * i + 1, 2 * i + 2) for i in range(s)]


FAMILIES = {"cycle": cycle, "path": path, "complete": complete, "risk": risk}


def generate(family: str, param: int | None = None) -> Graph:
    """Build a standard family; ``family`` may be ``"cycle:4"`` style."""
    if param is None:
        if ":" not in family:
            raise ValueError(f"family spec {family!r} must look like name:param")
        family, p = family.split(":", 1)
        param = int(p)
    try:
        ctor = FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown graph family {family!r}; "
                         f"choose from {sorted(FAMILIES)}") from None
    return ctor(int(param))


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_edge_list(text: str) -> Graph:
    """Parse the edge-list format.

    First non-comment line is ``n <count>``; every other non-blank line is a
    ``u v`` pair. If all labels are integers in ``0..n-1`` they are used as
    indices, otherwise labels are re-indexed in order of first appearance.
    """
    lines = [(no, _strip(raw)) for no, raw in enumerate(text.splitlines(), 1)]
    lines = [(no, s) for no, s in lines if s]
    if not lines:
        raise EdgeListFormatError("empty edge-list file")
    no, header = lines[0]
    parts = header.split()
    if len(parts) != 2 or parts[0] != "n":
        raise EdgeListFormatError(f"line {no}: expected 'n <count>', got {header!r}")
    try:
        n = int(parts[1])
    except ValueError:
        raise EdgeListFormatError(f"line {no}: bad vertex count {parts[1]!r}") from None

    pairs = []
    for no, s in lines[1:]:
        toks = s.split()
        if len(toks) != 2:
            raise EdgeListFormatError(f"line {no}: expected 'u v', got {s!r}")
        pairs.append((toks[0], toks[1]))

    def as_index(tok):
        try:
            i = int(tok)
        except ValueError:
            return None
        return i if 0 <= i < n else None

    if all(as_index(a) is not None and as_index(b) is not None for a, b in pairs):
        edges = [(int(a), int(b)) for a, b in pairs]
    else:
        index: dict[str, int] = {}
        edges = []
        for a, b in pairs:
            for tok in (a, b):
                if tok not in index:
                    index[tok] = len(index)
            edges.append((index[a], index[b]))
        if len(index) > n:
            raise EdgeListFormatError(f"{len(index)} distinct labels but n={n}")
    return build_graph(n, edges)


def format_edge_list(g: Graph) -> str:
    out = [f"n {g.n}"]
    out += [f"{u} {v}" for u, v in g.edges]
    return "\n".join(out) + "\n"


def read_edge_list(path: str | Path) -> Graph:
    p = Path(path)
    g = parse_edge_list(p.read_text(encoding="utf-8"))
    return Graph(g.n, g.adjacency, p.stem)


def write_edge_list(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_edge_list(g), encoding="utf-8", newline="\n")


def load_graph(spec: str) -> Graph:
    """Resolve ``spec`` as a family (``cycle:4``) or an edge-list file path."""
    name = spec.split(":", 1)[0]
    if name in FAMILIES and ":" in spec and not Path(spec).exists():
        return generate(spec)
    return read_edge_list(spec)
