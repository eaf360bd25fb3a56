"""Perron-Frobenius eigenpair of a graph's adjacency matrix."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence
from .graph import Graph
from .kernels.linalg import csr_matvec, shifted_power_iteration

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 1_000_000


@dataclass(frozen=True)
class SpectralData:
    lam: float
    pi: np.ndarray
    residual: float
    iterations: int

    @property
    def lambda_(self) -> float:
        return self.lam

    def to_json(self) -> str:
        return json.dumps({
            "lambda": float(f"{self.lam:.15g}"),
            "pi": [float(f"{p:.15g}") for p in self.pi],
            "residual": float(f"{self.residual:.15g}"),
            "iterations": self.iterations,
        })


def perron_eigenpair(g: Graph, tol: float = DEFAULT_TOL,
                     max_iter: int = DEFAULT_MAX_ITER) -> SpectralData:
    """Dominant eigenvalue and positive unit eigenvector of ``g``'s adjacency matrix.

    The iteration runs on ``A + I`` because bipartite graphs have ``-lambda``
    in the spectrum, which stalls plain power iteration.

    Raises
    ------
    NoConvergence
        If ``||A pi - lambda pi||_2 <= tol`` is not reached in ``max_iter`` steps.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if g.n == 1:
        return SpectralData(0.0, np.ones(1), 0.0, 0)
    lam, pi, res, it = shifted_power_iteration(g.indptr, g.indices, float(tol), int(max_iter))
    if it < 0:
        raise NoConvergence(max_iter, res)
    pi = np.asarray(pi, dtype=float)
    pi.setflags(write=False)
    return SpectralData(float(lam), pi, float(res), int(it))


def residual(g: Graph, lam: float, pi: np.ndarray) -> float:
    """``||A pi - lambda pi||_2`` recomputed from the graph."""
    out = np.empty(g.n)
    csr_matvec(g.indptr, g.indices, np.asarray(pi, dtype=float), out)
    return float(np.linalg.norm(out - lam * np.asarray(pi)))
