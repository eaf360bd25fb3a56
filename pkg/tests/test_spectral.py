import math

import numpy as np
import pytest
from hypothesis import given

from competing_urns.errors import NoConvergence
from competing_urns.graph import complete, cycle, path, risk
from competing_urns.spectral import perron_eigenpair, residual

from conftest import connected_graphs


def oracle(g):
    """Dense symmetric eigensolver: top eigenpair with a positive vector."""
    a = np.zeros((g.n, g.n))
    for u, v in g.edges:
        a[u, v] = a[v, u] = 1.0
    w, v = np.linalg.eigh(a)
    x = v[:, -1]
    return w[-1], x * np.sign(x.sum())


def test_c4():
    sd = perron_eigenpair(cycle(4))
    assert sd.lambda_ == pytest.approx(2, abs=1e-10)
    assert np.allclose(sd.pi, 0.5, atol=1e-9)


def test_p3():
    sd = perron_eigenpair(path(3))
    assert sd.lam == pytest.approx(math.sqrt(2), abs=1e-10)
    assert np.allclose(sd.pi, [0.5, 1 / math.sqrt(2), 0.5], atol=1e-9)


def test_risk3():
    sd = perron_eigenpair(risk(3))
    assert sd.lam == pytest.approx(3, abs=1e-10)
    assert np.allclose(sd.pi, np.array([2, 1, 1, 1, 1, 1, 1]) / math.sqrt(10), atol=1e-8)
    lam, x = oracle(risk(3))
    assert lam == pytest.approx(3, abs=1e-12)


@pytest.mark.parametrize("k", range(3, 13))
def test_cycles(k):
    assert perron_eigenpair(cycle(k)).lam == pytest.approx(2, abs=1e-10)


@pytest.mark.parametrize("m", [2, 3, 6])
def test_complete_regular(m):
    assert perron_eigenpair(complete(m)).lam == pytest.approx(m - 1, abs=1e-10)


@given(connected_graphs())
def test_against_dense_oracle(g):
    sd = perron_eigenpair(g)
    lam, x = oracle(g)
    assert sd.lam == pytest.approx(lam, abs=1e-8)
    assert np.allclose(sd.pi, x, atol=1e-6)
    assert abs(np.linalg.norm(sd.pi) - 1) < 1e-12
    assert sd.pi.min() > 0
    assert sd.lam >= 1 - 1e-12
    assert residual(g, sd.lam, sd.pi) <= 1e-10
    assert sd.residual <= 1e-10


@given(connected_graphs())
def test_deterministic_restart(g):
    a, b = perron_eigenpair(g), perron_eigenpair(g)
    assert a.lam == b.lam and np.array_equal(a.pi, b.pi)
    assert np.argmax(a.pi) == np.argmax(b.pi)


def test_no_convergence():
    with pytest.raises(NoConvergence):
        perron_eigenpair(path(9), tol=1e-14, max_iter=3)


def test_json_precision():
    import json
    d = json.loads(perron_eigenpair(cycle(4)).to_json())
    assert d["lambda"] == pytest.approx(2, abs=1e-10) and len(d["pi"]) == 4
