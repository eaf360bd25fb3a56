import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import zeta

from competing_urns import rng as R
from competing_urns.errors import WrongGraphFamily
from competing_urns.graph import cycle
from competing_urns.risk import (DEFAULT_ALPHA, f_floor, f_lower_bound, initial_state,
                                 risk_monitors, run_risk)
from competing_urns.urn import from_signed, run_until


def test_k0_values():
    n, a = 20, 0.01
    rep = run_risk(initial_state(3, n), n=n, alpha=a, rng=R.stream(1), max_steps=1, stride=1)
    assert rep.A[0] == 0 and rep.B[0] == 6 * n
    assert np.allclose(rep.r_j[0], 1 / 3)
    assert np.allclose(rep.Y[0], a)
    assert rep.f[0] == pytest.approx(1 / 3 - a, abs=1e-15)


def test_f_empty_sum():
    assert f_floor(0, 5, 0.02) == 1 / 3 - 0.02


@given(st.integers(1, 400), st.integers(0, 3000))
def test_f_bound(n, k):
    tail = zeta(1.5, n)
    assert f_floor(k, n) >= 1 / 3 - DEFAULT_ALPHA - tail - 1e-12
    assert f_lower_bound(n) <= 1 / 3 - DEFAULT_ALPHA - tail + 1e-12


def test_f_above_three_tenths_where_the_bound_allows():
    # smallest n whose tail bound keeps f above 3/10 for alpha = 0.01
    n = next(n for n in range(1, 10**5) if zeta(1.5, n) < 1 / 30 - DEFAULT_ALPHA)
    assert all(f_floor(k, n) > 0.3 for k in range(0, 20_000, 97))
    assert 1 / 3 - DEFAULT_ALPHA - zeta(1.5, n) > 0.3
    # the shipped grid's largest n does not reach that regime
    assert 1 / 3 - DEFAULT_ALPHA - zeta(1.5, 100) < 0.3


def test_kernel_f_matches_fsum():
    n = 5
    rep = run_risk(initial_state(3, n), n=n, rng=R.stream(2), max_steps=3000, stride=1)
    ref = np.array([f_floor(int(k), n) for k in rep.steps])
    assert np.max(np.abs(rep.f - ref)) < 1e-15


@pytest.mark.parametrize("n,seed", [(5, 3), (20, 4), (100, 5)])
def test_kernel_matches_oracle(n, seed):
    sel, clk = R.streams(seed, 0)
    rep = run_risk(initial_state(3, n), n=n, rng=sel, clock=clk, max_steps=2000, stride=1)
    sel, clk = R.streams(seed, 0)
    traj = run_until(initial_state(3, n), max_steps=2000, rng=sel, clock=clk)
    ref = risk_monitors(traj, n)
    assert np.array_equal(rep.steps, ref.steps)
    for name in ("A", "B"):
        assert np.array_equal(getattr(rep, name), getattr(ref, name))
    for name in ("r_v", "r_j", "f", "Y"):
        assert np.allclose(getattr(rep, name), getattr(ref, name), atol=1e-13, rtol=0)
    assert rep.first_hit == ref.first_hit and rep.T == ref.T
    assert np.array_equal(rep.final.count, traj.final.count)


def test_event_thresholds_by_hand():
    n = 5
    sel, clk = R.streams(6, 0)
    traj = run_until(initial_state(3, n), max_steps=500, rng=sel, clock=clk)
    ref = risk_monitors(traj, n)
    for j, k in enumerate(ref.steps[:200]):
        a_bad = ref.A[j] > (k * n) ** (1 / 6)
        b_bad = ref.B[j] < 3 * n + k / 2
        if ref.first_hit["A"] is not None and k < ref.first_hit["A"]:
            assert not a_bad
        if ref.first_hit["B"] is not None and k < ref.first_hit["B"]:
            assert not b_bad


def test_y_frozen_after_T():
    n = 5
    rep = run_risk(initial_state(3, n), n=n, rng=R.stream(7), max_steps=1000, stride=1)
    assert rep.T is not None
    after = rep.Y[rep.steps >= rep.T]
    assert np.all(after == after[0])


def test_k0_increment_is_n_to_minus_three_halves():
    """Exact expectation of Y_1 - Y_0 by enumerating the first draw."""
    from competing_urns.urn import apply_nucleation, select_vertex
    for n in (5, 20):
        s0 = initial_state(3, n)
        inc = np.zeros(3)
        for i in range(6 * n):
            s = s0.copy()
            apply_nucleation(s, select_vertex(s, (i + 0.5) / (6 * n)))
            per, col = s.count[1:], s.colour[1:]
            rj = np.array([per[col == j].sum() for j in range(3)]) / per.sum()
            inc += (rj - f_floor(1, n)) - (1 / 3 - f_floor(0, n))
        inc /= 6 * n
        assert np.allclose(inc, n ** -1.5, atol=1e-14)


def test_increment_samples():
    n = 20
    rep = run_risk(initial_state(3, n), n=n, rng=R.stream(8), max_steps=100, sample_k=(0, 5))
    assert rep.Y_before.shape == (2, 3)
    assert np.allclose(rep.Y_before[0], DEFAULT_ALPHA)


def test_wrong_family():
    with pytest.raises(WrongGraphFamily):
        run_risk(from_signed(cycle(5), [1, 0, 0, 0, -1]), n=5, rng=R.stream(0), max_steps=10)


def test_requires_fresh_state_and_valid_samples():
    s = initial_state(3, 5)
    with pytest.raises(ValueError):
        run_risk(s, n=5, rng=R.stream(0), max_steps=10, sample_k=(10,))
    s.ist[1] = 3
    with pytest.raises(ValueError):
        run_risk(s, n=5, rng=R.stream(0), max_steps=10)


def test_extinction_steps_reported():
    rep = run_risk(initial_state(3, 5), n=5, rng=R.stream(9), max_steps=20_000)
    alive = rep.final.ctot > 0
    assert np.all((rep.extinction_steps == -1) == alive)
    assert rep.all_alive == bool(alive.all())
