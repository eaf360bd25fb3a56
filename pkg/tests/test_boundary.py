import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from competing_urns import boundary as B
from competing_urns import rng as R
from competing_urns.errors import DropletDisconnected, Monochromatic
from competing_urns.growth import HALFPLANE, PLANE, init_growth


def rect(cfg, x0, x1, y0, y1, c):
    for x in range(x0, x1 + 1):
        for y in range(y0, y1 + 1):
            cfg[(x, y)] = c
    return cfg


def traced(cfg, geom=PLANE):
    return B.trace_outer_boundary(init_growth(cfg, geom, validate=False))


# two-interval droplet: red base with a blue block on top (k = 1)
FIG_K1 = rect(rect(rect(rect({}, 0, 9, 0, 1, 0), 0, 1, 2, 2, 0), 7, 9, 2, 3, 0), 2, 6, 2, 5, 1)
# red, raised blue, lowered red (k = 2)
FIG_K2 = rect(rect(rect({}, 0, 1, 0, 2, 0), 2, 5, 1, 4, 1), 6, 8, -1, 1, 0)


def test_unit_square():
    loop = traced({(0, 0): 0})
    assert len(loop) == 4 and set(loop.colour.tolist()) == {0} and loop.closed
    with pytest.raises(Monochromatic):
        B.decompose_boundary(loop)
    assert loop.corners() == (4, 0)


def test_two_by_two():
    assert len(traced(rect({}, 0, 1, 0, 1, 0))) == 8


def test_hole_is_ignored():
    ring = {p: 0 for p in rect({}, 0, 2, 0, 2, 0) if p != (1, 1)}
    assert len(traced(ring)) == 12


def test_figure_k2():
    loop = traced(FIG_K2)
    D = B.decompose_boundary(loop)
    assert loop.k == 2 and len(D) == 12 and D.segments == 12


def test_figure_k1():
    loop = traced(FIG_K1)
    D = B.decompose_boundary(loop)
    assert loop.k == 1 and len(D) == 8 and D.segments == 8


def test_mid_side_breaks_give_zeros():
    loop = traced(rect(rect({}, 0, 3, 0, 1, 0), 0, 3, 2, 3, 1))
    D = B.decompose_boundary(loop)
    assert loop.k == 1 and len(D) == 8
    assert D.entries.count(0) == 2 and D.segments == 6


def test_diagonal_contact():
    loop = traced({(0, 0): 0, (1, 1): 1})
    D = B.decompose_boundary(loop)
    assert len(loop) == 8 and len(D) == 8 and loop.k == 1


@pytest.mark.parametrize("cfg", [FIG_K1, FIG_K2, {(0, 0): 0, (1, 1): 1},
                                 rect(rect({}, 0, 3, 0, 1, 0), 0, 3, 2, 3, 1)])
def test_claim1_and_reconstruction(cfg):
    loop = traced(cfg)
    outer, inner = loop.corners()
    assert outer - inner == 4
    D = B.decompose_boundary(loop)
    assert len(D) == B.expected_length(loop.k, True) == 4 * loop.k + 4
    # corner census: m inner corners, m + 4 outer, two entries per mid-side break
    assert len(D) == 2 * inner + 4 + 2 * (2 * loop.k - inner)
    assert np.array_equal(B.reconstruct(loop, D), np.roll(loop.vertices(), -D.start, axis=0))


def test_halfplane_arc():
    loop = traced({(0, 0): 0, (1, 0): 1, (2, 0): 2}, HALFPLANE)
    assert not loop.closed and loop.k == 3
    outer, inner = loop.corners()
    assert outer - inner == 2
    D = B.decompose_boundary(loop)
    assert len(D) == B.expected_length(3, False) == 7
    assert np.array_equal(B.reconstruct(loop, D), np.roll(loop.vertices(), -D.start, axis=0))
    with pytest.raises(Monochromatic):
        B.decompose_boundary(traced({(0, 0): 0, (1, 0): 0}, HALFPLANE))


def test_disconnected():
    with pytest.raises(DropletDisconnected):
        traced({(0, 0): 0, (0, 3): 1})


def test_odd_interval_count_rejected():
    # three colours around a closed loop cannot alternate
    from competing_urns.errors import BoundaryError
    with pytest.raises(BoundaryError):
        traced({(0, 0): 0, (1, 0): 1, (0, 1): 2})


def test_urn_update_rule():
    assert B.urn_update((2, -1, 3, -1), 0, True) == (2, 0, 3, 0)
    assert B.urn_update((2, -1, 3, -1), 1, True) == (1, -1, 2, -1)
    assert B.urn_update((2, -1, 3), 0, False) == (2, 0, 3)
    assert B.urn_update((2, -1, 3), 2, False) == (2, 0, 3)


def test_edge_keys_match_loop_keys():
    loop = traced({(0, 0): 0})
    keys = {B.edge_key((0, 0), d) for d in range(4)}
    assert set(loop.keys.tolist()) == keys


@settings(max_examples=15)
@given(st.integers(0, 10**6))
def test_random_droplets_satisfy_claim1(seed):
    from competing_urns.growth import run_growth
    s = init_growth({(0, 0): 0, (0, 3): 1})
    run_growth(s, rng=R.stream(seed), max_steps=60)
    if not B.is_connected(s):
        return
    loop = B.trace_outer_boundary(s)
    assert loop.corners()[0] - loop.corners()[1] == 4
    if loop.k == 0:
        return
    D = B.decompose_boundary(loop)
    assert len(D) == 4 * loop.k + 4
    assert np.array_equal(B.reconstruct(loop, D), np.roll(loop.vertices(), -D.start, axis=0))


@pytest.mark.parametrize("cfg,geom", [
    ({(0, 0): 0, (0, 3): 1}, PLANE),
    ({(0, 0): 0, (2, 0): 1, (4, 0): 2}, HALFPLANE),
])
def test_coupled_check_no_divergences(cfg, geom):
    total = 0
    for r in range(6):
        s = init_growth(cfg, geom)
        sel, clk = R.streams(40, r)
        rep = B.coupled_equivalence_check(s, rng=sel, clock=clk, events=400)
        assert rep.ok, rep.divergences[:3]
        ks = [k for _, k in rep.k_history]
        assert all(a >= b for a, b in zip(ks, ks[1:]))
        total += rep.events_checked
        assert rep.to_dict()["anchor_rule"] == B.ANCHOR_RULE
    assert total > 0


def test_interval_merge_closes_window():
    # find a run whose interval count drops and check it is recorded
    for r in range(30):
        s = init_growth({(0, 0): 0, (0, 3): 1})
        rep = B.coupled_equivalence_check(s, rng=R.stream(41, r), events=2000,
                                          stop_when_single=True)
        ks = [k for _, k in rep.k_history]
        if len(ks) >= 2:
            assert ks[-1] < ks[-2]
            assert rep.windows[-1]["k"] == ks[-2]
            assert rep.windows[-1]["end_step"] < rep.k_history[-1][0]
            return
    pytest.fail("no interval merge observed")


def test_mutated_predictor_is_caught(monkeypatch):
    true_update = B.urn_update

    def wrong(entries, i, closed):
        out = list(true_update(entries, i, closed))
        out[i] += 1
        return tuple(out)
    monkeypatch.setattr(B, "urn_update", wrong)
    s = init_growth({(0, 0): 0, (0, 3): 1})
    rep = B.coupled_equivalence_check(s, rng=R.stream(40, 0), events=400)
    assert not rep.ok and rep.divergences


def test_verify_correspondence_driver():
    out = B.verify_correspondence({(0, 0): 0, (0, 3): 1}, PLANE, events=500, master_seed=3)
    assert out["events_checked"] >= 500 and out["divergences"] == []
    assert out["replicas"] == len(out["k_history"])
