from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from competing_urns import rng as R
from competing_urns.errors import GrowthError, IllegalInitialConfiguration
from competing_urns.growth import (HALFPLANE, PLANE, brute_force_closure, closure,
                                   closure_violations, growth_step, init_growth,
                                   parse_growth_init, recompute_boundary, run_growth,
                                   sample_edges, validate_initial)

NB = ((1, 0), (-1, 0), (0, 1), (0, -1))


def test_validate_examples():
    validate_initial({(0, 0): 0, (5, 0): 1})
    validate_initial({(0, 0): 0, (1, 1): 1})
    with pytest.raises(IllegalInitialConfiguration) as e:
        validate_initial({(0, 0): 0, (2, 0): 0})
    assert e.value.args and "(1, 0)" in str(e.value)


def test_validate_halfplane_rejects_negative_rows():
    with pytest.raises(GrowthError):
        validate_initial({(0, -1): 0}, HALFPLANE)


def test_diagonal_pair_fills_square():
    s = init_growth({(0, 0): 0, (1, 1): 0}, validate=False)
    assert sorted(closure(s, 0, [(1, 1)])) == [(0, 1), (1, 0)]
    assert s.colours == {(0, 0): 0, (1, 1): 0, (1, 0): 0, (0, 1): 0}


def test_isolated_site_closure_is_empty():
    s = init_growth({(0, 0): 0, (5, 5): 0}, validate=False)
    assert closure(s, 0, [(5, 5)]) == []


def test_l_tromino_notch():
    cfg = {(0, 0): 0, (1, 0): 0, (0, 1): 0, (3, 2): 0}
    s = init_growth(cfg, validate=False)
    closure(s, 0, list(cfg))
    assert s.colours == brute_force_closure(cfg, 0)
    assert (1, 1) in s.colours


@given(st.sets(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), min_size=1, max_size=14),
       st.randoms())
def test_closure_matches_brute_force(sites, rnd):
    cfg = {p: 0 for p in sites}
    order = sorted(sites)
    rnd.shuffle(order)
    s = init_growth(cfg, validate=False)
    closure(s, 0, order)
    assert s.colours == brute_force_closure(cfg, 0)
    assert not closure_violations(s)


def test_first_event_edge_counts():
    s = init_growth({(0, 0): 0})
    assert s.n_boundary == 4
    h = init_growth({(0, 0): 0}, HALFPLANE)
    assert h.n_boundary == 3


def _sampler_within_4sd(state, draws, seed):
    hits = Counter(sample_edges(state, np.random.default_rng(seed), draws))
    live = state.live_edges()
    assert set(hits) <= set(live)
    p = 1.0 / len(live)
    sd = np.sqrt(draws * p * (1 - p))
    for e in live:
        assert abs(hits.get(e, 0) - draws * p) <= 4 * sd


def test_single_seed_edges_uniform():
    _sampler_within_4sd(init_growth({(0, 0): 0}), 100_000, 1)


def test_sampler_uniform_on_grown_state():
    s = init_growth({(0, 0): 0, (0, 3): 1})
    run_growth(s, rng=R.stream(2), max_steps=40)
    _sampler_within_4sd(s, 100_000, 2)


def _check_event(before, ev, after):
    src, tgt = ev.edge
    assert before[src] == ev.colour and tgt not in before
    assert abs(src[0] - tgt[0]) + abs(src[1] - tgt[1]) == 1
    cols = dict(before)
    cols[tgt] = ev.colour
    for x, y in ev.closure_sites.tolist():
        assert (x, y) not in cols
        assert sum(cols.get((x + dx, y + dy)) == ev.colour for dx, dy in NB) >= 2
        cols[(x, y)] = ev.colour
    assert cols == after


@pytest.mark.parametrize("cfg,geom", [
    ({(0, 0): 0, (0, 3): 1}, PLANE),
    ({(0, 0): 0, (2, 0): 1, (4, 0): 2}, HALFPLANE),
    ({(0, 0): 0, (1, 1): 1}, PLANE),
])
def test_events_keep_invariants(cfg, geom):
    s = init_growth(cfg, geom)
    gen = R.stream(3)
    before = s.colours
    for i in range(150):
        ev = growth_step(s, gen)
        after = s.colours
        assert ev.dt > 0
        _check_event(before, ev, after)
        assert recompute_boundary(s) == set(s.live_edges())
        assert s.n_boundary == len(s.live_edges())
        if i % 16 == 0:
            assert not closure_violations(s)
        before = after
    assert not closure_violations(s)
    assert s.step == 150


def test_mixed_neighbour_site_follows_edge_colour():
    s = init_growth({(0, 0): 0, (2, 0): 1})
    seen = set()
    for r in range(60):
        t = s.copy()
        ev = growth_step(t, R.stream(4, r))
        if ev.edge[1] == (1, 0):
            seen.add(ev.colour)
            assert t.colour_at(1, 0) == ev.colour == s.colour_at(*ev.edge[0])
    assert seen == {0, 1}


def test_blocked_seed_stops_at_once():
    cfg = {(0, 0): 0, (1, 0): 1, (-1, 0): 1, (0, 1): 1, (0, -1): 1}
    s = init_growth(cfg, validate=False)
    closure(s, 1, [(1, 0), (-1, 0), (0, 1), (0, -1)])
    tr = run_growth(s, rng=R.stream(0), single_colour_boundary=True)
    assert tr.stop_reason == "single colour boundary" and s.step == 0


def test_plane_runs_reach_single_colour():
    for r in (0, 1, 3, 4):
        s = init_growth({(0, 0): 0, (0, 3): 1}, track_steps=False)
        sel, clk = R.streams(5, r)
        tr = run_growth(s, rng=sel, clock=clk, max_steps=10**5, single_colour_boundary=True)
        assert tr.stop_reason == "single colour boundary"
        assert len(s.boundary_colours()) == 1


def test_halfplane_three_colours_single_owner():
    for r in (1, 2, 3, 4):
        s = init_growth({(0, 0): 0, (2, 0): 1, (4, 0): 2}, HALFPLANE, track_steps=False)
        sel, clk = R.streams(5, r)
        tr = run_growth(s, rng=sel, clock=clk, max_steps=10**5, single_colour_boundary=True)
        assert tr.stop_reason == "single colour boundary"
        assert len(s.boundary_colours()) == 1
        assert all(y >= 0 for _, y in s.colours)


def test_budgets_and_monotonicity():
    s = init_growth({(0, 0): 0, (0, 3): 1})
    tr = run_growth(s, rng=R.stream(7), max_steps=300, stride=10)
    assert tr.stop_reason == "step budget" and s.step == 300
    assert np.all(np.diff(tr.site_counts.sum(axis=1)) > 0)
    old = s.colours
    run_growth(s, rng=R.stream(8), max_time=s.time + 0.5)
    new = s.colours
    assert all(new[p] == c for p, c in old.items())
    with pytest.raises(ValueError):
        run_growth(s, rng=R.stream(8))


def test_grid_growth_keeps_state():
    s = init_growth({(0, 0): 0, (0, 3): 1})
    run_growth(s, rng=R.stream(9), max_steps=1500)
    assert recompute_boundary(s) == set(s.live_edges())
    assert not closure_violations(s)
    assert len(s.colours) == s.n_coloured


def test_parse_growth_init():
    assert parse_growth_init("# seeds\n0 0 red\n0 3 blue\n5 5 2\n") == {(0, 0): 0, (0, 3): 1, (5, 5): 2}
    with pytest.raises(GrowthError):
        parse_growth_init("0 0 red\n0 0 blue\n")
    with pytest.raises(GrowthError):
        parse_growth_init("0 red\n")


def test_large_closure_keeps_edge_array_small():
    # each site filled by the closure pushes edges that the closure itself
    # then kills; they must be compacted away rather than stored
    n = 300
    cfg = {(x, 0): 0 for x in range(n)}
    cfg.update({(0, y): 0 for y in range(n)})
    st = init_growth(cfg, validate=False, track_steps=False)
    filled = closure(st, 0, [(0, 1), (1, 0)])
    assert len(filled) == (n - 1) ** 2
    assert st.n_boundary == 4 * n
    assert st.E.shape[0] < 8 * n * 4
    assert not closure_violations(st)
