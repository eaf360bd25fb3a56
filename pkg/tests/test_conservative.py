import numpy as np
import pytest
from scipy.stats import ks_2samp

from competing_urns import rng as R
from competing_urns.conservative import (PURPLE, MarkedState, apply, check_identity_ZRB,
                                         check_identity_ZYM, check_ledger, check_mark_invariants,
                                         coupled_step, init_conservative, pick, run_conservative,
                                         step_conservative)
from competing_urns.errors import BeforeFirstNucleation, Extinct, MarkInvariantViolated
from competing_urns.graph import complete, cycle, path, risk
from competing_urns.urn import BLUE, RED, from_signed, run_until, single_colour


def test_single_merge():
    s = init_conservative(path(2), [1, -1])
    apply(s, 0, RED, 0)
    assert list(s.R) == [1, 0] and list(s.B) == [0, 0] and list(s.P) == [0, 1]
    plain = from_signed(path(2), [1, -1])
    from competing_urns.urn import apply_nucleation
    apply_nucleation(plain, 0)
    assert check_identity_ZRB(s, plain) and list(s.Z) == [1, 0]


def test_purple_nucleation_leaves_z():
    s = init_conservative(path(2), [0, 0], purple=[0, 1])
    apply(s, 1, PURPLE, 0)
    assert list(s.P) == [1, 1] and list(s.Z) == [0, 0]


def test_selection_is_uniform_over_all_balls():
    s = init_conservative(path(3), [2, 0, -1], purple=[1, 3, 0])
    assert s.total_balls == 7
    seen = {}
    for i in range(7):
        v, c, m = pick(s, (i + 0.5) / 7, 0.0)
        seen[v] = seen.get(v, 0) + 1
    assert seen == {0: 3, 1: 3, 2: 1}
    kinds = [pick(s, 0.0, (j + 0.5) / 3)[1] for j in range(3)]
    assert kinds == [RED, RED, PURPLE]


def test_first_nucleation_marks_offspring():
    s = MarkedState(cycle(4), [0, -1, 0, 0])
    apply(s, 1, BLUE, 0)
    assert s.mark_colour == BLUE
    assert list(s.B_star) == [1, 0, 1, 0]
    assert (s.B_star + s.P_star).sum() == 2
    assert check_identity_ZYM(s)


def test_rules_d_and_e():
    s = MarkedState(cycle(4), [0, -1, 0, 1])
    apply(s, 1, BLUE, 0)
    apply(s, 3, RED, 0)             # red meets marked blue at 0 and 2
    assert list(s.B_star) == [0, 0, 0, 0]
    assert list(s.P_star) == [1, 0, 1, 0] and list(s.P) == [1, 0, 1, 0]
    assert check_identity_ZYM(s)
    apply(s, 1, BLUE, 0)             # unmarked blue arrives where a marked purple sits
    assert list(s.B_star) == [1, 0, 1, 0] and list(s.P_star) == [0, 0, 0, 0]
    assert list(s.B) == [1, 1, 1, 0] and list(s.P) == [1, 0, 1, 0]
    assert check_identity_ZYM(s)


def test_red_first_nucleator_flips_signs():
    s = MarkedState(cycle(4), [1, 0, -1, 0])
    apply(s, 0, RED, 0)
    assert s.mark_colour == RED
    assert list(s.M) == [0, -1, 0, -1]
    assert check_identity_ZYM(s)
    assert not s.ms[BLUE].any()


def test_before_first_nucleation():
    with pytest.raises(BeforeFirstNucleation):
        check_identity_ZYM(MarkedState(cycle(4), [1, 0, -1, 0]))


def test_rule_e_violation_is_flagged():
    s = MarkedState(cycle(4), [0, -1, 0, 1])
    apply(s, 1, BLUE, 0)
    s.rb[BLUE, 0] += 1
    s.pp[0] += 1
    s.ps[0] += 1
    with pytest.raises(MarkInvariantViolated):
        check_identity_ZYM(s)


def test_corrupt_purple_keeps_zrb():
    s = init_conservative(cycle(4), [1, 0, -1, 0])
    plain = from_signed(cycle(4), [1, 0, -1, 0])
    s.pp[2] += 1
    assert check_identity_ZRB(s, plain)


def test_extinct():
    s = init_conservative(path(2), [1, -1])
    s.ist[0] = 0
    with pytest.raises(Extinct):
        step_conservative(s, R.stream(0))


@pytest.mark.parametrize("g,z", [
    (path(4), [2, -1, 0, 1]),
    (cycle(6), [3, 0, -2, 0, 1, 0]),
    (complete(5), [2, -2, 1, 0, -1]),
    (risk(3), [0, 2, 2, -2, -2, 1, 1]),
])
def test_coupled_identities(g, z):
    cons = MarkedState(g, z)
    plain = from_signed(g, z)
    gen = R.stream(21)
    for _ in range(10_000):
        coupled_step(cons, plain, gen)
        assert check_identity_ZRB(cons, plain)
        assert check_identity_ZYM(cons)
        assert check_ledger(cons)
        assert np.all(np.minimum(cons.R, cons.B) == 0)
    assert cons.merges > 0


def test_purple_ledger_over_run():
    s = MarkedState(cycle(6), [3, 0, -2, 0, 1, 0])
    p_prev, m_prev = 0, 0
    gen = R.stream(22)
    for _ in range(2000):
        step_conservative(s, gen)
        p = int(s.P.sum())
        assert p >= p_prev
        assert p == s.merges + s.purple_created
        check_mark_invariants(s)
        p_prev, m_prev = p, s.merges


def test_marked_mass_is_a_one_type_urn():
    """Total marked mass at time tau1 + h against a directly simulated one-type urn."""
    h = 1.0
    g = cycle(4)
    marked, ref = [], []
    for r in range(10_000):
        s = MarkedState(g, [1, 0, -1, 0])
        sel, clk = R.streams(31, r)
        run_conservative(s, rng=sel, clock=clk, horizon_after_first=h)
        marked.append(int(s.B_star.sum() + s.R_star.sum() + s.P_star.sum()))
        # both first nucleators have neighbours {1, 3}
        o = single_colour(g, [0, 1, 0, 1])
        sel, clk = R.streams(32, r)
        run_until(o, max_time=h, rng=sel, clock=clk, record=False)
        ref.append(o.total_balls)
    assert ks_2samp(marked, ref).pvalue > 1e-3
    assert abs(np.mean(marked) - np.mean(ref)) < 4 * np.sqrt(np.var(ref) / len(ref) * 2)
