import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bmgame.instance import Coalition, gen_random, gen_tight_family, make_instance
from bmgame.mechanism import run_mechanism
from bmgame.oracle import (
    BudgetExceeded,
    audit_core,
    audit_report,
    coalition_values,
    gamma_exact,
    integrality_gap,
)

from bruteforce import best_integral
from conftest import cycle
from test_canonical import small_instances


def test_gamma_triangle(triangle):
    gv = gamma_exact(triangle)
    assert gv.gamma == 1
    assert sum(gv.witness.values()) == 1


def test_gamma_five_cycle_b2():
    gv = gamma_exact(cycle(5, 2))
    assert gv.gamma == 5
    assert gv.witness == {k: 1 for k in range(5)}


def test_gamma_edgeless_coalition(triangle):
    assert gamma_exact(triangle, Coalition(triangle, frozenset({1}))).gamma == 0
    assert gamma_exact(triangle, Coalition(triangle, frozenset())).gamma == 0


def test_witness_is_feasible_and_attains_gamma():
    inst = gen_random(8, Fraction(3, 5), 3, 20, 11)
    gv = gamma_exact(inst)
    load = {v: 0 for v in inst.vertices}
    for k, t in gv.witness.items():
        u, v, _ = inst.edges[k]
        load[u] += t
        load[v] += t
    assert all(load[v] <= inst.capacity[v] for v in inst.vertices)
    assert sum(inst.edges[k][2] * t for k, t in gv.witness.items()) == gv.gamma


@given(small_instances())
@settings(max_examples=80, deadline=None)
def test_gamma_matches_plain_enumeration(inst):
    rng = random.Random(inst.m)
    members = frozenset(v for v in inst.vertices if rng.random() < 0.7)
    assert gamma_exact(inst, Coalition(inst, members)).gamma == best_integral(inst, members)


def test_budget_exceeded():
    inst = gen_random(10, 1, 3, 20, 5)
    with pytest.raises(BudgetExceeded):
        gamma_exact(inst, budget=50)


@pytest.mark.parametrize("seed", range(10))
def test_gamma_monotone_along_chains(seed):
    inst = gen_random(9, Fraction(1, 2), 3, 20, seed)
    rng = random.Random(seed)
    order = list(inst.vertices)
    rng.shuffle(order)
    values = [gamma_exact(inst, Coalition(inst, frozenset(order[:k]))).gamma for k in range(len(order) + 1)]
    assert values == sorted(values)


def test_coalition_values_agree_with_gamma_exact():
    inst = gen_random(7, Fraction(3, 5), 2, 9, 3)
    table = coalition_values(inst)
    for mask, g in table.items():
        members = frozenset(inst.vertices[i] for i in range(inst.n) if mask >> i & 1)
        assert g == gamma_exact(inst, Coalition(inst, members)).gamma


def test_audit_triangle(triangle):
    r = run_mechanism(triangle)
    audit = audit_report(triangle, r)
    assert audit.in_core and not audit.violations
    assert audit.budget_tight and audit.gamma_grand == 1


def test_audit_catches_doctored_allocation(triangle):
    audit = audit_core(triangle, {v: Fraction(1, 5) for v in triangle.vertices}, Fraction(2, 3))
    assert frozenset(triangle.vertices) in [S for S, _, _ in audit.violations]
    assert audit.budget_ok and not audit.in_core


def test_audit_catches_overspending(triangle):
    audit = audit_core(triangle, {v: Fraction(1, 2) for v in triangle.vertices}, Fraction(2, 3))
    assert not audit.budget_ok and not audit.in_core


@pytest.mark.parametrize("seed", range(8))
def test_bipartite_exact_core(seed):
    inst = gen_random(8, Fraction(3, 5), 3, 20, seed, bipartite=True)
    r = run_mechanism(inst)
    assert r.alpha == 1
    audit = audit_report(inst, r)
    assert audit.in_core and audit.budget_tight


def test_gap_two_triangles():
    g = integrality_gap(gen_tight_family(1, 3, 1))
    assert (g.ip_value, g.lp_value, g.ratio) == (2, 3, Fraction(2, 3))


def test_gap_bipartite_and_edge(single_edge):
    assert integrality_gap(single_edge).ratio == 1
    assert integrality_gap(gen_random(8, Fraction(1, 2), 3, 20, 1, bipartite=True)).ratio == 1


def test_gap_five_cycle():
    g = integrality_gap(cycle(5, 1))
    assert (g.ip_value, g.lp_value, g.ratio) == (2, Fraction(5, 2), Fraction(4, 5))


def test_lp_dominance():
    for seed in range(15):
        inst = gen_random(8, Fraction(3, 5), 3, 20, seed)
        r = run_mechanism(inst)
        gamma = gamma_exact(inst).gamma
        assert r.lp_value >= gamma >= r.rounded_value
        assert r.lp_value - gamma <= r.rounding_loss


def test_connected_masks_small():
    # path 0-1-2 plus isolated 3: connected sets with an edge are {0,1}, {1,2}, {0,1,2}
    inst = make_instance({0: 1, 1: 1, 2: 1, 3: 1}, [(0, 1, 2), (1, 2, 3)])
    from bmgame.oracle import connected_masks

    assert connected_masks(inst) == [0b011, 0b110, 0b111]


@pytest.mark.parametrize("seed", range(12))
def test_connected_audit_same_verdict(seed):
    inst = gen_random(8, Fraction(2, 5), 3, 20, seed)
    rng = random.Random(seed)
    r = run_mechanism(inst)
    doctored = {v: a * Fraction(rng.randint(1, 9), 8) for v, a in r.allocation.items()}
    for alloc in (r.allocation, doctored):
        for alpha in (Fraction(2, 3), r.alpha, Fraction(1)):
            full = audit_core(inst, alloc, alpha)
            conn = audit_core(inst, alloc, alpha, connected_only=True)
            assert bool(full.violations) == bool(conn.violations)
            assert full.budget_ok == conn.budget_ok
            assert {S for S, _, _ in conn.violations} <= {S for S, _, _ in full.violations}
