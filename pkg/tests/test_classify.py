from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lpaf.algebra import AlgebraIsometry, ComplexPermutation, SsfdAlgebra
from lpaf.bratteli import AlgebraDirectSystem, GroupDirectSystem, group_system_of
from lpaf.classify import (
    IntertwiningLadder,
    IsoWitness,
    find_intertwining,
    ladder_to_algebra_iso,
    lift_one_sided,
    one_sided_extend,
    realize_hom,
    realize_system,
    verify_witness,
)
from lpaf.errors import BudgetExhausted, EndpointMismatch, IllegalExponent, LadderMismatch
from lpaf.homs import SpatialHom, apply_hom, compose_homs, homs_agree
from lpaf.ktheory import PositiveContractiveMap, ScaledZGroup

P = 1.5


def dbl():
    return GroupDirectSystem.from_matrices([[2], [4], [8]], [[[2]], [[2]]])


def tel():
    return GroupDirectSystem.from_matrices([[2], [8], [32]], [[[4]], [[4]]])


def adic(base, levels=7):
    return GroupDirectSystem.from_matrices([[base ** i] for i in range(levels)], [[[base]]] * (levels - 1))


def test_realize_hom_examples():
    a, b = SsfdAlgebra(P, [2]), SsfdAlgebra(P, [4])
    f = PositiveContractiveMap(ScaledZGroup([2]), ScaledZGroup([4]), [[2]])
    assert realize_hom(f, a, b).orders == ((0, 0),)
    zero = PositiveContractiveMap(ScaledZGroup([2]), ScaledZGroup([4]), [[0]])
    assert realize_hom(zero, a, b).orders == ((),)
    ident = PositiveContractiveMap.identity(ScaledZGroup([2]))
    assert realize_hom(ident, a, a).orders == ((0,),)
    with pytest.raises(EndpointMismatch):
        realize_hom(f, b, b)


def test_realize_system_examples():
    s = realize_system(dbl(), P)
    assert [x.summands for x in s.levels] == [(2,), (4,), (8,)]
    assert group_system_of(s) == dbl()
    assert len(realize_system(GroupDirectSystem([], []), P)) == 0
    z = GroupDirectSystem.from_matrices([[1], [1]], [[[0]]])
    assert realize_system(z, P).maps[0].multiplicity().tolist() == [[0]]
    with pytest.raises(IllegalExponent):
        realize_system(dbl(), 2)


def test_doubling_vs_telescope():
    v = find_intertwining(dbl(), tel(), depth=2)
    assert v.kind == "Isomorphic" and v.ladder.depth == 2
    assert v.ladder.check(dbl(), tel())
    v3 = find_intertwining(dbl(), tel(), depth=3)
    assert v3.isomorphic
    assert [x.tolist() for x in v3.ladder.r] == [[[1]], [[2]], [[4]]]
    assert [x.tolist() for x in v3.ladder.s] == [[[2]], [[1]]]


def test_two_adic_vs_three_adic():
    v = find_intertwining(adic(2), adic(3), depth=3)
    assert v.kind == "NotWithinBound" and v.depth == 3
    assert v.nodes == 257


def test_identical_systems_give_identity_ladder():
    v = find_intertwining(dbl(), dbl(), depth=3)
    assert [x.tolist() for x in v.ladder.r] == [[[1]]] * 3


def test_budget_is_distinct_from_exhaustion():
    with pytest.raises(BudgetExhausted) as err:
        find_intertwining(adic(2), adic(3), depth=3, budget=10)
    assert err.value.nodes == 10


def test_search_is_deterministic():
    g = GroupDirectSystem.from_matrices([[1, 1], [2, 3], [5, 8]], [[[1, 1], [1, 2]], [[1, 1], [1, 2]]])
    a = find_intertwining(g, g, depth=3)
    b = find_intertwining(g, g, depth=3)
    assert a.to_json() == b.to_json()


def test_witness_for_doubling():
    v = find_intertwining(dbl(), tel(), depth=2)
    a, b = realize_system(dbl(), P), realize_system(tel(), P)
    w = ladder_to_algebra_iso(v.ladder, a, b)
    assert homs_agree(compose_homs(w.psis[0], w.phis[0]), a.connecting(0, 1))
    assert homs_agree(compose_homs(w.phis[1], w.psis[0]), b.connecting(0, 1))
    rep = verify_witness(w, a, b)
    assert rep["passed"] and rep["norm_checks"] > 0


def test_identity_ladder_lifts_to_identities():
    a = realize_system(dbl(), P)
    w = ladder_to_algebra_iso(find_intertwining(dbl(), dbl(), depth=2).ladder, a, a)
    assert all(h.similarity.is_identity() and h.multiplicity().tolist() == [[1]] for h in w.phis)


def test_zero_systems_give_vacuous_witness():
    g = GroupDirectSystem.from_matrices([[], []], [np.zeros((0, 0), dtype=np.int64)])
    a = realize_system(g, P)
    v = find_intertwining(g, g, depth=2)
    w = ladder_to_algebra_iso(v.ladder, a, a)
    assert verify_witness(w, a, a)["passed"]


def test_corrupted_witness_fails():
    v = find_intertwining(dbl(), tel(), depth=2)
    a, b = realize_system(dbl(), P), realize_system(tel(), P)
    w = ladder_to_algebra_iso(v.ladder, a, b)
    d = w.psis[0].target.summands[0]
    bad = AlgebraIsometry((ComplexPermutation(tuple(range(d)), (1j,) + (1,) * (d - 1)),))
    corrupt = IsoWitness(w.ladder, w.phis, (w.psis[0].conjugated(bad),))
    rep = verify_witness(corrupt, a, b)
    assert not rep["composites_ok"] and not rep["passed"]


def test_ladder_mismatch():
    lad = IntertwiningLadder((0, 1), (0, 1), (np.array([[1]]), np.array([[1]])), (np.array([[1]]),))
    a, b = realize_system(dbl(), P), realize_system(tel(), P)
    with pytest.raises(LadderMismatch):
        ladder_to_algebra_iso(lad, a, b)


def test_one_sided_examples():
    res = one_sided_extend([[1]], 0, 0, adic(2), adic(2), depth=3)
    assert res.complete and [x.tolist() for x in res.r] == [[[1]]] * 3
    zero = one_sided_extend([[0]], 0, 0, adic(2), adic(2), depth=3)
    assert zero.complete and all(not x.any() for x in zero.r)


def test_one_sided_three_into_scale_four_extends():
    res = one_sided_extend([[3]], 0, 2, adic(2), adic(2), depth=3)
    assert res.kind == "Extended"
    assert res.g_levels == (0, 1, 2) and res.h_levels == (2, 3, 4)
    assert [x.tolist() for x in res.r] == [[[3]]] * 3


def test_one_sided_obstructed():
    # 1 -> 1 at level 0 of (2-adic, 3-adic): r_1 * 2^a = 3^b has no solution
    res = one_sided_extend([[1]], 0, 0, adic(2), adic(3), depth=2)
    assert res.kind == "NotWithinBound"


def test_one_sided_endpoint_check():
    with pytest.raises(EndpointMismatch):
        one_sided_extend([[5]], 0, 0, adic(2), adic(2))


def test_lift_one_sided_is_coherent():
    res = one_sided_extend([[3]], 0, 2, adic(2), adic(2), depth=3)
    a = b = realize_system(adic(2), P)
    phis = lift_one_sided(res, a, b)
    m, n = res.g_levels, res.h_levels
    for k in range(len(phis) - 1):
        lhs = compose_homs(phis[k + 1], a.connecting(m[k], m[k + 1]))
        rhs = compose_homs(b.connecting(n[k], n[k + 1]), phis[k])
        assert homs_agree(lhs, rhs)


@st.composite
def group_systems(draw, levels=5):
    scales = [draw(st.lists(st.integers(1, 8), min_size=1, max_size=3))]
    mats = []
    for _ in range(levels - 1):
        src = np.array(scales[-1])
        rank = draw(st.integers(1, 3))
        m = np.array([[draw(st.integers(0, 2)) for _ in src] for _ in range(rank)], dtype=np.int64)
        tgt = [max(1, min(8, int(m[k] @ src) + draw(st.integers(0, 2)))) for k in range(rank)]
        for k in range(rank):
            while m[k] @ src > tgt[k]:
                m[k, int(np.argmax(m[k]))] -= 1
        scales.append(tgt)
        mats.append(m)
    return GroupDirectSystem.from_matrices(scales, mats)


@given(group_systems())
def test_realization_round_trip(g):
    assert group_system_of(realize_system(g, P)) == g


@given(group_systems(levels=4))
def test_ladders_are_exact(g):
    v = find_intertwining(g, g, depth=2, budget=10 ** 5)
    assert v.isomorphic and v.ladder.check(g, g)


def test_lifted_homs_are_unique_up_to_similarity():
    a = realize_system(dbl(), P)
    b = realize_system(tel(), P)
    w = ladder_to_algebra_iso(find_intertwining(dbl(), tel(), depth=3).ladder, a, b)
    from lpaf.homs import align_spatial, spatial_from_multiplicity

    for h in w.phis + w.psis:
        plain = spatial_from_multiplicity(h.multiplicity(), h.source, h.target)
        u = align_spatial(plain, h)
        for _, _, _, e in h.source.matrix_units():
            assert apply_hom(plain.conjugated(u), e).allclose(apply_hom(h, e))
