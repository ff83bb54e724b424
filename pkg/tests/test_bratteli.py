from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lpaf.algebra import AlgebraElement, SsfdAlgebra, element_norm
from lpaf.bratteli import (
    AlgebraDirectSystem,
    GroupDirectSystem,
    approximate_identity_defect,
    dsum_systems,
    group_system_of,
    injectivize,
    limit_positive,
    matrix_amplify_system,
    telescope,
    telescope_groups,
    unitization_norm,
)
from lpaf.errors import BadIndices, BadLevels, ExponentMismatch

from conftest import corner, doubling, system_from_mults


def mults(s):
    return [h.multiplicity().tolist() for h in s.maps]


def test_telescope_examples():
    s = doubling()
    t = telescope(s, [0, 2])
    assert mults(t) == [[[4]]]
    assert mults(telescope(s, [0, 1, 2])) == mults(s)
    one = telescope(s, [1])
    assert len(one) == 1 and one.maps == ()
    with pytest.raises(BadIndices):
        telescope(s, [2, 1])
    with pytest.raises(BadIndices):
        telescope(s, [0, 5])


def test_injectivize_examples():
    s = system_from_mults(1.5, [[1, 1], [1]], [[[1, 0]]])
    t = injectivize(s)
    assert t.levels[0].summands == (1,)
    assert mults(t) == [[[1]]]
    assert t.caveat is not None and t.caveat.horizon == 1
    assert injectivize(doubling()).same_as(doubling())
    z = system_from_mults(1.5, [[1], [2], [3]], [[[0]], [[0]]])
    zi = injectivize(z)
    assert [a.summands for a in zi.levels] == [(), (), (3,)]


def test_amplify_and_dsum_examples():
    a = matrix_amplify_system(doubling(), 3)
    assert [x.summands for x in a.levels] == [(6,), (12,), (24,)]
    assert mults(a) == [[[2]]] * 2
    tri = system_from_mults(1.5, [[3], [9], [27]], [[[3]], [[3]]])
    d = dsum_systems(doubling(), tri)
    assert [x.summands for x in d.levels] == [(2, 3), (4, 9), (8, 27)]
    assert mults(d) == [[[2, 0], [0, 3]]] * 2
    empty = AlgebraDirectSystem(1.5, [], [])
    assert dsum_systems(doubling(), empty).same_as(doubling())
    with pytest.raises(ExponentMismatch):
        dsum_systems(doubling(1.5), doubling(3.0))


def test_approximate_identity_examples():
    assert approximate_identity_defect(doubling(), 2) <= 1e-9
    assert approximate_identity_defect(corner(), 2) <= 1e-6
    single = system_from_mults(1.5, [[3]], [])
    assert approximate_identity_defect(single, 0) <= 1e-9


def test_unitization_examples():
    c = corner()
    assert unitization_norm(c, 0, c.levels[0].zero(), 1) == pytest.approx(1)
    assert unitization_norm(c, 0, c.levels[0].identity(), -1, probe=2) == pytest.approx(1)
    s = doubling()
    x = AlgebraElement(s.levels[0], [np.array([[1, 1], [0, 0]])])
    direct = element_norm(x + 0.5 * s.levels[0].identity()).value
    assert unitization_norm(s, 0, x, 0.5, probe=2) == pytest.approx(max(direct, 0.5), abs=1e-6)
    with pytest.raises(BadLevels):
        unitization_norm(c, 2, c.levels[2].zero(), 1, probe=1)


def test_group_system_of_examples():
    g = group_system_of(doubling())
    assert [x.scale for x in g.levels] == [(2,), (4,), (8,)]
    assert [f.matrix.tolist() for f in g.maps] == [[[2]], [[2]]]
    assert len(group_system_of(AlgebraDirectSystem(1.5, [], []))) == 0


def test_limit_positive_examples():
    g = GroupDirectSystem.from_matrices([[2, 2], [4]], [[[1, 1]]])
    assert limit_positive(g, 0, [1, 0]).positive_at == 0
    v = limit_positive(g, 0, [1, -1])
    assert v.kind == "PositiveAt" and v.positive_at == 1
    u = limit_positive(group_system_of(doubling()), 0, [-1])
    assert u.kind == "UnknownWithinHorizon" and u.caveat.horizon == 2


@st.composite
def systems(draw, levels=4, injective=False):
    sizes = [draw(st.lists(st.integers(1, 3), min_size=1, max_size=2))]
    ms = []
    for _ in range(levels - 1):
        src = sizes[-1]
        rank = draw(st.integers(1, 2))
        m = np.array([[draw(st.integers(0, 2)) for _ in src] for _ in range(rank)], dtype=np.int64)
        if injective:
            for j in range(len(src)):
                if not m[:, j].any():
                    m[draw(st.integers(0, rank - 1)), j] = 1
        tgt = [int(m[k] @ np.array(src)) + draw(st.integers(0, 1)) for k in range(rank)]
        tgt = [max(t, 1) for t in tgt]
        sizes.append(tgt)
        ms.append(m.tolist())
    return system_from_mults(1.5, sizes, ms)


@given(systems(), st.data())
def test_telescope_coherence(s, data):
    idx = sorted(data.draw(st.sets(st.integers(0, s.horizon), min_size=1)))
    assert group_system_of(telescope(s, idx)) == telescope_groups(group_system_of(s), idx)


@given(systems())
def test_injectivize_idempotent_and_keeps_k0(s):
    t = injectivize(s)
    assert injectivize(t).same_as(t)
    for h in t.maps:
        assert np.all(h.multiplicity().sum(axis=0) > 0)
    gs, gt = group_system_of(s), group_system_of(t)
    L = s.horizon
    for m in range(L + 1):
        alive = [j for j in range(len(s.levels[m])) if gs.connecting(m, L)[:, j].any()]
        assert np.array_equal(gt.connecting(m, L), gs.connecting(m, L)[:, alive])


@given(systems(levels=3, injective=True), st.integers(0, 2 ** 16))
def test_unitization_level_independent(s, seed):
    rng = np.random.default_rng(seed)
    a = s.levels[0].random_element(rng)
    lam = complex(rng.normal(), rng.normal())
    values = [unitization_norm(s, 0, a, lam, probe=l) for l in range(s.horizon + 1)]
    assert max(values) - min(values) <= 1e-6


@given(systems(levels=4, injective=True))
def test_approximate_identity_random(s):
    assert approximate_identity_defect(s, s.horizon, samples=8) <= 1e-6
