"""Finite-stage Elliott machinery.

Group maps are realised as block diagonal homs; intertwining ladders between
two group direct systems are found by exhaustive depth-bounded search; a
ladder is lifted to algebra-level homs whose composites equal the connecting
maps exactly, after correcting each rung by an isometric similarity.

A ladder of depth ``K`` consists of ``r_0 .. r_{K-1}`` and the ``K - 1``
maps ``s_k`` between them::

    G_{m_0} --> G_{m_1} --> ... --> G_{m_{K-1}}
       r_0  \\ s_0   r_1  \\ ...        r_{K-1}
    H_{n_0} --> H_{n_1} --> ... --> H_{n_{K-1}}

with ``s_k r_k = g_{m_{k+1}, m_k}`` and ``r_{k+1} s_k = h_{n_{k+1}, n_k}``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .algebra import SsfdAlgebra
from .bratteli import AlgebraDirectSystem, GroupDirectSystem, group_system_of
from .errors import BudgetExhausted, EndpointMismatch, IllegalExponent, LadderMismatch
from .homs import (
    BlockDiagonalHom,
    SpatialHom,
    align_spatial,
    apply_hom_level,
    block_hom_from_multiplicity,
    compose_homs,
    homs_agree,
)
from .ktheory import PositiveContractiveMap, k0_of_algebra
from .pnorm import as_exponent, matrix_level_norm

DEFAULT_DEPTH = 4
DEFAULT_BUDGET = 10**6


def realize_hom(f: PositiveContractiveMap, a: SsfdAlgebra, b: SsfdAlgebra) -> BlockDiagonalHom:
    if k0_of_algebra(a) != f.source or k0_of_algebra(b) != f.target:
        raise EndpointMismatch(
            f"map runs {f.source.scale} -> {f.target.scale}, algebras are {a.summands} -> {b.summands}"
        )
    return block_hom_from_multiplicity(f.matrix, a, b)


def realize_system(g: GroupDirectSystem, p) -> AlgebraDirectSystem:
    p = as_exponent(p)
    if not p.classification_legal:
        raise IllegalExponent("classification requires p != 2")
    levels = [SsfdAlgebra(p, grp.scale) for grp in g.levels]
    maps = [SpatialHom.from_block(realize_hom(f, levels[i], levels[i + 1])) for i, f in enumerate(g.maps)]
    return AlgebraDirectSystem(p, levels, maps)


# -- search -----------------------------------------------------------------


def _row_solutions(a: np.ndarray | None, b: np.ndarray | None, weights: Sequence[int],
                   cap: int) -> list[tuple[int, ...]]:
    """Nonnegative integer rows ``x`` with ``x @ a == b`` and ``x . weights <= cap``.

    ``a is None`` drops the linear constraint.  Solutions come out in
    lexicographic order.
    """
    n = len(weights)
    out: list[tuple[int, ...]] = []
    if n == 0:
        return [()] if b is None or not np.any(np.asarray(b)) else []
    x = [0] * n
    if a is not None:
        a = np.asarray(a, dtype=np.int64).reshape(n, -1)
        b = np.asarray(b, dtype=np.int64)
        # reachable[j]: columns some row >= j can still contribute to
        reach = np.zeros((n + 1, a.shape[1]), dtype=bool)
        for j in range(n - 1, -1, -1):
            reach[j] = reach[j + 1] | (a[j] > 0)

    def rec(j: int, room: int, rest) -> None:
        if a is not None and np.any((rest > 0) & ~reach[j]):
            return
        if j == n:
            out.append(tuple(x))
            return
        top = room // weights[j]
        if a is not None:
            row = a[j]
            pos = row > 0
            if np.any(pos):
                top = min(top, int(np.min(rest[pos] // row[pos])))
        for v in range(top + 1):
            x[j] = v
            rec(j + 1, room - v * weights[j], None if a is None else rest - v * a[j])
        x[j] = 0

    if a is not None and np.any(b < 0):
        return out
    rec(0, cap, None if a is None else b.copy())
    return out


def _candidates(constraint: np.ndarray | None, rhs: np.ndarray | None,
                source_scale: Sequence[int], target_scale: Sequence[int]) -> Iterator[np.ndarray]:
    """Positive contractive matrices ``X`` (target x source) with ``X @ constraint == rhs``."""
    rows = []
    for i, cap in enumerate(target_scale):
        sols = _row_solutions(constraint, None if rhs is None else rhs[i], source_scale, cap)
        if not sols:
            return
        rows.append(sols)
    for combo in itertools.product(*rows):
        yield np.array(combo, dtype=np.int64).reshape(len(target_scale), len(source_scale))


class _Budget:
    def __init__(self, budget: int):
        self.budget = budget
        self.nodes = 0

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExhausted(self.nodes - 1, self.budget)


@dataclass(frozen=True, eq=False)
class IntertwiningLadder:
    g_levels: tuple[int, ...]
    h_levels: tuple[int, ...]
    r: tuple[np.ndarray, ...]
    s: tuple[np.ndarray, ...]

    @property
    def depth(self) -> int:
        return len(self.r)

    def check(self, g: GroupDirectSystem, h: GroupDirectSystem) -> bool:
        """Re-verify every commutation and positivity/contractivity condition."""
        m, n = self.g_levels, self.h_levels
        if len(m) != self.depth or len(n) != self.depth or len(self.s) != self.depth - 1:
            return False
        if any(b <= a for a, b in zip(m, m[1:])) or any(b <= a for a, b in zip(n, n[1:])):
            return False
        try:
            for k in range(self.depth):
                PositiveContractiveMap(g.levels[m[k]], h.levels[n[k]], self.r[k])
            for k in range(self.depth - 1):
                PositiveContractiveMap(h.levels[n[k]], g.levels[m[k + 1]], self.s[k])
        except (ValueError, IndexError):
            return False
        for k in range(self.depth - 1):
            if not np.array_equal(self.s[k] @ self.r[k], g.connecting(m[k], m[k + 1])):
                return False
            if not np.array_equal(self.r[k + 1] @ self.s[k], h.connecting(n[k], n[k + 1])):
                return False
        return True

    def to_json(self) -> dict:
        return {
            "g_levels": list(self.g_levels),
            "h_levels": list(self.h_levels),
            "r": [x.tolist() for x in self.r],
            "s": [x.tolist() for x in self.s],
        }


@dataclass(frozen=True)
class SearchVerdict:
    ladder: IntertwiningLadder | None
    depth: int
    nodes: int

    @property
    def isomorphic(self) -> bool:
        return self.ladder is not None

    @property
    def kind(self) -> str:
        return "Isomorphic" if self.isomorphic else "NotWithinBound"

    def to_json(self) -> dict:
        out = {"verdict": self.kind, "depth": self.depth, "nodes_explored": self.nodes}
        if self.ladder is not None:
            out["ladder"] = self.ladder.to_json()
        return out


def find_intertwining(g: GroupDirectSystem, h: GroupDirectSystem, depth: int = DEFAULT_DEPTH,
                      budget: int = DEFAULT_BUDGET) -> SearchVerdict:
    """Lexicographically first ladder of the given depth, or exhaustion.

    Levels are tried smallest first; at each rung the candidate maps are the
    finitely many positive contractive matrices satisfying the commutation
    constraint with the previous rung, enumerated row by row.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    counter = _Budget(budget)
    LG, LH = g.horizon, h.horizon
    ms: list[int] = []
    ns: list[int] = []
    rs: list[np.ndarray] = []
    ss: list[np.ndarray] = []

    def place_r(k: int) -> bool:
        lo = ns[-1] + 1 if ns else 0
        for n_k in range(lo, LH - (depth - 1 - k) + 1):
            src, tgt = g.levels[ms[k]], h.levels[n_k]
            if k == 0:
                cands = _candidates(None, None, src.scale, tgt.scale)
            else:
                cands = _candidates(ss[-1], h.connecting(ns[-1], n_k), src.scale, tgt.scale)
            ns.append(n_k)
            for r in cands:
                counter.tick()
                rs.append(r)
                if k == depth - 1 or place_s(k):
                    return True
                rs.pop()
            ns.pop()
        return False

    def place_s(k: int) -> bool:
        for m_next in range(ms[k] + 1, LG - (depth - 2 - k) + 1):
            src, tgt = h.levels[ns[k]], g.levels[m_next]
            cands = _candidates(rs[k], g.connecting(ms[k], m_next), src.scale, tgt.scale)
            ms.append(m_next)
            for s in cands:
                counter.tick()
                ss.append(s)
                if place_r(k + 1):
                    return True
                ss.pop()
            ms.pop()
        return False

    for m0 in range(0, LG - (depth - 1) + 1):
        ms.append(m0)
        if place_r(0):
            ladder = IntertwiningLadder(tuple(ms), tuple(ns), tuple(rs), tuple(ss))
            return SearchVerdict(ladder, depth, counter.nodes)
        ms.pop()
    return SearchVerdict(None, depth, counter.nodes)


# -- lifting ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class IsoWitness:
    ladder: IntertwiningLadder
    phis: tuple[SpatialHom, ...]
    psis: tuple[SpatialHom, ...]

    def to_json(self) -> dict:
        from .io import spatial_hom_to_json

        return {
            "ladder": self.ladder.to_json(),
            "phi": [spatial_hom_to_json(h) for h in self.phis],
            "psi": [spatial_hom_to_json(h) for h in self.psis],
        }


def _check_ladder_against(ladder: IntertwiningLadder, a: AlgebraDirectSystem,
                          b: AlgebraDirectSystem) -> None:
    if a.p != b.p:
        raise LadderMismatch("systems are over different exponents")
    try:
        ok = ladder.check(group_system_of(a), group_system_of(b))
    except Exception as exc:  # bad level indices and the like
        raise LadderMismatch(str(exc)) from None
    if not ok:
        raise LadderMismatch("ladder does not commute with the K_0 shadows of the systems")


def ladder_to_algebra_iso(ladder: IntertwiningLadder, a: AlgebraDirectSystem,
                          b: AlgebraDirectSystem) -> IsoWitness:
    """Lift a ladder to spatial homs with exact composite identities."""
    _check_ladder_against(ladder, a, b)
    m, n = ladder.g_levels, ladder.h_levels
    phis = [SpatialHom.from_block(block_hom_from_multiplicity(ladder.r[0], a.levels[m[0]], b.levels[n[0]]))]
    psis: list[SpatialHom] = []
    for k in range(ladder.depth - 1):
        psi = SpatialHom.from_block(block_hom_from_multiplicity(ladder.s[k], b.levels[n[k]], a.levels[m[k + 1]]))
        u = align_spatial(compose_homs(psi, phis[k]), a.connecting(m[k], m[k + 1]))
        psis.append(psi.conjugated(u))
        phi = SpatialHom.from_block(block_hom_from_multiplicity(ladder.r[k + 1], a.levels[m[k + 1]], b.levels[n[k + 1]]))
        v = align_spatial(compose_homs(phi, psis[k]), b.connecting(n[k], n[k + 1]))
        phis.append(phi.conjugated(v))
    return IsoWitness(ladder, tuple(phis), tuple(psis))


def _phase_nonneg_sample(rng: np.random.Generator, size: int) -> np.ndarray:
    """``D1 |x| D2`` with random unimodular diagonals: complex, yet with an exactly computable norm."""
    mag = rng.uniform(0.0, 1.0, size=(size, size)) * (rng.uniform(size=(size, size)) < 0.8)
    d1 = np.exp(2j * np.pi * rng.uniform(size=size))
    d2 = np.exp(2j * np.pi * rng.uniform(size=size))
    return d1[:, None] * mag * d2[None, :]


def _norm_checks(h: SpatialHom, rng, samples: int, levels: Sequence[int], tol: float) -> list[dict]:
    out = []
    if np.any(~np.any(h.multiplicity() > 0, axis=0)):
        return out  # not injective: no isometry to check
    for n in levels:
        for _ in range(samples):
            blocks = [_phase_nonneg_sample(rng, n * c) for c in h.source.summands]
            before = matrix_level_norm(blocks, n, h.source)
            after = matrix_level_norm(apply_hom_level(h, blocks, n), n, h.target)
            if not (before.converged and after.converged):
                continue
            out.append({
                "level": n,
                "source_norm": before.value,
                "image_norm": after.value,
                "ok": abs(before.value - after.value) <= tol,
            })
    return out


def verify_witness(w: IsoWitness, a: AlgebraDirectSystem, b: AlgebraDirectSystem,
                   samples: int = 3, matrix_levels: Sequence[int] = (1, 2, 3),
                   seed: int = 0, tol: float = 1e-6) -> dict:
    """Audit a witness: exact composites, isometry on samples, K_0 functoriality."""
    lad = w.ladder
    m, n = lad.g_levels, lad.h_levels
    composites = []
    for k in range(lad.depth - 1):
        composites.append({
            "rung": k,
            "psi_phi_is_alpha": homs_agree(compose_homs(w.psis[k], w.phis[k]), a.connecting(m[k], m[k + 1])),
            "phi_psi_is_beta": homs_agree(compose_homs(w.phis[k + 1], w.psis[k]), b.connecting(n[k], n[k + 1])),
        })
    k0_ok = (
        all(np.array_equal(h.multiplicity(), r) for h, r in zip(w.phis, lad.r))
        and all(np.array_equal(h.multiplicity(), s) for h, s in zip(w.psis, lad.s))
        and lad.check(group_system_of(a), group_system_of(b))
    )
    rng = np.random.default_rng(seed)
    norms = []
    for h in list(w.phis) + list(w.psis):
        norms.extend(_norm_checks(h, rng, samples, matrix_levels, tol))
    comp_ok = all(c["psi_phi_is_alpha"] and c["phi_psi_is_beta"] for c in composites)
    norm_ok = all(c["ok"] for c in norms)
    return {
        "composites": composites,
        "composites_ok": comp_ok,
        "norm_checks": len(norms),
        "norm_failures": [c for c in norms if not c["ok"]],
        "norms_ok": norm_ok,
        "k0_ok": bool(k0_ok),
        "passed": bool(comp_ok and norm_ok and k0_ok),
    }


# -- one-sided ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class OneSidedResult:
    g_levels: tuple[int, ...]
    h_levels: tuple[int, ...]
    r: tuple[np.ndarray, ...]
    depth: int
    nodes: int
    complete: bool
    homs: tuple[SpatialHom, ...] = field(default=())

    @property
    def kind(self) -> str:
        return "Extended" if self.complete else "NotWithinBound"

    def to_json(self) -> dict:
        out = {"verdict": self.kind, "depth": self.depth, "nodes_explored": self.nodes}
        if self.complete:
            out["g_levels"] = list(self.g_levels)
            out["h_levels"] = list(self.h_levels)
            out["r"] = [x.tolist() for x in self.r]
        return out


def one_sided_extend(f0, m0: int, n0: int, g: GroupDirectSystem, h: GroupDirectSystem,
                     depth: int = DEFAULT_DEPTH, budget: int = DEFAULT_BUDGET) -> OneSidedResult:
    """Extend ``f0: G_{m0} -> H_{n0}`` to ``r_0 .. r_{depth-1}`` with
    ``r_{k+1} g_{m_{k+1}, m_k} = h_{n_{k+1}, n_k} r_k``."""
    f0 = np.asarray(getattr(f0, "matrix", f0), dtype=np.int64)
    try:
        PositiveContractiveMap(g.levels[m0], h.levels[n0], f0)
    except (ValueError, IndexError) as exc:
        raise EndpointMismatch(f"f0 does not run G_{m0} -> H_{n0}: {exc}") from None
    counter = _Budget(budget)
    LG, LH = g.horizon, h.horizon
    ms, ns, rs = [m0], [n0], [f0]

    def extend(k: int) -> bool:
        if k == depth - 1:
            return True
        left = depth - 2 - k
        for m_next in range(ms[k] + 1, LG - left + 1):
            for n_next in range(ns[k] + 1, LH - left + 1):
                gm = g.connecting(ms[k], m_next)
                rhs = h.connecting(ns[k], n_next) @ rs[k]
                for r in _candidates(gm, rhs, g.levels[m_next].scale, h.levels[n_next].scale):
                    counter.tick()
                    ms.append(m_next)
                    ns.append(n_next)
                    rs.append(r)
                    if extend(k + 1):
                        return True
                    ms.pop()
                    ns.pop()
                    rs.pop()
        return False

    ok = extend(0)
    if not ok:
        return OneSidedResult((), (), (), depth, counter.nodes, False)
    return OneSidedResult(tuple(ms), tuple(ns), tuple(rs), depth, counter.nodes, True)


def lift_one_sided(res: OneSidedResult, a: AlgebraDirectSystem, b: AlgebraDirectSystem) -> tuple[SpatialHom, ...]:
    """Spatial homs ``phi_k`` with ``phi_{k+1} alpha = beta phi_k`` exactly."""
    if not res.complete:
        raise LadderMismatch("nothing to lift from an incomplete extension")
    m, n = res.g_levels, res.h_levels
    phis = [SpatialHom.from_block(block_hom_from_multiplicity(res.r[0], a.levels[m[0]], b.levels[n[0]]))]
    for k in range(len(res.r) - 1):
        phi = SpatialHom.from_block(block_hom_from_multiplicity(res.r[k + 1], a.levels[m[k + 1]], b.levels[n[k + 1]]))
        u = align_spatial(compose_homs(phi, a.connecting(m[k], m[k + 1])),
                          compose_homs(b.connecting(n[k], n[k + 1]), phis[k]))
        phis.append(phi.conjugated(u))
    return tuple(phis)
