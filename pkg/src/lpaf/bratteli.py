"""Finite truncations of spatial L^p AF direct systems and their K_0 shadows.

The limit algebra is never built.  A system stores levels ``A_0 .. A_L`` and
connecting maps ``A_i -> A_{i+1}``; anything said about the limit is decided
at the stored horizon ``L`` and tagged with a :class:`TruncationCaveat`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .algebra import AlgebraElement, SsfdAlgebra, element_norm
from .errors import BadIndices, BadLevels, ExponentMismatch, ShapeMismatch
from .homs import (
    SpatialHom,
    amplify,
    apply_hom,
    compose_homs,
    direct_sum_homs,
    identity_hom,
    restrict_hom,
)
from .ktheory import GroupElement, PositiveContractiveMap, ScaledZGroup, k0_of_algebra, k0_of_hom
from .pnorm import PExponent, as_exponent


@dataclass(frozen=True)
class TruncationCaveat:
    horizon: int
    note: str = "relative-to-horizon"

    def to_json(self) -> dict:
        return {"horizon": self.horizon, "note": self.note}


@dataclass(frozen=True, eq=False)
class AlgebraDirectSystem:
    p: PExponent
    levels: tuple[SsfdAlgebra, ...]
    maps: tuple[SpatialHom, ...]
    caveat: TruncationCaveat | None = None

    def __post_init__(self):
        object.__setattr__(self, "p", as_exponent(self.p))
        object.__setattr__(self, "levels", tuple(self.levels))
        object.__setattr__(self, "maps", tuple(self.maps))
        if self.levels and len(self.maps) != len(self.levels) - 1:
            raise ShapeMismatch(f"{len(self.levels)} levels need {len(self.levels) - 1} maps")
        if not self.levels and self.maps:
            raise ShapeMismatch("an empty system has no maps")
        for lvl in self.levels:
            if lvl.p != self.p:
                raise ExponentMismatch(f"level {lvl!r} is not over p={self.p.p}")
        for i, h in enumerate(self.maps):
            if h.source != self.levels[i] or h.target != self.levels[i + 1]:
                raise ShapeMismatch(f"map {i} does not run from level {i} to level {i + 1}")

    @property
    def horizon(self) -> int:
        return len(self.levels) - 1

    def __len__(self) -> int:
        return len(self.levels)

    @cached_property
    def _from_level(self) -> dict:
        return {}

    def connecting(self, m: int, n: int) -> SpatialHom:
        """``phi_{n,m}: A_m -> A_n`` for ``m <= n``."""
        if not 0 <= m <= n <= self.horizon:
            raise BadLevels(f"need 0 <= {m} <= {n} <= {self.horizon}")
        cache = self._from_level
        if (m, n) not in cache:
            h = identity_hom(self.levels[m])
            for i in range(m, n):
                h = compose_homs(self.maps[i], h)
            cache[(m, n)] = h
        return cache[(m, n)]

    def same_as(self, other: "AlgebraDirectSystem") -> bool:
        from .homs import homs_agree

        return (
            self.p == other.p
            and self.levels == other.levels
            and all(homs_agree(a, b) for a, b in zip(self.maps, other.maps))
        )


@dataclass(frozen=True, eq=False)
class GroupDirectSystem:
    levels: tuple[ScaledZGroup, ...]
    maps: tuple[PositiveContractiveMap, ...]

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        object.__setattr__(self, "maps", tuple(self.maps))
        if self.levels and len(self.maps) != len(self.levels) - 1:
            raise ShapeMismatch(f"{len(self.levels)} levels need {len(self.levels) - 1} maps")
        for i, f in enumerate(self.maps):
            if f.source != self.levels[i] or f.target != self.levels[i + 1]:
                raise ShapeMismatch(f"group map {i} does not run from level {i} to level {i + 1}")

    @classmethod
    def from_matrices(cls, scales: Sequence[Sequence[int]], matrices: Sequence) -> "GroupDirectSystem":
        levels = [ScaledZGroup(s) for s in scales]
        maps = [PositiveContractiveMap(levels[i], levels[i + 1], m) for i, m in enumerate(matrices)]
        return cls(levels, maps)

    @property
    def horizon(self) -> int:
        return len(self.levels) - 1

    def __len__(self) -> int:
        return len(self.levels)

    def connecting(self, m: int, n: int) -> np.ndarray:
        """Integer matrix of ``g_{n,m}``."""
        if not 0 <= m <= n <= self.horizon:
            raise BadLevels(f"need 0 <= {m} <= {n} <= {self.horizon}")
        out = np.eye(self.levels[m].rank, dtype=np.int64)
        for i in range(m, n):
            out = self.maps[i].matrix @ out
        return out

    def __eq__(self, other):
        return (
            isinstance(other, GroupDirectSystem)
            and self.levels == other.levels
            and all(a == b for a, b in zip(self.maps, other.maps))
        )

    def to_json(self) -> dict:
        return {
            "levels": [g.to_json() for g in self.levels],
            "maps": [{"mult": f.matrix.tolist()} for f in self.maps],
        }


def _check_indices(indices: Sequence[int], horizon: int) -> list[int]:
    indices = [int(i) for i in indices]
    if not indices or any(b <= a for a, b in zip(indices, indices[1:])):
        raise BadIndices(f"indices {indices} must be nonempty and strictly increasing")
    if indices[0] < 0 or indices[-1] > horizon:
        raise BadIndices(f"indices {indices} fall outside 0..{horizon}")
    return indices


def telescope(s: AlgebraDirectSystem, indices: Sequence[int]) -> AlgebraDirectSystem:
    idx = _check_indices(indices, s.horizon)
    maps = [s.connecting(a, b) for a, b in zip(idx, idx[1:])]
    return AlgebraDirectSystem(s.p, [s.levels[i] for i in idx], maps, s.caveat)


def telescope_groups(g: GroupDirectSystem, indices: Sequence[int]) -> GroupDirectSystem:
    idx = _check_indices(indices, g.horizon)
    levels = [g.levels[i] for i in idx]
    maps = [PositiveContractiveMap(g.levels[a], g.levels[b], g.connecting(a, b))
            for a, b in zip(idx, idx[1:])]
    return GroupDirectSystem(levels, maps)


def injectivize(s: AlgebraDirectSystem) -> AlgebraDirectSystem:
    """Drop, at every level, the summands killed on the way to the horizon.

    The kernel of ``A_m -> A_L`` is the sum of the summands whose column in
    the composite multiplicity matrix vanishes; kernels only grow along the
    system, so the last level decides.
    """
    if not s.levels:
        return s
    gs = group_system_of(s)
    L = s.horizon
    alive = [
        [j for j in range(len(s.levels[m])) if np.any(gs.connecting(m, L)[:, j])]
        for m in range(L + 1)
    ]
    levels = [SsfdAlgebra(s.p, [s.levels[m].summands[j] for j in alive[m]]) for m in range(L + 1)]
    maps = [restrict_hom(h, alive[i], alive[i + 1]) for i, h in enumerate(s.maps)]
    return AlgebraDirectSystem(s.p, levels, maps, TruncationCaveat(L))


def matrix_amplify_system(s: AlgebraDirectSystem, r: int) -> AlgebraDirectSystem:
    return AlgebraDirectSystem(
        s.p, [a.amplified(r) for a in s.levels], [amplify(h, r) for h in s.maps], s.caveat
    )


def dsum_systems(s1: AlgebraDirectSystem, s2: AlgebraDirectSystem) -> AlgebraDirectSystem:
    if not s2.levels:
        return s1
    if not s1.levels:
        return s2
    if s1.p != s2.p:
        raise ExponentMismatch(f"cannot add systems over p={s1.p.p} and p={s2.p.p}")
    if len(s1) != len(s2):
        raise BadLevels(f"systems have {len(s1)} and {len(s2)} levels")
    levels = [SsfdAlgebra(s1.p, a.summands + b.summands) for a, b in zip(s1.levels, s2.levels)]
    maps = [direct_sum_homs(a, b) for a, b in zip(s1.maps, s2.maps)]
    return AlgebraDirectSystem(s1.p, levels, maps)


def unit_image(s: AlgebraDirectSystem, k: int, n: int) -> AlgebraElement:
    """Image in ``A_n`` of the identity of ``A_k``."""
    return apply_hom(s.connecting(k, n), s.levels[k].identity())


def approximate_identity_defect(s: AlgebraDirectSystem, n: int, samples: int = 32,
                                seed: int = 0, **opts) -> float:
    """``max_lambda ||sum_k lambda_k (e_k - e_{k-1})|| - max_k |lambda_k|`` at level ``n``.

    ``e_k`` is the image in ``A_n`` of the unit of ``A_k`` for ``k = 0..n``;
    the term before ``e_0`` is zero.
    """
    if not 0 <= n <= s.horizon:
        raise BadLevels(f"level {n} outside 0..{s.horizon}")
    rng = np.random.default_rng(seed)
    units = [unit_image(s, k, n) for k in range(n + 1)]
    diffs = [units[0]] + [units[k] - units[k - 1] for k in range(1, n + 1)]
    worst = 0.0
    for t in range(samples):
        if t == 0:
            lam = np.ones(n + 1, dtype=np.complex128)
        else:
            lam = (rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1))
            lam *= rng.uniform(0.1, 2.0) / np.max(np.abs(lam))
        x = s.levels[n].zero()
        for coef, dk in zip(lam, diffs):
            x = x + coef * dk
        worst = max(worst, element_norm(x, **opts).value - float(np.max(np.abs(lam))))
    return max(worst, 0.0)


def unitization_norm(s: AlgebraDirectSystem, n: int, a: AlgebraElement, lam: complex,
                     probe: int | None = None, **opts) -> float:
    """``||a + lam 1||`` in the unitization, computed at probe level ``probe``.

    Evaluates ``max(||phi(a) + lam phi(1_{A_n})||, |lam|)`` with ``phi`` the
    connecting map into the probe level.
    """
    probe = n if probe is None else probe
    if not 0 <= n <= probe <= s.horizon:
        raise BadLevels(f"need 0 <= {n} <= {probe} <= {s.horizon}")
    if a.algebra.summands != s.levels[n].summands:
        raise ShapeMismatch("element does not live at the stated level")
    h = s.connecting(n, probe)
    img = apply_hom(h, a) + lam * apply_hom(h, s.levels[n].identity())
    return max(element_norm(img, **opts).value, abs(lam))


def group_system_of(s: AlgebraDirectSystem) -> GroupDirectSystem:
    return GroupDirectSystem([k0_of_algebra(a) for a in s.levels], [k0_of_hom(h) for h in s.maps])


@dataclass(frozen=True)
class PositivityVerdict:
    positive_at: int | None
    caveat: TruncationCaveat = field(default_factory=lambda: TruncationCaveat(0))

    @property
    def kind(self) -> str:
        return "UnknownWithinHorizon" if self.positive_at is None else "PositiveAt"

    def to_json(self) -> dict:
        return {"verdict": self.kind, "level": self.positive_at, "caveat": self.caveat.to_json()}


def limit_positive(g: GroupDirectSystem, m: int, x: GroupElement | Sequence[int]) -> PositivityVerdict:
    """Least ``n >= m`` at which the image of ``x`` is in the cone, within the horizon."""
    if not 0 <= m <= g.horizon:
        raise BadLevels(f"level {m} outside 0..{g.horizon}")
    coords = np.asarray(getattr(x, "coords", x), dtype=np.int64)
    if coords.shape != (g.levels[m].rank,):
        raise ShapeMismatch("element does not live at the stated level")
    caveat = TruncationCaveat(g.horizon)
    for n in range(m, g.horizon + 1):
        if np.all(g.connecting(m, n) @ coords >= 0):
            return PositivityVerdict(n, caveat)
    return PositivityVerdict(None, caveat)
