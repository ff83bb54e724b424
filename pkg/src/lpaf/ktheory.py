"""Simplicial scaled ordered groups and the K_0 functor on SSFD algebras.

``K_0(M_{d_1} + ... + M_{d_N})`` is ``Z^N`` with the coordinatewise cone
and scale ``[0, d]``; a spatial hom induces its multiplicity matrix.  K_1 of
every algebra handled here is zero and is reported as a constant.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import SsfdAlgebra
from .errors import NotIdempotent, PreconditionViolated, ShapeMismatch

K1 = 0
RANK_TOL = 1e-6


@dataclass(frozen=True)
class ScaledZGroup:
    """``(Z^N, Z^N_+, [0, d])``."""

    scale: tuple[int, ...]

    def __init__(self, scale: Sequence[int] = ()):
        scale = tuple(int(d) for d in scale)
        if any(d < 1 for d in scale):
            raise ValueError(f"scale entries must be positive, got {scale}")
        object.__setattr__(self, "scale", scale)

    @property
    def rank(self) -> int:
        return len(self.scale)

    def in_cone(self, g) -> bool:
        return bool(np.all(np.asarray(g) >= 0))

    def in_scale(self, g) -> bool:
        g = np.asarray(g)
        return bool(np.all(g >= 0) and np.all(g <= np.asarray(self.scale)))

    def element(self, coords) -> "GroupElement":
        return GroupElement(self, coords)

    def to_json(self) -> list[int]:
        return list(self.scale)


@dataclass(frozen=True)
class GroupElement:
    group: ScaledZGroup
    coords: tuple[int, ...]

    def __init__(self, group: ScaledZGroup, coords):
        coords = tuple(int(c) for c in coords)
        if len(coords) != group.rank:
            raise ShapeMismatch(f"{len(coords)} coordinates for a rank {group.rank} group")
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "coords", coords)

    def array(self) -> np.ndarray:
        return np.array(self.coords, dtype=np.int64)


@dataclass(frozen=True)
class PositiveContractiveMap:
    source: ScaledZGroup
    target: ScaledZGroup
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.int64).reshape(self.target.rank, self.source.rank)
        if np.any(m < 0):
            raise ValueError("a positive map must have nonnegative entries")
        if self.source.rank and np.any(m @ np.array(self.source.scale) > np.array(self.target.scale)):
            raise ValueError(
                f"map {m.tolist()} is not contractive from {self.source.scale} to {self.target.scale}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __eq__(self, other):
        return (
            isinstance(other, PositiveContractiveMap)
            and self.source == other.source
            and self.target == other.target
            and np.array_equal(self.matrix, other.matrix)
        )

    def __hash__(self):
        return hash((self.source, self.target, self.matrix.tobytes()))

    def __call__(self, g: GroupElement) -> GroupElement:
        return GroupElement(self.target, self.matrix @ g.array())

    def __matmul__(self, other: "PositiveContractiveMap") -> "PositiveContractiveMap":
        if other.target != self.source:
            raise ShapeMismatch("cannot compose maps with mismatched groups")
        return PositiveContractiveMap(other.source, self.target, self.matrix @ other.matrix)

    @classmethod
    def identity(cls, g: ScaledZGroup) -> "PositiveContractiveMap":
        return cls(g, g, np.eye(g.rank, dtype=np.int64))


def k0_of_algebra(a: SsfdAlgebra) -> ScaledZGroup:
    return ScaledZGroup(a.summands)


def k0_report(a: SsfdAlgebra) -> dict:
    return {"k0": {"rank": len(a), "scale": list(a.summands)}, "k1": K1}


def k0_of_hom(h) -> PositiveContractiveMap:
    return PositiveContractiveMap(k0_of_algebra(h.source), k0_of_algebra(h.target), h.multiplicity())


def k0_class_of_idempotent(blocks, algebra: SsfdAlgebra, n: int = 1,
                           tol: float = 1e-9) -> GroupElement:
    """Rank vector of an idempotent of ``M_n(A)``; ``blocks[k]`` is ``(n d_k)``-square.

    Accepts an :class:`~lpaf.algebra.AlgebraElement` in place of the block list.
    """
    blocks = getattr(blocks, "blocks", blocks)
    if len(blocks) != len(algebra):
        raise ShapeMismatch(f"{len(blocks)} blocks for {len(algebra)} summands")
    ranks = []
    for k, (e, d) in enumerate(zip(blocks, algebra.summands)):
        e = np.asarray(e, dtype=np.complex128)
        if e.shape != (n * d, n * d):
            raise ShapeMismatch(f"block {k} has shape {e.shape}, expected {(n * d, n * d)}")
        if np.any(np.abs(e @ e - e) > tol):
            raise NotIdempotent(f"block {k} is not idempotent")
        tr = float(np.trace(e).real)
        r = int(round(tr))
        if abs(tr - r) > RANK_TOL:
            raise NotIdempotent(f"block {k} has non-integral trace {tr}")
        ranks.append(r)
    return GroupElement(k0_of_algebra(algebra), ranks)


def interpolant(eta1: GroupElement, eta2: GroupElement, mu1: GroupElement,
                mu2: GroupElement) -> GroupElement:
    """Some ``lam`` with ``eta_j <= lam <= mu_k``: the componentwise max of the etas."""
    e1, e2, m1, m2 = (x.array() for x in (eta1, eta2, mu1, mu2))
    for e in (e1, e2):
        for m in (m1, m2):
            if np.any(e > m):
                raise PreconditionViolated("need eta_j <= mu_k for all j, k")
    return GroupElement(eta1.group, np.maximum(e1, e2))


def scale_decomposition(group: ScaledZGroup, eta) -> list[np.ndarray]:
    """Greedy ``eta = mu_1 + ... + mu_n`` with every ``mu_i`` in ``[0, d]``."""
    eta = np.array(eta, dtype=np.int64)
    d = np.array(group.scale, dtype=np.int64)
    parts = []
    while np.any(eta > 0):
        mu = np.minimum(eta, d)
        parts.append(mu)
        eta = eta - mu
    return parts or [np.zeros(group.rank, dtype=np.int64)]


def riesz_report(group: ScaledZGroup, samples: int = 100, seed: int = 0) -> dict:
    """Check the seven scaled Riesz group axioms on pseudo-random elements."""
    rng = np.random.default_rng(seed)
    n = group.rank
    d = np.array(group.scale, dtype=np.int64)
    failures: dict[str, list] = {k: [] for k in (
        "generation", "properness", "unperforation", "interpolation",
        "scale_generation", "heredity", "upward_directed")}
    hi = int(d.max()) * 3 + 3 if n else 3

    def rand(lo=-hi, top=hi):
        return rng.integers(lo, top + 1, size=n)

    def in_scale(g):
        return group.in_scale(g)

    for _ in range(samples if n else 0):
        g = rand()
        pos, neg = np.maximum(g, 0), np.maximum(-g, 0)
        if not (group.in_cone(pos) and group.in_cone(neg) and np.array_equal(pos - neg, g)):
            failures["generation"].append(g.tolist())

        if group.in_cone(g) and group.in_cone(-g) and np.any(g != 0):
            failures["properness"].append(g.tolist())

        k = int(rng.integers(1, 6))
        if group.in_cone(k * g) and not group.in_cone(g):
            failures["unperforation"].append([k, g.tolist()])

        lam0 = rand()
        etas = [lam0 - rng.integers(0, 4, size=n) for _ in range(2)]
        mus = [lam0 + rng.integers(0, 4, size=n) for _ in range(2)]
        lam = interpolant(*(GroupElement(group, x) for x in etas + mus)).array()
        if not all(np.all(e <= lam) for e in etas) or not all(np.all(lam <= m) for m in mus):
            failures["interpolation"].append([x.tolist() for x in etas + mus])

        eta = rng.integers(0, hi + 1, size=n)
        parts = scale_decomposition(group, eta)
        if not (all(in_scale(mu) for mu in parts) and np.array_equal(sum(parts), eta)):
            failures["scale_generation"].append(eta.tolist())

        mu = rng.integers(0, d + 1)
        sub = rng.integers(0, mu + 1)
        if not in_scale(sub):
            failures["heredity"].append([sub.tolist(), mu.tolist()])

        mu1, mu2 = rng.integers(0, d + 1), rng.integers(0, d + 1)
        top = np.maximum(mu1, mu2)
        if not (in_scale(top) and np.all(mu1 <= top) and np.all(mu2 <= top)):
            failures["upward_directed"].append([mu1.tolist(), mu2.tolist()])

    return {
        "rank": n,
        "scale": list(group.scale),
        "samples": samples,
        "axioms": {k: not v for k, v in failures.items()},
        "failures": {k: v for k, v in failures.items() if v},
        "passed": not any(failures.values()),
    }
