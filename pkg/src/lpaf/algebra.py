"""Spatial semisimple finite dimensional L^p operator algebras.

An algebra is the list of matrix sizes ``(d_1, ..., d_N)`` together with the
exponent; elements are tuples of square blocks, normed by the max over
summands.  Invertible isometries of ``l^p_d`` (``p != 2``) are the complex
permutation matrices, represented here symbolically so that products and
inverses stay exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import NonSquare, NotComplexPermutation, NotIdempotent, ShapeMismatch
from .pnorm import NormEstimate, PExponent, as_exponent, combine_max, operator_p_norm

IDEMPOTENT_TOL = 1e-9
PHASE_TOL = 1e-12
LAMBDA_GRID = 64


@dataclass(frozen=True)
class SsfdAlgebra:
    p: PExponent
    summands: tuple[int, ...]

    def __init__(self, p, summands: Iterable[int] = ()):
        summands = tuple(int(d) for d in summands)
        if any(d < 1 for d in summands):
            raise ValueError(f"summand sizes must be positive, got {summands}")
        object.__setattr__(self, "p", as_exponent(p))
        object.__setattr__(self, "summands", summands)

    def __len__(self) -> int:
        return len(self.summands)

    def __repr__(self) -> str:
        inner = " + ".join(f"M_{d}" for d in self.summands) or "0"
        return f"SsfdAlgebra({inner}, p={self.p.p:g})"

    def identity(self) -> "AlgebraElement":
        return AlgebraElement(self, [np.eye(d, dtype=np.complex128) for d in self.summands])

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, [np.zeros((d, d), dtype=np.complex128) for d in self.summands])

    def summand_unit(self, j: int) -> "AlgebraElement":
        blocks = [np.zeros((d, d), dtype=np.complex128) for d in self.summands]
        blocks[j] = np.eye(self.summands[j], dtype=np.complex128)
        return AlgebraElement(self, blocks)

    def matrix_unit(self, j: int, row: int, col: int) -> "AlgebraElement":
        blocks = [np.zeros((d, d), dtype=np.complex128) for d in self.summands]
        blocks[j][row, col] = 1.0
        return AlgebraElement(self, blocks)

    def matrix_units(self):
        """Yield ``(j, row, col, e)`` for the standard basis of matrix units."""
        for j, d in enumerate(self.summands):
            for row in range(d):
                for col in range(d):
                    yield j, row, col, self.matrix_unit(j, row, col)

    def amplified(self, r: int) -> "SsfdAlgebra":
        return SsfdAlgebra(self.p, [r * d for d in self.summands])

    def random_element(self, rng: np.random.Generator, complex_entries: bool = True):
        blocks = []
        for d in self.summands:
            b = rng.normal(size=(d, d))
            if complex_entries:
                b = b + 1j * rng.normal(size=(d, d))
            blocks.append(b)
        return AlgebraElement(self, blocks)


class AlgebraElement:
    """An element of an :class:`SsfdAlgebra`, one square block per summand."""

    __slots__ = ("algebra", "blocks")

    def __init__(self, algebra: SsfdAlgebra, blocks: Sequence):
        blocks = tuple(np.array(b, dtype=np.complex128) for b in blocks)
        if len(blocks) != len(algebra.summands):
            raise ShapeMismatch(f"{len(blocks)} blocks for {len(algebra.summands)} summands")
        for k, (b, d) in enumerate(zip(blocks, algebra.summands)):
            if b.shape != (d, d):
                raise ShapeMismatch(f"block {k} has shape {b.shape}, expected {(d, d)}")
        self.algebra = algebra
        self.blocks = blocks

    def _check(self, other: "AlgebraElement") -> None:
        if other.algebra.summands != self.algebra.summands:
            raise ShapeMismatch("elements live in different algebras")

    def __add__(self, other):
        self._check(other)
        return AlgebraElement(self.algebra, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement(self.algebra, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return AlgebraElement(self.algebra, [-a for a in self.blocks])

    def __mul__(self, scalar):
        return AlgebraElement(self.algebra, [scalar * a for a in self.blocks])

    __rmul__ = __mul__

    def __matmul__(self, other):
        self._check(other)
        return AlgebraElement(self.algebra, [a @ b for a, b in zip(self.blocks, other.blocks)])

    def allclose(self, other: "AlgebraElement", atol: float = 1e-12) -> bool:
        if other.algebra.summands != self.algebra.summands:
            return False
        return all(np.allclose(a, b, rtol=0, atol=atol) for a, b in zip(self.blocks, other.blocks))

    def __repr__(self) -> str:
        return f"AlgebraElement({self.algebra!r}, {[b.tolist() for b in self.blocks]})"


def element_norm(a: AlgebraElement, **opts) -> NormEstimate:
    return combine_max([operator_p_norm(b, a.algebra.p, **opts) for b in a.blocks])


def _square(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonSquare(f"expected a square matrix, got shape {a.shape}")
    return a


def is_idempotent(e, tol: float = IDEMPOTENT_TOL) -> bool:
    e = _square(e)
    return bool(np.all(np.abs(e @ e - e) <= tol))


def is_hermitian_idempotent(a, tol: float = IDEMPOTENT_TOL) -> bool:
    """Structural test: diagonal with every diagonal entry in {0, 1}."""
    a = _square(a)
    off = a - np.diag(np.diag(a))
    if np.any(np.abs(off) > tol):
        return False
    diag = np.diag(a)
    return bool(np.all(np.minimum(np.abs(diag), np.abs(diag - 1)) <= tol))


def element_is_hermitian_idempotent(a: AlgebraElement, tol: float = IDEMPOTENT_TOL) -> bool:
    return all(is_hermitian_idempotent(b, tol) for b in a.blocks)


def hermitian_defect(e, p, lambda_grid: int = LAMBDA_GRID, **opts) -> float:
    """``max_lambda ||exp(i lambda e)||_p - 1`` over an equispaced grid.

    Uses ``exp(i lambda e) = (1 - e) + e^{i lambda} e``, valid for
    idempotents.  The grid covers one period, ``lambda_j = -pi + 2 pi j / n``.
    """
    e = _square(e)
    if not is_idempotent(e):
        raise NotIdempotent("hermitian_defect needs an idempotent")
    one = np.eye(e.shape[0], dtype=np.complex128)
    worst = 0.0
    for lam in -np.pi + 2 * np.pi * np.arange(lambda_grid) / lambda_grid:
        u = (one - e) + np.exp(1j * lam) * e
        worst = max(worst, operator_p_norm(u, p, **opts).value - 1.0)
    return max(worst, 0.0)


def beta_map(e, lambda1: complex, lambda2: complex) -> np.ndarray:
    """``lambda1 e + lambda2 (1 - e)``."""
    e = _square(e)
    if not is_idempotent(e):
        raise NotIdempotent("beta_map needs an idempotent")
    return lambda1 * e + lambda2 * (np.eye(e.shape[0]) - e)


@dataclass(frozen=True)
class ComplexPermutation:
    """``s = sum_j phases[j] e_{sigma[j], j}`` with 0-based ``sigma``."""

    sigma: tuple[int, ...]
    phases: tuple[complex, ...]

    def __post_init__(self):
        sigma = tuple(int(i) for i in self.sigma)
        phases = tuple(complex(z) for z in self.phases)
        if sorted(sigma) != list(range(len(sigma))):
            raise NotComplexPermutation(f"{sigma} is not a permutation")
        if len(phases) != len(sigma):
            raise NotComplexPermutation("one phase per column required")
        if any(abs(abs(z) - 1.0) > PHASE_TOL for z in phases):
            raise NotComplexPermutation("phases must have modulus one")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "phases", phases)

    @classmethod
    def identity(cls, d: int) -> "ComplexPermutation":
        return cls(tuple(range(d)), (1.0,) * d)

    @classmethod
    def from_permutation(cls, sigma: Sequence[int]) -> "ComplexPermutation":
        return cls(tuple(sigma), (1.0,) * len(sigma))

    @property
    def size(self) -> int:
        return len(self.sigma)

    def matrix(self) -> np.ndarray:
        s = np.zeros((self.size, self.size), dtype=np.complex128)
        s[list(self.sigma), list(range(self.size))] = self.phases
        return s

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.complex128)
        out = np.empty_like(x)
        out[list(self.sigma)] = np.asarray(self.phases) * x
        return out

    def __matmul__(self, other: "ComplexPermutation") -> "ComplexPermutation":
        if other.size != self.size:
            raise ShapeMismatch("complex permutations of different sizes")
        sigma = tuple(self.sigma[t] for t in other.sigma)
        phases = tuple(self.phases[t] * lam for t, lam in zip(other.sigma, other.phases))
        return ComplexPermutation(sigma, phases)

    def inverse(self) -> "ComplexPermutation":
        sigma = [0] * self.size
        phases = [1.0 + 0j] * self.size
        for j, (i, lam) in enumerate(zip(self.sigma, self.phases)):
            sigma[i] = j
            phases[i] = lam.conjugate()
        return ComplexPermutation(tuple(sigma), tuple(phases))

    def conjugate_matrix(self, a) -> np.ndarray:
        """``s a s^{-1}`` without forming dense products."""
        a = np.asarray(a, dtype=np.complex128)
        lam = np.asarray(self.phases)
        out = np.empty_like(a)
        idx = np.asarray(self.sigma)
        out[np.ix_(idx, idx)] = lam[:, None] * a * lam.conj()[None, :]
        return out

    def is_identity(self) -> bool:
        return self.sigma == tuple(range(self.size)) and all(z == 1 for z in self.phases)

    def to_json(self) -> dict:
        return {
            "perm": [i + 1 for i in self.sigma],
            "phases": [[z.real, z.imag] for z in self.phases],
        }


def kron_identity(s: ComplexPermutation, r: int) -> ComplexPermutation:
    """``s (x) 1_r`` laid out with the ``r`` index varying fastest."""
    sigma, phases = [], []
    for i, lam in zip(s.sigma, s.phases):
        for t in range(r):
            sigma.append(i * r + t)
            phases.append(lam)
    return ComplexPermutation(tuple(sigma), tuple(phases))


def as_complex_permutation(s, tol: float = IDEMPOTENT_TOL) -> ComplexPermutation:
    """Decode a dense complex permutation matrix."""
    s = _square(s)
    d = s.shape[0]
    mag = np.abs(s)
    big = np.abs(mag - 1.0) <= tol
    small = mag <= tol
    if not np.all(big | small):
        raise NotComplexPermutation("entries must have modulus 0 or 1")
    if not (np.all(big.sum(axis=0) == 1) and np.all(big.sum(axis=1) == 1)):
        raise NotComplexPermutation("need exactly one unimodular entry per row and column")
    sigma = tuple(int(np.flatnonzero(big[:, j])[0]) for j in range(d))
    phases = tuple(s[sigma[j], j] / abs(s[sigma[j], j]) for j in range(d))
    return ComplexPermutation(sigma, phases)


@dataclass(frozen=True)
class AlgebraIsometry:
    """Summandwise complex permutations: an invertible isometry of the algebra."""

    perms: tuple[ComplexPermutation, ...]

    def __post_init__(self):
        object.__setattr__(self, "perms", tuple(self.perms))

    @classmethod
    def identity(cls, algebra: SsfdAlgebra) -> "AlgebraIsometry":
        return cls(tuple(ComplexPermutation.identity(d) for d in algebra.summands))

    def sizes(self) -> tuple[int, ...]:
        return tuple(s.size for s in self.perms)

    def check(self, algebra: SsfdAlgebra) -> None:
        if self.sizes() != algebra.summands:
            raise ShapeMismatch(f"isometry sizes {self.sizes()} vs algebra {algebra.summands}")

    def __matmul__(self, other: "AlgebraIsometry") -> "AlgebraIsometry":
        if self.sizes() != other.sizes():
            raise ShapeMismatch("isometries on different algebras")
        return AlgebraIsometry(tuple(a @ b for a, b in zip(self.perms, other.perms)))

    def inverse(self) -> "AlgebraIsometry":
        return AlgebraIsometry(tuple(s.inverse() for s in self.perms))

    def conjugate(self, a: AlgebraElement) -> AlgebraElement:
        self.check(a.algebra)
        return AlgebraElement(a.algebra, [s.conjugate_matrix(b) for s, b in zip(self.perms, a.blocks)])

    def is_identity(self) -> bool:
        return all(s.is_identity() for s in self.perms)
