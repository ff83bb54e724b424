"""Induced l^p -> l^p operator norms of complex matrices.

General complex matrices only admit certified lower bounds, so every
estimate carries the witness vector that realises it.  Several exact
reductions are applied before any iteration:

* the support of the matrix is split into connected row/column components
  (a direct sum up to permutations has the max of the pieces as its norm);
* a component that is a diagonal-unimodular rescaling of a nonnegative
  matrix is replaced by its entrywise modulus, for which the uniform start
  converges to the global maximum;
* ``p == 1`` and ``p == 2`` are computed in closed form.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .errors import NonSquare, ShapeMismatch, WrongSize

DEFAULT_STARTS = 16
DEFAULT_MAX_ITER = 500
DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class PExponent:
    p: float

    def __post_init__(self):
        p = float(self.p)
        if not np.isfinite(p) or p < 1.0:
            raise ValueError(f"exponent must satisfy 1 <= p < inf, got {self.p!r}")
        object.__setattr__(self, "p", p)

    @property
    def classification_legal(self) -> bool:
        return self.p != 2.0

    @property
    def conjugate(self) -> float:
        return np.inf if self.p == 1.0 else self.p / (self.p - 1.0)

    def __float__(self) -> float:
        return self.p


def as_exponent(p) -> PExponent:
    return p if isinstance(p, PExponent) else PExponent(p)


@dataclass(frozen=True)
class NormEstimate:
    """A lower bound for an operator norm, realised by ``witness``."""

    value: float
    converged: bool
    iterations: int = 0
    starts: int = 0
    witness: np.ndarray | None = field(default=None, compare=False, repr=False)

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "converged": self.converged,
            "iterations": self.iterations,
            "starts": self.starts,
        }


def vector_p_norm(x, p) -> float:
    x = np.asarray(x, dtype=np.complex128).ravel()
    if x.size == 0:
        raise ValueError("vector_p_norm needs a nonempty vector")
    p = as_exponent(p).p
    mag = np.abs(x)
    m = mag.max()
    if m == 0.0:
        return 0.0
    return float(m * np.sum((mag / m) ** p) ** (1.0 / p))


def _as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise ShapeMismatch(f"expected a matrix, got shape {a.shape}")
    return a


def _components(a: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    """Connected components of the bipartite row/column support graph."""
    n, k = a.shape
    nz = a != 0
    row_seen = np.zeros(n, dtype=bool)
    col_seen = np.zeros(k, dtype=bool)
    out = []
    for start in range(n):
        if row_seen[start] or not nz[start].any():
            continue
        rows, cols = [start], []
        row_seen[start] = True
        stack = [("r", start)]
        while stack:
            kind, idx = stack.pop()
            if kind == "r":
                for j in np.flatnonzero(nz[idx] & ~col_seen):
                    col_seen[j] = True
                    cols.append(int(j))
                    stack.append(("c", int(j)))
            else:
                for i in np.flatnonzero(nz[:, idx] & ~row_seen):
                    row_seen[i] = True
                    rows.append(int(i))
                    stack.append(("r", int(i)))
        out.append((np.array(sorted(rows)), np.array(sorted(cols))))
    return out


def _phase_reduce(b: np.ndarray, rtol: float = 1e-13):
    """Return column phases ``v`` with ``b = diag(u) |b| diag(v)^*``, or None.

    ``b`` must have a connected support graph.
    """
    n, k = b.shape
    u = np.zeros(n, dtype=np.complex128)
    v = np.zeros(k, dtype=np.complex128)
    u[0] = 1.0
    stack = [("r", 0)]
    while stack:
        kind, idx = stack.pop()
        if kind == "r":
            for j in np.flatnonzero(b[idx]):
                want = np.conj(b[idx, j] / abs(b[idx, j]) / u[idx])
                if v[j] == 0:
                    v[j] = want
                    stack.append(("c", int(j)))
                elif abs(v[j] - want) > rtol * 10:
                    return None
        else:
            for i in np.flatnonzero(b[:, idx]):
                want = b[i, idx] / abs(b[i, idx]) * v[idx]
                if u[i] == 0:
                    u[i] = want
                    stack.append(("r", int(i)))
                elif abs(u[i] - want) > rtol * 10:
                    return None
    return v


def _iterate_component(b, p, starts, max_iter, tol, rng):
    """Best (value, witness, iterations, converged, starts) for one component."""
    n, k = b.shape
    if n == 1 or k == 1:
        # rank one with a single row or column: closed form via Hoelder
        if n == 1:
            row = b[0]
            if p == 1.0:
                j = int(np.argmax(np.abs(row)))
                x = np.zeros(k, dtype=np.complex128)
                x[j] = 1.0
            else:
                q = p / (p - 1.0)
                mag = np.abs(row) / np.abs(row).max()
                x = (mag ** (q - 1.0)) * np.exp(-1j * np.angle(row))
                x /= vector_p_norm(x, p)
        else:
            x = np.ones(1, dtype=np.complex128)
        return vector_p_norm(b @ x, p), x, 0, True, 1

    v = _phase_reduce(b)
    if v is not None:
        mod = np.abs(b)
        val, x, its, conv = kernels.power_iterate(
            mod, np.ones(k, dtype=np.complex128), p, max_iter, tol
        )
        x = v * x
        return vector_p_norm(b @ x, p) / vector_p_norm(x, p), x, its, conv, 1

    best = None
    total = 0
    for s in range(starts):
        if s == 0:
            x0 = np.ones(k, dtype=np.complex128)
        else:
            x0 = rng.normal(size=k) + 1j * rng.normal(size=k)
        val, x, its, conv = kernels.power_iterate(b, x0, p, max_iter, tol)
        total += its
        if best is None or val > best[0]:
            best = (val, x, conv)
    val, x, conv = best
    return vector_p_norm(b @ x, p) / vector_p_norm(x, p), x, total, conv, starts


def operator_p_norm(
    a,
    p,
    starts: int = DEFAULT_STARTS,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> NormEstimate:
    """Estimate ``||a||_{p->p}`` for a square complex matrix."""
    a = _as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise NonSquare(f"operator_p_norm needs a square matrix, got {a.shape}")
    if starts < 1 or max_iter < 1 or tol <= 0:
        raise ValueError("starts, max_iter and tol must be positive")
    p = as_exponent(p).p
    d = a.shape[1]
    if d == 0 or not np.any(a):
        x = np.zeros(d, dtype=np.complex128)
        x[:1] = 1.0
        return NormEstimate(0.0, True, 0, 0, x)

    if p == 1.0:
        sums = np.abs(a).sum(axis=0)
        j = int(np.argmax(sums))
        x = np.zeros(d, dtype=np.complex128)
        x[j] = 1.0
        return NormEstimate(float(sums[j]), True, 0, 1, x)
    if p == 2.0:
        _, s, vh = np.linalg.svd(a)
        x = vh[0].conj()
        return NormEstimate(float(s[0]), True, 0, 1, x)

    rng = np.random.default_rng(seed)
    best_val, best_x, best_conv = -1.0, None, True
    total_its = total_starts = 0
    for rows, cols in _components(a):
        val, x, its, conv, used = _iterate_component(
            a[np.ix_(rows, cols)], p, starts, max_iter, tol, rng
        )
        total_its += its
        total_starts += used
        if val > best_val:
            best_val, best_conv = val, conv
            best_x = np.zeros(d, dtype=np.complex128)
            best_x[cols] = x
    return NormEstimate(float(best_val), bool(best_conv), total_its, total_starts, best_x)


def oracle_p_norm_2x2(a, p, grid: tuple[int, int] = (401, 361), rounds: int = 8) -> float:
    """Brute-force ``||a||_p`` for a 2x2 matrix by gridding the unit sphere.

    The sphere is parametrised as ``(r, e^{it} (1 - r^p)^{1/p})`` with
    ``r in [0, 1]``; the global phase is fixed by taking the first
    coordinate real and nonnegative.  A coarse grid is followed by
    ``rounds`` zoomed grids around the current best point.
    """
    a = _as_matrix(a)
    if a.shape != (2, 2):
        raise WrongSize(f"oracle_p_norm_2x2 needs a 2x2 matrix, got {a.shape}")
    p = as_exponent(p).p
    nr, nt = grid
    best, r, t = kernels.grid_max_2x2(a, p, 0.0, 1.0, nr, 0.0, 2 * np.pi, nt)
    hr, ht = 1.0 / (nr - 1), 2 * np.pi / (nt - 1)
    for _ in range(rounds):
        lo, hi = max(0.0, r - 2 * hr), min(1.0, r + 2 * hr)
        if r in (0.0, 1.0):
            # t is meaningless at the endpoints, so keep searching the whole circle
            val, r2, t2 = kernels.grid_max_2x2(a, p, lo, hi, 41, 0.0, 2 * np.pi, nt)
        else:
            val, r2, t2 = kernels.grid_max_2x2(a, p, lo, hi, 41, t - 2 * ht, t + 2 * ht, 41)
            ht = 4 * ht / 40
        if val >= best:
            best, r, t = val, r2, t2
        hr = (hi - lo) / 40
    return float(best)


def combine_max(estimates: Sequence[NormEstimate]) -> NormEstimate:
    """Norm of a direct sum from the norms of its summands."""
    if not estimates:
        return NormEstimate(0.0, True, 0, 0, None)
    best = max(range(len(estimates)), key=lambda i: (estimates[i].value, -i))
    return NormEstimate(
        estimates[best].value,
        all(e.converged for e in estimates),
        sum(e.iterations for e in estimates),
        sum(e.starts for e in estimates),
        estimates[best].witness,
    )


def matrix_level_norm(blocks, n: int, algebra, **opts) -> NormEstimate:
    """``||.||_n`` on ``M_n(A)``: max over summands of the ``(n d_k)``-square blocks."""
    blocks = [_as_matrix(b) for b in blocks]
    sizes = list(algebra.summands)
    if len(blocks) != len(sizes):
        raise ShapeMismatch(f"{len(blocks)} blocks for {len(sizes)} summands")
    for k, (b, d) in enumerate(zip(blocks, sizes)):
        if b.shape != (n * d, n * d):
            raise ShapeMismatch(f"block {k} has shape {b.shape}, expected {(n * d, n * d)}")
    return combine_max([operator_p_norm(b, algebra.p, **opts) for b in blocks])
