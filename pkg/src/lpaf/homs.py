"""Block diagonal and spatial homomorphisms between SSFD algebras.

A homomorphism ``A = (+)_j M_{c_j} -> B = (+)_k M_{d_k}`` in canonical form
is stored as, per target summand ``k``, the nondecreasing list of source
indices whose blocks are placed down the diagonal (zero padding last),
followed by conjugation with a complex permutation.  All composition and
alignment is carried out on this symbolic data, so composite identities can
be checked exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import (
    AlgebraElement,
    AlgebraIsometry,
    ComplexPermutation,
    SsfdAlgebra,
    as_complex_permutation,
    kron_identity,
)
from .errors import (
    MultiplicityMismatch,
    NotAHomomorphism,
    NotComplexPermutation,
    NotSpatial,
    RankNotDivisible,
    ShapeMismatch,
    SizeCriterionViolated,
)

RAW_TOL = 1e-9

# A layout is the actual left-to-right sequence of diagonal segments in one
# target summand: (source index, size), with None marking zero padding.
Layout = list[tuple[int | None, int]]


def as_multiplicity(m, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    m = np.array(m, dtype=np.int64)
    if m.ndim == 1 and m.size == 0:
        m = m.reshape(rows or 0, cols or 0)
    if m.ndim != 2:
        raise ShapeMismatch(f"multiplicity matrix must be 2-dimensional, got {m.shape}")
    if np.any(m < 0):
        raise ValueError("multiplicity entries must be nonnegative")
    return m


def _same_p(a: SsfdAlgebra, b: SsfdAlgebra) -> None:
    if a.p != b.p:
        raise ShapeMismatch(f"exponent mismatch: {a.p.p} vs {b.p.p}")


@dataclass(frozen=True)
class BlockDiagonalHom:
    source: SsfdAlgebra
    target: SsfdAlgebra
    orders: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        _same_p(self.source, self.target)
        orders = tuple(tuple(int(j) for j in r) for r in self.orders)
        if len(orders) != len(self.target):
            raise ShapeMismatch(f"{len(orders)} orders for {len(self.target)} target summands")
        for k, r in enumerate(orders):
            if any(j < 0 or j >= len(self.source) for j in r):
                raise ShapeMismatch(f"order {r} references a missing source summand")
            if list(r) != sorted(r):
                raise ValueError(f"order {r} is not nondecreasing")
            used = sum(self.source.summands[j] for j in r)
            if used > self.target.summands[k]:
                raise SizeCriterionViolated(k, used, self.target.summands[k])
        object.__setattr__(self, "orders", orders)

    def layout(self, k: int) -> Layout:
        c = self.source.summands
        segs: Layout = [(j, c[j]) for j in self.orders[k]]
        pad = self.target.summands[k] - sum(c[j] for j in self.orders[k])
        if pad:
            segs.append((None, pad))
        return segs

    def multiplicity(self) -> np.ndarray:
        m = np.zeros((len(self.target), len(self.source)), dtype=np.int64)
        for k, r in enumerate(self.orders):
            for j in r:
                m[k, j] += 1
        return m

    def apply_blocks(self, blocks: Sequence[np.ndarray]) -> list[np.ndarray]:
        out = []
        for k, d in enumerate(self.target.summands):
            t = np.zeros((d, d), dtype=np.complex128)
            off = 0
            for j in self.orders[k]:
                n = self.source.summands[j]
                t[off:off + n, off:off + n] = blocks[j]
                off += n
            out.append(t)
        return out


@dataclass(frozen=True)
class SpatialHom:
    """``a -> s_k diag(a_{r_k(1)}, ..., 0) s_k^{-1}`` in every target summand."""

    block: BlockDiagonalHom
    similarity: AlgebraIsometry

    def __post_init__(self):
        self.similarity.check(self.block.target)

    @classmethod
    def from_block(cls, block: BlockDiagonalHom) -> "SpatialHom":
        return cls(block, AlgebraIsometry.identity(block.target))

    @property
    def source(self) -> SsfdAlgebra:
        return self.block.source

    @property
    def target(self) -> SsfdAlgebra:
        return self.block.target

    def multiplicity(self) -> np.ndarray:
        return self.block.multiplicity()

    def __call__(self, a: AlgebraElement) -> AlgebraElement:
        return apply_hom(self, a)

    def conjugated(self, u: AlgebraIsometry) -> "SpatialHom":
        """The hom ``a -> u h(a) u^{-1}``."""
        return SpatialHom(self.block, u @ self.similarity)


def multiplicity_of(h) -> np.ndarray:
    return h.multiplicity()


def block_hom_from_multiplicity(m, source: SsfdAlgebra, target: SsfdAlgebra) -> BlockDiagonalHom:
    m = as_multiplicity(m, len(target), len(source))
    if m.shape != (len(target), len(source)):
        raise ShapeMismatch(f"multiplicity shape {m.shape} vs ({len(target)}, {len(source)})")
    orders = tuple(
        tuple(j for j in range(len(source)) for _ in range(int(m[k, j])))
        for k in range(len(target))
    )
    return BlockDiagonalHom(source, target, orders)


def spatial_from_multiplicity(m, source: SsfdAlgebra, target: SsfdAlgebra) -> SpatialHom:
    return SpatialHom.from_block(block_hom_from_multiplicity(m, source, target))


def identity_hom(a: SsfdAlgebra) -> SpatialHom:
    return spatial_from_multiplicity(np.eye(len(a), dtype=np.int64), a, a)


def zero_hom(source: SsfdAlgebra, target: SsfdAlgebra) -> SpatialHom:
    return spatial_from_multiplicity(np.zeros((len(target), len(source)), dtype=np.int64), source, target)


def _as_spatial(h) -> SpatialHom:
    return h if isinstance(h, SpatialHom) else SpatialHom.from_block(h)


def apply_hom(h, a: AlgebraElement) -> AlgebraElement:
    h = _as_spatial(h)
    if a.algebra.summands != h.source.summands:
        raise ShapeMismatch(f"element of {a.algebra!r} fed to a hom from {h.source!r}")
    raw = h.block.apply_blocks(a.blocks)
    return AlgebraElement(h.target, [s.conjugate_matrix(b) for s, b in zip(h.similarity.perms, raw)])


def apply_hom_level(h, blocks: Sequence[np.ndarray], n: int) -> list[np.ndarray]:
    """Apply ``id_{M_n} (x) h`` to an element of ``M_n(A)``.

    ``blocks[j]`` is an ``n x n`` block matrix with ``c_j x c_j`` entries
    (outer index slowest); the result uses the same layout.
    """
    h = _as_spatial(h)
    c = h.source.summands
    out = [np.zeros((n * d, n * d), dtype=np.complex128) for d in h.target.summands]
    for a in range(n):
        for b in range(n):
            entry = [np.asarray(blocks[j])[a * c[j]:(a + 1) * c[j], b * c[j]:(b + 1) * c[j]] for j in range(len(c))]
            img = apply_hom(h, AlgebraElement(h.source, entry))
            for k, d in enumerate(h.target.summands):
                out[k][a * d:(a + 1) * d, b * d:(b + 1) * d] = img.blocks[k]
    return out


def _perm_from_layouts(actual: Layout) -> tuple[tuple[int, ...], ComplexPermutation]:
    """Canonical order of ``actual`` and the permutation ``Q`` with
    ``Phi_actual = Q Phi_canonical Q^{-1}``."""
    offsets = []
    off = 0
    for _, size in actual:
        offsets.append(off)
        off += size
    order = sorted(range(len(actual)), key=lambda i: (actual[i][0] is None, actual[i][0] or 0, i))
    sigma = []
    for i in order:
        sigma.extend(range(offsets[i], offsets[i] + actual[i][1]))
    canon = tuple(actual[i][0] for i in order if actual[i][0] is not None)
    return canon, ComplexPermutation.from_permutation(sigma)


def canonicalize(source: SsfdAlgebra, target: SsfdAlgebra, layouts: Sequence[Layout],
                 similarity: AlgebraIsometry | None = None) -> SpatialHom:
    """Canonical SpatialHom for ``a -> S diag(actual layout) S^{-1}``."""
    if similarity is None:
        similarity = AlgebraIsometry.identity(target)
    orders, perms = [], []
    for k, lay in enumerate(layouts):
        if sum(size for _, size in lay) != target.summands[k]:
            raise ShapeMismatch(f"layout of summand {k} does not fill M_{target.summands[k]}")
        for j, size in lay:
            if j is not None and size != source.summands[j]:
                raise ShapeMismatch(f"segment for source {j} has size {size}")
        canon, q = _perm_from_layouts(lay)
        orders.append(canon)
        perms.append(similarity.perms[k] @ q)
    return SpatialHom(BlockDiagonalHom(source, target, tuple(orders)), AlgebraIsometry(tuple(perms)))


def from_order(source: SsfdAlgebra, target: SsfdAlgebra, orders: Sequence[Sequence[int]],
               similarity: AlgebraIsometry | None = None) -> SpatialHom:
    """SpatialHom from block orders that need not be nondecreasing."""
    layouts = []
    for k, r in enumerate(orders):
        lay: Layout = [(int(j), source.summands[int(j)]) for j in r]
        pad = target.summands[k] - sum(size for _, size in lay)
        if pad < 0:
            raise SizeCriterionViolated(k, target.summands[k] - pad, target.summands[k])
        if pad:
            lay.append((None, pad))
        layouts.append(lay)
    return canonicalize(source, target, layouts, similarity)


def _direct_sum_perm(parts: Sequence[ComplexPermutation]) -> ComplexPermutation:
    sigma, phases, off = [], [], 0
    for s in parts:
        sigma.extend(off + i for i in s.sigma)
        phases.extend(s.phases)
        off += s.size
    return ComplexPermutation(tuple(sigma), tuple(phases))


def compose_homs(h2, h1) -> SpatialHom:
    """``h2 o h1`` in canonical form."""
    h1, h2 = _as_spatial(h1), _as_spatial(h2)
    if h1.target != h2.source:
        raise ShapeMismatch(f"cannot compose: {h1.target!r} is not {h2.source!r}")
    layouts, perms = [], []
    for k in range(len(h2.target)):
        lay: Layout = []
        parts = []
        for jb, size in h2.block.layout(k):
            if jb is None:
                lay.append((None, size))
                parts.append(ComplexPermutation.identity(size))
            else:
                lay.extend(h1.block.layout(jb))
                parts.append(h1.similarity.perms[jb])
        layouts.append(lay)
        perms.append(h2.similarity.perms[k] @ _direct_sum_perm(parts))
    return canonicalize(h1.source, h2.target, layouts, AlgebraIsometry(tuple(perms)))


def amplify(h, r: int) -> SpatialHom:
    """``id_{M_r} (x) h`` under the standard identification ``M_r (x) M_c = M_{rc}``.

    With the standard bijection the ``M_r`` index varies fastest, which keeps
    the amplified map block diagonal with the same block order.
    """
    if r < 1:
        raise ValueError("amplification factor must be positive")
    h = _as_spatial(h)
    block = BlockDiagonalHom(h.source.amplified(r), h.target.amplified(r), h.block.orders)
    sim = AlgebraIsometry(tuple(kron_identity(s, r) for s in h.similarity.perms))
    return SpatialHom(block, sim)


def standard_to_block_layout(n: int, d: int) -> np.ndarray:
    """Index map from the standard ``M_n (x) M_d`` layout (n fastest) to block layout.

    ``x_block = x_standard[idx]`` for vectors; use ``np.ix_(idx, idx)`` on matrices.
    """
    return np.array([a + n * i for a in range(n) for i in range(d)])


def align_spatial(h1, h2) -> AlgebraIsometry:
    """``u`` with ``u h1(a) u^{-1} = h2(a)`` for all ``a``."""
    h1, h2 = _as_spatial(h1), _as_spatial(h2)
    if h1.source != h2.source or h1.target != h2.target:
        raise ShapeMismatch("align_spatial needs homs with the same endpoints")
    if not np.array_equal(h1.multiplicity(), h2.multiplicity()):
        raise MultiplicityMismatch(
            f"multiplicities differ: {h1.multiplicity().tolist()} vs {h2.multiplicity().tolist()}"
        )
    perms = []
    for k, (s1, s2) in enumerate(zip(h1.similarity.perms, h2.similarity.perms)):
        used = sum(h1.source.summands[j] for j in h1.block.orders[k])
        # free phases on the padding corner, chosen so u has phase 1 there
        fix = [1.0 + 0j] * s1.size
        for c in range(used, s1.size):
            fix[c] = s1.phases[c] * s2.phases[c].conjugate()
        perms.append(s2 @ ComplexPermutation(tuple(range(s1.size)), tuple(fix)) @ s1.inverse())
    u = AlgebraIsometry(tuple(perms))
    if not homs_agree(h1.conjugated(u), h2):
        raise MultiplicityMismatch("alignment failed on matrix units")
    return u


def homs_agree(h1, h2, atol: float = 1e-12) -> bool:
    """Compare two homs on every matrix unit of the source."""
    h1, h2 = _as_spatial(h1), _as_spatial(h2)
    if h1.source != h2.source or h1.target != h2.target:
        return False
    for _, _, _, e in h1.source.matrix_units():
        if not apply_hom(h1, e).allclose(apply_hom(h2, e), atol=atol):
            return False
    return True


def direct_sum_homs(h1, h2) -> SpatialHom:
    h1, h2 = _as_spatial(h1), _as_spatial(h2)
    _same_p(h1.source, h2.source)
    shift = len(h1.source)
    src = SsfdAlgebra(h1.source.p, h1.source.summands + h2.source.summands)
    tgt = SsfdAlgebra(h1.source.p, h1.target.summands + h2.target.summands)
    orders = h1.block.orders + tuple(tuple(j + shift for j in r) for r in h2.block.orders)
    return SpatialHom(
        BlockDiagonalHom(src, tgt, orders),
        AlgebraIsometry(h1.similarity.perms + h2.similarity.perms),
    )


def restrict_hom(h, keep_source: Sequence[int], keep_target: Sequence[int]) -> SpatialHom:
    """Compress to the kept summands; blocks of dropped sources become padding."""
    h = _as_spatial(h)
    keep_source = list(keep_source)
    pos = {j: i for i, j in enumerate(keep_source)}
    src = SsfdAlgebra(h.source.p, [h.source.summands[j] for j in keep_source])
    tgt = SsfdAlgebra(h.source.p, [h.target.summands[k] for k in keep_target])
    layouts = []
    for k in keep_target:
        layouts.append([(pos.get(j) if j is not None else None, size)
                        for j, size in h.block.layout(k)])
    sim = AlgebraIsometry(tuple(h.similarity.perms[k] for k in keep_target))
    return canonicalize(src, tgt, layouts, sim)


@dataclass(frozen=True)
class RawHom:
    """Images of matrix units: ``images[(j, k)][i, l]`` is the image of
    ``e_{i,l}`` of ``M_{c_j}`` in ``M_{d_k}``."""

    source: SsfdAlgebra
    target: SsfdAlgebra
    images: dict

    def image(self, j: int, k: int) -> np.ndarray:
        c, d = self.source.summands[j], self.target.summands[k]
        img = self.images.get((j, k))
        if img is None:
            return np.zeros((c, c, d, d), dtype=np.complex128)
        return np.asarray(img, dtype=np.complex128)


def render_raw(h) -> RawHom:
    h = _as_spatial(h)
    images = {}
    for j, c in enumerate(h.source.summands):
        for k, d in enumerate(h.target.summands):
            img = np.zeros((c, c, d, d), dtype=np.complex128)
            for i in range(c):
                for l in range(c):
                    img[i, l] = apply_hom(h, h.source.matrix_unit(j, i, l)).blocks[k]
            images[(j, k)] = img
    return RawHom(h.source, h.target, images)


def raw_from_function(source: SsfdAlgebra, target: SsfdAlgebra, f) -> RawHom:
    """Tabulate a linear map given as a function on AlgebraElements."""
    images = {}
    for j, c in enumerate(source.summands):
        for k, d in enumerate(target.summands):
            img = np.zeros((c, c, d, d), dtype=np.complex128)
            for i in range(c):
                for l in range(c):
                    img[i, l] = np.asarray(f(source.matrix_unit(j, i, l)).blocks[k])
            images[(j, k)] = img
    return RawHom(source, target, images)


def _check_relations(raw: RawHom, k: int, tol: float) -> None:
    src = raw.source.summands
    for j1, c1 in enumerate(src):
        im1 = raw.image(j1, k)
        for j2, c2 in enumerate(src):
            im2 = raw.image(j2, k)
            for i in range(c1):
                for l in range(c1):
                    for i2 in range(c2):
                        for l2 in range(c2):
                            prod = im1[i, l] @ im2[i2, l2]
                            if j1 == j2 and l == i2:
                                want = im1[i, l2]
                            else:
                                want = 0.0
                            if np.any(np.abs(prod - want) > tol):
                                raise NotAHomomorphism(
                                    f"matrix-unit relation fails for source summands {j1},{j2} "
                                    f"in target summand {k}"
                                )


def _column_basis(m: np.ndarray, rank: int, tol: float) -> list[np.ndarray]:
    """First ``rank`` columns of ``m`` (lowest index first) spanning its range."""
    chosen: list[np.ndarray] = []
    for col in range(m.shape[1]):
        v = m[:, col]
        if np.max(np.abs(v)) <= tol:
            continue
        trial = np.column_stack(chosen + [v])
        if np.linalg.matrix_rank(trial, tol=1e-8) == len(chosen) + 1:
            chosen.append(v / np.max(np.abs(v)))
            if len(chosen) == rank:
                break
    return chosen


def decompose_spatial(raw: RawHom, p=None, tol: float = RAW_TOL) -> SpatialHom:
    """Recover canonical form from matrix-unit images, or explain why not.

    The intertwiner is assembled from a basis of the range of the image of
    ``e_{1,1}`` in each summand, propagated by the images of ``e_{i,1}``;
    the hom is spatial exactly when that intertwiner is a complex
    permutation (up to column scaling).
    """
    source, target = raw.source, raw.target
    if p is not None and float(p) != source.p.p:
        raise ShapeMismatch("exponent does not match the algebras")
    c = source.summands
    layouts, perms = [], []
    for k, d in enumerate(target.summands):
        _check_relations(raw, k, tol)
        columns: list[np.ndarray] = []
        lay: Layout = []
        total = np.zeros((d, d), dtype=np.complex128)
        for j in range(len(c)):
            img = raw.image(j, k)
            unit = sum((img[i, i] for i in range(c[j])), np.zeros((d, d), dtype=np.complex128))
            total += unit
            rank_f = float(np.trace(unit).real)
            rank = int(round(rank_f))
            if abs(rank_f - rank) > 1e-6:
                raise NotAHomomorphism(f"trace of unit image {rank_f} is not an integer")
            if rank % c[j]:
                raise RankNotDivisible(f"rank {rank} of unit of M_{c[j]} in summand {k}")
            mult = rank // c[j]
            basis = _column_basis(img[0, 0], mult, tol)
            if len(basis) != mult:
                raise NotAHomomorphism(f"range of e_11 image has wrong dimension in summand {k}")
            for v in basis:
                for i in range(c[j]):
                    columns.append(img[i, 0] @ v)
                lay.append((j, c[j]))
        used = sum(size for _, size in lay)
        comp = np.eye(d, dtype=np.complex128) - total
        if used < d:
            basis = _column_basis(comp, d - used, tol)
            if len(basis) != d - used:
                raise NotAHomomorphism(f"unit image has the wrong rank in summand {k}")
            columns.extend(basis)
            lay.append((None, d - used))
        w = np.column_stack(columns) if columns else np.zeros((0, 0), dtype=np.complex128)
        try:
            s = as_complex_permutation(w, tol=1e-8)
        except NotComplexPermutation as exc:
            raise NotSpatial(
                f"summand {k}: the intertwiner is not a complex permutation ({exc})"
            ) from None
        layouts.append(lay)
        perms.append(s)
    h = canonicalize(source, target, layouts, AlgebraIsometry(tuple(perms)))
    rebuilt = render_raw(h)
    for key in rebuilt.images:
        if np.any(np.abs(rebuilt.images[key] - raw.image(*key)) > 1e-8):
            raise NotSpatial("reconstructed hom does not reproduce the input")
    return h
