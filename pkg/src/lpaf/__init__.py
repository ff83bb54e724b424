"""Spatial L^p AF algebras at finite stages: norms, homomorphisms, K_0 and classification."""
from __future__ import annotations

__version__ = "0.1.0"

from .algebra import (
    AlgebraElement,
    AlgebraIsometry,
    ComplexPermutation,
    SsfdAlgebra,
    as_complex_permutation,
    beta_map,
    element_norm,
    hermitian_defect,
    is_hermitian_idempotent,
)
from .bratteli import (
    AlgebraDirectSystem,
    GroupDirectSystem,
    TruncationCaveat,
    approximate_identity_defect,
    dsum_systems,
    group_system_of,
    injectivize,
    limit_positive,
    matrix_amplify_system,
    telescope,
    unitization_norm,
)
from .classify import (
    IntertwiningLadder,
    IsoWitness,
    SearchVerdict,
    find_intertwining,
    ladder_to_algebra_iso,
    one_sided_extend,
    realize_hom,
    realize_system,
    verify_witness,
)
from .errors import BudgetExhausted, LpafError
from .homs import (
    BlockDiagonalHom,
    SpatialHom,
    align_spatial,
    amplify,
    apply_hom,
    block_hom_from_multiplicity,
    compose_homs,
    decompose_spatial,
    multiplicity_of,
)
from .ktheory import (
    K1,
    GroupElement,
    PositiveContractiveMap,
    ScaledZGroup,
    interpolant,
    k0_class_of_idempotent,
    k0_of_algebra,
    k0_of_hom,
    riesz_report,
)
from .pnorm import (
    NormEstimate,
    PExponent,
    matrix_level_norm,
    operator_p_norm,
    oracle_p_norm_2x2,
    vector_p_norm,
)
