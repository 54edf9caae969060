"""Graded restricted simple Lie algebras of Cartan type over GF(p), and their
decomposition as modules over the embedded p-dimensional Witt algebra."""

from .cartan import (
    CartanAlgebra,
    Embedding,
    algebra,
    build_H,
    build_K,
    build_S,
    build_W,
    check_embedding,
    contact_bracket,
    d_H,
    d_ij,
    d_K,
    embedding,
    poisson_bracket,
    recover_H_poly,
    recover_K_poly,
    theta,
)
from .linalg import Matrix, PrimeField, Subspace, eigenspace, prime_field, rref
from .truncpoly import Poly, mono_mul, partial, poly_mul
from .witt import Deriv, bracket, divergence, graded_parts, p_power
from .wittrep import (
    CompositionMultiset,
    IsoType,
    WOneModule,
    baby_verma,
    classify_block,
    composition_multiset,
    decompose,
    iso_intertwiner,
    maximal_vectors,
    natural_module,
    oracle_multiset,
    simple,
    spin,
    submodule_action,
    whole_algebra_module,
)
from .theorems import (
    TheoremReport,
    decomposition_report,
    default_config,
    run_all,
    verify_H,
    verify_identities,
    verify_K,
    verify_S,
    verify_S_basis,
    verify_W,
)

__version__ = "0.1.0"
