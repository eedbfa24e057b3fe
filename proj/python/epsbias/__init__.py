"""Epsilon-biased sets over finite groups: constructions and certification."""

from ._core import (
    BiasedSet,
    BipartiteExpander,
    CertificationError,
    FiniteGroup,
    ResourceError,
    StructuralError,
    abelian_biased_set,
    aghp_construct,
    aghp_construct_q,
    alon_roichman_sample,
    amplify_step,
    azuma_check,
    bias_spectral,
    bridge_schedule,
    char_bias_exact,
    claim6_bound,
    direct_product_set,
    find_primes,
    lemma3_projection_norm,
    lps_graph,
    mz_set,
    operator_product_tail,
    plan_amplification,
    solvable_set_base,
)

__version__ = "0.3.0"

__all__ = [name for name in dir() if not name.startswith("_")]
