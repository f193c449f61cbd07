"""conelab: finite-dimensional probabilistic theories as systems of convex
cones — states, effects, transformations, faithful states, teleportation
effects, effect algebras, and the block reconstruction of quantum theory."""

from .config import DEFAULT_TOLERANCE, get_tolerance
from .cones import Cone, PolyhedralCone, PsdCone, check_cone_isomorphism, hermitian_basis
from .systems import (
    System, State, Effect, Transformation, Test,
    pairing, condition, effect_of, compose as compose_transformations,
    sum_transformations, scale, coarse_grain, convex_combine,
    nsf_marginal_check, minimal_infocomplete,
    natural_norm, natural_distance, effect_distance, effect_scalar_norm,
    is_state_automorphism, measure_and_prepare_test, random_test,
)
from .composites import (
    BipartiteSystem, compose, compose_many, local, marginal,
    check_no_signaling, check_local_observability, product_state,
)
from .faithful import (
    FaithfulStateReport, JordanForm,
    is_dynamically_faithful, is_preparationally_faithful,
    find_pfaith_state, faithful_report, transpose,
    jordan_scalar_product, adjoint,
    cone_isomorphism_suite, faithful_marginal_suite,
)
from .teleport import (
    FaithfulEffectReport, solve_faithful_effect, alpha_max, teleport,
    depolarize_check, completely_faithful_residual,
)
from .purify import check_purify, atomic_reachability_suite
from .algebra import (
    phase_representative, multiply, effect_multiply, representative_product, dagger,
    mixed_products, check_atomicity_closure, cj_forward, cj_inverse, cj_suite,
    EffectAlgebra, build_effect_algebra, kraus_action_check, nearest_psd,
    ReconstructionResult, reconstruct,
)
from .theories import (
    QuantumSystem, make_classical, make_quantum, make_gbit, get_builtin,
)

__version__ = "0.1.0"
