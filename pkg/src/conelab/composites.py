"""Bipartite systems under dynamical independence.

The composite of two systems carries the Kronecker-product coordinates; the
default effect cone is the minimal tensor cone spanned by products of the
factors' effect generators (so the state cone is the maximal, no-signaling
cone — boxworld for two gbits). A quantum composite must be built with the
explicit psd cone on the tensor Hilbert space as an override.
"""
from __future__ import annotations

import numpy as np

from .config import get_tolerance
from .cones import Cone, PolyhedralCone, PsdCone
from .errors import ConelabError, InvariantViolationError
from .systems import State, System, Transformation
from .theories import QuantumSystem

__all__ = [
    "BipartiteSystem", "QuantumBipartiteSystem", "compose", "local",
    "marginal", "check_no_signaling", "check_local_observability",
    "product_state", "product_effect_vector",
]


class _BipartiteMixin:
    left: System
    right: System
    provenance: str

    def slot_dims(self):
        return self.left.dim, self.right.dim


class BipartiteSystem(_BipartiteMixin, System):
    pass


class QuantumBipartiteSystem(_BipartiteMixin, QuantumSystem):
    pass


def product_effect_vector(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(np.asarray(a, float), np.asarray(b, float))


def product_state(B: "BipartiteSystem", w1: State, w2: State) -> State:
    """The factorized state (w1, w2); its probability rule factorizes exactly."""
    return State(B, np.kron(w1.vector, w2.vector), validate=False)


def _min_tensor_cone(c1: Cone, c2: Cone, tol: float) -> PolyhedralCone:
    if not (isinstance(c1, PolyhedralCone) and isinstance(c2, PolyhedralCone)):
        raise ConelabError(
            "the minimal tensor cone needs polyhedral factors; "
            "pass an explicit override for psd-backed systems")
    gens = [np.kron(g, h) for g in c1.generators for h in c2.generators]
    return PolyhedralCone(np.array(gens), tolerance=tol, validate=False)


def compose_many(systems: list[System], overrides: list[Cone | None] | None = None
                 ) -> System:
    """Left-associated multipartite composition ((S1⊙S2)⊙S3)⊙...; overrides,
    when given, apply one per pairwise step."""
    if not systems:
        raise ConelabError("need at least one system")
    out = systems[0]
    overrides = overrides or [None] * (len(systems) - 1)
    for S, over in zip(systems[1:], overrides):
        out = compose(out, S, override_effect_cone=over)
    return out


def compose(S1: System, S2: System, override_effect_cone: Cone | None = None,
            name: str | None = None) -> BipartiteSystem:
    """Compose two systems. Default: minimal tensor effect cone; an override
    must still contain every product of effect generators (local-test
    embedding)."""
    tol = max(S1.tolerance, S2.tolerance)
    if override_effect_cone is None:
        cone = _min_tensor_cone(S1.effect_cone, S2.effect_cone, tol)
        provenance = "min-tensor-default"
    else:
        cone = override_effect_cone
        provenance = "explicit-override"
        _check_embedding(cone, S1, S2, tol)

    unit = np.kron(S1.unit_effect, S2.unit_effect)
    ref = np.array([np.kron(l, m) for l in S1.reference_observable
                    for m in S2.reference_observable])
    gens = [np.kron(M, np.eye(S2.dim)) for M in S1.transformation_generators] + \
           [np.kron(np.eye(S1.dim), M) for M in S2.transformation_generators]

    quantum = isinstance(cone, PsdCone) and isinstance(S1, QuantumSystem) \
        and isinstance(S2, QuantumSystem)
    cls = QuantumBipartiteSystem if quantum else BipartiteSystem
    B = cls(name or f"{S1.name}(x){S2.name}", cone, unit, ref, gens,
            tolerance=tol, validate=False)
    B.left, B.right = S1, S2
    B.provenance = provenance
    B.jordan_basis = np.array([np.kron(l, m) for l in S1.jordan_basis
                               for m in S2.jordan_basis])
    _check_factorized_states(B, tol)
    return B


def _check_embedding(cone: Cone, S1: System, S2: System, tol: float):
    g1 = S1.effect_cone.generators if isinstance(S1.effect_cone, PolyhedralCone) \
        else S1.effect_cone.sample_extremal_rays(20, np.random.default_rng(0))
    g2 = S2.effect_cone.generators if isinstance(S2.effect_cone, PolyhedralCone) \
        else S2.effect_cone.sample_extremal_rays(20, np.random.default_rng(1))
    for a in g1:
        for b in g2:
            if not cone.member(np.kron(a, b), tol):
                raise InvariantViolationError(
                    "override contains all products of local effects")


def _check_factorized_states(B: BipartiteSystem, tol: float):
    """Products of states lie in the dual of the effect cone; checked against
    the effect generators directly (no dual enumeration needed)."""
    w1 = B.left.state_generators()
    w2 = B.right.state_generators()
    if isinstance(B.effect_cone, PolyhedralCone):
        G = B.effect_cone.generators
        for u in w1[:4]:
            for v in w2[:4]:
                if (G @ np.kron(u, v)).min() < -tol:
                    raise InvariantViolationError(
                        "factorized states exist in the state cone")
        return
    for u in w1[:4]:
        for v in w2[:4]:
            if not B.state_cone.member(np.kron(u, v), tol):
                raise InvariantViolationError("factorized states exist in the state cone")


def local(B: BipartiteSystem, T: Transformation, slot: int) -> Transformation:
    """Embed a factor transformation as T⊗I or I⊗T; local actions on distinct
    slots commute exactly (Kronecker structure)."""
    d1, d2 = B.slot_dims()
    if slot == 1:
        M = np.kron(T.matrix, np.eye(d2))
    elif slot == 2:
        M = np.kron(np.eye(d1), T.matrix)
    else:
        raise ConelabError("slot must be 1 or 2")
    return Transformation(B, M, validate=False)


def marginal(B: BipartiteSystem, Omega: State, slot: int) -> State:
    """Marginal state: pair the other slot with its unit effect."""
    d1, d2 = B.slot_dims()
    P = Omega.vector.reshape(d1, d2)
    if slot == 1:
        w = P @ B.right.unit_effect
        return State(B.left, w, validate=False)
    if slot == 2:
        w = P.T @ B.left.unit_effect
        return State(B.right, w, validate=False)
    raise ConelabError("slot must be 1 or 2")


def check_no_signaling(B: BipartiteSystem, samples: int = 200, seed: int = 0,
                       tol: float | None = None) -> bool:
    """Random bipartite states, random deterministic transformations on slot 2:
    the slot-1 marginal must be untouched."""
    tol = get_tolerance(tol) if tol is not None else B.tolerance
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        Om = B.random_state(rng)
        D = B.right.random_channel(rng)
        moved = State(B, local(B, D, 2).apply_to_state(Om), validate=False)
        m0 = marginal(B, Om, 1).vector
        m1 = marginal(B, moved, 1).vector
        if np.linalg.norm(m0 - m1) > 10 * tol:
            return False
    return True


def check_local_observability(B: BipartiteSystem, tol: float = 1e-8) -> bool:
    """Products of local informationally complete observables span the whole
    bipartite effect space."""
    products = np.array([np.kron(l, m) for l in B.left.reference_observable
                         for m in B.right.reference_observable])
    span_products = np.linalg.matrix_rank(products, tol=tol)
    if isinstance(B.effect_cone, PolyhedralCone):
        span_cone = np.linalg.matrix_rank(B.effect_cone.generators, tol=tol)
    else:
        span_cone = B.dim  # injective embedding spans by construction
    return span_products == B.dim and span_cone == B.dim
