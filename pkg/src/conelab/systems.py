"""Single-system probabilistic core.

A System fixes a finite-dimensional real coordinate space for effects.
Effects are coordinate vectors, states are vectors of the dual space written
in the dual coordinates, so the probability rule is the plain dot product.
A transformation is a real matrix acting on effect coordinates; its transpose
acts on states. The classical builtin uses the reference observable itself as
the coordinate basis, so states are literally stored in the basis dual to it.
"""
from __future__ import annotations

import numpy as np
from scipy.optimize import linprog

from .config import DEFAULT_PSD_SAMPLES, get_tolerance
from .cones import Cone, PolyhedralCone, PsdCone, check_cone_isomorphism
from .errors import (
    ConelabError,
    DimensionMismatchError,
    InvariantViolationError,
    NotInformationallyCompleteError,
    NotInvertibleError,
    SolverError,
    ZeroProbabilityError,
)

__all__ = [
    "System", "State", "Effect", "Transformation", "Test",
    "pairing", "condition", "effect_of", "compose",
    "sum_transformations", "scale", "coarse_grain", "convex_combine",
    "nsf_marginal_check", "minimal_infocomplete",
    "natural_norm", "natural_distance", "effect_distance", "effect_scalar_norm",
    "observable_gram", "is_state_automorphism",
    "measure_and_prepare_test", "random_test",
]


def _freeze(a):
    a = np.array(a, dtype=float, copy=True)
    a.flags.writeable = False
    return a


class System:
    """Effect cone + unit effect + state cone (its dual) + reference observable
    + a spanning family of transformation generators.

    ``jordan_basis`` optionally designates the fiducial basis used by the
    faithful-state scalar product; default is the reference observable.
    """

    def __init__(self, name: str, effect_cone: Cone, unit_effect,
                 reference_observable, transformation_generators,
                 tolerance: float | None = None, jordan_basis=None,
                 validate: bool = True):
        self.name = name
        self.effect_cone = effect_cone
        self.dim = effect_cone.ambient_dim
        self.tolerance = get_tolerance(tolerance)
        self.unit_effect = _freeze(unit_effect)
        self._state_cone: Cone | None = None
        self.reference_observable = _freeze(reference_observable)
        self.transformation_generators = [_freeze(m) for m in transformation_generators]
        self.jordan_basis = _freeze(jordan_basis) if jordan_basis is not None \
            else self.reference_observable
        self.cj = None            # optional CJ structure, set by builtins
        self.designated_phi = None
        self.composite_override = None
        if validate:
            self.validate()

    @property
    def state_cone(self) -> Cone:
        """The dual of the effect cone (no-restriction hypothesis), computed
        on first use and cached."""
        if self._state_cone is None:
            self._state_cone = self.effect_cone.dual()
        return self._state_cone

    # -- invariants ---------------------------------------------------------

    def validate(self):
        tol = self.tolerance
        e = self.unit_effect
        if e.shape != (self.dim,):
            raise DimensionMismatchError("unit effect has wrong length")
        if np.linalg.norm(e) <= tol:
            raise InvariantViolationError("unit effect nonzero")
        if not self.effect_cone.member(e, tol):
            raise InvariantViolationError("unit effect in effect cone")
        L = self.reference_observable
        if L.shape != (self.dim, self.dim):
            raise InvariantViolationError("reference observable has dim effects",
                                          f"shape {L.shape}")
        if np.linalg.matrix_rank(L, tol=1e-8) < self.dim:
            raise InvariantViolationError("reference observable linearly independent")
        if np.linalg.norm(L.sum(axis=0) - e) > tol * max(1.0, np.linalg.norm(e)):
            raise InvariantViolationError("reference observable sums to unit effect")
        for i, l in enumerate(L):
            if not self.in_unit_interval(l, tol):
                raise InvariantViolationError("reference effects in [0, e]", f"effect {i}")
        for i, M in enumerate(self.transformation_generators):
            if M.shape != (self.dim, self.dim):
                raise InvariantViolationError("generator shape", f"generator {i}")
            if not self.in_transformation_cone(M, tol):
                raise InvariantViolationError("generator maps effect cone into itself",
                                              f"generator {i}")
            if not self.effect_cone.member(e - M @ e, tol):
                raise InvariantViolationError("generator has effect at most e",
                                              f"generator {i}")
        return True

    def in_unit_interval(self, a, tol=None) -> bool:
        """Cone order 0 <= a <= e."""
        tol = tol if tol is not None else self.tolerance
        return self.effect_cone.member(a, tol) and \
            self.effect_cone.member(self.unit_effect - a, tol)

    # -- transformation-cone oracle (overridden by the quantum builtin) ------

    def in_transformation_cone(self, M, tol=None) -> bool:
        """Does the matrix map the effect cone into itself?"""
        tol = tol if tol is not None else self.tolerance
        return self.effect_cone.contains_cone_map(np.asarray(M, float), self.effect_cone,
                                                  tol=tol)

    def is_physical(self, M, tol=None, ancilla_cone: Cone | None = None) -> bool:
        """Cone preservation plus e∘T <= e; optionally also T⊗I against a
        supplied bipartite effect cone."""
        tol = tol if tol is not None else self.tolerance
        M = np.asarray(M, float)
        ok = self.in_transformation_cone(M, tol) and \
            self.effect_cone.member(self.unit_effect - M @ self.unit_effect, tol)
        if ok and ancilla_cone is not None:
            big = np.kron(M, np.eye(ancilla_cone.ambient_dim // self.dim))
            ok = ancilla_cone.contains_cone_map(big, ancilla_cone, tol=tol)
        return ok

    def _transformation_constraints(self):
        """Rows c with vec(M) @ c >= 0 describing the polyhedral transformation
        cone {M : M effect_cone ⊆ effect_cone}."""
        if not isinstance(self.effect_cone, PolyhedralCone):
            raise ConelabError("polyhedral transformation constraints need a polyhedral cone")
        H = self.effect_cone.halfspaces()
        G = self.effect_cone.generators
        rows = [np.outer(h, g).reshape(-1) for h in H for g in G]
        return np.array(rows)

    def is_atomic_matrix(self, M, tol=None) -> bool:
        """Extremality of M in the transformation cone (atomicity).

        Polyhedral: the tight constraints at M must pin it down to a single
        ray (nullity one).
        """
        tol = tol if tol is not None else self.tolerance
        M = np.asarray(M, float)
        if np.linalg.norm(M) <= tol:
            return False
        if not self.in_transformation_cone(M, tol):
            return False
        rows = self._transformation_constraints()
        vals = rows @ M.reshape(-1)
        scale_ = max(1.0, float(np.linalg.norm(M)))
        tight = rows[np.abs(vals) <= 1e-7 * scale_]
        if tight.size == 0:
            return self.dim == 1
        nullity = M.size - np.linalg.matrix_rank(tight, tol=1e-8)
        return nullity == 1

    # -- sampling ------------------------------------------------------------

    def state_generators(self) -> np.ndarray:
        """Extremal rays of the state cone, normalized to pairing 1 with e."""
        if isinstance(self.state_cone, PolyhedralCone):
            rays = self.state_cone.extremal_rays()
        else:
            rays = self.state_cone.sample_extremal_rays(DEFAULT_PSD_SAMPLES,
                                                        np.random.default_rng(0))
        out = []
        for r in rays:
            p = float(r @ self.unit_effect)
            if p > self.tolerance:
                out.append(r / p)
        return np.array(out)

    def random_state(self, rng: np.random.Generator) -> "State":
        gens = self.state_generators()
        w = rng.dirichlet(np.ones(len(gens)))
        return State(self, w @ gens, validate=False)

    def random_effect(self, rng: np.random.Generator) -> "Effect":
        G = self.effect_cone.generators if isinstance(self.effect_cone, PolyhedralCone) \
            else self.effect_cone.sample_extremal_rays(self.dim * 2, rng)
        c = rng.random(len(G))
        a = c @ np.asarray(G)
        # shrink into [0, e]
        s = 1.0
        for _ in range(60):
            if self.effect_cone.member(self.unit_effect - s * a, self.tolerance):
                break
            s *= 0.5
        return Effect(self, s * a, validate=False)

    def random_transformation(self, rng: np.random.Generator) -> "Transformation":
        c = rng.random(len(self.transformation_generators))
        M = sum(ci * Mi for ci, Mi in zip(c, self.transformation_generators))
        a = M @ self.unit_effect
        s = 1.0
        for _ in range(60):
            if self.effect_cone.member(self.unit_effect - s * a, self.tolerance):
                break
            s *= 0.5
        return Transformation(self, s * M, validate=False)

    def random_channel(self, rng: np.random.Generator) -> "Transformation":
        """Random deterministic transformation: a random sub-transformation
        completed by measure-the-rest-and-prepare."""
        T = self.random_transformation(rng)
        leftover = self.unit_effect - T.matrix @ self.unit_effect
        sigma = self.random_state(rng).vector
        M = T.matrix + np.outer(leftover, sigma)
        return Transformation(self, M, validate=False)

    def identity(self) -> "Transformation":
        return Transformation(self, np.eye(self.dim), validate=False)

    def prepare_channel(self, sigma: "State") -> "Transformation":
        """Discard the input and prepare sigma (effect action a -> e * <sigma, a>)."""
        return Transformation(self, np.outer(self.unit_effect, sigma.vector),
                              validate=False)

    def __repr__(self):
        return f"System({self.name!r}, dim={self.dim}, backend={self.effect_cone.backend})"


class State:
    """A positive normalized functional on effects, in dual coordinates."""

    def __init__(self, system: System, vector, validate: bool = True):
        self.system = system
        self.vector = _freeze(vector)
        if self.vector.shape != (system.dim,):
            raise DimensionMismatchError("state vector length")
        if validate:
            self.validate()

    def validate(self):
        tol = self.system.tolerance
        if not self.system.state_cone.member(self.vector, tol):
            raise InvariantViolationError("state in state cone")
        if abs(float(self.vector @ self.system.unit_effect) - 1.0) > tol:
            raise InvariantViolationError("state normalized at unit effect")
        return True


class Effect:
    """An element of the order interval [0, e]."""

    def __init__(self, system: System, vector, validate: bool = True):
        self.system = system
        self.vector = _freeze(vector)
        if self.vector.shape != (system.dim,):
            raise DimensionMismatchError("effect vector length")
        if validate:
            self.validate()

    def validate(self):
        if not self.system.in_unit_interval(self.vector, self.system.tolerance):
            raise InvariantViolationError("effect in [0, e]")
        return True


class Transformation:
    """Real matrix acting on effect coordinates; the transpose acts on states."""

    def __init__(self, system: System, matrix, validate: bool = True):
        self.system = system
        self.matrix = _freeze(matrix)
        if self.matrix.shape != (system.dim, system.dim):
            raise DimensionMismatchError("transformation matrix shape")
        if validate:
            self.validate()

    def validate(self):
        if not self.system.is_physical(self.matrix):
            raise InvariantViolationError("transformation physical")
        return True

    def apply_to_effect(self, a: Effect) -> Effect:
        return Effect(self.system, self.matrix @ a.vector, validate=False)

    def apply_to_state(self, w: State) -> np.ndarray:
        """Unnormalized image T omega (coordinates)."""
        return self.matrix.T @ w.vector


class Test:
    """A complete collection of mutually exclusive events."""

    __test__ = False  # not a pytest case

    def __init__(self, events: list[Transformation], validate: bool = True):
        if not events:
            raise ConelabError("a test needs at least one event")
        self.events = list(events)
        self.system = events[0].system
        if validate:
            self.validate()

    def validate(self):
        sys_ = self.system
        total = sum(ev.matrix @ sys_.unit_effect for ev in self.events)
        if np.linalg.norm(total - sys_.unit_effect) > sys_.tolerance * max(1.0, np.linalg.norm(sys_.unit_effect)):
            raise InvariantViolationError("test complete (effects sum to e)")
        return True


# -- elementary operations ----------------------------------------------------

def pairing(omega: State, a: Effect, tol: float | None = None) -> float:
    """Probability rule: the bilinear pairing of the coordinate vectors."""
    if omega.system is not a.system and omega.system.dim != a.system.dim:
        raise DimensionMismatchError("state and effect from different systems")
    tol = get_tolerance(tol) if tol is not None else omega.system.tolerance
    p = float(omega.vector @ a.vector)
    if p < -tol or p > 1.0 + tol:
        raise ConelabError(f"pairing {p} outside [0,1]: invalid state/effect pair")
    return min(max(p, 0.0), 1.0)


def effect_of(T: Transformation) -> Effect:
    """The effect e∘T of an event."""
    return Effect(T.system, T.matrix @ T.system.unit_effect, validate=False)


def condition(omega: State, T: Transformation, tol: float | None = None):
    """(probability, conditional state): p = omega(e∘T), state = T omega / p."""
    tol = get_tolerance(tol) if tol is not None else omega.system.tolerance
    p = pairing(omega, effect_of(T))
    if p <= tol:
        raise ZeroProbabilityError("zero-probability conditioning")
    w = T.apply_to_state(omega)
    w = w / float(w @ omega.system.unit_effect)
    return p, State(omega.system, w, validate=False)


def compose(B: Transformation, A: Transformation) -> Transformation:
    """The cascade B∘A ("A followed by B"); a∘(B∘A) = (a∘B)∘A."""
    return Transformation(A.system, A.matrix @ B.matrix, validate=False)


def sum_transformations(Ts: list[Transformation]) -> Transformation:
    M = sum(T.matrix for T in Ts)
    return Transformation(Ts[0].system, M, validate=False)


def scale(T: Transformation, lam: float) -> Transformation:
    if lam < 0:
        raise ConelabError("scale factor must be nonnegative")
    return Transformation(T.system, lam * T.matrix, validate=False)


def coarse_grain(test: Test, partition: list[list[int]]) -> Test:
    """Merge events within each block of the partition (blocks must cover all
    event indices disjointly)."""
    idx = [i for block in partition for i in block]
    if sorted(idx) != list(range(len(test.events))):
        raise ConelabError("partition must cover the event indices disjointly")
    events = [sum_transformations([test.events[i] for i in block]) for block in partition]
    return Test(events)


def convex_combine(tests: list[Test], weights) -> Test:
    w = np.asarray(weights, float)
    if (w < 0).any() or abs(w.sum() - 1.0) > 1e-12:
        raise ConelabError("weights must be nonnegative and sum to 1")
    events = [scale(ev, wi) for wi, t in zip(w, tests) for ev in t.events]
    return Test(events)


def measure_and_prepare_test(system: System, observable: list[Effect],
                             states: list[State]) -> Test:
    """Events measuring effect f_i and repreparing sigma_i; complete when the
    observable is."""
    events = [Transformation(system, np.outer(f.vector, s.vector), validate=False)
              for f, s in zip(observable, states)]
    return Test(events)


def random_test(system: System, n_outcomes: int, rng: np.random.Generator) -> Test:
    """A random complete test: random channels with random mixing weights."""
    w = rng.dirichlet(np.ones(n_outcomes))
    events = [scale(system.random_channel(rng), wi) for wi in w]
    return Test(events, validate=False)


def nsf_marginal_check(system: System, testB: Test, T: Transformation,
                       samples: int = 50, seed: int = 0,
                       tol: float | None = None) -> bool:
    """Marginalizing a later test leaves earlier probabilities unchanged:
    sum_j omega((e∘B_j)∘T) = omega(e∘T) on random states. Holds identically in
    this representation; the check documents the model."""
    tol = get_tolerance(tol) if tol is not None else system.tolerance
    rng = np.random.default_rng(seed)
    total = sum(ev.matrix @ system.unit_effect for ev in testB.events)
    eT = T.matrix @ system.unit_effect
    lhs_vec = T.matrix @ total
    for _ in range(samples):
        w = system.random_state(rng).vector
        if abs(float(w @ lhs_vec) - float(w @ eT)) > 10 * tol:
            return False
    return True


def minimal_infocomplete(system: System, tests: list[Test]) -> list[Effect]:
    """A minimal informationally complete observable assembled from the given
    tests: greedy scan in input order collecting linearly independent effects,
    then a conic rescaling so the selection plus the residual is an observable.
    """
    pool = [effect_of(ev).vector for t in tests for ev in t.events]
    selected: list[np.ndarray] = []
    for v in pool:
        cand = selected + [v]
        if np.linalg.matrix_rank(np.array(cand), tol=1e-9) > len(selected):
            selected.append(v)
        if len(selected) == system.dim:
            break
    if len(selected) < system.dim:
        raise NotInformationallyCompleteError(
            f"tests span rank {len(selected)} < dim {system.dim}")
    A = np.array(selected)
    e = system.unit_effect
    if np.linalg.norm(A.sum(axis=0) - e) <= system.tolerance * max(1.0, np.linalg.norm(e)):
        return [Effect(system, v, validate=False) for v in selected]
    # e = sum_i c_i a_i; drop a slot with c_k != 0 and park the residual there
    c = np.linalg.solve(A.T, e)
    k = int(np.argmax(np.abs(c)))
    eps = 1.0 / len(selected)
    out_vecs = [eps * A[i] for i in range(len(selected)) if i != k]
    out_vecs.append(e - sum(out_vecs))
    obs = [Effect(system, v) for v in out_vecs]
    return obs


# -- norms, metric, automorphisms ----------------------------------------------

def _effect_polytope_lp(system: System, objective: np.ndarray) -> float:
    """max objective @ x over the effect convex set {x in cone, e - x in cone}."""
    H = system.effect_cone.halfspaces()
    e = system.unit_effect
    A_ub = np.vstack([-H, H])
    b_ub = np.concatenate([np.zeros(len(H)), H @ e])
    res = linprog(-objective, A_ub=A_ub, b_ub=b_ub, bounds=(None, None), method="highs")
    if res.status != 0:
        raise SolverError(f"effect polytope LP failed: {res.message}")
    return float(-res.fun)


def natural_distance(omega: State, zeta: State) -> float:
    """sup over effects of l(omega) - l(zeta); LP over the effect polytope for
    polyhedral systems, sum of positive eigenvalues of the difference for psd."""
    sys_ = omega.system
    diff = omega.vector - zeta.vector
    if isinstance(sys_.effect_cone, PsdCone):
        w = np.linalg.eigvalsh(sys_.effect_cone.matrix_of(diff))
        return float(w[w > 0].sum())
    return _effect_polytope_lp(sys_, diff)


def natural_norm(system: System, vector: np.ndarray, kind: str = "state") -> float:
    """Natural (Banach) norm of a state-space or effect-space vector.

    state: sup_{a in [0,e]} |<v, a>|.
    effect: sup over the unit ball of the state norm of |<w, a>|.
    """
    v = np.asarray(vector, float)
    if kind == "state":
        if isinstance(system.effect_cone, PsdCone):
            w = np.linalg.eigvalsh(system.effect_cone.matrix_of(v))
            return float(max(w[w > 0].sum() if (w > 0).any() else 0.0,
                             -w[w < 0].sum() if (w < 0).any() else 0.0))
        return max(_effect_polytope_lp(system, v), _effect_polytope_lp(system, -v))
    if kind == "effect":
        if isinstance(system.effect_cone, PsdCone):
            w = np.linalg.eigvalsh(system.effect_cone.matrix_of(v))
            return float(max(w[-1], 0.0) + max(-w[0], 0.0))
        verts = _effect_polytope_vertices(system)
        # ball of the state norm: |<vert_i, w>| <= 1 for all vertices
        A_ub = np.vstack([verts, -verts])
        b_ub = np.ones(2 * len(verts))
        best = 0.0
        for obj in (v, -v):
            res = linprog(-obj, A_ub=A_ub, b_ub=b_ub, bounds=(None, None), method="highs")
            if res.status != 0:
                raise SolverError(f"state-ball LP failed: {res.message}")
            best = max(best, float(-res.fun))
        return best
    raise ConelabError(f"unknown norm kind {kind!r}")


def _effect_polytope_vertices(system: System) -> np.ndarray:
    """Vertices of [0, e], via double description on the lifted cone."""
    from .cones import dual_generators
    H = system.effect_cone.halfspaces()
    e = system.unit_effect
    n = system.dim
    rows = np.vstack([
        np.hstack([H, np.zeros((len(H), 1))]),
        np.hstack([-H, (H @ e)[:, None]]),
        np.hstack([np.zeros((1, n)), np.ones((1, 1))]),
    ])
    rays = dual_generators(rows)
    verts = [r[:n] / r[n] for r in rays if r[n] > 1e-9]
    return np.array(verts)


def effect_distance(a: Effect, b: Effect) -> float:
    """sup over normalized states of |omega(a-b)|."""
    sys_ = a.system
    diff = a.vector - b.vector
    if isinstance(sys_.effect_cone, PsdCone):
        w = np.linalg.eigvalsh(sys_.effect_cone.matrix_of(diff))
        return float(max(abs(w[0]), abs(w[-1])))
    gens = sys_.state_generators()
    return float(np.max(np.abs(gens @ diff)))


def observable_gram(system: System):
    """(L, G): columns of L are the reference effects; G is the Gram of the
    scalar product declaring the reference observable orthonormal."""
    L = system.reference_observable.T
    Linv = np.linalg.inv(L)
    return L, Linv.T @ Linv


def effect_scalar_norm(system: System, a: np.ndarray) -> float:
    """Norm induced by declaring the reference observable orthonormal (this is
    not the natural Banach norm; the two are exposed separately on purpose)."""
    L, _ = observable_gram(system)
    return float(np.linalg.norm(np.linalg.solve(L, np.asarray(a, float))))


def is_state_automorphism(system: System, M: np.ndarray,
                          tol: float | None = None) -> bool:
    """Invertible, maps the state cone onto itself in both directions, and
    preserves normalization (the dual map fixes e)."""
    tol = get_tolerance(tol) if tol is not None else system.tolerance
    M = np.asarray(M, float)
    if not check_cone_isomorphism(M, system.state_cone, system.state_cone, tol=tol):
        return False
    e = system.unit_effect
    return bool(np.linalg.norm(M.T @ e - e) <= tol * max(1.0, np.linalg.norm(e)))
