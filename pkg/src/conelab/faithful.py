"""Faithful bipartite states: detection, operational transpose, the induced
scalar product on effects, and the consequence suites.

A bipartite state Phi is handled through its reshaped (dim x dim) matrix P:
the slot-1 action of a transformation T sends P to M_T^T P, the slot-2 action
to P M_T, and the two-effect pairing is Phi(a, b) = a^T P b. Dynamical
faithfulness is exactly invertibility of P; the transpose of T with respect to
a symmetric faithful Phi is P^{-1} M_T^T P.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .composites import BipartiteSystem, marginal
from .cones import PolyhedralCone, PsdCone
from .errors import DegenerateFormError, UnderdeterminedError
from .reports import SuiteReport
from .systems import State, System, Transformation
from .theories import QuantumSystem

__all__ = [
    "FaithfulStateReport", "JordanForm",
    "reshaped", "phi_pairing", "state_is_extremal",
    "is_dynamically_faithful", "is_preparationally_faithful",
    "find_pfaith_state", "faithful_report",
    "transpose", "jordan_scalar_product", "adjoint",
    "cone_isomorphism_suite", "faithful_marginal_suite",
]


def reshaped(B: BipartiteSystem, Phi: State) -> np.ndarray:
    d1, d2 = B.slot_dims()
    return Phi.vector.reshape(d1, d2)


def phi_pairing(B: BipartiteSystem, Phi: State, a: np.ndarray, b: np.ndarray) -> float:
    """Phi(a, b) for local effect vectors a, b."""
    return float(np.asarray(a) @ reshaped(B, Phi) @ np.asarray(b))


def state_is_extremal(B: System, w: np.ndarray, tol: float | None = None) -> bool:
    """Purity: extremality of w in the state cone. Polyhedral: the effect
    generators tight at w must cut the cone down to the ray of w; psd: the
    density operator is rank one."""
    tol = tol if tol is not None else B.tolerance
    if isinstance(B.state_cone, PsdCone):
        return B.state_cone.is_extremal(w, tol)
    G = B.effect_cone.generators  # halfspace rows of the dual (state) cone
    vals = G @ w
    scale = max(1.0, float(np.linalg.norm(w)))
    if vals.min() < -10 * tol * scale:
        return False
    tight = G[np.abs(vals) <= 1e-7 * scale]
    if tight.size == 0:
        return B.dim == 1
    return (B.dim - np.linalg.matrix_rank(tight, tol=1e-8)) == 1


# -- faithfulness -------------------------------------------------------------


def is_dynamically_faithful(B: BipartiteSystem, Phi: State, slot: int = 1,
                            tol: float | None = None) -> bool:
    """The map A -> (A x I)Phi (or (I x A)Phi) has trivial kernel on the full
    matrix space of transformations, i.e. the reshaped Phi has full rank."""
    tol = tol if tol is not None else B.tolerance
    P = reshaped(B, Phi)
    if P.shape[0] != P.shape[1]:
        return False
    s = np.linalg.svd(P, compute_uv=False)
    return bool(s.min() > max(tol, 1e-12) * max(1.0, s.max()))


def is_preparationally_faithful(B: BipartiteSystem, Phi: State, slot: int = 1,
                                samples: int = 60, seed: int = 0,
                                tol: float | None = None) -> bool:
    """Every extremal bipartite state is (T x I)Phi for a T in the local
    transformation cone. Polyhedral state cones are checked on all extremal
    rays; psd ones on a grid of pure product/entangled states plus random
    pure states, with complete positivity decided through the Choi matrix."""
    tol = tol if tol is not None else B.tolerance
    if not is_dynamically_faithful(B, Phi, slot, tol):
        return False
    P = reshaped(B, Phi)
    local_sys = B.left if slot == 1 else B.right

    Pinv = np.linalg.inv(P)

    def reaches(target_mat: np.ndarray) -> bool:
        # slot 1: M^T P = target; slot 2: P M = target
        M = (target_mat @ Pinv).T if slot == 1 else Pinv @ target_mat
        return local_sys.in_transformation_cone(M, tol)

    if isinstance(B.state_cone, PolyhedralCone):
        for ray in B.state_cone.generators:
            if not reaches(ray.reshape(P.shape)):
                return False
        return True
    # psd backend: sampled pure bipartite states
    rng = np.random.default_rng(seed)
    rays = B.effect_cone.sample_extremal_rays(samples, rng)  # self-dual: also states
    for r in rays:
        if not reaches(r.reshape(P.shape)):
            return False
    return True


def transpose(B: BipartiteSystem, T: Transformation | np.ndarray, Phi: State) -> Transformation:
    """The transformation acting on the twin slot that produces the same
    output state: (T' x I)Phi = (I x T)Phi, so M' = P^{-1} M^T P for symmetric
    faithful Phi."""
    P = reshaped(B, Phi)
    s = np.linalg.svd(P, compute_uv=False)
    if s.min() <= 1e-12 * max(1.0, s.max()):
        raise UnderdeterminedError("state is not dynamically faithful; transpose undefined")
    M = T.matrix if isinstance(T, Transformation) else np.asarray(T)
    Mp = np.linalg.solve(P, M.T @ P)
    if isinstance(T, Transformation):
        return Transformation(T.system, Mp, validate=False)
    return Mp


# -- Jordan form of the faithful state ------------------------------------------


@dataclass
class JordanForm:
    basis: np.ndarray            # fiducial basis (rows, working coordinates)
    gram: np.ndarray             # Phi(f_i, f_j)
    abs_gram: np.ndarray         # the positive-definite |Phi| form over the basis
    involution: np.ndarray       # matrix in working coordinates, squares to 1
    signature: tuple[int, int]

    def scalar_product(self, b: np.ndarray, a: np.ndarray, B: BipartiteSystem,
                       Phi: State) -> float:
        """(b|a) = |Phi|(b, a) = Phi(involution(b), a)."""
        return phi_pairing(B, Phi, self.involution @ np.asarray(b), np.asarray(a))


def jordan_scalar_product(B: BipartiteSystem, Phi: State,
                          basis: np.ndarray | None = None,
                          tol: float | None = None) -> JordanForm:
    """Eigendecompose the symmetric form of Phi over a fiducial basis; the
    involution flips the negative eigenspaces, making |Phi| a nondegenerate
    scalar product. The signature is the basis-independent record."""
    tol = tol if tol is not None else B.tolerance
    F = np.asarray(basis, float) if basis is not None else B.left.jordan_basis
    P = reshaped(B, Phi)
    G = F @ P @ F.T
    G = 0.5 * (G + G.T)
    lam, V = np.linalg.eigh(G)
    if np.min(np.abs(lam)) < max(tol, 1e-12) * max(1.0, np.abs(lam).max()):
        raise DegenerateFormError("faithful form has a near-zero eigenvalue")
    signs = np.sign(lam)
    sigma_f = V @ np.diag(signs) @ V.T
    abs_gram = V @ np.diag(np.abs(lam)) @ V.T
    Ft = F.T  # columns are the fiducial vectors
    involution = Ft @ sigma_f @ np.linalg.inv(Ft)
    n_pos = int((signs > 0).sum())
    n_neg = int((signs < 0).sum())
    return JordanForm(F, G, abs_gram, involution, (n_pos, n_neg))


def adjoint(B: BipartiteSystem, T, Phi: State,
            jordan: JordanForm | None = None) -> np.ndarray:
    """Adjoint for the sesquilinear product of the faithful state:
    Z ∘ (conjugate of the transpose's Cartesian parts) ∘ Z. Accepts and
    returns matrices on the (complexified) effect space."""
    jordan = jordan if jordan is not None else jordan_scalar_product(B, Phi)
    Z = jordan.involution
    M = T.matrix if isinstance(T, Transformation) else np.asarray(T, complex)
    Mp = transpose(B, np.asarray(M, complex), Phi)
    return Z @ np.conj(Mp) @ Z


# -- candidate search and the full report -----------------------------------------


@dataclass
class FaithfulStateReport:
    phi: State
    symmetric: bool
    pure: bool
    dyn_faithful: tuple[bool, bool]
    prep_faithful: tuple[bool, bool]
    chi: State
    gram: np.ndarray
    jordan_involution: np.ndarray | None
    signature: tuple[int, int] | None

    @property
    def passes_pfaith(self) -> bool:
        return self.symmetric and self.pure and all(self.prep_faithful)


def faithful_report(B: BipartiteSystem, phi_vector: np.ndarray,
                    samples: int = 60, seed: int = 0) -> FaithfulStateReport:
    """Assemble every faithfulness attribute of a candidate bipartite state."""
    Phi = State(B, phi_vector, validate=False)
    P = reshaped(B, Phi)
    symmetric = bool(np.allclose(P, P.T, atol=1e-10 * max(1.0, np.abs(P).max())))
    pure = state_is_extremal(B, Phi.vector)
    dyn = (is_dynamically_faithful(B, Phi, 1), is_dynamically_faithful(B, Phi, 2))
    prep = (is_preparationally_faithful(B, Phi, 1, samples, seed),
            is_preparationally_faithful(B, Phi, 2, samples, seed))
    chi = marginal(B, Phi, 2)
    L = B.left.reference_observable
    gram = L @ P @ L.T
    involution, signature = None, None
    if symmetric and all(dyn):
        jf = jordan_scalar_product(B, Phi)
        involution, signature = jf.involution, jf.signature
    return FaithfulStateReport(Phi, symmetric, pure, dyn, prep, chi, gram,
                               involution, signature)


def find_pfaith_state(S: System, B: BipartiteSystem,
                      samples: int = 60, seed: int = 0) -> FaithfulStateReport | None:
    """Search for a symmetric pure preparationally faithful state of S⊙S.

    Polyhedral: swap-symmetric extremal rays of the bipartite state cone, in
    generator order, first hit wins. Quantum: the designated maximally
    entangled candidate, confirmed numerically. Returns None when the theory
    admits no such state in this representation."""
    candidates: list[np.ndarray] = []
    if isinstance(B.state_cone, PolyhedralCone):
        for ray in B.state_cone.generators:
            Pm = ray.reshape(S.dim, S.dim)
            if np.allclose(Pm, Pm.T, atol=1e-9):
                p = float(ray @ B.unit_effect)
                if p > B.tolerance:
                    candidates.append(ray / p)
    elif S.designated_phi is not None:
        candidates.append(np.asarray(S.designated_phi, float))
    for cand in candidates:
        rep = faithful_report(B, cand, samples, seed)
        if rep.passes_pfaith:
            return rep
    return None


# -- consequence suites --------------------------------------------------------------


def _sample_atomics(S: System, count: int, rng: np.random.Generator) -> list[np.ndarray]:
    if isinstance(S, QuantumSystem):
        out = []
        d = S.hilbert_dim
        for _ in range(count):
            A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            A /= np.linalg.norm(A, 2) * 1.25
            out.append(S.heisenberg_matrix([A]))
        return out
    found = [M for M in S.transformation_generators if S.is_atomic_matrix(M)]
    return found[:count] if found else []


def cone_isomorphism_suite(S: System, B: BipartiteSystem, Phi: State,
                           samples: int = 40, seed: int = 0) -> SuiteReport:
    """The isomorphisms a preparationally faithful state induces:
    transformations <-> bipartite states, effects <-> states (weak
    self-duality), and atomicity <-> purity of the image."""
    rep = SuiteReport(f"faithful-state cone isomorphisms [{S.name}]")
    rng = np.random.default_rng(seed)
    P = reshaped(B, Phi)
    Pinv = np.linalg.inv(P)
    tol = B.tolerance

    # generators of the transformation cone land in the bipartite state cone
    ok = True
    mats = list(S.transformation_generators) + \
        [S.random_transformation(rng).matrix for _ in range(8)]
    for M in mats:
        img = (M.T @ P).reshape(-1)
        if not B.state_cone.member(img, 10 * tol):
            ok = False
            break
    rep.add("transformation-to-state", "images (T x I)Phi lie in the bipartite state cone",
            "pass" if ok else "fail")

    # bipartite state generators pull back to the transformation cone
    if isinstance(B.state_cone, PolyhedralCone):
        targets = list(B.state_cone.generators)
    else:
        targets = list(B.effect_cone.sample_extremal_rays(samples, rng))
    ok = True
    for t in targets:
        M = (t.reshape(P.shape) @ Pinv).T
        if not S.in_transformation_cone(M, 10 * tol):
            ok = False
            break
    rep.add("state-to-transformation", "extremal bipartite states pull back to the "
            "transformation cone", "pass" if ok else "fail")

    # weak self-duality: a -> Phi(a, .) is a cone isomorphism effects -> states
    from .cones import check_cone_isomorphism
    try:
        wsd = check_cone_isomorphism(P.T, S.effect_cone, S.state_cone,
                                     samples=samples, seed=seed, tol=10 * tol)
    except Exception:
        wsd = False
    rep.add("weak-self-duality", "a -> Phi(a, .) maps the effect cone onto the state cone",
            "pass" if wsd else "fail")

    # atomic transformations <-> pure output states
    atomics = _sample_atomics(S, 10, rng)
    ok = bool(atomics)
    for M in atomics:
        img = (M.T @ P).reshape(-1)
        if not state_is_extremal(B, img):
            ok = False
            break
    rep.add("atomic-to-pure", "atomic local transformations on Phi give pure outputs",
            "pass" if ok else "fail")
    ok = True
    for t in targets[:12]:
        if not state_is_extremal(B, np.asarray(t)):
            continue
        M = (t.reshape(P.shape) @ Pinv).T
        if not S.is_atomic_matrix(M):
            ok = False
            break
    rep.add("pure-to-atomic", "pure bipartite states pull back to atomic transformations",
            "pass" if ok else "fail")
    return rep


def faithful_marginal_suite(S: System, B: BipartiteSystem, Phi: State,
                            samples: int = 30, seed: int = 0) -> SuiteReport:
    """Consequences living on the marginal chi: identity atomicity (recorded),
    invariance of chi under transposed channels, the ensemble-decomposition
    identity behind perfect concealment, and internality of chi."""
    rep = SuiteReport(f"faithful marginal consequences [{S.name}]")
    rng = np.random.default_rng(seed)
    P = reshaped(B, Phi)
    chi = marginal(B, Phi, 2).vector
    tol = B.tolerance

    rep.add("identity-atomic", "extremality of the identity in the transformation cone",
            "info", value=bool(S.is_atomic_matrix(np.eye(S.dim))))

    worst = 0.0
    for _ in range(samples):
        D = S.random_channel(rng)
        Mp = transpose(B, D, Phi).matrix
        worst = max(worst, float(np.linalg.norm(Mp.T @ chi - chi)))
    rep.add("chi-invariant", "transposed channels leave the faithful marginal fixed",
            "pass" if worst <= 1e-8 else "fail", residual=worst)

    # two observables -> two ensemble decompositions of chi
    obs_a = [l for l in S.reference_observable]
    U = S.random_channel(rng).matrix
    obs_b = [U @ l for l in obs_a]
    r1 = np.linalg.norm(sum(P.T @ a for a in obs_a) - chi)
    r2 = np.linalg.norm(sum(P.T @ b for b in obs_b) - chi)
    rep.add("ensembles-sum-to-chi", "every observable decomposes chi into an ensemble",
            "pass" if max(r1, r2) <= 1e-9 else "fail", residual=float(max(r1, r2)))

    eps = 1e-3
    internal = all(S.state_cone.member(chi - eps * s, tol)
                   for s in S.state_generators())
    rep.add("chi-internal", "chi mixes with any extremal state and stays a state",
            "pass" if internal else "fail")
    return rep
