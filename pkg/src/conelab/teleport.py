"""Faithful bipartite effects and probabilistic teleportation.

Everything four-partite reduces to matrix arithmetic on the reshaped faithful
state P: the chained contraction F(23) Phi(12) Phi(34) is the matrix product
P F P (slots 1 and 4 free), so the teleportation identity reads P F P = alpha P
and the candidate effect direction is P^{-1}. Slot-contraction helpers for the
general case are provided for the depolarization sweep.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .composites import BipartiteSystem, marginal
from .cones import PolyhedralCone, PsdCone
from .errors import ConelabError, SolverError
from .faithful import reshaped
from .systems import Effect, State
from .reports import SuiteReport

__all__ = [
    "FaithfulEffectReport", "solve_faithful_effect", "alpha_max",
    "teleport", "depolarize_check", "completely_faithful_residual",
]


@dataclass
class FaithfulEffectReport:
    feasible: bool
    F: Effect | None                 # the physical effect alpha * direction
    alpha: float | None              # teleportation probability
    alpha_max: float                 # best achievable scale (0 when infeasible)
    direction: np.ndarray            # solution of P F P = P in the effect span
    cone_provenance: str             # which composite effect cone decided feasibility
    witness: str | None = None       # infeasibility certificate summary


def _direction(B: BipartiteSystem, Phi: State, tol: float) -> np.ndarray:
    """Solve P F P = P for F in the bipartite effect span (least squares; an
    inconsistent system raises, distinct from cone-infeasibility)."""
    P = reshaped(B, Phi)
    n = P.shape[0]
    K = np.kron(P, P.T)              # row-major vec: vec(P F P) = (P ⊗ P^T) vec(F)
    x, *_ = np.linalg.lstsq(K, P.reshape(-1), rcond=None)
    resid = np.linalg.norm(K @ x - P.reshape(-1))
    if resid > max(tol, 1e-9) * max(1.0, np.linalg.norm(P)):
        raise SolverError("teleportation identity has no solution in the effect span")
    return x.reshape(n, n)


def _max_scale(B: BipartiteSystem, Fdir: np.ndarray, tol: float) -> float:
    """Largest alpha with E - alpha*Fdir still in the effect cone."""
    E = B.unit_effect
    f = Fdir.reshape(-1)
    if isinstance(B.effect_cone, PolyhedralCone):
        H = B.effect_cone.halfspaces()
        num = H @ E
        den = H @ f
        ratios = [n / d for n, d in zip(num, den) if d > tol]
        alpha = min(ratios) if ratios else 1.0
    else:
        M = B.effect_cone.matrix_of(f)       # unit effect embeds as the identity
        lam = np.linalg.eigvalsh(M)[-1]
        alpha = 1.0 / lam if lam > tol else 1.0
    return float(min(alpha, 1.0))


def solve_faithful_effect(B: BipartiteSystem, Phi: State,
                          tol: float | None = None) -> FaithfulEffectReport:
    """Find a physical bipartite effect F with F(23) Phi(12) Phi(34) =
    alpha Phi(14). Infeasibility (no cone member on the solved direction) is
    reported with a witness state pairing negatively with the direction."""
    tol = tol if tol is not None else B.tolerance
    Fdir = _direction(B, Phi, tol)
    fvec = Fdir.reshape(-1)
    provenance = ("minimal tensor cone" if getattr(B, "provenance", "") ==
                  "min-tensor-default" else "explicit composite cone")
    if not B.effect_cone.member(fvec, tol):
        witness = None
        if isinstance(B.state_cone, PolyhedralCone):
            vals = B.state_cone.generators @ fvec
            k = int(np.argmin(vals))
            if vals[k] < -tol:
                witness = (f"no-signaling extremal state #{k} pairs negatively "
                           f"({vals[k]:.6g}) with the solved direction")
        return FaithfulEffectReport(False, None, None, 0.0, Fdir, provenance, witness)
    alpha = _max_scale(B, Fdir, tol)
    F = Effect(B, alpha * fvec, validate=False)
    # consistency: the pairing-derived probability must reproduce alpha
    P = reshaped(B, Phi)
    chi = P.T @ B.left.unit_effect
    alpha_check = float(chi @ (alpha * Fdir) @ chi)
    if abs(alpha_check - alpha) > 1e-8 * max(1.0, alpha):
        raise ConelabError("teleportation constant inconsistent with the contraction")
    return FaithfulEffectReport(True, F, alpha, alpha, Fdir, provenance)


def alpha_max(B: BipartiteSystem, Phi: State, tol: float | None = None) -> float:
    """Best teleportation probability supported by the composite effect set
    (0 when no physical effect achieves the identity at all)."""
    tol = tol if tol is not None else B.tolerance
    Fdir = _direction(B, Phi, tol)
    if not B.effect_cone.member(Fdir.reshape(-1), tol):
        return 0.0
    return _max_scale(B, Fdir, tol)


def teleport(B: BipartiteSystem, omega: State, report: FaithfulEffectReport,
             Phi: State) -> tuple[float, State]:
    """Contract F(23) omega(2) Phi(34): returns the success probability and the
    output state on slot 4 (equal to the input within tolerance)."""
    if not report.feasible or report.F is None:
        raise ConelabError("teleportation needs a feasible faithful effect")
    P = reshaped(B, Phi)
    Fm = report.F.vector.reshape(P.shape)
    out = P.T @ (Fm.T @ omega.vector)
    p = float(out @ B.left.unit_effect)
    if p <= B.tolerance:
        raise ConelabError("teleportation contraction has vanishing probability")
    return p, State(B.left, out / p, validate=False)


def depolarize_check(B: BipartiteSystem, Phi: State, observable: list[Effect],
                     samples: int = 5, seed: int = 0,
                     tol: float | None = None) -> bool:
    """Coarse-graining a complete bipartite observable over slots (2,3) maps
    every input state to the faithful marginal chi (totally depolarizing)."""
    tol = tol if tol is not None else B.tolerance
    P = reshaped(B, Phi)
    total = sum(a.vector for a in observable)
    if np.linalg.norm(total - B.unit_effect) > 10 * tol * max(1.0, np.linalg.norm(B.unit_effect)):
        raise ConelabError("observable is not complete on the bipartite system")
    chi = P.T @ B.left.unit_effect
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        w = B.left.random_state(rng).vector
        out = sum(P.T @ (a.vector.reshape(P.shape).T @ w) for a in observable)
        if np.linalg.norm(out - chi) > 1e-8 * max(1.0, np.linalg.norm(chi)):
            return False
    return True


def completely_faithful_residual(B: BipartiteSystem, Phi: State,
                                 report: FaithfulEffectReport,
                                 samples: int = 20, seed: int = 0) -> SuiteReport:
    """Properties of a feasible faithful effect: the correspondence
    A -> F∘(A' x I) is injective on the transformation span and agrees with
    F∘(I x A)."""
    rep = SuiteReport(f"faithful effect [{B.name}]")
    if not report.feasible or report.F is None:
        rep.add("feasible", "a physical effect achieves the teleportation identity",
                "fail", witness=report.witness)
        return rep
    rep.add("feasible", "a physical effect achieves the teleportation identity",
            "pass", value=report.alpha)
    P = reshaped(B, Phi)
    Pinv = np.linalg.inv(P)
    Fm = report.F.vector.reshape(P.shape)
    rng = np.random.default_rng(seed)
    S = B.left
    worst = 0.0
    vecs = []
    for _ in range(samples):
        M = S.random_transformation(rng).matrix
        Mp = Pinv @ M.T @ P
        left = np.kron(Mp, np.eye(S.dim)).T @ Fm.reshape(-1)   # F∘(A' x I)
        right = np.kron(np.eye(S.dim), M).T @ Fm.reshape(-1)   # F∘(I x A)
        worst = max(worst, float(np.linalg.norm(left - right)))
        vecs.append(left)
    rep.add("slot-symmetry", "F∘(A' x I) = F∘(I x A)",
            "pass" if worst <= 1e-8 else "fail", residual=worst)
    rank = np.linalg.matrix_rank(np.array(vecs), tol=1e-9)
    rep.add("completely-faithful", "A -> F∘(A' x I) injective on the sampled span",
            "pass" if rank == min(samples, S.dim * S.dim) else "fail",
            value=int(rank))
    return rep
