"""Purifiability of states and the reachability consequences.

check_purify decides, per probe state, whether a pure bipartite state has it
as a marginal: spectrally for quantum systems, by scanning the extremal rays
of the composite state cone for polyhedral ones. The probes are the extremal
states plus the barycenter, so a theory whose pure composite states all have
pure marginals (classical) fails with a mixed witness.
"""
from __future__ import annotations

import numpy as np

from .composites import BipartiteSystem, marginal
from .cones import PolyhedralCone
from .errors import ConelabError
from .reports import SuiteReport
from .systems import State, System
from .theories import QuantumSystem

__all__ = ["check_purify", "atomic_reachability_suite"]


def _probe_states(S: System) -> list[tuple[str, np.ndarray]]:
    gens = S.state_generators()
    probes = [(f"extremal state {i}", g) for i, g in enumerate(gens)]
    probes.append(("internal barycenter", gens.mean(axis=0)))
    return probes


def check_purify(S: System, B: BipartiteSystem, tol: float | None = None) -> SuiteReport:
    """Does every probe state arise as the marginal of some pure bipartite
    state?"""
    tol = tol if tol is not None else B.tolerance
    rep = SuiteReport(f"purifiability [{S.name}]")
    if isinstance(S, QuantumSystem):
        for name, w in _probe_states(S):
            rho = S.effect_cone.matrix_of(w)
            lam, V = np.linalg.eigh(rho)
            lam = np.clip(lam, 0.0, None)
            d = S.hilbert_dim
            vec = sum(np.sqrt(l) * np.kron(V[:, k], np.eye(d)[k])
                      for k, l in enumerate(lam))
            Om = np.outer(vec, vec.conj())
            # embed the purification and confirm its marginal
            if not isinstance(B.effect_cone, PolyhedralCone):
                coords = B.effect_cone.coords_of(Om)
                m = marginal(B, State(B, coords, validate=False), 1).vector
                resid = float(np.linalg.norm(m - w))
                rep.add(name, "spectral purification marginal matches",
                        "pass" if resid <= 1e-9 else "fail", residual=resid)
            else:
                rep.add(name, "spectral purification exists", "pass")
        return rep

    if not isinstance(B.state_cone, PolyhedralCone):
        raise ConelabError("polyhedral purification scan needs a polyhedral composite")
    rays = B.state_cone.generators
    e = B.unit_effect
    pure_marginals = []
    for r in rays:
        p = float(r @ e)
        if p > tol:
            pure_marginals.append(marginal(B, State(B, r / p, validate=False), 1).vector)
    for name, w in _probe_states(S):
        hit = any(np.linalg.norm(m - w) <= 1e-8 * max(1.0, np.linalg.norm(w))
                  for m in pure_marginals)
        rep.add(name, "some extremal bipartite state has this marginal",
                "pass" if hit else "fail",
                witness=None if hit else "no pure composite state matches this marginal")
    return rep


def atomic_reachability_suite(S: System, B: BipartiteSystem, phi_vector: np.ndarray,
                              pfaith_ok: bool, purify_ok: bool) -> SuiteReport:
    """When both purifiability and a faithful state are available: every
    extremal state is an atomic transformation applied to the faithful
    marginal, and every extremal effect is e∘(atomic transformation)."""
    rep = SuiteReport(f"atomic reachability [{S.name}]")
    if not (pfaith_ok and purify_ok):
        rep.add("gating", "needs both a faithful state and purifiability",
                "not-applicable")
        return rep
    Phi = State(B, phi_vector, validate=False)
    chi = marginal(B, Phi, 2).vector

    if isinstance(S, QuantumSystem):
        d = S.hilbert_dim
        kets = np.eye(d, dtype=complex)
        chi_m = S.effect_cone.matrix_of(chi)
        for i, w in enumerate(S.state_generators()):
            rho = S.effect_cone.matrix_of(w)
            lam, V = np.linalg.eigh(rho)
            psi = V[:, -1]
            phi0 = next(k for k in kets if abs(k.conj() @ chi_m @ k) > 1e-9)
            K = np.outer(psi, phi0.conj())
            M = S.heisenberg_matrix([K])
            img = M.T @ chi
            p = float(img @ S.unit_effect)
            ok = S.is_atomic_matrix(M) and p > 1e-9 and \
                np.linalg.norm(img / p - w) <= 1e-8
            rep.add(f"state {i} reachable", "atomic K with K(chi) on the state's ray",
                    "pass" if ok else "fail")
        G = S.effect_cone.sample_extremal_rays(6, np.random.default_rng(3))
        for i, a in enumerate(G):
            A = S.effect_cone.matrix_of(a)
            lam, V = np.linalg.eigh(A)
            K = np.sqrt(max(lam[-1], 0.0)) * np.outer(V[:, -1], V[:, -1].conj())
            M = S.heisenberg_matrix([K])
            ok = S.is_atomic_matrix(M) and \
                np.linalg.norm(M @ S.unit_effect - a) <= 1e-8 * max(1.0, np.linalg.norm(a))
            rep.add(f"effect {i} reachable", "atomic K with e∘K on the effect's ray",
                    "pass" if ok else "fail")
        return rep

    effect_gens = S.effect_cone.generators
    f0 = next(g for g in effect_gens if abs(g @ chi) > 1e-9)
    for i, w in enumerate(S.state_generators()):
        M = np.outer(f0, w)          # effect action of "measure f0, prepare w"
        img = M.T @ chi
        p = float(img @ S.unit_effect)
        ok = S.is_atomic_matrix(M) and p > 1e-9 and \
            np.linalg.norm(img / p - w) <= 1e-8
        rep.add(f"state {i} reachable", "atomic K with K(chi) on the state's ray",
                "pass" if ok else "fail")
    sigma = S.state_generators()[0]
    for i, a in enumerate(effect_gens):
        M = np.outer(a, sigma)
        ok = S.is_atomic_matrix(M) and \
            np.linalg.norm(M @ S.unit_effect - a * float(sigma @ S.unit_effect)) <= 1e-8
        rep.add(f"effect {i} reachable", "atomic K with e∘K on the effect's ray",
                "pass" if ok else "fail")
    return rep
