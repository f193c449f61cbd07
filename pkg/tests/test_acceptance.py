"""Acceptance suite: every criterion at its stated tolerance, one printed
pass/fail line per criterion. Run with `pytest -s tests/test_acceptance.py`
to see the lines as they are produced."""
import time

import numpy as np
import pytest

import conelab as cl
from conelab.algebra import build_effect_algebra, reconstruct
from conelab.composites import local, marginal
from conelab.faithful import (
    faithful_report, find_pfaith_state, phi_pairing, transpose,
)
from conelab.systems import State, Transformation, natural_distance
from conelab.teleport import solve_faithful_effect


def _report(num: int, description: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    tail = f" ({detail})" if detail else ""
    print(f"criterion {num:2d}: {status} - {description}{tail}")
    assert ok, f"criterion {num}: {description}{tail}"


def test_criterion_01_qubit_teleportation_constant(Bq, phi_q):
    t0 = time.perf_counter()
    rep = solve_faithful_effect(Bq, phi_q)
    elapsed = time.perf_counter() - t0
    ok = rep.feasible and abs(rep.alpha - 0.25) <= 1e-9 and elapsed < 1.0
    _report(1, "qubit teleportation constant alpha = 1/4", ok,
            f"alpha={rep.alpha!r}, {elapsed * 1e3:.0f} ms")


def test_criterion_02_qubit_faithful_marginal(quantum2, Bq, phi_q):
    chi = marginal(Bq, phi_q, 2)
    rho = quantum2.effect_cone.matrix_of(chi.vector)
    resid = float(np.abs(rho - np.eye(2) / 2).max())
    _report(2, "qubit faithful marginal is maximally mixed", resid <= 1e-12,
            f"max deviation {resid:.2e}")


@pytest.fixture(scope="module")
def builtins_3(classical2, quantum2, gbit):
    return {"classical:2": classical2, "quantum:2": quantum2, "gbit": gbit}


def test_criterion_03_metric_suite(builtins_3):
    tol = 1e-9
    ok = True
    detail = []
    for name, s in builtins_3.items():
        rng = np.random.default_rng(42)
        worst = 0.0
        for _ in range(1000):
            a, b, c = (s.random_state(rng) for _ in range(3))
            dab = natural_distance(a, b)
            dba = natural_distance(b, a)
            daa = natural_distance(a, a)
            dac = natural_distance(a, c)
            dcb = natural_distance(c, b)
            worst = max(worst, abs(dab - dba), daa,
                        dab - (dac + dcb), -dab, dab - 1.0)
            if dab <= tol and np.linalg.norm(a.vector - b.vector) > 1e-6:
                worst = max(worst, 1.0)  # indiscernibles must coincide
        ok = ok and worst <= tol
        detail.append(f"{name} worst {worst:.2e}")
    _report(3, "metric axioms over 1000 random triples per builtin", ok,
            "; ".join(detail))


def test_criterion_04_monotonicity(builtins_3):
    tol = 1e-9
    ok = True
    detail = []
    for name, s in builtins_3.items():
        rng = np.random.default_rng(7)
        worst = -np.inf
        for _ in range(500):
            w, z = s.random_state(rng), s.random_state(rng)
            D = s.random_channel(rng)
            dw = State(s, D.apply_to_state(w), validate=False)
            dz = State(s, D.apply_to_state(z), validate=False)
            worst = max(worst, natural_distance(dw, dz) - natural_distance(w, z))
        ok = ok and worst <= tol
        detail.append(f"{name} max increase {worst:.2e}")
    _report(4, "distance contracts under 500 random channels per builtin", ok,
            "; ".join(detail))


def test_criterion_05_identity_dichotomy(classical2, quantum2):
    refinable = not classical2.is_atomic_matrix(np.eye(2))
    atomic = quantum2.is_atomic_matrix(np.eye(4))
    _report(5, "classical identity refinable, quantum identity atomic",
            refinable and atomic,
            f"classical refinable={refinable}, quantum atomic={atomic}")


def test_criterion_06_local_observability(Bq, Bg, classical2, classical3):
    Bc = cl.compose(classical2, classical3)
    prods = {
        "quantum": (Bq, 16), "gbit": (Bg, 9), "classical": (Bc, 6),
    }
    ok = True
    detail = []
    for name, (B, want) in prods.items():
        rank = np.linalg.matrix_rank(
            np.array([np.kron(l, m) for l in B.left.reference_observable
                      for m in B.right.reference_observable]), tol=1e-9)
        ok = ok and rank == want == B.dim
        detail.append(f"{name} span {rank}")
    _report(6, "bipartite effect spans are 16 / 9 / d1*d2", ok, "; ".join(detail))


def test_criterion_07_no_signaling(Bc, Bq, Bg):
    ok = True
    detail = []
    for name, B in (("classical", Bc), ("quantum", Bq), ("gbit", Bg)):
        rng = np.random.default_rng(11)
        worst = 0.0
        for _ in range(200):
            Om = B.random_state(rng)
            D = B.right.random_channel(rng)
            moved = State(B, local(B, D, 2).apply_to_state(Om), validate=False)
            worst = max(worst, float(np.linalg.norm(
                marginal(B, moved, 1).vector - marginal(B, Om, 1).vector)))
        ok = ok and worst <= 1e-9
        detail.append(f"{name} residual {worst:.2e}")
    _report(7, "no-signaling over 200 samples per composite", ok, "; ".join(detail))


def test_criterion_08_pfaith_detection(quantum2, Bq, gbit, Bg, classical2, Bc):
    q = find_pfaith_state(quantum2, Bq, samples=40)
    q_ok = q is not None and q.symmetric and q.pure and all(q.dyn_faithful) \
        and all(q.prep_faithful)
    g = find_pfaith_state(gbit, Bg)
    g_ok = g is not None and g.symmetric and all(g.prep_faithful)
    c_ok = find_pfaith_state(classical2, Bc) is None
    _report(8, "faithful-state detection: quantum yes, gbit yes, classical no",
            q_ok and g_ok and c_ok,
            f"quantum={q_ok}, gbit={g_ok}, classical-empty={c_ok}")


def test_criterion_09_transpose_algebra(builtins_3, Bc, Bq, Bg, phi_c, phi_q, phi_g):
    tol = 1e-9
    pairs = {"classical:2": (Bc, phi_c), "quantum:2": (Bq, phi_q),
             "gbit": (Bg, phi_g)}
    ok = True
    detail = []
    for name, s in builtins_3.items():
        B, Phi = pairs[name]
        rng = np.random.default_rng(5)
        worst = 0.0
        for _ in range(200):
            T1 = s.random_transformation(rng)
            T2 = s.random_transformation(rng)
            M1p = transpose(B, T1, Phi).matrix
            back = transpose(B, Transformation(s, M1p, validate=False), Phi).matrix
            worst = max(worst, float(np.linalg.norm(back - T1.matrix)))
            # (T2∘T1)' = T1'∘T2' with M(B∘A) = M_A M_B
            lhs = transpose(B, Transformation(
                s, T1.matrix @ T2.matrix, validate=False), Phi).matrix
            rhs = transpose(B, T2, Phi).matrix @ M1p
            worst = max(worst, float(np.linalg.norm(lhs - rhs)))
            a = s.random_effect(rng).vector
            b = s.random_effect(rng).vector
            worst = max(worst, abs(phi_pairing(B, Phi, a, T1.matrix @ b)
                                   - phi_pairing(B, Phi, M1p @ a, b)))
        ok = ok and worst <= tol
        detail.append(f"{name} worst {worst:.2e}")
    _report(9, "transpose involution/anti-homomorphism/defining identity", ok,
            "; ".join(detail))


def test_criterion_10_gbit_faithe_infeasible(Bg, phi_g):
    rep = solve_faithful_effect(Bg, phi_g)
    ok = (not rep.feasible) and "minimal tensor" in rep.cone_provenance \
        and rep.witness is not None
    _report(10, "gbit has no faithful effect under the minimal tensor cone", ok,
            rep.witness or "")


def test_criterion_11_effect_algebra(quantum2):
    alg = build_effect_algebra(quantum2)
    res_ok = all(alg.residuals[k] <= 1e-10
                 for k in ("associativity", "dagger", "trace"))
    rng = np.random.default_rng(21)
    worst = 0.0
    for _ in range(100):
        a = rng.normal(size=4) + 1j * rng.normal(size=4)
        Oa = alg.operator_of(a)
        worst = max(worst, abs(np.linalg.norm(Oa.conj().T @ Oa, 2)
                               - np.linalg.norm(Oa, 2) ** 2))
    _report(11, "qubit effect algebra identities and the C* norm identity",
            res_ok and worst <= 1e-8,
            f"algebra residuals {max(alg.residuals.values()):.2e}, "
            f"C* residual {worst:.2e}")


def test_criterion_12_reconstruction(quantum2, classical3, gbit):
    rq = reconstruct(quantum2)
    q_ok = rq.verdict == "quantum" and rq.hilbert_dims == [2] \
        and rq.residuals["pairing"] <= 1e-8
    rc = reconstruct(classical3)
    c_ok = rc.verdict == "hybrid" and rc.block_dims == [1, 1, 1]
    rg = reconstruct(gbit)
    g_ok = rg.verdict == "not-quantum"
    _report(12, "reconstruction: quantum block / classical hybrid / gbit rejected",
            q_ok and c_ok and g_ok,
            f"quantum pairing {rq.residuals['pairing']:.2e}")
