import numpy as np
import pytest

import conelab as cl
from conelab.composites import compose
from conelab.errors import ConelabError
from conelab.faithful import reshaped
from conelab.purify import atomic_reachability_suite, check_purify
from conelab.systems import Effect, State
from conelab.teleport import (
    alpha_max, completely_faithful_residual, depolarize_check,
    solve_faithful_effect, teleport,
)


def contraction_oracle(B, Phi, F_matrix):
    """Independent check of the chained contraction F(23) Phi(12) Phi(34) as an
    explicit four-index sum."""
    P = reshaped(B, Phi)
    n = P.shape[0]
    out = np.zeros((n, n))
    for i in range(n):
        for l in range(n):
            out[i, l] = sum(P[i, j] * F_matrix[j, k] * P[k, l]
                            for j in range(n) for k in range(n))
    return out


class TestFaithfulEffect:
    def test_qubit_alpha_is_one_quarter(self, Bq, phi_q):
        rep = solve_faithful_effect(Bq, phi_q)
        assert rep.feasible
        assert rep.alpha == pytest.approx(0.25, abs=1e-9)
        # the qubit faithful effect is the maximally entangled projector
        Fop = Bq.effect_cone.matrix_of(rep.F.vector)
        bell = np.zeros(4)
        bell[0] = bell[3] = 1 / np.sqrt(2)
        assert np.allclose(Fop, np.outer(bell, bell), atol=1e-9)

    def test_qubit_identity_via_independent_contraction(self, Bq, phi_q):
        rep = solve_faithful_effect(Bq, phi_q)
        P = reshaped(Bq, phi_q)
        out = contraction_oracle(Bq, phi_q, rep.F.vector.reshape(P.shape))
        assert np.allclose(out, rep.alpha * P, atol=1e-12)

    def test_classical_alpha_and_effect(self, Bc, phi_c):
        rep = solve_faithful_effect(Bc, phi_c)
        assert rep.feasible
        assert rep.alpha == pytest.approx(0.5, abs=1e-12)
        # F = sum of indicator (x) indicator
        expected = np.eye(2).reshape(-1)
        assert np.allclose(rep.F.vector, expected, atol=1e-12)
        out = contraction_oracle(Bc, phi_c, rep.F.vector.reshape(2, 2))
        assert np.allclose(out, rep.alpha * reshaped(Bc, phi_c), atol=1e-12)

    def test_gbit_infeasible_with_witness(self, Bg, phi_g):
        rep = solve_faithful_effect(Bg, phi_g)
        assert not rep.feasible
        assert rep.alpha is None and rep.F is None
        assert rep.alpha_max == 0.0
        assert "minimal tensor" in rep.cone_provenance
        assert rep.witness and "pairs negatively" in rep.witness

    def test_faithful_effect_is_a_valid_effect(self, Bq, phi_q):
        rep = solve_faithful_effect(Bq, phi_q)
        rep.F.validate()


class TestAlphaMax:
    def test_values(self, Bq, phi_q, Bc, phi_c, Bg, phi_g):
        assert alpha_max(Bq, phi_q) == pytest.approx(0.25, abs=1e-9)
        assert alpha_max(Bc, phi_c) == pytest.approx(0.5, abs=1e-9)
        assert alpha_max(Bg, phi_g) == 0.0

    def test_bounded_by_one(self, Bq, phi_q, Bc, phi_c):
        for B, Phi in ((Bq, phi_q), (Bc, phi_c)):
            assert alpha_max(B, Phi) <= 1.0


class TestTeleportation:
    def test_qubit_random_states(self, quantum2, Bq, phi_q):
        rep = solve_faithful_effect(Bq, phi_q)
        rng = np.random.default_rng(0)
        probs = []
        for _ in range(100):
            w = quantum2.random_state(rng)
            p, out = teleport(Bq, w, rep, phi_q)
            probs.append(p)
            assert np.linalg.norm(out.vector - w.vector) < 1e-9
        assert np.var(probs) < 1e-18  # state independence
        assert np.allclose(probs, 0.25, atol=1e-9)

    def test_classical_point_state(self, classical2, Bc, phi_c):
        rep = solve_faithful_effect(Bc, phi_c)
        p, out = teleport(Bc, State(classical2, [1.0, 0.0]), rep, phi_c)
        assert p == pytest.approx(0.5)
        assert np.allclose(out.vector, [1.0, 0.0])

    def test_infeasible_effect_rejected(self, gbit, Bg, phi_g):
        rep = solve_faithful_effect(Bg, phi_g)
        with pytest.raises(ConelabError):
            teleport(Bg, gbit.random_state(np.random.default_rng(0)), rep, phi_g)

    def test_completely_faithful(self, Bq, phi_q):
        rep = solve_faithful_effect(Bq, phi_q)
        suite = completely_faithful_residual(Bq, phi_q, rep, samples=20)
        assert suite.passed
        assert suite["completely-faithful"].value == 16


class TestDepolarize:
    def test_quantum_joint_observable(self, quantum2, Bq, phi_q):
        obs = [Effect(Bq, np.kron(l, m), validate=False)
               for l in quantum2.reference_observable
               for m in quantum2.reference_observable]
        assert depolarize_check(Bq, phi_q, obs, samples=5)

    def test_classical_joint_observable(self, classical2, Bc, phi_c):
        obs = [Effect(Bc, np.kron(l, m), validate=False)
               for l in classical2.reference_observable
               for m in classical2.reference_observable]
        assert depolarize_check(Bc, phi_c, obs, samples=5)

    def test_incomplete_observable_rejected(self, Bq, phi_q, quantum2):
        obs = [Effect(Bq, np.kron(quantum2.reference_observable[0],
                                  quantum2.reference_observable[0]), validate=False)]
        with pytest.raises(ConelabError):
            depolarize_check(Bq, phi_q, obs)


class TestPurify:
    def test_quantum_all_states_purifiable(self, quantum2, Bq):
        assert check_purify(quantum2, Bq).passed

    def test_classical_fails_on_mixed_state(self, classical2, Bc):
        suite = check_purify(classical2, Bc)
        assert not suite.passed
        assert suite["internal barycenter"].status == "fail"
        # the extremal (point) states are purifiable by correlated points
        assert suite["extremal state 0"].status == "pass"

    def test_gbit_reported_per_extremal(self, gbit, Bg):
        suite = check_purify(gbit, Bg)
        # computed result: every probe has a pure no-signaling purification
        assert suite.passed


class TestAtomicReachability:
    def test_quantum_states_and_effects_reachable(self, quantum2, Bq, phi_q):
        suite = atomic_reachability_suite(quantum2, Bq, phi_q.vector, True, True)
        assert suite.passed
        assert len(suite.records) > 2

    def test_classical_gated_not_applicable(self, classical2, Bc, phi_c):
        suite = atomic_reachability_suite(classical2, Bc, phi_c.vector, True, False)
        assert suite.records[0].status == "not-applicable"

    def test_gbit_reachability(self, gbit, Bg, phi_g):
        suite = atomic_reachability_suite(gbit, Bg, phi_g.vector, True, True)
        assert suite.passed
