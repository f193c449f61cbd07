import numpy as np
import pytest

import conelab as cl
from conelab.algebra import (
    build_effect_algebra, check_atomicity_closure, cj_forward, cj_inverse,
    cj_suite, dagger, kraus_action_check, mixed_products, multiply, nearest_psd,
    phase_representative, reconstruct, representative_product,
)
from conelab.errors import CJNotAssertedError, ConelabError
from conelab.systems import Transformation


class TestPhaseRepresentative:
    def test_real_positive_fixed(self):
        x = np.array([0.5, 0.25, 0.0], complex)
        rep, phi = phase_representative(x)
        assert phi == 0.0
        assert np.allclose(rep, x)

    def test_imaginary_vector(self):
        a = np.array([0.7, -0.4], complex)
        rep, phi = phase_representative(1j * a)
        assert phi == pytest.approx(np.pi / 2)
        assert np.allclose(rep, a)

    def test_idempotent(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=4) + 1j * rng.normal(size=4)
        rep, _ = phase_representative(x)
        rep2, phi2 = phase_representative(rep)
        assert phi2 == pytest.approx(0.0, abs=1e-12)
        assert np.allclose(rep2, rep)

    def test_dagger_compatibility(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            x = rng.normal(size=5) + 1j * rng.normal(size=5)
            rep, phi = phase_representative(x)
            repd, phid = phase_representative(dagger(x))
            assert np.allclose(repd, dagger(rep))
            assert (phid + phi) % (2 * np.pi) == pytest.approx(0.0, abs=1e-12) or \
                   (phid + phi) % (2 * np.pi) == pytest.approx(2 * np.pi, abs=1e-12)

    def test_zero_vector_raises(self):
        with pytest.raises(ConelabError):
            phase_representative(np.zeros(3, complex))


class TestMultiplication:
    def test_quantum_product_is_operator_product(self, quantum2):
        rng = np.random.default_rng(2)
        for _ in range(15):
            a = rng.normal(size=4) + 1j * rng.normal(size=4)
            b = rng.normal(size=4) + 1j * rng.normal(size=4)
            ab = multiply(quantum2.cj, a, b)
            direct = quantum2.complex_matrix(a) @ quantum2.complex_matrix(b)
            assert np.linalg.norm(quantum2.complex_matrix(ab) - direct) <= 1e-10

    def test_classical_product_is_entrywise(self, classical3):
        rng = np.random.default_rng(3)
        a = rng.normal(size=3) + 1j * rng.normal(size=3)
        b = rng.normal(size=3) + 1j * rng.normal(size=3)
        assert np.allclose(multiply(classical3.cj, a, b), a * b, atol=1e-12)

    def test_identity_neutral(self, quantum2):
        rng = np.random.default_rng(4)
        a = rng.normal(size=4) + 1j * rng.normal(size=4)
        iota = quantum2.unit_effect.astype(complex)
        assert np.allclose(multiply(quantum2.cj, iota, a), a, atol=1e-12)
        assert np.allclose(multiply(quantum2.cj, a, iota), a, atol=1e-12)

    def test_distributive(self, quantum2):
        rng = np.random.default_rng(5)
        a, b, c = (rng.normal(size=4) + 1j * rng.normal(size=4) for _ in range(3))
        lhs = multiply(quantum2.cj, a, b + c)
        rhs = multiply(quantum2.cj, a, b) + multiply(quantum2.cj, a, c)
        assert np.allclose(lhs, rhs, atol=1e-10)

    def test_projector_effects(self, quantum2):
        p0 = quantum2.effect_cone.coords_of(np.diag([1.0, 0.0])).astype(complex)
        p1 = quantum2.effect_cone.coords_of(np.diag([0.0, 1.0])).astype(complex)
        assert np.allclose(multiply(quantum2.cj, p0, p0), p0, atol=1e-12)
        assert np.allclose(multiply(quantum2.cj, p0, p1), 0.0, atol=1e-12)

    def test_representative_product_phase_additivity(self, quantum2):
        rng = np.random.default_rng(6)
        for _ in range(10):
            a = rng.normal(size=4) + 1j * rng.normal(size=4)
            b = rng.normal(size=4) + 1j * rng.normal(size=4)
            prod, rep, phase = representative_product(quantum2.cj, a, b)
            # representative stability: | |a||b| | = |a||b|
            rep2, phi2 = phase_representative(rep)
            assert phi2 == pytest.approx(0.0, abs=1e-12)
            # and the declared phase is phi(a) + phi(b)
            _, pa = phase_representative(a)
            _, pb = phase_representative(b)
            assert phase == pytest.approx((pa + pb) % (2 * np.pi), abs=1e-10)


class TestMixedProducts:
    def test_against_operator_expressions(self, quantum2):
        rng = np.random.default_rng(7)
        a = rng.normal(size=4) + 1j * rng.normal(size=4)
        b = rng.normal(size=4) + 1j * rng.normal(size=4)
        adb, abd = mixed_products(quantum2.cj, a, b)
        A, B = quantum2.complex_matrix(a), quantum2.complex_matrix(b)
        assert np.linalg.norm(quantum2.complex_matrix(adb) - A.conj().T @ B) <= 1e-9
        assert np.linalg.norm(quantum2.complex_matrix(abd) - A @ B.conj().T) <= 1e-9

    def test_dagger_identities(self, quantum2):
        rng = np.random.default_rng(8)
        a = rng.normal(size=4) + 1j * rng.normal(size=4)
        b = rng.normal(size=4) + 1j * rng.normal(size=4)
        ab = multiply(quantum2.cj, a, b)
        ba_dag = multiply(quantum2.cj, dagger(b), dagger(a))
        assert np.allclose(dagger(ab), ba_dag, atol=1e-10)
        iota = quantum2.unit_effect.astype(complex)
        assert np.allclose(dagger(iota), iota)

    def test_real_effect_selfadjoint(self, classical2):
        a = np.array([0.3, 0.6], complex)
        assert np.allclose(dagger(a), a)


class TestAtomicityClosure:
    def test_quantum(self, quantum2):
        assert check_atomicity_closure(quantum2, sample_pairs=15)

    def test_classical(self, classical2):
        assert check_atomicity_closure(classical2, sample_pairs=15)

    def test_gbit_reported(self, gbit):
        # computed outcome for the square theory's sampled extremal maps
        assert check_atomicity_closure(gbit, sample_pairs=15) is True


class TestCJMaps:
    def test_forward_identity_is_rank_one(self, quantum2):
        F = cj_forward(quantum2, np.eye(4))
        w = np.linalg.eigvalsh(F)
        assert w[-1] > 1e-9 and np.all(np.abs(w[:-1]) <= 1e-9 * w[-1])
        assert np.allclose(F, np.outer(quantum2.unit_effect, quantum2.unit_effect),
                           atol=1e-9)

    def test_forward_unitary_is_rank_one(self, quantum2):
        th = 0.9
        U = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]],
                     dtype=complex)
        F = cj_forward(quantum2, quantum2.heisenberg_matrix([U]))
        w = np.linalg.eigvalsh(F)
        assert np.all(np.abs(w[:-1]) <= 1e-9 * w[-1])

    def test_roundtrip(self, quantum2):
        rng = np.random.default_rng(9)
        for _ in range(50):
            M = quantum2.random_transformation(rng).matrix
            F = cj_forward(quantum2, M)
            back = cj_inverse(quantum2, F).matrix
            assert np.linalg.norm(back - M) <= 1e-9

    def test_positive_forms_map_to_cp(self, quantum2):
        rng = np.random.default_rng(10)
        for _ in range(10):
            x = rng.normal(size=4) + 1j * rng.normal(size=4)
            T = cj_inverse(quantum2, np.outer(x, x.conj()))
            assert quantum2.in_transformation_cone(T.matrix)
            assert quantum2.is_atomic_matrix(T.matrix)

    def test_not_asserted_for_gbit(self, gbit):
        with pytest.raises(CJNotAssertedError):
            cj_forward(gbit, np.eye(3))

    def test_suite_dichotomy(self, quantum2, classical2):
        assert cj_suite(quantum2).passed
        assert not cj_suite(classical2).passed


class TestEffectAlgebra:
    def test_quantum_residuals(self, quantum2):
        alg = build_effect_algebra(quantum2)
        assert alg.hilbert_dims == [2]
        for key in ("associativity", "dagger", "trace"):
            assert alg.residuals[key] <= 1e-10

    def test_cstar_norm_identity(self, quantum2):
        alg = build_effect_algebra(quantum2)
        rng = np.random.default_rng(11)
        for _ in range(100):
            a = rng.normal(size=4) + 1j * rng.normal(size=4)
            Oa = alg.operator_of(a)
            lhs = np.linalg.norm(Oa.conj().T @ Oa, 2)
            rhs = np.linalg.norm(Oa, 2) ** 2
            assert abs(lhs - rhs) <= 1e-8 * max(1.0, rhs)

    def test_trace_property_strict(self, quantum2):
        alg = build_effect_algebra(quantum2)
        rng = np.random.default_rng(12)
        for _ in range(200):
            a = rng.normal(size=4) + 1j * rng.normal(size=4)
            b = rng.normal(size=4) + 1j * rng.normal(size=4)
            lhs = alg.trace_form(alg.product(a, b))
            rhs = alg.trace_form(alg.product(b, a))
            assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))

    def test_classical_commutative_diagonal(self, classical3):
        alg = build_effect_algebra(classical3)
        assert alg.hilbert_dims == [1, 1, 1]
        rng = np.random.default_rng(13)
        a = rng.normal(size=3) + 1j * rng.normal(size=3)
        b = rng.normal(size=3) + 1j * rng.normal(size=3)
        assert np.allclose(alg.product(a, b), alg.product(b, a), atol=1e-12)
        Oa = alg.operator_of(a)
        assert np.allclose(Oa, np.diag(np.diagonal(Oa)), atol=1e-12)

    def test_trace_realized_as_operator_trace(self, quantum2):
        alg = build_effect_algebra(quantum2)
        rng = np.random.default_rng(14)
        a = rng.normal(size=4) + 1j * rng.normal(size=4)
        b = rng.normal(size=4) + 1j * rng.normal(size=4)
        lhs = alg.trace_form(alg.product(dagger(a), b))
        rhs = np.trace(alg.operator_of(a).conj().T @ alg.operator_of(b))
        assert abs(lhs - rhs) <= 1e-9

    def test_gbit_has_no_algebra(self, gbit):
        with pytest.raises(CJNotAssertedError):
            build_effect_algebra(gbit)


class TestKrausAction:
    def test_canonical_gauge(self, quantum2):
        suite = kraus_action_check(quantum2)
        assert suite.passed
        assert suite["canonical-gauge"].status == "pass"
        assert suite["identity-class"].status == "pass"

    def test_twisted_tau_recovers_the_unitary(self, quantum2):
        th = 0.6
        u = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]],
                     dtype=complex)

        class Twisted:
            full = True

            def __init__(self, inner):
                self.system = inner.system
                self._inner = inner
                self.gauge = None

            def tau(self, rep):
                s = self.system
                moved = s.complex_coords(u.conj().T @ s.complex_matrix(rep) @ u)
                r, _ = phase_representative(moved)
                return self._inner.tau(r)

            def tau_inv(self, M):
                return self._inner.tau_inv(M)

            def blocks(self):
                return self._inner.blocks()

        suite = kraus_action_check(quantum2, cj=Twisted(quantum2.cj),
                                   algebra=build_effect_algebra(quantum2))
        assert suite["gauge"].status == "pass"
        fitted = np.array(suite["gauge"].value, dtype=complex)
        # recovered up to a global phase
        phase = fitted[0, 0] / u[0, 0]
        assert np.allclose(fitted, phase * u, atol=1e-6)


class TestNearestPsd:
    def test_projects_to_psd(self):
        rng = np.random.default_rng(15)
        H = rng.normal(size=(4, 4))
        H = H + H.T
        P = nearest_psd(H)
        assert np.linalg.eigvalsh(P).min() >= -1e-12

    def test_fixed_point_on_psd(self):
        A = np.diag([0.5, 1.5, 0.0])
        assert np.allclose(nearest_psd(A), A)


class TestReconstruction:
    def test_quantum_single_block(self, quantum2):
        r = reconstruct(quantum2)
        assert r.verdict == "quantum"
        assert r.block_dims == [4]
        assert r.hilbert_dims == [2]
        assert r.residuals["pairing"] <= 1e-8

    def test_classical_hybrid(self, classical3):
        r = reconstruct(classical3)
        assert r.verdict == "hybrid"
        assert r.block_dims == [1, 1, 1]
        assert r.hilbert_dims == [1, 1, 1]

    def test_gbit_not_quantum(self, gbit):
        r = reconstruct(gbit)
        assert r.verdict == "not-quantum"
        assert r.block_dims == [3]

    def test_fitted_states_are_density_operators(self, quantum2):
        r = reconstruct(quantum2)
        for w, rho in r.fitted_states:
            assert np.linalg.eigvalsh(rho).min() >= -1e-9
            assert np.trace(rho).real == pytest.approx(1.0, abs=1e-9)

    def test_roundtrip_pairing(self, quantum2):
        # pairing recomputed from fitted density operators and effect operators
        r = reconstruct(quantum2)
        for w, rho in r.fitted_states:
            for l, op in r.effect_operators:
                assert np.trace(rho @ op).real == pytest.approx(
                    float(w @ l), abs=1e-8)

    def test_atomic_transformations_act_as_conjugation(self, quantum2):
        r = reconstruct(quantum2)
        alg = r.algebra
        rng = np.random.default_rng(16)
        for M, A in r.transformation_kraus[:3]:
            x = rng.normal(size=4) + 1j * rng.normal(size=4)
            lhs = alg.operator_of(M @ x)
            rhs = A.conj().T @ alg.operator_of(x) @ A
            assert np.linalg.norm(lhs - rhs) <= 1e-8
