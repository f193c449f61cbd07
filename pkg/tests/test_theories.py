import numpy as np
import pytest

import conelab as cl
from conelab.cones import check_cone_isomorphism
from conelab.errors import ConelabError
from conelab.systems import State, natural_distance, nsf_marginal_check, random_test
from conelab.composites import check_no_signaling
from conelab.theories import get_builtin

from conftest import qstate

# the square-to-rotated-square isomorphism in the lifted coordinates,
# worked out by hand on the four vertices
SQUARE_SELF_DUALITY = np.array([
    [0.5, 0.5, 0.0],
    [-0.5, 0.5, 0.0],
    [0.0, 0.0, 1.0],
])


class TestClassical:
    def test_dimensions_and_states(self, classical2):
        assert classical2.dim == 2
        assert len(classical2.state_generators()) == 2

    def test_identity_refinable(self, classical3):
        # the identity decomposes into the rank-one measure-and-reprepare maps
        parts = [np.outer(np.eye(3)[k], np.eye(3)[k]) for k in range(3)]
        assert np.allclose(sum(parts), np.eye(3))
        assert all(classical3.is_atomic_matrix(p) for p in parts)
        assert not classical3.is_atomic_matrix(np.eye(3))

    def test_point_state_distance(self, classical3):
        d = natural_distance(State(classical3, [1, 0, 0]),
                             State(classical3, [0, 0, 1]))
        assert d == pytest.approx(1.0, abs=1e-9)

    def test_bad_dimension(self):
        with pytest.raises(ConelabError):
            cl.make_classical(1)


class TestQuantum:
    def test_dimension(self, quantum2):
        assert quantum2.dim == 4
        assert quantum2.hilbert_dim == 2

    def test_designated_phi_marginal(self, quantum2, Bq, phi_q):
        rho = quantum2.effect_cone.matrix_of(cl.marginal(Bq, phi_q, 2).vector)
        assert np.allclose(rho, np.eye(2) / 2, atol=1e-12)

    def test_bloch_ball_is_the_state_base(self, quantum2):
        # normalized states <-> Bloch vectors of norm at most 1
        rng = np.random.default_rng(0)
        for _ in range(40):
            n = rng.normal(size=3)
            n /= np.linalg.norm(n)
            r = rng.random() * 1.2
            sx = np.array([[0, 1], [1, 0]], complex)
            sy = np.array([[0, -1j], [1j, 0]], complex)
            sz = np.array([[1, 0], [0, -1]], complex)
            rho = 0.5 * (np.eye(2) + r * (n[0] * sx + n[1] * sy + n[2] * sz))
            coords = quantum2.effect_cone.coords_of(rho)
            assert quantum2.state_cone.member(coords) == (r <= 1.0 + 1e-12)

    def test_transformation_generators_span(self, quantum2):
        flat = np.array([m.reshape(-1) for m in quantum2.transformation_generators])
        assert np.linalg.matrix_rank(flat, tol=1e-9) == 16

    def test_qudit_d3_cone_checks(self):
        q3 = cl.make_quantum(3)
        assert q3.dim == 9
        assert q3.validate()
        rng = np.random.default_rng(1)
        w = q3.random_state(rng)
        assert q3.state_cone.member(w.vector)


class TestGbit:
    def test_four_extremal_states_and_effects(self, gbit):
        assert len(gbit.state_cone.generators) == 4
        assert len(gbit.effect_cone.extremal_rays()) == 4

    def test_square_weak_self_duality(self, gbit):
        assert check_cone_isomorphism(SQUARE_SELF_DUALITY, gbit.state_cone,
                                      gbit.effect_cone)

    def test_composite_contains_pr_vertices(self, gbit, Bg):
        # 16 product vertices + 8 nonlocal boxes
        rays = Bg.state_cone.generators
        assert len(rays) == 24
        pr = np.array([[1, 1, 0], [1, -1, 0], [0, 0, 1]], float).reshape(-1)
        pr /= np.linalg.norm(pr)
        assert any(np.linalg.norm(pr - r / np.linalg.norm(r)) < 1e-8 for r in rays)


class TestBuiltinRegistry:
    def test_lookup(self):
        assert get_builtin("classical:2").dim == 2
        assert get_builtin("quantum:2").dim == 4
        assert get_builtin("gbit").dim == 3

    def test_unknown(self):
        with pytest.raises(ConelabError):
            get_builtin("octonionic:3")
        with pytest.raises(ConelabError):
            get_builtin("classical:x")


class TestBuiltinInvariants:
    @pytest.mark.parametrize("name", ["classical:2", "classical:3", "quantum:2", "gbit"])
    def test_validate_nsf_nosignaling(self, name):
        s = get_builtin(name)
        assert s.validate()
        rng = np.random.default_rng(5)
        t = random_test(s, 2, rng)
        assert nsf_marginal_check(s, t, s.random_transformation(rng), samples=20)
        B = cl.compose(s, get_builtin(name),
                       override_effect_cone=s.composite_override)
        assert check_no_signaling(B, samples=20, seed=0)
