import numpy as np
import pytest

import conelab as cl


@pytest.fixture(scope="session")
def classical2():
    return cl.make_classical(2)


@pytest.fixture(scope="session")
def classical3():
    return cl.make_classical(3)


@pytest.fixture(scope="session")
def quantum2():
    return cl.make_quantum(2)


@pytest.fixture(scope="session")
def gbit():
    return cl.make_gbit()


@pytest.fixture(scope="session")
def Bc(classical2):
    return cl.compose(classical2, classical2)


@pytest.fixture(scope="session")
def Bq(quantum2):
    return cl.compose(quantum2, quantum2,
                      override_effect_cone=quantum2.composite_override)


@pytest.fixture(scope="session")
def Bg(gbit):
    return cl.compose(gbit, gbit)


@pytest.fixture(scope="session")
def phi_c(classical2, Bc):
    from conelab.systems import State
    return State(Bc, classical2.designated_phi, validate=False)


@pytest.fixture(scope="session")
def phi_q(quantum2, Bq):
    from conelab.systems import State
    return State(Bq, quantum2.designated_phi, validate=False)


@pytest.fixture(scope="session")
def phi_g(gbit, Bg):
    from conelab.systems import State
    return State(Bg, gbit.designated_phi, validate=False)


def qstate(quantum2, rho):
    from conelab.systems import State
    return State(quantum2, quantum2.effect_cone.coords_of(np.asarray(rho, complex)))


def qeffect(quantum2, A):
    from conelab.systems import Effect
    return Effect(quantum2, quantum2.effect_cone.coords_of(np.asarray(A, complex)))
