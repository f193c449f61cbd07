"""Faithful bipartite states and what they induce.

A symmetric preparationally faithful pure state exists for the qubit (the
maximally entangled state) and for two gbits (a nonlocal box), but not for a
classical bit: its symmetric extremal candidates are products. A faithful
state defines the operational transpose, a scalar product on effects with an
involution and a signature, and an adjoint.
"""
import numpy as np

from conelab import (
    Transformation, adjoint, compose, faithful_report, find_pfaith_state,
    jordan_scalar_product, make_classical, make_gbit, make_quantum, transpose,
)
from conelab.systems import State

for name, make in (("classical:2", lambda: make_classical(2)),
                   ("quantum:2", lambda: make_quantum(2)),
                   ("gbit", make_gbit)):
    S = make()
    B = compose(S, make(), override_effect_cone=S.composite_override)
    rep = find_pfaith_state(S, B)
    print(f"{name:12s} symmetric pure faithful state found: {rep is not None}")
    if rep is not None:
        print(f"{'':12s} signature of the induced form: {rep.signature}")

print()
q2 = make_quantum(2)
Bq = compose(q2, make_quantum(2), override_effect_cone=q2.composite_override)
Phi = State(Bq, q2.designated_phi, validate=False)
print("== the designated qubit faithful state ==")
print(faithful_report(Bq, Phi.vector).chi.vector, "<- marginal (I/2 coordinates)")

print("\n== operational transpose ==")
th = 0.5
U = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]]) @ \
    np.diag([1.0, np.exp(0.3j)])
M = q2.heisenberg_matrix([U])
Mp = transpose(Bq, Transformation(q2, M, validate=False), Phi).matrix
print("transpose of conjugation by U equals conjugation by U^T:",
      np.allclose(Mp, q2.heisenberg_matrix([U.T])))

print("\n== the induced scalar product ==")
jf = jordan_scalar_product(Bq, Phi)
print("involution (operator-basis coordinates):")
print(np.round(jf.involution, 6))
print("signature:", jf.signature, " involution squares to 1:",
      np.allclose(jf.involution @ jf.involution, np.eye(4)))

print("\n== adjoint ==")
Madj = adjoint(Bq, M, Phi, jf)
print("adjoint of conjugation by U is conjugation by U^dagger:",
      np.allclose(Madj, q2.heisenberg_matrix([U.conj().T]), atol=1e-10))

print("\n== classical candidate (correlated but never pure) ==")
c2 = make_classical(2)
Bc = compose(c2, make_classical(2))
rc = faithful_report(Bc, c2.designated_phi)
print("symmetric:", rc.symmetric, " pure:", rc.pure,
      " preparationally faithful:", rc.prep_faithful)
