"""Faithful effects and probabilistic teleportation.

Solving the chained identity F(23) Phi(12) Phi(34) = alpha Phi(14) for a
physical bipartite effect succeeds for the qubit (alpha = 1/4, the maximally
entangled effect) and the classical bit (alpha = 1/2, the perfectly
correlated observable), and is infeasible for boxworld under the minimal
tensor cone: a nonlocal box pairs negatively with the only candidate.
"""
import numpy as np

from conelab import (
    Effect, compose, depolarize_check, make_classical, make_gbit, make_quantum,
    solve_faithful_effect, teleport, alpha_max,
)
from conelab.systems import State

print("== solving for the faithful effect ==")
for name, make in (("classical:2", lambda: make_classical(2)),
                   ("quantum:2", lambda: make_quantum(2)),
                   ("gbit", make_gbit)):
    S = make()
    B = compose(S, make(), override_effect_cone=S.composite_override)
    Phi = State(B, S.designated_phi, validate=False)
    rep = solve_faithful_effect(B, Phi)
    if rep.feasible:
        print(f"{name:12s} feasible, alpha = {rep.alpha:.6f} "
              f"(best possible: {alpha_max(B, Phi):.6f})")
    else:
        print(f"{name:12s} infeasible under the {rep.cone_provenance}")
        print(f"{'':12s} witness: {rep.witness}")

print("\n== teleporting random qubit states ==")
q2 = make_quantum(2)
Bq = compose(q2, make_quantum(2), override_effect_cone=q2.composite_override)
Phi = State(Bq, q2.designated_phi, validate=False)
rep = solve_faithful_effect(Bq, Phi)
rng = np.random.default_rng(0)
worst = 0.0
for _ in range(50):
    w = q2.random_state(rng)
    p, out = teleport(Bq, w, rep, Phi)
    worst = max(worst, float(np.linalg.norm(out.vector - w.vector)))
print(f"50 random states teleported with probability {p:.4f};",
      f"worst recovery error {worst:.2e}")

print("\n== total depolarization ==")
obs = [Effect(Bq, np.kron(l, m), validate=False)
       for l in q2.reference_observable for m in q2.reference_observable]
print("coarse-graining a complete joint observable prepares the faithful "
      "marginal for every input:", depolarize_check(Bq, Phi, obs))
