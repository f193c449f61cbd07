"""What singles out quantum theory: composable effects.

Atomic transformations compose, and when the transformation cone matches the
cone of positive forms over complex effects, the composition transfers to the
effects themselves. The result is a C*-algebra: for the qubit the full 2x2
matrix algebra, for classical systems the commutative diagonal algebra, and
for the gbit nothing of the kind (its block dimension 3 is not a perfect
square). The reconstruction recipe turns each admissible theory back into
operators on Hilbert spaces.
"""
import numpy as np

from conelab import (
    build_effect_algebra, check_atomicity_closure, cj_suite, dagger,
    effect_multiply, kraus_action_check, make_classical, make_gbit,
    make_quantum, phase_representative, reconstruct,
)

q2, c3, gb = make_quantum(2), make_classical(3), make_gbit()

print("== atomicity of composition ==")
for s in (q2, c3, gb):
    print(f"{s.name:12s} compositions of atomic transformations stay atomic:",
          check_atomicity_closure(s, sample_pairs=12))

print("\n== the effect/atomic-transformation correspondence ==")
for s in (q2, c3, gb):
    print(f"{s.name:12s} full correspondence holds:", cj_suite(s).passed)

print("\n== multiplying effects (qubit) ==")
p0 = q2.effect_cone.coords_of(np.diag([1.0, 0.0])).astype(complex)
p1 = q2.effect_cone.coords_of(np.diag([0.0, 1.0])).astype(complex)
print("P0 * P0 = P0:", np.allclose(effect_multiply(q2.cj, p0, p0), p0))
print("P0 * P1 = 0: ", np.allclose(effect_multiply(q2.cj, p0, p1), 0.0))
x = np.array([1.0, 0.3j, 0.0, -0.2], complex)
rep, phase = phase_representative(x)
print(f"phase representative strips e^(i {phase:.3f}); dagger flips it:",
      np.allclose(phase_representative(dagger(x))[1], -phase % (2 * np.pi)))

print("\n== building the algebra ==")
alg = build_effect_algebra(q2)
print("qubit algebra: Hilbert dims", alg.hilbert_dims,
      "| worst residual", f"{max(alg.residuals.values()):.2e}")
algc = build_effect_algebra(c3)
print("classical algebra: Hilbert dims", algc.hilbert_dims, "(diagonal matrices)")
print("atomic action has the canonical gauge:",
      kraus_action_check(q2).passed)

print("\n== reconstruction verdicts ==")
for s in (q2, c3, gb):
    r = reconstruct(s)
    print(f"{s.name:12s} -> {r.verdict:12s} blocks {r.block_dims} "
          f"Hilbert dims {r.hilbert_dims}")
    if r.residuals:
        print(f"{'':12s}    pairing reproduced to {r.residuals['pairing']:.2e}")
    for note in r.notes:
        print(f"{'':12s}    note: {note}")
