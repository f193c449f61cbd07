"""Single systems: states, effects, conditioning, the natural metric.

Three theories side by side: a classical bit (simplex), a qubit (Bloch ball),
and the gbit (square). The natural distance is the best probability gap any
single effect can exhibit; it contracts under every channel.
"""
import numpy as np

from conelab import (
    Effect, State, Transformation, condition, effect_of, make_classical,
    make_gbit, make_quantum, natural_distance, pairing,
)

c2, q2, gb = make_classical(2), make_quantum(2), make_gbit()

print("== probability rule ==")
uniform = State(c2, [0.5, 0.5])
print("uniform bit on the 0-indicator:", pairing(uniform, Effect(c2, [1, 0])))

print("\n== conditioning ==")
p, post = condition(uniform, Transformation(c2, np.diag([1.0, 0.0])))
print(f"observe outcome 0: probability {p}, conditional state {post.vector}")

mixed = State(q2, q2.effect_cone.coords_of(np.eye(2) / 2))
proj0 = Transformation(q2, q2.heisenberg_matrix([np.diag([1.0, 0.0]).astype(complex)]),
                       validate=False)
p, post = condition(mixed, proj0)
print(f"qubit maximally mixed, project onto |0>: p = {p};",
      "conditional density matrix:")
print(np.round(q2.effect_cone.matrix_of(post.vector).real, 6))

print("\n== the effect of an event ==")
print("e of the projection event:", np.round(effect_of(proj0).vector, 6))

print("\n== natural distance ==")
print("classical point states:  ",
      natural_distance(State(c2, [1, 0]), State(c2, [0, 1])))
s0 = State(q2, q2.effect_cone.coords_of(np.diag([1.0, 0.0])))
s1 = State(q2, q2.effect_cone.coords_of(np.diag([0.0, 1.0])))
print("orthogonal qubit states: ", natural_distance(s0, s1))
corner = State(gb, [1, 1, 1])
center = State(gb, [0, 0, 1])
print("gbit corner vs center:   ", natural_distance(corner, center))

print("\n== monotonicity under channels ==")
rng = np.random.default_rng(0)
w, z = q2.random_state(rng), q2.random_state(rng)
before = natural_distance(w, z)
D = q2.random_channel(rng)
after = natural_distance(State(q2, D.apply_to_state(w), validate=False),
                         State(q2, D.apply_to_state(z), validate=False))
print(f"distance before {before:.6f} -> after a random channel {after:.6f}")
