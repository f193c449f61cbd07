"""Cone geometry basics: membership, duality, extremal rays.

The square cone (the gbit state cone) is the running example: its dual is the
same square rotated by 45 degrees, which is exactly the gbit effect cone.
"""
import numpy as np

from conelab import PolyhedralCone, PsdCone, check_cone_isomorphism

print("== polyhedral cones ==")
square = PolyhedralCone([[1, 1, 1], [1, -1, 1], [-1, 1, 1], [-1, -1, 1]])
print("square cone generators:\n", square.generators)
print("contains its barycenter ray:", square.member([0, 0, 1]))
print("contains (2, 0, 1)?       ", square.member([2, 0, 1]))

dual = square.dual()
print("\ndual cone generators (the 45-degree square):")
print(np.round(dual.generators, 6))

redundant = PolyhedralCone([[1, 0], [0, 1], [1, 1], [2, 3]])
print("\nminimal generators of cone{(1,0),(0,1),(1,1),(2,3)}:")
print(redundant.extremal_rays())

print("\n== cone isomorphisms ==")
rot90 = np.array([[0, -1, 0], [1, 0, 0], [0, 0, 1]], float)
print("90-degree turn maps the square cone onto itself:",
      check_cone_isomorphism(rot90, square, square))

print("\n== psd-embedded cones ==")
psd = PsdCone(2)
print("identity matrix is a member:", psd.member(psd.coords_of(np.eye(2))))
print("psd cones are self-dual:    ", psd.dual() is psd)
print("rank-one preimages are extremal:",
      psd.is_extremal(psd.coords_of(np.diag([1.0, 0.0]))))
