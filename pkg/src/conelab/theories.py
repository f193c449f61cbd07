"""Builtin theories: classical d-level, quantum qudit, and the gbit.

Each constructor returns a fully validated System carrying its designated
faithful-state candidate, its composite override (quantum only) and, where the
theory admits one, the structure identifying effects with atomic
transformations used by the algebra module.
"""
from __future__ import annotations

import itertools

import numpy as np

from .cones import PolyhedralCone, PsdCone
from .errors import ConelabError, SolverError
from .systems import System

__all__ = [
    "QuantumSystem", "make_classical", "make_quantum", "make_gbit",
    "get_builtin", "BUILTIN_NAMES", "ClassicalCJ", "QuantumCJ",
    "heisenberg_matrix",
]


def heisenberg_matrix(cone: PsdCone, kraus: list[np.ndarray]) -> np.ndarray:
    """Effect-side matrix of a Kraus-form map over the cone's operator basis:
    column k holds the coordinates of sum_r K_r† B_k K_r."""
    cols = [cone.coords_of(sum(K.conj().T @ b @ K for K in kraus)) for b in cone.basis]
    return np.array(cols).T


class QuantumSystem(System):
    """System over an orthonormal Hermitian operator basis.

    The transformation cone is the completely positive cone, represented
    analytically through the Choi matrix rather than by generators.
    """

    def __init__(self, name, effect_cone: PsdCone, *args, **kwargs):
        if not isinstance(effect_cone, PsdCone):
            raise ConelabError("QuantumSystem needs a psd-embedded effect cone")
        self.hilbert_dim = effect_cone.hilbert_dim
        self.basis = effect_cone.basis
        super().__init__(name, effect_cone, *args, **kwargs)

    # -- operator coordinates --------------------------------------------------

    def complex_coords(self, M: np.ndarray) -> np.ndarray:
        return self.effect_cone._pinv @ np.asarray(M, complex).reshape(-1)

    def complex_matrix(self, c: np.ndarray) -> np.ndarray:
        return np.tensordot(np.asarray(c, complex), self.basis, axes=(0, 0))

    def heisenberg_matrix(self, kraus: list[np.ndarray]) -> np.ndarray:
        return heisenberg_matrix(self.effect_cone, kraus)

    def choi_matrix(self, M: np.ndarray) -> np.ndarray:
        """Choi matrix of the state-side (Schrödinger) action of M."""
        d = self.hilbert_dim
        M = np.asarray(M, float)
        C = np.zeros((d * d, d * d), dtype=complex)
        for i in range(d):
            for j in range(d):
                Eij = np.zeros((d, d), dtype=complex)
                Eij[i, j] = 1.0
                img = self.complex_matrix(M.T @ self.complex_coords(Eij))
                C[i * d:(i + 1) * d, j * d:(j + 1) * d] = img
        return C

    def kraus_of(self, M: np.ndarray) -> list[np.ndarray]:
        """Kraus decomposition from the Choi eigensystem (requires CP)."""
        C = self.choi_matrix(M)
        w, V = np.linalg.eigh(C)
        scale = max(1.0, abs(w).max())
        if w.min() < -1e-7 * scale:
            raise SolverError("map is not completely positive; no Kraus form")
        d = self.hilbert_dim
        return [np.sqrt(lam) * v.reshape(d, d).T
                for lam, v in zip(w, V.T) if lam > 1e-12 * scale]

    # -- cone oracles ------------------------------------------------------------

    def in_transformation_cone(self, M, tol=None) -> bool:
        tol = tol if tol is not None else self.tolerance
        w = np.linalg.eigvalsh(self.choi_matrix(M))
        return bool(w.min() >= -max(tol, 1e-9) * max(1.0, abs(w).max()))

    def is_atomic_matrix(self, M, tol=None) -> bool:
        tol = tol if tol is not None else self.tolerance
        w = np.linalg.eigvalsh(self.choi_matrix(M))
        scale = max(1.0, abs(w).max())
        if w.min() < -1e-7 * scale or w[-1] <= tol:
            return False
        return bool((np.abs(w[:-1]) <= 1e-7 * w[-1]).all())

    # -- sampling -----------------------------------------------------------------

    def state_generators(self) -> np.ndarray:
        rays = self.effect_cone.extremal_ray_grid()
        out = []
        for r in rays:
            p = float(r @ self.unit_effect)
            if p > self.tolerance:
                out.append(r / p)
        return np.array(out)

    def random_state(self, rng: np.random.Generator):
        from .systems import State
        d = self.hilbert_dim
        G = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        rho = G @ G.conj().T
        rho /= np.trace(rho).real
        return State(self, self.effect_cone.coords_of(rho), validate=False)

    def random_pure_state(self, rng: np.random.Generator):
        from .systems import State
        d = self.hilbert_dim
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        v /= np.linalg.norm(v)
        return State(self, self.effect_cone.coords_of(np.outer(v, v.conj())),
                     validate=False)

    def random_channel(self, rng: np.random.Generator):
        from .systems import Transformation
        d = self.hilbert_dim
        A = rng.normal(size=(2 * d, d)) + 1j * rng.normal(size=(2 * d, d))
        Q, _ = np.linalg.qr(A)
        return Transformation(self, self.heisenberg_matrix([Q[:d, :], Q[d:, :]]),
                              validate=False)

    def random_transformation(self, rng: np.random.Generator):
        from .systems import Transformation
        d = self.hilbert_dim
        A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        A /= np.linalg.norm(A, 2) * (1.0 + rng.random())
        return Transformation(self, self.heisenberg_matrix([A]), validate=False)


# -- CJ structures -----------------------------------------------------------------


class QuantumCJ:
    """Identification of phase-representative complex effects with atomic
    (single-Kraus) transformations: tau(x) is conjugation by the operator with
    coordinates x. A small lookup table over grid extremals backs fast inverse
    queries; misses fall through to a Choi solve."""

    full = True

    def __init__(self, system: QuantumSystem, table_size: int = 12):
        self.system = system
        self.gauge = None  # canonical choice: the identity automorphism
        rng = np.random.default_rng(7)
        rays = system.effect_cone.sample_extremal_rays(table_size, rng)
        self._table: list[tuple[np.ndarray, np.ndarray]] = []
        for r in rays:
            rep, _ = self.representative(r.astype(complex))
            self._table.append((rep, self.tau(rep)))

    def representative(self, x: np.ndarray):
        from .algebra import phase_representative
        return phase_representative(x)

    def tau(self, rep: np.ndarray) -> np.ndarray:
        X = self.system.complex_matrix(np.asarray(rep, complex))
        return self.system.heisenberg_matrix([X])

    def tau_inv(self, M: np.ndarray) -> np.ndarray:
        for rep, mat in self._table:
            if np.linalg.norm(mat - M) <= 1e-9 * max(1.0, np.linalg.norm(M)):
                return rep
        kraus = self.system.kraus_of(M)
        if len(kraus) != 1:
            raise SolverError("matrix is not an atomic (single-Kraus) transformation")
        rep, _ = self.representative(self.system.complex_coords(kraus[0]))
        return rep

    def blocks(self):
        return [np.arange(self.system.dim)]


class ClassicalCJ:
    """Blockwise (superselected) structure of the classical theory: each
    coordinate is a one-dimensional block with tau(x) = |x|^2 on it. The full
    transformation/positive-form isomorphism fails for the classical theory
    (tau is not injective across blocks); this object still supports the
    blockwise algebra and the hybrid reconstruction."""

    full = False

    def __init__(self, system: System):
        self.system = system
        self.gauge = None

    def representative(self, x: np.ndarray):
        from .algebra import phase_representative
        return phase_representative(x)

    def tau(self, rep: np.ndarray) -> np.ndarray:
        return np.diag(np.abs(np.asarray(rep, complex)) ** 2)

    def tau_inv(self, M: np.ndarray) -> np.ndarray:
        M = np.asarray(M)
        if np.linalg.norm(M - np.diag(np.diagonal(M))) > 1e-9 * max(1.0, np.linalg.norm(M)):
            raise SolverError("matrix is not a blockwise (diagonal) transformation")
        dg = np.real(np.diagonal(M)).astype(float)
        if dg.min() < -1e-12:
            raise SolverError("matrix is not a positive blockwise transformation")
        return np.sqrt(np.clip(dg, 0.0, None)).astype(complex)

    def blocks(self):
        return [np.array([i]) for i in range(self.system.dim)]


# -- constructors --------------------------------------------------------------------


def make_classical(d: int) -> System:
    """Classical d-level system: simplex states, orthant effect cone, and the
    elementary measure-and-reprepare maps plus permutations as generators."""
    if d < 2:
        raise ConelabError("classical systems need d >= 2")
    eye = np.eye(d)
    gens = [np.outer(eye[a], eye[b]) for a in range(d) for b in range(d)]
    if d <= 4:
        perms = [np.array([eye[p[i]] for i in range(d)]).T
                 for p in itertools.permutations(range(d)) if p != tuple(range(d))]
    else:
        cyc = np.roll(eye, 1, axis=0).T
        swap = eye.copy()
        swap[[0, 1]] = swap[[1, 0]]
        perms = [cyc, swap.T]
    sys_ = System(f"classical:{d}", PolyhedralCone(eye), np.ones(d), eye, gens + perms)
    sys_.designated_phi = sum(np.kron(eye[l], eye[l]) for l in range(d)) / d
    sys_.cj = ClassicalCJ(sys_)
    return sys_


def _ic_povm(d: int) -> list[np.ndarray]:
    """d^2 linearly independent rank-one operators rescaled into a POVM:
    l_k = G^(-1/2) Q_k G^(-1/2), G = sum Q_k."""
    kets = np.eye(d, dtype=complex)
    Q = [np.outer(kets[i], kets[i].conj()) for i in range(d)]
    for i in range(d):
        for j in range(i + 1, d):
            for amp in (1.0, 1j):
                v = (kets[i] + amp * kets[j]) / np.sqrt(2)
                Q.append(np.outer(v, v.conj()))
    G = sum(Q)
    w, V = np.linalg.eigh(G)
    Gm = V @ np.diag(w ** -0.5) @ V.conj().T
    return [Gm @ q @ Gm for q in Q]


def _weyl_unitaries(d: int) -> list[np.ndarray]:
    X = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    Z = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return [np.linalg.matrix_power(X, a) @ np.linalg.matrix_power(Z, b)
            for a in range(d) for b in range(d)]


def _spanning_kraus(d: int) -> list[np.ndarray]:
    units = []
    for i in range(d):
        for j in range(d):
            E = np.zeros((d, d), dtype=complex)
            E[i, j] = 1.0
            units.append(E)
    fam = list(units)
    for p in range(len(units)):
        for q in range(p + 1, len(units)):
            fam.append((units[p] + units[q]) / np.sqrt(2))
            fam.append((units[p] + 1j * units[q]) / np.sqrt(2))
    return [A / max(np.linalg.norm(A, 2), 1e-12) for A in fam]


def make_quantum(d: int) -> QuantumSystem:
    """Quantum d-level system in an orthonormal Hermitian operator basis."""
    if d < 2:
        raise ConelabError("quantum systems need d >= 2")
    cone = PsdCone(d)
    e = cone.coords_of(np.eye(d))
    ref = np.array([cone.coords_of(l) for l in _ic_povm(d)])
    gens = [np.eye(d * d)]
    gens += [heisenberg_matrix(cone, [U]) for U in _weyl_unitaries(d)]
    gens += [heisenberg_matrix(cone, [A]) for A in _spanning_kraus(d)]

    sys_ = QuantumSystem(f"quantum:{d}", cone, e, ref, gens,
                         jordan_basis=np.eye(d * d))

    # maximally entangled state with positive amplitudes
    phi = np.eye(d).reshape(-1) / np.sqrt(d)
    Phi_op = np.outer(phi, phi.conj())
    kron_basis = np.array([np.kron(b1, b2) for b1 in cone.basis for b2 in cone.basis])
    sys_.designated_phi = np.array(
        [np.trace(b.conj().T @ Phi_op).real for b in kron_basis])
    sys_.composite_override = PsdCone(d * d, kron_basis)
    sys_.cj = QuantumCJ(sys_)
    return sys_


def make_gbit() -> System:
    """The square-state-space system: 4 extremal states at (±1,±1,1), effect
    cone the 45°-rotated square cone, transformations generated by the square
    symmetries and the measure-and-reprepare maps."""
    egens = np.array([[1, 0, 1], [-1, 0, 1], [0, 1, 1], [0, -1, 1]], float)
    e = np.array([0.0, 0.0, 1.0])
    ref = np.array([
        [0.25, 0.0, 0.25],
        [0.0, 0.25, 0.25],
        [-0.25, -0.25, 0.5],
    ])
    verts = np.array([[1, 1, 1], [1, -1, 1], [-1, 1, 1], [-1, -1, 1]], float)
    gens = []
    for k in range(4):
        c, s = np.cos(k * np.pi / 2), np.sin(k * np.pi / 2)
        R = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]]).round(12)
        gens.append(R)
        gens.append(R @ np.diag([1.0, -1.0, 1.0]))
    for g in egens:
        for v in verts:
            gens.append(np.outer(g / 2.0, v))
    sys_ = System("gbit", PolyhedralCone(egens), e, ref, gens)
    sys_.designated_phi = np.array([[1, 1, 0], [1, -1, 0], [0, 0, 1]], float).reshape(-1)
    return sys_


BUILTIN_NAMES = ("classical:<d>", "quantum:<d>", "gbit")


def get_builtin(name: str) -> System:
    """Resolve a builtin reference of the form classical:d, quantum:d, gbit."""
    name = name.strip()
    if name == "gbit":
        return make_gbit()
    if ":" in name:
        kind, _, arg = name.partition(":")
        try:
            d = int(arg)
        except ValueError as exc:
            raise ConelabError(f"bad builtin dimension {arg!r}") from exc
        if kind == "classical":
            return make_classical(d)
        if kind == "quantum":
            return make_quantum(d)
    raise ConelabError(f"unknown builtin {name!r}; expected one of {BUILTIN_NAMES}")
