"""Pointed convex cones in finite-dimensional real vector spaces.

Two backends cover every theory handled by this library:

* polyhedral-V: the cone is the conic hull of a finite generator list.
  Membership is a nonnegative least-squares feasibility problem, duality is
  computed exactly by the double-description method, extremal rays by
  per-generator redundancy elimination.

* psd-embedded: the cone is the image of the positive-semidefinite cone of
  Hermitian d x d matrices under an injective linear embedding into the
  ambient coordinates. Membership reconstructs the least-squares preimage and
  checks its spectrum; the dual is the psd cone over the dual embedding basis
  (the cone is self-dual when the embedding is orthonormal). Such cones are
  never converted to polyhedral form.

All operations are pure functions of immutable inputs.
"""
from __future__ import annotations

import numpy as np
from scipy.optimize import nnls

from .config import DEFAULT_GENERATOR_BUDGET, DEFAULT_PSD_SAMPLES, get_tolerance
from .errors import (
    ConelabError,
    DimensionMismatchError,
    InvariantViolationError,
    NotInvertibleError,
    ResourceLimitError,
    SolverError,
)

__all__ = [
    "Cone",
    "PolyhedralCone",
    "PsdCone",
    "check_cone_isomorphism",
    "conic_member",
    "dual_generators",
    "hermitian_basis",
]


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=a.dtype, copy=True)
    a.flags.writeable = False
    return a


def conic_member(generators: np.ndarray, v: np.ndarray, tol: float) -> bool:
    """Is v a nonnegative combination of the rows of ``generators``?

    Solved as min ||G^T c - v|| over c >= 0; membership means the residual is
    below tolerance (relative to the scale of v).
    """
    G = np.asarray(generators, dtype=float)
    v = np.asarray(v, dtype=float)
    if G.shape[1] != v.shape[0]:
        raise DimensionMismatchError(f"generator dim {G.shape[1]} != vector dim {v.shape[0]}")
    try:
        _, resid = nnls(G.T, v)
    except Exception as exc:  # pragma: no cover - scipy failure is exceptional
        raise SolverError(f"nnls failed: {exc}") from exc
    return bool(resid <= tol * max(1.0, float(np.linalg.norm(v))))


def _dedupe_rays(rays: list[np.ndarray], tol: float) -> np.ndarray:
    """Normalize to unit norm and drop duplicates (same ray, any positive scale)."""
    out: list[np.ndarray] = []
    for r in rays:
        n = np.linalg.norm(r)
        if n <= tol:
            continue
        r = r / n
        if not any(np.linalg.norm(r - s) <= 1e-7 for s in out):
            out.append(r)
    if not out:
        return np.zeros((0, rays[0].shape[0] if rays else 0))
    return np.array(out)


def dual_generators(
    generators: np.ndarray,
    budget: int = DEFAULT_GENERATOR_BUDGET,
    tol: float | None = None,
) -> np.ndarray:
    """Generators of the dual cone {y : <g_i, y> >= 0 for all i}.

    Incremental double description. The representation kept at every step is a
    pair (lines, rays) generating the cone of all points satisfying the
    constraints processed so far:

    * lines satisfy every processed constraint with equality (the lineality
      space); initially they are a basis of the whole space;
    * rays satisfy them with >= 0, and each ray records its tight set (the
      processed constraints it satisfies with equality), which drives the
      combinatorial adjacency test when a constraint splits the ray set.

    Processing constraint a: if some line has a nonzero value on a, that line
    is consumed (it becomes a ray after sign-fixing, all other lines and rays
    are sheared to the hyperplane a=0). Otherwise rays are partitioned by the
    sign of a; adjacent (+,-) pairs combine into new boundary rays and the
    negative side is dropped. Adjacency of r+ and r-: no third ray is tight on
    every constraint where both are tight.

    Raises ResourceLimitError if the intermediate ray count exceeds budget.
    The input cone must be full-dimensional, otherwise the dual contains lines
    and cannot be represented by a pointed generator list.
    """
    tol = get_tolerance(tol)
    G = np.asarray(generators, dtype=float)
    if G.ndim != 2 or G.shape[0] == 0:
        raise ConelabError("need a nonempty generator matrix")
    n = G.shape[1]
    if np.linalg.matrix_rank(G, tol=1e-10) < n:
        raise ConelabError(
            "dual of a non-full-dimensional cone is not pointed; not supported"
        )
    lines: list[np.ndarray] = [np.eye(n)[i] for i in range(n)]
    rays: list[np.ndarray] = []
    tight: list[set[int]] = []

    for idx in range(G.shape[0]):
        a = G[idx]
        if np.linalg.norm(a) <= tol:
            continue
        line_vals = [float(a @ l) for l in lines]
        if lines and max(abs(v) for v in line_vals) > tol * np.linalg.norm(a):
            j = int(np.argmax([abs(v) for v in line_vals]))
            l0, v0 = lines[j], line_vals[j]
            if v0 < 0:
                l0, v0 = -l0, -v0
            new_lines = [
                l - (float(a @ l) / v0) * l0 for k, l in enumerate(lines) if k != j
            ]
            rays = [r - (float(a @ r) / v0) * l0 for r in rays]
            # Sheared rays now sit on a=0; lines were tight on all earlier
            # constraints, so earlier tight sets are unchanged.
            tight = [s | {idx} for s in tight]
            rays.append(l0)
            tight.append(set(range(idx)))
            lines = new_lines
            continue

        vals = np.array([float(a @ r) for r in rays])
        scale = tol * max(1.0, float(np.linalg.norm(a)))
        plus = [k for k, v in enumerate(vals) if v > scale]
        minus = [k for k, v in enumerate(vals) if v < -scale]
        zero = [k for k in range(len(rays)) if k not in plus and k not in minus]
        if not minus:
            for k in zero:
                tight[k].add(idx)
            continue
        new_rays: list[np.ndarray] = []
        new_tight: list[set[int]] = []
        for p in plus:
            for m in minus:
                common = tight[p] & tight[m]
                adjacent = not any(
                    k not in (p, m) and common <= tight[k] for k in range(len(rays))
                )
                if not adjacent:
                    continue
                w = vals[p] * rays[m] - vals[m] * rays[p]
                nw = np.linalg.norm(w)
                if nw <= tol:
                    continue
                new_rays.append(w / nw)
                new_tight.append(common | {idx})
        keep = plus + zero
        rays = [rays[k] for k in keep] + new_rays
        tight = [tight[k] | ({idx} if k in zero else set()) for k in keep] + new_tight
        if len(rays) > budget:
            raise ResourceLimitError(
                f"double description exceeded the generator budget ({budget})"
            )

    if lines:
        raise ConelabError("dual cone is not pointed (input not full-dimensional)")
    return _dedupe_rays(rays, tol)


class Cone:
    """Common interface of the two cone backends."""

    backend: str
    ambient_dim: int
    tolerance: float

    def member(self, v: np.ndarray, tol: float | None = None) -> bool:
        raise NotImplementedError

    def dual(self, budget: int = DEFAULT_GENERATOR_BUDGET) -> "Cone":
        raise NotImplementedError

    def sample_extremal_rays(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """A (count, ambient_dim) array of points on extremal rays."""
        raise NotImplementedError

    def contains_cone_map(self, M: np.ndarray, other: "Cone",
                          samples: int = DEFAULT_PSD_SAMPLES,
                          rng: np.random.Generator | None = None,
                          tol: float | None = None) -> bool:
        """Does M map ``other`` into this cone? Exact on polyhedral sources,
        sampled on psd sources."""
        tol = get_tolerance(tol)
        if isinstance(other, PolyhedralCone):
            return all(self.member(M @ g, tol) for g in other.generators)
        rng = rng or np.random.default_rng(0)
        rays = other.sample_extremal_rays(samples, rng)
        return all(self.member(M @ r, tol) for r in rays)


class PolyhedralCone(Cone):
    """Conic hull of a finite list of generators (one per row)."""

    backend = "polyhedral-V"

    def __init__(self, generators, tolerance: float | None = None, validate: bool = True):
        self.tolerance = get_tolerance(tolerance)
        G = np.asarray(generators, dtype=float)
        if G.ndim != 2 or G.shape[0] == 0:
            raise ConelabError("polyhedral cone needs a nonempty 2-d generator array")
        self.generators = _freeze(G)
        self.ambient_dim = G.shape[1]
        self._halfspaces: np.ndarray | None = None
        if validate:
            self._validate()

    def _validate(self):
        tol = self.tolerance
        for i, g in enumerate(self.generators):
            if np.linalg.norm(g) <= tol:
                raise InvariantViolationError("generator nonzero", f"generator {i}")
        for i, g in enumerate(self.generators):
            if conic_member(self.generators, -g, tol):
                raise InvariantViolationError("cone is pointed", f"-g_{i} lies in the cone")

    def member(self, v, tol=None) -> bool:
        return conic_member(self.generators, np.asarray(v, float), get_tolerance(tol) if tol is not None else self.tolerance)

    def halfspaces(self, budget: int = DEFAULT_GENERATOR_BUDGET) -> np.ndarray:
        """Inequality description: rows h with the cone = {x : h @ x >= 0}.

        These are exactly the dual cone's generators; cached.
        """
        if self._halfspaces is None:
            self._halfspaces = _freeze(dual_generators(self.generators, budget, self.tolerance))
        return self._halfspaces

    def dual(self, budget: int = DEFAULT_GENERATOR_BUDGET) -> "PolyhedralCone":
        return PolyhedralCone(self.halfspaces(budget), tolerance=self.tolerance, validate=False)

    def extremal_rays(self) -> np.ndarray:
        """Minimal generator list: g is kept iff it is not a conic combination
        of the others. Generators are processed in input order and compared at
        unit Euclidean norm."""
        gens = [g / np.linalg.norm(g) for g in self.generators]
        keep = list(range(len(gens)))
        for i in range(len(gens)):
            if i not in keep:
                continue
            others = [gens[j] for j in keep if j != i]
            if others and conic_member(np.array(others), gens[i], self.tolerance):
                keep.remove(i)
        return np.array([gens[i] for i in keep])

    def sample_extremal_rays(self, count: int, rng: np.random.Generator) -> np.ndarray:
        rays = self.extremal_rays()
        if len(rays) >= count:
            return rays[:count]
        return rays

    def is_extremal(self, v: np.ndarray, tol: float | None = None) -> bool:
        """Is v on an extremal ray? True iff the face of the cone in which v
        lies (cut out by the inequalities tight at v) is one-dimensional."""
        tol = get_tolerance(tol) if tol is not None else self.tolerance
        v = np.asarray(v, float)
        if not self.member(v, tol):
            return False
        H = self.halfspaces()
        vals = H @ v
        scale = tol * max(1.0, float(np.linalg.norm(v)))
        tight_rows = H[np.abs(vals) <= 10 * scale]
        if tight_rows.size == 0:
            return self.ambient_dim == 1
        # face dimension = nullity of the tight constraint matrix
        rank = np.linalg.matrix_rank(tight_rows, tol=1e-8)
        return (self.ambient_dim - rank) == 1


def hermitian_basis(d: int) -> np.ndarray:
    """Orthonormal basis of Hermitian d x d matrices (Hilbert-Schmidt).

    Order: identity/sqrt(d), then for each pair j<k the symmetric and
    antisymmetric elements, then the diagonal traceless ladder. Shape (d*d, d, d).
    """
    mats = [np.eye(d, dtype=complex) / np.sqrt(d)]
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = m[k, j] = 1 / np.sqrt(2)
            mats.append(m)
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = -1j / np.sqrt(2)
            m[k, j] = 1j / np.sqrt(2)
            mats.append(m)
    for l in range(1, d):
        m = np.zeros((d, d), dtype=complex)
        m[:l, :l] = np.eye(l)
        m[l, l] = -l
        mats.append(m / np.sqrt(l * (l + 1)))
    return np.array(mats)


class PsdCone(Cone):
    """Image of the Hermitian psd cone under a linear embedding.

    ``basis`` is a stack of Hermitian matrices B_k; the embedding sends the
    coordinate vector x to sum_k x_k B_k. Injectivity (full column rank of the
    flattened stack) is an invariant. With an orthonormal basis the cone is
    self-dual; otherwise the dual is the psd cone over the dual basis.
    """

    backend = "psd-embedded"

    def __init__(self, hilbert_dim: int, basis: np.ndarray | None = None,
                 tolerance: float | None = None, validate: bool = True):
        self.tolerance = get_tolerance(tolerance)
        self.hilbert_dim = int(hilbert_dim)
        if basis is None:
            basis = hermitian_basis(self.hilbert_dim)
        basis = np.asarray(basis, dtype=complex)
        if basis.ndim != 3 or basis.shape[1:] != (self.hilbert_dim, self.hilbert_dim):
            raise ConelabError("basis must be a stack of d x d matrices")
        self.basis = _freeze(basis)
        self.ambient_dim = basis.shape[0]
        # flattened embedding matrix, columns indexed by ambient coordinates
        self._emb = basis.reshape(self.ambient_dim, -1).T
        self._pinv = np.linalg.pinv(self._emb)
        if validate:
            self._validate()

    def _validate(self):
        for k, b in enumerate(self.basis):
            if np.linalg.norm(b - b.conj().T) > 1e-12 * max(1.0, np.linalg.norm(b)):
                raise InvariantViolationError("embedding basis Hermitian", f"element {k}")
        if np.linalg.matrix_rank(self._emb, tol=1e-10) < self.ambient_dim:
            raise InvariantViolationError("embedding injective (full column rank)")

    @property
    def orthonormal(self) -> bool:
        g = self._emb.conj().T @ self._emb
        return bool(np.allclose(g, np.eye(self.ambient_dim), atol=1e-10))

    def matrix_of(self, v: np.ndarray) -> np.ndarray:
        """Least-squares Hermitian preimage of the coordinate vector v."""
        v = np.asarray(v, dtype=float)
        if v.shape[0] != self.ambient_dim:
            raise DimensionMismatchError(f"expected dim {self.ambient_dim}, got {v.shape[0]}")
        M = np.tensordot(v.astype(complex), self.basis, axes=(0, 0))
        return 0.5 * (M + M.conj().T)

    def coords_of(self, M: np.ndarray) -> np.ndarray:
        """Coordinates of a Hermitian matrix under the embedding (least squares)."""
        x = self._pinv @ np.asarray(M, complex).reshape(-1)
        if np.max(np.abs(x.imag)) > 1e-9:
            raise SolverError("matrix does not lie in the embedded real span")
        return x.real

    def member(self, v, tol=None) -> bool:
        tol = get_tolerance(tol) if tol is not None else self.tolerance
        v = np.asarray(v, dtype=float)
        M = self.matrix_of(v)
        # least-squares preimage must reproduce v (exact for square embeddings)
        resid = np.linalg.norm(self.coords_of(M) - v)
        if resid > max(tol, 1e-9) * max(1.0, float(np.linalg.norm(v))):
            return False
        w = np.linalg.eigvalsh(M)
        return bool(w.min() >= -max(tol, 1e-9) * max(1.0, abs(w).max() if w.size else 1.0))

    def dual(self, budget: int = DEFAULT_GENERATOR_BUDGET) -> "PsdCone":
        if self.orthonormal:
            return self
        # dual basis: HS(Bdual_j, B_k) = delta_jk
        g = self._emb.conj().T @ self._emb
        dual_emb = self._emb @ np.linalg.inv(g).conj().T
        dual_basis = dual_emb.T.reshape(self.ambient_dim, self.hilbert_dim, self.hilbert_dim)
        return PsdCone(self.hilbert_dim, dual_basis, tolerance=self.tolerance, validate=False)

    def extremal_ray_grid(self) -> np.ndarray:
        """Deterministic rank-one extremals: basis kets and two-level superpositions."""
        d = self.hilbert_dim
        kets = [np.eye(d, dtype=complex)[i] for i in range(d)]
        vs = list(kets)
        for j in range(d):
            for k in range(j + 1, d):
                for c in (1.0, -1.0, 1j, -1j):
                    vs.append((kets[j] + c * kets[k]) / np.sqrt(2))
        return np.array([self.coords_of(np.outer(v, v.conj())) for v in vs])

    def sample_extremal_rays(self, count: int, rng: np.random.Generator) -> np.ndarray:
        grid = self.extremal_ray_grid()
        rays = list(grid[:count])
        d = self.hilbert_dim
        while len(rays) < count:
            v = rng.normal(size=d) + 1j * rng.normal(size=d)
            v /= np.linalg.norm(v)
            rays.append(self.coords_of(np.outer(v, v.conj())))
        return np.array(rays)

    def is_extremal(self, v: np.ndarray, tol: float | None = None) -> bool:
        """Extremal iff the preimage is (numerically) rank one."""
        tol = get_tolerance(tol) if tol is not None else self.tolerance
        if not self.member(v, tol):
            return False
        M = self.matrix_of(v)
        w = np.linalg.eigvalsh(M)
        return bool(w[-1] > 0 and (np.abs(w[:-1]) <= 1e-7 * w[-1]).all())


def check_cone_isomorphism(
    map_matrix: np.ndarray,
    src: Cone,
    dst: Cone,
    samples: int = DEFAULT_PSD_SAMPLES,
    seed: int = 0,
    tol: float | None = None,
) -> bool:
    """True iff ``map_matrix`` sends src into dst and its inverse sends dst
    into src (cone-preserving in both directions).

    Polyhedral cones are checked exactly on their generators; psd cones on the
    deterministic rank-one grid plus ``samples`` random extremals. A singular
    map raises NotInvertibleError rather than returning False.
    """
    tol = get_tolerance(tol)
    M = np.asarray(map_matrix, dtype=float)
    if M.shape[0] != M.shape[1]:
        raise DimensionMismatchError("cone isomorphism needs a square matrix")
    if M.shape[0] != src.ambient_dim or M.shape[0] != dst.ambient_dim:
        raise DimensionMismatchError("map size does not match the cones")
    svals = np.linalg.svd(M, compute_uv=False)
    if svals[-1] <= tol * max(1.0, svals[0]):
        raise NotInvertibleError("map is singular within tolerance")
    Minv = np.linalg.inv(M)
    rng = np.random.default_rng(seed)

    def rays_of(c: Cone) -> np.ndarray:
        if isinstance(c, PolyhedralCone):
            return c.generators
        return c.sample_extremal_rays(samples, rng)

    fwd = all(dst.member(M @ r, tol) for r in rays_of(src))
    if not fwd:
        return False
    return all(src.member(Minv @ r, tol) for r in rays_of(dst))
