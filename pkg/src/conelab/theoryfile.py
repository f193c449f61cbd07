"""JSON theory files.

A single structured document with decimal numbers only: cone backend
descriptor, effect generators (polyhedral), unit effect, reference observable
and transformation generators (row-major matrices), plus an optional bipartite
section carrying a designated faithful-state candidate and a composite cone
override. psd backends use the library's standard orthonormal Hermitian basis,
so every payload stays real.
"""
from __future__ import annotations

import json
import math

import numpy as np

from .cones import PolyhedralCone, PsdCone, hermitian_basis
from .errors import ConelabError
from .systems import System
from .theories import QuantumCJ, QuantumSystem

__all__ = ["TheoryFileError", "load_system", "dump_system"]


class TheoryFileError(ConelabError):
    """Malformed theory file (missing/ill-typed fields, non-finite numbers)."""


def _need(doc: dict, field: str, path: str):
    if field not in doc:
        raise TheoryFileError(f"{path}: missing field {field!r}")
    return doc[field]


def _array(value, field: str, shape_hint: str) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise TheoryFileError(f"field {field!r}: not a numeric array ({exc})") from exc
    if not np.isfinite(arr).all():
        raise TheoryFileError(f"field {field!r}: non-finite number")
    if arr.size == 0:
        raise TheoryFileError(f"field {field!r}: empty (expected {shape_hint})")
    return arr


def _cone_from(doc: dict, field: str, expect_dim: int | None = None):
    kind = _need(doc, "type", field)
    if kind == "polyhedral":
        gens = _array(_need(doc, "generators", field), f"{field}.generators", "matrix")
        return PolyhedralCone(gens)
    if kind == "psd":
        d = int(_need(doc, "hilbert_dim", field))
        cone = PsdCone(d)
    elif kind == "psd-product":
        # psd cone over the product basis B_i ⊗ B_j of two standard factors
        d = int(_need(doc, "factor_hilbert_dim", field))
        fb = hermitian_basis(d)
        cone = PsdCone(d * d, np.array([np.kron(a, b) for a in fb for b in fb]))
    else:
        raise TheoryFileError(f"field {field!r}: unknown backend type {kind!r}")
    if expect_dim is not None and cone.ambient_dim != expect_dim:
        raise TheoryFileError(
            f"field {field!r}: psd backend spans {cone.ambient_dim}, "
            f"expected {expect_dim}")
    return cone


def load_system(path: str) -> System:
    """Parse and validate a theory file into a System (quantum backends get
    the analytic transformation-cone and effect/atomic structures attached)."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise TheoryFileError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise TheoryFileError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise TheoryFileError(f"{path}: top level must be an object")

    name = str(_need(doc, "name", path))
    dim = int(_need(doc, "dim", path))
    backend = _need(doc, "backend", path)
    unit = _array(_need(doc, "unit_effect", path), "unit_effect", f"vector[{dim}]")
    ref = _array(_need(doc, "reference_observable", path), "reference_observable",
                 f"{dim} vectors")
    gens = _array(_need(doc, "transformation_generators", path),
                  "transformation_generators", f"k x {dim} x {dim}")
    if unit.shape != (dim,):
        raise TheoryFileError(f"unit_effect: expected length {dim}, got {unit.shape}")
    if ref.ndim != 2 or ref.shape != (dim, dim):
        raise TheoryFileError(f"reference_observable: expected {dim} x {dim}")
    if gens.ndim != 3 or gens.shape[1:] != (dim, dim):
        raise TheoryFileError(f"transformation_generators: expected k x {dim} x {dim}")

    kind = _need(backend, "type", "backend")
    if kind == "polyhedral":
        egens = _array(_need(doc, "effect_generators", path), "effect_generators",
                       f"k x {dim}")
        if egens.ndim != 2 or egens.shape[1] != dim:
            raise TheoryFileError(f"effect_generators: expected k x {dim}")
        cone = PolyhedralCone(egens)
        sys_ = System(name, cone, unit, ref, list(gens))
    elif kind == "psd":
        cone = _cone_from(backend, "backend", expect_dim=dim)
        sys_ = QuantumSystem(name, cone, unit, ref, list(gens))
        sys_.cj = QuantumCJ(sys_)
    else:
        raise TheoryFileError(f"backend: unknown type {kind!r}")

    bip = doc.get("bipartite")
    if bip is not None:
        phi = bip.get("designated_phi")
        if phi is not None:
            phi = _array(phi, "bipartite.designated_phi", f"vector[{dim * dim}]")
            if phi.shape != (dim * dim,):
                raise TheoryFileError("bipartite.designated_phi: wrong length")
            sys_.designated_phi = phi
        over = bip.get("composite_effect_cone")
        if over is not None:
            sys_.composite_override = _cone_from(over, "bipartite.composite_effect_cone",
                                                 expect_dim=dim * dim)
    return sys_


def dump_system(system: System, path: str):
    """Serialize a System (and its bipartite extras) to the file format."""
    doc: dict = {
        "name": system.name,
        "dim": system.dim,
        "unit_effect": system.unit_effect.tolist(),
        "reference_observable": system.reference_observable.tolist(),
        "transformation_generators": [m.tolist() for m in system.transformation_generators],
    }
    cone = system.effect_cone
    if isinstance(cone, PolyhedralCone):
        doc["backend"] = {"type": "polyhedral"}
        doc["effect_generators"] = cone.generators.tolist()
    elif isinstance(cone, PsdCone):
        if not np.allclose(cone.basis, hermitian_basis(cone.hilbert_dim), atol=1e-12):
            raise ConelabError("only the standard operator basis is serializable")
        doc["backend"] = {"type": "psd", "hilbert_dim": cone.hilbert_dim}
    else:
        raise ConelabError(f"unknown cone backend {cone.backend}")
    bip = {}
    if system.designated_phi is not None:
        bip["designated_phi"] = np.asarray(system.designated_phi).tolist()
    if system.composite_override is not None:
        over = system.composite_override
        if isinstance(over, PsdCone):
            d = int(round(np.sqrt(over.hilbert_dim)))
            fb = hermitian_basis(d)
            prod = np.array([np.kron(a, b) for a in fb for b in fb])
            if d * d == over.hilbert_dim and np.allclose(over.basis, prod, atol=1e-12):
                bip["composite_effect_cone"] = {"type": "psd-product",
                                                "factor_hilbert_dim": d}
            elif np.allclose(over.basis, hermitian_basis(over.hilbert_dim), atol=1e-12):
                bip["composite_effect_cone"] = {"type": "psd",
                                                "hilbert_dim": over.hilbert_dim}
            else:
                raise ConelabError("composite override basis is not serializable")
        else:
            bip["composite_effect_cone"] = {"type": "polyhedral",
                                            "generators": over.generators.tolist()}
    if bip:
        doc["bipartite"] = bip
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")
