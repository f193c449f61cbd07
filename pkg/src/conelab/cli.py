"""Command-line surface.

Commands: validate, check --postulate=<name>, compose, reconstruct, report.
Theories are addressed by builtin name (classical:d, quantum:d, gbit) or a
theory-file path. Exit codes: 0 all pass, 1 usage/parse error, 2 check
failure, 3 internal/solver error. CONELAB_TOLERANCE overrides the default
tolerance. Identical invocations produce byte-identical structured reports.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import algebra as alg
from . import composites as comp
from . import faithful as fth
from . import purify as pur
from .teleport import (completely_faithful_residual, depolarize_check,
                       solve_faithful_effect, teleport as run_teleport)
from .errors import ConelabError, InvariantViolationError
from .reports import SuiteReport
from .systems import State, System, nsf_marginal_check, random_test
from .theories import get_builtin
from .theoryfile import TheoryFileError, load_system

POSTULATES = ("nsf", "pfaith", "faithe", "purify", "ae", "cj", "all")


def _resolve(ref: str) -> System:
    if os.path.exists(ref) or ref.endswith(".json"):
        return load_system(ref)
    return get_builtin(ref)


def _self_composite(S: System) -> comp.BipartiteSystem:
    return comp.compose(S, S, override_effect_cone=S.composite_override)


def _designated_phi(S: System, B: comp.BipartiteSystem, samples: int, seed: int):
    """The theory's faithful-state candidate: designated if present, else the
    symmetric-extremal search."""
    if S.designated_phi is not None:
        return fth.faithful_report(B, np.asarray(S.designated_phi, float),
                                   samples=min(samples, 60), seed=seed)
    return fth.find_pfaith_state(S, B, samples=min(samples, 60), seed=seed)


# -- suites per postulate ------------------------------------------------------------


def _suite_nsf(S: System, seed: int, samples: int) -> SuiteReport:
    rep = SuiteReport(f"marginalizing later tests [{S.name}]")
    rng = np.random.default_rng(seed)
    ok = True
    for k in range(3):
        testB = random_test(S, 2 + k, rng)
        T = S.random_transformation(rng)
        if not nsf_marginal_check(S, testB, T, samples=min(samples, 50),
                                  seed=seed + k):
            ok = False
    rep.add("marginal-independence",
            "summing a later test's outcomes leaves earlier probabilities unchanged",
            "pass" if ok else "fail")
    return rep


def _suite_pfaith(S: System, seed: int, samples: int) -> list[SuiteReport]:
    B = _self_composite(S)
    out = []
    rep = SuiteReport(f"symmetric faithful pure state [{S.name}]")
    found = fth.find_pfaith_state(S, B, samples=min(samples, 60), seed=seed)
    if found is None:
        rep.add("candidate", "a symmetric pure preparationally faithful state exists",
                "fail", witness="no symmetric extremal candidate passes")
        out.append(rep)
        cand = _designated_phi(S, B, samples, seed)
        if cand is not None:
            rep.add("designated-candidate", "designated candidate flags "
                    "(symmetric/pure/faithful)", "info",
                    value={"symmetric": cand.symmetric, "pure": cand.pure,
                           "dyn": list(cand.dyn_faithful),
                           "prep": list(cand.prep_faithful)})
        return out
    rep.add("candidate", "a symmetric pure preparationally faithful state exists",
            "pass", value={"symmetric": found.symmetric, "pure": found.pure,
                           "dyn": list(found.dyn_faithful),
                           "prep": list(found.prep_faithful),
                           "signature": list(found.signature or ())})
    out.append(rep)
    out.append(fth.cone_isomorphism_suite(S, B, found.phi, samples=min(samples, 40),
                                          seed=seed))
    out.append(fth.faithful_marginal_suite(S, B, found.phi, samples=min(samples, 30),
                                           seed=seed))
    return out


def _suite_faithe(S: System, seed: int, samples: int) -> list[SuiteReport]:
    B = _self_composite(S)
    cand = _designated_phi(S, B, samples, seed)
    rep = SuiteReport(f"faithful effect / teleportation [{S.name}]")
    if cand is None or not all(cand.prep_faithful):
        rep.add("prerequisite", "needs a preparationally faithful state",
                "not-applicable")
        return [rep]
    r = solve_faithful_effect(B, cand.phi)
    if not r.feasible:
        rep.add("faithful-effect", f"a physical effect achieves teleportation "
                f"({r.cone_provenance})", "fail", witness=r.witness)
        return [rep]
    rep.add("faithful-effect", f"a physical effect achieves teleportation "
            f"({r.cone_provenance})", "pass", value=r.alpha)
    rng = np.random.default_rng(seed)
    worst_p, worst_s = 0.0, 0.0
    probs = []
    for _ in range(min(samples, 30)):
        w = S.random_state(rng)
        p, outp = run_teleport(B, w, r, cand.phi)
        probs.append(p)
        worst_s = max(worst_s, float(np.linalg.norm(outp.vector - w.vector)))
    worst_p = float(np.var(probs))
    rep.add("state-independence", "teleportation probability independent of the state",
            "pass" if worst_p <= 1e-18 else "fail", residual=worst_p)
    rep.add("state-recovery", "teleported state equals the input",
            "pass" if worst_s <= 1e-9 else "fail", residual=worst_s)
    from .systems import Effect
    obs = [Effect(B, np.kron(l, m), validate=False)
           for l in S.reference_observable for m in S.reference_observable]
    dep = depolarize_check(B, cand.phi, obs, samples=5, seed=seed)
    rep.add("depolarizing", "coarse-grained joint observable maps all states to chi",
            "pass" if dep else "fail")
    return [rep, completely_faithful_residual(B, cand.phi, r,
                                              samples=min(samples, 20), seed=seed)]


def _suite_purify(S: System, seed: int, samples: int) -> list[SuiteReport]:
    B = _self_composite(S)
    suite = pur.check_purify(S, B)
    out = [suite]
    cand = _designated_phi(S, B, samples, seed)
    pf = cand is not None and cand.passes_pfaith
    out.append(pur.atomic_reachability_suite(
        S, B, cand.phi.vector if cand is not None else None, pf, suite.passed))
    return out


def _suite_ae(S: System, seed: int, samples: int) -> SuiteReport:
    rep = SuiteReport(f"atomicity of composition [{S.name}]")
    ok = alg.check_atomicity_closure(S, sample_pairs=min(samples, 20), seed=seed)
    rep.add("closure", "compositions of atomic transformations stay atomic",
            "pass" if ok else "fail")
    return rep


def _suite_cj(S: System, seed: int, samples: int) -> SuiteReport:
    return alg.cj_suite(S, samples=min(samples, 12), seed=seed)


def run_check(S: System, postulate: str, seed: int, samples: int) -> list[SuiteReport]:
    suites: list[SuiteReport] = []
    if postulate in ("nsf", "all"):
        suites.append(_suite_nsf(S, seed, samples))
    if postulate in ("pfaith", "all"):
        suites.extend(_suite_pfaith(S, seed, samples))
    if postulate in ("faithe", "all"):
        suites.extend(_suite_faithe(S, seed, samples))
    if postulate in ("purify", "all"):
        suites.extend(_suite_purify(S, seed, samples))
    if postulate in ("ae", "all"):
        suites.append(_suite_ae(S, seed, samples))
    if postulate in ("cj", "all"):
        suites.append(_suite_cj(S, seed, samples))
    return suites


# -- commands ---------------------------------------------------------------------------


def _emit(payload: dict, suites: list[SuiteReport], fmt: str) -> str:
    if fmt == "structured":
        payload = dict(payload)
        payload["suites"] = [s.to_dict() for s in suites]
        payload["passed"] = all(s.passed for s in suites)
        return json.dumps(payload, sort_keys=True, indent=1)
    lines = [f"{k}: {v}" for k, v in payload.items()]
    lines += [s.format_text() for s in suites]
    lines.append("overall: " + ("PASS" if all(s.passed for s in suites) else "FAIL"))
    return "\n".join(lines)


def cmd_validate(args) -> int:
    try:
        S = _resolve(args.theory)
        S.validate()
    except InvariantViolationError as exc:
        print(f"invalid theory: {exc}", file=sys.stderr)
        return 2
    except (TheoryFileError, ConelabError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 1
    print(f"{S.name}: dim {S.dim}, backend {S.effect_cone.backend}: all invariants hold")
    return 0


def cmd_check(args) -> int:
    S = _resolve(args.theory)
    suites = run_check(S, args.postulate, args.seed, args.samples)
    print(_emit({"theory": S.name, "postulate": args.postulate,
                 "seed": args.seed, "samples": args.samples}, suites, args.format))
    return 0 if all(s.passed for s in suites) else 2


def cmd_compose(args) -> int:
    S1, S2 = _resolve(args.a), _resolve(args.b)
    override = S1.composite_override if (S1.name == S2.name) else None
    B = comp.compose(S1, S2, override_effect_cone=override)
    rep = SuiteReport(f"composite [{B.name}]")
    rep.add("span", "bipartite effect span has dimension dim1*dim2",
            "pass" if comp.check_local_observability(B) else "fail",
            value=B.dim)
    rep.add("provenance", "composite effect cone in use", "info",
            value=B.provenance)
    ns = comp.check_no_signaling(B, samples=min(args.samples, 200), seed=args.seed)
    rep.add("no-signaling", "local deterministic tests cannot move the far marginal",
            "pass" if ns else "fail")
    print(_emit({"left": S1.name, "right": S2.name}, [rep], args.format))
    return 0 if rep.passed else 2


def cmd_reconstruct(args) -> int:
    S = _resolve(args.theory)
    r = alg.reconstruct(S, seed=args.seed)
    rep = SuiteReport(f"reconstruction [{S.name}]")
    rep.add("verdict", "operator model found (quantum / hybrid / not-quantum)",
            "pass" if r.passed else "fail", value=r.verdict)
    rep.add("blocks", "irreducible block dimensions", "info", value=r.block_dims)
    rep.add("hilbert-dims", "per-block Hilbert dimensions", "info",
            value=r.hilbert_dims)
    for k, v in sorted(r.residuals.items()):
        rep.add(f"residual:{k}", "reconstruction residual", "info",
                value=float(f"{v:.6g}"))
    for note in r.notes:
        rep.add("note", "reconstruction note", "info", value=note)
    print(_emit({"theory": S.name}, [rep], args.format))
    return 0 if r.passed else 2


def cmd_report(args) -> int:
    S = _resolve(args.theory)
    suites = run_check(S, "all", args.seed, args.samples)
    r = alg.reconstruct(S, seed=args.seed)
    rec = SuiteReport(f"reconstruction [{S.name}]")
    rec.add("verdict", "operator model found", "info", value=r.verdict)
    rec.add("blocks", "irreducible block dimensions", "info", value=r.block_dims)
    suites.append(rec)
    print(_emit({"theory": S.name, "seed": args.seed, "samples": args.samples},
                suites, args.format))
    return 0 if all(s.passed for s in suites if s is not rec) else 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="conelab",
        description="analyze finite-dimensional probabilistic theories given as "
                    "convex-cone data (builtins: classical:d, quantum:d, gbit)")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--samples", type=int, default=200)
        sp.add_argument("--format", choices=("text", "structured"), default="text")

    sp = sub.add_parser("validate", help="run all domain-type invariants")
    sp.add_argument("theory")
    sp.set_defaults(fn=cmd_validate)

    sp = sub.add_parser("check", help="run a postulate suite")
    sp.add_argument("theory")
    sp.add_argument("--postulate", choices=POSTULATES, default="all")
    common(sp)
    sp.set_defaults(fn=cmd_check)

    sp = sub.add_parser("compose", help="compose two theories and analyze the composite")
    sp.add_argument("a")
    sp.add_argument("b")
    common(sp)
    sp.set_defaults(fn=cmd_compose)

    sp = sub.add_parser("reconstruct", help="run the block reconstruction recipe")
    sp.add_argument("theory")
    common(sp)
    sp.set_defaults(fn=cmd_reconstruct)

    sp = sub.add_parser("report", help="full analysis: all postulates plus reconstruction")
    sp.add_argument("theory")
    common(sp)
    sp.set_defaults(fn=cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except TheoryFileError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 1
    except InvariantViolationError as exc:
        print(f"check failure: {exc}", file=sys.stderr)
        return 2
    except ConelabError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
