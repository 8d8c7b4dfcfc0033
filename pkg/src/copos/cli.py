"""Command-line entry point ``copos``.

Exit codes: 0 success (or an exact reformulation), 1 unknown / not exact /
solver hit its iteration cap, 2 bad input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from fractions import Fraction

from . import raycone
from .dnn import ConicProblem, InconsistentConstraints, NonConvergence, ProblemTooLarge, SolveStatus, solve_dnn
from .gram import UncoveredMonomial
from .hierarchy import HintInvalid, ModelError, PopModel, Verdict, build_face_chain, reformulation_verdict
from .lp import NumericalFailure
from .oracle import EmptyFeasibleGrid, OracleResult, UnsupportedStructure, brute_force_qop, grid_search_pop
from .poly import DegreeError
from .problems import ProblemFileError, comb_conditions_pop, load_problem, simplex_qop
from .qop import QopModel, check_burer_conditions, to_pop

EXIT_OK, EXIT_INCONCLUSIVE, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("copos")


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, default=_jsonable))


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if hasattr(v, "value"):
        return v.value
    return str(v)


def _ext(v) -> str:
    if v == math.inf:
        return "+inf"
    if v == -math.inf:
        return "-inf"
    return str(v)


# ---------------------------------------------------------------------------
# shared pipeline pieces


def _pop(model, omega=None) -> PopModel:
    if isinstance(model, QopModel):
        return to_pop(model)
    if omega is not None and omega != model.omega:
        return PopModel(model.f, omega=omega, hints=model.hints, name=model.name)
    return model


def _conic(model, args) -> ConicProblem:
    pop = _pop(model, args.omega)
    kind = "full" if isinstance(model, QopModel) else args.basis
    return ConicProblem.from_pop(pop, gram_mode=args.gram, basis_kind=kind)


def _oracle(model, args) -> OracleResult:
    if isinstance(model, QopModel):
        return brute_force_qop(model)
    return grid_search_pop(_pop(model, args.omega), resolution=args.grid)


def _try_oracle(model, args):
    try:
        return _oracle(model, args)
    except (UnsupportedStructure, EmptyFeasibleGrid, ValueError) as exc:
        log.info("oracle unavailable: %s", exc)
        return None


def _certificate(model, args):
    pop = _pop(model, args.omega)
    cert = build_face_chain(pop, seed=args.seed)
    out = {"model": pop.name, "n": pop.n, "m": pop.m, "omega": pop.omega}
    if isinstance(model, QopModel):
        out["burer_conditions"] = check_burer_conditions(model).to_json()
    verdict = reformulation_verdict(pop, cert)
    if verdict is Verdict.UNKNOWN and cert.chain_ok and cert.cond2.falsified:
        oracle = _try_oracle(model, args)
        if oracle is not None:
            verdict = reformulation_verdict(pop, cert, oracle.value)
    out["certificate"] = cert.to_json()
    out["envelope"] = cert.envelopes[-1].to_json() if cert.envelopes else None
    out["verdict"] = verdict.value
    return out, cert


def _verdict_code(verdict: str) -> int:
    return EXIT_OK if verdict in (Verdict.EXACT.value, Verdict.EXACT_BECAUSE_UNBOUNDED.value) else EXIT_INCONCLUSIVE


def _solve_code(status: SolveStatus) -> int:
    return {SolveStatus.CONVERGED: EXIT_OK, SolveStatus.MAX_ITER: EXIT_INCONCLUSIVE}.get(status, EXIT_NUMERIC)


# ---------------------------------------------------------------------------
# commands


def cmd_reformulate(args) -> int:
    model = load_problem(args.problem, args.omega)
    cp = _conic(model, args)
    out = cp.summary()
    out["basis"] = cp.basis.to_json()
    _emit(out)
    return EXIT_OK


def cmd_check_faces(args) -> int:
    model = load_problem(args.problem, args.omega)
    out, _ = _certificate(model, args)
    _emit(out)
    return _verdict_code(out["verdict"])


def cmd_solve_dnn(args) -> int:
    model = load_problem(args.problem, args.omega)
    res = solve_dnn(_conic(model, args), tol=args.tol, max_iter=args.max_iter, step=args.step, certify=args.certify)
    _emit(res.to_json(with_matrix=args.matrix))
    return _solve_code(res.status)


def cmd_oracle(args) -> int:
    model = load_problem(args.problem, args.omega)
    _emit(_oracle(model, args).to_json())
    return EXIT_OK


def _demo_ray_cone() -> tuple[dict, bool]:
    K = raycone.example_cone()
    tests = [(1, 0), (0, 1), (1, 1), (2, -1), (0, 0), (-1, 0), (-1, 2), (-3, 1)]
    tests = [tuple(Fraction(v) for v in P) for P in tests]
    ok = True
    rows_a = []
    sa = raycone.slice(K, raycone.EXAMPLE_H0_A, 1)
    ok &= set(sa.slice_atoms) == {(-2, 2), (1, Fraction(1, 2)), (2, 0)}
    for P in tests:
        z0 = raycone.zeta_nonconvex(K, raycone.EXAMPLE_H0_A, P, 0)
        ok &= z0 == 0
        rows_a.append({"P": P, "zeta_K0_0": _ext(z0)})
    sb = raycone.slice(K, raycone.EXAMPLE_H0_B, 1)
    ok &= set(sb.slice_atoms) == {(-1, 1), (2, 1)}
    rows_b = []
    for P in tests:
        rep = raycone.verify_decomposition(K, raycone.EXAMPLE_H0_B, P)
        p1, p2 = P
        if p1 >= 0:
            want_k, want_co = -p1 + p2, -p1 + p2
            ok &= raycone.convex_argmin(K, raycone.EXAMPLE_H0_B, P) == (-1, 1) or p1 == 0
        else:
            want_k, want_co = 2 * p1 + p2, -math.inf
        ok &= rep.zeta_k1 == want_k and rep.zeta_co1 == want_co and rep.ok
        rows_b.append(
            {
                "Q0": P,
                "zeta_K0_1": _ext(rep.zeta_k1),
                "zeta_coK0_1": _ext(rep.zeta_co1),
                "zeta_K0_0": _ext(rep.zeta_k0),
                "condition_II0": rep.condition_ii0,
                "identity_holds": rep.additive_identity,
                "iff_holds": rep.iff_consistent,
            }
        )
    report = {
        "case_a": {"H0": ["1/2", "1"], "slice": sorted(sa.slice_atoms), "rows": rows_a},
        "case_b": {"H0": ["0", "1"], "slice": sorted(sb.slice_atoms), "recession": list(sb.recession_atoms), "rows": rows_b},
        "reproduced": bool(ok),
    }
    return report, bool(ok)


def _demo_simplex(args) -> tuple[dict, bool]:
    q = simplex_qop()
    out, _ = _certificate(q, args)
    oracle = brute_force_qop(q)
    res = solve_dnn(ConicProblem.from_pop(to_pop(q), basis_kind="full"), tol=args.tol, max_iter=args.max_iter)
    out["oracle"] = oracle.to_json()
    out["dnn"] = res.to_json()
    ok = (
        out["burer_conditions"]["ok"]
        and out["certificate"]["chain_ok"]
        and out["verdict"] == Verdict.EXACT.value
        and oracle.value == -1
        and abs(res.lower_bound + 1) <= 1e-4
    )
    out["reproduced"] = bool(ok)
    return out, bool(ok)


def _demo_comb(args) -> tuple[dict, bool]:
    pop = comb_conditions_pop()
    out, cert = _certificate(pop, args)
    box = cert.envelopes[1].box
    out["S1_box"] = [[str(iv.lo), str(iv.hi)] for iv in box]
    oracle = grid_search_pop(pop, resolution=args.grid)
    res = solve_dnn(ConicProblem.from_pop(pop), tol=args.tol, max_iter=args.max_iter, step=args.step)
    out["oracle"] = oracle.to_json()
    out["dnn"] = res.to_json()
    ok = (
        out["certificate"]["chain_ok"]
        and out["verdict"] == Verdict.EXACT.value
        and all(iv.lo == 0 and iv.hi == 1 for iv in box)
        and abs(oracle.value - 1) <= 1e-9
        and res.lower_bound <= 1 + 1e-4
    )
    out["reproduced"] = bool(ok)
    return out, bool(ok)


DEMOS = {
    "ray-cone": lambda args: _demo_ray_cone(),
    "simplex-qop": _demo_simplex,
    "comb-conditions": _demo_comb,
}
# names used by the published command-line interface
DEMO_ALIASES = {"example-3.1": "ray-cone", "example-6.1": "simplex-qop", "example-6.2": "comb-conditions"}


def cmd_demo(args) -> int:
    report, ok = DEMOS[DEMO_ALIASES.get(args.name, args.name)](args)
    _emit(report)
    return EXIT_OK if ok else EXIT_INCONCLUSIVE


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--omega", type=int, default=None, help="half-degree of the homogenization")
    common.add_argument("--tol", type=float, default=1e-7)
    common.add_argument("--max-iter", type=int, default=20000)
    common.add_argument("--step", type=float, default=1.0, help="ADMM penalty parameter")
    common.add_argument("--grid", type=int, default=33, help="grid points per axis for the POP oracle")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--basis", choices=("cover", "full"), default="cover")
    common.add_argument("--gram", choices=("even", "single"), default="even")
    common.add_argument("--certify", action="store_true", help="also report the residual-penalized bound")

    parser = argparse.ArgumentParser(prog="copos", description="Conic reformulations of polynomial optimization problems.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, helptext in (
        ("reformulate", cmd_reformulate, "summarize the conic problem"),
        ("check-faces", cmd_check_faces, "certify the face chain and exactness"),
        ("solve-dnn", cmd_solve_dnn, "solve the doubly nonnegative relaxation"),
        ("oracle", cmd_oracle, "brute-force reference value"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("problem", help="problem JSON file")
        if name == "solve-dnn":
            p.add_argument("--matrix", action="store_true", help="include the solution matrix")
        p.set_defaults(func=fn)
    p = sub.add_parser("demo", parents=[common], help="reproduce a worked example")
    p.add_argument("name", choices=(*DEMOS, *DEMO_ALIASES))
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("COPOS_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ProblemFileError, ModelError, HintInvalid, DegreeError, UncoveredMonomial, ProblemTooLarge) as exc:
        print(f"copos: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalFailure, NonConvergence, InconsistentConstraints) as exc:
        print(f"copos: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
