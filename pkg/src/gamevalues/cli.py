"""Command-line interface: game construction, value computation, certificate
verification, and report emission.

Exit codes: 0 success, 2 input/validation failure, 3 solver non-convergence
(reports are still emitted, flagged "unconverged").
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .acceptance import RUNTIME_LIMITS, run_all
from .algebra import ValidationError
from .catalog import as_unique, resolve_digraph, resolve_game
from .classical import det_value, perfect_sync_group_strategy, sync_det_value
from .digraphs import dcut, has_perfect_strategy
from .games import GroupGame
from .quantum_bounds import q1_bipartite_search, q1_search, qc_sync_upper_bound
from .reports import (BoundReport, complex_matrix_to_json, csv_of_reports,
                      dumps_reports, verify_certificate)
from .vect_sdp import (build_program, extract_vectors, round_to_deterministic,
                       rounding_threshold, solve_vect)

VALUE_KINDS = ("det", "det-sync", "vect", "vect-sync", "q1", "q1-sync", "qc-upper")
SQUARE_KINDS = ("det-sync", "vect-sync", "q1", "q1-sync", "qc-upper")


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("GAMEVALUES_THREADS")
    if env is not None and env.isdigit():
        return max(1, int(env))
    return os.cpu_count() or 1


def _emit(args, text: str) -> None:
    sys.stdout.write(text)


def _run_value(args) -> int:
    game_any, pi, graph, game_id = resolve_game(args.game, args.density)
    game = as_unique(game_any)
    kinds = [k.strip() for k in args.kind.split(",") if k.strip()]
    for kind in kinds:
        if kind not in VALUE_KINDS:
            raise ValidationError(f"unknown value kind {kind!r}; choose from {VALUE_KINDS}")
        if kind in SQUARE_KINDS and game.nx != game.ny:
            raise ValidationError(f"kind {kind!r} needs a square game")
    reports = []
    exit_code = 0
    seed = args.seed
    for kind in kinds:
        if kind == "det":
            rep = det_value(game, pi)
            reports.append(BoundReport(
                game=game_id, kind=kind, bound="exact", value=rep.value, tol=0.0,
                certificate={"strategy": rep.best.to_json()},
                extra={"explored": rep.explored}).to_json())
        elif kind == "det-sync":
            rep = sync_det_value(game, pi)
            reports.append(BoundReport(
                game=game_id, kind=kind, bound="exact", value=rep.value, tol=0.0,
                certificate={"strategy": rep.best.to_json()},
                extra={"explored": rep.explored}).to_json())
        elif kind in ("vect", "vect-sync"):
            mode = "synchronous" if kind == "vect-sync" else "bipartite"
            sol = solve_vect(build_program(game, pi, mode), tol=args.tol,
                             max_iters=args.max_iters, seed=seed)
            cert = {"mode": mode}
            if args.emit_gram:
                cert["gram"] = sol.gram.tolist()
            if sol.status == "unconverged":
                exit_code = 3
            reports.append(BoundReport(
                game=game_id, kind=kind, bound="upper", value=sol.value, tol=args.tol,
                status=sol.status, certificate=cert,
                extra={"residuals": sol.residuals, "iterations": sol.iterations}).to_json())
        elif kind == "q1-sync":
            warm = []
            if game.k ** game.nx <= 100_000:
                warm = [sync_det_value(game, pi).best.hA]
            val, frame = q1_search(game, pi, d=args.d, restarts=args.restarts,
                                   seed=seed, warm_starts=warm, threads=_threads(args))
            reports.append(BoundReport(
                game=game_id, kind=kind, bound="lower", value=val, tol=1e-9,
                certificate={"frame": frame.to_json()}).to_json())
        elif kind == "q1":
            val, cert = q1_bipartite_search(game, pi, d=args.d,
                                            restarts=args.restarts, seed=seed)
            alice, bob, state = cert
            payload = {"bipartite_frames": {
                "alice": alice.to_json(), "bob": bob.to_json(),
                "state": [[float(c.real), float(c.imag)] for c in state]}}
            reports.append(BoundReport(
                game=game_id, kind=kind, bound="lower", value=val, tol=1e-9,
                certificate=payload).to_json())
        elif kind == "qc-upper":
            bound, z = qc_sync_upper_bound(game, pi, iters=args.max_iters_qc)
            reports.append(BoundReport(
                game=game_id, kind=kind, bound="upper", value=bound, tol=1e-9,
                certificate={"Z": z.tolist()}).to_json())
    if args.format == "csv":
        _emit(args, csv_of_reports(reports))
    else:
        _emit(args, dumps_reports(reports))
    return exit_code


def _run_perfect_check(args) -> int:
    game_any, pi, graph, game_id = resolve_game(args.game, args.density)
    out: dict = {"game": game_id}
    if graph is not None:
        perfect, labelling = has_perfect_strategy(graph)
        out["perfect"] = bool(perfect)
        if perfect:
            out["labelling"] = list(labelling)
    elif isinstance(game_any, GroupGame) and game_any.is_synchronous():
        w = perfect_sync_group_strategy(game_any, pi)
        out["perfect"] = w is not None
        if w is not None:
            out["strategy"] = list(w)
    else:
        rep = det_value(as_unique(game_any), pi)
        out["perfect"] = rep.value == 1
        if out["perfect"]:
            out["strategy"] = rep.best.to_json()
    _emit(args, json.dumps(out, sort_keys=True, indent=2) + "\n")
    return 0


def _run_dcut(args) -> int:
    graph = resolve_digraph(args.game)
    value = dcut(graph)
    arcs = len(graph.arcs)
    out = {
        "game": args.game,
        "dcut": value,
        "arcs": arcs,
        "sync_value": {"num": Fraction(value, arcs).numerator,
                       "den": Fraction(value, arcs).denominator},
        "convention": "largest number of arcs (x,y) with w(y) = w(x)+1 over 3-labellings w",
    }
    _emit(args, json.dumps(out, sort_keys=True, indent=2) + "\n")
    return 0


def _run_round(args) -> int:
    game_any, pi, graph, game_id = resolve_game(args.game, args.density)
    game = as_unique(game_any)
    exit_code = 0
    if args.certificate:
        data = json.loads(Path(args.certificate).read_text())
        cert = data.get("certificate", data)
        if "gram" not in cert:
            raise ValidationError("round needs a certificate carrying a gram matrix")
        mode = cert.get("mode", "bipartite")
        prog = build_program(game, pi, mode)
        gram = np.array(cert["gram"], dtype=float)
        if gram.shape != (prog.size, prog.size):
            raise ValidationError("gram has the wrong shape for this game")
        from .vect_sdp import GramSolution, check_gram
        sol = GramSolution(program=prog, gram=gram, value=prog.value_of(gram),
                           residuals=check_gram(prog, gram), status="loaded")
    else:
        mode = "synchronous" if game.nx == game.ny else "bipartite"
        sol = solve_vect(build_program(game, pi, mode), tol=args.tol,
                         max_iters=args.max_iters, seed=args.seed)
        if sol.status == "unconverged":
            exit_code = 3
    strat, status = round_to_deterministic(game, pi, extract_vectors(sol))
    from .games import strategy_value_exact
    rounded = strategy_value_exact(game, pi, strat)
    out = {
        "game": game_id,
        "solver": {"value": sol.value, "status": sol.status,
                   "residuals": sol.residuals},
        "strategy": strat.to_json(),
        "status": status,
        "rounded_value": {"num": rounded.numerator, "den": rounded.denominator}
        if isinstance(rounded, Fraction) else float(rounded),
        "defect": 1.0 - sol.value,
    }
    if pi.min_entry > 0:
        out["threshold"] = rounding_threshold(pi.min_entry, game.k, False)
    _emit(args, json.dumps(out, sort_keys=True, indent=2) + "\n")
    return exit_code


def _run_verify(args) -> int:
    try:
        data = json.loads(Path(args.certificate).read_text())
    except json.JSONDecodeError as err:
        raise ValidationError(f"certificate file is not valid JSON: {err}") from err
    result = verify_certificate(data)
    _emit(args, json.dumps(result, sort_keys=True, indent=2) + "\n")
    return 0 if result["ok"] else 2


def _run_reproduce(args) -> int:
    result = run_all()
    if args.format == "csv":
        lines = ["criterion,game,quantity,expected,computed,tolerance,pass,reference"]
        for r in result["rows"]:
            lines.append(",".join([
                str(r["criterion"]), r["game"], r["quantity"].replace(",", ";"),
                r["expected"], r["computed"], str(r["tolerance"]), str(r["pass"]),
                r["reference"].replace(",", ";")]))
        _emit(args, "\n".join(lines) + "\n")
    else:
        out = {"criteria": result["rows"],
               "runtimes": {str(k): result["runtimes"][k] for k in result["runtimes"]},
               "runtime_limits": {str(k): RUNTIME_LIMITS[k] for k in RUNTIME_LIMITS},
               "pass": result["pass"], "runtime_ok": result["runtime_ok"]}
        _emit(args, json.dumps(out, sort_keys=True, indent=2) + "\n")
    return 0 if result["pass"] else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gamevalues",
        description="Exact classical values, vector-relaxation values, quantum "
                    "bounds and certificates for unique games, group based games "
                    "and directed-graph 3-labelling games.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, game=True):
        if game:
            p.add_argument("--game", required=True,
                           help="named generator (chsh:<n>, commutator:<group>, "
                                "cycle:<k>) or path to a game/digraph JSON file")
            p.add_argument("--density", default=None,
                           help="optional path to a density JSON file {'pi': [[...]]}")
        p.add_argument("--tol", type=float, default=1e-7)
        p.add_argument("--max-iters", type=int, default=50_000)
        p.add_argument("--max-iters-qc", type=int, default=2_000)
        p.add_argument("--restarts", type=int, default=20)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--d", type=int, default=None)
        p.add_argument("--threads", type=int, default=None,
                       help="worker pool size (default: GAMEVALUES_THREADS or cores)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--emit-gram", action="store_true")

    p_value = sub.add_parser("value", help="compute requested value kinds")
    common(p_value)
    p_value.add_argument("--kind", required=True,
                         help="comma-separated: " + ",".join(VALUE_KINDS))
    p_value.set_defaults(func=_run_value)

    p_perfect = sub.add_parser("perfect-check", help="decide perfect strategies")
    common(p_perfect)
    p_perfect.set_defaults(func=_run_perfect_check)

    p_dcut = sub.add_parser("dcut", help="directed cut number of a digraph")
    common(p_dcut)
    p_dcut.set_defaults(func=_run_dcut)

    p_round = sub.add_parser("round", help="round a vector solution to a strategy")
    common(p_round)
    p_round.add_argument("--certificate", default=None,
                         help="path to a report carrying a gram certificate")
    p_round.set_defaults(func=_run_round)

    p_verify = sub.add_parser("verify-certificate",
                              help="recompute a bound from its certificate")
    p_verify.add_argument("certificate", help="path to a bound-report JSON file")
    p_verify.add_argument("--format", choices=("json", "csv"), default="json")
    p_verify.set_defaults(func=_run_verify)

    p_rep = sub.add_parser("reproduce", help="run the acceptance table")
    p_rep.add_argument("--format", choices=("json", "csv"), default="json")
    p_rep.set_defaults(func=_run_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as err:
        sys.stderr.write(f"error: {err}\n")
        return 2
    except FileNotFoundError as err:
        sys.stderr.write(f"error: {err}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
