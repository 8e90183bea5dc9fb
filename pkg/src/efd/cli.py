"""Command-line frontend: validation, distances, game solving, interactive
play, proof checking, transcript replay, and the HTTP server.

Exit codes: 0 on success, 1 on a negative domain verdict when --fail-on-no
is set, 2 on input errors (malformed files, bad flags, tampered
transcripts).  Text output is one verdict per line; --json emits a single
schema-tagged document instead.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional

from . import clocks as C
from . import game as G
from .backforth import EMPTY, BnfEngine, equiv_bf
from .lang import (load_language, parse_omega_spec, validate_language)
from .proofs import (category_from_json, check_proof, proof_from_json,
                     t0_axioms)
from .rat import fmt_rat, parse_rat
from .structures import load_structure, validate_structure

SCHEMA = "efd/1"


def _emit_json(doc: dict) -> None:
    print(json.dumps({"schema": SCHEMA, **doc}, indent=2))


def _load_pair(args) -> tuple:
    a = load_structure(args.A)
    b = load_structure(args.B, language=a.language)
    return a, b


def _engine(args, a, b) -> BnfEngine:
    return BnfEngine(a, b, omega=parse_omega_spec(args.omega), depth=args.depth)


def _config(args, a, b) -> G.GameConfig:
    return G.GameConfig(
        a=a, b=b,
        clock=C.parse_clock_spec(args.clock),
        epsilon=parse_rat(args.epsilon),
        omega=parse_omega_spec(args.omega),
        depth=args.depth)


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args) -> int:
    lang = load_language(args.lang)
    report = validate_language(lang)
    ok = report.ok
    for defect in report.defects:
        print(f"language: {defect}")
    if args.structure is not None:
        s = load_structure(args.structure, language=lang)
        sreport = validate_structure(s)
        ok = ok and sreport.ok
        for defect in sreport.defects:
            print(f"structure: {defect}")
    if ok:
        print("ok")
    if args.json:
        pass  # validation output stays textual; defects are the payload
    return 0 if ok or not args.fail_on_no else 1


def cmd_distance(args) -> int:
    a, b = _load_pair(args)
    engine = _engine(args, a, b)
    alpha_star = engine.alpha_star()
    if args.alpha is not None:
        r = engine.r_alpha(EMPTY, args.alpha)
    else:
        r, alpha_star = engine.r_stab()
    if args.json:
        _emit_json({"r": fmt_rat(r), "alphaStar": alpha_star,
                    "alpha": args.alpha})
    else:
        print(f"r = {fmt_rat(r)}, stabilized at {alpha_star}")
    return 0


def cmd_equiv(args) -> int:
    a, b = _load_pair(args)
    yes = equiv_bf(a, b, args.alpha, omega=parse_omega_spec(args.omega),
                   depth=args.depth)
    if args.json:
        _emit_json({"equivalent": yes, "alpha": args.alpha})
    else:
        print("yes" if yes else "no")
    return 0 if yes or not args.fail_on_no else 1


def _sweep_grid(spec: str) -> list[Fraction]:
    parts = spec.split(",")
    if len(parts) != 3:
        raise ValueError("epsilon sweep wants start,stop,step")
    lo, hi, step = (parse_rat(p) for p in parts)
    if step <= 0 or hi < lo:
        raise ValueError("epsilon sweep wants a positive step and stop >= start")
    grid = []
    eps = lo
    while eps <= hi:
        grid.append(eps)
        eps += step
    return grid


def cmd_solve(args) -> int:
    a, b = _load_pair(args)
    if args.epsilon_sweep:
        return _solve_sweep(args, a, b)
    config = _config(args, a, b)
    result = G.solve(config)
    doc = result.to_json()
    if args.strategy:
        cert = result.certificate
        report = G.verify_strategy(config, cert)
        if not report.ok:
            for v in report.violations:
                print(f"certificate: {v}", file=sys.stderr)
            return 2
        with open(args.strategy, "w") as fh:
            json.dump(cert.to_json(), fh, indent=2)
    if args.json:
        _emit_json(doc)
    else:
        print(f"winner: {result.winner}")
    return 0 if result.winner == "II" or not args.fail_on_no else 1


def _solve_sweep(args, a, b) -> int:
    grid = _sweep_grid(args.epsilon_sweep)
    rows = []
    flip: Optional[Fraction] = None
    for eps in grid:
        config = G.GameConfig(a=a, b=b, clock=C.parse_clock_spec(args.clock),
                              epsilon=eps, omega=parse_omega_spec(args.omega),
                              depth=args.depth)
        result = G.solve(config)
        rows.append((eps, result.winner))
        if flip is None and result.winner == "II":
            flip = eps
    if args.json:
        _emit_json({
            "sweep": [{"epsilon": fmt_rat(e), "winner": w} for e, w in rows],
            "flipsToIIAt": None if flip is None else fmt_rat(flip)})
    else:
        for eps, winner in rows:
            print(f"epsilon {fmt_rat(eps)}: winner {winner}")
        if flip is not None:
            print(f"flips to II at {fmt_rat(flip)}")
        else:
            print("no flip in range")
    return 0


def cmd_prove_check(args) -> int:
    with open(args.category) as fh:
        cat = category_from_json(json.load(fh))
    with open(args.proof) as fh:
        proof = proof_from_json(cat, json.load(fh))
    result = check_proof(t0_axioms(cat), proof)
    if args.json:
        _emit_json({"valid": result.valid, "lines": len(proof),
                    "failedIndex": result.index, "reason": result.reason})
    elif result.valid:
        print(f"valid ({len(proof)} lines)")
    else:
        print(f"invalid at {result.index}: {result.reason}")
    return 0 if result.valid or not args.fail_on_no else 1


def cmd_replay(args) -> int:
    with open(args.transcript) as fh:
        data = json.load(fh)
    final = G.replay_transcript(data)
    recorded = data.get("verdict", {})
    recomputed = {
        "status": final.status,
        "winner": final.winner,
        "finalR0": G.state_to_json(final)["r0"],
        "survival": final.survival,
    }
    if recorded != recomputed:
        print("error: transcript verdict does not match the replayed game",
              file=sys.stderr)
        return 2
    if args.json:
        _emit_json({"verdict": recomputed})
    else:
        winner = final.winner if final.winner else "none yet"
        print(f"status: {final.status}, winner: {winner}, "
              f"final r0 = {recomputed['finalR0']}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app
    app = create_app(transcript_dir=args.transcript_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# ---------------------------------------------------------------------------
# interactive play


def _print_state(state: G.GameState) -> None:
    doc = G.state_to_json(state)
    print(f"clock {doc['clock']} (order {doc['clockOrder']}), "
          f"epsilon {doc['epsilon']}, r0 = {doc['r0']}")
    for i, rnd in enumerate(doc["rounds"], start=1):
        print(f"  round {i}: clock {rnd['clock']}, {rnd['side']}:{rnd['sort']} "
              f"{rnd['spoiler']} -> {rnd['duplicator']}")
    if doc["pending"]:
        p = doc["pending"]
        print(f"  pending challenge: {p['side']}:{p['sort']}:{p['element']}")


def _prompt_move(state: G.GameState) -> Optional[dict]:
    legal = G.legal_moves(state)
    if legal["toMove"] == "II":
        opts = ", ".join(legal["elements"])
        line = input(f"reply ({opts}, h for hints, q to quit): ").strip()
        if line == "q":
            return None
        if line == "h":
            for o in G.hint(state)["options"]:
                tag = "winning" if o["winning"] else "losing"
                print(f"  {o['element']}: r = {o['value']} ({tag})")
            return _prompt_move(state)
        return {"kind": "reply", "element": line}
    print("challenge as: <clock> <side A|B> <sort> <element>")
    line = input("move (h for hints, q to quit): ").strip()
    if line == "q":
        return None
    if line == "h":
        for o in G.hint(state)["options"]:
            tag = "winning" if o["winning"] else "losing"
            print(f"  {o['side']}:{o['sort']}:{o['element']}: "
                  f"best reply r = {o['value']} ({tag})")
        return _prompt_move(state)
    parts = line.split()
    if len(parts) != 4:
        print("wanted four fields", file=sys.stderr)
        return _prompt_move(state)
    return {"kind": "challenge", "clock": parts[0], "side": parts[1],
            "sort": parts[2], "element": parts[3]}


def cmd_play(args) -> int:
    a, b = _load_pair(args)
    config = _config(args, a, b)
    human = args.side
    result = G.solve(config)
    cert = None
    if result.winner != human:
        cert = result.certificate
    print(f"you are {human}; solver predicts winner {result.winner}")
    state = G.new_game(config)
    moves: list[dict] = []

    def engine_turn(state: G.GameState) -> G.GameState:
        move = (G.engine_move(state, cert) if cert is not None
                else G.greedy_move(state))
        desc = (f"replies {move['element']}" if move["kind"] == "reply" else
                f"challenges {move['side']}:{move['sort']}:{move['element']} "
                f"at clock {move['clock']}")
        print(f"engine {desc}")
        moves.append(move)
        return G.apply_move(state, move)

    engine_to_move = (human == "II")
    while not state.finished:
        _print_state(state)
        if engine_to_move and state.pending is None:
            state = engine_turn(state)
            continue
        if not engine_to_move and state.pending is not None:
            state = engine_turn(state)
            continue
        try:
            move = _prompt_move(state)
        except EOFError:
            return 0
        if move is None:
            return 0
        try:
            state = G.apply_move(state, move)
        except G.IllegalMove as e:
            print(f"illegal: {e}", file=sys.stderr)
            continue
        moves.append(move)
    doc = G.state_to_json(state)
    print(f"finished: winner {state.winner}, final r0 = {doc['r0']}")
    if args.transcript:
        with open(args.transcript, "w") as fh:
            json.dump(G.transcript(config, moves, state), fh, indent=2)
        print(f"transcript written to {args.transcript}")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="efd",
        description="Metric back-and-forth games: distances, solving, play.")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, clock=False, epsilon=False):
        p.add_argument("--omega", default="default",
                       help="weak modulus spec (default: all ones)")
        p.add_argument("--depth", type=int, default=3,
                       help="function closure depth for atom values")
        p.add_argument("--json", action="store_true",
                       help="emit a schema-tagged JSON document")
        p.add_argument("--fail-on-no", action="store_true",
                       help="exit 1 on a negative verdict")
        if clock:
            p.add_argument("--clock", required=True,
                           help='clock order: a number, a CNF like "w^2*3+1", or "w*"')
        if epsilon:
            p.add_argument("--epsilon", required=True, help='threshold as "p/q"')

    p = sub.add_parser("validate", help="check a language (and structure) file")
    p.add_argument("lang")
    p.add_argument("structure", nargs="?", default=None)
    p.add_argument("--json", action="store_true")
    p.add_argument("--fail-on-no", action="store_true")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("distance", help="back-and-forth distance at a rank")
    p.add_argument("--alpha", type=int, default=None,
                   help="rank; omitted means the stabilized value")
    common(p)
    p.add_argument("A")
    p.add_argument("B")
    p.set_defaults(fn=cmd_distance)

    p = sub.add_parser("equiv", help="alpha-equivalence (distance zero)")
    p.add_argument("--alpha", type=int, required=True)
    common(p)
    p.add_argument("A")
    p.add_argument("B")
    p.set_defaults(fn=cmd_equiv)

    p = sub.add_parser("solve", help="decide the winner of a clocked game")
    common(p, clock=True, epsilon=True)
    p.add_argument("--strategy", default=None,
                   help="write the winner's verified certificate here")
    p.add_argument("--epsilon-sweep", default=None, metavar="START,STOP,STEP",
                   help="solve across an epsilon grid and report the flip")
    p.add_argument("A")
    p.add_argument("B")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("play", help="play one side against the engine")
    common(p, clock=True, epsilon=True)
    p.add_argument("--side", choices=("I", "II"), default="I",
                   help="which player you take")
    p.add_argument("--transcript", default=None,
                   help="write the finished game here as JSON")
    p.add_argument("A")
    p.add_argument("B")
    p.set_defaults(fn=cmd_play)

    p = sub.add_parser("prove-check", help="check a proof over a category file")
    p.add_argument("category")
    p.add_argument("proof")
    p.add_argument("--json", action="store_true")
    p.add_argument("--fail-on-no", action="store_true")
    p.set_defaults(fn=cmd_prove_check)

    p = sub.add_parser("replay", help="re-run an exported transcript")
    p.add_argument("transcript")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_replay)

    p = sub.add_parser("serve", help="run the HTTP game service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--transcript-dir", default=None,
                   help="append finished-session transcripts here as JSON lines")
    p.set_defaults(fn=cmd_serve)

    return top


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
