"""HTTP host for live games.

Sessions live in memory.  Each holds one game; the human owns one side and
the engine the other.  The engine follows its verified strategy when the
solver says its side wins, and otherwise plays greedily from the hint
table.  Mutations on a session are serialized by a per-session lock;
distinct sessions are independent.

Endpoints:
  POST   /sessions            create (201); body {config, humanSide, discloseWinner}
  GET    /sessions/{id}       current state
  GET    /sessions/{id}/hints exact r annotations for the side to move
  POST   /sessions/{id}/move  human move; engine replies are bundled
  POST   /solve               stateless solve of a config document
  DELETE /sessions/{id}       drop the session

Errors are `{code, reason}` with conventional statuses: 400 invalid
config, 404 unknown session, 409 wrong turn / finished / round cap,
422 illegal move (the reason mirrors the game module's message).
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import game as G

ROUND_CAP = 64


class ServiceError(Exception):
    def __init__(self, status: int, code: str, reason: str) -> None:
        super().__init__(reason)
        self.status = status
        self.code = code
        self.reason = reason


@dataclass
class Session:
    id: str
    config: G.GameConfig
    state: G.GameState
    human: str
    engine_side: str
    predicted_winner: str
    disclose: bool
    certificate: Optional[G.StrategyCertificate]
    moves: list[dict] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)
    persisted: bool = False


def _engine_move(session: Session) -> dict:
    if session.certificate is not None:
        return G.engine_move(session.state, session.certificate)
    return G.greedy_move(session.state)


def _engine_turn(state: G.GameState, human: str) -> bool:
    if state.finished:
        return False
    to_move = "II" if state.pending is not None else "I"
    return to_move != human


def _run_engine(session: Session) -> list[dict]:
    """Advance until it is the human's turn again.  Every move hands the
    turn over, so at most one engine move happens here; the loop shape
    keeps the cap check in one place."""
    moves: list[dict] = []
    while _engine_turn(session.state, session.human):
        if len(session.state.history) >= ROUND_CAP:
            break
        move = _engine_move(session)
        session.state = G.apply_move(session.state, move)
        session.moves.append(move)
        moves.append(move)
    return moves


def _session_doc(session: Session) -> dict:
    doc = {
        "id": session.id,
        "humanSide": session.human,
        "engineSide": session.engine_side,
        "winnerDisclosed": session.disclose,
        "roundCap": ROUND_CAP,
        "state": G.state_to_json(session.state),
    }
    if session.disclose:
        doc["predictedWinner"] = session.predicted_winner
    return doc


def create_app(transcript_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="efd game service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
        allow_headers=["*"])

    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()
    counter = {"next": 1}

    def persist(session: Session) -> None:
        if transcript_dir is None or session.persisted:
            return
        os.makedirs(transcript_dir, exist_ok=True)
        doc = {"sessionId": session.id,
               **G.transcript(session.config, session.moves, session.state)}
        path = os.path.join(transcript_dir, "transcripts.jsonl")
        with open(path, "a") as fh:
            fh.write(json.dumps(doc) + "\n")
        session.persisted = True

    @app.exception_handler(ServiceError)
    async def service_error(_: Request, exc: ServiceError) -> JSONResponse:
        return JSONResponse(status_code=exc.status,
                            content={"code": exc.code, "reason": exc.reason})

    @app.exception_handler(RequestValidationError)
    async def body_error(_: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(status_code=400,
                            content={"code": "bad-request", "reason": str(exc)})

    def get_session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise ServiceError(404, "unknown-session",
                               f"no session {session_id!r}")
        return session

    @app.post("/sessions", status_code=201)
    def create_session(body: dict) -> dict:
        try:
            config = G.config_from_json(body["config"])
            config.validate()
        except (KeyError, TypeError, ValueError) as e:
            raise ServiceError(400, "invalid-config", str(e))
        human = body.get("humanSide", "I")
        if human not in ("I", "II"):
            raise ServiceError(400, "invalid-config",
                               f"humanSide must be I or II, got {human!r}")
        engine_side = "II" if human == "I" else "I"
        result = G.solve(config)
        certificate = (result.certificate if result.winner == engine_side
                       else None)
        with registry_lock:
            session_id = f"s{counter['next']}"
            counter["next"] += 1
            session = Session(
                id=session_id, config=config, state=G.new_game(config),
                human=human, engine_side=engine_side,
                predicted_winner=result.winner,
                disclose=bool(body.get("discloseWinner", False)),
                certificate=certificate)
            sessions[session_id] = session
        with session.lock:
            # the engine opens when it holds the challenger side; each move
            # passes the turn, so this runs at most once
            engine_moves = _run_engine(session)
            if session.state.finished:
                persist(session)
            doc = _session_doc(session)
        doc["engineMoves"] = engine_moves
        return doc

    @app.get("/sessions/{session_id}")
    def get_state(session_id: str) -> dict:
        session = get_session(session_id)
        with session.lock:
            return _session_doc(session)

    @app.get("/sessions/{session_id}/hints")
    def get_hints(session_id: str) -> dict:
        session = get_session(session_id)
        with session.lock:
            if session.state.finished:
                raise ServiceError(409, "finished", "game is finished")
            return G.hint(session.state)

    @app.post("/sessions/{session_id}/move")
    def post_move(session_id: str, move: dict) -> dict:
        session = get_session(session_id)
        with session.lock:
            state = session.state
            if state.finished:
                raise ServiceError(409, "finished", "game is finished")
            to_move = "II" if state.pending is not None else "I"
            if to_move != session.human:
                raise ServiceError(409, "not-your-turn",
                                   f"it is {to_move}'s turn")
            if len(state.history) >= ROUND_CAP:
                raise ServiceError(409, "round-cap",
                                   f"session hit the {ROUND_CAP}-round cap")
            try:
                session.state = G.apply_move(state, move)
            except G.IllegalMove as e:
                raise ServiceError(422, "illegal-move", str(e))
            session.moves.append(move)
            engine_moves = _run_engine(session)
            if session.state.finished:
                persist(session)
            doc = _session_doc(session)
            doc["engineMoves"] = engine_moves
            return doc

    @app.post("/solve")
    def solve_config(body: dict) -> dict:
        try:
            config = G.config_from_json(body)
            config.validate()
        except (KeyError, TypeError, ValueError) as e:
            raise ServiceError(400, "invalid-config", str(e))
        result = G.solve(config)
        return {"schema": "efd/1", **result.to_json()}

    @app.delete("/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str) -> None:
        session = get_session(session_id)
        with session.lock:
            persist(session)
        with registry_lock:
            sessions.pop(session_id, None)

    return app
