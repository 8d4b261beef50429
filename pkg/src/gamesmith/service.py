"""REST session API over the play engine, serving the browser arena and any
scripted client.

Sessions live in memory with idle eviction; each one is guarded by its own
lock, and solver or verifier work happens before a session is registered so
no lock is held across heavy computation.  What-if queries run on a deep copy
and never mutate the session they preview.
"""

from __future__ import annotations

import copy
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import HTMLResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import gdl
from .fixtures import lawnmower_text
from .model import GamesmithError, PLAYER_2, SemanticError
from .simulate import SessionState, SimulationError, create_session, step
from .synth import SynthConfig, synthesize

DEFAULT_TTL = 3600.0


class CreateSessionRequest(BaseModel):
    game_text: str
    strategy_text: str | None = None
    synthesize: bool = False
    credit: list[int] | None = None
    auto_advance: bool = True


class MoveRequest(BaseModel):
    to: str | None = None


@dataclass
class _Entry:
    session: SessionState
    banner: dict
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_access: float = 0.0


def _rational(f) -> dict | None:
    if f is None:
        return None
    return {"num": f.numerator, "den": f.denominator}


def _game_payload(game) -> dict:
    spec = game.objectives
    return {
        "name": game.name,
        "dimensions": game.dimension,
        "initial": game.initial,
        "states": [
            {"id": s.id, "owner": s.owner, "priority": s.priority}
            for s in game.states
        ],
        "edges": [
            {"src": e.src, "dst": e.dst, "weights": list(e.weight), "label": e.label}
            for e in game.edges
        ],
        "objectives": {
            "energy_dims": sorted(spec.energy_dims),
            "mean_payoff": [
                {"dim": b.dim, "threshold": _rational(b.threshold)}
                for b in spec.mean_payoff
            ],
            "buchi_targets": sorted(spec.buchi_targets),
            "parity": spec.use_parity,
        },
    }


def build_view(session_id: str, session: SessionState, banner: dict) -> dict:
    """Everything a client needs to render the play; derivable from the
    session alone, no game rules required client-side."""
    game = session.game
    owner = session.owner_to_move()
    legal = []
    if owner == PLAYER_2:
        for e in game.out_edges[session.state]:
            legal.append({"to": e.dst, "label": e.label, "weights": list(e.weight)})
    last = session.last_entry()
    means = [
        {
            "dim": b.dim,
            "mean": _rational(session.running_mean(b.dim)),
            "threshold": _rational(b.threshold),
        }
        for b in session.spec.mean_payoff
    ]
    return {
        "session_id": session_id,
        "current_state": session.state,
        "owner_to_move": owner,
        "memory": session.memory,
        "credits": [
            {"dim": d, "value": session.credits[i]}
            for i, d in enumerate(session.energy_dims)
        ],
        "running_means": means,
        "buchi": {
            "targets": sorted(session.spec.buchi_targets),
            "visits": session.buchi_visits,
        },
        "legal_moves": legal,
        "last_move": None
        if last is None
        else {
            "src": last.src,
            "dst": last.dst,
            "label": last.label,
            "mover": last.mover,
            "weights": list(last.weight),
        },
        "trace": [
            {
                "step": t.step,
                "src": t.src,
                "dst": t.dst,
                "label": t.label,
                "mover": t.mover,
                "weights": list(t.weight),
                "credits_after": list(t.credits_after),
            }
            for t in session.trace[-100:]
        ],
        "flags": {
            "energy_violated": session.energy_violated,
            "budget_paused": session.budget_paused,
            "auto_advance": session.auto_advance,
        },
        "steps": session.edge_count,
        "banner": banner,
        "game": _game_payload(game),
    }


_FALLBACK_PAGE = """<!doctype html>
<html><head><title>gamesmith arena</title></head>
<body><h1>gamesmith arena service</h1>
<p>The browser UI bundle is not built.  Build the frontend and pass
<code>--ui-dir</code>, or talk to the JSON API under <code>/api</code>.</p>
</body></html>"""


def create_app(
    default_game_text: str | None = None,
    default_strategy_text: str | None = None,
    ui_dir: str | None = None,
    session_ttl: float = DEFAULT_TTL,
    clock=time.monotonic,
) -> FastAPI:
    app = FastAPI(title="gamesmith arena", version="0.1.0")
    sessions: dict[str, _Entry] = {}
    registry_lock = threading.Lock()

    def evict_idle() -> None:
        now = clock()
        with registry_lock:
            dead = [
                sid
                for sid, entry in sessions.items()
                if now - entry.last_access > session_ttl
            ]
            for sid in dead:
                del sessions[sid]

    def get_entry(sid: str) -> _Entry:
        evict_idle()
        with registry_lock:
            entry = sessions.get(sid)
            if entry is None:
                raise HTTPException(status_code=404, detail="unknown session")
            entry.last_access = clock()
            return entry

    def parse_error(exc: Exception) -> HTTPException:
        span = getattr(exc, "span", None)
        detail = {"message": str(exc)}
        if span is not None:
            detail["span"] = {"line": span.line, "column": span.column}
        return HTTPException(status_code=422, detail=detail)

    @app.get("/api/config")
    def get_config() -> dict:
        return {
            "default_game_text": default_game_text,
            "default_strategy_text": default_strategy_text,
        }

    @app.get("/api/games/builtin/lawnmower", response_class=PlainTextResponse)
    def builtin_lawnmower() -> str:
        return lawnmower_text()

    @app.post("/api/sessions", status_code=201)
    def create(req: CreateSessionRequest) -> dict:
        evict_idle()
        try:
            game = gdl.parse_game(req.game_text)
        except (gdl.GdlSyntaxError, SemanticError) as exc:
            raise parse_error(exc)
        strategy = None
        banner: dict = {}
        credit = tuple(req.credit) if req.credit is not None else None
        if req.strategy_text:
            try:
                strategy = gdl.parse_strategy(req.strategy_text)
            except (gdl.GdlSyntaxError, SemanticError) as exc:
                raise parse_error(exc)
            banner = {"engine": "provided", "status": "PROVIDED", "credits": None}
        elif req.synthesize:
            result = synthesize(game, SynthConfig())
            if result.status != "WINNING":
                raise HTTPException(
                    status_code=409,
                    detail={
                        "message": f"synthesis returned {result.status}",
                        "status": result.status,
                        "reason": result.reason,
                    },
                )
            strategy = result.strategy
            banner = {
                "engine": result.engine,
                "status": result.status,
                "credits": sorted([list(c) for c in result.credits]),
                "chosen_credit": list(result.chosen_credit),
                "final_cap": result.final_cap,
            }
            if credit is None:
                credit = result.chosen_credit
        else:
            raise HTTPException(
                status_code=422,
                detail={"message": "provide strategy_text or set synthesize=true"},
            )
        try:
            session = create_session(
                game, strategy, credit, auto_advance=req.auto_advance
            )
        except (GamesmithError, SimulationError) as exc:
            raise parse_error(exc)
        sid = uuid.uuid4().hex
        with registry_lock:
            sessions[sid] = _Entry(session, banner, last_access=clock())
        return {"session_id": sid, "view": build_view(sid, session, banner)}

    @app.get("/api/sessions/{sid}")
    def view(sid: str) -> dict:
        entry = get_entry(sid)
        with entry.lock:
            return build_view(sid, entry.session, entry.banner)

    @app.post("/api/sessions/{sid}/move")
    def move(sid: str, req: MoveRequest) -> dict:
        entry = get_entry(sid)
        with entry.lock:
            try:
                step(entry.session, req.to)
            except SimulationError as exc:
                raise HTTPException(status_code=400, detail={"message": str(exc)})
            return build_view(sid, entry.session, entry.banner)

    @app.post("/api/sessions/{sid}/undo")
    def undo(sid: str) -> dict:
        entry = get_entry(sid)
        with entry.lock:
            try:
                entry.session.undo()
            except SimulationError as exc:
                raise HTTPException(status_code=400, detail={"message": str(exc)})
            return build_view(sid, entry.session, entry.banner)

    @app.get("/api/sessions/{sid}/whatif")
    def whatif(sid: str, to: str) -> dict:
        entry = get_entry(sid)
        with entry.lock:
            ghost = copy.deepcopy(entry.session)
        try:
            step(ghost, to)
        except SimulationError as exc:
            raise HTTPException(status_code=400, detail={"message": str(exc)})
        return build_view(sid, ghost, entry.banner)

    static_root = Path(ui_dir) if ui_dir else None
    if static_root is not None and static_root.is_dir():
        app.mount("/", StaticFiles(directory=str(static_root), html=True), name="ui")
    else:

        @app.get("/", response_class=HTMLResponse)
        def index() -> str:
            return _FALLBACK_PAGE

    return app
