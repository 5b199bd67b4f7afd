"""Interactive dialogue sessions over HTTP: the human plays Opponent, the
machine plays Proponent.

When a winning strategy for the session formula is found at creation time the
machine replays it.  The stored strategy uses canonical fresh variables for
the human's term choices, so replay matches the human's actual moves through
a substitution built up as the game runs; a human may type any term and the
machine still follows the strategy schema.  Without a strategy the machine
falls back to a one-step preference for immediately winning moves.
"""
from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .dialogue import (
    DEFENCE, AndLeft, AndRight, ExistsQuery, ForallAt, FormulaAttack, Game,
    IllegalMove, Move, MoveDescriptor, OrQuery, check_append, extend_game,
    game_terms, game_to_json, legal_moves, match_instance, move_from_json,
    move_to_json, new_game, _VACUOUS,
)
from .formula import (
    App, Atom, Bottom, Formula, ParseError, Term, Var, alpha_eq,
    free_variables, parse_formula, render_formula, substitute,
)
from .gkk import SearchLimits, TimeBudgetExceeded
from .strategy import Strategy, StrategyNode, find_winning_strategy

DEFAULT_IDLE_SECONDS = 30 * 60

AWAITING_HUMAN = "awaiting_human"
AWAITING_MACHINE = "awaiting_machine"
FINISHED_P_WIN = "finished_p_win"
FINISHED_O_WIN = "finished_o_win"


class ServerError(Exception):
    def __init__(self, status: int, error: str, reason: str):
        super().__init__(error)
        self.status = status
        self.error = error
        self.reason = reason


# ---------------------------------------------------------------------------
# Simultaneous substitution used for strategy replay


def _subst_many(f: Formula, mapping: dict[str, Term]) -> Formula:
    if not mapping:
        return f
    placeholders = {}
    out = f
    for i, name in enumerate(sorted(mapping)):
        ph = f"replay_{i}'"
        placeholders[ph] = mapping[name]
        out = substitute(out, name, Var(ph))
    for ph, t in placeholders.items():
        out = substitute(out, ph, t)
    return out


def _subst_many_term(t: Term, mapping: dict[str, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    return App(t.function, tuple(_subst_many_term(a, mapping) for a in t.args))


# ---------------------------------------------------------------------------
# Sessions


@dataclass
class Session:
    id: str
    game: Game
    machine_strategy: Strategy | None
    cursor: StrategyNode | None  # machine's last strategy node (None = root)
    cursor_children: tuple[StrategyNode, ...]
    sigma: dict[str, Term]
    status: str
    touched: float = field(default_factory=time.monotonic)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


class SessionStore:
    def __init__(self, idle_seconds: float = DEFAULT_IDLE_SECONDS):
        self.idle_seconds = idle_seconds
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def put(self, session: Session) -> None:
        with self._lock:
            self._purge()
            self._sessions[session.id] = session

    def get(self, session_id: str) -> Session:
        with self._lock:
            self._purge()
            session = self._sessions.get(session_id)
            if session is None:
                raise ServerError(404, "unknown session", "unknown-session")
            session.touched = time.monotonic()
            return session

    def _purge(self) -> None:
        cutoff = time.monotonic() - self.idle_seconds
        for sid in [s for s, v in self._sessions.items() if v.touched < cutoff]:
            del self._sessions[sid]


# ---------------------------------------------------------------------------
# Strategy replay


def _match_child(child: Move, human: Move, sigma: dict[str, Term],
                 game: Game) -> dict[str, Term] | None:
    """Extend sigma so the canonical child move equals the human's, or None."""
    if child.polarity != human.polarity or child.enabler != human.enabler:
        return None
    c, h = child.content, human.content
    if isinstance(c, (AndLeft, AndRight, OrQuery, ExistsQuery)):
        return dict(sigma) if type(h) is type(c) else None
    if isinstance(c, ForallAt):
        if not isinstance(h, ForallAt):
            return None
        out = dict(sigma)
        if isinstance(c.term, Var) and c.term.name not in out:
            out[c.term.name] = h.term
            return out
        return out if _subst_many_term(c.term, out) == h.term else None
    if isinstance(c, FormulaAttack):
        if not isinstance(h, FormulaAttack):
            return None
        return dict(sigma) if alpha_eq(_subst_many(c.formula, sigma), h.formula) else None
    if human.polarity != DEFENCE:
        return None
    expected = _subst_many(c, sigma)
    if alpha_eq(expected, h):
        return dict(sigma)
    # An Opponent existential defence introduces one canonical witness; the
    # human's actual term is recovered by single-variable matching.
    fixed = set(sigma) | free_variables(game.root)
    new_vars = sorted(free_variables(c) - fixed)
    if len(new_vars) == 1:
        w = new_vars[0]
        partial = _subst_many(c, {k: v for k, v in sigma.items() if k != w})
        t = match_instance(partial, w, h)
        if t is None or t is _VACUOUS:
            return None
        out = dict(sigma)
        out[w] = t
        return out
    return None





def _fallback_move(g: Game) -> Move | None:
    options = [d.move for d in legal_moves(g, game_terms(g))]
    if not options:
        return None
    for m in options:
        f = m.asserted()
        if m.polarity == DEFENCE and f is not None and isinstance(f, (Atom, Bottom)):
            return m
    for m in options:
        if m.polarity == DEFENCE:
            return m
    return options[0]


def _machine_reply(session: Session) -> None:
    """Advance until it is the human's turn again or the game is finished."""
    while True:
        g = session.game
        if len(g.moves) % 2 == 1:
            if not legal_moves(g, game_terms(g)):
                session.status = FINISHED_P_WIN
                return
            session.status = AWAITING_HUMAN
            return
        move: Move | None = None
        advanced: StrategyNode | None = None
        if session.machine_strategy is not None and session.cursor_children:
            human = g.moves[-1]
            for child in session.cursor_children:
                sigma = _match_child(child.move, human, session.sigma, g)
                if sigma is not None and child.children:
                    pnode = child.children[0]
                    candidate = _apply_sigma_move(pnode.move, sigma)
                    try:
                        check_append(g, candidate)
                    except IllegalMove:
                        continue
                    move = candidate
                    advanced = pnode
                    session.sigma = sigma
                    break
        if move is None:
            move = _fallback_move(g)
            session.cursor = None
            session.cursor_children = ()
        else:
            session.cursor = advanced
            session.cursor_children = advanced.children
        if move is None:
            session.status = FINISHED_O_WIN
            return
        session.game = extend_game(g, move)


def _apply_sigma_move(m: Move, sigma: dict[str, Term]) -> Move:
    c = m.content
    if isinstance(c, ForallAt):
        return Move(m.polarity, ForallAt(_subst_many_term(c.term, sigma)), m.enabler)
    if isinstance(c, FormulaAttack):
        return Move(m.polarity, FormulaAttack(_subst_many(c.formula, sigma)), m.enabler)
    if isinstance(c, (AndLeft, AndRight, OrQuery, ExistsQuery)):
        return m
    return Move(m.polarity, _subst_many(c, sigma), m.enabler)


# ---------------------------------------------------------------------------
# HTTP layer


class CreateSessionRequest(BaseModel):
    formula: str
    depth: int = 40
    fresh: int = 3
    inst: int = 3
    timeout_ms: int = 5000


class PlayMoveRequest(BaseModel):
    move: dict


def _session_view(session: Session) -> dict:
    return {
        "id": session.id,
        "status": session.status,
        "formula": render_formula(session.game.root),
        "machine_strategy_found": session.machine_strategy is not None,
        "game": game_to_json(session.game),
    }


def _descriptor_view(d: MoveDescriptor, open_term: bool) -> dict:
    return {"move": move_to_json(d.move), "open_term": open_term,
            "description": describe_move(d.move)}


def describe_move(m: Move) -> str:
    c = m.content
    if isinstance(c, AndLeft):
        return f"ask for the left conjunct of move {m.enabler}"
    if isinstance(c, AndRight):
        return f"ask for the right conjunct of move {m.enabler}"
    if isinstance(c, (ExistsQuery,)):
        return f"demand a witness for move {m.enabler}"
    if isinstance(c, ForallAt):
        from .formula import render_term
        return f"instantiate move {m.enabler} at {render_term(c.term)}"
    if isinstance(c, FormulaAttack):
        return f"assert {render_formula(c.formula)} against move {m.enabler}"
    if m.polarity == DEFENCE:
        return f"defend move {m.enabler} with {render_formula(c)}"
    return f"query move {m.enabler}"


def human_move_options(session: Session) -> list[dict]:
    """Legal Opponent moves; universal attacks collapse to one open-term
    entry per target (the human may type any term)."""
    g = session.game
    out = []
    seen = set()
    for d in legal_moves(g, game_terms(g)):
        c = d.move.content
        if isinstance(c, ForallAt):
            key = ("forall", d.move.enabler)
            if key in seen:
                continue
            seen.add(key)
            out.append({"move": move_to_json(d.move), "open_term": True,
                        "description": describe_move(d.move)
                        + " (any term may be typed)"})
            continue
        out.append(_descriptor_view(d, False))
    return out


def create_app(idle_seconds: float = DEFAULT_IDLE_SECONDS) -> FastAPI:
    app = FastAPI(title="dialogic game server")
    # The browser client is served from its own origin.
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    store = SessionStore(idle_seconds)

    @app.exception_handler(ServerError)
    async def server_error(_, exc: ServerError):
        return JSONResponse(status_code=exc.status,
                            content={"error": exc.error, "reason": exc.reason})

    @app.post("/v1/sessions", status_code=201)
    def create_session(req: CreateSessionRequest):
        try:
            f = parse_formula(req.formula)
        except ParseError as e:
            raise ServerError(400, str(e), "parse-error")
        limits = SearchLimits(max_depth=req.depth, max_fresh_vars=req.fresh,
                              max_instantiations_per_formula=req.inst,
                              time_budget_ms=req.timeout_ms)
        try:
            strategy = find_winning_strategy(f, limits)
        except TimeBudgetExceeded:
            strategy = None
        session = Session(
            id=uuid.uuid4().hex, game=new_game(f), machine_strategy=strategy,
            cursor=None,
            cursor_children=strategy.children if strategy else (),
            sigma={}, status=AWAITING_HUMAN)
        store.put(session)
        return _session_view(session)

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str):
        return _session_view(store.get(session_id))

    @app.get("/v1/sessions/{session_id}/moves")
    def list_moves(session_id: str):
        session = store.get(session_id)
        with session.lock:
            if session.status != AWAITING_HUMAN:
                raise ServerError(409, "it is not the Opponent's turn", "wrong-turn")
            return {"moves": human_move_options(session)}

    @app.post("/v1/sessions/{session_id}/moves")
    def play_move(session_id: str, req: PlayMoveRequest):
        session = store.get(session_id)
        with session.lock:
            if session.status != AWAITING_HUMAN:
                raise ServerError(409, "it is not the Opponent's turn", "wrong-turn")
            try:
                move = move_from_json(req.move)
            except (ParseError, KeyError, TypeError) as e:
                raise ServerError(400, f"malformed move: {e}", "parse-error")
            try:
                session.game = extend_game(session.game, move)
            except IllegalMove as e:
                raise ServerError(422, str(e), e.reason)
            _machine_reply(session)
            return _session_view(session)

    return app
