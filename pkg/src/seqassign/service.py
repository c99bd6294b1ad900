"""HTTP game-advisor service: play the assignment game against live advice.

Sessions are in-memory and identified by opaque ids.  A session walks the
loop roll (or enter-roll in manual mode) -> advice -> place; placements are
free, advice is only advice.  Every mutation bumps a version counter and
placements must quote the version they saw, so a double-submitted click
cannot corrupt the board.  An optional append-only JSONL journal replays
sessions after a restart.

All responses are JSON; errors are ``{"code", "message"}`` with 400 for
bad requests, 404 for unknown sessions, and 409 for state conflicts.
"""

from __future__ import annotations

import json
import threading
import uuid
from bisect import bisect_right
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from fastapi import Body, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .distribution import DiscreteDistribution, fair_dice, load_distribution
from .errors import SeqAssignError
from .policy_engine import (
    ThresholdTable,
    _whatif_from_row,
    build_table,
    location_matrix,
    locations_from_row,
)
from .rng import CounterStream
from .simulator import make_rewards

RETAIN_ALL_MAX_N = 4096


class ApiError(Exception):
    """Service-level failure carrying its HTTP status and stable code."""

    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code


@dataclass
class Session:
    """One live game: board state plus the deterministic roll stream."""

    id: str
    dist: DiscreteDistribution
    rewards: tuple[float, ...]
    mode: str
    seed: int
    stream: CounterStream
    table: ThresholdTable | None
    locs: np.ndarray | None
    remaining: set[int]
    history: list[tuple[float, int]] = field(default_factory=list)
    pending_roll: float | None = None
    version: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def n(self) -> int:
        return len(self.rewards)

    @property
    def finished(self) -> bool:
        return not self.remaining

    @property
    def banked(self) -> float:
        total = 0.0
        for value, slot in self.history:
            total += value * self.rewards[slot - 1]
        return total

    def sorted_remaining(self) -> list[int]:
        return sorted(self.remaining)

    def remaining_rewards(self) -> list[float]:
        # slot rewards are strictly increasing in the slot index, so the
        # remaining slots sorted by index are also sorted by reward
        return [self.rewards[s - 1] for s in self.sorted_remaining()]

    def row_interior(self, horizon: int) -> np.ndarray:
        if self.table is not None:
            return self.table.row(horizon).interior
        return build_table(self.dist, horizon, retention="last").row(horizon).interior

    def rank_of(self, horizon: int, support_index: int) -> int:
        """Exact slot rank of a support value, matching the simulator's policy."""
        if self.locs is not None:
            return int(self.locs[horizon - 1, support_index - 1])
        row = build_table(self.dist, horizon, retention="last").row(horizon)
        return locations_from_row(self.dist, row)[support_index - 1]

    def optimal_remaining_value(self) -> float:
        m = len(self.remaining)
        if m == 0:
            return 0.0
        rewards = np.asarray(self.remaining_rewards())
        return float(rewards @ self.row_interior(m + 1))


def _state_json(s: Session) -> dict[str, Any]:
    return {
        "id": s.id,
        "n": s.n,
        "support": [float(x) for x in s.dist.support],
        "rewards": [float(r) for r in s.rewards],
        "mode": s.mode,
        "seed": s.seed,
        "version": s.version,
        "remaining": s.sorted_remaining(),
        "history": [{"value": v, "slot": slot} for v, slot in s.history],
        "pending_roll": s.pending_roll,
        "banked": s.banked,
        "finished": s.finished,
        "optimal_remaining_value": s.optimal_remaining_value(),
    }


def _draw(s: Session) -> float:
    """Next roll from the session stream; identical to the simulator's mapping."""
    u = s.stream.next_uniform()
    return s.dist.support[bisect_right(s.dist.cum[1:-1], u)]


def _apply_roll(s: Session, value: float) -> None:
    s.pending_roll = value
    s.version += 1


def _apply_place(s: Session, slot: int) -> None:
    s.history.append((s.pending_roll, slot))
    s.remaining.discard(slot)
    s.pending_roll = None
    s.version += 1


def _require_int(payload: dict, key: str) -> int:
    value = payload.get(key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ApiError(400, "InvalidRequest", f"field {key!r} must be an integer")
    return value


def _parse_dist(spec: Any) -> DiscreteDistribution:
    if spec == "dice":
        return fair_dice()
    if isinstance(spec, dict):
        return load_distribution(spec)
    # never treat request strings as file paths
    raise ApiError(400, "InvalidRequest", 'field "dist" must be "dice" or a {support, probs} object')


def _parse_rewards(spec: Any, n: int | None) -> tuple[float, ...]:
    if isinstance(spec, str):
        if n is None:
            raise ApiError(400, "InvalidRequest", 'reward presets need "n"')
        try:
            return make_rewards(spec, n)
        except ValueError as exc:
            raise ApiError(400, "InvalidRequest", str(exc)) from None
    if isinstance(spec, list):
        if not all(isinstance(r, (int, float)) and not isinstance(r, bool) for r in spec):
            raise ApiError(400, "InvalidRequest", 'field "rewards" must be numeric')
        rs = tuple(float(r) for r in spec)
        if any(b <= a for a, b in zip(rs, rs[1:])):
            raise ApiError(400, "UnsortedRewards", "rewards must be strictly increasing")
        if n is not None and n != len(rs):
            raise ApiError(400, "LengthMismatch", f'"n" is {n} but {len(rs)} rewards were given')
        return rs
    raise ApiError(400, "InvalidRequest", 'field "rewards" must be a preset string or an array')


class SessionStore:
    def __init__(self):
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}

    def add(self, session: Session) -> None:
        with self._lock:
            self._sessions[session.id] = session

    def get(self, sid: str) -> Session:
        with self._lock:
            session = self._sessions.get(sid)
        if session is None:
            raise ApiError(404, "UnknownSession", f"no session {sid!r}")
        return session


def _new_session(
    dist: DiscreteDistribution,
    rewards: tuple[float, ...],
    mode: str,
    seed: int,
    sid: str | None = None,
) -> Session:
    n = len(rewards)
    if n < 1:
        raise ApiError(400, "InvalidRequest", "need at least one reward slot")
    small = n <= RETAIN_ALL_MAX_N
    # rows up to n+1 so the fresh board's optimal value is one dot product away
    return Session(
        id=sid or uuid.uuid4().hex,
        dist=dist,
        rewards=rewards,
        mode=mode,
        seed=seed,
        stream=CounterStream(seed),
        table=build_table(dist, n + 1, retention="all") if small else None,
        locs=location_matrix(dist, n) if small else None,
        remaining=set(range(1, n + 1)),
    )


class Journal:
    """Append-only JSONL mutation log; replaying it rebuilds every session."""

    def __init__(self, path: str):
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, event: dict[str, Any]) -> None:
        line = json.dumps(event, separators=(",", ":"), sort_keys=True)
        with self._lock, self.path.open("a") as fh:
            fh.write(line + "\n")

    def replay(self, store: SessionStore) -> None:
        if not self.path.exists():
            return
        for line in self.path.read_text().splitlines():
            if not line.strip():
                continue
            event = json.loads(line)
            kind = event["event"]
            if kind == "create":
                dist = load_distribution({"support": event["support"], "probs": event["probs"]})
                session = _new_session(
                    dist, tuple(event["rewards"]), event["mode"], event["seed"], sid=event["id"]
                )
                store.add(session)
            elif kind == "roll":
                session = store.get(event["id"])
                if session.mode == "simulated":
                    value = _draw(session)
                    assert value == event["value"], "journal out of sync with the roll stream"
                else:
                    value = event["value"]
                _apply_roll(session, value)
            elif kind == "place":
                _apply_place(store.get(event["id"]), event["slot"])


def create_app(journal_path: str | None = None, static_dir: str | None = None) -> FastAPI:
    """Build the service; replays the journal (if any) before serving."""
    app = FastAPI(title="sequential assignment advisor", docs_url=None, redoc_url=None)
    store = SessionStore()
    journal = Journal(journal_path) if journal_path else None
    if journal:
        journal.replay(store)

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content={"code": exc.code, "message": str(exc)})

    @app.exception_handler(SeqAssignError)
    async def _engine_error(_request: Request, exc: SeqAssignError):
        return JSONResponse(status_code=400, content={"code": exc.code, "message": str(exc)})

    @app.exception_handler(RequestValidationError)
    async def _bad_request(_request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400, content={"code": "InvalidRequest", "message": "malformed request body"}
        )

    @app.post("/api/session")
    def create_session(payload: dict = Body(...)):
        n = None
        if "n" in payload:
            n = _require_int(payload, "n")
            if n < 1:
                raise ApiError(400, "InvalidRequest", '"n" must be >= 1')
        dist = _parse_dist(payload.get("dist", "dice"))
        rewards = _parse_rewards(payload.get("rewards", "linear"), n)
        mode = payload.get("mode", "simulated")
        if mode not in ("simulated", "manual"):
            raise ApiError(400, "InvalidRequest", 'field "mode" must be "simulated" or "manual"')
        seed = _require_int(payload, "seed") if "seed" in payload else 0
        session = _new_session(dist, rewards, mode, seed)
        store.add(session)
        if journal:
            journal.append(
                {
                    "event": "create",
                    "id": session.id,
                    "support": [float(x) for x in dist.support],
                    "probs": [float(p) for p in dist.probs],
                    "rewards": [float(r) for r in rewards],
                    "mode": mode,
                    "seed": seed,
                }
            )
        with session.lock:
            return _state_json(session)

    @app.post("/api/session/{sid}/roll")
    def roll(sid: str):
        session = store.get(sid)
        with session.lock:
            if session.mode != "simulated":
                raise ApiError(400, "ModeMismatch", "manual sessions take POST enter-roll")
            if session.finished:
                raise ApiError(409, "GameFinished", "all slots are filled")
            if session.pending_roll is not None:
                raise ApiError(409, "PendingRollExists", "place the pending roll first")
            value = _draw(session)
            _apply_roll(session, value)
            if journal:
                journal.append({"event": "roll", "id": sid, "value": value})
            return {"value": value, "version": session.version}

    @app.post("/api/session/{sid}/enter-roll")
    def enter_roll(sid: str, payload: dict = Body(...)):
        session = store.get(sid)
        with session.lock:
            if session.mode != "manual":
                raise ApiError(400, "ModeMismatch", "simulated sessions take POST roll")
            if session.finished:
                raise ApiError(409, "GameFinished", "all slots are filled")
            if session.pending_roll is not None:
                raise ApiError(409, "PendingRollExists", "place the pending roll first")
            raw = payload.get("value")
            if isinstance(raw, bool) or not isinstance(raw, (int, float)):
                raise ApiError(400, "InvalidRequest", 'field "value" must be a number')
            if session.dist.index_of(float(raw)) is None:
                raise ApiError(400, "ValueNotInSupport", f"{raw!r} is not a support value")
            value = float(raw)
            _apply_roll(session, value)
            if journal:
                journal.append({"event": "roll", "id": sid, "value": value})
            return {"value": value, "version": session.version}

    @app.get("/api/session/{sid}/advice")
    def advice(sid: str):
        session = store.get(sid)
        with session.lock:
            if session.pending_roll is None:
                raise ApiError(409, "NoPendingRoll", "roll before asking for advice")
            x = session.pending_roll
            slots = session.sorted_remaining()
            rewards = np.asarray(session.remaining_rewards())
            interior = session.row_interior(len(slots))
            _, whatif = _whatif_from_row(interior, rewards, x)
            rank = session.rank_of(len(slots), session.dist.index_of(x))
            banked = session.banked
            return {
                "pending_roll": x,
                "banked": banked,
                "recommended_slot": slots[rank - 1],
                "recommended_rank": rank,
                "whatif": [
                    {"slot": slot, "reward": float(r), "total": banked + float(w)}
                    for slot, r, w in zip(slots, rewards, whatif)
                ],
                "thresholds": [float(a) for a in interior],
                "version": session.version,
            }

    @app.post("/api/session/{sid}/place")
    def place(sid: str, payload: dict = Body(...)):
        session = store.get(sid)
        with session.lock:
            if session.pending_roll is None:
                raise ApiError(409, "NoPendingRoll", "roll before placing")
            expected = _require_int(payload, "version")
            if expected != session.version:
                raise ApiError(
                    409, "VersionConflict", f"version is {session.version}, not {expected}"
                )
            slot = _require_int(payload, "slot")
            if slot not in session.remaining:
                raise ApiError(400, "SlotOccupiedOrUnknown", f"slot {slot} is not open")
            _apply_place(session, slot)
            if journal:
                journal.append({"event": "place", "id": sid, "slot": slot})
            return _state_json(session)

    @app.get("/api/session/{sid}")
    def state(sid: str):
        session = store.get(sid)
        with session.lock:
            return _state_json(session)

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")
    return app
