"""HTTP JSON API for interactive analysis and simplification."""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import controller
from .lexicon import AoaLexicon
from .rewriter import PromptVariant, RewriterBackend
from .textproc import WordNotFound, annotate


class AnalyzeIn(BaseModel):
    text: str
    target_age: float | None = None


class SimplifyIn(BaseModel):
    translation: str
    source: str | None = None
    target_age: float | None = None
    mode: str = "single"
    variant: str = "proposed"
    max_iterations: int | None = None


class StepIn(BaseModel):
    translation: str
    words: list[str]
    source: str | None = None
    target_age: float | None = None
    session: str | None = None


@dataclass
class Session:
    id: str
    target_age: float
    created: float
    last_used: float
    trace: list[dict] = field(default_factory=list)
    in_flight: bool = False


class SessionStore:
    """In-memory, lock-guarded step history with idle expiry."""

    def __init__(self, ttl_seconds: float = 1800.0, clock=time.monotonic):
        self._ttl = ttl_seconds
        self._clock = clock
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}

    def get_or_create(self, session_id: str | None, target_age: float) -> Session:
        now = self._clock()
        with self._lock:
            self._expire(now)
            if session_id is None:
                session = Session(uuid.uuid4().hex, target_age, now, now)
                self._sessions[session.id] = session
                return session
            session = self._sessions.get(session_id)
            if session is None:
                raise HTTPException(status_code=404, detail="unknown or expired session")
            session.last_used = now
            return session

    def _expire(self, now: float) -> None:
        dead = [sid for sid, s in self._sessions.items() if now - s.last_used > self._ttl]
        for sid in dead:
            del self._sessions[sid]

    def acquire(self, session: Session) -> None:
        with self._lock:
            if session.in_flight:
                raise HTTPException(status_code=409, detail="a rewrite is already in flight")
            session.in_flight = True

    def release(self, session: Session) -> None:
        with self._lock:
            session.in_flight = False


def analysis_payload(lex: AoaLexicon, text: str, target_age: float) -> dict:
    analyzed = annotate(lex, text)
    max_token = analyzed.max_token
    return {
        "text": text,
        "target_age": target_age,
        "tokens": [
            {"surface": t.surface, "start": t.start, "end": t.end, "is_word": t.is_word, "aoa": t.aoa}
            for t in analyzed.tokens
        ],
        "max_word": None if max_token is None else max_token.surface,
        "max_aoa": analyzed.max_aoa,
        "max_index": analyzed.max_aoa_index,
        "success": analyzed.max_aoa is None or analyzed.max_aoa < target_age,
    }


def create_app(
    lexicon: AoaLexicon,
    backend: RewriterBackend,
    *,
    default_target_age: float = 10.0,
    max_iterations: int = 5,
    session_ttl: float = 1800.0,
    ui_origin: str | None = None,
) -> FastAPI:
    app = FastAPI(title="simplemt")
    if ui_origin:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=[ui_origin],
            allow_methods=["*"],
            allow_headers=["*"],
        )
    sessions = SessionStore(ttl_seconds=session_ttl)

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/analyze")
    def analyze(body: AnalyzeIn):
        if not body.text:
            raise HTTPException(status_code=400, detail="text must be nonempty")
        age = body.target_age if body.target_age is not None else default_target_age
        return analysis_payload(lexicon, body.text, age)

    @app.post("/simplify")
    def simplify(body: SimplifyIn):
        if not body.translation:
            raise HTTPException(status_code=400, detail="translation must be nonempty")
        age = body.target_age if body.target_age is not None else default_target_age
        try:
            variant = PromptVariant(body.variant)
        except ValueError:
            raise HTTPException(status_code=400, detail=f"unknown variant {body.variant!r}")
        result = controller.simplify(
            body.translation,
            body.source,
            lexicon,
            backend,
            target_age=age,
            mode=body.mode,
            variant=variant,
            max_iterations=body.max_iterations or max_iterations,
        )
        payload = result.to_dict()
        payload["analysis"] = analysis_payload(lexicon, result.final_sentence, age)
        if result.stop_reason is controller.StopReason.BACKEND_FAILURE:
            return JSONResponse(status_code=502, content=payload)
        return payload

    @app.post("/simplify/step")
    def simplify_step(body: StepIn):
        if not body.translation:
            raise HTTPException(status_code=400, detail="translation must be nonempty")
        if not body.words:
            raise HTTPException(status_code=400, detail="words must be nonempty")
        age = body.target_age if body.target_age is not None else default_target_age
        session = sessions.get_or_create(body.session, age)
        sessions.acquire(session)
        try:
            try:
                result = controller.simplify_user(
                    body.translation, body.source, body.words, lexicon, backend, target_age=age
                )
            except WordNotFound as exc:
                raise HTTPException(status_code=400, detail=str(exc))
            payload = {
                "output_sentence": result.final_sentence,
                "success": result.success,
                "stop_reason": result.stop_reason.value,
                "analysis": analysis_payload(lexicon, result.final_sentence, age),
                "session": session.id,
            }
            if result.stop_reason is controller.StopReason.BACKEND_FAILURE:
                return JSONResponse(status_code=502, content=payload)
            session.trace.append(
                {
                    "input_sentence": body.translation,
                    "words": list(body.words),
                    "output_sentence": result.final_sentence,
                }
            )
            return payload
        finally:
            sessions.release(session)

    return app
