"""HTTP surface: JSON scoring endpoints plus a health probe.

POST /v1/score/masked  {"words", "filled", "targets"} -> {"logprobs": {"k": lp}}
POST /v1/score/causal  {"words"} -> {"logprobs": [lp per word]}
GET  /v1/health        -> 200 {"status": "ok", ...} once both models loaded
"""
from __future__ import annotations

import threading

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .backends import WordEncodingError
from .scoring import IndexViolation, score_causal, score_masked


class MaskedScoreBody(BaseModel):
    words: list[str]
    filled: list[int] = []
    targets: list[int]


class CausalScoreBody(BaseModel):
    words: list[str]


class ModelState:
    """Holds the served pair; loading may finish after the server is up."""

    def __init__(self):
        self.masked = None
        self.causal = None
        self.masked_id = None
        self.causal_id = None
        self.error = None
        self.lock = threading.Lock()

    @property
    def ready(self) -> bool:
        return self.masked is not None and self.causal is not None


def create_app(masked_backend=None, causal_backend=None,
               masked_id: str = "", causal_id: str = "") -> FastAPI:
    app = FastAPI(title="mlorder model server")
    state = ModelState()
    state.masked = masked_backend
    state.causal = causal_backend
    state.masked_id = masked_id
    state.causal_id = causal_id
    app.state.models = state

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "malformed body"})

    def _not_loaded():
        detail = {"error": "model not loaded"}
        if state.error:
            detail["load_error"] = str(state.error)
        return JSONResponse(status_code=503, content=detail)

    @app.post("/v1/score/masked")
    def masked(body: MaskedScoreBody):
        if state.masked is None:
            return _not_loaded()
        try:
            with state.lock:
                out = score_masked(state.masked, body.words, body.filled, body.targets)
        except IndexViolation as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})
        except WordEncodingError as exc:
            return JSONResponse(status_code=422, content={"error": str(exc)})
        return {"logprobs": {str(k): v for k, v in sorted(out.items())}}

    @app.post("/v1/score/causal")
    def causal(body: CausalScoreBody):
        if state.causal is None:
            return _not_loaded()
        try:
            with state.lock:
                out = score_causal(state.causal, body.words)
        except IndexViolation as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})
        except WordEncodingError as exc:
            return JSONResponse(status_code=422, content={"error": str(exc)})
        return {"logprobs": out}

    @app.get("/v1/health")
    def health():
        if not state.ready:
            return _not_loaded()
        return {"status": "ok",
                "masked_model": state.masked_id,
                "causal_model": state.causal_id}

    return app


def build_backends(masked_model: str, causal_model: str, device: str = "cpu"):
    """Instantiate backends from model ids; "stub" selects the test stubs."""
    if masked_model == "stub":
        from .stub import StubMaskedBackend
        masked = StubMaskedBackend()
    else:
        from .backends import HFMaskedBackend
        masked = HFMaskedBackend(masked_model, device=device)
    if causal_model == "stub":
        from .stub import StubCausalBackend
        causal = StubCausalBackend()
    else:
        from .backends import HFCausalBackend
        causal = HFCausalBackend(causal_model, device=device)
    return masked, causal
