"""HTTP reward service: scoring, best-of-N, verification, and health.

Responses are built from the same in-process calls the library exposes, and
serialized through one code path, so HTTP numeric content is byte-for-byte
identical to library output. All randomness derives from the per-request
X-Seed header (default: the config seed), making responses reproducible.
"""

from __future__ import annotations

import hashlib
import json
import os

from fastapi import FastAPI, Request, Response

from . import __version__
from .config import EngineConfig, SERVICE_TOKEN_ENV
from .fusion import best_of_n, reward
from .judge import JudgeBackend, JudgeUnavailable
from .records import SampleRecord
from .ses import extract_claims, verify
from .vrm import FEATURE_VERSION, VrmModel, check_feature_compatibility

MAX_CANDIDATES = 64


def model_hash(model: VrmModel | None, model_path: str | None) -> str:
    """Hash of the model file bytes (or canonical dump when in-memory)."""
    if model_path and os.path.exists(model_path):
        digest = hashlib.sha256()
        with open(model_path, "rb") as fh:
            digest.update(fh.read())
        return digest.hexdigest()
    if model is not None:
        blob = json.dumps(model.to_json_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()
    return "no-model"


def _json_response(obj: dict, status_code: int = 200) -> Response:
    return Response(
        content=json.dumps(obj, ensure_ascii=False),
        status_code=status_code,
        media_type="application/json",
    )


def _error(status_code: int, message: str) -> Response:
    return _json_response({"error": message}, status_code)


def create_app(
    config: EngineConfig,
    model: VrmModel | None = None,
    backend: JudgeBackend | None = None,
) -> FastAPI:
    if config.mode == "vrm":
        if model is None:
            raise ValueError("vrm mode requires a loaded model")
        check_feature_compatibility(model)
    backend = backend or config.make_backend()
    lam = config.lambda_map()
    expected_token = os.environ.get(SERVICE_TOKEN_ENV)
    startup_hash = model_hash(model, config.model_path)

    app = FastAPI(title="qreward", version=__version__, docs_url=None, redoc_url=None)

    async def read_body(request: Request) -> tuple[dict | None, Response | None]:
        declared = request.headers.get("content-length")
        if declared and int(declared) > config.request_size_limit:
            return None, _error(413, "request body too large")
        body = await request.body()
        if len(body) > config.request_size_limit:
            return None, _error(413, "request body too large")
        try:
            data = json.loads(body)
        except (ValueError, UnicodeDecodeError):
            return None, _error(400, "malformed JSON body")
        if not isinstance(data, dict):
            return None, _error(400, "body must be a JSON object")
        return data, None

    def unauthorized(request: Request) -> Response | None:
        if expected_token is None:
            return None
        header = request.headers.get("authorization", "")
        if header != f"Bearer {expected_token}":
            return _error(401, "missing or invalid bearer token")
        return None

    def request_seed(request: Request) -> int:
        raw = request.headers.get("x-seed")
        if raw is None:
            return config.seed
        try:
            return int(raw)
        except ValueError:
            return config.seed

    @app.post("/v1/score")
    async def http_score(request: Request) -> Response:
        if (denied := unauthorized(request)) is not None:
            return denied
        data, failure = await read_body(request)
        if failure is not None:
            return failure
        if "question" not in data or "answer" not in data:
            return _error(400, "body requires question and answer")
        try:
            breakdown = reward(
                str(data["question"]),
                str(data["answer"]),
                model,
                backend,
                lam,
                mode=config.mode,
                check_config=config.check_config(),
                reference=data.get("reference"),
                task_type=data.get("task_type"),
                seed=request_seed(request),
            )
        except JudgeUnavailable as exc:
            return _error(503, f"judge unavailable: {exc}")
        return _json_response(breakdown.to_json_dict())

    @app.post("/v1/bon")
    async def http_best_of_n(request: Request) -> Response:
        if (denied := unauthorized(request)) is not None:
            return denied
        data, failure = await read_body(request)
        if failure is not None:
            return failure
        candidates = data.get("candidates")
        if "question" not in data or not isinstance(candidates, list):
            return _error(400, "body requires question and candidates[]")
        if len(candidates) == 0:
            return _error(400, "candidates must be non-empty")
        if len(candidates) > MAX_CANDIDATES:
            return _error(422, f"at most {MAX_CANDIDATES} candidates")
        try:
            selected, breakdowns = best_of_n(
                str(data["question"]),
                [str(c) for c in candidates],
                model,
                backend,
                lam,
                mode=config.mode,
                check_config=config.check_config(),
                reference=data.get("reference"),
                task_type=data.get("task_type"),
                seed=request_seed(request),
            )
        except JudgeUnavailable as exc:
            return _error(503, f"judge unavailable: {exc}")
        return _json_response(
            {
                "selected": selected,
                "breakdowns": [b.to_json_dict() for b in breakdowns],
            }
        )

    @app.post("/v1/verify")
    async def http_verify(request: Request) -> Response:
        if (denied := unauthorized(request)) is not None:
            return denied
        data, failure = await read_body(request)
        if failure is not None:
            return failure
        if "answer" not in data:
            return _error(400, "body requires answer")
        record = SampleRecord(
            id=str(data.get("id", "req")),
            question=str(data.get("question", "")),
            answer=str(data["answer"]),
            task_type=str(data.get("task_type", "problem_solving")),
            reference_answer=data.get("reference"),
        )
        v, reports = verify(record, config.check_config(request_seed(request)))
        bundle = extract_claims(record.answer)
        return _json_response(
            {
                "v": v.to_json_dict(),
                "reports": [r.to_json_dict() for r in reports],
                "unparsable": bundle.unparsable,
                "claims": len(bundle),
            }
        )

    @app.get("/healthz")
    async def healthz() -> Response:
        return _json_response(
            {
                "status": "ok",
                "version": __version__,
                "model_hash": startup_hash,
                "feature_version": FEATURE_VERSION,
                "mode": config.mode,
            }
        )

    return app


def serve(config: EngineConfig, model: VrmModel | None = None) -> None:
    """Run the service under uvicorn (blocking)."""
    import uvicorn

    app = create_app(config, model=model)
    uvicorn.run(
        app,
        host=config.host,
        port=config.port,
        limit_concurrency=config.concurrency_cap,
        log_level="warning",
    )
