"""HTTP facade: schemas, assessment, calibration, model registry, guess game.

All JSON responses are canonically serialized (sorted keys, compact
separators), so a service response is byte-identical to the library's
canonical serialization of the same document. Errors use the shape
{code, message, details[]}.
"""

from __future__ import annotations

import hmac
import io
import os
import secrets
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request, Response

from epirisk.calibration import FitConfig, fit_logistic, fit_report_to_model_dict, ingest_cohort_csv
from epirisk.engine import RiskAssessment, assess, assessment_to_dict
from epirisk.errors import (
    AnswerValidationError,
    EpiriskError,
    IngestError,
    RegistryError,
    SchemaMismatchError,
    ValidationError,
)
from epirisk.jsonutil import canonical_bytes
from epirisk.registry import ModelRegistry
from epirisk.schema import QuestionnaireSchema, load_shipped_schema, schema_to_dict, shipped_schema_ids

GAME_SESSION_TTL_SECONDS = 3600.0

BANDS = ("low", "moderate", "high", "very-high")

ENV_REGISTRY_ROOT = "EPIRISK_REGISTRY_ROOT"
ENV_TOKEN = "EPIRISK_TOKEN"
ENV_CORS_ORIGIN = "EPIRISK_CORS_ORIGIN"
ENV_STATIC_DIR = "EPIRISK_STATIC_DIR"
ENV_LISTEN = "EPIRISK_LISTEN"


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, details: list[str] | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.details = details or []


@dataclass
class GuessSession:
    session_id: str
    schema_id: str
    answers: dict[str, Any]
    actual: RiskAssessment
    expires_at: float
    state: str = "awaiting-guess"
    guess_probability: float | None = None
    guess_band: str | None = None

    def public_doc(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "session_id": self.session_id,
            "schema_id": self.schema_id,
            "state": self.state,
        }
        if self.state == "revealed":
            doc.update(self._reveal_fields())
        return doc

    def _reveal_fields(self) -> dict[str, Any]:
        actual = assessment_to_dict(self.actual)
        error = None
        if self.guess_probability is not None:
            error = abs(self.guess_probability - self.actual.probability)
        guessed_band = self.guess_band
        return {
            "actual": actual,
            "guess": {"probability": self.guess_probability, "band": guessed_band},
            "absolute_error": error,
            "band_match": guessed_band == self.actual.band,
        }


def _json_response(doc: Any, status: int = 200) -> Response:
    return Response(content=canonical_bytes(doc), status_code=status, media_type="application/json")


def _load_extra_schemas(root: Path) -> dict[str, QuestionnaireSchema]:
    """Registered schemas live as JSON files under <registry root>/schemas."""
    extra: dict[str, QuestionnaireSchema] = {}
    directory = root / "schemas"
    if not directory.is_dir():
        return extra
    for path in sorted(directory.glob("*.json")):
        from epirisk.schema import load_schema

        schema = load_schema(path)
        extra[schema.id] = schema
    return extra


async def _read_json_body(request: Request) -> Any:
    import json

    raw = await request.body()
    if not raw:
        raise ApiError(400, "bad-request", "request body must be JSON")
    try:
        return json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ApiError(400, "bad-request", f"request body is not valid JSON: {exc}") from None


def create_app(
    registry_root: str | Path | None = None,
    token: str | None = None,
    cors_origin: str | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    registry_root = Path(registry_root or os.environ.get(ENV_REGISTRY_ROOT, "registry"))
    token = token if token is not None else os.environ.get(ENV_TOKEN)
    cors_origin = cors_origin if cors_origin is not None else os.environ.get(ENV_CORS_ORIGIN)
    static_dir = static_dir if static_dir is not None else os.environ.get(ENV_STATIC_DIR)

    schemas: dict[str, QuestionnaireSchema] = {
        sid: load_shipped_schema(sid) for sid in shipped_schema_ids()
    }
    schemas.update(_load_extra_schemas(registry_root))
    registry = ModelRegistry(registry_root)
    registry.ensure_defaults(schemas)

    app = FastAPI(title="epirisk", openapi_url=None, docs_url=None, redoc_url=None)
    app.state.registry = registry
    app.state.schemas = schemas
    sessions: dict[str, GuessSession] = {}
    sessions_lock = threading.Lock()

    if cors_origin:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=[cors_origin],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(ApiError)
    async def _api_error_handler(_request: Request, exc: ApiError) -> Response:
        return _json_response(
            {"code": exc.code, "message": exc.message, "details": exc.details},
            status=exc.status,
        )

    @app.exception_handler(EpiriskError)
    async def _domain_error_handler(_request: Request, exc: EpiriskError) -> Response:
        return _json_response({"code": "error", "message": str(exc), "details": []}, status=500)

    def _schema_or_404(schema_id: str) -> QuestionnaireSchema:
        schema = schemas.get(schema_id)
        if schema is None:
            raise ApiError(404, "unknown-schema", f"no schema named {schema_id!r}")
        return schema

    def _require_token(request: Request) -> None:
        if not token:
            raise ApiError(401, "unauthorized", "calibration endpoints are disabled: no token configured")
        header = request.headers.get("authorization", "")
        expected = f"Bearer {token}"
        if not hmac.compare_digest(header.encode(), expected.encode()):
            raise ApiError(401, "unauthorized", "missing or invalid bearer token")

    # ------------------------------------------------------------- schemas

    @app.get("/api/v1/schemas")
    def list_schemas() -> Response:
        return _json_response([schema_to_dict(schemas[sid]) for sid in sorted(schemas)])

    @app.get("/api/v1/schemas/{schema_id}")
    def get_schema(schema_id: str) -> Response:
        return _json_response(schema_to_dict(_schema_or_404(schema_id)))

    # ------------------------------------------------------------- assess

    def _assess_answers(schema_id: str, body: Any) -> RiskAssessment:
        schema = _schema_or_404(schema_id)
        if not isinstance(body, dict) or not isinstance(body.get("answers"), dict):
            raise ApiError(400, "bad-request", 'body must be an object with an "answers" object')
        if "schema_id" in body and body["schema_id"] != schema_id:
            raise ApiError(400, "bad-request", f"body schema_id {body['schema_id']!r} does not match the URL")
        model = registry.active_model(schema_id)
        if model is None:
            raise ApiError(409, "no-active-model", f"schema {schema_id!r} has no active model")
        timestamp = body.get("timestamp")
        if timestamp is not None and not isinstance(timestamp, str):
            raise ApiError(400, "bad-request", "timestamp must be an ISO-8601 string")
        try:
            return assess(schema, model, body["answers"], timestamp=timestamp)
        except AnswerValidationError as exc:
            raise ApiError(
                400,
                "invalid-answers",
                "answers failed validation",
                details=[f"{qid}: {message}" for qid, message in exc.details],
            ) from None
        except (SchemaMismatchError, ValidationError) as exc:
            raise ApiError(400, "invalid-answers", str(exc)) from None

    @app.post("/api/v1/assess/{schema_id}")
    async def assess_endpoint(schema_id: str, request: Request) -> Response:
        body = await _read_json_body(request)
        assessment = _assess_answers(schema_id, body)
        return _json_response(assessment_to_dict(assessment))

    # ---------------------------------------------------------- calibrate

    @app.post("/api/v1/calibrate/{schema_id}")
    async def calibrate_endpoint(schema_id: str, request: Request, ridge: float = 0.0) -> Response:
        _require_token(request)
        schema = _schema_or_404(schema_id)
        raw = await request.body()
        try:
            dataset = ingest_cohort_csv(io.StringIO(raw.decode("utf-8")), schema, strict=True)
        except UnicodeDecodeError:
            raise ApiError(422, "ingest-error", "CSV body must be UTF-8 text") from None
        except IngestError as exc:
            raise ApiError(422, "ingest-error", str(exc)) from None
        if dataset.rejected:
            raise ApiError(
                422,
                "ingest-error",
                "some rows were rejected",
                details=[f"line {line}: {reason}" for line, reason in dataset.rejected],
            )
        if not dataset.rows:
            raise ApiError(422, "ingest-error", "no data rows")
        try:
            if ridge < 0:
                raise ApiError(400, "bad-request", "ridge must be nonnegative")
            report = fit_logistic(dataset, FitConfig(ridge_lambda=ridge))
        except (ValidationError, EpiriskError) as exc:
            raise ApiError(422, "fit-error", str(exc)) from None
        model_doc = fit_report_to_model_dict(report, dataset)
        version = registry.register(schema_id, model_doc)
        return _json_response(
            {
                "version": version,
                "converged": report.converged,
                "iterations": report.iterations,
                "log_likelihood": report.log_likelihood,
                "max_gradient_norm": report.max_gradient_norm,
                "penalty_used": report.penalty_used,
                "standard_errors": report.standard_errors,
                "model": model_doc,
            },
            status=201,
        )

    @app.get("/api/v1/models/{schema_id}")
    def list_models(schema_id: str, request: Request) -> Response:
        _require_token(request)
        _schema_or_404(schema_id)
        return _json_response(
            {
                "schema_id": schema_id,
                "versions": registry.versions(schema_id),
                "active": registry.active_version(schema_id),
            }
        )

    @app.post("/api/v1/models/{schema_id}/activate/{version}")
    def activate_model(schema_id: str, version: int, request: Request) -> Response:
        _require_token(request)
        schema = _schema_or_404(schema_id)
        try:
            registry.activate(schema_id, version, schema)
        except RegistryError as exc:
            raise ApiError(404, "unknown-version", str(exc)) from None
        except SchemaMismatchError as exc:
            raise ApiError(409, "feature-mismatch", str(exc)) from None
        return _json_response({"schema_id": schema_id, "active_version": version})

    # --------------------------------------------------------------- game

    def _purge_sessions(now: float) -> None:
        expired = [sid for sid, s in sessions.items() if s.expires_at <= now]
        for sid in expired:
            del sessions[sid]

    def _session_or_404(session_id: str) -> GuessSession:
        with sessions_lock:
            _purge_sessions(time.time())
            session = sessions.get(session_id)
        if session is None:
            raise ApiError(404, "unknown-session", f"no session {session_id!r}")
        return session

    @app.post("/api/v1/game")
    async def create_game(request: Request) -> Response:
        body = await _read_json_body(request)
        if not isinstance(body, dict) or not isinstance(body.get("schema_id"), str):
            raise ApiError(400, "bad-request", 'body must be an object with "schema_id" and "answers"')
        schema_id = body["schema_id"]
        assessment = _assess_answers(schema_id, body)
        session = GuessSession(
            session_id=secrets.token_urlsafe(16),
            schema_id=schema_id,
            answers=dict(body["answers"]),
            actual=assessment,
            expires_at=time.time() + GAME_SESSION_TTL_SECONDS,
        )
        with sessions_lock:
            _purge_sessions(time.time())
            sessions[session.session_id] = session
        return _json_response(session.public_doc(), status=201)

    @app.get("/api/v1/game/{session_id}")
    def get_game(session_id: str) -> Response:
        return _json_response(_session_or_404(session_id).public_doc())

    @app.post("/api/v1/game/{session_id}/guess")
    async def guess_game(session_id: str, request: Request) -> Response:
        body = await _read_json_body(request)
        if not isinstance(body, dict):
            raise ApiError(400, "bad-request", "guess body must be an object")
        probability = body.get("probability")
        band = body.get("band")
        if (probability is None) == (band is None):
            raise ApiError(400, "bad-request", 'guess must carry exactly one of "probability" or "band"')
        if probability is not None:
            if not isinstance(probability, (int, float)) or isinstance(probability, bool) or not (0.0 <= probability <= 1.0):
                raise ApiError(400, "bad-request", "probability guess must lie in [0, 1]")
        if band is not None and band not in BANDS:
            raise ApiError(400, "bad-request", f"band must be one of {', '.join(BANDS)}")
        session = _session_or_404(session_id)
        with sessions_lock:
            if session.state == "revealed":
                raise ApiError(409, "already-revealed", "this session has already been revealed")
            session.state = "revealed"
            session.guess_probability = float(probability) if probability is not None else None
            if band is not None:
                session.guess_band = band
            else:
                schema = schemas[session.schema_id]
                session.guess_band = schema.band_thresholds.band(float(probability))
        return _json_response(session.public_doc())

    # ------------------------------------------------------------- static

    if static_dir and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="static")

    return app
