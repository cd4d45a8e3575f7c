"""Command line entry points: assess, calibrate, validate, serve.

Exit codes: 0 success, 1 validation or domain error, 2 usage error.
JSON output is canonically serialized with no trailing newline, so it is
byte-identical to the service response body for the same inputs.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from epirisk.calibration import SEPARATION_COEF_LIMIT, FitConfig, fit_logistic, fit_report_to_model_dict, ingest_cohort_csv
from epirisk.engine import assess, assessment_to_dict
from epirisk.errors import AnswerValidationError, EpiriskError, IngestError, SchemaValidationError
from epirisk.jsonutil import canonical_bytes
from epirisk.models import RiskModel, load_model, parse_model
from epirisk.schema import QuestionnaireSchema, load_schema, load_shipped_schema, shipped_schema_ids


def _fail(message: str, details: list[str] | None = None) -> None:
    click.echo(f"error: {message}", err=True)
    for line in details or []:
        click.echo(f"  {line}", err=True)
    sys.exit(1)


def _resolve_schema(ref: str) -> QuestionnaireSchema:
    """A schema reference is a file path or a shipped schema id."""
    path = Path(ref)
    try:
        if path.is_file():
            return load_schema(path)
        if ref in shipped_schema_ids():
            return load_shipped_schema(ref)
    except SchemaValidationError as exc:
        _fail(f"schema {ref!r} is invalid", exc.violations)
    raise click.UsageError(f"schema {ref!r} is neither a file nor a shipped schema id")


def _default_model(schema_id: str) -> RiskModel | None:
    from importlib import resources

    ref = resources.files("epirisk") / "models" / f"{schema_id}.json"
    try:
        text = ref.read_text(encoding="utf-8")
    except FileNotFoundError:
        return None
    return parse_model(text)


@click.group()
def main() -> None:
    """Infection risk assessment toolkit."""


@main.command("assess")
@click.option("--schema", "schema_ref", required=True, help="Schema file or shipped schema id.")
@click.option("--answers", "answers_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.option("--format", "output_format", type=click.Choice(["json", "text"]), default="text")
def assess_command(schema_ref: str, answers_path: Path, model_path: Path | None, output_format: str) -> None:
    """Evaluate an answers file against a schema and model."""
    schema = _resolve_schema(schema_ref)
    if model_path is not None:
        try:
            model = load_model(model_path)
        except EpiriskError as exc:
            _fail(str(exc))
    else:
        model = _default_model(schema.id)
        if model is None:
            raise click.UsageError(f"no shipped default model for schema {schema.id!r}; pass --model")
    try:
        doc = json.loads(answers_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        _fail(f"answers file is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        _fail("answers file must hold a JSON object")
    if "answers" in doc and isinstance(doc["answers"], dict):
        if "schema_id" in doc and doc["schema_id"] != schema.id:
            _fail(f"answers target schema {doc['schema_id']!r}, not {schema.id!r}")
        answers = doc["answers"]
        timestamp = doc.get("timestamp")
    else:
        answers, timestamp = doc, None
    try:
        assessment = assess(schema, model, answers, timestamp=timestamp)
    except AnswerValidationError as exc:
        _fail("answers failed validation", [f"{qid}: {message}" for qid, message in exc.details])
    except EpiriskError as exc:
        _fail(str(exc))
    if output_format == "json":
        sys.stdout.buffer.write(canonical_bytes(assessment_to_dict(assessment)))
        sys.stdout.buffer.flush()
        return
    click.echo(f"risk: {assessment.display} ({assessment.band})")
    if assessment.interval is not None:
        click.echo(f"interval: [{assessment.interval[0]:.6f}, {assessment.interval[1]:.6f}]")
    reductions = [(fid, delta) for fid, delta in assessment.factor_deltas if delta < 0][:3]
    if reductions:
        click.echo("top modifiable factors:")
        for fid, delta in reductions:
            click.echo(f"  {fid}: {delta * 100:+.2f} pp")


@main.command("calibrate")
@click.option("--schema", "schema_ref", required=True, help="Schema file or shipped schema id.")
@click.option("--data", "data_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False, path_type=Path))
@click.option("--ridge", "ridge", type=float, default=None, help="Ridge penalty; also enables one-class fitting.")
def calibrate_command(schema_ref: str, data_path: Path, out_path: Path, ridge: float | None) -> None:
    """Fit a logistic model from a cohort CSV and write it as model JSON."""
    schema = _resolve_schema(schema_ref)
    if ridge is not None and ridge < 0:
        raise click.UsageError("--ridge must be nonnegative")
    try:
        dataset = ingest_cohort_csv(data_path, schema, strict=True)
    except IngestError as exc:
        if "empty file" in str(exc):
            _fail("no data rows")
        _fail(str(exc))
    for line, reason in dataset.rejected:
        click.echo(f"warning: line {line} rejected: {reason}", err=True)
    if not dataset.rows:
        _fail("no data rows")
    config = FitConfig(ridge_lambda=ridge if ridge is not None else 0.0, auto_ridge=False)
    try:
        report = fit_logistic(dataset, config)
    except EpiriskError as exc:
        _fail(str(exc))
    coefs = [report.coefficients.intercept, *report.coefficients.main_coefs.values(), *report.coefficients.interaction_coefs.values()]
    separated = max(abs(c) for c in coefs) > SEPARATION_COEF_LIMIT
    if not report.converged or (separated and report.penalty_used == 0.0):
        _fail(
            "fit did not converge (possible separation); consider --ridge 1e-3"
            if report.penalty_used == 0.0
            else "fit did not converge"
        )
    out_path.write_text(canonical_bytes(fit_report_to_model_dict(report, dataset)).decode("utf-8") + "\n", encoding="utf-8")
    click.echo(f"wrote {out_path}")
    click.echo(f"rows: {len(dataset.rows)} (rejected: {len(dataset.rejected)})")
    click.echo(f"iterations: {report.iterations}")
    click.echo(f"log-likelihood: {report.log_likelihood:.6f}")
    click.echo(f"max gradient norm: {report.max_gradient_norm:.3e}")
    click.echo(f"penalty: {report.penalty_used}")


@main.command("validate")
@click.option("--schema", "schema_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
def validate_command(schema_path: Path) -> None:
    """Check a schema file, printing every violation."""
    try:
        schema = load_schema(schema_path)
    except SchemaValidationError as exc:
        _fail(f"schema {schema_path} is invalid", exc.violations)
    n_questions = sum(len(section.questions) for section in schema.sections)
    click.echo(f"OK: {schema.id} v{schema.version} ({n_questions} questions, {len(schema.feature_ids())} features)")


@main.command("serve")
@click.option("--host", default=None, help="Bind host; defaults to EPIRISK_LISTEN or 127.0.0.1.")
@click.option("--port", default=None, type=int, help="Bind port; defaults to EPIRISK_LISTEN or 8000.")
def serve_command(host: str | None, port: int | None) -> None:
    """Run the HTTP service (configured via EPIRISK_* environment variables)."""
    import os

    import uvicorn

    from epirisk.service import ENV_LISTEN, create_app

    listen = os.environ.get(ENV_LISTEN, "127.0.0.1:8000")
    env_host, _, env_port = listen.rpartition(":")
    host = host if host is not None else (env_host or "127.0.0.1")
    if port is None:
        try:
            port = int(env_port)
        except ValueError:
            raise click.UsageError(f"{ENV_LISTEN} must look like host:port, got {listen!r}")
    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
