"""Shared fixtures: shipped schema/model pairs, random answer generation,
and a service client wired to a throwaway registry."""

from __future__ import annotations

import random
from importlib import resources
from typing import Any

import pytest

from epirisk.models import RiskModel, parse_model
from epirisk.schema import CHECKBOX, DROPDOWN, SLIDER, TRI_STATE, QuestionnaireSchema, load_shipped_schema, shipped_schema_ids

SHIPPED_IDS = ("childbirth-hospital", "childbirth-patient", "sti-hiv")


def load_default_model(schema_id: str) -> RiskModel:
    ref = resources.files("epirisk") / "models" / f"{schema_id}.json"
    return parse_model(ref.read_text(encoding="utf-8"))


def random_answers(schema: QuestionnaireSchema, rng: random.Random) -> dict[str, Any]:
    """Uniformly random in-domain answer for every question."""
    answers: dict[str, Any] = {}
    for question in schema.questions():
        if question.widget == CHECKBOX:
            answers[question.id] = rng.random() < 0.5
        elif question.widget == TRI_STATE:
            answers[question.id] = rng.choice(["yes", "no", "unknown"])
        elif question.widget == DROPDOWN:
            answers[question.id] = rng.choice([o.id for o in question.options])
        elif question.widget == SLIDER:
            lo, hi = question.bounds.lo, question.bounds.hi
            answers[question.id] = lo + rng.random() * (hi - lo)
    return answers


def all_clear_answers(schema: QuestionnaireSchema) -> dict[str, Any]:
    """Everything unchecked / answered "no" / at the reference or lower bound."""
    answers: dict[str, Any] = {}
    for question in schema.questions():
        if question.widget == CHECKBOX:
            answers[question.id] = False
        elif question.widget == TRI_STATE:
            answers[question.id] = "no"
        elif question.widget == DROPDOWN:
            answers[question.id] = question.options[0].id
        elif question.widget == SLIDER:
            answers[question.id] = question.bounds.lo
    return answers


@pytest.fixture(scope="session")
def shipped_schemas() -> dict[str, QuestionnaireSchema]:
    assert tuple(shipped_schema_ids()) == SHIPPED_IDS
    return {sid: load_shipped_schema(sid) for sid in SHIPPED_IDS}


@pytest.fixture(scope="session")
def shipped_models() -> dict[str, RiskModel]:
    return {sid: load_default_model(sid) for sid in SHIPPED_IDS}


@pytest.fixture()
def service_client(tmp_path):
    """TestClient over a fresh registry; token "hospital-secret"."""
    from fastapi.testclient import TestClient

    from epirisk.service import create_app

    app = create_app(registry_root=tmp_path / "registry", token="hospital-secret")
    with TestClient(app) as client:
        yield client


AUTH = {"Authorization": "Bearer hospital-secret"}
