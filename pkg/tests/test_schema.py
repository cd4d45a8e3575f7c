"""Questionnaire schema parsing, violation collection, answer validation,
and feature encoding."""

from __future__ import annotations

import copy
import json
import random

import pytest

from epirisk.errors import AnswerValidationError, SchemaValidationError
from epirisk.schema import (
    AnswerSet,
    BandThresholds,
    QuestionnaireSchema,
    encode_features,
    load_shipped_schema,
    parse_schema,
    schema_from_dict,
    schema_to_dict,
    serialize_schema,
    shipped_schema_ids,
    validate_answers,
)
from tests.conftest import SHIPPED_IDS, random_answers


def minimal_doc() -> dict:
    return {
        "format_version": 1,
        "id": "unit-test",
        "version": 1,
        "audience": "patient",
        "title": {"en": "Unit"},
        "band_thresholds": {"low": 0.01, "moderate": 0.05, "high": 0.20},
        "sections": [
            {
                "id": "main",
                "title": {"en": "Main"},
                "enabled_when": None,
                "questions": [
                    {
                        "id": "smoker",
                        "widget": "checkbox",
                        "label": {"en": "Do you smoke?"},
                        "feature": "smoker",
                    }
                ],
            }
        ],
        "priors": {},
        "interaction_pairs": [],
    }


def violations_of(doc) -> list[str]:
    with pytest.raises(SchemaValidationError) as excinfo:
        schema_from_dict(doc)
    return excinfo.value.violations


# ------------------------------------------------------------------ parsing


def test_minimal_document_parses():
    schema = schema_from_dict(minimal_doc())
    assert schema.id == "unit-test"
    assert schema.audience == "patient"
    q = schema.question_map()["smoker"]
    assert q.modifiable is False
    assert q.allow_unknown is False
    assert schema.feature_ids() == ("smoker",)


def test_all_violations_reported_together():
    doc = minimal_doc()
    doc["audience"] = "astronauts"
    doc["sections"][0]["questions"].append(
        {"id": "smoker2", "widget": "checkbox", "label": {"en": "Again?"}, "feature": "smoker"}
    )
    doc["interaction_pairs"] = [["smoker", "ghost_feature"]]
    violations = violations_of(doc)
    assert len(violations) >= 3
    text = "\n".join(violations)
    assert "audience" in text
    assert "duplicate feature id 'smoker'" in text
    assert "('smoker', 'ghost_feature')" in text and "undeclared" in text


def test_unknown_fields_rejected_at_every_level():
    doc = minimal_doc()
    doc["color_scheme"] = "dark"
    doc["sections"][0]["icon"] = "star"
    doc["sections"][0]["questions"][0]["tooltip"] = "hi"
    violations = violations_of(doc)
    text = "\n".join(violations)
    assert "color_scheme" in text
    assert "icon" in text
    assert "tooltip" in text


def test_format_version_checked():
    doc = minimal_doc()
    doc["format_version"] = 99
    assert any("format_version" in v for v in violations_of(doc))


def test_duplicate_question_and_section_ids():
    doc = minimal_doc()
    doc["sections"].append(copy.deepcopy(doc["sections"][0]))
    violations = violations_of(doc)
    assert any("duplicate section id" in v for v in violations)
    doc = minimal_doc()
    dup = copy.deepcopy(doc["sections"][0]["questions"][0])
    dup["feature"] = "other"
    doc["sections"][0]["questions"].append(dup)
    assert any("duplicate question id" in v for v in violations_of(doc))


def test_dropdown_rules():
    doc = minimal_doc()
    doc["sections"][0]["questions"][0] = {
        "id": "pick",
        "widget": "dropdown",
        "label": {"en": "Pick"},
        "options": [{"id": "only", "label": {"en": "Only"}, "feature": None}],
    }
    assert any("at least 2 options" in v for v in violations_of(doc))

    doc["sections"][0]["questions"][0]["options"].append(
        {"id": "only", "label": {"en": "Only again"}, "feature": "dup"}
    )
    assert any("duplicate option id" in v for v in violations_of(doc))

    doc["sections"][0]["questions"][0]["options"][1]["id"] = "second"
    doc["sections"][0]["questions"][0]["feature"] = "on_question"
    assert any("on its options" in v for v in violations_of(doc))


def test_non_dropdown_cannot_carry_options():
    doc = minimal_doc()
    doc["sections"][0]["questions"][0]["options"] = [{"id": "x", "label": {"en": "x"}}]
    assert any("only valid on dropdown" in v for v in violations_of(doc))


def test_slider_bounds_rules():
    doc = minimal_doc()
    doc["sections"][0]["questions"][0] = {
        "id": "hours",
        "widget": "slider",
        "label": {"en": "Hours"},
        "feature": "hours",
    }
    assert any("numeric bounds" in v for v in violations_of(doc))
    doc["sections"][0]["questions"][0]["bounds"] = {"lo": 5, "hi": 5}
    assert any("lo < hi" in v for v in violations_of(doc))
    doc["sections"][0]["questions"][0]["bounds"] = {"lo": 0, "hi": 10}
    schema = schema_from_dict(doc)
    assert schema.question_map()["hours"].bounds.hi == 10.0

    doc = minimal_doc()
    doc["sections"][0]["questions"][0]["bounds"] = {"lo": 0, "hi": 1}
    assert any("only valid on slider" in v for v in violations_of(doc))


def test_tri_state_implies_allow_unknown():
    doc = minimal_doc()
    doc["priors"] = {"fever": 0.1}
    doc["sections"][0]["questions"][0] = {
        "id": "fever",
        "widget": "tri-state",
        "label": {"en": "Fever?"},
        "feature": "fever",
        "allow_unknown": False,
    }
    assert any("implies allow_unknown" in v for v in violations_of(doc))
    del doc["sections"][0]["questions"][0]["allow_unknown"]
    schema = schema_from_dict(doc)
    assert schema.question_map()["fever"].allow_unknown is True


def test_allow_unknown_only_on_tri_state():
    doc = minimal_doc()
    doc["sections"][0]["questions"][0]["allow_unknown"] = True
    assert any("only supported on tri-state" in v for v in violations_of(doc))


def test_unknown_capable_feature_requires_prior():
    doc = minimal_doc()
    doc["sections"][0]["questions"][0] = {
        "id": "fever",
        "widget": "tri-state",
        "label": {"en": "Fever?"},
        "feature": "fever",
    }
    assert any("has no prior" in v for v in violations_of(doc))


def test_prior_for_undeclared_feature_rejected():
    doc = minimal_doc()
    doc["priors"] = {"phantom": 0.5}
    assert any("undeclared feature 'phantom'" in v for v in violations_of(doc))


def test_prior_out_of_range_rejected():
    doc = minimal_doc()
    doc["priors"] = {"smoker": 1.5}
    assert any("probability in [0, 1]" in v for v in violations_of(doc))


def test_band_threshold_ordering_enforced():
    for bad in (
        {"low": 0.05, "moderate": 0.05, "high": 0.2},
        {"low": 0.0, "moderate": 0.05, "high": 0.2},
        {"low": 0.01, "moderate": 0.05, "high": 1.5},
        {"low": 0.1, "moderate": 0.05, "high": 0.2},
    ):
        doc = minimal_doc()
        doc["band_thresholds"] = bad
        assert any("band thresholds must satisfy" in v for v in violations_of(doc))


def test_gate_references_must_resolve():
    doc = minimal_doc()
    doc["sections"][0]["enabled_when"] = {"question": "missing", "equals": True}
    assert any("unknown question 'missing'" in v for v in violations_of(doc))
    doc["sections"][0]["enabled_when"] = {"question": "smoker", "equals": True}
    assert any("inside the gated section" in v for v in violations_of(doc))


def test_self_interaction_pair_rejected():
    doc = minimal_doc()
    doc["interaction_pairs"] = [["smoker", "smoker"]]
    assert any("distinct features" in v for v in violations_of(doc))


def test_invalid_json_reported_as_violation():
    with pytest.raises(SchemaValidationError, match="invalid JSON"):
        parse_schema("{not json")


# ---------------------------------------------------------- shipped schemas


def test_shipped_ids_are_sorted_and_stable():
    assert tuple(shipped_schema_ids()) == SHIPPED_IDS


def test_unknown_shipped_schema_errors():
    with pytest.raises(SchemaValidationError, match="nonesuch"):
        load_shipped_schema("nonesuch")


def test_shipped_schemas_self_validate(shipped_schemas):
    for sid, schema in shipped_schemas.items():
        assert schema.id == sid
        assert isinstance(schema, QuestionnaireSchema)


def test_patient_schema_shape(shipped_schemas):
    schema = shipped_schemas["childbirth-patient"]
    assert schema.audience == "patient"
    assert len(list(schema.questions())) == 23
    assert len(schema.feature_ids()) == 23
    assert len(schema.feature_ids()) == len(set(schema.feature_ids()))


def test_hospital_schema_shape(shipped_schemas):
    schema = shipped_schemas["childbirth-hospital"]
    assert schema.audience == "hospital"
    questions = list(schema.questions())
    assert len(questions) == 25
    assert len(schema.feature_ids()) == 28
    by_section = {s.id: len(s.questions) for s in schema.sections}
    # 18 patient-history items, 7 operational items
    assert by_section["women-health"] + by_section["perinatal"] == 18
    assert by_section["childbirth-type"] + by_section["operation"] == 7


def test_hospital_operation_section_is_gated(shipped_schemas):
    schema = shipped_schemas["childbirth-hospital"]
    gated = {s.id: s.enabled_when for s in schema.sections}
    gate = gated["operation"]
    assert gate is not None
    assert gate.question == "if-cs"
    assert gate.equals == "yes"


def test_sti_schema_shape(shipped_schemas):
    schema = shipped_schemas["sti-hiv"]
    assert schema.audience == "patient"
    contact = schema.question_map()["contact-type"]
    assert contact.widget == "dropdown"
    assert all(o.feature is not None for o in contact.options)


def test_every_tri_state_has_prior(shipped_schemas):
    for schema in shipped_schemas.values():
        for q in schema.questions():
            if q.allow_unknown:
                assert q.feature in schema.priors


def test_interaction_pairs_reference_declared_features(shipped_schemas):
    for schema in shipped_schemas.values():
        feats = set(schema.feature_ids())
        for a, b in schema.interaction_pairs:
            assert a in feats and b in feats and a != b


# --------------------------------------------------------------- round-trip


def test_round_trip_is_identity(shipped_schemas):
    for schema in shipped_schemas.values():
        text = serialize_schema(schema)
        again = parse_schema(text)
        assert again == schema
        assert serialize_schema(again) == text


def test_round_trip_preserves_dict(shipped_schemas):
    for schema in shipped_schemas.values():
        doc = schema_to_dict(schema)
        assert schema_from_dict(json.loads(json.dumps(doc))) == schema


# ------------------------------------------------------------------ answers


def test_defaults_filled_for_unanswered_questions(shipped_schemas):
    schema = shipped_schemas["childbirth-hospital"]
    validated = validate_answers(schema, {})
    answers = validated.answers
    assert answers["age-gt-35"] is False
    assert answers["fever-above-37-5"] == "unknown"
    assert answers["if-cs"] == "no"  # first declared option
    assert answers["procedure-duration"] == 0.0


def test_answer_violations_collected(shipped_schemas):
    schema = shipped_schemas["childbirth-hospital"]
    bad = {
        "age-gt-35": "yes",  # checkbox wants a bool
        "fever-above-37-5": "maybe",
        "if-cs": "sideways",
        "procedure-duration": 999,
        "favourite-colour": "blue",
    }
    with pytest.raises(AnswerValidationError) as excinfo:
        validate_answers(schema, bad)
    details = dict(excinfo.value.details)
    assert set(details) == set(bad)
    assert "outside bounds" in details["procedure-duration"]
    assert "unknown question id" in details["favourite-colour"]


def test_bad_timestamp_rejected(shipped_schemas):
    schema = shipped_schemas["sti-hiv"]
    with pytest.raises(AnswerValidationError) as excinfo:
        validate_answers(schema, {}, timestamp="yesterday")
    assert dict(excinfo.value.details)["timestamp"].startswith("not an ISO-8601")
    ok = validate_answers(schema, {}, timestamp="2024-05-01T12:30:00+00:00")
    assert ok.timestamp == "2024-05-01T12:30:00+00:00"


def test_answer_set_schema_id_must_match(shipped_schemas):
    schema = shipped_schemas["sti-hiv"]
    foreign = AnswerSet(schema_id="childbirth-patient", answers={})
    with pytest.raises(AnswerValidationError):
        validate_answers(schema, foreign)


# ----------------------------------------------------------------- encoding


def make_encoder_schema() -> QuestionnaireSchema:
    return schema_from_dict(
        {
            "format_version": 1,
            "id": "encoder-test",
            "version": 1,
            "audience": "hospital",
            "title": {"en": "Encoder"},
            "sections": [
                {
                    "id": "base",
                    "title": {"en": "Base"},
                    "enabled_when": None,
                    "questions": [
                        {"id": "over-40", "widget": "checkbox", "label": {"en": "Over 40?"}, "feature": "over_40"},
                        {
                            "id": "severity",
                            "widget": "dropdown",
                            "label": {"en": "Severity"},
                            "options": [
                                {"id": "none", "label": {"en": "None"}, "feature": None},
                                {"id": "mild", "label": {"en": "Mild"}, "feature": "severity_mild"},
                                {"id": "severe", "label": {"en": "Severe"}, "feature": "severity_severe"},
                            ],
                        },
                        {"id": "fever", "widget": "tri-state", "label": {"en": "Fever?"}, "feature": "fever"},
                        {
                            "id": "duration",
                            "widget": "slider",
                            "label": {"en": "Duration"},
                            "feature": "duration",
                            "bounds": {"lo": 0, "hi": 180},
                        },
                    ],
                },
                {
                    "id": "extra",
                    "title": {"en": "Extra"},
                    "enabled_when": {"question": "over-40", "equals": True},
                    "questions": [
                        {"id": "frail", "widget": "checkbox", "label": {"en": "Frail?"}, "feature": "frail"},
                    ],
                },
            ],
            "priors": {"fever": 0.2},
        }
    )


def test_encoding_examples():
    schema = make_encoder_schema()
    validated = validate_answers(
        schema,
        {"over-40": True, "severity": "mild", "fever": "yes", "duration": 45, "frail": False},
    )
    fv = encode_features(schema, validated)
    assert fv.values == {
        "over_40": 1.0,
        "severity_mild": 1.0,
        "severity_severe": 0.0,
        "fever": 1.0,
        "duration": 0.25,
        "frail": 0.0,
    }
    assert fv.unknown_set == frozenset()


def test_reference_level_encodes_all_zero_dummies():
    schema = make_encoder_schema()
    validated = validate_answers(schema, {"severity": "none", "fever": "no"})
    fv = encode_features(schema, validated)
    assert fv.values["severity_mild"] == 0.0
    assert fv.values["severity_severe"] == 0.0


def test_unknown_goes_to_unknown_set_not_values():
    schema = make_encoder_schema()
    validated = validate_answers(schema, {"fever": "unknown"})
    fv = encode_features(schema, validated)
    assert "fever" not in fv.values
    assert fv.unknown_set == frozenset({"fever"})


def test_disabled_section_contributes_nothing():
    schema = make_encoder_schema()
    validated = validate_answers(schema, {"over-40": False, "frail": True, "fever": "no"})
    fv = encode_features(schema, validated)
    assert "frail" not in fv.values
    enabled = validate_answers(schema, {"over-40": True, "frail": True, "fever": "no"})
    assert encode_features(schema, enabled).values["frail"] == 1.0


def test_slider_endpoints_scale_to_unit_interval():
    schema = make_encoder_schema()
    lo = encode_features(schema, validate_answers(schema, {"duration": 0, "fever": "no"}))
    hi = encode_features(schema, validate_answers(schema, {"duration": 180, "fever": "no"}))
    assert lo.values["duration"] == 0.0
    assert hi.values["duration"] == 1.0


def test_label_text_does_not_affect_encoding(shipped_schemas):
    schema = shipped_schemas["childbirth-patient"]
    doc = schema_to_dict(schema)
    for section in doc["sections"]:
        section["title"] = {"en": "Renamed", "de": "Umbenannt"}
        for q in section["questions"]:
            q["label"] = {"en": "Reworded", "pl": "Inaczej"}
    reworded = schema_from_dict(doc)
    rng = random.Random(31337)
    for _ in range(10):
        answers = random_answers(schema, rng)
        a = encode_features(schema, validate_answers(schema, answers))
        b = encode_features(reworded, validate_answers(reworded, answers))
        assert a == b


def test_one_hot_dummies_sum_to_at_most_one(shipped_schemas):
    rng = random.Random(2718)
    for schema in shipped_schemas.values():
        for _ in range(20):
            validated = validate_answers(schema, random_answers(schema, rng))
            fv = encode_features(schema, validated)
            for q in schema.questions():
                if q.widget != "dropdown":
                    continue
                feats = [o.feature for o in q.options if o.feature is not None]
                if not all(f in fv.values for f in feats):
                    continue  # question sits in a disabled section
                total = sum(fv.values[f] for f in feats)
                assert total in (0.0, 1.0)
                assert all(fv.values[f] in (0.0, 1.0) for f in feats)


def test_checkbox_and_tri_state_encode_binary(shipped_schemas):
    rng = random.Random(1729)
    schema = shipped_schemas["childbirth-patient"]
    for _ in range(20):
        validated = validate_answers(schema, random_answers(schema, rng))
        fv = encode_features(schema, validated)
        for q in schema.questions():
            if q.widget in ("checkbox", "tri-state") and q.feature in fv.values:
                assert fv.values[q.feature] in (0.0, 1.0)


# -------------------------------------------------------------------- bands


def test_band_boundaries_are_half_open():
    bands = BandThresholds()
    assert bands.band(0.0) == "low"
    assert bands.band(0.0099) == "low"
    assert bands.band(0.01) == "moderate"
    assert bands.band(0.0499) == "moderate"
    assert bands.band(0.05) == "high"
    assert bands.band(0.1999) == "high"
    assert bands.band(0.20) == "very-high"
    assert bands.band(1.0) == "very-high"


def test_custom_band_thresholds_respected():
    doc = minimal_doc()
    doc["band_thresholds"] = {"low": 0.001, "moderate": 0.002, "high": 0.003}
    schema = schema_from_dict(doc)
    assert schema.band_thresholds.band(0.0025) == "high"
