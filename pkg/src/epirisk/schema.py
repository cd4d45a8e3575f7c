"""Declarative questionnaire format: parsing, validation, answer encoding.

Schemas are UTF-8 JSON. Parsing collects every violation instead of
stopping at the first. Encoding turns a validated answer set into a flat
feature vector; interaction features are derived downstream from
``interaction_pairs``, never materialized here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime
from importlib import resources
from pathlib import Path
from typing import Any, Iterator, Mapping

from epirisk.errors import AnswerValidationError, SchemaValidationError
from epirisk.jsonutil import canonical_dumps

FORMAT_VERSION = 1

CHECKBOX = "checkbox"
DROPDOWN = "dropdown"
SLIDER = "slider"
TRI_STATE = "tri-state"
WIDGETS = (CHECKBOX, DROPDOWN, SLIDER, TRI_STATE)

AUDIENCES = ("patient", "hospital", "sanitary-inspection")

YES = "yes"
NO = "no"
UNKNOWN = "unknown"
TRI_VALUES = (YES, NO, UNKNOWN)


@dataclass(frozen=True)
class FeatureVector:
    """Encoded answers: feature values plus the set answered "do not know".

    ``unknown_set`` is disjoint from ``values``; unknown features carry no
    value until marginalization resolves them.
    """

    values: Mapping[str, float]
    unknown_set: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        overlap = self.unknown_set & set(self.values)
        if overlap:
            raise ValueError(f"unknown_set overlaps values: {sorted(overlap)}")


@dataclass(frozen=True)
class Option:
    id: str
    label: Mapping[str, str]
    # None marks the reference level: choosing it contributes all-zero dummies
    feature: str | None = None


@dataclass(frozen=True)
class Bounds:
    lo: float
    hi: float


@dataclass(frozen=True)
class SectionGate:
    """Section is active only when the referenced answer equals ``equals``."""

    question: str
    equals: Any


@dataclass(frozen=True)
class Question:
    id: str
    widget: str
    label: Mapping[str, str]
    feature: str | None = None
    options: tuple[Option, ...] = ()
    bounds: Bounds | None = None
    modifiable: bool = False
    allow_unknown: bool = False

    def feature_ids(self) -> tuple[str, ...]:
        if self.widget == DROPDOWN:
            return tuple(o.feature for o in self.options if o.feature is not None)
        return (self.feature,) if self.feature is not None else ()


@dataclass(frozen=True)
class Section:
    id: str
    title: Mapping[str, str]
    enabled_when: SectionGate | None
    questions: tuple[Question, ...]


@dataclass(frozen=True)
class BandThresholds:
    """Upper bounds of the low/moderate/high bands; very-high above."""

    low: float = 0.01
    moderate: float = 0.05
    high: float = 0.20

    def band(self, probability: float) -> str:
        if probability < self.low:
            return "low"
        if probability < self.moderate:
            return "moderate"
        if probability < self.high:
            return "high"
        return "very-high"


@dataclass(frozen=True)
class QuestionnaireSchema:
    id: str
    version: int
    audience: str
    title: Mapping[str, str]
    band_thresholds: BandThresholds
    sections: tuple[Section, ...]
    priors: Mapping[str, float] = field(default_factory=dict)
    interaction_pairs: tuple[tuple[str, str], ...] = ()

    def questions(self) -> Iterator[Question]:
        for section in self.sections:
            yield from section.questions

    def question_map(self) -> dict[str, Question]:
        return {q.id: q for q in self.questions()}

    def feature_ids(self) -> tuple[str, ...]:
        out: list[str] = []
        for q in self.questions():
            out.extend(q.feature_ids())
        return tuple(out)

    def feature_map(self) -> dict[str, tuple[str, ...]]:
        return {q.id: q.feature_ids() for q in self.questions()}

    def modifiable_flags(self) -> dict[str, bool]:
        return {q.id: q.modifiable for q in self.questions()}


@dataclass(frozen=True)
class AnswerSet:
    schema_id: str
    answers: Mapping[str, Any]
    timestamp: str | None = None


# ---------------------------------------------------------------------------
# parsing

_SCHEMA_KEYS = {
    "format_version",
    "id",
    "version",
    "audience",
    "title",
    "band_thresholds",
    "sections",
    "priors",
    "interaction_pairs",
}
_SECTION_KEYS = {"id", "title", "enabled_when", "questions"}
_QUESTION_KEYS = {"id", "widget", "label", "feature", "options", "bounds", "modifiable", "allow_unknown"}
_OPTION_KEYS = {"id", "label", "feature"}
_BAND_KEYS = {"low", "moderate", "high"}


def _label_map(raw: Any, context: str, errors: list[str]) -> dict[str, str]:
    if not isinstance(raw, dict) or not raw:
        errors.append(f"{context}: label map must be a non-empty object of language tag to text")
        return {}
    out: dict[str, str] = {}
    for lang, text in raw.items():
        if not isinstance(text, str):
            errors.append(f"{context}: label for language {lang!r} must be a string")
            continue
        out[str(lang)] = text
    return out


def _is_number(v: Any) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _parse_question(raw: Any, where: str, errors: list[str]) -> Question | None:
    if not isinstance(raw, dict):
        errors.append(f"{where}: question must be an object")
        return None
    qid = raw.get("id")
    ctx = f"question {qid!r}" if isinstance(qid, str) else where
    unknown = sorted(set(raw) - _QUESTION_KEYS)
    if unknown:
        errors.append(f"{ctx}: unknown field(s): {', '.join(unknown)}")
    if not isinstance(qid, str) or not qid:
        errors.append(f"{where}: question id must be a non-empty string")
        return None
    widget = raw.get("widget")
    if widget not in WIDGETS:
        errors.append(f"{ctx}: widget must be one of {', '.join(WIDGETS)}")
        return None
    label = _label_map(raw.get("label"), ctx, errors)
    feature = raw.get("feature")
    options_raw = raw.get("options")
    bounds_raw = raw.get("bounds")
    modifiable = raw.get("modifiable", False)
    if not isinstance(modifiable, bool):
        errors.append(f"{ctx}: modifiable must be a boolean")
        modifiable = False
    allow_unknown = raw.get("allow_unknown", widget == TRI_STATE)
    if not isinstance(allow_unknown, bool):
        errors.append(f"{ctx}: allow_unknown must be a boolean")
        allow_unknown = widget == TRI_STATE

    options: tuple[Option, ...] = ()
    bounds: Bounds | None = None
    if widget == DROPDOWN:
        if feature is not None:
            errors.append(f"{ctx}: dropdown carries features on its options, not on the question")
            feature = None
        if not isinstance(options_raw, list) or len(options_raw) < 2:
            errors.append(f"{ctx}: dropdown needs at least 2 options")
            options_raw = options_raw if isinstance(options_raw, list) else []
        parsed: list[Option] = []
        seen_opt: set[str] = set()
        for i, opt in enumerate(options_raw):
            if not isinstance(opt, dict):
                errors.append(f"{ctx}: option #{i} must be an object")
                continue
            bad = sorted(set(opt) - _OPTION_KEYS)
            if bad:
                errors.append(f"{ctx}: option #{i} has unknown field(s): {', '.join(bad)}")
            oid = opt.get("id")
            if not isinstance(oid, str) or not oid:
                errors.append(f"{ctx}: option #{i} id must be a non-empty string")
                continue
            if oid in seen_opt:
                errors.append(f"{ctx}: duplicate option id {oid!r}")
                continue
            seen_opt.add(oid)
            ofeat = opt.get("feature")
            if ofeat is not None and not isinstance(ofeat, str):
                errors.append(f"{ctx}: option {oid!r} feature must be a string or null")
                ofeat = None
            parsed.append(Option(id=oid, label=_label_map(opt.get("label"), f"{ctx} option {oid!r}", errors), feature=ofeat))
        options = tuple(parsed)
    else:
        if options_raw is not None:
            errors.append(f"{ctx}: options are only valid on dropdown questions")
        if not isinstance(feature, str) or not feature:
            errors.append(f"{ctx}: feature must be a non-empty string")
            feature = None

    if widget == SLIDER:
        if not isinstance(bounds_raw, dict) or not _is_number(bounds_raw.get("lo")) or not _is_number(bounds_raw.get("hi")):
            errors.append(f"{ctx}: slider needs numeric bounds {{lo, hi}}")
        else:
            bad = sorted(set(bounds_raw) - {"lo", "hi"})
            if bad:
                errors.append(f"{ctx}: bounds has unknown field(s): {', '.join(bad)}")
            lo, hi = float(bounds_raw["lo"]), float(bounds_raw["hi"])
            if not lo < hi:
                errors.append(f"{ctx}: slider bounds require lo < hi, got [{lo}, {hi}]")
            else:
                bounds = Bounds(lo=lo, hi=hi)
    elif bounds_raw is not None:
        errors.append(f"{ctx}: bounds are only valid on slider questions")

    if widget == TRI_STATE and not allow_unknown:
        errors.append(f"{ctx}: tri-state implies allow_unknown")
        allow_unknown = True
    if widget != TRI_STATE and allow_unknown:
        errors.append(f"{ctx}: allow_unknown is only supported on tri-state questions")
        allow_unknown = False

    return Question(
        id=qid,
        widget=widget,
        label=label,
        feature=feature if widget != DROPDOWN else None,
        options=options,
        bounds=bounds,
        modifiable=modifiable,
        allow_unknown=allow_unknown,
    )


def schema_from_dict(doc: Any) -> QuestionnaireSchema:
    errors: list[str] = []
    if not isinstance(doc, dict):
        raise SchemaValidationError(["schema document must be a JSON object"])
    unknown = sorted(set(doc) - _SCHEMA_KEYS)
    if unknown:
        errors.append(f"schema: unknown field(s): {', '.join(unknown)}")
    if doc.get("format_version") != FORMAT_VERSION:
        errors.append(f"schema: unsupported format_version: {doc.get('format_version')!r}")
    sid = doc.get("id")
    if not isinstance(sid, str) or not sid:
        errors.append("schema: id must be a non-empty string")
        sid = ""
    version = doc.get("version", 1)
    if not isinstance(version, int) or isinstance(version, bool) or version < 1:
        errors.append("schema: version must be a positive integer")
        version = 1
    audience = doc.get("audience")
    if audience not in AUDIENCES:
        errors.append(f"schema: audience must be one of {', '.join(AUDIENCES)}")
        audience = AUDIENCES[0]
    title = _label_map(doc.get("title"), "schema title", errors)

    bands_raw = doc.get("band_thresholds", {})
    bands = BandThresholds()
    if not isinstance(bands_raw, dict):
        errors.append("schema: band_thresholds must be an object")
    else:
        bad = sorted(set(bands_raw) - _BAND_KEYS)
        if bad:
            errors.append(f"schema: band_thresholds has unknown field(s): {', '.join(bad)}")
        vals = {k: bands_raw.get(k, getattr(bands, k)) for k in ("low", "moderate", "high")}
        if not all(_is_number(v) for v in vals.values()):
            errors.append("schema: band thresholds must be numbers")
        else:
            lo, mid, hi = float(vals["low"]), float(vals["moderate"]), float(vals["high"])
            if not (0.0 < lo < mid < hi <= 1.0):
                errors.append(f"schema: band thresholds must satisfy 0 < low < moderate < high <= 1, got {lo}, {mid}, {hi}")
            else:
                bands = BandThresholds(low=lo, moderate=mid, high=hi)

    sections: list[Section] = []
    question_ids: set[str] = set()
    raw_sections = doc.get("sections")
    if not isinstance(raw_sections, list) or not raw_sections:
        errors.append("schema: sections must be a non-empty list")
        raw_sections = []
    seen_sections: set[str] = set()
    for si, raw_sec in enumerate(raw_sections):
        if not isinstance(raw_sec, dict):
            errors.append(f"section #{si}: must be an object")
            continue
        bad = sorted(set(raw_sec) - _SECTION_KEYS)
        sec_id = raw_sec.get("id")
        sctx = f"section {sec_id!r}" if isinstance(sec_id, str) else f"section #{si}"
        if bad:
            errors.append(f"{sctx}: unknown field(s): {', '.join(bad)}")
        if not isinstance(sec_id, str) or not sec_id:
            errors.append(f"section #{si}: id must be a non-empty string")
            continue
        if sec_id in seen_sections:
            errors.append(f"{sctx}: duplicate section id")
            continue
        seen_sections.add(sec_id)
        stitle = _label_map(raw_sec.get("title"), f"{sctx} title", errors)
        gate_raw = raw_sec.get("enabled_when")
        gate: SectionGate | None = None
        if gate_raw is not None:
            if not isinstance(gate_raw, dict) or not isinstance(gate_raw.get("question"), str):
                errors.append(f"{sctx}: enabled_when must be an object with a question id and an equals value")
            else:
                bad = sorted(set(gate_raw) - {"question", "equals"})
                if bad:
                    errors.append(f"{sctx}: enabled_when has unknown field(s): {', '.join(bad)}")
                if "equals" not in gate_raw:
                    errors.append(f"{sctx}: enabled_when is missing the equals value")
                else:
                    gate = SectionGate(question=gate_raw["question"], equals=gate_raw["equals"])
        raw_questions = raw_sec.get("questions")
        if not isinstance(raw_questions, list) or not raw_questions:
            errors.append(f"{sctx}: questions must be a non-empty list")
            raw_questions = []
        parsed_questions: list[Question] = []
        for qi, raw_q in enumerate(raw_questions):
            q = _parse_question(raw_q, f"{sctx} question #{qi}", errors)
            if q is None:
                continue
            if q.id in question_ids:
                errors.append(f"question {q.id!r}: duplicate question id")
                continue
            question_ids.add(q.id)
            parsed_questions.append(q)
        sections.append(Section(id=sec_id, title=stitle, enabled_when=gate, questions=tuple(parsed_questions)))

    priors_raw = doc.get("priors", {})
    priors: dict[str, float] = {}
    if not isinstance(priors_raw, dict):
        errors.append("schema: priors must be an object of feature id to probability")
    else:
        for feat, p in priors_raw.items():
            if not _is_number(p) or not (0.0 <= float(p) <= 1.0):
                errors.append(f"prior for feature {feat!r} must be a probability in [0, 1]")
                continue
            priors[str(feat)] = float(p)

    pairs_raw = doc.get("interaction_pairs", [])
    pairs: list[tuple[str, str]] = []
    if not isinstance(pairs_raw, list):
        errors.append("schema: interaction_pairs must be a list of feature id pairs")
        pairs_raw = []
    for pi, pair in enumerate(pairs_raw):
        if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(x, str) for x in pair)):
            errors.append(f"interaction pair #{pi} must be a pair of feature ids")
            continue
        pairs.append((pair[0], pair[1]))

    # cross-cutting checks over the assembled structure
    schema = QuestionnaireSchema(
        id=sid,
        version=version,
        audience=audience,
        title=title,
        band_thresholds=bands,
        sections=tuple(sections),
        priors=priors,
        interaction_pairs=tuple(pairs),
    )
    seen_features: set[str] = set()
    for q in schema.questions():
        for feat in q.feature_ids():
            if feat in seen_features:
                errors.append(f"duplicate feature id {feat!r} (question {q.id!r})")
            seen_features.add(feat)
        if q.allow_unknown:
            for feat in q.feature_ids():
                if feat not in priors:
                    errors.append(f"question {q.id!r} allows unknown but feature {feat!r} has no prior")
    for a, b in schema.interaction_pairs:
        if a not in seen_features or b not in seen_features:
            errors.append(f"interaction pair ({a!r}, {b!r}) references an undeclared feature")
        elif a == b:
            errors.append(f"interaction pair ({a!r}, {b!r}) must reference distinct features")
    for feat in priors:
        if feat not in seen_features:
            errors.append(f"prior declared for undeclared feature {feat!r}")
    qmap = {q.id for q in schema.questions()}
    for section in schema.sections:
        if section.enabled_when is not None:
            gate = section.enabled_when
            if gate.question not in qmap:
                errors.append(f"section {section.id!r}: enabled_when references unknown question {gate.question!r}")
            elif gate.question in {q.id for q in section.questions}:
                errors.append(f"section {section.id!r}: enabled_when cannot reference a question inside the gated section")

    if errors:
        raise SchemaValidationError(errors)
    return schema


def parse_schema(text: str) -> QuestionnaireSchema:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaValidationError([f"invalid JSON: {exc}"]) from None
    return schema_from_dict(doc)


def schema_to_dict(schema: QuestionnaireSchema) -> dict[str, Any]:
    sections = []
    for section in schema.sections:
        questions = []
        for q in section.questions:
            doc: dict[str, Any] = {
                "id": q.id,
                "widget": q.widget,
                "label": dict(q.label),
                "modifiable": q.modifiable,
                "allow_unknown": q.allow_unknown,
            }
            if q.widget == DROPDOWN:
                doc["options"] = [{"id": o.id, "label": dict(o.label), "feature": o.feature} for o in q.options]
            else:
                doc["feature"] = q.feature
            if q.widget == SLIDER and q.bounds is not None:
                doc["bounds"] = {"lo": q.bounds.lo, "hi": q.bounds.hi}
            questions.append(doc)
        gate = section.enabled_when
        sections.append(
            {
                "id": section.id,
                "title": dict(section.title),
                "enabled_when": None if gate is None else {"question": gate.question, "equals": gate.equals},
                "questions": questions,
            }
        )
    return {
        "format_version": FORMAT_VERSION,
        "id": schema.id,
        "version": schema.version,
        "audience": schema.audience,
        "title": dict(schema.title),
        "band_thresholds": {
            "low": schema.band_thresholds.low,
            "moderate": schema.band_thresholds.moderate,
            "high": schema.band_thresholds.high,
        },
        "sections": sections,
        "priors": dict(schema.priors),
        "interaction_pairs": [list(p) for p in schema.interaction_pairs],
    }


def serialize_schema(schema: QuestionnaireSchema) -> str:
    return canonical_dumps(schema_to_dict(schema))


def load_schema(path: str | Path) -> QuestionnaireSchema:
    return parse_schema(Path(path).read_text(encoding="utf-8"))


def shipped_schema_ids() -> list[str]:
    root = resources.files("epirisk") / "schemas"
    return sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))


def load_shipped_schema(schema_id: str) -> QuestionnaireSchema:
    ref = resources.files("epirisk") / "schemas" / f"{schema_id}.json"
    try:
        text = ref.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise SchemaValidationError([f"no shipped schema named {schema_id!r}"]) from None
    return parse_schema(text)


# ---------------------------------------------------------------------------
# answers

def section_enabled(section: Section, answers: Mapping[str, Any]) -> bool:
    gate = section.enabled_when
    if gate is None:
        return True
    return answers.get(gate.question) == gate.equals


def _default_answer(q: Question) -> Any:
    if q.widget == CHECKBOX:
        return False
    if q.widget == TRI_STATE:
        return UNKNOWN
    if q.widget == DROPDOWN:
        return q.options[0].id
    return q.bounds.lo if q.bounds is not None else 0.0


def validate_answers(schema: QuestionnaireSchema, answers: Mapping[str, Any] | AnswerSet, timestamp: str | None = None) -> AnswerSet:
    """Check domains and fill widget defaults, producing a total AnswerSet.

    Unanswered: checkbox -> unchecked, tri-state -> unknown, dropdown ->
    first option, slider -> lower bound.
    """
    if isinstance(answers, AnswerSet):
        if answers.schema_id != schema.id:
            raise AnswerValidationError([("schema_id", f"answer set targets schema {answers.schema_id!r}, not {schema.id!r}")])
        raw = dict(answers.answers)
        timestamp = answers.timestamp if timestamp is None else timestamp
    else:
        raw = dict(answers)
    details: list[tuple[str, str]] = []
    qmap = schema.question_map()
    for qid in raw:
        if qid not in qmap:
            details.append((qid, "unknown question id"))
    normalized: dict[str, Any] = {}
    for qid, q in qmap.items():
        if qid not in raw:
            normalized[qid] = _default_answer(q)
            continue
        value = raw[qid]
        if q.widget == CHECKBOX:
            if not isinstance(value, bool):
                details.append((qid, f"checkbox expects true or false, got {value!r}"))
                continue
            normalized[qid] = value
        elif q.widget == TRI_STATE:
            if value not in TRI_VALUES:
                details.append((qid, f"tri-state expects one of {', '.join(TRI_VALUES)}, got {value!r}"))
                continue
            normalized[qid] = value
        elif q.widget == DROPDOWN:
            if not isinstance(value, str) or value not in {o.id for o in q.options}:
                details.append((qid, f"value {value!r} is not among the declared options"))
                continue
            normalized[qid] = value
        else:
            if not _is_number(value):
                details.append((qid, f"slider expects a number, got {value!r}"))
                continue
            v = float(value)
            assert q.bounds is not None
            if not (q.bounds.lo <= v <= q.bounds.hi):
                details.append((qid, f"value {v} outside bounds [{q.bounds.lo}, {q.bounds.hi}]"))
                continue
            normalized[qid] = v
    if timestamp is not None:
        try:
            datetime.fromisoformat(timestamp)
        except (TypeError, ValueError):
            details.append(("timestamp", f"not an ISO-8601 timestamp: {timestamp!r}"))
    if details:
        raise AnswerValidationError(details)
    return AnswerSet(schema_id=schema.id, answers=normalized, timestamp=timestamp)


def encode_features(schema: QuestionnaireSchema, answers: AnswerSet) -> FeatureVector:
    """Encode a validated AnswerSet into a FeatureVector.

    Checkbox -> {0, 1}; dropdown -> one-hot dummies with the reference
    level all-zeros; slider -> min-max scaled to [0, 1]; tri-state unknown
    lands in unknown_set. Questions in disabled sections contribute nothing.
    """
    values: dict[str, float] = {}
    unknown: set[str] = set()
    for section in schema.sections:
        if not section_enabled(section, answers.answers):
            continue
        for q in section.questions:
            value = answers.answers[q.id]
            if q.widget == CHECKBOX:
                values[q.feature] = 1.0 if value else 0.0
            elif q.widget == TRI_STATE:
                if value == UNKNOWN:
                    unknown.add(q.feature)
                else:
                    values[q.feature] = 1.0 if value == YES else 0.0
            elif q.widget == DROPDOWN:
                for option in q.options:
                    if option.feature is not None:
                        values[option.feature] = 1.0 if option.id == value else 0.0
            else:
                assert q.bounds is not None
                values[q.feature] = (float(value) - q.bounds.lo) / (q.bounds.hi - q.bounds.lo)
    return FeatureVector(values=values, unknown_set=frozenset(unknown))
