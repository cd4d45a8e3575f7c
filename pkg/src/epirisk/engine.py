"""Risk evaluation over encoded answers.

Two model families: a probability-product model for per-contact
transmission risk (Bayesian odds update for the partner term) and a
logistic regression with pairwise interactions for procedure-related
risk. Unknown answers are resolved by marginalization over declared
priors. All evaluation is deterministic; monte-carlo noise uses an
explicit per-call seeded generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from decimal import ROUND_HALF_UP, Decimal
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from epirisk import kernels
from epirisk.errors import ConfigurationError, SchemaMismatchError, ValidationError
from epirisk.models import MONTE_CARLO, LogisticModel, RiskModel, StiProductModel
from epirisk.schema import (
    CHECKBOX,
    DROPDOWN,
    NO,
    SLIDER,
    TRI_STATE,
    YES,
    AnswerSet,
    BandThresholds,
    FeatureVector,
    QuestionnaireSchema,
    encode_features,
    section_enabled,
    validate_answers,
)

# Marginalization falls back to sampling above this many unknowns;
# 2^12 completions is the largest exhaustive enumeration.
EXHAUSTIVE_LIMIT = 12
SAMPLING_DRAWS = 10_000
_SAMPLING_SEED = 424243


@dataclass(frozen=True)
class RiskAssessment:
    probability: float
    display: str
    band: str
    factor_deltas: tuple[tuple[str, float], ...] = ()
    interval: tuple[float, float] | None = None


def assessment_to_dict(assessment: RiskAssessment) -> dict[str, Any]:
    return {
        "probability": assessment.probability,
        "display": assessment.display,
        "band": assessment.band,
        "factor_deltas": [[fid, delta] for fid, delta in assessment.factor_deltas],
        "interval": None if assessment.interval is None else list(assessment.interval),
    }


def format_percentage(probability: float) -> str:
    """Percent display: >= 1% as whole percent (half-up), below as one
    significant digit so small risks never show as 0%."""
    if not (isinstance(probability, (int, float)) and not isinstance(probability, bool)):
        raise ValidationError(f"probability must be a number, got {probability!r}")
    if not (0.0 <= probability <= 1.0) or not math.isfinite(probability):
        raise ValidationError(f"probability {probability!r} outside [0, 1]")
    if probability == 0.0:
        return "0%"
    pct = Decimal(probability) * 100
    if probability >= 0.01:
        return f"{pct.quantize(Decimal('1'), rounding=ROUND_HALF_UP)}%"
    exponent = math.floor(math.log10(float(pct)))
    quantum = Decimal(1).scaleb(exponent)
    rounded = pct.quantize(quantum, rounding=ROUND_HALF_UP)
    if rounded >= 1:
        return "1%"
    return f"{rounded:f}%"


def partner_infection_probability(prior: float, evidence: Iterable[float] | Mapping[str, float]) -> float:
    """Posterior that the partner is infected, by odds-form update.

    Evidence entries are likelihood ratios combined under independence.
    A degenerate prior (0 or 1) is returned unchanged.
    """
    if not (0.0 <= prior <= 1.0):
        raise ValidationError(f"prior {prior!r} outside [0, 1]")
    if isinstance(evidence, Mapping):
        items = list(evidence.items())
    else:
        items = [(str(i), r) for i, r in enumerate(evidence)]
    for name, ratio in items:
        if not (isinstance(ratio, (int, float)) and math.isfinite(ratio) and ratio > 0.0):
            raise ValidationError(f"likelihood ratio for {name!r} must be a positive real, got {ratio!r}")
    if prior == 0.0 or prior == 1.0 or not items:
        # no update to apply; skip the odds round-trip so the prior is exact
        return prior
    odds = prior / (1.0 - prior)
    for _, ratio in items:
        odds *= float(ratio)
    return odds / (1.0 + odds)


def sti_per_act_risk(
    model: StiProductModel,
    contact_type: str,
    partner_evidence: Sequence[str] = (),
    active_modifiers: Sequence[str] = (),
    bands: BandThresholds | None = None,
) -> RiskAssessment:
    """Per-act risk: P(partner infected | evidence) x P(transmission | contact),
    scaled by the active protective modifiers."""
    if contact_type not in model.transmission:
        raise SchemaMismatchError(f"unknown contact type: {contact_type!r}")
    ratios: dict[str, float] = {}
    for attr in partner_evidence:
        if attr not in model.attribute_lr:
            raise SchemaMismatchError(f"unknown partner attribute: {attr!r}")
        ratios[attr] = model.attribute_lr[attr]
    posterior = partner_infection_probability(model.base_prevalence, ratios)
    probability = posterior * model.transmission[contact_type]
    for modifier in active_modifiers:
        if modifier not in model.modifiers:
            raise SchemaMismatchError(f"unknown modifier: {modifier!r}")
        probability *= model.modifiers[modifier]
    bands = bands if bands is not None else BandThresholds()
    return RiskAssessment(
        probability=probability,
        display=format_percentage(probability),
        band=bands.band(probability),
    )


def compose_repeated_acts(per_act: float, n: int) -> float:
    """Cumulative risk over n independent acts: 1 - (1 - p)^n."""
    if not (0.0 <= per_act <= 1.0):
        raise ValidationError(f"per-act probability {per_act!r} outside [0, 1]")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValidationError(f"act count must be a positive integer, got {n!r}")
    return 1.0 - (1.0 - per_act) ** n


def linear_predictor(features: FeatureVector, model: LogisticModel) -> float:
    """intercept + sum(b_i x_i) + sum(b_ij x_i x_j); features missing from
    the model contribute zero. Requires all unknowns resolved."""
    if features.unknown_set:
        raise ValidationError(f"unresolved unknown features: {sorted(features.unknown_set)}")
    values = features.values
    z = model.intercept
    for feat, coef in model.main_coefs.items():
        z += coef * values.get(feat, 0.0)
    for (a, b), coef in model.interaction_coefs.items():
        z += coef * values.get(a, 0.0) * values.get(b, 0.0)
    return z


def _logit(p: float) -> float:
    if p <= 0.0:
        return float("-inf")
    if p >= 1.0:
        return float("inf")
    return math.log(p / (1.0 - p))


def marginalize_unknowns(
    features: FeatureVector,
    model: LogisticModel,
    priors: Mapping[str, float],
) -> float:
    """Expected risk over completions of the unknown binary features.

    Completions are independent Bernoulli draws under the priors;
    exhaustive enumeration up to EXHAUSTIVE_LIMIT unknowns, seeded
    sampling beyond that.
    """
    if not features.unknown_set:
        return kernels.sigmoid(linear_predictor(features, model))
    unknowns = sorted(features.unknown_set)
    for feat in unknowns:
        if feat not in priors:
            raise ConfigurationError(f"unknown-capable feature {feat!r} has no prior")
    base = FeatureVector(values={**features.values, **{u: 0.0 for u in unknowns}})
    z0 = linear_predictor(base, model)
    k = len(unknowns)
    index = {feat: i for i, feat in enumerate(unknowns)}
    linear_adds = np.zeros(k, dtype=np.float64)
    pair_matrix = np.zeros((k, k), dtype=np.float64)
    for i, feat in enumerate(unknowns):
        add = model.main_coefs.get(feat, 0.0)
        for (a, b), coef in model.interaction_coefs.items():
            if a == feat:
                other = b
            elif b == feat:
                other = a
            else:
                continue
            j = index.get(other)
            if j is None:
                add += coef * features.values.get(other, 0.0)
            elif a == feat:
                # accumulate each unknown pair once, from its first endpoint
                pair_matrix[i, j] += coef
                pair_matrix[j, i] += coef
        linear_adds[i] = add
    prior_arr = np.array([priors[u] for u in unknowns], dtype=np.float64)
    if k <= EXHAUSTIVE_LIMIT:
        offsets = np.asarray(kernels.completion_offsets(linear_adds, pair_matrix), dtype=np.float64)
        weights = np.asarray(kernels.completion_weights(prior_arr), dtype=np.float64)
        return kernels.mixture_mean(weights, z0 + offsets)
    rng = np.random.Generator(np.random.PCG64(_SAMPLING_SEED))
    completions = (rng.random((SAMPLING_DRAWS, k)) < prior_arr).astype(np.float64)
    z = z0 + completions @ linear_adds
    z += 0.5 * np.einsum("bi,ij,bj->b", completions, pair_matrix, completions)
    risks = np.asarray(kernels.draw_risks(0.0, np.ascontiguousarray(z)), dtype=np.float64)
    return kernels.sequential_mean(risks)


def logistic_risk(
    features: FeatureVector,
    model: LogisticModel,
    schema: QuestionnaireSchema | None = None,
) -> RiskAssessment:
    """Point risk (deterministic) or noise-averaged risk with a 95%
    interval (monte-carlo). Unknowns are marginalized first."""
    priors: Mapping[str, float] = schema.priors if schema is not None else {}
    bands = schema.band_thresholds if schema is not None else BandThresholds()
    if features.unknown_set:
        point = marginalize_unknowns(features, model, priors)
        predictor = _logit(point)
    else:
        predictor = linear_predictor(features, model)
        point = kernels.sigmoid(predictor)
    interval: tuple[float, float] | None = None
    probability = point
    if model.noise.mode == MONTE_CARLO:
        rng = np.random.Generator(np.random.PCG64(model.noise.seed))
        offsets = rng.normal(0.0, model.noise.std_dev, model.noise.samples)
        draws = np.asarray(kernels.draw_risks(predictor, np.ascontiguousarray(offsets)), dtype=np.float64)
        probability = kernels.sequential_mean(draws)
        lo, hi = np.percentile(draws, [2.5, 97.5])
        interval = (float(lo), float(hi))
    return RiskAssessment(
        probability=probability,
        display=format_percentage(probability),
        band=bands.band(probability),
        interval=interval,
    )


def _evaluate(schema: QuestionnaireSchema, model: RiskModel, answers: AnswerSet) -> RiskAssessment:
    """Single assessment without what-if deltas."""
    features = encode_features(schema, answers)
    if isinstance(model, StiProductModel):
        contact: str | None = None
        evidence: list[str] = []
        modifiers: list[str] = []
        for feat, value in features.values.items():
            if value == 0.0:
                continue
            if feat in model.transmission:
                if contact is not None:
                    raise SchemaMismatchError(f"multiple contact types selected: {contact!r}, {feat!r}")
                contact = feat
            elif feat in model.attribute_lr:
                evidence.append(feat)
            elif feat in model.modifiers:
                modifiers.append(feat)
            else:
                raise SchemaMismatchError(f"feature {feat!r} is not declared by the model")
        if contact is None:
            raise SchemaMismatchError("no contact type selected")
        # unknown partner attributes are uninformative: no ratio applied
        return sti_per_act_risk(model, contact, evidence, modifiers, bands=schema.band_thresholds)
    return logistic_risk(features, model, schema)


def _candidate_values(question) -> list[Any]:
    if question.widget == CHECKBOX:
        return [False, True]
    if question.widget == TRI_STATE:
        return [NO, YES]
    if question.widget == DROPDOWN:
        return [o.id for o in question.options]
    assert question.bounds is not None
    return [question.bounds.lo, question.bounds.hi]


def modifiable_factor_deltas(
    answers: AnswerSet,
    model: RiskModel,
    schema: QuestionnaireSchema,
) -> list[tuple[str, float]]:
    """What-if deltas for every modifiable item in an enabled section.

    delta = risk(item set to its protective value) - risk(as answered);
    the protective value is whichever in-domain value minimizes risk, so
    deltas are never positive. Sorted ascending, largest reduction first.
    """
    baseline = _evaluate(schema, model, answers).probability
    deltas: list[tuple[str, float]] = []
    for section in schema.sections:
        if not section_enabled(section, answers.answers):
            continue
        for question in section.questions:
            if not question.modifiable:
                continue
            best = baseline
            for candidate in _candidate_values(question):
                if candidate == answers.answers[question.id]:
                    continue
                tweaked = replace(answers, answers={**answers.answers, question.id: candidate})
                risk = _evaluate(schema, model, tweaked).probability
                if risk < best:
                    best = risk
            deltas.append((question.id, best - baseline))
    deltas.sort(key=lambda item: item[1])
    return deltas


def assess(
    schema: QuestionnaireSchema,
    model: RiskModel,
    answers: Mapping[str, Any] | AnswerSet,
    timestamp: str | None = None,
) -> RiskAssessment:
    """Full assessment pipeline: validate, encode, evaluate, explain."""
    validated = validate_answers(schema, answers, timestamp=timestamp)
    assessment = _evaluate(schema, model, validated)
    deltas = modifiable_factor_deltas(validated, model, schema)
    return replace(assessment, factor_deltas=tuple(deltas))
