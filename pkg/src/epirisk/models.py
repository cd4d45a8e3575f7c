"""Risk model definitions and their JSON file format.

Model files are UTF-8 JSON with a ``model_kind`` discriminator
(``sti_product`` | ``logistic``) and an integer ``format_version``.
Unknown fields are rejected.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from epirisk.errors import ModelFormatError, ValidationError

FORMAT_VERSION = 1

DETERMINISTIC = "deterministic"
MONTE_CARLO = "monte-carlo"


@dataclass(frozen=True)
class NoiseConfig:
    """Optional zero-mean Gaussian noise on the predictor scale.

    Deterministic mode contributes exactly zero; monte-carlo mode with a
    fixed seed is reproducible.
    """

    mode: str = DETERMINISTIC
    std_dev: float = 0.0
    seed: int = 0
    samples: int = 1000

    def __post_init__(self) -> None:
        if self.mode not in (DETERMINISTIC, MONTE_CARLO):
            raise ValidationError(f"unknown noise mode: {self.mode!r}")
        if not (self.std_dev >= 0.0 and math.isfinite(self.std_dev)):
            raise ValidationError("noise std_dev must be a finite nonnegative real")
        if not (isinstance(self.seed, int) and self.seed >= 0):
            raise ValidationError("noise seed must be an unsigned integer")
        if not (isinstance(self.samples, int) and self.samples >= 1):
            raise ValidationError("noise samples must be a positive integer")


@dataclass(frozen=True)
class StiProductModel:
    """Per-act transmission risk as a probability product.

    ``base_prevalence`` is the prior that an arbitrary partner is infected;
    ``attribute_lr`` maps partner attributes to positive likelihood ratios
    applied on the odds scale; ``transmission`` maps contact types to
    per-act transmission probabilities given an infected partner;
    ``modifiers`` are multiplicative protective factors in (0, 1].
    """

    base_prevalence: float
    attribute_lr: dict[str, float]
    transmission: dict[str, float]
    modifiers: dict[str, float]
    notes: str = ""

    def __post_init__(self) -> None:
        if not (0.0 <= self.base_prevalence <= 1.0):
            raise ValidationError("base_prevalence must lie in [0, 1]")
        for attr, lr in self.attribute_lr.items():
            if not (math.isfinite(lr) and lr > 0.0):
                raise ValidationError(f"likelihood ratio for attribute {attr!r} must be positive")
        for contact, p in self.transmission.items():
            if not (0.0 <= p <= 1.0):
                raise ValidationError(f"transmission probability for {contact!r} must lie in [0, 1]")
        for mod, factor in self.modifiers.items():
            if not (0.0 < factor <= 1.0):
                raise ValidationError(f"modifier {mod!r} must lie in (0, 1]")

    @property
    def model_kind(self) -> str:
        return "sti_product"


@dataclass(frozen=True)
class LogisticModel:
    """Logistic regression with optional pairwise interaction terms."""

    intercept: float
    main_coefs: dict[str, float]
    interaction_coefs: dict[tuple[str, str], float] = field(default_factory=dict)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    notes: str = ""

    def __post_init__(self) -> None:
        if not math.isfinite(self.intercept):
            raise ValidationError("intercept must be finite")
        for feat, coef in self.main_coefs.items():
            if not math.isfinite(coef):
                raise ValidationError(f"coefficient for feature {feat!r} must be finite")
        for pair, coef in self.interaction_coefs.items():
            a, b = pair
            if a == b:
                raise ValidationError(f"interaction pair ({a!r}, {b!r}) must reference distinct features")
            if a not in self.main_coefs or b not in self.main_coefs:
                raise ValidationError(f"interaction pair ({a!r}, {b!r}) references an undeclared feature")
            if not math.isfinite(coef):
                raise ValidationError(f"interaction coefficient for ({a!r}, {b!r}) must be finite")

    @property
    def model_kind(self) -> str:
        return "logistic"


RiskModel = StiProductModel | LogisticModel

_NOISE_KEYS = {"mode", "std_dev", "seed", "samples"}
_STI_KEYS = {"format_version", "model_kind", "base_prevalence", "attribute_lr", "transmission", "modifiers", "notes"}
_LOGISTIC_KEYS = {
    "format_version",
    "model_kind",
    "intercept",
    "main_coefs",
    "interaction_coefs",
    "noise",
    "notes",
    "fit_diagnostics",
}


def _check_keys(doc: Mapping[str, Any], allowed: set[str], context: str) -> None:
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ModelFormatError(f"unknown field(s) in {context}: {', '.join(unknown)}")


def _coef_map(raw: Any, context: str) -> dict[str, float]:
    if not isinstance(raw, dict):
        raise ModelFormatError(f"{context} must be an object")
    out: dict[str, float] = {}
    for key, value in raw.items():
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ModelFormatError(f"{context}[{key!r}] must be a number")
        out[str(key)] = float(value)
    return out


def model_from_dict(doc: Mapping[str, Any]) -> RiskModel:
    if not isinstance(doc, Mapping):
        raise ModelFormatError("model document must be a JSON object")
    if doc.get("format_version") != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported format_version: {doc.get('format_version')!r}")
    kind = doc.get("model_kind")
    if kind == "sti_product":
        _check_keys(doc, _STI_KEYS, "sti_product model")
        try:
            return StiProductModel(
                base_prevalence=float(doc["base_prevalence"]),
                attribute_lr=_coef_map(doc.get("attribute_lr", {}), "attribute_lr"),
                transmission=_coef_map(doc.get("transmission", {}), "transmission"),
                modifiers=_coef_map(doc.get("modifiers", {}), "modifiers"),
                notes=str(doc.get("notes", "")),
            )
        except KeyError as exc:
            raise ModelFormatError(f"missing field: {exc.args[0]}") from None
    if kind == "logistic":
        _check_keys(doc, _LOGISTIC_KEYS, "logistic model")
        raw_inter = doc.get("interaction_coefs", [])
        if not isinstance(raw_inter, list):
            raise ModelFormatError("interaction_coefs must be a list of [feature_a, feature_b, coef] triples")
        interactions: dict[tuple[str, str], float] = {}
        for item in raw_inter:
            if not (isinstance(item, list) and len(item) == 3):
                raise ModelFormatError("interaction_coefs entries must be [feature_a, feature_b, coef] triples")
            a, b, coef = item
            if not isinstance(coef, (int, float)) or isinstance(coef, bool):
                raise ModelFormatError(f"interaction coefficient for ({a!r}, {b!r}) must be a number")
            pair = (str(a), str(b))
            if pair in interactions:
                raise ModelFormatError(f"duplicate interaction pair: {pair}")
            interactions[pair] = float(coef)
        noise_doc = doc.get("noise", {})
        if not isinstance(noise_doc, Mapping):
            raise ModelFormatError("noise must be an object")
        _check_keys(noise_doc, _NOISE_KEYS, "noise")
        try:
            noise = NoiseConfig(
                mode=str(noise_doc.get("mode", DETERMINISTIC)),
                std_dev=float(noise_doc.get("std_dev", 0.0)),
                seed=int(noise_doc.get("seed", 0)),
                samples=int(noise_doc.get("samples", 1000)),
            )
            return LogisticModel(
                intercept=float(doc["intercept"]),
                main_coefs=_coef_map(doc.get("main_coefs", {}), "main_coefs"),
                interaction_coefs=interactions,
                noise=noise,
                notes=str(doc.get("notes", "")),
            )
        except KeyError as exc:
            raise ModelFormatError(f"missing field: {exc.args[0]}") from None
        except ValidationError as exc:
            raise ModelFormatError(str(exc)) from None
    raise ModelFormatError(f"unknown model_kind: {kind!r}")


def model_to_dict(model: RiskModel, fit_diagnostics: Mapping[str, Any] | None = None) -> dict[str, Any]:
    if isinstance(model, StiProductModel):
        doc: dict[str, Any] = {
            "format_version": FORMAT_VERSION,
            "model_kind": "sti_product",
            "base_prevalence": model.base_prevalence,
            "attribute_lr": dict(model.attribute_lr),
            "transmission": dict(model.transmission),
            "modifiers": dict(model.modifiers),
        }
    else:
        doc = {
            "format_version": FORMAT_VERSION,
            "model_kind": "logistic",
            "intercept": model.intercept,
            "main_coefs": dict(model.main_coefs),
            "interaction_coefs": [[a, b, coef] for (a, b), coef in model.interaction_coefs.items()],
            "noise": {
                "mode": model.noise.mode,
                "std_dev": model.noise.std_dev,
                "seed": model.noise.seed,
                "samples": model.noise.samples,
            },
        }
    if model.notes:
        doc["notes"] = model.notes
    if fit_diagnostics is not None:
        if not isinstance(model, LogisticModel):
            raise ValidationError("fit_diagnostics only apply to logistic models")
        doc["fit_diagnostics"] = dict(fit_diagnostics)
    return doc


def parse_model(text: str) -> RiskModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"invalid JSON: {exc}") from None
    return model_from_dict(doc)


def load_model(path: str | Path) -> RiskModel:
    return parse_model(Path(path).read_text(encoding="utf-8"))
