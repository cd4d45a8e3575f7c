"""Questionnaire-driven infection risk assessment.

Per-act STI risk as a probability product with Bayesian partner
inference, logistic hospital-infection risk with interaction terms and
unknown-answer marginalization, IRLS calibration from cohort CSVs, a
JSON questionnaire format, an HTTP service, and a CLI.
"""

from epirisk.calibration import (
    CohortDataset,
    FitConfig,
    FitReport,
    export_cohort_csv,
    fit_logistic,
    gradient,
    ingest_cohort_csv,
    log_likelihood,
)
from epirisk.engine import (
    RiskAssessment,
    assess,
    assessment_to_dict,
    compose_repeated_acts,
    format_percentage,
    linear_predictor,
    logistic_risk,
    marginalize_unknowns,
    modifiable_factor_deltas,
    partner_infection_probability,
    sti_per_act_risk,
)
from epirisk.errors import (
    AnswerValidationError,
    ConfigurationError,
    DegenerateDesignError,
    EpiriskError,
    FitError,
    IngestError,
    ModelFormatError,
    RegistryError,
    SchemaMismatchError,
    SchemaValidationError,
    ValidationError,
)
from epirisk.models import LogisticModel, NoiseConfig, RiskModel, StiProductModel, load_model, model_from_dict, model_to_dict, parse_model
from epirisk.registry import ModelRegistry
from epirisk.schema import (
    AnswerSet,
    BandThresholds,
    FeatureVector,
    Question,
    QuestionnaireSchema,
    Section,
    encode_features,
    load_schema,
    load_shipped_schema,
    parse_schema,
    schema_to_dict,
    serialize_schema,
    shipped_schema_ids,
    validate_answers,
)

__version__ = "0.1.0"

__all__ = [
    "AnswerSet",
    "AnswerValidationError",
    "BandThresholds",
    "CohortDataset",
    "ConfigurationError",
    "DegenerateDesignError",
    "EpiriskError",
    "FeatureVector",
    "FitConfig",
    "FitError",
    "FitReport",
    "IngestError",
    "LogisticModel",
    "ModelFormatError",
    "ModelRegistry",
    "NoiseConfig",
    "Question",
    "QuestionnaireSchema",
    "RegistryError",
    "RiskAssessment",
    "RiskModel",
    "SchemaMismatchError",
    "SchemaValidationError",
    "Section",
    "StiProductModel",
    "ValidationError",
    "assess",
    "assessment_to_dict",
    "compose_repeated_acts",
    "encode_features",
    "export_cohort_csv",
    "fit_logistic",
    "format_percentage",
    "gradient",
    "ingest_cohort_csv",
    "linear_predictor",
    "load_model",
    "load_schema",
    "load_shipped_schema",
    "log_likelihood",
    "logistic_risk",
    "marginalize_unknowns",
    "model_from_dict",
    "model_to_dict",
    "modifiable_factor_deltas",
    "parse_model",
    "parse_schema",
    "partner_infection_probability",
    "schema_to_dict",
    "serialize_schema",
    "shipped_schema_ids",
    "sti_per_act_risk",
    "validate_answers",
]
