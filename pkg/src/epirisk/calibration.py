"""Maximum-likelihood fitting of logistic models from cohort outcome data.

IRLS (Newton via weighted least squares) with step-halving, optional
ridge penalty, quasi-separation fallback, and CSV ingestion. Every
reduction over rows uses exactly rounded summation (math.fsum), so fits
are bit-identical under row permutation.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from epirisk.errors import DegenerateDesignError, IngestError, ValidationError
from epirisk.models import LogisticModel, NoiseConfig, model_to_dict
from epirisk.schema import SLIDER, FeatureVector, QuestionnaireSchema

OUTCOME_COLUMN = "infected"

_TRUE_CELLS = {"1", "true"}
_FALSE_CELLS = {"0", "false"}


@dataclass(frozen=True)
class CohortDataset:
    """Rows of resolved feature vectors with 0/1 infection outcomes."""

    feature_ids: tuple[str, ...]
    rows: tuple[tuple[FeatureVector, int], ...]
    provenance: str = "<memory>"
    interaction_pairs: tuple[tuple[str, str], ...] = ()
    rejected: tuple[tuple[int, str], ...] = ()

    def __post_init__(self) -> None:
        declared = set(self.feature_ids)
        if len(declared) != len(self.feature_ids):
            raise ValidationError("duplicate feature ids in dataset")
        for a, b in self.interaction_pairs:
            if a not in declared or b not in declared:
                raise ValidationError(f"interaction pair ({a!r}, {b!r}) references an undeclared feature")
        for features, outcome in self.rows:
            if outcome not in (0, 1):
                raise ValidationError(f"outcome must be 0 or 1, got {outcome!r}")
            if features.unknown_set:
                raise ValidationError("cohort rows must have no unknown features")
            extra = set(features.values) - declared
            if extra:
                raise ValidationError(f"row features not declared by the dataset: {sorted(extra)}")

    def outcome_counts(self) -> tuple[int, int]:
        ones = sum(outcome for _, outcome in self.rows)
        return len(self.rows) - ones, ones


@dataclass(frozen=True)
class FitConfig:
    tolerance: float = 1e-8
    max_iters: int = 100
    ridge_lambda: float = 0.0
    # retry with a small ridge when the unpenalized fit quasi-separates
    auto_ridge: bool = True

    def __post_init__(self) -> None:
        if self.tolerance <= 0 or self.max_iters < 1 or self.ridge_lambda < 0:
            raise ValidationError("fit config requires tolerance > 0, max_iters >= 1, ridge_lambda >= 0")


@dataclass(frozen=True)
class FitReport:
    coefficients: LogisticModel
    log_likelihood: float
    iterations: int
    converged: bool
    max_gradient_norm: float
    penalty_used: float
    standard_errors: dict[str, float]
    # penalized log-likelihood at the start and after each accepted step
    ll_trace: tuple[float, ...] = ()


SEPARATION_COEF_LIMIT = 15.0
AUTO_RIDGE_LAMBDA = 1e-3


def _column_names(feature_ids: Sequence[str], pairs: Sequence[tuple[str, str]]) -> list[str]:
    return ["intercept", *feature_ids, *(f"{a}*{b}" for a, b in pairs)]


def _design(dataset: CohortDataset, feature_ids: Sequence[str], pairs: Sequence[tuple[str, str]]) -> tuple[np.ndarray, np.ndarray]:
    n = len(dataset.rows)
    p = 1 + len(feature_ids) + len(pairs)
    X = np.empty((n, p), dtype=np.float64)
    y = np.empty(n, dtype=np.float64)
    for i, (features, outcome) in enumerate(dataset.rows):
        values = features.values
        X[i, 0] = 1.0
        for j, feat in enumerate(feature_ids, start=1):
            X[i, j] = values.get(feat, 0.0)
        for j, (a, b) in enumerate(pairs, start=1 + len(feature_ids)):
            X[i, j] = values.get(a, 0.0) * values.get(b, 0.0)
        y[i] = float(outcome)
    return X, y


def _sigmoid_vec(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0.0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _log_sigmoid(s: float) -> float:
    if s >= 0.0:
        return -math.log1p(math.exp(-s))
    return s - math.log1p(math.exp(s))


def _data_ll(X: np.ndarray, y: np.ndarray, beta: np.ndarray) -> float:
    z = X @ beta
    return math.fsum(_log_sigmoid(zi if yi == 1.0 else -zi) for zi, yi in zip(z.tolist(), y.tolist()))


def _penalized_ll(X: np.ndarray, y: np.ndarray, beta: np.ndarray, lam: float) -> float:
    ll = _data_ll(X, y, beta)
    if lam > 0.0:
        # the intercept is never penalized
        ll -= 0.5 * lam * math.fsum(b * b for b in beta[1:].tolist())
    return ll


def _penalized_gradient(X: np.ndarray, y: np.ndarray, beta: np.ndarray, lam: float) -> np.ndarray:
    z = X @ beta
    resid = y - _sigmoid_vec(z)
    p = X.shape[1]
    g = np.empty(p, dtype=np.float64)
    for j in range(p):
        g[j] = math.fsum((resid * X[:, j]).tolist())
    if lam > 0.0:
        g[1:] -= lam * beta[1:]
    return g


def _hessian(X: np.ndarray, beta: np.ndarray, lam: float) -> np.ndarray:
    z = X @ beta
    prob = _sigmoid_vec(z)
    w = prob * (1.0 - prob)
    p = X.shape[1]
    H = np.empty((p, p), dtype=np.float64)
    for j in range(p):
        wxj = w * X[:, j]
        for k in range(j, p):
            H[j, k] = H[k, j] = math.fsum((wxj * X[:, k]).tolist())
    if lam > 0.0:
        for j in range(1, p):
            H[j, j] += lam
    return H


def _dependent_columns(X: np.ndarray, names: Sequence[str]) -> list[str]:
    """Columns linearly dependent on earlier ones (Gram-Schmidt residual test)."""
    basis: list[np.ndarray] = []
    dependents: list[str] = []
    for j, name in enumerate(names):
        v = X[:, j].astype(np.float64)
        scale = float(np.linalg.norm(v))
        for b in basis:
            v = v - float(v @ b) * b
        if float(np.linalg.norm(v)) <= 1e-10 * max(1.0, scale):
            dependents.append(name)
        else:
            basis.append(v / float(np.linalg.norm(v)))
    return dependents


def _irls(
    X: np.ndarray,
    y: np.ndarray,
    lam: float,
    tolerance: float,
    max_iters: int,
    names: Sequence[str],
) -> tuple[np.ndarray, int, bool, float, tuple[float, ...]]:
    p = X.shape[1]
    beta = np.zeros(p, dtype=np.float64)
    current_ll = _penalized_ll(X, y, beta, lam)
    trace = [current_ll]
    iterations = 0
    for _ in range(max_iters):
        g = _penalized_gradient(X, y, beta, lam)
        gnorm = float(np.max(np.abs(g)))
        if gnorm <= tolerance:
            return beta, iterations, True, gnorm, tuple(trace)
        H = _hessian(X, beta, lam)
        try:
            delta = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            raise DegenerateDesignError(
                "weighted design matrix is singular",
                columns=_dependent_columns(X, names),
            ) from None
        if not np.all(np.isfinite(delta)):
            raise DegenerateDesignError(
                "weighted design matrix is numerically singular",
                columns=_dependent_columns(X, names),
            )
        # step-halving keeps the penalized log-likelihood non-decreasing
        step = 1.0
        accepted = False
        for _ in range(11):
            candidate = beta + step * delta
            candidate_ll = _penalized_ll(X, y, candidate, lam)
            if candidate_ll >= current_ll:
                beta = candidate
                current_ll = candidate_ll
                trace.append(current_ll)
                accepted = True
                break
            step *= 0.5
        iterations += 1
        if not accepted:
            break
    g = _penalized_gradient(X, y, beta, lam)
    gnorm = float(np.max(np.abs(g)))
    return beta, iterations, gnorm <= tolerance, gnorm, tuple(trace)


def log_likelihood(dataset: CohortDataset, model: LogisticModel) -> float:
    """Bernoulli log-likelihood of the dataset under the model; always <= 0."""
    if not dataset.rows:
        raise ValidationError("dataset is empty")
    feature_ids = list(model.main_coefs)
    pairs = list(model.interaction_coefs)
    X, y = _design(dataset, feature_ids, pairs)
    beta = np.array([model.intercept, *model.main_coefs.values(), *model.interaction_coefs.values()], dtype=np.float64)
    return _data_ll(X, y, beta)


def gradient(dataset: CohortDataset, model: LogisticModel) -> np.ndarray:
    """d LL / d beta, ordered [intercept, *main_coefs, *interaction_coefs]."""
    if not dataset.rows:
        raise ValidationError("dataset is empty")
    feature_ids = list(model.main_coefs)
    pairs = list(model.interaction_coefs)
    X, y = _design(dataset, feature_ids, pairs)
    beta = np.array([model.intercept, *model.main_coefs.values(), *model.interaction_coefs.values()], dtype=np.float64)
    return _penalized_gradient(X, y, beta, 0.0)


def fit_logistic(dataset: CohortDataset, config: FitConfig | None = None) -> FitReport:
    """Fit intercept, mains, and the dataset's declared interaction pairs.

    Unpenalized by default; quasi-separation (|b| > 15 or non-convergence)
    triggers an automatic ridge refit unless auto_ridge is off.
    """
    config = config if config is not None else FitConfig()
    if not dataset.rows:
        raise ValidationError("dataset is empty")
    zeros, ones = dataset.outcome_counts()
    if config.ridge_lambda == 0.0 and (zeros == 0 or ones == 0):
        raise ValidationError("unpenalized fitting needs both outcome classes; set ridge_lambda > 0")
    feature_ids = list(dataset.feature_ids)
    pairs = list(dataset.interaction_pairs)
    names = _column_names(feature_ids, pairs)
    X, y = _design(dataset, feature_ids, pairs)

    lam = config.ridge_lambda
    retry = False
    if lam == 0.0 and config.auto_ridge:
        # a singular unpenalized design is rescued by the ridge refit too
        try:
            beta, iterations, converged, gnorm, trace = _irls(X, y, lam, config.tolerance, config.max_iters, names)
            retry = not converged or float(np.max(np.abs(beta))) > SEPARATION_COEF_LIMIT
        except DegenerateDesignError:
            retry = True
    else:
        beta, iterations, converged, gnorm, trace = _irls(X, y, lam, config.tolerance, config.max_iters, names)
    if retry:
        lam = AUTO_RIDGE_LAMBDA
        beta, iterations, converged, gnorm, trace = _irls(X, y, lam, config.tolerance, config.max_iters, names)

    H = _hessian(X, beta, lam)
    try:
        covariance = np.linalg.inv(H)
    except np.linalg.LinAlgError:
        raise DegenerateDesignError(
            "observed information matrix is singular",
            columns=_dependent_columns(X, names),
        ) from None
    diag = np.diag(covariance)
    standard_errors = {
        name: float(math.sqrt(v)) if v > 0 else float("nan") for name, v in zip(names, diag.tolist())
    }

    n_features = len(feature_ids)
    model = LogisticModel(
        intercept=float(beta[0]),
        main_coefs={feat: float(beta[1 + j]) for j, feat in enumerate(feature_ids)},
        interaction_coefs={pair: float(beta[1 + n_features + j]) for j, pair in enumerate(pairs)},
        noise=NoiseConfig(),
    )
    return FitReport(
        coefficients=model,
        log_likelihood=_data_ll(X, y, beta),
        iterations=iterations,
        converged=converged,
        max_gradient_norm=gnorm,
        penalty_used=lam,
        standard_errors=standard_errors,
        ll_trace=trace,
    )


def fit_report_to_model_dict(report: FitReport, dataset: CohortDataset | None = None, notes: str = "") -> dict[str, Any]:
    """Model JSON document with the fit diagnostics block attached."""
    model = report.coefficients
    if notes:
        model = LogisticModel(
            intercept=model.intercept,
            main_coefs=model.main_coefs,
            interaction_coefs=model.interaction_coefs,
            noise=model.noise,
            notes=notes,
        )
    diagnostics: dict[str, Any] = {
        "log_likelihood": report.log_likelihood,
        "iterations": report.iterations,
        "converged": report.converged,
        "max_gradient_norm": report.max_gradient_norm,
        "penalty_used": report.penalty_used,
        "standard_errors": dict(report.standard_errors),
    }
    if dataset is not None:
        diagnostics["rows"] = len(dataset.rows)
        diagnostics["provenance"] = dataset.provenance
    return model_to_dict(model, fit_diagnostics=diagnostics)


# ---------------------------------------------------------------------------
# CSV ingestion / export

def _schema_column_kinds(schema: QuestionnaireSchema) -> dict[str, tuple[str, float, float]]:
    """feature id -> (kind, lo, hi); kind is "binary" or "numeric"."""
    kinds: dict[str, tuple[str, float, float]] = {}
    for question in schema.questions():
        if question.widget == SLIDER:
            assert question.bounds is not None
            kinds[question.feature] = ("numeric", question.bounds.lo, question.bounds.hi)
        else:
            for feat in question.feature_ids():
                kinds[feat] = ("binary", 0.0, 1.0)
    return kinds


def ingest_cohort_csv(source: str | Path | io.TextIOBase, schema: QuestionnaireSchema, strict: bool = True) -> CohortDataset:
    """Read an outcome CSV into a dataset.

    Columns are matched to schema feature ids by name; the outcome column
    is ``infected`` with values {0, 1}. Binary cells accept {0, 1, true,
    false}; numeric cells are min-max scaled per the schema bounds. Bad
    rows are skipped and recorded with their line numbers.
    """
    provenance = "<stream>"
    if isinstance(source, (str, Path)):
        provenance = str(source)
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source.read()
        name = getattr(source, "name", None)
        if isinstance(name, str):
            provenance = name
    if not text.strip():
        raise IngestError("empty file")
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise IngestError("empty file") from None
    header = [h.strip() for h in header]
    if OUTCOME_COLUMN not in header:
        raise IngestError(f"missing outcome column {OUTCOME_COLUMN!r}")
    if len(set(header)) != len(header):
        raise IngestError("duplicate column names in header")

    kinds = _schema_column_kinds(schema)
    unknown_columns = [h for h in header if h != OUTCOME_COLUMN and h not in kinds]
    if unknown_columns:
        if strict:
            raise IngestError(f"unknown column(s): {', '.join(unknown_columns)}")
        warnings.warn(f"ignoring unknown column(s): {', '.join(unknown_columns)}", stacklevel=2)
    schema_order = [feat for feat in kinds if feat in header]
    outcome_idx = header.index(OUTCOME_COLUMN)
    column_of = {feat: header.index(feat) for feat in schema_order}

    rows: list[tuple[FeatureVector, int]] = []
    rejected: list[tuple[int, str]] = []
    for line_no, cells in enumerate(reader, start=2):
        if not cells or all(not c.strip() for c in cells):
            continue
        if len(cells) != len(header):
            rejected.append((line_no, f"expected {len(header)} cells, got {len(cells)}"))
            continue
        problem: str | None = None
        outcome_cell = cells[outcome_idx].strip()
        if outcome_cell not in ("0", "1"):
            problem = f"outcome must be 0 or 1, got {outcome_cell!r}"
        values: dict[str, float] = {}
        if problem is None:
            for feat in schema_order:
                cell = cells[column_of[feat]].strip()
                kind, lo, hi = kinds[feat]
                if kind == "binary":
                    lowered = cell.lower()
                    if lowered in _TRUE_CELLS:
                        values[feat] = 1.0
                    elif lowered in _FALSE_CELLS:
                        values[feat] = 0.0
                    else:
                        problem = f"column {feat!r}: expected 0/1/true/false, got {cell!r}"
                        break
                else:
                    try:
                        raw = float(cell)
                    except ValueError:
                        problem = f"column {feat!r}: not a number: {cell!r}"
                        break
                    if not (lo <= raw <= hi):
                        problem = f"column {feat!r}: value {raw} outside bounds [{lo}, {hi}]"
                        break
                    values[feat] = (raw - lo) / (hi - lo)
        if problem is not None:
            rejected.append((line_no, problem))
            continue
        rows.append((FeatureVector(values=values), int(outcome_cell)))
    present = set(schema_order)
    pairs = tuple((a, b) for a, b in schema.interaction_pairs if a in present and b in present)
    return CohortDataset(
        feature_ids=tuple(schema_order),
        rows=tuple(rows),
        provenance=provenance,
        interaction_pairs=pairs,
        rejected=tuple(rejected),
    )


def export_cohort_csv(dataset: CohortDataset, schema: QuestionnaireSchema) -> str:
    """Inverse of ingestion: numeric features written at raw scale."""
    kinds = _schema_column_kinds(schema)
    for feat in dataset.feature_ids:
        if feat not in kinds:
            raise ValidationError(f"feature {feat!r} is not declared by the schema")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow([*dataset.feature_ids, OUTCOME_COLUMN])
    for features, outcome in dataset.rows:
        cells: list[str] = []
        for feat in dataset.feature_ids:
            value = features.values.get(feat, 0.0)
            kind, lo, hi = kinds[feat]
            if kind == "binary":
                cells.append("1" if value == 1.0 else "0")
            else:
                cells.append(repr(lo + value * (hi - lo)))
        cells.append(str(outcome))
        writer.writerow(cells)
    return buffer.getvalue()
