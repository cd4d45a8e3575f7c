"""Acceptance gate: one test per shipped guarantee, at stated tolerance.

Each test is independent and prints a single pass/fail line under
``pytest -v``. Time budgets are asserted with a wall clock around the
core loop so regressions in asymptotics fail loudly.
"""

from __future__ import annotations

import itertools
import json
import math
import random
import time
from dataclasses import replace

import numpy as np
import pytest
from click.testing import CliRunner

from epirisk.calibration import CohortDataset, fit_logistic, gradient, log_likelihood
from epirisk.cli import main as cli_main
from epirisk.engine import (
    assess,
    assessment_to_dict,
    format_percentage,
    marginalize_unknowns,
    partner_infection_probability,
    sti_per_act_risk,
)
from epirisk.jsonutil import canonical_bytes
from epirisk.models import MONTE_CARLO, LogisticModel, NoiseConfig
from epirisk.schema import FeatureVector, serialize_schema
from tests.conftest import SHIPPED_IDS, all_clear_answers, random_answers


def test_condom_factor_reduces_every_contact_type_at_least_100x(shipped_models):
    """Shipped per-act model: protected risk <= unprotected risk / 100."""
    model = shipped_models["sti-hiv"]
    assert "condom_used" in model.modifiers
    for contact in sorted(model.transmission):
        bare = sti_per_act_risk(model, contact, (), ()).probability
        protected = sti_per_act_risk(model, contact, (), ("condom_used",)).probability
        assert protected <= bare / 100.0, contact
    # and with the riskiest evidence profile the guarantee still holds
    evidence = tuple(sorted(model.attribute_lr))
    for contact in sorted(model.transmission):
        bare = sti_per_act_risk(model, contact, evidence, ()).probability
        protected = sti_per_act_risk(model, contact, evidence, ("condom_used",)).probability
        assert protected <= bare / 100.0, contact


def test_probability_0_02_renders_exactly_2_percent(shipped_schemas, shipped_models):
    assert format_percentage(0.02) == "2%"
    # the full pipeline hits the same string for the baseline respondent
    schema = shipped_schemas["childbirth-patient"]
    result = assess(schema, shipped_models["childbirth-patient"], all_clear_answers(schema))
    assert result.probability == 0.02
    assert result.display == "2%"


def test_bayes_posterior_matches_joint_table_on_1000_instances():
    """|posterior - brute-force joint enumeration| < 1e-12, under 5 s."""
    rng = random.Random(1000003)
    started = time.perf_counter()
    for _ in range(1000):
        prior = rng.uniform(0.001, 0.999)
        k = rng.randint(0, 3)
        cond = [(rng.uniform(0.02, 0.98), rng.uniform(0.02, 0.98)) for _ in range(k)]
        mass_inf = 0.0
        mass_heal = 0.0
        for attrs in itertools.product((0, 1), repeat=k):
            if not all(attrs):
                continue
            p_inf, p_heal = prior, 1.0 - prior
            for i, _ in enumerate(attrs):
                pa_inf, pa_heal = cond[i]
                p_inf *= pa_inf
                p_heal *= pa_heal
            mass_inf += p_inf
            mass_heal += p_heal
        expected = mass_inf / (mass_inf + mass_heal)
        got = partner_infection_probability(prior, [pi / ph for pi, ph in cond])
        assert abs(got - expected) < 1e-12
    assert time.perf_counter() - started < 5.0


def test_marginalization_matches_exhaustive_enumeration_on_200_scenarios():
    """Up to 12 unknowns: |marginal - completion enumeration| < 1e-12, under 10 s."""
    rng = random.Random(20202)
    started = time.perf_counter()
    for _ in range(200):
        n_feats = rng.randint(1, 12)
        feats = [f"f{i}" for i in range(n_feats)]
        mains = {f: rng.uniform(-2.0, 2.0) for f in feats}
        pairs = {}
        for a, b in itertools.combinations(feats, 2):
            if rng.random() < 0.15:
                pairs[(a, b)] = rng.uniform(-1.0, 1.0)
        model = LogisticModel(intercept=rng.uniform(-3.0, 1.0), main_coefs=mains, interaction_coefs=pairs)
        k = rng.randint(1, n_feats)
        unknown = frozenset(rng.sample(feats, k))
        values = {f: float(rng.randint(0, 1)) for f in feats if f not in unknown}
        priors = {f: rng.uniform(0.0, 1.0) for f in unknown}
        fv = FeatureVector(values=values, unknown_set=unknown)

        expected = 0.0
        unknown_order = sorted(unknown)
        for bits in itertools.product((0.0, 1.0), repeat=k):
            weight = 1.0
            filled = dict(values)
            for f, bit in zip(unknown_order, bits):
                weight *= priors[f] if bit else 1.0 - priors[f]
                filled[f] = bit
            z = model.intercept
            for f, c in mains.items():
                z += c * filled[f]
            for (a, b), c in pairs.items():
                z += c * filled[a] * filled[b]
            expected += weight / (1.0 + math.exp(-z))

        got = marginalize_unknowns(fv, model, priors)
        assert abs(got - expected) < 1e-12
    assert time.perf_counter() - started < 10.0


def _synthetic_cohort(n=10_000, seed=43):
    true = {"intercept": -2.0, "x1": 1.0, "x2": 0.5, ("x1", "x2"): 0.8}
    rng = np.random.Generator(np.random.PCG64(seed))
    x1 = rng.integers(0, 2, size=n).astype(np.float64)
    x2 = rng.integers(0, 2, size=n).astype(np.float64)
    z = true["intercept"] + true["x1"] * x1 + true["x2"] * x2 + true[("x1", "x2")] * x1 * x2
    y = (rng.random(n) < 1.0 / (1.0 + np.exp(-z))).astype(int)
    rows = tuple(
        (FeatureVector(values={"x1": float(a), "x2": float(b)}), int(c))
        for a, b, c in zip(x1, x2, y)
    )
    return true, CohortDataset(feature_ids=("x1", "x2"), rows=rows, interaction_pairs=(("x1", "x2"),))


def test_calibration_recovers_generator_coefficients_within_0_1():
    """n=10,000 synthetic cohort; each coefficient within +-0.1; gradient at
    the solution < 1e-8; cross-checked against a 0.01-grid MLE search on the
    single-feature marginal. Under 30 s."""
    started = time.perf_counter()
    true, dataset = _synthetic_cohort()
    report = fit_logistic(dataset)
    assert report.converged
    fitted = report.coefficients
    assert abs(fitted.intercept - true["intercept"]) < 0.1
    assert abs(fitted.main_coefs["x1"] - true["x1"]) < 0.1
    assert abs(fitted.main_coefs["x2"] - true["x2"]) < 0.1
    assert abs(fitted.interaction_coefs[("x1", "x2")] - true[("x1", "x2")]) < 0.1
    g = gradient(dataset, fitted)
    assert float(np.max(np.abs(g))) < 1e-8

    # marginal cross-check: count-based grid search over (b0, b1), step 0.01
    marginal = CohortDataset(
        feature_ids=("x1",),
        rows=tuple((FeatureVector(values={"x1": fv.values["x1"]}), y) for fv, y in dataset.rows),
    )
    marginal_fit = fit_logistic(marginal).coefficients
    counts = {(0.0, 0): 0, (0.0, 1): 0, (1.0, 0): 0, (1.0, 1): 0}
    for fv, y in marginal.rows:
        counts[(fv.values["x1"], y)] += 1

    def grid_ll(b0, b1):
        total = 0.0
        for (x, y), n in counts.items():
            z = b0 + b1 * x
            p = 1.0 / (1.0 + math.exp(-z))
            total += n * (math.log(p) if y else math.log(1.0 - p))
        return total

    b0_axis = [round(marginal_fit.intercept + 0.01 * i, 6) for i in range(-30, 31)]
    b1_axis = [round(marginal_fit.main_coefs["x1"] + 0.01 * i, 6) for i in range(-30, 31)]
    best = max(((b0, b1) for b0 in b0_axis for b1 in b1_axis), key=lambda p: grid_ll(*p))
    assert best[0] not in (b0_axis[0], b0_axis[-1])  # argmax interior to the grid
    assert best[1] not in (b1_axis[0], b1_axis[-1])
    assert abs(best[0] - marginal_fit.intercept) <= 0.01
    assert abs(best[1] - marginal_fit.main_coefs["x1"]) <= 0.01
    assert time.perf_counter() - started < 30.0


def test_gradient_matches_central_differences_on_100_instances():
    """Relative error < 1e-6 against the h=1e-5 central-difference oracle,
    under 5 s."""
    rng = random.Random(606060)
    started = time.perf_counter()
    for _ in range(100):
        n_feats = rng.randint(1, 5)
        feats = [f"f{i}" for i in range(n_feats)]
        rows = []
        for _ in range(rng.randint(20, 80)):
            values = {f: float(rng.randint(0, 1)) for f in feats}
            rows.append((FeatureVector(values=values), rng.randint(0, 1)))
        ds = CohortDataset(feature_ids=tuple(feats), rows=tuple(rows))
        params = [rng.uniform(-1.5, 1.5) for _ in range(1 + n_feats)]
        model = LogisticModel(intercept=params[0], main_coefs=dict(zip(feats, params[1:])))
        g = gradient(ds, model)
        for j in range(len(params)):
            h = 1e-5
            bumped = list(params)
            bumped[j] += h
            hi = log_likelihood(ds, LogisticModel(intercept=bumped[0], main_coefs=dict(zip(feats, bumped[1:]))))
            bumped[j] -= 2 * h
            lo = log_likelihood(ds, LogisticModel(intercept=bumped[0], main_coefs=dict(zip(feats, bumped[1:]))))
            fd = (hi - lo) / (2 * h)
            assert abs(g[j] - fd) / max(abs(fd), 1.0) < 1e-6
    assert time.perf_counter() - started < 5.0


def test_irls_log_likelihood_non_decreasing_on_50_datasets():
    """The accepted-iteration trace never decreases; under 10 s."""
    rng = random.Random(515151)
    started = time.perf_counter()
    for _ in range(50):
        n_feats = rng.randint(1, 5)
        feats = [f"f{i}" for i in range(n_feats)]
        rows = []
        for _ in range(rng.randint(20, 200)):
            values = {f: float(rng.randint(0, 1)) for f in feats}
            z = rng.uniform(-2.0, 0.5) + sum(rng.uniform(-1.0, 1.5) * v for v in values.values())
            rows.append((FeatureVector(values=values), 1 if rng.random() < 1.0 / (1.0 + math.exp(-z)) else 0))
        ds = CohortDataset(feature_ids=tuple(feats), rows=tuple(rows))
        zeros, ones = ds.outcome_counts()
        if zeros == 0 or ones == 0:
            continue
        report = fit_logistic(ds)
        trace = report.ll_trace
        assert len(trace) >= 1
        for earlier, later in zip(trace, trace[1:]):
            assert later >= earlier
    assert time.perf_counter() - started < 10.0


def test_service_assessment_bytes_equal_library_for_100_requests_per_schema(
    service_client, shipped_schemas, shipped_models
):
    """POST /assess == in-process canonical bytes, 100 requests x 3 schemas,
    under 10 s."""
    rng = random.Random(112358)
    started = time.perf_counter()
    for sid in SHIPPED_IDS:
        schema = shipped_schemas[sid]
        model = shipped_models[sid]
        for _ in range(100):
            answers = random_answers(schema, rng)
            response = service_client.post(f"/api/v1/assess/{sid}", json={"answers": answers})
            assert response.status_code == 200
            expected = canonical_bytes(assessment_to_dict(assess(schema, model, answers)))
            assert response.content == expected
    assert time.perf_counter() - started < 10.0


def test_assessment_is_deterministic_including_seeded_monte_carlo(shipped_schemas, shipped_models):
    """Identical inputs give byte-identical outputs, with and without noise."""
    rng = random.Random(87539319)
    schema = shipped_schemas["childbirth-hospital"]
    model = shipped_models["childbirth-hospital"]
    for _ in range(10):
        answers = random_answers(schema, rng)
        first = canonical_bytes(assessment_to_dict(assess(schema, model, answers)))
        second = canonical_bytes(assessment_to_dict(assess(schema, model, answers)))
        assert first == second

    noisy = replace(model, noise=NoiseConfig(mode=MONTE_CARLO, std_dev=0.3, seed=97, samples=500))
    answers = random_answers(schema, rng)
    first = canonical_bytes(assessment_to_dict(assess(schema, noisy, answers)))
    second = canonical_bytes(assessment_to_dict(assess(schema, noisy, answers)))
    assert first == second
    assert json.loads(first)["interval"] is not None


def test_shipped_schemas_self_validate_and_cli_exit_codes_hold(
    tmp_path, shipped_schemas
):
    """Schema fixtures parse cleanly; CLI exits 0/1/2 on success, validation
    failure, and usage error. Under 5 s."""
    started = time.perf_counter()
    runner = CliRunner()
    for sid in SHIPPED_IDS:
        schema = shipped_schemas[sid]  # loading is itself full validation
        schema_path = tmp_path / f"{sid}.json"
        schema_path.write_text(serialize_schema(schema), encoding="utf-8")
        result = runner.invoke(cli_main, ["validate", "--schema", str(schema_path)])
        assert result.exit_code == 0, result.output
        assert result.output.startswith(f"OK: {sid} ")

    answers_path = tmp_path / "answers.json"
    answers_path.write_text(json.dumps(all_clear_answers(shipped_schemas["sti-hiv"])), encoding="utf-8")
    success = runner.invoke(cli_main, ["assess", "--schema", "sti-hiv", "--answers", str(answers_path)])
    assert success.exit_code == 0

    bad_path = tmp_path / "bad.json"
    bad_path.write_text(json.dumps({"condom": "probably"}), encoding="utf-8")
    validation = runner.invoke(cli_main, ["assess", "--schema", "sti-hiv", "--answers", str(bad_path)])
    assert validation.exit_code == 1

    usage = runner.invoke(cli_main, ["assess", "--schema", "sti-hiv"])
    assert usage.exit_code == 2
    assert time.perf_counter() - started < 5.0
