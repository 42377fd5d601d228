"""Smoke tests for the Python surface of the toolkit."""

import math

import numpy as np
import pytest

import quantclt as q


def test_version():
    assert q.__version__


def test_analytic_oracles():
    assert q.analytic.stable_density(2.0, 0.5, 1.0, 0.0) == pytest.approx(
        1.0 / math.sqrt(2.0 * math.pi), abs=1e-10
    )
    assert q.analytic.stable_cdf(1.0, 1.0, 1.0, 1.0) == pytest.approx(0.75, abs=1e-9)
    assert q.analytic.stable_quantile(1.0, 1.0, 1.0, 0.75) == pytest.approx(1.0, abs=1e-8)
    # scaling: tau_alpha(4) = 4^{1/r} tau_alpha(1)
    assert q.analytic.stable_quantile(1.0, 1.0, 4.0, 0.75) == pytest.approx(4.0, abs=1e-8)
    # Brownian median limit variance
    assert q.analytic.limit_cov_quantile_stable(2.0, 0.5, 1.0, 0.5, 1.0, 0.5) == pytest.approx(
        math.pi / 2.0, abs=1e-7
    )
    assert q.analytic.limit_cov_quantile_fbm(0.5, 0.5, 0.5, 1.0, 0.5) == pytest.approx(
        math.sqrt(0.5) * math.asin(math.sqrt(0.5)), abs=1e-7
    )


def test_generation_reproducible_and_calibrated():
    grid = q.TimeGrid([0.0, 0.5, 1.0])
    spec = q.ProcessSpec.brownian_motion()
    batch1 = q.generate(spec, grid, 4000, 99)
    batch2 = q.generate(spec, grid, 4000, 99)
    values = np.asarray(batch1.values)
    assert values.shape == (4000, 3)
    assert np.array_equal(values, np.asarray(batch2.values))
    assert np.all(values[:, 0] == 0.0)
    # Var X_1 = 1 within 4 MC standard errors
    se = math.sqrt(2.0 / 4000.0)
    assert abs(values[:, 2].var(ddof=1) - 1.0) <= 4.0 * se


def test_empirical_quantile_definition():
    assert q.quantile_rank(4, 0.5) == 2
    assert q.quantile_rank(4, 0.51) == 3
    order = q.order_statistics([2.0, 2.0, 1.0])
    assert [v for v, _ in order] == [1.0, 2.0, 2.0]
    assert [i for _, i in order] == [2, 0, 1]  # ties keep original index order


def test_quantile_field_and_sup():
    grid = q.TimeGrid([0.0, 0.5, 1.0])
    levels = q.LevelGrid([0.25, 0.5, 0.75], 0.25, 0.75)
    spec = q.ProcessSpec.sym_stable(2.0, 0.5)
    batch = q.generate(spec, grid, 500, 7)
    true_tau = np.zeros((3, 3))
    for j, t in enumerate([0.0, 0.5, 1.0]):
        for k, a in enumerate([0.25, 0.5, 0.75]):
            true_tau[j, k] = q.analytic.stable_quantile(2.0, 0.5, t, a)
    field = q.quantile_field(batch, levels, true_tau)
    w = np.asarray(field.w_n)
    assert w.shape == (3, 3)
    assert np.all(w[0, :] == 0.0)  # zero-at-zero column
    assert q.sup_statistic(field, (0.0, 1.0), (0.25, 0.75)) == pytest.approx(np.abs(w).max())


def test_run_experiment_toml():
    report = q.run_experiment_toml(
        """
[experiment]
kind = "identity_suite"
identity_instances = 300
n = 64
R = 1
seed = 5
"""
    )
    assert report["passed"] is True
    assert report["csv"].startswith("experiment,pair_s,pair_beta,pair_t,pair_alpha,n,R,")
    assert any(row["experiment"] == "identity_vervaat_closed_form" for row in report["rows"])


def test_tail_bound_constants():
    tb = q.analytic.tail_bound_constants(1.0, 1.0, 0.75, 1.0)
    assert tb.lambda_r == pytest.approx(2.0 * math.e / 0.25)
    assert tb.n0 >= 1
    u0 = tb.threshold_C * 20.0
    assert tb.bound(u0 + 5.0, 400) <= tb.bound(u0, 400)
