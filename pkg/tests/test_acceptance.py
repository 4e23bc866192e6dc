"""Acceptance gate: one test per criterion, each printing a pass/fail line.

The criteria cover oracle equivalence of the separation algorithms, the
canonical regression facts, Markov-property soundness, exact identification
on discrete models, estimator recovery on simulated survival data, bootstrap
null coverage, and the exact and stochastic Hawkes pipelines.  The final
criterion needs an external clinical CSV and is skipped unless the
MEDGRAPH_LIVER_CSV environment variable points at it.
"""

import os
import time
import warnings

import numpy as np
import pytest

from medgraph import hawkes as hk
from medgraph import scm as scm_mod
from medgraph import survival as sv
from medgraph.graphs import TailedDirectedGraph, UnrolledDag
from medgraph.randomgen import (random_dag, random_dag_query, random_query,
                                random_rolled_graph)
from medgraph.separation import (HOLDS, d_connecting_path, d_separated,
                                 d_separated_oracle, delta_separated,
                                 delta_separated_oracle,
                                 granger_noncausal_graphical)
from medgraph.transform import roll, unroll


def _report(num, name, ok):
    print(f"ACCEPTANCE {num} {name}: {'PASS' if ok else 'FAIL'}")
    assert ok, f"acceptance criterion {num} ({name}) failed"


def _four_process_plain():
    return TailedDirectedGraph.build(
        "PQRS", baseline={"P"},
        directed={("P", "S"), ("Q", "R"), ("S", "Q"), ("R", "S")})


def _four_process_tailed():
    return TailedDirectedGraph.build(
        "PQRS", baseline={"P"},
        directed={("P", "S"), ("R", "S")},
        tailed={("Q", "R"), ("S", "Q")})


def test_acceptance_1_separation_oracle_equivalence():
    t0 = time.monotonic()
    rng = np.random.default_rng(12345)
    n_graphs = 0
    n_queries = 0
    ok = True
    for _ in range(1000):
        dag = random_dag(rng, int(rng.integers(3, 9)))
        n_graphs += 1
        for _ in range(25):
            a, b, c = random_dag_query(rng, dag)
            ok &= d_separated(dag, a, b, c) == d_separated_oracle(dag, a, b, c)
            n_queries += 1
        g = random_rolled_graph(rng, n_nodes=int(rng.integers(3, 9)))
        n_graphs += 1
        for _ in range(25):
            a, b, c = random_query(rng, g.nodes, target_pool=g.process_nodes)
            ok &= delta_separated(g, a, b, c) == \
                delta_separated_oracle(g, a, b, c)
            n_queries += 1
    elapsed = time.monotonic() - t0
    ok &= n_graphs >= 2000 and n_queries >= 50_000 and elapsed <= 60.0
    _report(1, "separation-oracle-equivalence", ok)


def test_acceptance_2_canonical_regression_suite():
    plain = _four_process_plain()
    tailed = _four_process_tailed()
    ok = True
    # the target process is separated from the driver given the intermediate
    ok &= delta_separated(plain, {"S"}, {"R"}, {"Q"})
    ok &= delta_separated(tailed, {"S"}, {"R"}, {"Q"})
    # in the contemporaneous unrolling the separation fails through the
    # last-lag copies; in the plain unrolling it holds
    a = {("S", 0), ("S", 1)}
    b = {("R", 2)}
    c = {("Q", 0), ("Q", 1), ("R", 0), ("R", 1)}
    dag_plain = unroll(plain, 2)
    dag_tailed = unroll(tailed, 2)
    ok &= d_separated(dag_plain, a, b, c)
    ok &= not d_separated(dag_tailed, a, b, c)
    ok &= d_connecting_path(dag_tailed, a, b, c) is not None
    # roll/unroll round trips across the rolled and unrolled variants
    ok &= roll(dag_plain) == plain
    ok &= roll(dag_tailed) == tailed
    ok &= roll(unroll(plain, 4)) == plain
    sparse = UnrolledDag.build(
        2, dag_plain.process_names, dag_plain.baseline_names,
        dag_plain.edges - {(("Q", 0), ("R", 1)), (("S", 0), ("Q", 1))})
    ok &= roll(sparse) == plain
    _report(2, "canonical-regression-suite", ok)


def test_acceptance_3_markov_property_soundness():
    rng = np.random.default_rng(777)
    confirmed = 0
    ok = True
    for _ in range(500):
        t_prime = int(rng.integers(1, 6))
        n_proc = max(1, 12 // (t_prime + 1))
        g = random_rolled_graph(rng, n_nodes=n_proc + 2, n_baseline=2,
                                tailed_acyclic=True)
        table = None
        for _ in range(3):
            a, b, c = random_query(rng, g.nodes, target_pool=g.process_nodes)
            if granger_noncausal_graphical(g, a, b, c).status != HOLDS:
                continue
            if table is None:
                table = scm_mod.joint(
                    scm_mod.random_scm_from_dag(unroll(g, t_prime), rng))
            # exact test at tolerance 1e-12 on the Markov-compatible model
            ok &= scm_mod.granger_noncausal_exact(table, a, b, c, t_prime,
                                                  tol=1e-12)
            confirmed += 1
    ok &= confirmed >= 300
    _report(3, "markov-property-soundness", ok)


def test_acceptance_4_mediation_identification():
    ok = True
    for i in range(100):
        k = 1 + i % 3
        sep = scm_mod.random_separated_scm(k, seed=[400, i])
        ok &= scm_mod.verify_assumptions_exact(sep).all_hold()
        obs = scm_mod.to_observational(sep)
        for a in (0, 1):
            for a_star in (0, 1):
                for j in range(1, k + 1):
                    lhs = scm_mod.mediational_g_formula(obs, a, a_star, j)
                    rhs = scm_mod.interventional_survival(sep, a, a_star, j)
                    ok &= abs(lhs - rhs) <= 1e-12
        ok &= scm_mod.g_computation(obs, 1, k) == \
            scm_mod.mediational_g_formula(obs, 1, 1, k)
    flagged = 0
    for i in range(100):
        violation = scm_mod.VIOLATIONS[i % 4]
        sep = scm_mod.random_separated_scm(2, seed=[500, i],
                                           violation=violation)
        obs = scm_mod.to_observational(sep)
        gap = abs(scm_mod.mediational_g_formula(obs, 1, 0, 2)
                  - scm_mod.interventional_survival(sep, 1, 0, 2))
        flagged += gap > 1e-6
    ok &= flagged >= 95
    _report(4, "mediation-identification", ok)


def test_acceptance_5_estimator_recovery():
    t0 = time.monotonic()
    config = sv.SimulationConfig(
        n_subjects=5000, rho=0.3, gamma=0.5, psi_values=(0.2,),
        visit_times=(1.0, 2.0), horizon=3.0, mediator_sd=0.5)
    ds = sv.simulate_dataset(config, seed=4)
    fit = sv.fit_cox_td(ds.group(0))
    rho_hat = sv.estimate_rho(ds, fit)
    ok = fit.converged and fit.grad_norm <= 1e-8

    se = float(np.sqrt(np.linalg.inv(fit.information)[0, 0]))
    ok &= abs(fit.coef[0] - config.gamma) <= 3 * se

    # checkpoints with at least 100 subjects at risk; very early times are
    # excluded because the relative-error target is statistically
    # unattainable there for any estimator (variance floor of the hazard
    # increments)
    from medgraph.survival import _risk_prefix
    for t in (0.5, 1.0, 1.5, 2.0, 2.5, 3.0):
        at_risk = _risk_prefix(np.array([t]), ds.start, ds.stop,
                               np.ones(len(ds)))[0]
        if at_risk >= 100:
            ok &= abs(rho_hat(t) - config.rho * t) <= 0.10 * config.rho * t

    g0 = ds.group(0)
    zero_fit = sv.CoxFit(np.zeros(1), 0.0, 0, 0.0, np.eye(1))
    bl = sv.breslow_baseline(zero_fit, g0)
    na = sv.nelson_aalen(g0)
    ok &= np.array_equal(bl.times, na.times)
    ok &= np.array_equal(bl.values, na.values)

    result = sv.estimate_effects(ds)
    ok &= bool(np.all(np.abs(result.curves.sde * result.curves.sie
                             - result.curves.total) <= 1e-12))

    bands = sv.bootstrap(
        ds, lambda d: sv.estimate_rho(d, sv.fit_cox_td(d.group(0))),
        n_boot=200, seed=4, grid=np.array([0.5, 1.0, 1.5, 2.0, 2.5, 3.0]))
    ok &= bands.n_dropped == 0
    ok &= bool(np.all(bands.lower <= 0.3 * bands.grid))
    ok &= bool(np.all(0.3 * bands.grid <= bands.upper))

    elapsed = time.monotonic() - t0
    ok &= elapsed <= 300.0
    _report(5, "estimator-recovery", ok)


def test_acceptance_6_null_coverage():
    grid = np.array([0.5, 1.0, 1.5, 2.0])
    covered = 0
    total = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for sim in range(200):
            config = sv.SimulationConfig(
                n_subjects=250, rho=0.0, gamma=0.5, psi_values=(0.3,),
                visit_times=(1.0,), horizon=2.5, mediator_sd=0.5)
            ds = sv.simulate_dataset(config, seed=[100, sim])
            bands = sv.bootstrap(
                ds, lambda d: sv.estimate_rho(d, sv.fit_cox_td(d.group(0))),
                n_boot=80, seed=sim, grid=grid)
            covered += int(np.sum((bands.lower <= 0) & (0 <= bands.upper)))
            total += len(grid)
    fraction = covered / total
    ok = 0.90 <= fraction <= 0.99
    _report(6, "null-coverage", ok)


def test_acceptance_7_hawkes_exact_identification():
    ok = True
    for seed in range(50):
        model = hk.random_fig7_model(seed=seed)
        ok &= hk.validate(model).spectral_radius <= 0.8
        res = hk.identify(hk.integrated_cov_exact(model))
        g = model.branching
        m, a, d = 1, 0, 2
        ok &= abs(res.g_ma - g[m, a]) <= 1e-8
        ok &= abs(res.g_da - g[d, a]) <= 1e-8
        ok &= abs(res.g_dm - g[d, m]) <= 1e-8
        # the total response decomposes into direct plus mediated
        ok &= abs(res.r_da - (g[d, a] + g[d, m] * g[m, a])) <= 1e-8
    _report(7, "hawkes-exact-identification", ok)


def test_acceptance_8_hawkes_stochastic_pipeline():
    t0 = time.monotonic()
    model = hk.fig7_model(g_ma=0.4, g_da=0.3, g_dm=0.4, g_ml=0.3, g_dl=0.3,
                          g_lu=0.35, g_du=0.3,
                          mu=np.array([0.6, 0.5, 0.5, 0.4, 0.5]), beta=2.0)
    exact = hk.integrated_cov_exact(model)
    stream = hk.simulate(model, 1e5, seed=0)
    lag = hk.default_max_lag(model, 0.5, tail=1e-4)
    cov = hk.integrated_cov_empirical(stream, bin_width=0.5, max_lag=lag)
    obs = list(model.observed)
    emp = cov.matrix[np.ix_(obs, obs)]
    ce = exact.matrix
    scale = np.sqrt(np.outer(np.diag(ce), np.diag(ce)))
    ok = True
    for i in range(4):
        for j in range(4):
            if abs(ce[i, j]) > 1e-9 * scale[i, j]:
                ok &= abs(emp[i, j] - ce[i, j]) <= 0.10 * abs(ce[i, j])
            else:
                # structural zeros: relative error is undefined; require the
                # deviation to be small against the variance scale
                ok &= abs(emp[i, j] - ce[i, j]) <= 0.10 * scale[i, j]

    res = hk.identify(hk.CovMatrix(emp, ("A", "M", "D", "L")),
                      structure_rtol=0.5)
    g = model.branching
    direct_true = g[2, 0]
    mediated_true = g[2, 1] * g[1, 0]
    ok &= abs(res.direct - direct_true) <= 0.15 * direct_true
    ok &= abs(res.mediated - mediated_true) <= 0.15 * mediated_true

    counts = hk.simulate_clusters(model, "A", n_clusters=10_000,
                                  horizon=400.0, seed=1)
    r = hk.expected_cluster_matrix(model)
    means = counts.mean(axis=0)
    for i in range(5):
        if r[i, 0] > 0:
            ok &= abs(means[i] - r[i, 0]) <= 0.03 * r[i, 0]
        else:
            ok &= means[i] == 0.0

    elapsed = time.monotonic() - t0
    ok &= elapsed <= 300.0
    _report(8, "hawkes-stochastic-pipeline", ok)


LIVER_ENV = "MEDGRAPH_LIVER_CSV"


@pytest.mark.skipif(LIVER_ENV not in os.environ,
                    reason=f"set {LIVER_ENV} to the clinical CSV export to "
                           "run the external-data criterion")
def test_acceptance_9_clinical_dataset_pipeline():
    path = os.environ[LIVER_ENV]
    columns = {"id": "id", "start": "start", "stop": "stop",
               "event": "event", "treatment": "treatment",
               "covariates": ["prothrombin"]}
    ds = sv.ingest_csv(path, columns)
    summary = ds.summary()
    ok = summary["subjects"] == 446
    ok &= sorted(summary["subjects_by_treatment"].values()) == [220, 226]
    ok &= summary["events"] == 270
    ok &= sorted(summary["events_by_treatment"].values()) == [131, 139]

    transformed = sv.SurvivalDataset.build(
        ds.subject, ds.start, ds.stop, ds.event, ds.treatment,
        sv.prothrombin_transform(ds.column("prothrombin"))[:, None],
        ("prothrombin_shortfall",))
    result = sv.estimate_effects(transformed)
    bands = sv.bootstrap(
        transformed,
        lambda d: sv.estimate_rho(d, sv.fit_cox_td(d.group(0))),
        n_boot=1000, seed=0, grid=result.curves.times)
    ok &= bands.n_dropped <= 200
    ok &= result.fit.converged
    _report(9, "clinical-dataset-pipeline", ok)
