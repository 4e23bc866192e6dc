"""End-to-end survival mediation demo on simulated data.

Simulates a counting-process dataset with a cumulative treatment effect on
the hazard, fits the reference-group Cox model, estimates the treatment
hazard integral, and prints the direct/indirect survival effect curves with
bootstrap bands for the hazard integral.
"""

import argparse

import numpy as np

from medgraph import survival as sv


def parse_args():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n-subjects", type=int, default=2000)
    p.add_argument("--rho", type=float, default=0.3,
                   help="true treatment hazard slope")
    p.add_argument("--gamma", type=float, default=0.5,
                   help="true log hazard ratio of the mediator covariate")
    p.add_argument("--boot", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    return p.parse_args()


def main():
    args = parse_args()
    config = sv.SimulationConfig(
        n_subjects=args.n_subjects, rho=args.rho, gamma=args.gamma,
        psi_values=(0.2,), visit_times=(1.0, 2.0), horizon=3.0,
        mediator_sd=0.5)
    ds = sv.simulate_dataset(config, seed=args.seed)
    summary = ds.summary()
    print(f"subjects={summary['subjects']}  events={summary['events']}  "
          f"rows={summary['rows']}")

    result = sv.estimate_effects(ds)
    fit = result.fit
    se = float(np.sqrt(np.linalg.inv(fit.information)[0, 0]))
    print(f"cox: gamma_hat={fit.coef[0]:+.4f} (se {se:.4f}, true "
          f"{args.gamma:+.4f}), iterations={fit.iterations}, "
          f"grad_norm={fit.grad_norm:.2e}")

    grid = np.arange(0.5, config.horizon + 1e-9, 0.5)
    bands = sv.bootstrap(
        ds, lambda d: sv.estimate_rho(d, sv.fit_cox_td(d.group(0))),
        n_boot=args.boot, seed=args.seed, grid=grid)
    print(f"bootstrap: {bands.n_boot} replicates, {bands.n_dropped} dropped")
    print(f"{'t':>5} {'rho_hat':>9} {'true':>7} {'lower':>8} {'upper':>8}"
          f" {'SDE':>7} {'SIE':>7} {'total':>7}")
    curves = result.curves
    for t, lo, hi in zip(bands.grid, bands.lower, bands.upper):
        k = int(np.searchsorted(curves.times, t, side="right")) - 1
        print(f"{t:5.1f} {result.rho_hat(t):9.4f} {args.rho * t:7.4f} "
              f"{lo:8.4f} {hi:8.4f} {curves.sde[k]:7.4f} "
              f"{curves.sie[k]:7.4f} {curves.total[k]:7.4f}")


if __name__ == "__main__":
    main()
