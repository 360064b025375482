"""Stress-testing the bounds against a seeded ruin simulator.

The classical compound model (unit-mean exponential claims, premium rate 1,
mean-2 exponential interarrivals) admits a closed-form ruin probability
psi(u) = 0.5 exp(-u/2), which makes it the natural calibration target: the
exact value must land inside every Clopper-Pearson interval, and the
Lundberg curve exp(-u/2) must sit above both.
"""

import math

from ruinbounds import (
    CompoundIncrement,
    Periodic,
    RiskModel,
    ShiftedExponential,
    SimConfig,
    bound_optimize,
    check_bound_dominance,
    solve_kappa,
)


def main():
    increment = CompoundIncrement(ShiftedExponential(1.0), 1.0,
                                  ShiftedExponential(0.5))
    model = RiskModel(Periodic((increment,)), label="classical compound model")
    kappa = solve_kappa(increment)
    print(f"model: {model.label}")
    print(f"adjustment coefficient: {kappa.value:.12f} (exact value 1/2)\n")

    us = [1.0, 2.0, 4.0, 8.0]
    cfg = SimConfig(n_paths=400_000, horizon=2000, seed=11, stop_gap=60.0)
    bounds = [bound_optimize(model, u) for u in us]
    report = check_bound_dominance(model, us, bounds, cfg)

    print(f"{'u':>4} | {'exact':>9} | {'estimate':>9} | {'99% interval':>23} | {'bound':>9} | ok")
    for u, row in zip(us, report.rows):
        exact = 0.5 * math.exp(-0.5 * u)
        interval = f"[{row.ci_low:.6f}, {row.ci_high:.6f}]"
        inside = row.ci_low <= exact <= row.ci_high
        print(f"{u:4g} | {exact:9.6f} | {row.estimate:9.6f} | {interval:>23} "
              f"| {row.bound:9.6f} | {'yes' if row.dominated and inside else 'NO'}")
    print(f"\nall rows dominated: {report.ok}")
    print("(paths retire once they fall 60 below their running maximum; the")
    print(" probability of a comeback from there is under exp(-30), far below")
    print(" the interval resolution)")


if __name__ == "__main__":
    main()
