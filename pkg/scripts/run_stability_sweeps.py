#!/usr/bin/env python3
"""Run the four perturbation sweeps (weight, drift potential, forcing,
combined) on the benchmark instance and print rate fits and bound verdicts.

    python scripts/run_stability_sweeps.py --n 100 --epsilons 0.04 0.02 0.01 0.005
"""

import argparse

from gradflux import (
    GridSpec,
    PoissonSolver,
    SolverConfig,
    SweepSpec,
    example1,
    run_sweep,
    solve,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--tol", type=float, default=1e-7)
    ap.add_argument("--epsilons", type=float, nargs="+", default=[0.04, 0.02, 0.01, 0.005])
    args = ap.parse_args()

    grid = GridSpec(args.n)
    p = example1(grid)
    poisson = PoissonSolver(grid)
    solver = SolverConfig(tol=args.tol)
    base = solve(p, solver, poisson)
    print(f"base solve: converged={base.converged} iterations={base.iterations}")

    for param, mode in (("a", "constant-shift"), ("f", "constant-shift"),
                        ("H", "smooth-bump"), ("combined", "constant-shift")):
        spec = SweepSpec(param=param, epsilons=tuple(args.epsilons), mode=mode, solver=solver)
        report = run_sweep(p, spec, poisson, base=base)
        print(f"\n=== param {param} ({mode}) ===")
        for row in report.rows:
            print(
                f"  eps={row.eps:<7g} u={row.err_u_l1:.3e} grad={row.err_gradu_l1:.3e} "
                f"sigma={row.err_sigma_l1:.3e} J={row.err_J_l1:.3e} "
                f"energy={row.energy_diff:.3e} iters={row.iters}"
            )
        for col, fit in report.fits.items():
            if fit is not None:
                print(f"  fit {col}: slope {fit.slope:.3f}")
        for shape in report.shapes.values():
            print(
                f"  shape {shape.column}: non_increasing={shape.non_increasing} "
                f"slope_ok={shape.slope_ok} ratio_ok={shape.ratio_ok}"
            )
        for bound in report.bounds:
            print(f"  bound {bound.name}: holds={bound.holds} max_ratio={bound.max_ratio:.3f}")


if __name__ == "__main__":
    main()
