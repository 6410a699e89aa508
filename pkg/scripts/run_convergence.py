#!/usr/bin/env python3
"""Solve the benchmark instance (optionally with noisy data), print the
certificate, and dump convergence history + solution surfaces.

    python scripts/run_convergence.py --n 100 --delta 0.01 --seed 0 --out out/convergence
"""

import argparse
from pathlib import Path

from gradflux import (
    GridSpec,
    PoissonSolver,
    SolverConfig,
    apply_table1_noise,
    certify,
    example1,
    norm,
    solve,
)
from gradflux.fieldio import write_field


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--lam", type=float, default=1.0)
    ap.add_argument("--tol", type=float, default=1e-7)
    ap.add_argument("--max-iter", type=int, default=5000)
    ap.add_argument("--delta", type=float, default=0.0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("out/convergence"))
    args = ap.parse_args()

    grid = GridSpec(args.n)
    base = example1(grid)
    p = apply_table1_noise(base, args.delta, args.seed) if args.delta > 0 else base
    cfg = SolverConfig(lam=args.lam, tol=args.tol, max_iter=args.max_iter, record_history=True)
    res = solve(p, cfg, PoissonSolver(grid))

    rel = norm(res.state.u - base.exact_u, "l2") / norm(base.exact_u, "l2")
    print(f"converged={res.converged} iterations={res.iterations} rel_l2_vs_exact={rel:.6f}")
    cert = certify(res.state.u, p)
    print(cert.as_text(), end="")

    args.out.mkdir(parents=True, exist_ok=True)
    write_field(res.state.u, args.out / "solution.field", kind="u", problem=p.name)
    write_field(base.exact_u, args.out / "u_exact.field", kind="u_exact", problem=p.name)
    with open(args.out / "history.csv", "w") as fh:
        fh.write("k,rel_change,energy\n")
        for k, rel_change, energy in res.history:
            fh.write(f"{k},{rel_change:.17g},{energy:.17g}\n")
    print(f"wrote {args.out}/history.csv and solution surfaces")


if __name__ == "__main__":
    main()
