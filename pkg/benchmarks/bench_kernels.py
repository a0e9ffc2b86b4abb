"""Compare the compiled and the numpy/scipy kernels.

    python3 benchmarks/bench_kernels.py [--points 4097] [--repeat 20]

Times each kernel (banded factorization, solve, stencil application, odd
power) and one full ground-state solve per backend, and checks that both
backends produce the same numbers.
"""

import argparse
import time

import numpy as np

from biharmonic_gs import kernels, make_params, solve_radial
from biharmonic_gs.operator import DiscreteOperator
from biharmonic_gs.profile import Grid


def best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=4097)
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()

    p = make_params(7, 4.5, -500.0)
    g = Grid(40.0, args.points)
    op = DiscreteOperator(p.a_coeff, p.b_coeff, g.spacing, g.points)
    w = np.exp(-(g.nodes**2))
    names = kernels.available()
    if len(names) < 2:
        print("compiled extension not built; only the python backend is available")

    rows, outputs = [], {}
    for name in names:
        k = kernels.BACKENDS[name]
        fac = k.factor(op.stencil, g.points)
        with kernels.use_backend(name):
            t_solve = best_of(lambda: solve_radial(p, g), max(1, args.repeat // 5))
            outputs[name] = solve_radial(p, g).s_rad
        rows.append(
            (
                name,
                best_of(lambda: k.factor(op.stencil, g.points), args.repeat),
                best_of(lambda: fac.solve(w), args.repeat),
                best_of(lambda: k.apply_stencil(op.stencil, w), args.repeat),
                best_of(lambda: k.odd_power(w, p.q), args.repeat),
                t_solve,
            )
        )

    print(f"N = {g.points}, best of {args.repeat} (seconds)")
    print(f"{'backend':8} {'factor':>10} {'solve':>10} {'stencil':>10} {'odd_power':>10} {'ground st.':>11}")
    for r in rows:
        print(f"{r[0]:8} " + " ".join(f"{x:10.2e}" for x in r[1:5]) + f" {r[5]:11.3e}")
    if len(rows) == 2:
        ratio = [a / b for a, b in zip(rows[1][1:], rows[0][1:])]
        print("speedup  " + " ".join(f"{x:10.1f}" for x in ratio[:4]) + f" {ratio[4]:11.1f}")
        vals = list(outputs.values())
        print(f"s_rad agreement: {abs(vals[0] - vals[1]) / abs(vals[0]):.1e} relative")


if __name__ == "__main__":
    main()
