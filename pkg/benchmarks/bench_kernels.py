"""Time the hot kernels with numba on and off.

Each path runs in its own interpreter (ADJOINTFORGE_NUMBA=1 / 0) so the
fallback is pure python all the way down. Compile time is excluded by a
warmup call.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--only eps_round]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time


def _cases():
    import numpy as np

    from adjointforge import kernels
    from adjointforge.adjoint import sandwich_bounds, universe
    from adjointforge.catalog import catalog
    from adjointforge.derived import s_complement_seeds, x_family
    from adjointforge.lattice import lattice_of_flats

    q6 = catalog("Q6")
    ag = catalog("AG32")
    cu_q6, cu_ag = universe(q6), universe(ag)
    seeds = s_complement_seeds(catalog("U(2,6)"))
    fano_lat = lattice_of_flats(catalog("Fano"))
    order = np.argsort(fano_lat.leq.sum(axis=0), kind="stable")
    xs = np.array(x_family(ag).sets, dtype=np.int64)

    b = sandwich_bounds(catalog("R6"))
    cand = np.array(sorted(b.mandatory + b.free), dtype=np.int64)
    fixed = np.isin(cand, np.array(b.mandatory, dtype=np.int64))
    unsat, ptr, lits = kernels.build_exchange_clauses(cand, fixed)
    nv = int((~fixed).sum())
    assume = np.full(nv, -1, np.int8)

    return {
        "exchange_violation": lambda: kernels.exchange_violation(ag.basis_array),
        "lopp_levels": lambda: kernels.lopp_levels(cu_q6.cmasks, cu_q6.r),
        "s_family_filter": lambda: kernels.s_family_filter(
            kernels.k_subsets(cu_ag.m, 4), cu_ag.cmasks, cu_ag.rank_table),
        "build_exchange_clauses": lambda: kernels.build_exchange_clauses(cand, fixed),
        "dpll_enumerate": lambda: kernels.dpll_enumerate(nv, ptr, lits, assume, np.int64(1 << 40), np.int64(0)),
        "eps_round": lambda: kernels.eps_round(seeds.anti, seeds.cap),
        "union_best_length": lambda: kernels.union_best_length(xs, cu_ag.m),
        "join_table": lambda: kernels.join_table(fano_lat.leq, order),
    }


def child(repeat: int, only: list[str] | None) -> dict:
    from adjointforge._accel import USE_NUMBA

    out = {"numba": USE_NUMBA, "times": {}}
    for name, fn in _cases().items():
        if only and name not in only:
            continue
        fn()  # warmup / compile
        best = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - t0)
        out["times"][name] = best
    return out


def run_path(flag: str, repeat: int, only: list[str] | None) -> dict:
    env = dict(os.environ, ADJOINTFORGE_NUMBA=flag)
    cmd = [sys.executable, __file__, "--child", "--repeat", str(repeat)]
    for name in only or []:
        cmd += ["--only", name]
    res = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--only", action="append", help="kernel name (repeatable)")
    p.add_argument("--json", action="store_true")
    p.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = p.parse_args(argv)

    if args.child:
        print(json.dumps(child(args.repeat, args.only)))
        return 0

    jit = run_path("1", args.repeat, args.only)
    py = run_path("0", args.repeat, args.only)
    rows = []
    for name, t_jit in jit["times"].items():
        t_py = py["times"][name]
        rows.append({"kernel": name, "numba_s": t_jit, "python_s": t_py, "speedup": t_py / max(t_jit, 1e-9)})
    if args.json:
        print(json.dumps(rows, indent=2))
        return 0
    print(f"{'kernel':24s} {'numba':>10s} {'python':>10s} {'speedup':>9s}")
    for r in rows:
        print(f"{r['kernel']:24s} {r['numba_s']:10.5f} {r['python_s']:10.5f} {r['speedup']:8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
