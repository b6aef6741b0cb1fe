"""Command-line entry point.

Exit codes: 0 success, 1 a verification came out negative, 2 usage or
input errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import adjoint, derived, nbb, repro
from .bits import fmt_set, members, popcount
from .errors import (
    AdjointForgeError,
    ExpectationMismatch,
    FileFormatError,
    LatticeError,
    MatroidError,
    NBBError,
    UnknownName,
)
from .io import load_lattice, load_matroid, load_matroid_with_matrix, parse_subset
from .iso import is_isomorphic
from .lattice import lattice_of_flats
from .matroid import linear_derived_matroid

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


class Output:
    def __init__(self, args):
        self.json = args.json
        self.stream = sys.stdout

    def emit(self, obj: dict, lines: list[str]):
        if self.json:
            print(json.dumps(obj, indent=2), file=self.stream)
        else:
            print("\n".join(lines), file=self.stream)


def _family_lines(fam, limit: int = 50) -> list[str]:
    sets = list(fam)
    out = [f"  {fmt_set(s)}" for s in sets[:limit]]
    if len(sets) > limit:
        out.append(f"  ... {len(sets) - limit} more")
    return out


# ------------------------------------------------------------------ lattice


def cmd_lattice_check(args, out: Output) -> int:
    L = load_lattice(args.lattice)
    info = {
        "elements": L.size,
        "rank": L.height,
        "atoms": len(L.atoms),
        "coatoms": len(L.coatoms),
        "atomic": L.is_atomic,
        "coatomic": L.is_coatomic,
        "semimodular": L.is_semimodular(),
        "geometric": L.is_geometric(),
        "modular": L.is_modular(),
    }
    out.emit(info, [f"{k}: {v}" for k, v in info.items()])
    return EXIT_OK


def cmd_lattice_ops(args, out: Output) -> int:
    L = load_lattice(args.lattice)
    arg = args.arg
    if args.op in ("restrict", "contract") and arg is None:
        arg = random.Random(args.seed).randrange(L.size)
    computed, predicted = nbb.lattice_op_families(L, args.op, arg)
    ok = computed == predicted
    obj = {
        "op": args.op,
        "arg": arg,
        "match": ok,
        "computed": computed.as_lists(),
        "predicted": predicted.as_lists(),
        "only_computed": sorted(members(s) for s in computed.as_set() - predicted.as_set()),
        "only_predicted": sorted(members(s) for s in predicted.as_set() - computed.as_set()),
    }
    lines = [f"{args.op} at {arg}: {len(computed)} computed, {len(predicted)} predicted, match {ok}"]
    if not ok:
        lines += ["only computed:"] + [f"  {s}" for s in obj["only_computed"]]
        lines += ["only predicted:"] + [f"  {s}" for s in obj["only_predicted"]]
    out.emit(obj, lines)
    return EXIT_OK if ok else EXIT_MISMATCH


# ---------------------------------------------------------------------- nbb


def cmd_nbb_independents(args, out: Output) -> int:
    L = load_lattice(args.lattice)
    fam = nbb.independence_family(L, method=args.method)
    is_mat = nbb.check_matroid(fam)
    obj = {"count": len(fam), "sizes": fam.sizes(), "is_matroid": is_mat, "sets": fam.as_lists()}
    lines = [f"{len(fam)} independent atom sets, sizes {fam.sizes()}, matroid: {is_mat}"]
    out.emit(obj, lines + (_family_lines(fam) if args.long else []))
    return EXIT_OK


def cmd_nbb_bases(args, out: Output) -> int:
    L = load_lattice(args.lattice)
    fam = nbb.lattice_bases(L)
    out.emit({"count": len(fam), "sets": fam.as_lists()},
             [f"{len(fam)} lattice bases"] + _family_lines(fam))
    return EXIT_OK


def cmd_nbb_embed(args, out: Output) -> int:
    L = load_lattice(args.lattice)
    P = load_lattice(args.target)
    if args.map:
        atom_map = [int(x) for x in args.map.split(",")]
    else:
        atom_map = list(range(len(L.atoms)))
    res = nbb.embed(L, P, atom_map)
    obj = {
        "embeds": bool(res),
        "violation": res.violation,
        "independents_map": res.independents_map,
        "low_sets_map": res.low_sets_map,
    }
    lines = [f"embeds: {bool(res)}"]
    if res.violation:
        lines.append(f"reason: {res.violation}")
    lines += [f"independent sets map to independent sets: {res.independents_map}",
              f"low-rank sets map to dependent sets: {res.low_sets_map}"]
    out.emit(obj, lines)
    return EXIT_OK if res else EXIT_MISMATCH


# ------------------------------------------------------------------ matroid


def cmd_matroid_info(args, out: Output) -> int:
    M = load_matroid(args.matroid)
    info = {
        "n": M.n,
        "rank": M.d,
        "bases": len(M.bases),
        "circuits": len(M.circuits),
        "flats": len(M.flats),
        "hyperplanes": len(M.hyperplanes),
        "modular": lattice_of_flats(M).is_modular() if M.n <= 12 else None,
    }
    out.emit(info, [f"{k}: {v}" for k, v in info.items()])
    return EXIT_OK


def cmd_matroid_dual(args, out: Output) -> int:
    M = load_matroid(args.matroid)
    D = M.dual
    out.emit(D.to_json(), [f"dual: n={D.n} rank={D.d} bases={len(D.bases)}"] + _family_lines(D.bases))
    return EXIT_OK


def cmd_matroid_derived_linear(args, out: Output) -> int:
    M, A = load_matroid_with_matrix(args.matroid)
    if A is None:
        raise FileFormatError("derived-linear needs a matrix input ({'field', 'matrix'} or catalog:MatrixA)")
    D = linear_derived_matroid(A)
    obj = {"circuits": D.n, "rank": D.d, "bases": len(D.bases), "matroid": D.to_json()}
    out.emit(obj, [f"linear derived matroid: {D.n} circuits, rank {D.d}, {len(D.bases)} bases"])
    return EXIT_OK


def cmd_matroid_iso(args, out: Output) -> int:
    M1, M2 = load_matroid(args.first), load_matroid(args.second)
    perm = is_isomorphic(M1, M2)
    obj = {"isomorphic": perm is not None, "permutation": None if perm is None else list(perm)}
    out.emit(obj, [f"isomorphic: {perm is not None}"] + ([f"permutation: {list(perm)}"] if perm else []))
    return EXIT_OK if perm is not None else EXIT_MISMATCH


# ------------------------------------------------------------------ adjoint


def cmd_adjoint_check(args, out: Output) -> int:
    M, N = load_matroid(args.matroid), load_matroid(args.candidate)
    routes = adjoint.adjoint_routes(M, N, adjoint.ROUTES + ("dependence",))
    core = {routes[r] for r in adjoint.ROUTES}
    if len(core) != 1:
        out.emit({"routes": routes, "adjoint": None}, [f"routes disagree: {routes}"])
        return EXIT_MISMATCH
    ok = core.pop()
    out.emit({"adjoint": ok, "routes": routes},
             [f"adjoint: {ok}"] + [f"  {r}: {v}" for r, v in routes.items()])
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_adjoint_enumerate(args, out: Output) -> int:
    M = load_matroid(args.matroid)
    budget = 0 if args.long else args.node_budget
    rep = adjoint.enumerate_adjoints(M, workers=args.workers, node_budget=budget)
    obj = rep.to_json(with_bases=args.long)
    lines = [f"{rep.count} adjoints (complete search: {rep.complete})",
             "bases: count [isomorphism class sizes]"]
    splits = rep.class_splits()
    for k, v in rep.histogram.items():
        lines.append(f"  {k}: {v} {splits[k]}")
    lo = sorted({len(N.bases) for N, f in zip(rep.adjoints, rep.minimal) if f})
    hi = sorted({len(N.bases) for N, f in zip(rep.adjoints, rep.maximal) if f})
    lines.append(f"minimal: {lo}  maximal: {hi}")
    lines.append(f"mandatory {rep.mandatory}, free {rep.free}, clauses {rep.clauses}")
    out.emit(obj, lines)
    return EXIT_OK


def cmd_adjoint_bounds(args, out: Output) -> int:
    M = load_matroid(args.matroid)
    b = adjoint.sandwich_bounds(M)
    obj = b.to_json()
    lines = [f"circuits {b.m}, rank {b.r}", f"mandatory bases: {len(b.mandatory)}",
             f"free r-sets: {len(b.free)}", f"r-sets in S(M) dropped by subsets: {b.s_only}"]
    out.emit(obj, lines)
    return EXIT_OK


# ------------------------------------------------------------------ derived


def _rank_table(N, m: int):
    return N.rank_table.tolist() if m <= 12 else None


def cmd_derived_delta(args, out: Output) -> int:
    M = load_matroid(args.matroid)
    D = derived.derived_dependents(M)
    N = D.to_matroid()
    ok = N.d == adjoint.universe(M).r and adjoint.is_adjoint(M, N)
    obj = {**D.to_json(), "rank": N.d, "bases": len(N.bases), "is_adjoint": ok,
           "up_closure_of_seeds": derived.is_up_closure_of_seeds(M), "rank_table": _rank_table(N, D.m)}
    lines = [f"derived matroid: {D.m} circuits, rank {N.d}, {len(N.bases)} bases",
             f"minimal dependents below the size cap: {len(D)}; rounds {D.rounds}",
             f"adjoint: {ok}"]
    out.emit(obj, lines + (_family_lines(D.minimal) if args.long else []))
    return EXIT_OK


def cmd_derived_delta_prime(args, out: Output) -> int:
    M = load_matroid(args.matroid)
    trace = derived.delta_prime_dependents(M)
    N = trace.final.to_matroid()
    same = trace.final.same_sets(derived.derived_dependents(M))
    obj = {**trace.final.to_json(), "rank": N.d, "bases": len(N.bases), "equals_delta": same,
           "stage_sizes": [len(s) for s in trace.stages], "rank_table": _rank_table(N, N.n)}
    lines = [f"delta-prime: rank {N.d}, {len(N.bases)} bases, equal to delta: {same}",
             f"minimal dependents per stage: {obj['stage_sizes']}"]
    out.emit(obj, lines)
    return EXIT_OK


def cmd_derived_valx(args, out: Output) -> int:
    M = load_matroid(args.matroid)
    m = adjoint.universe(M).m
    if args.subset is not None:
        subsets = [parse_subset(args.subset)]
        if subsets[0] >> m:
            raise FileFormatError(f"subset uses circuit indices beyond {m - 1}")
    else:
        rng = random.Random(args.seed)
        subsets = [rng.getrandbits(m) for _ in range(args.samples)]
    table = derived.valx_table(M, properness=args.properness)
    rows = [{"subset": members(s), "size": popcount(s), "valx": int(table[s])} for s in subsets]
    obj = {"circuits": m, "properness": args.properness, "values": rows}
    if args.long:
        obj["table"] = table.tolist()
    out.emit(obj, [f"{fmt_set(s)}  val_X = {int(table[s])}" for s in subsets])
    return EXIT_OK


def cmd_derived_conjecture(args, out: Output) -> int:
    M = load_matroid(args.matroid)
    rep = derived.conjecture_report(M, workers=args.workers)
    out.emit(rep, [f"{k}: {v}" for k, v in rep.items()])
    return EXIT_OK


# -------------------------------------------------------------------- repro


def cmd_repro(args, out: Output) -> int:
    names = repro.NAMES if args.name == "all" else (args.name,)
    for n in names:
        if n not in repro.EXPECTED:
            raise UnknownName(f"no reference row {n!r}; known: {', '.join(repro.NAMES)}")
    results = [repro.reproduce(n, workers=args.workers, long=args.long) for n in names]
    obj = {"results": [r.to_json() for r in results], "all_match": all(r.match for r in results)}
    lines = []
    for r in results:
        lines.append(f"{'MATCH' if r.match else 'MISMATCH':8s} {r.name:12s} {r.seconds:7.2f}s")
        for k, v in r.diff.items():
            lines.append(f"    {k}: expected {v['expected']}, computed {v['computed']}")
        lines += [f"    note: {t}" for t in r.notes]
    out.emit(obj, lines)
    return EXIT_OK if obj["all_match"] else EXIT_MISMATCH


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="emit json")
    fmt.add_argument("--table", action="store_true", help="emit plain text (default)")
    common.add_argument("--workers", type=int, default=1,
                        help="worker processes (ADJOINTFORGE_WORKERS overrides)")
    common.add_argument("--long", action="store_true", help="lift search budgets, print full listings")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks")

    p = argparse.ArgumentParser(prog="adjointforge", description="Lattice independence and adjoint matroids.")
    groups = p.add_subparsers(dest="group", required=True)

    def sub(parent, name, func, help_text):
        sp = parent.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(func=func)
        return sp

    g = groups.add_parser("lattice", help="lattice validation and operations").add_subparsers(dest="cmd", required=True)
    s = sub(g, "check", cmd_lattice_check, "validate a lattice and report its properties")
    s.add_argument("lattice", help="lattice json, matroid json or catalog name")
    s = sub(g, "ops", cmd_lattice_ops, "compare an operation's independents with the predicted family")
    s.add_argument("lattice")
    s.add_argument("--op", required=True, choices=["restrict", "contract", "truncate", "dual"])
    s.add_argument("--arg", type=int, help="element (restrict/contract) or rank (truncate)")

    g = groups.add_parser("nbb", help="independent atom sets").add_subparsers(dest="cmd", required=True)
    s = sub(g, "independents", cmd_nbb_independents, "the independent atom sets")
    s.add_argument("lattice")
    s.add_argument("--method", choices=["peel", "orders"], default="peel")
    s = sub(g, "bases", cmd_nbb_bases, "lattice bases")
    s.add_argument("lattice")
    s = sub(g, "embed", cmd_nbb_embed, "try to embed one lattice into a geometric one")
    s.add_argument("lattice")
    s.add_argument("target")
    s.add_argument("--map", help="comma separated target atom position per atom (default identity)")

    g = groups.add_parser("matroid", help="matroid utilities").add_subparsers(dest="cmd", required=True)
    s = sub(g, "info", cmd_matroid_info, "basic counts")
    s.add_argument("matroid")
    s = sub(g, "dual", cmd_matroid_dual, "the dual matroid")
    s.add_argument("matroid")
    s = sub(g, "derived-linear", cmd_matroid_derived_linear, "derived matroid of a represented matroid")
    s.add_argument("matroid")
    s = sub(g, "iso", cmd_matroid_iso, "isomorphism test")
    s.add_argument("first")
    s.add_argument("second")

    g = groups.add_parser("adjoint", help="adjoint checks and enumeration").add_subparsers(dest="cmd", required=True)
    s = sub(g, "check", cmd_adjoint_check, "is the candidate an adjoint")
    s.add_argument("matroid")
    s.add_argument("candidate", help="matroid on the circuit indices of the first")
    s = sub(g, "enumerate", cmd_adjoint_enumerate, "all adjoints")
    s.add_argument("matroid")
    s.add_argument("--node-budget", type=int, default=5_000_000, help="search node cap without --long")
    s = sub(g, "bounds", cmd_adjoint_bounds, "mandatory and free bases")
    s.add_argument("matroid")

    g = groups.add_parser("derived", help="derived matroids and val_X").add_subparsers(dest="cmd", required=True)
    s = sub(g, "delta", cmd_derived_delta, "combinatorial derived matroid")
    s.add_argument("matroid")
    s = sub(g, "delta-prime", cmd_derived_delta_prime, "iterated variant")
    s.add_argument("matroid")
    s = sub(g, "valx", cmd_derived_valx, "val_X of a circuit set (sampled when omitted)")
    s.add_argument("matroid")
    s.add_argument("subset", nargs="?", help="circuit indices, e.g. 0,2,5")
    s.add_argument("--samples", type=int, default=5)
    s.add_argument("--properness", choices=list(derived.PROPERNESS), default="new")
    s = sub(g, "conjecture", cmd_derived_conjecture, "compare delta-prime, val_X and the adjoints")
    s.add_argument("matroid")

    s = groups.add_parser("repro", parents=[common], help="recompute the reference catalog rows")
    s.add_argument("name", help=f"one of {', '.join(repro.NAMES)} or 'all'")
    s.set_defaults(func=cmd_repro)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.workers < 1:
        parser.error("--workers must be positive")
    out = Output(args)
    try:
        return args.func(args, out)
    except (FileFormatError, LatticeError, MatroidError, NBBError) as exc:
        # bad input files, invalid lattices or basis families, unknown names,
        # inputs outside what the lattice routines accept
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ExpectationMismatch as exc:
        print(f"mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except AdjointForgeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
