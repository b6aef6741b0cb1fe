"""Adjoint matroids: the opposite dual lattice, S(M), and enumeration.

Circuit sets are bitmasks over circuit indices (positions in the canonical
sorted circuit list of ``M``). Throughout, ``r`` is the corank ``n - d``.

The (L*)^opp rank of a circuit set is the nullity of the union of its
circuits, and a circuit set is independent there iff its circuits can be
ordered so that each one has an element outside all later ones.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Sequence

import numpy as np

from . import kernels
from .bits import SetFamily, as_int64, iter_bits, mask_of, members, popcount
from .errors import CircuitIsFundamental, GroundSetMismatch, NotModular, RouteDisagreement
from .iso import iso_classes
from .lattice import FiniteLattice, dual_lattice, lattice_of_flats
from .matroid import TABLE_LIMIT, Matroid, weak_order_leq
from .nbb import independence_family

ROUTES = ("sandwich", "hyperplane", "fundamental")


class CircuitUniverse:
    """The circuits of ``M`` in canonical order, with S(M) helpers."""

    def __init__(self, M: Matroid):
        if M.n > TABLE_LIMIT:
            raise ValueError(f"ground sets above {TABLE_LIMIT} elements are not supported")
        self.M = M
        self.circuits: tuple[int, ...] = M.circuits.sets
        self.cmasks = as_int64(self.circuits)
        self.m = len(self.circuits)
        self.r = M.n - M.d
        self.index = {c: i for i, c in enumerate(self.circuits)}
        self.rank_table = M.rank_table

    def union(self, S: int) -> int:
        u = 0
        for i in iter_bits(S):
            u |= self.circuits[i]
        return u

    def lopp_rank(self, S: int) -> int:
        u = self.union(S)
        return popcount(u) - int(self.rank_table[u])

    def in_s_family(self, S: int) -> bool:
        return popcount(S) <= self.lopp_rank(S)

    def s_mask(self, sets: np.ndarray) -> np.ndarray:
        return kernels.s_family_filter(sets, self.cmasks, self.rank_table)

    def fundamental_family(self, B: int) -> int:
        """The circuit set C_B = {C_{B,i} : i not in B}."""
        M = self.M
        return mask_of(self.index[M.fundamental_circuit(B, i)] for i in range(M.n) if not B >> i & 1)

    @cached_property
    def fundamental_families(self) -> tuple[int, ...]:
        return tuple(self.fundamental_family(B) for B in self.M.bases)

    def lopp_fundamental_circuit(self, B: int, c: int) -> int:
        """{C_{B,e} : e in C - B} together with C, as a circuit set."""
        if self.fundamental_family(B) >> c & 1:
            raise CircuitIsFundamental(f"circuit {c} belongs to C_B")
        M = self.M
        C = self.circuits[c]
        out = 1 << c
        for e in iter_bits(C & ~B):
            out |= 1 << self.index[M.fundamental_circuit(B, e)]
        return out

    @cached_property
    def x_family(self) -> SetFamily:
        """Every fundamental circuit of (L*)^opp, deduplicated."""
        out = set()
        for B, fam in zip(self.M.bases, self.fundamental_families):
            for c in range(self.m):
                if not fam >> c & 1:
                    out.add(self.lopp_fundamental_circuit(B, c))
        return SetFamily(self.m, tuple(out))

    @cached_property
    def lopp_levels(self) -> list[np.ndarray]:
        flat, offsets = kernels.lopp_levels(self.cmasks, self.r)
        return [flat[offsets[k]:offsets[k + 1]] for k in range(len(offsets) - 1)]


def universe(M: Matroid) -> CircuitUniverse:
    cu = M.__dict__.get("_universe")
    if cu is None:
        cu = CircuitUniverse(M)
        M.__dict__["_universe"] = cu
    return cu


def lopp_rank(M: Matroid, S: int) -> int:
    return universe(M).lopp_rank(S)


def in_s_family(M: Matroid, S: int) -> bool:
    return universe(M).in_s_family(S)


def lopp_lattice(M: Matroid) -> tuple[FiniteLattice, list[int]]:
    """(L*)^opp and, per atom position, the index of its circuit."""
    L = dual_lattice(lattice_of_flats(M.dual))
    cu = universe(M)
    ground = M.ground
    circ = [cu.index[ground ^ L.labels[a]] for a in L.atoms]
    return L, circ


def lopp_independents(M: Matroid, route: str = "kernel") -> SetFamily:
    """I((L*)^opp) over circuit indices.

    ``kernel`` uses the ordering characterisation, ``lattice`` runs the NBB
    machinery on the explicit lattice, ``replacement`` grows the maximal
    sets from every C_B by circuit replacement and takes the down-closure.
    """
    cu = universe(M)
    if route == "kernel":
        sets = np.concatenate(cu.lopp_levels) if cu.lopp_levels else np.zeros(1, np.int64)
        return SetFamily(cu.m, tuple(sets.tolist()))
    if route == "lattice":
        L, circ = lopp_lattice(M)
        fam = independence_family(L)
        return SetFamily(cu.m, tuple(mask_of(circ[k] for k in iter_bits(s)) for s in fam))
    if route == "replacement":
        return SetFamily(cu.m, tuple(replacement_maximal_sets(M))).down_closure()
    raise ValueError(f"unknown route {route!r}")


def replacement_maximal_sets(M: Matroid) -> set[int]:
    """Sets reached from some C_B by repeatedly swapping C_{B,i} for a
    circuit C containing i and avoiding B and every earlier C."""
    cu = universe(M)
    out: set[int] = set()
    for B, start in zip(M.bases, cu.fundamental_families):
        fc = {i: cu.index[M.fundamental_circuit(B, i)] for i in range(M.n) if not B >> i & 1}
        seen = set()
        stack = [(start, 0)]
        while stack:
            cur, covered = stack.pop()
            if (cur, covered) in seen:
                continue
            seen.add((cur, covered))
            out.add(cur)
            for i, ci in fc.items():
                if not cur >> ci & 1 or covered >> i & 1:
                    continue
                # i is outside B and every earlier C, so any circuit through i qualifies
                for c in range(cu.m):
                    C = cu.circuits[c]
                    if C >> i & 1:
                        stack.append(((cur & ~(1 << ci)) | (1 << c), covered | C))
    return out


def lopp_fundamental_circuit(M: Matroid, B, c: int) -> int:
    return universe(M).lopp_fundamental_circuit(mask_of(B) if not isinstance(B, int) else B, c)


# ------------------------------------------------------------- sandwich


@dataclass(frozen=True)
class SandwichBounds:
    """Lower bound (mandatory bases), upper predicate S(M), free r-sets.

    ``free`` holds the r-sets outside I((L*)^opp) all of whose subsets lie
    in S(M); only these can be extra bases of an adjoint.
    """

    m: int
    r: int
    mandatory: tuple[int, ...]
    free: tuple[int, ...]
    s_only: int  # r-sets in S(M) dropped because some subset is not

    def to_json(self) -> dict:
        return {
            "circuits": self.m,
            "rank": self.r,
            "mandatory": len(self.mandatory),
            "free": len(self.free),
            "free_sets": [members(s) for s in self.free],
            "dropped_by_subsets": self.s_only,
        }


def sandwich_bounds(M: Matroid) -> SandwichBounds:
    cu = universe(M)
    r = cu.r
    levels = cu.lopp_levels
    mandatory = levels[r] if len(levels) > r else np.zeros(0, np.int64)
    rsets = kernels.k_subsets(cu.m, r)
    outside = rsets[~np.isin(rsets, mandatory)]
    in_s = cu.s_mask(outside)
    upper = outside[in_s]
    ok = kernels.all_subsets_in_s(upper, cu.cmasks, cu.rank_table)
    return SandwichBounds(cu.m, r, tuple(mandatory.tolist()), tuple(upper[ok].tolist()), int((~ok).sum()))


# ----------------------------------------------------------- is_adjoint


def _independents_array(N: Matroid) -> np.ndarray:
    return as_int64(N.independents.sets)


def _route_sandwich(M: Matroid, N: Matroid, bounds: SandwichBounds) -> bool:
    cu = universe(M)
    if N.d != cu.r:
        return False
    if not all(b in N.bases for b in bounds.mandatory):
        return False
    return bool(cu.s_mask(_independents_array(N)).all())


def _route_hyperplane(M: Matroid, N: Matroid) -> bool:
    cu = universe(M)
    if N.d != cu.r:
        return False
    for i in range(M.n):
        if M.is_coloop(i):
            continue
        H = mask_of(c for c in range(cu.m) if not cu.circuits[c] >> i & 1)
        if N.rank(H) != cu.r - 1 or N.closure(H) != H:
            return False
    return True


def _is_circuit(N: Matroid, X: int) -> bool:
    if N.is_independent(X):
        return False
    return all(N.is_independent(X ^ (1 << c)) for c in iter_bits(X))


def _route_fundamental(M: Matroid, N: Matroid) -> bool:
    cu = universe(M)
    for B, fam in zip(M.bases, cu.fundamental_families):
        if fam not in N.bases:
            return False
    for B, fam in zip(M.bases, cu.fundamental_families):
        for c in range(cu.m):
            if fam >> c & 1:
                continue
            if not _is_circuit(N, cu.lopp_fundamental_circuit(B, c)):
                return False
    return True


def dependence_only_check(M: Matroid, N: Matroid) -> bool:
    """Mandatory bases present and every C_{C_B, C} dependent, over C not in C_B.

    It only asks that each C_{C_B, C} lies in no basis of ``N`` (is
    dependent), not that it is a circuit, so it is weaker in principle than
    the fundamental route; no candidate separating the two has turned up.
    Including the circuits of C_B in the inner loop would make it reject
    everything, since then the tested set is a single circuit.
    """
    cu = universe(M)
    for fam in cu.fundamental_families:
        if fam not in N.bases:
            return False
    for B, fam in zip(M.bases, cu.fundamental_families):
        for c in range(cu.m):
            if fam >> c & 1:
                continue
            X = cu.lopp_fundamental_circuit(B, c)
            if np.any((N.basis_array & X) == X):
                return False
    return True


def adjoint_routes(M: Matroid, N: Matroid, routes: Sequence[str] = ROUTES) -> dict[str, bool]:
    cu = universe(M)
    if N.n != cu.m:
        raise GroundSetMismatch(f"candidate has {N.n} elements, M has {cu.m} circuits")
    out = {}
    for r in routes:
        if r == "sandwich":
            out[r] = _route_sandwich(M, N, sandwich_bounds_cached(M))
        elif r == "hyperplane":
            out[r] = _route_hyperplane(M, N)
        elif r == "fundamental":
            out[r] = _route_fundamental(M, N)
        elif r == "dependence":
            out[r] = dependence_only_check(M, N)
        else:
            raise ValueError(f"unknown route {r!r}")
    return out


def sandwich_bounds_cached(M: Matroid) -> SandwichBounds:
    sb = M.__dict__.get("_sandwich")
    if sb is None:
        sb = sandwich_bounds(M)
        M.__dict__["_sandwich"] = sb
    return sb


def is_adjoint(M: Matroid, N: Matroid, routes: Sequence[str] = ROUTES) -> bool:
    """Whether ``N`` (on circuit indices of ``M``) is an adjoint of ``M``.

    All requested characterisations are evaluated and must agree.
    """
    res = adjoint_routes(M, N, routes)
    vals = set(res.values())
    if len(vals) != 1:
        raise RouteDisagreement(f"adjoint routes disagree: {res}")
    return vals.pop()


# ---------------------------------------------------------- enumeration


@dataclass
class AdjointReport:
    adjoints: list[Matroid]
    classes: list[int]
    minimal: list[bool]
    maximal: list[bool]
    complete: bool
    mandatory: int
    free: int
    clauses: int
    nodes: int
    seconds: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def count(self) -> int:
        return len(self.adjoints)

    @property
    def basis_counts(self) -> list[int]:
        return [len(N.bases) for N in self.adjoints]

    @property
    def histogram(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for k in self.basis_counts:
            out[k] = out.get(k, 0) + 1
        return dict(sorted(out.items()))

    def class_splits(self) -> dict[int, list[int]]:
        """Per basis count, the sizes of its isomorphism classes (largest first)."""
        out: dict[int, dict[int, int]] = {}
        for k, c in zip(self.basis_counts, self.classes):
            out.setdefault(k, {})
            out[k][c] = out[k].get(c, 0) + 1
        return {k: sorted(v.values(), reverse=True) for k, v in sorted(out.items())}

    def to_json(self, with_bases: bool = False) -> dict:
        rows = []
        for N, c, lo, hi in zip(self.adjoints, self.classes, self.minimal, self.maximal):
            row = {"bases": len(N.bases), "class": c, "minimal": lo, "maximal": hi}
            if with_bases:
                row["basis_sets"] = N.bases.as_lists()
            rows.append(row)
        return {
            "count": self.count,
            "complete": self.complete,
            "histogram": {str(k): v for k, v in self.histogram.items()},
            "classes": {str(k): v for k, v in self.class_splits().items()},
            "minimal": [i for i, f in enumerate(self.minimal) if f],
            "maximal": [i for i, f in enumerate(self.maximal) if f],
            "candidates": rows,
            # node counts depend on how the search was split across workers
            "search": {"mandatory": self.mandatory, "free": self.free, "clauses": self.clauses},
        }


def _solve_chunk(args):
    nv, ptr, lits, assume, max_solutions, node_budget = args
    return kernels.dpll_enumerate(nv, ptr, lits, assume, max_solutions, node_budget)


def resolve_workers(workers: int | None) -> int:
    env = os.environ.get("ADJOINTFORGE_WORKERS")
    if env:
        return max(1, int(env))
    return max(1, int(workers or 1))


def enumerate_adjoints(
    M: Matroid,
    workers: int | None = 1,
    node_budget: int = 0,
    validate: bool = True,
    classify: bool = True,
) -> AdjointReport:
    """Every adjoint of ``M`` of rank ``n - d``.

    Mandatory bases are the maximal sets of I((L*)^opp); each adjoint adds
    some subset of the free r-sets. The exchange axiom over mandatory plus
    chosen sets is a CNF whose models are enumerated by DPLL. A positive
    ``node_budget`` bounds the search; the report then says whether it
    finished.
    """
    t0 = time.perf_counter()
    bounds = sandwich_bounds_cached(M)
    cand = np.array(sorted(bounds.mandatory + bounds.free), dtype=np.int64)
    mand = set(bounds.mandatory)
    fixed = np.array([c in mand for c in cand.tolist()], dtype=np.bool_)
    free_sets = cand[~fixed]
    nv = int(free_sets.shape[0])

    unsat, ptr, lits = kernels.build_exchange_clauses(cand, fixed)
    models: list[np.ndarray] = []
    nodes = 0
    complete = True
    if not unsat:
        n_workers = resolve_workers(workers)
        split = 0
        while n_workers > 1 and (1 << split) < 2 * n_workers and split < nv:
            split += 1
        jobs = []
        for bits in product((0, 1), repeat=split):
            assume = np.full(nv, -1, np.int8)
            assume[:split] = bits
            jobs.append((nv, ptr, lits, assume, np.int64(1 << 40), np.int64(node_budget)))
        if n_workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=n_workers) as pool:
                results = list(pool.map(_solve_chunk, jobs))
        else:
            results = [_solve_chunk(j) for j in jobs]
        for sols, status, nd in results:
            nodes += int(nd)
            complete &= int(status) == 0
            models.extend(sols)

    mand_list = sorted(mand)
    adjoints = []
    for sol in models:
        chosen = free_sets[np.asarray(sol, dtype=np.bool_)].tolist()
        adjoints.append(Matroid(bounds.m, mand_list + chosen))
    adjoints.sort(key=lambda N: (len(N.bases), N.bases.sets))

    if validate:
        for N in adjoints:
            if not is_adjoint(M, N):
                raise RuntimeError("enumerated candidate failed the adjoint check")

    classes = _classify(adjoints) if classify else list(range(len(adjoints)))
    minimal = [not any(o is not N and weak_order_leq(o, N) for o in adjoints) for N in adjoints]
    maximal = [not any(o is not N and weak_order_leq(N, o) for o in adjoints) for N in adjoints]
    return AdjointReport(
        adjoints, classes, minimal, maximal, complete,
        len(bounds.mandatory), len(bounds.free), int(ptr.shape[0] - 1), nodes,
        time.perf_counter() - t0,
    )


def _classify(adjoints: list[Matroid]) -> list[int]:
    """Global class ids; only equal basis counts are compared."""
    out = [0] * len(adjoints)
    next_id = 0
    buckets: dict[int, list[int]] = {}
    for i, N in enumerate(adjoints):
        buckets.setdefault(len(N.bases), []).append(i)
    for _, idx in sorted(buckets.items()):
        local = iso_classes([adjoints[i] for i in idx])
        for i, c in zip(idx, local):
            out[i] = next_id + c
        next_id += max(local) + 1
    return out


def lopp_matroid(M: Matroid) -> Matroid:
    """The matroid whose bases are the maximal sets of I((L*)^opp), when
    that family is a matroid (checked by the caller)."""
    b = sandwich_bounds_cached(M)
    return Matroid(b.m, b.mandatory)


def unique_adjoint_if_modular(M: Matroid, verify: bool = True) -> Matroid:
    if not M.circuits.sets:
        return Matroid(0, (0,))
    if not lattice_of_flats(M).is_modular():
        raise NotModular("lattice of flats is not modular")
    N = lopp_matroid(M)
    if verify:
        rep = enumerate_adjoints(M)
        if rep.count != 1 or rep.adjoints[0] != N:
            raise RuntimeError(f"expected a unique adjoint, found {rep.count}")
    return N


def uncovered_violating_family(M: Matroid, max_size: int | None = None) -> int | None:
    """A circuit family outside S(M) containing no C_{C_B, C}, or None.

    Families up to ``max_size`` circuits are scanned (default r + 1; every
    larger family contains one of size r + 1).
    """
    cu = universe(M)
    X = as_int64(cu.x_family.sets)
    top = cu.r + 1 if max_size is None else min(max_size, cu.r + 1)
    for k in range(1, top + 1):
        sets = kernels.k_subsets(cu.m, k)
        bad = sets[~cu.s_mask(sets)]
        if not len(bad):
            continue
        covered = np.zeros(len(bad), dtype=np.bool_)
        for x in X.tolist():
            covered |= (bad & x) == x
        if not covered.all():
            return int(bad[np.argmin(covered)])
    return None


def violating_families_contain_fundamental(M: Matroid, max_size: int | None = None) -> bool:
    return uncovered_violating_family(M, max_size) is None
