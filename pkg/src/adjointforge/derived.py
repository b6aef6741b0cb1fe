"""The combinatorial derived matroid, its iterated variant, and val_X.

Dependent families are kept as antichains of minimal members; the
up-closure is implied. For families seeded with the complement of S(M),
every set with more than r circuits (r the corank of M) is outside S(M)
and hence dependent, so those are implicit as well (``cap``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .adjoint import enumerate_adjoints, is_adjoint, universe
from .bits import SetFamily, as_int64, full_mask, iter_bits, members, popcount
from .errors import EmptySetDependent, NoCircuits, NotProper
from .matroid import TABLE_LIMIT, Matroid, weak_order_leq

PROPERNESS = ("new", "strict")
LITERAL_LIMIT = 8


@dataclass(frozen=True)
class DependentClosure:
    """Minimal dependent sets over ``range(m)``; sets above ``cap`` are
    dependent regardless of ``anti``."""

    m: int
    cap: int
    anti: np.ndarray
    rounds: int = 0

    @classmethod
    def from_sets(cls, m: int, sets, cap: int | None = None) -> "DependentClosure":
        arr = np.unique(as_int64(list(sets)))
        return cls(m, m if cap is None else cap, kernels.minimal_members(arr), 0)

    def __len__(self) -> int:
        return len(self.anti)

    def is_dependent(self, S: int) -> bool:
        return bool(kernels.is_dependent(np.int64(S), self.anti, self.cap))

    @property
    def minimal(self) -> SetFamily:
        return SetFamily(self.m, tuple(self.anti.tolist()))

    def upto(self, k: int) -> np.ndarray:
        """Minimal members with at most ``k`` elements."""
        return self.anti[np.bitwise_count(self.anti) <= k]

    def same_sets(self, other: "DependentClosure") -> bool:
        return (self.m, self.cap) == (other.m, other.cap) and np.array_equal(self.anti, other.anti)

    def to_matroid(self) -> Matroid:
        """The matroid whose dependent sets these are (bases of top size)."""
        for k in range(min(self.cap, self.m), -1, -1):
            cands = kernels.k_subsets(self.m, k)
            keep = kernels.minimal_outside(cands, self.anti)
            if keep.any():
                return Matroid(self.m, tuple(cands[keep].tolist()))
        raise EmptySetDependent("the empty set is dependent")

    def to_json(self) -> dict:
        return {
            "elements": self.m,
            "size_cap": self.cap,
            "rounds": self.rounds,
            "minimal_dependents": [members(s) for s in self.anti.tolist()],
        }


def eps_step(D: DependentClosure) -> DependentClosure:
    """One round of (A1 | A2) - C over pairs of minimal members.

    For up-closed families the minimal pairs suffice: if A1, A2 contain
    minimal m1, m2 and C lies in m1 & m2, then (A1 | A2) - C contains the
    set produced by (m1, m2); otherwise it contains m1 or m2 outright.
    """
    if len(D.anti) and D.anti[0] == 0:
        raise EmptySetDependent("the empty set is dependent")
    new = kernels.eps_round(D.anti, D.cap)
    if not len(new):
        return D
    merged = kernels.minimal_members(np.union1d(D.anti, new))
    return DependentClosure(D.m, D.cap, merged, D.rounds + 1)


def closure(D: DependentClosure, max_rounds: int | None = None) -> DependentClosure:
    """Iterate :func:`eps_step` to its fixpoint."""
    while max_rounds is None or D.rounds < max_rounds:
        nxt = eps_step(D)
        if nxt is D:
            break
        D = nxt
    return D


def s_complement_seeds(M: Matroid) -> DependentClosure:
    """Minimal circuit sets outside S(M), with size cap r."""
    cu = universe(M)
    if cu.m == 0:
        raise NoCircuits("matroid has no circuits")
    found = np.zeros(0, np.int64)
    for k in range(1, cu.r + 1):
        cands = kernels.k_subsets(cu.m, k)
        cands = cands[~cu.s_mask(cands)]
        if len(found):
            cands = cands[kernels.minimal_outside(cands, found)]
        found = np.union1d(found, cands)
    return DependentClosure(cu.m, cu.r, found, 0)


def derived_dependents(M: Matroid) -> DependentClosure:
    cached = M.__dict__.get("_delta")
    if cached is None:
        cached = closure(s_complement_seeds(M))
        M.__dict__["_delta"] = cached
    return cached


def derived_matroid(M: Matroid) -> Matroid:
    """The combinatorial derived matroid on the circuits of ``M``."""
    return derived_dependents(M).to_matroid()


def is_up_closure_of_seeds(M: Matroid) -> bool:
    """Whether the fixpoint adds nothing to the seeds."""
    return derived_dependents(M).same_sets(s_complement_seeds(M))


@dataclass
class DeltaPrimeTrace:
    stages: list[DependentClosure] = field(default_factory=list)

    @property
    def final(self) -> DependentClosure:
        return self.stages[-1]


def delta_prime_dependents(M: Matroid) -> DeltaPrimeTrace:
    """D^(k) for k = 0 .. r, each stage reseeded with the small dependents
    of the previous one."""
    seeds = s_complement_seeds(M)
    trace = DeltaPrimeTrace([seeds])
    for k in range(seeds.cap):
        small = trace.final.upto(k)
        start = kernels.minimal_members(np.union1d(seeds.anti, small))
        trace.stages.append(closure(DependentClosure(seeds.m, seeds.cap, start, 0)))
    return trace


def delta_prime(M: Matroid) -> Matroid:
    return delta_prime_dependents(M).final.to_matroid()


# ------------------------------------------------- literal powerset oracle


def _literal_fixpoint(table: np.ndarray, m: int, upclosed_start: bool) -> np.ndarray:
    fam = kernels.up_closure_table(table, m) if upclosed_start else table.copy()
    while True:
        new = fam.copy()
        sets = np.nonzero(fam)[0].tolist()
        for a1 in sets:
            for a2 in sets:
                inter = a1 & a2
                if inter == 0 or fam[inter]:
                    continue
                both = a1 | a2
                for c in iter_bits(inter):
                    new[both ^ (1 << c)] = True
        new = kernels.up_closure_table(new, m)
        if np.array_equal(new, fam):
            return fam
        fam = new


def literal_derived_table(M: Matroid, upclosed_start: bool = False) -> np.ndarray:
    """Dependent-set indicator of the derived matroid computed over the
    whole powerset, exactly as the recursion reads (small inputs only)."""
    cu = universe(M)
    if cu.m > LITERAL_LIMIT:
        raise ValueError(f"literal oracle limited to {LITERAL_LIMIT} circuits")
    allsets = np.arange(1 << cu.m, dtype=np.int64)
    return _literal_fixpoint(~cu.s_mask(allsets), cu.m, upclosed_start)


def literal_delta_prime_table(M: Matroid, upclosed_start: bool = False) -> np.ndarray:
    cu = universe(M)
    if cu.m > LITERAL_LIMIT:
        raise ValueError(f"literal oracle limited to {LITERAL_LIMIT} circuits")
    allsets = np.arange(1 << cu.m, dtype=np.int64)
    seed = ~cu.s_mask(allsets)
    sizes = kernels.popcount_table(cu.m)
    cur = seed
    for k in range(cu.r):
        cur = _literal_fixpoint(seed | (cur & (sizes <= k)), cu.m, upclosed_start)
    return cur


def dependents_table(D: DependentClosure) -> np.ndarray:
    ind = np.zeros(1 << D.m, np.bool_)
    ind[D.anti] = True
    return kernels.up_closure_table(ind, D.m) | (kernels.popcount_table(D.m) > D.cap)


# ------------------------------------------------------------------ val_X


def x_family(M: Matroid) -> SetFamily:
    """The sets C_{C_B, C}, which are circuits of every adjoint."""
    return universe(M).x_family


def _is_proper(seq, properness: str) -> int:
    """Index of the first offending term, or -1."""
    union = 0
    for i, x in enumerate(seq):
        if i:
            if properness == "new" and x & ~union == 0:
                return i
            if properness == "strict" and not (x & ~union == 0 and x != union):
                return i
        union |= x
    return -1


def val(M: Matroid, F: int, seq, properness: str = "new") -> int:
    """|F | union(seq)| - len(seq) for a proper sequence over the X-family.

    ``new``: each term has an element outside the union of the earlier
    ones. ``strict``: each term is a proper subset of that union.
    """
    if properness not in PROPERNESS:
        raise ValueError(f"properness must be one of {PROPERNESS}")
    seq = [int(x) for x in seq]
    X = x_family(M)
    for x in seq:
        if x not in X:
            raise NotProper(f"{members(x)} is not in the X-family")
    bad = _is_proper(seq, properness)
    if bad >= 0:
        raise NotProper(f"term {bad} ({members(seq[bad])}) breaks properness")
    u = int(F)
    for x in seq:
        u |= x
    return popcount(u) - len(seq)


def valx_table(M: Matroid, properness: str = "new") -> np.ndarray:
    """val_X on every circuit set, indexed by mask."""
    key = f"_valx_{properness}"
    cached = M.__dict__.get(key)
    if cached is not None:
        return cached
    if properness not in PROPERNESS:
        raise ValueError(f"properness must be one of {PROPERNESS}")
    cu = universe(M)
    if cu.m > TABLE_LIMIT:
        raise ValueError(f"val_X tables limited to {TABLE_LIMIT} circuits")
    xs = as_int64(x_family(M).sets)
    if properness == "new":
        best = kernels.union_best_length(xs, cu.m)
    else:
        # the union never grows past the first term; every other term
        # is a distinct strict subset of it
        best = np.full(1 << cu.m, -1, np.int64)
        best[0] = 0
        for x in xs.tolist():
            best[x] = 1 + int(np.count_nonzero(((xs & x) == xs) & (xs != x)))
    out = kernels.valx_from_best(best, cu.m)
    out.setflags(write=False)
    M.__dict__[key] = out
    return out


def val_x(M: Matroid, F: int, properness: str = "new") -> int:
    return int(valx_table(M, properness)[int(F)])


@dataclass
class ValxCheck:
    equals_rank: bool
    submodular: bool
    mismatch: int | None
    violation: tuple[int, int] | None

    def __bool__(self) -> bool:
        return self.equals_rank and self.submodular

    def to_json(self) -> dict:
        return {
            "equals_rank": self.equals_rank,
            "submodular": self.submodular,
            "first_mismatch": None if self.mismatch is None else members(self.mismatch),
            "submodular_violation": None if self.violation is None else [members(s) for s in self.violation],
        }


def valx_check(M: Matroid, N: Matroid | None = None, properness: str = "new") -> ValxCheck:
    """Compare val_X with the rank function of ``N`` (default: the derived
    matroid) and test submodularity of val_X, both exhaustively."""
    table = valx_table(M, properness)
    N = derived_matroid(M) if N is None else N
    diff = np.nonzero(table != N.rank_table)[0]
    a, b = kernels.submodular_violation(table, universe(M).m)
    return ValxCheck(
        equals_rank=not len(diff),
        submodular=a < 0,
        mismatch=int(diff[0]) if len(diff) else None,
        violation=None if a < 0 else (a, b),
    )


def check_valx_is_rank(M: Matroid) -> bool:
    return bool(valx_check(M))


def valx_bound_violation(M: Matroid) -> int | None:
    """A circuit set outside S(M) with val_X(D) >= |D|, or None."""
    cu = universe(M)
    table = valx_table(M)
    allsets = np.arange(1 << cu.m, dtype=np.int64)
    bad = ~cu.s_mask(allsets) & (table >= kernels.popcount_table(cu.m))
    idx = np.nonzero(bad)[0]
    return int(idx[0]) if len(idx) else None


# ------------------------------------------------------------- conjecture


def conjecture_report(M: Matroid, workers: int = 1) -> dict:
    """Compare the derived matroids, val_X and the enumerated adjoints.

    Informational only; nothing here is asserted.
    """
    cu = universe(M)
    dM = derived_matroid(M)
    dpM = delta_prime(M)
    rep = enumerate_adjoints(M, workers=workers, classify=False)
    maximal = [N for N in rep.adjoints if not any(
        N != K and weak_order_leq(N, K) for K in rep.adjoints)]
    out = {
        "circuits": cu.m,
        "corank": cu.r,
        "delta_bases": len(dM.bases),
        "delta_is_adjoint": dM.d == cu.r and is_adjoint(M, dM),
        "delta_prime_bases": len(dpM.bases),
        "delta_prime_is_adjoint": dpM.d == cu.r and is_adjoint(M, dpM),
        "adjoints": rep.count,
        "maximal_adjoints": [len(N.bases) for N in maximal],
        "unique_maximal_equals_delta_prime": len(maximal) == 1 and maximal[0] == dpM,
        "delta_prime_below_some_adjoint": any(
            dpM != N and weak_order_leq(dpM, N) for N in rep.adjoints),
    }
    if cu.m <= TABLE_LIMIT:
        chk = valx_check(M, dpM)
        out["valx_submodular"] = chk.submodular
        out["valx_is_delta_prime_rank"] = chk.equals_rank
    return out
