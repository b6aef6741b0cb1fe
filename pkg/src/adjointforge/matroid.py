"""Matroids stored by their basis family, plus GF(p) linear matroids."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

import numpy as np

from . import kernels
from .bits import SetFamily, as_int64, full_mask, iter_bits, mask_of, members, popcount
from .errors import (
    ElementInBasis,
    EmptyFamily,
    ExchangeAxiomViolated,
    GroundSetMismatch,
    NoCircuits,
    NotABasis,
    NotACircuit,
    UnequalSizes,
)
from .gfp import GFMatrix, nullspace_mod_p

# ground sets up to this size get dense 2^n tables
TABLE_LIMIT = 20


def _as_mask(S) -> int:
    if S is None:
        return -1
    if isinstance(S, (int, np.integer)):
        return int(S)
    return mask_of(S)


class _Lazy:
    """cached_property with a single-writer lock."""

    def __init__(self, func):
        self.func = func
        self.name = func.__name__
        self.__doc__ = func.__doc__

    def __set_name__(self, owner, name):
        self.name = name

    def __get__(self, obj, owner=None):
        if obj is None:
            return self
        cache = obj.__dict__
        if self.name in cache:
            return cache[self.name]
        with obj._lock:
            if self.name not in cache:
                cache[self.name] = self.func(obj)
        return cache[self.name]


class Matroid:
    """A matroid on ``range(n)`` given by its bases.

    Use :func:`from_bases` to validate an arbitrary family; the constructor
    trusts its input.
    """

    def __init__(self, n: int, bases: Iterable[int]):
        self.n = int(n)
        fam = bases if isinstance(bases, SetFamily) else SetFamily(self.n, tuple(bases))
        self.bases = fam
        self.basis_array = as_int64(fam.sets)
        self.basis_array.setflags(write=False)
        self.d = popcount(fam.sets[0]) if fam.sets else 0
        self._lock = threading.RLock()

    # ------------------------------------------------------------- basics

    @property
    def ground(self) -> int:
        return full_mask(self.n)

    @property
    def corank(self) -> int:
        return self.n - self.d

    def __eq__(self, other) -> bool:
        return isinstance(other, Matroid) and self.n == other.n and self.bases == other.bases

    def __hash__(self) -> int:
        return hash((self.n, self.bases.sets))

    def __repr__(self) -> str:
        return f"Matroid(n={self.n}, rank={self.d}, bases={len(self.bases)})"

    def to_json(self) -> dict:
        return {"n": self.n, "bases": self.bases.as_lists()}

    @_Lazy
    def rank_table(self) -> np.ndarray | None:
        if self.n > TABLE_LIMIT:
            return None
        return kernels.rank_table_from_bases(self.basis_array, self.n)

    def rank(self, S=None) -> int:
        """Rank of ``S`` (a mask or iterable); the matroid rank when omitted."""
        if S is None:
            return self.d
        s = _as_mask(S)
        table = self.rank_table
        if table is not None:
            return int(table[s])
        return int(np.bitwise_count(self.basis_array & s).max())

    def nullity(self, S) -> int:
        s = _as_mask(S)
        return popcount(s) - self.rank(s)

    def is_independent(self, S) -> bool:
        s = _as_mask(S)
        return self.rank(s) == popcount(s)

    def is_basis(self, S) -> bool:
        return _as_mask(S) in self.bases

    def closure(self, S) -> int:
        s = _as_mask(S)
        r = self.rank(s)
        out = s
        for e in range(self.n):
            if not s >> e & 1 and self.rank(s | 1 << e) == r:
                out |= 1 << e
        return out

    def is_loop(self, e: int) -> bool:
        return not np.any(self.basis_array >> e & 1)

    def is_coloop(self, e: int) -> bool:
        return bool(np.all(self.basis_array >> e & 1))

    # -------------------------------------------------------------- families

    @_Lazy
    def independents(self) -> SetFamily:
        if self.n <= TABLE_LIMIT:
            table = self.rank_table
            idx = np.nonzero(table == kernels.popcount_table(self.n))[0]
            return SetFamily(self.n, tuple(idx.tolist()))
        return self.bases.down_closure()

    @_Lazy
    def circuits(self) -> SetFamily:
        """Minimal dependent sets, found by increasing size."""
        if self.n <= TABLE_LIMIT:
            table = self.rank_table
            sizes = kernels.popcount_table(self.n)
            dep = table < sizes
            circ = dep.copy()
            all_sets = np.arange(1 << self.n, dtype=np.int64)
            for i in range(self.n):
                has = (all_sets >> i & 1).astype(np.bool_)
                circ &= ~has | ~dep[all_sets ^ (1 << i)]
            return SetFamily(self.n, tuple(np.nonzero(circ)[0].tolist()))
        found: list[int] = []
        for k in range(1, self.d + 2):
            cand = kernels.k_subsets(self.n, k)
            if found:
                fa = as_int64(found)
                cand = cand[~np.any((cand[:, None] & fa[None, :]) == fa[None, :], axis=1)]
            for s in cand.tolist():
                if not self.is_independent(s):
                    found.append(s)
        return SetFamily(self.n, tuple(found))

    @_Lazy
    def flats(self) -> SetFamily:
        if self.n <= TABLE_LIMIT:
            table = self.rank_table
            all_sets = np.arange(1 << self.n, dtype=np.int64)
            closed = np.ones(1 << self.n, dtype=np.bool_)
            for i in range(self.n):
                has = (all_sets >> i & 1).astype(np.bool_)
                closed &= has | (table[all_sets | (1 << i)] > table)
            return SetFamily(self.n, tuple(np.nonzero(closed)[0].tolist()))
        out = {self.closure(s) for s in self.independents}
        return SetFamily(self.n, tuple(out))

    @_Lazy
    def hyperplanes(self) -> SetFamily:
        return SetFamily(self.n, tuple(f for f in self.flats if self.rank(f) == self.d - 1))

    @_Lazy
    def dual(self) -> "Matroid":
        g = self.ground
        dm = Matroid(self.n, tuple(g ^ b for b in self.bases))
        dm.__dict__["dual"] = self
        return dm

    def fundamental_circuit(self, B, e: int) -> int:
        b = _as_mask(B)
        if b not in self.bases:
            raise NotABasis(f"{members(b)} is not a basis")
        if b >> e & 1:
            raise ElementInBasis(f"element {e} lies in the basis")
        out = 1 << e
        for x in iter_bits(b):
            if (b ^ (1 << x) | (1 << e)) in self.bases:
                out |= 1 << x
        return out

    def restrict_to(self, keep: Iterable[int]) -> "Matroid":
        """Deletion of every element outside ``keep``; elements renumbered."""
        keep = list(keep)
        kmask = mask_of(keep)
        r = self.rank(kmask)
        pos = {e: i for i, e in enumerate(keep)}
        out = {mask_of(pos[x] for x in iter_bits(b & kmask)) for b in self.bases if popcount(b & kmask) == r}
        return Matroid(len(keep), tuple(out))

    def relabel(self, perm) -> "Matroid":
        return Matroid(self.n, self.bases.map(perm))


def from_bases(n: int, bases: Iterable) -> Matroid:
    """Validate a basis family (masks or iterables) and build the matroid."""
    masks = sorted({_as_mask(b) for b in bases})
    if not masks:
        raise EmptyFamily("a matroid needs at least one basis")
    if masks[0] < 0 or masks[-1] >= 1 << n:
        raise ValueError("basis outside the ground set")
    sizes = {popcount(b) for b in masks}
    if len(sizes) != 1:
        raise UnequalSizes(f"bases have sizes {sorted(sizes)}")
    arr = as_int64(masks)
    i, j, x = kernels.exchange_violation(arr)
    if i >= 0:
        raise ExchangeAxiomViolated(
            f"no exchange for {members(masks[i])} - {members(int(x))} against {members(masks[j])}"
        )
    return Matroid(n, masks)


def from_matrix(A: GFMatrix) -> Matroid:
    n = A.ncols
    r = A.rank()
    if r == 0:
        return Matroid(n, (0,))
    bases = [mask_of(c) for c in combinations(range(n), r) if A.rank(c) == r]
    return Matroid(n, bases)


@dataclass(frozen=True)
class CircuitVector:
    circuit: int
    coeffs: tuple[int, ...]
    p: int


def circuit_vector(A: GFMatrix, C) -> CircuitVector:
    """The dependency among the columns of ``C``, first nonzero entry 1."""
    c = _as_mask(C)
    idx = members(c)
    if not idx:
        raise NotACircuit("empty set")
    sub = A.columns(idx)
    kern = nullspace_mod_p(sub, A.p)
    if kern.shape[0] != 1 or np.any(kern[0] == 0):
        raise NotACircuit(f"{idx} is not a circuit")
    v = kern[0]
    v = (v * pow(int(v[0]), A.p - 2, A.p)) % A.p
    full = [0] * A.ncols
    for i, e in enumerate(idx):
        full[e] = int(v[i])
    return CircuitVector(c, tuple(full), A.p)


def linear_derived_matroid(A: GFMatrix) -> Matroid:
    """Matroid on the circuits of ``A`` represented by their circuit vectors."""
    M = from_matrix(A)
    circ = M.circuits.sets
    if not circ:
        raise NoCircuits("matroid has no circuits")
    cols = np.array([circuit_vector(A, c).coeffs for c in circ], dtype=np.int64).T
    return from_matrix(GFMatrix(A.p, cols))


def weak_order_leq(M1: Matroid, M2: Matroid) -> bool:
    if M1.n != M2.n:
        raise GroundSetMismatch(f"ground sets differ: {M1.n} vs {M2.n}")
    return M1.bases.as_set() <= M2.bases.as_set()


def uniform(k: int, n: int) -> Matroid:
    if not 0 <= k <= n:
        raise ValueError(f"U({k},{n}) needs 0 <= k <= n")
    return Matroid(n, tuple(mask_of(c) for c in combinations(range(n), k)))


def graphic(num_vertices: int, edges: list[tuple[int, int]]) -> Matroid:
    """Cycle matroid; bases are the spanning forests of maximal size."""

    def acyclic(sel):
        parent = list(range(num_vertices))

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for k in sel:
            a, b = find(edges[k][0]), find(edges[k][1])
            if a == b:
                return False
            parent[a] = b
        return True

    n = len(edges)
    for r in range(min(n, num_vertices - 1), -1, -1):
        bases = [mask_of(c) for c in combinations(range(n), r) if acyclic(c)]
        if bases:
            return Matroid(n, bases)
    return Matroid(n, (0,))


def rank3_from_lines(n: int, lines: Iterable[Iterable[int]]) -> Matroid:
    """Simple rank-3 matroid whose only dependent triples lie on ``lines``."""
    lines = [mask_of(ln) for ln in lines]
    bases = [m for m in (mask_of(c) for c in combinations(range(n), 3))
             if not any(m & ln == m for ln in lines)]
    return from_bases(n, bases)
