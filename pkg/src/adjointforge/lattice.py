"""Explicit finite bounded lattices.

Lattices are stored dense: the full order matrix plus join and meet tables.
Every instance this package builds has at most a few thousand elements, so
the O(m^2) memory buys O(1) order and join queries for the NBB machinery.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .bits import iter_bits, members
from .errors import BadRank, FileFormatError, NoBounds, NotALattice, NotGraded, RankTooLarge, RankTooSmall


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


class FiniteLattice:
    """A validated finite bounded graded lattice on elements ``0..m-1``.

    Build instances with :func:`build_lattice` (or the operations below);
    the constructor assumes its inputs were checked.
    """

    def __init__(self, leq, join, meet, rank, labels=None, origin=None):
        self.leq = _frozen(np.asarray(leq, dtype=np.bool_))
        self.join = _frozen(np.asarray(join, dtype=np.int64))
        self.meet = _frozen(np.asarray(meet, dtype=np.int64))
        self.rank = _frozen(np.asarray(rank, dtype=np.int64))
        m = self.leq.shape[0]
        self.bottom = int(np.argmin(self.rank))
        self.top = int(np.argmax(self.rank))
        self.atoms: tuple[int, ...] = tuple(int(i) for i in np.nonzero(self.rank == 1)[0])
        self.atom_pos = {a: k for k, a in enumerate(self.atoms)}
        self.labels = tuple(labels) if labels is not None else tuple(range(m))
        # index of each element in the lattice this one was cut from
        self.origin = tuple(origin) if origin is not None else tuple(range(m))

    # -------------------------------------------------------------- basics

    @property
    def size(self) -> int:
        return self.leq.shape[0]

    def __len__(self) -> int:
        return self.size

    @property
    def height(self) -> int:
        return int(self.rank[self.top])

    @cached_property
    def coatoms(self) -> tuple[int, ...]:
        h = self.height
        return tuple(int(i) for i in np.nonzero(self.rank == h - 1)[0]) if h > 0 else ()

    def le(self, x: int, y: int) -> bool:
        return bool(self.leq[x, y])

    def lt(self, x: int, y: int) -> bool:
        return x != y and bool(self.leq[x, y])

    def join_all(self, elems: Iterable[int]) -> int:
        z = self.bottom
        for e in elems:
            z = int(self.join[z, e])
        return z

    def meet_all(self, elems: Iterable[int]) -> int:
        z = self.top
        for e in elems:
            z = int(self.meet[z, e])
        return z

    @cached_property
    def atom_masks(self) -> np.ndarray:
        """Bitmask over atom positions of the atoms below each element."""
        out = np.zeros(self.size, dtype=np.int64)
        for k, a in enumerate(self.atoms):
            out[self.leq[a]] |= np.int64(1) << k
        return _frozen(out)

    def atoms_below(self, x: int) -> int:
        return int(self.atom_masks[x])

    def join_atoms(self, atom_set: int) -> int:
        """Join of the atoms whose positions are set in ``atom_set``."""
        z = self.bottom
        for k in iter_bits(atom_set):
            z = int(self.join[z, self.atoms[k]])
        return z

    def atom_rank(self, atom_set: int) -> int:
        return int(self.rank[self.join_atoms(atom_set)])

    @cached_property
    def is_atomic(self) -> bool:
        return all(self.join_atoms(self.atoms_below(x)) == x for x in range(self.size))

    @cached_property
    def is_coatomic(self) -> bool:
        co = np.array(self.coatoms, dtype=np.int64)
        for x in range(self.size):
            above = co[self.leq[x, co]] if co.size else co
            if self.meet_all(above.tolist()) != x:
                return False
        return True

    def is_semimodular(self) -> bool:
        """rank(x) + rank(y) >= rank(x v y) + rank(x ^ y) for all pairs."""
        r = self.rank
        return bool(np.all(r[:, None] + r[None, :] >= r[self.join] + r[self.meet]))

    def is_modular(self) -> bool:
        r = self.rank
        return bool(np.all(r[:, None] + r[None, :] == r[self.join] + r[self.meet]))

    def is_geometric(self) -> bool:
        return self.is_atomic and self.is_semimodular()

    def covers(self) -> list[tuple[int, int]]:
        lt = self.leq & ~np.eye(self.size, dtype=np.bool_)
        cov = _cover_matrix(lt)
        xs, ys = np.nonzero(cov)
        return list(zip(xs.tolist(), ys.tolist()))

    def index_of(self, label) -> int:
        return self.labels.index(label)

    def __repr__(self) -> str:
        return f"FiniteLattice(size={self.size}, rank={self.height}, atoms={len(self.atoms)})"

    # ------------------------------------------------------- serialisation

    def canonical_order(self) -> list[int]:
        """Elements sorted by rank, then atom support, then index."""
        return sorted(range(self.size), key=lambda x: (int(self.rank[x]), members(self.atoms_below(x)), x))

    def to_json(self) -> dict:
        order = self.canonical_order()
        pos = {x: i for i, x in enumerate(order)}
        lt = self.leq & ~np.eye(self.size, dtype=np.bool_)
        cov = _cover_matrix(lt)
        pairs = sorted((pos[int(x)], pos[int(y)]) for x, y in zip(*np.nonzero(cov)))
        return {"elements": self.size, "leq_pairs": [list(p) for p in pairs]}


def _cover_matrix(lt: np.ndarray) -> np.ndarray:
    f = lt.astype(np.float32)
    between = (f @ f) > 0
    return lt & ~between


def _transitive_closure(rel: np.ndarray) -> np.ndarray:
    out = rel.copy()
    for k in range(out.shape[0]):
        out |= out[:, k:k + 1] & out[k:k + 1, :]
    return out


def build_lattice(leq, labels: Sequence | None = None, origin: Sequence | None = None) -> FiniteLattice:
    """Validate a partial order and derive joins, meets and ranks.

    ``leq`` is an ``m x m`` boolean array with ``leq[x, y]`` meaning x <= y.
    It is closed reflexively and transitively first, so a cover relation is
    accepted as well.
    """
    rel = np.array(leq, dtype=np.bool_)
    if rel.ndim != 2 or rel.shape[0] != rel.shape[1] or rel.shape[0] == 0:
        raise NotALattice("order relation must be a nonempty square matrix")
    m = rel.shape[0]
    rel |= np.eye(m, dtype=np.bool_)
    rel = _transitive_closure(rel)
    if np.any(rel & rel.T & ~np.eye(m, dtype=np.bool_)):
        raise NotALattice("relation is not antisymmetric")

    below_all = np.nonzero(rel.all(axis=1))[0]
    above_all = np.nonzero(rel.all(axis=0))[0]
    if below_all.size != 1 or above_all.size != 1:
        raise NoBounds("no unique minimum and maximum")

    order = np.argsort(rel.sum(axis=0), kind="stable")  # down-set size is a linear extension
    join, x, y = kernels.join_table(rel, order)
    if x >= 0:
        raise NotALattice(f"elements {x} and {y} have no unique join")
    meet, x, y = kernels.join_table(np.ascontiguousarray(rel.T), order[::-1].copy())
    if x >= 0:
        raise NotALattice(f"elements {x} and {y} have no unique meet")

    lt = rel & ~np.eye(m, dtype=np.bool_)
    cov = _cover_matrix(lt)
    rank = np.zeros(m, dtype=np.int64)
    for z in order:
        preds = np.nonzero(cov[:, z])[0]
        if preds.size:
            rank[z] = rank[preds].max() + 1
    xs, ys = np.nonzero(cov)
    jumps = rank[ys] - rank[xs]
    if np.any(jumps != 1):
        k = int(np.argmax(jumps != 1))
        raise NotGraded(f"cover {int(xs[k])} < {int(ys[k])} jumps rank by {int(jumps[k])}")
    return FiniteLattice(rel, join, meet, rank, labels, origin)


def lattice_from_pairs(m: int, pairs: Iterable[Sequence[int]], labels=None) -> FiniteLattice:
    rel = np.zeros((m, m), dtype=np.bool_)
    for pair in pairs:
        i, j = int(pair[0]), int(pair[1])
        if not (0 <= i < m and 0 <= j < m):
            raise FileFormatError(f"pair {pair} out of range")
        rel[i, j] = True
    return build_lattice(rel, labels)


def lattice_from_json(obj: dict) -> FiniteLattice:
    try:
        m = int(obj["elements"])
        pairs = obj["leq_pairs"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FileFormatError(f"bad lattice json: {exc}") from exc
    return lattice_from_pairs(m, pairs)


def load_lattice(path) -> FiniteLattice:
    with open(path) as fh:
        return lattice_from_json(json.load(fh))


def _induced(L: FiniteLattice, keep: Sequence[int]) -> FiniteLattice:
    keep = list(keep)
    sub = L.leq[np.ix_(keep, keep)]
    return build_lattice(sub, [L.labels[i] for i in keep], keep)


# ---------------------------------------------------------- lattice operations


def restrict(L: FiniteLattice, x: int) -> FiniteLattice:
    """The interval [bottom, x]."""
    if L.rank[x] < 1:
        raise RankTooSmall("restriction needs an element of rank >= 1")
    keep = np.nonzero(L.leq[:, x])[0]
    return _induced(L, keep)


def contract(L: FiniteLattice, x: int) -> FiniteLattice:
    """The interval [x, top]; graded, not necessarily atomic."""
    if L.rank[x] > L.height - 1:
        raise RankTooLarge("contraction needs rank(x) <= rank(L) - 1")
    keep = np.nonzero(L.leq[x, :])[0]
    return _induced(L, keep)


def truncate(L: FiniteLattice, m: int) -> FiniteLattice:
    """Elements of rank below ``m`` plus the top."""
    if not 1 <= m <= L.height:
        raise BadRank(f"truncation rank must lie in 1..{L.height}")
    keep = [x for x in range(L.size) if L.rank[x] < m or x == L.top]
    return _induced(L, keep)


def dual_lattice(L: FiniteLattice) -> FiniteLattice:
    rank = L.height - L.rank
    return FiniteLattice(L.leq.T.copy(), L.meet.copy(), L.join.copy(), rank, L.labels, L.origin)


def interval_elements(L: FiniteLattice, lo: int, hi: int) -> list[int]:
    return [z for z in range(L.size) if L.leq[lo, z] and L.leq[z, hi]]


def lattice_of_flats(M) -> FiniteLattice:
    """Flats of ``M`` ordered by inclusion; labels are the flat bitmasks."""
    flats = sorted(M.flats, key=lambda f: (M.rank(f), members(f)))
    arr = np.array(flats, dtype=np.int64)
    rel = (arr[:, None] & arr[None, :]) == arr[:, None]
    return build_lattice(rel, flats)


@dataclass(frozen=True)
class LatticeElementMap:
    """Element-wise map between two lattices."""

    source: FiniteLattice
    target: FiniteLattice
    image: tuple[int, ...]

    def __post_init__(self):
        if len(self.image) != self.source.size:
            raise ValueError("image must be defined on every source element")

    def __call__(self, x: int) -> int:
        return self.image[x]

    def is_injective(self) -> bool:
        return len(set(self.image)) == len(self.image)

    def is_rank_preserving(self) -> bool:
        return all(self.source.rank[x] == self.target.rank[y] for x, y in enumerate(self.image))

    def is_order_embedding(self) -> bool:
        img = np.array(self.image)
        return bool(np.array_equal(self.source.leq, self.target.leq[np.ix_(img, img)]))
