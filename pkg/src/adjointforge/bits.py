"""Bitset helpers and the canonical ``SetFamily`` container.

Subsets of a universe ``{0, ..., n-1}`` are python ints (bit ``i`` set iff
``i`` is a member). Families are stored sorted by integer value, which is the
canonical order used for serialisation and report ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator

import numpy as np


def mask_of(items: Iterable[int]) -> int:
    m = 0
    for i in items:
        m |= 1 << int(i)
    return m


def members(mask: int) -> list[int]:
    """Indices of the set bits of ``mask`` in increasing order."""
    out = []
    i = 0
    mask = int(mask)
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def iter_bits(mask: int) -> Iterator[int]:
    mask = int(mask)
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return int(mask).bit_count()


def full_mask(n: int) -> int:
    return (1 << n) - 1


def subsets_of(mask: int) -> Iterator[int]:
    """All subsets of ``mask``, including 0 and ``mask`` itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def k_subsets(n: int, k: int) -> Iterator[int]:
    for combo in combinations(range(n), k):
        yield mask_of(combo)


def fmt_set(mask: int, one_based: bool = False) -> str:
    off = 1 if one_based else 0
    return "{" + ",".join(str(i + off) for i in members(mask)) + "}"


def as_int64(masks: Iterable[int]) -> np.ndarray:
    return np.fromiter((int(m) for m in masks), dtype=np.int64)


@dataclass(frozen=True)
class SetFamily:
    """A duplicate-free family of subsets of ``range(universe)``."""

    universe: int
    sets: tuple[int, ...]

    def __post_init__(self):
        canon = tuple(sorted(set(int(s) for s in self.sets)))
        limit = 1 << self.universe
        if canon and (canon[0] < 0 or canon[-1] >= limit):
            raise ValueError("set outside universe")
        object.__setattr__(self, "sets", canon)
        object.__setattr__(self, "_lookup", frozenset(canon))

    @classmethod
    def from_lists(cls, universe: int, lists: Iterable[Iterable[int]]) -> "SetFamily":
        return cls(universe, tuple(mask_of(s) for s in lists))

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self) -> Iterator[int]:
        return iter(self.sets)

    def __contains__(self, mask) -> bool:
        if not isinstance(mask, (int, np.integer)):
            mask = mask_of(mask)
        return int(mask) in self._lookup

    def as_set(self) -> frozenset:
        return self._lookup

    def as_lists(self) -> list[list[int]]:
        return [members(s) for s in self.sets]

    def sizes(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for s in self.sets:
            k = popcount(s)
            out[k] = out.get(k, 0) + 1
        return dict(sorted(out.items()))

    def of_size(self, k: int) -> "SetFamily":
        return SetFamily(self.universe, tuple(s for s in self.sets if popcount(s) == k))

    def minimal(self) -> "SetFamily":
        """Members containing no other member."""
        by_size = sorted(self.sets, key=popcount)
        kept: list[int] = []
        for s in by_size:
            if not any(k & s == k for k in kept):
                kept.append(s)
        return SetFamily(self.universe, tuple(kept))

    def maximal(self) -> "SetFamily":
        by_size = sorted(self.sets, key=popcount, reverse=True)
        kept: list[int] = []
        for s in by_size:
            if not any(k & s == s for k in kept):
                kept.append(s)
        return SetFamily(self.universe, tuple(kept))

    def is_antichain(self) -> bool:
        return len(self.minimal()) == len(self)

    def is_downward_closed(self) -> bool:
        look = self._lookup
        for s in self.sets:
            for i in iter_bits(s):
                if s & ~(1 << i) not in look:
                    return False
        return True

    def down_closure(self) -> "SetFamily":
        out = set()
        for s in self.sets:
            if s in out:
                continue
            out.update(subsets_of(s))
        return SetFamily(self.universe, tuple(out))

    def map(self, perm) -> "SetFamily":
        """Image under an element relabelling ``i -> perm[i]``."""
        return SetFamily(self.universe, tuple(mask_of(perm[i] for i in iter_bits(s)) for s in self.sets))

    def to_json(self) -> dict:
        return {"universe": self.universe, "sets": self.as_lists()}

    @classmethod
    def from_json(cls, obj: dict) -> "SetFamily":
        return cls.from_lists(int(obj["universe"]), obj["sets"])

    def __repr__(self) -> str:
        shown = ", ".join(fmt_set(s) for s in self.sets[:8])
        more = ", ..." if len(self.sets) > 8 else ""
        return f"SetFamily(universe={self.universe}, [{shown}{more}])"
