"""Matroid isomorphism by invariant refinement and backtracking."""

from __future__ import annotations

from collections import Counter

import numpy as np

from .bits import iter_bits, mask_of, popcount
from .matroid import Matroid


def _pair_counts(M: Matroid) -> np.ndarray:
    """cnt[e, f] = number of circuits containing both e and f (diag: e alone)."""
    cnt = np.zeros((M.n, M.n), dtype=np.int64)
    for c in M.circuits:
        idx = list(iter_bits(c))
        cnt[np.ix_(idx, idx)] += 1
    return cnt


def _signatures(M: Matroid, cnt: np.ndarray) -> list[tuple]:
    by_size: list[Counter] = [Counter() for _ in range(M.n)]
    for c in M.circuits:
        k = popcount(c)
        for e in iter_bits(c):
            by_size[e][k] += 1
    basis_deg = [int(np.count_nonzero(M.basis_array >> e & 1)) for e in range(M.n)]
    return [
        (basis_deg[e], tuple(sorted(by_size[e].items())), tuple(sorted(cnt[e].tolist())))
        for e in range(M.n)
    ]


def _global_invariant(M: Matroid) -> tuple:
    return (M.n, M.d, len(M.bases), tuple(sorted(Counter(popcount(c) for c in M.circuits).items())))


def is_isomorphic(M1: Matroid, M2: Matroid) -> tuple[int, ...] | None:
    """A permutation ``p`` with ``M2.bases == {p(B) : B in M1.bases}``, or None."""
    if _global_invariant(M1) != _global_invariant(M2):
        return None
    n = M1.n
    cnt1, cnt2 = _pair_counts(M1), _pair_counts(M2)
    sig1, sig2 = _signatures(M1, cnt1), _signatures(M2, cnt2)
    if sorted(sig1) != sorted(sig2):
        return None

    # most constrained elements first
    freq = Counter(sig1)
    order = sorted(range(n), key=lambda e: (freq[sig1[e]], e))
    cands = [[f for f in range(n) if sig2[f] == sig1[e]] for e in order]

    circ2 = M2.circuits.as_set()
    # circuits of M1 that become fully assigned at step k
    pos = {e: k for k, e in enumerate(order)}
    closing: list[list[int]] = [[] for _ in range(n)]
    for c in M1.circuits:
        closing[max(pos[e] for e in iter_bits(c))].append(c)

    image = [-1] * n
    used = [False] * n

    def consistent(k: int) -> bool:
        e = order[k]
        fe = image[e]
        for j in range(k):
            a = order[j]
            if cnt1[e, a] != cnt2[fe, image[a]]:
                return False
        for c in closing[k]:
            if mask_of(image[x] for x in iter_bits(c)) not in circ2:
                return False
        return True

    def search(k: int) -> bool:
        if k == n:
            return True
        e = order[k]
        for f in cands[k]:
            if used[f]:
                continue
            image[e] = f
            used[f] = True
            if consistent(k) and search(k + 1):
                return True
            used[f] = False
        image[e] = -1
        return False

    if not search(0):
        return None
    perm = tuple(image)
    # circuits map injectively into equally many circuits, so this holds;
    # checked anyway since it is cheap
    if M1.bases.map(perm) != M2.bases:
        return None
    return perm


def iso_classes(mats: list[Matroid]) -> list[int]:
    """Class id per matroid; ids are assigned in order of first appearance."""
    reps: list[tuple[int, Matroid]] = []
    out = []
    for M in mats:
        for cid, R in reps:
            if is_isomorphic(M, R) is not None:
                out.append(cid)
                break
        else:
            reps.append((len(reps), M))
            out.append(len(reps) - 1)
    return out
