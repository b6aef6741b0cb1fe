"""Builders shared by the test modules."""

from __future__ import annotations

import random
from itertools import combinations

import numpy as np

from adjointforge.bits import mask_of, members
from adjointforge.errors import LatticeError
from adjointforge.gfp import GFMatrix
from adjointforge.lattice import FiniteLattice, build_lattice, lattice_of_flats
from adjointforge.matroid import Matroid, from_matrix, uniform

# flats removed from flats(U(4,6)) in the worked non-geometric example,
# written 1-based as in the usual presentation
REMOVED_FLATS = ([1, 2, 3], [1, 2, 4], [1, 2, 6], [1, 3, 4], [1, 3, 6])


def boolean_lattice(n: int) -> FiniteLattice:
    sets = list(range(1 << n))
    arr = np.array(sets)
    return build_lattice((arr[:, None] & arr[None, :]) == arr[:, None], sets)


def pentagon_leq() -> np.ndarray:
    # 0 < a < b < 1 and 0 < c < 1
    rel = np.zeros((5, 5), dtype=bool)
    for x, y in [(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)]:
        rel[x, y] = True
    return rel


def lattice_from_masks(masks) -> FiniteLattice:
    masks = sorted(masks, key=lambda f: (bin(f).count("1"), members(f)))
    arr = np.array(masks, dtype=np.int64)
    return build_lattice((arr[:, None] & arr[None, :]) == arr[:, None], masks)


def worked_example() -> FiniteLattice:
    """flats(U(4,6)) minus the five rank-3 flats; atoms 0..5 are elements 1..6."""
    U = uniform(4, 6)
    drop = {mask_of(e - 1 for e in f) for f in REMOVED_FLATS}
    return lattice_from_masks([f for f in U.flats if f not in drop])


def element_of(L: FiniteLattice, mask: int) -> int:
    return L.labels.index(mask)


def random_simple_matroid(rng: random.Random, n_max: int = 8) -> Matroid:
    """Column matroid of pairwise non-parallel nonzero vectors over GF(2) or GF(3)."""
    while True:
        p = rng.choice([2, 3])
        r = rng.randint(2, 4)
        pool = [v for v in np.ndindex(*(p,) * r) if any(v)]
        # one representative per projective point
        reps = {}
        for v in pool:
            lead = next(x for x in v if x)
            inv = pow(lead, p - 2, p)
            reps.setdefault(tuple((x * inv) % p for x in v), v)
        points = list(reps)
        n = rng.randint(r, min(n_max, len(points)))
        cols = rng.sample(points, n)
        A = GFMatrix(p, [list(row) for row in zip(*cols)])
        M = from_matrix(A)
        if M.d >= 1:
            return M


def random_atomic_lattice(rng: random.Random, M: Matroid, tries: int = 50) -> FiniteLattice | None:
    """Drop random mid-rank flats of ``M``; keep results that are atomic
    graded lattices with every element of ``M`` still an atom."""
    flats = list(M.flats)
    mids = [f for f in flats if 2 <= M.rank(f) < M.d]
    if not mids:
        return None
    for _ in range(tries):
        drop = set(rng.sample(mids, rng.randint(1, max(1, len(mids) // 3))))
        try:
            L = lattice_from_masks([f for f in flats if f not in drop])
        except LatticeError:
            continue
        if L.is_atomic and len(L.atoms) == M.n:
            return L
    return None


def small_lattice_pool(seed: int, count: int) -> list[FiniteLattice]:
    rng = random.Random(seed)
    bases = [uniform(4, 6), uniform(3, 5), uniform(4, 5), uniform(3, 6)]
    out = []
    while len(out) < count:
        L = random_atomic_lattice(rng, rng.choice(bases))
        if L is not None:
            out.append(L)
    return out


def all_k_subsets(n: int, k: int) -> list[int]:
    return [mask_of(c) for c in combinations(range(n), k)]


# matroids with at most 12 circuits and a nontrivial adjoint space
SMALL_CIRCUIT_NAMES = ("U(2,4)", "U(3,5)", "U(2,5)", "U(4,6)", "K4", "Q6", "R6")


def random_matroid_rank(rng: random.Random, n: int, r: int) -> Matroid | None:
    """Column matroid of a random r x n matrix over GF(2) or GF(3), if of rank r."""
    p = rng.choice([2, 3])
    A = GFMatrix(p, [[rng.randrange(p) for _ in range(n)] for _ in range(r)])
    M = from_matrix(A)
    return M if M.d == r else None


def perturbed(rng: random.Random, N: Matroid, tries: int = 30) -> Matroid | None:
    """``N`` with one r-set toggled, when the result is still a matroid."""
    from adjointforge.errors import MatroidError
    from adjointforge.matroid import from_bases

    rsets = [mask_of(c) for c in combinations(range(N.n), N.d)]
    for _ in range(tries):
        s = rng.choice(rsets)
        bases = set(N.bases.sets) ^ {s}
        if not bases:
            continue
        try:
            return from_bases(N.n, bases)
        except MatroidError:
            continue
    return None


def adjoint_candidates(rng: random.Random, M: Matroid, adjoints: list[Matroid]) -> Matroid:
    """One candidate N on the circuits of ``M``: a true adjoint, a one-set
    perturbation of one, or an unrelated matroid of the right size."""
    from adjointforge.adjoint import universe

    cu = universe(M)
    while True:
        kind = rng.random()
        if kind < 0.3 and adjoints:
            return rng.choice(adjoints)
        if kind < 0.7 and adjoints:
            N = perturbed(rng, rng.choice(adjoints))
        elif kind < 0.8:
            N = uniform(max(0, min(cu.m, cu.r + rng.choice([-1, 0, 1]))), cu.m)
        else:
            N = random_matroid_rank(rng, cu.m, cu.r)
        if N is not None:
            return N


def random_small_instance(rng: random.Random, max_circuits: int = 12) -> Matroid:
    from adjointforge.catalog import catalog

    while True:
        if rng.random() < 0.5:
            M = catalog(rng.choice(SMALL_CIRCUIT_NAMES))
        else:
            M = random_simple_matroid(rng, 7)
        if 2 <= len(M.circuits) <= max_circuits and M.corank >= 1:
            return M
