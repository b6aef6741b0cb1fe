"""Acceptance criteria, one test per criterion (two where a criterion
has a part that does not reproduce). Each records a PASS/FAIL line that
is printed in the terminal summary."""

import random
import time
from contextlib import contextmanager
from itertools import combinations

import numpy as np
import pytest
from helpers import (
    adjoint_candidates,
    element_of,
    random_simple_matroid,
    random_small_instance,
    small_lattice_pool,
    worked_example,
)

from adjointforge.adjoint import adjoint_routes, enumerate_adjoints, is_adjoint, lopp_independents, universe
from adjointforge.bits import members, popcount
from adjointforge.catalog import MATRIX_A, NAMES, catalog
from adjointforge.derived import derived_matroid, valx_bound_violation, valx_check
from adjointforge.iso import is_isomorphic
from adjointforge.lattice import contract, dual_lattice, lattice_of_flats
from adjointforge.matroid import Matroid, from_bases, linear_derived_matroid, uniform, weak_order_leq
from adjointforge.nbb import (
    as_dual_atoms,
    check_matroid,
    independence_family,
    lattice_bases,
    opp_basis,
    verify_lattice_op_families,
)

RESULTS: list[tuple[str, bool, str]] = []

CATALOG = [n for n in NAMES if n != "U(k,n)"]
CORANK3 = ["K4", "FanoDual", "NonFanoDual", "MatrixADual", "Q6", "R6", "P6"]


@contextmanager
def criterion(label: str, title: str, limit: float | None = None):
    t0 = time.perf_counter()
    try:
        yield
        took = time.perf_counter() - t0
        if limit is not None:
            assert took < limit, f"took {took:.1f}s, limit {limit}s"
    except BaseException as exc:
        RESULTS.append((label, False, f"{title}: {exc}".splitlines()[0][:200]))
        raise
    RESULTS.append((label, True, f"{title} ({time.perf_counter() - t0:.2f}s)"))


def histogram(rep):
    return rep.histogram


def is_simple(M: Matroid) -> bool:
    return all(popcount(c) >= 3 for c in M.circuits)


@pytest.fixture(autouse=True)
def _warm(warm_kernels):
    return warm_kernels


def test_criterion_01_k4():
    with criterion("1", "K4 has a Fano and a non-Fano adjoint", 10):
        rep = enumerate_adjoints(catalog("K4"))
        assert rep.count == 2 and rep.complete
        small, big = rep.adjoints
        assert len(small.bases) == 28 and is_isomorphic(small, catalog("Fano")) is not None
        assert len(big.bases) == 29 and is_isomorphic(big, catalog("NonFano")) is not None


def test_criterion_02_fano_dual():
    with criterion("2", "Fano dual has one adjoint, the Fano matroid", 10):
        rep = enumerate_adjoints(catalog("FanoDual"))
        assert rep.count == 1 and rep.complete
        assert is_isomorphic(rep.adjoints[0], catalog("Fano")) is not None


def test_criterion_03_nonfano_dual():
    with criterion("3", "non-Fano dual has one adjoint, the ternary Dowling plane", 30):
        rep = enumerate_adjoints(catalog("NonFanoDual"))
        assert rep.count == 1 and rep.complete
        assert is_isomorphic(rep.adjoints[0], catalog("TernaryDowling3")) is not None


def test_criterion_04_q6():
    with criterion("4", "Q6 has adjoints with 136, 137, 137, 138 bases", 120):
        rep = enumerate_adjoints(catalog("Q6"))
        assert rep.count == 4 and rep.complete
        assert sorted(rep.basis_counts) == [136, 137, 137, 138]
        a, b = [N for N in rep.adjoints if len(N.bases) == 137]
        assert is_isomorphic(a, b) is not None


LEVELS = [1, 6, 15, 20, 15, 6, 1]
EXPECTED_SPLITS = [[1], [6], [9, 6], [12, 8], [9, 6], [6], [1]]


_HISTOGRAM_OK: dict[str, bool] = {}


def _histogram_part(name, low, limit):
    """Counts and histogram; recorded together with the split part."""
    t0 = time.perf_counter()
    _HISTOGRAM_OK[name] = False
    rep = enumerate_adjoints(catalog(name))
    assert rep.count == 64 and rep.complete
    assert histogram(rep) == {low + i: c for i, c in enumerate(LEVELS)}
    assert time.perf_counter() - t0 < limit
    _HISTOGRAM_OK[name] = True


def _split_part(name, low, limit, label):
    title = f"{name}: 64 adjoints, histogram {low}..{low + 6}, isomorphism splits as expected"
    with criterion(label, title, limit):
        assert _HISTOGRAM_OK.get(name), "histogram part failed"
        splits = enumerate_adjoints(catalog(name)).class_splits()
        want = {low + i: s for i, s in enumerate(EXPECTED_SPLITS)}
        assert splits == want, f"histogram matches; computed splits {splits}"


def test_criterion_05_r6():
    _histogram_part("R6", 135, 600)


@pytest.mark.xfail(strict=True, reason="the middle level splits 18 + 2, not 12 + 8")
def test_criterion_05_r6_splits():
    _split_part("R6", 135, 600, "5")


def test_criterion_06_p6():
    _histogram_part("P6", 238, 600)


@pytest.mark.xfail(strict=True, reason="the middle level splits 18 + 2, not 12 + 8")
def test_criterion_06_p6_splits():
    _split_part("P6", 238, 600, "6")


def test_criterion_07_matrix_a():
    with criterion("7", "matrix A: linear derived has 304 bases, adjoints 304 and 318", 600):
        D = linear_derived_matroid(MATRIX_A)
        assert len(D.bases) == 304
        rep = enumerate_adjoints(catalog("MatrixA"))
        assert rep.count == 2 and rep.complete
        low, high = rep.adjoints
        assert (len(low.bases), len(high.bases)) == (304, 318)
        assert low == D
        assert weak_order_leq(low, high) and not weak_order_leq(high, low)


def test_criterion_08_matrix_a_dual():
    with criterion("8", "matrix A dual has a Fano and a non-Fano adjoint", 120):
        rep = enumerate_adjoints(catalog("MatrixADual"))
        assert rep.count == 2 and rep.complete
        small, big = rep.adjoints
        assert is_isomorphic(small, catalog("Fano")) is not None
        assert is_isomorphic(big, catalog("NonFano")) is not None


def test_criterion_09_ag32():
    with criterion("9", "AG(3,2): I((L*)^opp) is a rank 4 adjoint with 616 bases"):
        M = catalog("AG32")
        fam = lopp_independents(M)
        assert check_matroid(fam)
        top = fam.maximal()
        N = from_bases(fam.universe, top)
        assert (N.n, N.d, len(N.bases)) == (14, 4, 616)
        assert is_adjoint(M, N)
        # the full search is small enough to finish here as well
        rep = enumerate_adjoints(M, classify=False)
        assert rep.complete and rep.count == 1 and rep.adjoints[0] == N


def test_criterion_10_cryptomorphism():
    with criterion("10", "NBB independents of flats equal matroid independents"):
        mats = [catalog(n) for n in CATALOG if catalog(n).n <= 7]
        mats += [uniform(k, n) for n in range(2, 8) for k in range(2, n + 1)]
        mats = [M for M in mats if is_simple(M)]
        assert len(mats) >= 25
        rng = random.Random(1010)
        mats += [random_simple_matroid(rng, 7) for _ in range(50)]
        for M in mats:
            assert independence_family(lattice_of_flats(M)) == M.independents, M


def test_criterion_11_worked_example():
    with criterion("11", "worked example: I(L) = I(U(4,6)); contraction misses 234, 236"):
        L = worked_example()
        fam = independence_family(L)
        assert fam == uniform(4, 6).independents
        C = contract(L, element_of(L, 0b1))
        cfam = independence_family(C)
        assert not check_matroid(cfam)
        label = [max(members(C.labels[a])) + 1 for a in C.atoms]
        got = {frozenset(label[k] for k in members(s)) for s in cfam}
        full = {frozenset(c) for k in range(4) for c in combinations(range(2, 7), k)}
        assert got <= full
        assert sorted(sorted(s) for s in full - got) == [[2, 3, 4], [2, 3, 6]]


def test_criterion_12_lattice_ops():
    with criterion("12", "restriction, truncation, contraction and opp-basis identities"):
        lattices = [lattice_of_flats(catalog(n)) for n in CATALOG]
        lattices += [lattice_of_flats(uniform(k, n)) for n, k in [(4, 2), (5, 3), (6, 4), (6, 3)]]
        for L in lattices:
            for x in range(L.size):
                if L.rank[x] >= 1:
                    assert verify_lattice_op_families(L, "restrict", x)
            for m in range(2, L.height + 1):
                assert verify_lattice_op_families(L, "truncate", m)

        we = worked_example()
        randoms = small_lattice_pool(1212, 20)
        for L in [we] + randoms:
            for x in range(L.size):
                if 1 <= L.rank[x] <= L.height - 1:
                    assert verify_lattice_op_families(L, "contract", x)

        pool = [L for L in lattices + randoms + small_lattice_pool(1213, 40) if L.is_coatomic]
        coatomic_random = sum(1 for L in pool if L not in lattices)
        assert coatomic_random >= 20
        for L in pool:
            D = dual_lattice(L)
            images = [as_dual_atoms(D, opp_basis(L, I)) for I in lattice_bases(L)]
            assert len(set(images)) == len(images)
            assert set(images) == lattice_bases(D).as_set()


def test_criterion_13_derived():
    with criterion("13", "val_X bound, delta is an adjoint, val_X is its submodular rank"):
        small = [catalog(n) for n in CATALOG if len(catalog(n).circuits) <= 12]
        small += [uniform(k, n) for n in range(2, 8) for k in range(0, n)
                  if 1 <= len(uniform(k, n).circuits) <= 12]
        rng = random.Random(1313)
        while len(small) < 40:
            M = random_simple_matroid(rng, 7)
            if 1 <= len(M.circuits) <= 12:
                small.append(M)
        for M in small:
            assert valx_bound_violation(M) is None, M
            chk = valx_check(M)
            assert chk.equals_rank and chk.submodular, (M, chk.to_json())

        targets = [catalog(n) for n in CORANK3]
        targets += [uniform(k, n) for n in range(1, 8) for k in range(0, n)]
        for M in targets:
            dM = derived_matroid(M)
            assert dM.d == universe(M).r and is_adjoint(M, dM), M


def test_criterion_14_route_agreement():
    with criterion("14", "three adjoint characterisations agree on 500 pairs"):
        rng = random.Random(1414)
        cache: dict = {}
        positives = 0
        for _ in range(500):
            M = random_small_instance(rng, 12)
            assert len(M.circuits) <= 12
            key = (M.n, M.bases.sets)
            if key not in cache:
                cache[key] = enumerate_adjoints(M, classify=False).adjoints
            N = adjoint_candidates(rng, M, cache[key])
            res = adjoint_routes(M, N)
            assert len(set(res.values())) == 1, (M, res)
            positives += res["sandwich"]
        # both outcomes must be well represented
        assert 50 < positives < 450
