import random
from itertools import combinations

import pytest
from helpers import random_simple_matroid
from hypothesis import given, settings
from hypothesis import strategies as st

from adjointforge.bits import mask_of, members, popcount
from adjointforge.catalog import MATRIX_A, NAMES, catalog
from adjointforge.errors import (
    ElementInBasis,
    EmptyFamily,
    ExchangeAxiomViolated,
    GroundSetMismatch,
    NoCircuits,
    NotABasis,
    NotACircuit,
    UnequalSizes,
    UnknownName,
)
from adjointforge.gfp import GFMatrix
from adjointforge.matroid import (
    circuit_vector,
    from_bases,
    from_matrix,
    graphic,
    linear_derived_matroid,
    uniform,
    weak_order_leq,
)

# name -> (n, rank, bases, circuits)
COUNTS = {
    "K4": (6, 3, 16, 7),
    "Fano": (7, 3, 28, 14),
    "NonFano": (7, 3, 29, 17),
    "P6": (6, 3, 19, 13),
    "Q6": (6, 3, 18, 11),
    "R6": (6, 3, 18, 11),
    "AG32": (8, 4, 56, 14),
    "U(2,4)": (4, 2, 6, 4),
}


@pytest.mark.parametrize("name", sorted(COUNTS))
def test_catalog_counts(name):
    M = catalog(name)
    n, d, nb, nc = COUNTS[name]
    assert (M.n, M.d, len(M.bases)) == (n, d, nb)
    assert len(M.circuits) == nc


@pytest.mark.parametrize("name", [x for x in NAMES if x != "U(k,n)"])
def test_catalog_builds(name):
    M = catalog("catalog:" + name)
    assert from_bases(M.n, M.bases) == M


def test_unknown_name():
    with pytest.raises(UnknownName):
        catalog("Nope")
    with pytest.raises(KeyError):
        catalog("catalog:Nope")


def test_from_bases_errors():
    with pytest.raises(EmptyFamily):
        from_bases(3, [])
    with pytest.raises(UnequalSizes):
        from_bases(3, [[0], [1, 2]])
    with pytest.raises(ExchangeAxiomViolated):
        from_bases(4, [[0, 1], [2, 3]])
    with pytest.raises(ValueError):
        from_bases(2, [[0, 3]])


def test_rank_and_closure_u24():
    M = uniform(2, 4)
    assert M.rank(0b0001) == 1 and M.rank(0b0111) == 2
    assert M.closure(0b0011) == 0b1111
    assert M.nullity(0b0111) == 1
    assert M.is_independent([0, 3]) and not M.is_independent([0, 1, 2])


def test_loops_and_coloops():
    M = graphic(3, [(0, 1), (1, 1), (1, 2)])
    assert M.is_loop(1) and not M.is_loop(0)
    assert M.is_coloop(0) and M.is_coloop(2)
    assert M.circuits.as_lists() == [[1]]


def test_dual_involution_and_counts():
    for name in ["K4", "Fano", "Q6", "AG32", "MatrixA"]:
        M = catalog(name)
        D = M.dual
        assert D.d == M.n - M.d
        assert len(D.bases) == len(M.bases)
        assert D.dual == M
        # cocircuits are complements of hyperplanes
        assert {M.ground ^ h for h in M.hyperplanes} == D.circuits.as_set()


def test_fano_dual_corank():
    assert catalog("FanoDual").corank == 3
    assert catalog("MatrixA").corank == 4


def test_fundamental_circuit():
    M = catalog("K4")
    B = next(iter(M.bases))
    for e in range(M.n):
        if B >> e & 1:
            with pytest.raises(ElementInBasis):
                M.fundamental_circuit(B, e)
        else:
            C = M.fundamental_circuit(B, e)
            assert C in M.circuits and C & ~B == 1 << e
    with pytest.raises(NotABasis):
        M.fundamental_circuit(0b1, 3)


def test_circuit_vector():
    A = GFMatrix(3, [[1, 0, 1], [0, 1, 1]])
    cv = circuit_vector(A, 0b111)
    assert cv.coeffs == (1, 1, 2)
    with pytest.raises(NotACircuit):
        circuit_vector(A, 0b011)
    with pytest.raises(NotACircuit):
        circuit_vector(A, 0)


def test_circuit_vectors_annihilate():
    for C in catalog("MatrixA").circuits:
        cv = circuit_vector(MATRIX_A, C)
        assert {e for e, v in enumerate(cv.coeffs) if v} == set(members(C))
        cols = MATRIX_A.columns(list(range(MATRIX_A.ncols)))
        assert not ((cols @ list(cv.coeffs)) % 2).any()


def test_linear_derived_matrix_a():
    D = linear_derived_matroid(MATRIX_A)
    assert D.n == len(catalog("MatrixA").circuits)
    assert len(D.bases) == 304


def test_linear_derived_needs_circuits():
    with pytest.raises(NoCircuits):
        linear_derived_matroid(GFMatrix(2, [[1, 0], [0, 1]]))


def test_weak_order():
    assert weak_order_leq(uniform(2, 4), uniform(2, 4))
    assert weak_order_leq(from_bases(4, [[0, 1], [0, 2], [1, 2], [0, 3], [1, 3]]), uniform(2, 4))
    assert not weak_order_leq(uniform(2, 4), from_bases(4, [[0, 1], [0, 2], [1, 2], [0, 3], [1, 3]]))
    with pytest.raises(GroundSetMismatch):
        weak_order_leq(uniform(2, 4), uniform(2, 5))


def test_restrict_and_relabel():
    M = catalog("Fano")
    R = M.restrict_to([0, 1, 3])
    assert R.d == 2 and len(R.circuits) == 1
    perm = [6, 5, 4, 3, 2, 1, 0]
    assert len(M.relabel(perm).bases) == 28


def test_from_matrix_zero():
    M = from_matrix(GFMatrix(2, [[0, 0]]))
    assert M.d == 0 and M.bases.as_lists() == [[]]


def test_json_roundtrip():
    M = catalog("Q6")
    obj = M.to_json()
    assert from_bases(obj["n"], obj["bases"]) == M


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_rank_submodular(seed):
    M = random_simple_matroid(random.Random(seed), 7)
    g = M.ground
    rng = random.Random(seed)
    for _ in range(40):
        A, B = rng.randrange(g + 1) & g, rng.randrange(g + 1) & g
        assert M.rank(A) + M.rank(B) >= M.rank(A | B) + M.rank(A & B)
        assert M.rank(A) <= popcount(A)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_circuit_elimination(seed):
    M = random_simple_matroid(random.Random(seed), 7)
    circ = M.circuits.sets
    for C1, C2 in combinations(circ, 2):
        common = C1 & C2
        if not common:
            continue
        e = members(common)[0]
        rest = (C1 | C2) & ~(1 << e)
        assert any(c & rest == c for c in circ)


def test_uniform_bad_args():
    with pytest.raises(ValueError):
        uniform(5, 3)
    assert mask_of([]) == 0
