import random
from itertools import combinations

import pytest
from helpers import (
    boolean_lattice,
    element_of,
    random_atomic_lattice,
    random_simple_matroid,
    small_lattice_pool,
    worked_example,
)

from adjointforge.bits import SetFamily, mask_of, members
from adjointforge.catalog import catalog
from adjointforge.errors import (
    AtomInBasis,
    EmptySet,
    NotABasis,
    NotABijection,
    NotCoatomic,
    NotDownwardClosed,
    NotGeometricTarget,
    NotIndependent,
    RankMismatch,
    SearchTooLarge,
)
from adjointforge.lattice import contract, dual_lattice, lattice_of_flats
from adjointforge.matroid import uniform
from adjointforge.nbb import (
    as_dual_atoms,
    check_matroid,
    embed,
    independence_family,
    is_bounded_below,
    is_geometric,
    is_independent,
    is_nbb,
    lattice_bases,
    lattice_fundamental_circuit,
    lattice_op_families,
    opp_basis,
    verify_lattice_op_families,
)

CATALOG_LATTICES = ["K4", "Fano", "FanoDual", "NonFano", "NonFanoDual", "P6", "Q6", "R6",
                    "AG32", "MatrixA", "MatrixADual", "U(2,4)", "U(3,6)", "U(4,6)"]


def flats(name):
    return lattice_of_flats(catalog(name))


def test_bounded_below_examples():
    L = flats("U(2,3)")
    # D = {b, c} with a first: a lies below b v c = top
    assert is_bounded_below(L, [0, 1, 2], 0b110)
    assert not is_bounded_below(L, [0, 1, 2], 0b001)
    # a singleton is only bounded below by an earlier atom under its join
    assert not is_bounded_below(L, [0, 1, 2], 0b010)
    with pytest.raises(EmptySet):
        is_bounded_below(L, [0, 1, 2], 0)


def test_bounded_below_fano_line():
    F = flats("Fano")
    # columns 0, 1, 3 are collinear (e1, e2, e1+e2)
    order = [3, 0, 1, 2, 4, 5, 6]
    assert is_bounded_below(F, order, 0b011)
    assert not is_nbb(F, order, 0b011)
    assert is_nbb(F, [0, 1, 2, 3, 4, 5, 6], 0b011)


def test_nbb_small_sets():
    F = flats("Fano")
    assert is_nbb(F, list(range(7)), 0)
    for pair in combinations(range(7), 2):
        order = list(pair) + [a for a in range(7) if a not in pair]
        assert is_nbb(F, order, mask_of(pair))
        assert is_independent(F, mask_of(pair))


def test_collinear_triple_dependent():
    F = flats("Fano")
    assert not is_independent(F, 0b1011)
    assert not is_independent(F, 0b1011, method="orders")
    assert is_independent(F, 0b0111)


def test_order_search_limit():
    L = boolean_lattice(10)
    with pytest.raises(SearchTooLarge):
        is_independent(L, (1 << 10) - 1, method="orders")
    with pytest.raises(ValueError):
        is_independent(L, 1, method="nope")


@pytest.mark.parametrize("seed", range(5))
def test_peel_matches_order_search(seed):
    L = small_lattice_pool(seed, 1)[0]
    n = len(L.atoms)
    for k in range(L.height + 2):
        for combo in combinations(range(n), k):
            A = mask_of(combo)
            assert is_independent(L, A) == is_independent(L, A, method="orders")


def test_cryptomorphism_small_random():
    rng = random.Random(11)
    for _ in range(15):
        M = random_simple_matroid(rng, 7)
        assert independence_family(lattice_of_flats(M)) == M.independents


def test_is_geometric():
    L = flats("U(2,3)")
    assert is_geometric(L, 0) and is_geometric(L, 1) and is_geometric(L, 0b11)
    assert not is_independent(L, 0b111)
    with pytest.raises(NotIndependent):
        is_geometric(L, 0b111)


def test_check_matroid():
    assert check_matroid(uniform(3, 5).independents)
    fam = SetFamily(4, [0, 1, 2, 4, 8, 3, 12])
    assert not check_matroid(fam)
    with pytest.raises(NotDownwardClosed):
        check_matroid(SetFamily(3, [0, 3]))


def test_worked_example_independents():
    L = worked_example()
    fam = independence_family(L)
    assert fam == uniform(4, 6).independents
    assert len(fam) == 57
    assert check_matroid(fam)


def test_worked_example_contraction():
    L = worked_example()
    x = element_of(L, 0b1)  # element 1
    C = contract(L, x)
    fam = independence_family(C)
    assert not check_matroid(fam)
    # atoms of [1, top] are the lines {1, j}; label them by j
    label = [max(members(C.labels[a])) + 1 for a in C.atoms]
    relabeled = {frozenset(label[k] for k in members(s)) for s in fam}
    full = {frozenset(c) for k in range(4) for c in combinations(range(2, 7), k)}
    assert sorted(sorted(s) for s in full - relabeled) == [[2, 3, 4], [2, 3, 6]]
    assert relabeled <= full
    assert verify_lattice_op_families(L, "contract", x)


def test_worked_example_embeds():
    L = worked_example()
    P = lattice_of_flats(uniform(4, 6))
    res = embed(L, P, list(range(6)))
    assert res and res.mapping.is_injective()
    assert res.independents_map
    # the join extension is an embedding although {1,2,3} has fewer atoms
    # than its rank yet maps to an independent set
    assert not res.low_sets_map


def test_embed_identity_and_errors():
    P = flats("K4")
    res = embed(P, P, list(range(6)))
    assert res and all(res.mapping(x) == x for x in range(P.size))
    with pytest.raises(RankMismatch):
        embed(flats("U(2,3)"), flats("U(3,4)"), [0, 1, 2])
    with pytest.raises(NotABijection):
        embed(flats("U(2,3)"), flats("U(2,4)"), [0, 1, 2])
    with pytest.raises(NotGeometricTarget):
        embed(worked_example(), worked_example(), list(range(6)))


def test_embed_random_flat_deletions():
    # deleting mid-rank flats keeps the atom map an embedding, and every
    # deleted flat leaves a set whose atoms no longer span its rank
    rng = random.Random(5)
    bases = [uniform(4, 6), uniform(3, 5), catalog("P6")]
    checked = 0
    for _ in range(24):
        M = rng.choice(bases)
        L = random_atomic_lattice(rng, M)
        if L is None:
            continue
        res = embed(L, lattice_of_flats(M), list(range(M.n)))
        assert res and res.independents_map
        assert not res.low_sets_map
        checked += 1
    assert checked > 10


def test_lattice_bases_geometric():
    for name in ["K4", "Fano", "Q6", "U(2,4)"]:
        M = catalog(name)
        assert lattice_bases(lattice_of_flats(M)) == M.bases
    assert lattice_bases(flats("U(2,3)")).as_lists() == [[0, 1], [0, 2], [1, 2]]


def test_lattice_bases_exchange():
    L = worked_example()
    bases = lattice_bases(L)
    maximal = independence_family(L).maximal()
    for B in bases:
        for I in maximal:
            for b in members(B & ~I):
                assert any(is_independent(L, (B ^ (1 << b)) | (1 << i)) for i in members(I & ~B))


def test_fundamental_circuit():
    L = flats("U(2,3)")
    assert lattice_fundamental_circuit(L, 0b011, 2) == 0b111
    M = catalog("K4")
    LK = lattice_of_flats(M)
    for B in M.bases:
        for e in range(6):
            if not B >> e & 1:
                C = lattice_fundamental_circuit(LK, B, e)
                assert C == M.fundamental_circuit(B, e)
                assert all(is_independent(LK, C ^ (1 << c)) for c in members(C))
    with pytest.raises(AtomInBasis):
        lattice_fundamental_circuit(L, 0b011, 0)
    with pytest.raises(NotABasis):
        lattice_fundamental_circuit(L, 0b111, 0)


def test_opp_basis_examples():
    L = flats("U(2,3)")
    assert set(opp_basis(L, 0b011)) == {L.atoms[0], L.atoms[1]}
    B3 = boolean_lattice(3)
    assert set(opp_basis(B3, 0b111)) == set(B3.coatoms)
    with pytest.raises(NotCoatomic):
        # truncation-free non-coatomic lattice: a chain on top of a diamond
        from adjointforge.lattice import lattice_from_pairs

        opp_basis(lattice_from_pairs(5, [[0, 1], [0, 2], [1, 3], [2, 3], [3, 4]]), 0b11)


@pytest.mark.parametrize("name", CATALOG_LATTICES)
def test_opp_bijection(name):
    L = flats(name)
    D = dual_lattice(L)
    images = [as_dual_atoms(D, opp_basis(L, I)) for I in lattice_bases(L)]
    assert len(set(images)) == len(images)
    assert set(images) == lattice_bases(D).as_set()


@pytest.mark.parametrize("name", CATALOG_LATTICES)
def test_restriction_and_truncation_identities(name):
    L = flats(name)
    for x in range(L.size):
        if L.rank[x] >= 1:
            assert verify_lattice_op_families(L, "restrict", x)
    for m in range(2, L.height + 1):
        assert verify_lattice_op_families(L, "truncate", m)


def test_truncation_identity_fails_off_geometric():
    L = worked_example()
    got, want = lattice_op_families(L, "truncate", 3)
    extra = sorted(sorted(a + 1 for a in members(s)) for s in got.as_set() - want.as_set())
    assert extra == [[1, 2, 3], [1, 2, 4], [1, 2, 6], [1, 3, 4], [1, 3, 6]]
    assert not want.as_set() - got.as_set()


def test_truncation_needs_rank_two():
    with pytest.raises(ValueError):
        lattice_op_families(flats("K4"), "truncate", 1)


@pytest.mark.parametrize("seed", range(4))
def test_contraction_quotient_random(seed):
    for L in small_lattice_pool(100 + seed, 5):
        for x in range(L.size):
            if 1 <= L.rank[x] <= L.height - 1:
                assert verify_lattice_op_families(L, "contract", x)


@pytest.mark.parametrize("name", ["K4", "Fano", "Q6", "U(3,5)"])
def test_dual_chain_condition(name):
    assert verify_lattice_op_families(flats(name), "dual")


def test_dual_chain_condition_worked_example():
    L = worked_example()
    if L.is_coatomic:
        assert verify_lattice_op_families(L, "dual")
