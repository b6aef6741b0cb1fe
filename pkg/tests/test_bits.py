import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from adjointforge.bits import (
    SetFamily,
    fmt_set,
    full_mask,
    iter_bits,
    k_subsets,
    mask_of,
    members,
    popcount,
    subsets_of,
)
from adjointforge.gfp import GFMatrix, is_prime, nullspace_mod_p, rank_mod_p

masks = st.integers(min_value=0, max_value=(1 << 12) - 1)


@given(masks)
def test_mask_roundtrip(m):
    assert mask_of(members(m)) == m
    assert list(iter_bits(m)) == members(m)
    assert popcount(m) == len(members(m))


@given(masks)
def test_subsets_of_counts(m):
    subs = list(subsets_of(m))
    assert len(subs) == 1 << popcount(m)
    assert all(s & m == s for s in subs)


def test_k_subsets_and_format():
    assert len(list(k_subsets(6, 3))) == 20
    assert fmt_set(0b1011) == "{0,1,3}"
    assert fmt_set(0b1011, one_based=True) == "{1,2,4}"
    assert full_mask(4) == 15


@given(st.lists(masks, max_size=30))
def test_setfamily_canonical_and_json(sets):
    fam = SetFamily(12, sets)
    assert list(fam.sets) == sorted(set(sets))
    back = SetFamily.from_json(json.loads(json.dumps(fam.to_json())))
    assert back == fam


@given(st.lists(masks, min_size=1, max_size=20))
def test_minimal_maximal_are_antichains(sets):
    fam = SetFamily(12, sets)
    assert fam.minimal().is_antichain()
    assert fam.maximal().is_antichain()
    for s in fam:
        assert any(k & s == k for k in fam.minimal())
        assert any(k & s == s for k in fam.maximal())


@given(st.lists(st.integers(0, 255), min_size=1, max_size=10))
def test_down_closure_is_downward_closed(sets):
    fam = SetFamily(8, sets).down_closure()
    assert fam.is_downward_closed()
    assert 0 in fam


def test_setfamily_rejects_outside_universe():
    with pytest.raises(ValueError):
        SetFamily(3, [8])


def test_setfamily_map_and_sizes():
    fam = SetFamily.from_lists(4, [[0, 1], [2], []])
    assert fam.sizes() == {0: 1, 1: 1, 2: 1}
    assert fam.map([3, 2, 1, 0]).as_lists() == [[], [1], [2, 3]]
    assert [0, 1] in fam and [1, 2] not in fam


def test_primes_and_rank():
    assert [p for p in range(12) if is_prime(p)] == [2, 3, 5, 7, 11]
    assert rank_mod_p([[1, 1], [1, 1]], 2) == 1
    assert rank_mod_p([[1, 2], [2, 1]], 3) == 1
    assert rank_mod_p([[1, 2], [2, 1]], 5) == 2


@given(st.lists(st.lists(st.integers(0, 4), min_size=5, max_size=5), min_size=1, max_size=4))
def test_nullspace_is_kernel(rows):
    A = np.array(rows)
    K = nullspace_mod_p(A, 5)
    assert K.shape[0] == A.shape[1] - rank_mod_p(A, 5)
    assert not np.any((A @ K.T) % 5)


def test_gfmatrix_validation():
    with pytest.raises(ValueError):
        GFMatrix(4, [[1]])
    A = GFMatrix(3, [[4, 5]])
    assert A.rows.tolist() == [[1, 2]]
    assert A.rank([0]) == 1 and A.rank([]) == 0
    assert A.to_json() == {"field": 3, "matrix": [[1, 2]]}
