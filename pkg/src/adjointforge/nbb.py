"""NBB independence of atom sets in finite graded lattices.

Atom sets are bitmasks over *atom positions* (``L.atoms[k]`` is the lattice
element of position ``k``). Linear orders are sequences of atom positions.

For a fixed set ``A`` an order that lists ``A`` first makes ``A`` NBB iff
each listed atom is not below the join of the atoms of ``A`` listed after
it. So ``A`` is independent iff it can be peeled: some ``a`` in ``A`` with
``a`` not below the join of ``A - a`` and ``A - a`` independent. That
recursion is the default decision procedure; the factorial search over
orders is kept as an oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Sequence

import numpy as np

from .bits import SetFamily, as_int64, iter_bits, mask_of, members, popcount, subsets_of
from .errors import (
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
from .lattice import FiniteLattice, LatticeElementMap, contract, dual_lattice, restrict, truncate

ORDER_SEARCH_LIMIT = 9


def _check_order(L: FiniteLattice, order: Sequence[int]) -> list[int]:
    order = [int(a) for a in order]
    if sorted(order) != list(range(len(L.atoms))):
        raise ValueError("order must be a permutation of the atom positions")
    return order


def is_bounded_below(L: FiniteLattice, order: Sequence[int], D: int) -> bool:
    if D == 0:
        raise EmptySet("bounded-below test needs a nonempty set")
    order = _check_order(L, order)
    rank_of = {a: i for i, a in enumerate(order)}
    first = min(rank_of[d] for d in iter_bits(D))
    below = L.atoms_below(L.join_atoms(D))
    return any(below >> order[k] & 1 for k in range(first))


def is_nbb(L: FiniteLattice, order: Sequence[int], B: int) -> bool:
    """No nonempty subset of ``B`` is bounded below under ``order``."""
    order = _check_order(L, order)
    rank_of = {a: i for i, a in enumerate(order)}
    # prefix[i] = atoms strictly before position i of the order
    prefix = [0] * (len(order) + 1)
    for i, a in enumerate(order):
        prefix[i + 1] = prefix[i] | (1 << a)
    for D in subsets_of(B):
        if D == 0:
            continue
        first = min(rank_of[d] for d in iter_bits(D))
        if L.atoms_below(L.join_atoms(D)) & prefix[first]:
            return False
    return True


class _Peeler:
    """Memoised peel recursion for one lattice."""

    def __init__(self, L: FiniteLattice):
        self.L = L
        self.memo: dict[int, bool] = {}

    def __call__(self, A: int) -> bool:
        if popcount(A) <= 2:
            return True
        hit = self.memo.get(A)
        if hit is not None:
            return hit
        L = self.L
        ok = False
        for k in iter_bits(A):
            rest = A ^ (1 << k)
            if not L.leq[L.atoms[k], L.join_atoms(rest)] and self(rest):
                ok = True
                break
        self.memo[A] = ok
        return ok


def _peeler(L: FiniteLattice) -> _Peeler:
    p = L.__dict__.get("_peeler")
    if p is None:
        p = _Peeler(L)
        L.__dict__["_peeler"] = p
    return p


def is_independent(L: FiniteLattice, A: int, method: str = "peel", allow_large: bool = False) -> bool:
    """Whether some linear order of the atoms makes ``A`` NBB.

    ``method="orders"`` runs the literal search over orders starting with a
    permutation of ``A``; it refuses ``|A| > 9`` unless ``allow_large``.
    """
    if method == "peel":
        return _peeler(L)(A)
    if method != "orders":
        raise ValueError(f"unknown method {method!r}")
    k = popcount(A)
    if k > ORDER_SEARCH_LIMIT and not allow_large:
        raise SearchTooLarge(f"|A| = {k} needs {k}! orders")
    rest = [a for a in range(len(L.atoms)) if not A >> a & 1]
    for perm in permutations(members(A)):
        if is_nbb(L, list(perm) + rest, A):
            return True
    return False


def independence_family(L: FiniteLattice, method: str = "peel") -> SetFamily:
    """All independent atom sets, grown level by level."""
    n = len(L.atoms)
    found = {0}
    level = [0]
    while level:
        nxt = set()
        for s in level:
            top = s.bit_length()
            for a in range(top, n):
                t = s | (1 << a)
                # every (k-1)-subset must already be independent
                if all((t ^ (1 << b)) in found for b in iter_bits(s)) and is_independent(L, t, method):
                    nxt.add(t)
        found.update(nxt)
        level = sorted(nxt)
    return SetFamily(n, tuple(found))


def is_geometric(L: FiniteLattice, I: int) -> bool:
    if not is_independent(L, I):
        raise NotIndependent(f"{members(I)} is not independent")
    return L.atom_rank(I) == popcount(I)


def check_matroid(F: SetFamily) -> bool:
    """Augmentation between consecutive levels of a downward-closed family."""
    if 0 not in F or not F.is_downward_closed():
        raise NotDownwardClosed("family must contain the empty set and be downward closed")
    look = F.as_set()
    by_size: dict[int, list[int]] = {}
    for s in F:
        by_size.setdefault(popcount(s), []).append(s)
    for k in sorted(by_size):
        upper = by_size.get(k + 1)
        if not upper:
            continue
        low = as_int64(by_size[k])
        # ext[i] = elements x with low[i] + x in F
        ext = np.zeros(low.shape[0], dtype=np.int64)
        for i, s in enumerate(low.tolist()):
            e = 0
            for x in range(F.universe):
                if not s >> x & 1 and (s | 1 << x) in look:
                    e |= 1 << x
            ext[i] = e
        up = as_int64(upper)
        ok = (up[None, :] & ~low[:, None] & ext[:, None]) != 0
        if not ok.all():
            return False
    return True


@dataclass(frozen=True)
class EmbedResult:
    """Outcome of :func:`embed`.

    ``mapping`` is set when the join extension is a rank-preserving order
    embedding. ``independents_map`` and ``low_sets_map`` record the two
    sufficient conditions separately; the second is not necessary (the
    worked non-geometric example in the tests embeds while violating it).
    """

    mapping: LatticeElementMap | None
    violation: str | None
    independents_map: bool
    low_sets_map: bool

    def __bool__(self) -> bool:
        return self.mapping is not None


def embed(L: FiniteLattice, P: FiniteLattice, atom_map: Sequence[int]) -> EmbedResult:
    """Try to extend an atom bijection to a rank-preserving order embedding.

    ``atom_map[k]`` is the atom position in ``P`` for atom position ``k`` of
    ``L``. The candidate extension is ``X -> join_P(f'(atoms below X))``; it
    is verified directly.
    """
    if L.height != P.height:
        raise RankMismatch(f"ranks differ: {L.height} vs {P.height}")
    if not P.is_geometric():
        raise NotGeometricTarget("target lattice must be geometric")
    atom_map = [int(a) for a in atom_map]
    if len(atom_map) != len(L.atoms) or sorted(atom_map) != list(range(len(P.atoms))):
        raise NotABijection("atom map must be a bijection between the atom sets")

    def image(A: int) -> int:
        return mask_of(atom_map[k] for k in iter_bits(A))

    IP = independence_family(P)
    bad_indep = next((I for I in independence_family(L) if image(I) not in IP), None)
    bad_low = None
    n = len(L.atoms)
    for k in range(L.height):
        for combo in combinations(range(n), k):
            A = mask_of(combo)
            if k < L.atom_rank(A) and image(A) in IP:
                bad_low = A
                break
        if bad_low is not None:
            break

    f = LatticeElementMap(L, P, tuple(P.join_atoms(image(L.atoms_below(x))) for x in range(L.size)))
    violation = None
    if not f.is_rank_preserving():
        violation = "join extension is not rank-preserving"
    elif not f.is_order_embedding():
        violation = "join extension is not an order embedding"
    if violation is None:
        mapping = f
    else:
        mapping = None
        if bad_indep is not None:
            violation += f"; independent set {members(bad_indep)} maps to a dependent set"
        if bad_low is not None:
            violation += f"; set {members(bad_low)} below its rank maps to an independent set"
    return EmbedResult(mapping, violation, bad_indep is None, bad_low is None)


def lattice_bases(L: FiniteLattice) -> SetFamily:
    """Maximal independent sets all of whose subsets are geometric."""
    fam = independence_family(L)
    geo = {s for s in fam if L.atom_rank(s) == popcount(s)}
    out = [s for s in fam.maximal() if all(t in geo for t in subsets_of(s))]
    return SetFamily(fam.universe, tuple(out))


def lattice_fundamental_circuit(L: FiniteLattice, B: int, a: int) -> int:
    if B not in lattice_bases(L):
        raise NotABasis(f"{members(B)} is not a lattice basis")
    if B >> a & 1:
        raise AtomInBasis(f"atom {a} lies in the basis")
    whole = B | (1 << a)
    dep = [s for s in subsets_of(whole) if not is_independent(L, s)]
    minimal = SetFamily(len(L.atoms), tuple(dep)).minimal().sets
    if len(minimal) != 1:
        raise RuntimeError(f"expected one minimal dependent set, found {len(minimal)}")
    return minimal[0]


def opp_basis(L: FiniteLattice, I: int) -> tuple[int, ...]:
    """The coatoms ``join(I - a)`` for ``a`` in ``I``, as lattice elements."""
    if not L.is_coatomic:
        raise NotCoatomic("lattice is not coatomic")
    if I not in lattice_bases(L):
        raise NotABasis(f"{members(I)} is not a lattice basis")
    return tuple(sorted({L.join_atoms(I ^ (1 << a)) for a in iter_bits(I)}))


def as_dual_atoms(D: FiniteLattice, elems) -> int:
    """Mask over atom positions of ``D`` for the given elements."""
    return mask_of(D.atom_pos[e] for e in elems)


# ------------------------------------------------------- operation identities


def _lift(sub: FiniteLattice, L: FiniteLattice, fam: SetFamily) -> SetFamily:
    """Re-express atom sets of an interval sublattice over atoms of ``L``."""
    to_parent = [L.atom_pos[sub.origin[a]] for a in sub.atoms]
    return SetFamily(len(L.atoms), tuple(mask_of(to_parent[k] for k in iter_bits(s)) for s in fam))


def spanning_independent(L: FiniteLattice, x: int) -> int:
    """Lexicographically first maximal independent set of atoms below ``x``
    whose join is ``x``."""
    below = L.atoms_below(x)
    r = int(L.rank[x])
    for combo in combinations(members(below), r):
        s = mask_of(combo)
        if L.join_atoms(s) == x and is_independent(L, s):
            return s
    raise RuntimeError("no spanning independent set (lattice not atomic below x)")


def _extends_nbb(L: FiniteLattice, I: int, BX: int) -> bool:
    """Some order listing ``I`` then ``BX`` then the rest makes ``I | BX`` NBB."""
    rest = [a for a in range(len(L.atoms)) if not (I | BX) >> a & 1]
    tails = [list(p) for p in permutations(members(BX))]
    for head in permutations(members(I)):
        for tail in tails:
            if is_nbb(L, list(head) + tail + rest, I | BX):
                return True
    return False


def contraction_family_predicted(L: FiniteLattice, x: int) -> SetFamily:
    """Independent sets of ``[x, top]`` from the quotient formula, over the
    atoms of the contracted lattice."""
    C = contract(L, x)
    BX = spanning_independent(L, x)
    below_x = L.atoms_below(x)
    # an atom a not below x counts only when x v a covers x; it then
    # represents that cover
    cover_pos = {}
    for k, a in enumerate(L.atoms):
        y = int(L.join[x, a])
        if not below_x >> k & 1 and L.rank[y] == L.rank[x] + 1:
            cover_pos[k] = C.atom_pos[C.origin.index(y)]
    cand = sorted(cover_pos)
    out = {0}
    for size in range(1, C.height + 1):
        for combo in combinations(cand, size):
            img = {cover_pos[k] for k in combo}
            if len(img) != size:
                continue
            I = mask_of(combo)
            if _extends_nbb(L, I, BX):
                out.add(mask_of(img))
    return SetFamily(len(C.atoms), tuple(out))


def _dual_chain_family(L: FiniteLattice) -> SetFamily:
    """Coatom sets satisfying the chain condition, by brute force.

    A set of ``t`` coatoms qualifies when it can be ordered ``X_1..X_t`` so
    that each partial meet ``X_1 ^ .. ^ X_s`` is spanned by the first
    ``d - s`` atoms of one independent sequence of ``d - 1`` atoms.
    """
    d = L.height
    D = dual_lattice(L)
    n = len(L.atoms)
    out = {0}
    for t in range(1, d + 1):
        for combo in combinations(L.coatoms, t):
            if _chain_ok(L, list(combo), d, n):
                out.add(as_dual_atoms(D, combo))
    return SetFamily(len(D.atoms), tuple(out))


def _chain_ok(L: FiniteLattice, coatoms: list[int], d: int, n: int) -> bool:
    t = len(coatoms)
    for perm in permutations(coatoms):
        meets = []
        z = L.top
        for X in perm:
            z = int(L.meet[z, X])
            meets.append(z)
        if any(int(L.rank[meets[s]]) != d - 1 - s for s in range(t)):
            continue
        # first d - t atoms span meets[t-1]; then one more atom per step up
        base_len = d - t
        for start in combinations(members(L.atoms_below(meets[t - 1])), base_len):
            S = mask_of(start)
            if L.join_atoms(S) != meets[t - 1] or not is_independent(L, S):
                continue
            if _grow(L, S, meets, t - 2):
                return True
    return False


def _grow(L: FiniteLattice, S: int, meets: list[int], s: int) -> bool:
    if s < 0:
        return is_independent(L, S)
    target = meets[s]
    for k in iter_bits(L.atoms_below(target) & ~S):
        T = S | (1 << k)
        if L.join_atoms(T) == target and is_independent(L, T) and _grow(L, T, meets, s - 1):
            return True
    return False


def lattice_op_families(L: FiniteLattice, op: str, arg: int | None = None) -> tuple[SetFamily, SetFamily]:
    """(computed, predicted) independence families for one lattice operation.

    ``restrict``/``truncate`` families are over the atoms of ``L``;
    ``contract`` over the atoms of ``[arg, top]``; ``dual`` over the atoms of
    the dual lattice (the coatoms of ``L``), where the computed side is the
    geometric independent sets of the dual.
    """
    if op == "restrict":
        sub = restrict(L, arg)
        got = _lift(sub, L, independence_family(sub))
        below = L.atoms_below(arg)
        want = SetFamily(len(L.atoms), tuple({s & below for s in independence_family(L)}))
        return got, want
    if op == "truncate":
        if arg is None or arg < 2:
            raise ValueError("truncation identity needs m >= 2 (for m = 1 the only atom is the new top)")
        sub = truncate(L, arg)
        got = _lift(sub, L, independence_family(sub))
        want = SetFamily(len(L.atoms), tuple(s for s in independence_family(L) if L.atom_rank(s) <= arg))
        return got, want
    if op == "contract":
        sub = contract(L, arg)
        return independence_family(sub), contraction_family_predicted(L, arg)
    if op == "dual":
        D = dual_lattice(L)
        got = SetFamily(len(D.atoms), tuple(s for s in independence_family(D) if D.atom_rank(s) == popcount(s)))
        return got, _dual_chain_family(L)
    raise ValueError(f"unknown lattice operation {op!r}")


def verify_lattice_op_families(L: FiniteLattice, op: str, arg: int | None = None) -> bool:
    got, want = lattice_op_families(L, op, arg)
    return got == want
