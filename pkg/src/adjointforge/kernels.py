"""Hot loops.

Every ``@njit`` kernel here takes and returns numpy arrays of ``int64`` bit
masks (ground sets up to 62 elements). Masks are never ``uint64``: numba
promotes mixed signed/unsigned arithmetic to float.

The table helpers at the bottom (``*_table``) are vectorised numpy and are
used in both modes.
"""

from __future__ import annotations

import numpy as np

from ._accel import USE_NUMBA, njit

MAX_WORD = 62


@njit
def popcount(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


@njit
def bit_index(low):
    # index of the highest set bit
    i = 0
    while low > 1:
        low >>= 1
        i += 1
    return i


@njit
def _contains(sorted_arr, value):
    k = np.searchsorted(sorted_arr, value)
    return k < sorted_arr.shape[0] and sorted_arr[k] == value


@njit
def n_choose_k(n, k):
    if k < 0 or k > n:
        return 0
    r = 1
    for i in range(k):
        r = r * (n - i) // (i + 1)
    return r


@njit
def k_subsets(m, k):
    """All k-subsets of range(m) as increasing masks (Gosper's hack)."""
    out = np.empty(n_choose_k(m, k), np.int64)
    if k == 0:
        out[0] = 0
        return out
    x = (np.int64(1) << k) - 1
    limit = np.int64(1) << m
    i = 0
    while x < limit:
        out[i] = x
        i += 1
        c = x & -x
        rr = x + c
        x = (((rr ^ x) >> 2) // c) | rr
    return out


# ---------------------------------------------------------------- matroids


@njit
def exchange_violation(bases):
    """First (i, j, x) with bases[i]-x having no exchange partner in bases[j].

    ``bases`` must be sorted. Returns (-1, -1, 0) when the exchange axiom
    holds. Pairs differing in one element always exchange, so are skipped.
    """
    nb = bases.shape[0]
    for i in range(nb):
        b1 = bases[i]
        for j in range(nb):
            if i == j:
                continue
            b2 = bases[j]
            d1 = b1 & ~b2
            if popcount(d1) < 2:
                continue
            d2 = b2 & ~b1
            xs = d1
            while xs:
                xb = xs & -xs
                xs ^= xb
                base = b1 ^ xb
                ok = False
                ys = d2
                while ys:
                    yb = ys & -ys
                    ys ^= yb
                    if _contains(bases, base | yb):
                        ok = True
                        break
                if not ok:
                    return i, j, xb
    return -1, -1, np.int64(0)


@njit
def union_of(sel, cmasks):
    u = np.int64(0)
    s = sel
    while s:
        low = s & -s
        s ^= low
        u |= cmasks[bit_index(low)]
    return u


@njit
def in_s_family(sel, cmasks, rank_table):
    """|sel| <= nullity of the union of the selected circuits."""
    u = union_of(sel, cmasks)
    return popcount(sel) <= popcount(u) - rank_table[u]


@njit
def s_family_filter(sels, cmasks, rank_table):
    out = np.zeros(sels.shape[0], np.bool_)
    for i in range(sels.shape[0]):
        out[i] = in_s_family(sels[i], cmasks, rank_table)
    return out


@njit
def all_subsets_in_s(sels, cmasks, rank_table):
    """True where every nonempty subset of the selection lies in S(M)."""
    out = np.ones(sels.shape[0], np.bool_)
    for i in range(sels.shape[0]):
        s = sels[i]
        sub = s
        while sub:
            if not in_s_family(sub, cmasks, rank_table):
                out[i] = False
                break
            sub = (sub - 1) & s
    return out


@njit
def _peels(s, prev, cmasks):
    # some circuit of s has an element outside the union of the others,
    # and removing it leaves an independent set
    bits = s
    while bits:
        low = bits & -bits
        bits ^= low
        rest = s ^ low
        if _contains(prev, rest):
            if cmasks[bit_index(low)] & ~union_of(rest, cmasks):
                return True
    return False


@njit
def lopp_levels(cmasks, r):
    """Independent circuit sets of the opposite dual lattice, by size.

    A circuit set is independent iff its circuits can be ordered so each
    one owns an element missed by all later ones. Returns the sets
    (sorted within each size) and size offsets.
    """
    m = cmasks.shape[0]
    chunks = [np.zeros(1, np.int64)]
    for k in range(1, r + 1):
        prev = chunks[k - 1]
        buf = np.empty(prev.shape[0] * m + 1, np.int64)
        cnt = 0
        for t in prev:
            hb = -1
            if t:
                hb = bit_index(t)
            for c in range(hb + 1, m):
                s = t | (np.int64(1) << c)
                if _peels(s, prev, cmasks):
                    buf[cnt] = s
                    cnt += 1
        chunks.append(np.sort(buf[:cnt]))
        if cnt == 0:
            break
    total = 0
    for ch in chunks:
        total += ch.shape[0]
    out = np.empty(total, np.int64)
    offsets = np.zeros(len(chunks) + 1, np.int64)
    pos = 0
    for k in range(len(chunks)):
        ch = chunks[k]
        out[pos:pos + ch.shape[0]] = ch
        pos += ch.shape[0]
        offsets[k + 1] = pos
    return out, offsets


# ------------------------------------------------------ adjoint enumeration


@njit
def build_exchange_clauses(cand, fixed):
    """CNF encoding of the exchange axiom over candidate bases.

    Variables are the non-fixed candidates in order. For every ordered pair
    (s, t) and x in s-t the clause reads  not s or not t or OR_y (s-x+y).
    Literals are 2*var+1 (positive) / 2*var (negative); fixed candidates are
    constant true and dropped. Returns (unsat, ptr, lits); ``unsat`` is set
    when two fixed bases already violate the axiom.
    """
    nc = cand.shape[0]
    varid = np.full(nc, -1, np.int64)
    nv = 0
    for i in range(nc):
        if not fixed[i]:
            varid[i] = nv
            nv += 1
    pos = np.empty(64, np.int64)
    ptr = np.zeros(1, np.int64)
    lits = np.zeros(1, np.int32)
    for phase in range(2):
        ncl = 0
        nlit = 0
        for i in range(nc):
            s = cand[i]
            for j in range(nc):
                if i == j:
                    continue
                t = cand[j]
                d1 = s & ~t
                if popcount(d1) < 2:
                    continue
                d2 = t & ~s
                xs = d1
                while xs:
                    xb = xs & -xs
                    xs ^= xb
                    base = s ^ xb
                    sat = False
                    npos = 0
                    ys = d2
                    while ys:
                        yb = ys & -ys
                        ys ^= yb
                        u = base | yb
                        k = np.searchsorted(cand, u)
                        if k < nc and cand[k] == u:
                            if fixed[k]:
                                sat = True
                                break
                            pos[npos] = varid[k]
                            npos += 1
                    if sat:
                        continue
                    width = npos
                    if varid[i] >= 0:
                        width += 1
                    if varid[j] >= 0:
                        width += 1
                    if width == 0:
                        return True, ptr, lits
                    if phase == 1:
                        q = ptr[ncl]
                        if varid[i] >= 0:
                            lits[q] = 2 * varid[i]
                            q += 1
                        if varid[j] >= 0:
                            lits[q] = 2 * varid[j]
                            q += 1
                        for a in range(npos):
                            lits[q] = 2 * pos[a] + 1
                            q += 1
                        ptr[ncl + 1] = q
                    ncl += 1
                    nlit += width
        if phase == 0:
            ptr = np.zeros(ncl + 1, np.int64)
            lits = np.zeros(nlit, np.int32)
    return False, ptr, lits


@njit
def _propagate(qhead, tlen, assign, trail, occ_ptr, occ_cl, occ_sign, ptr, lits, ntrue, nfalse):
    conflict = False
    while qhead < tlen:
        v = trail[qhead]
        val = assign[v]
        for o in range(occ_ptr[v], occ_ptr[v + 1]):
            c = occ_cl[o]
            if occ_sign[o] == val:
                ntrue[c] += 1
            else:
                nfalse[c] += 1
                if ntrue[c] == 0 and not conflict:
                    width = ptr[c + 1] - ptr[c]
                    if nfalse[c] == width:
                        conflict = True
                    elif nfalse[c] == width - 1:
                        for q in range(ptr[c], ptr[c + 1]):
                            w = lits[q] >> 1
                            if assign[w] == -1:
                                assign[w] = lits[q] & 1
                                trail[tlen] = w
                                tlen += 1
                                break
        qhead += 1
        if conflict:
            return False, qhead, tlen
    return True, qhead, tlen


@njit
def _undo(to, qhead, tlen, assign, trail, occ_ptr, occ_cl, occ_sign, ntrue, nfalse):
    for idx in range(tlen - 1, to - 1, -1):
        v = trail[idx]
        if idx < qhead:
            val = assign[v]
            for o in range(occ_ptr[v], occ_ptr[v + 1]):
                if occ_sign[o] == val:
                    ntrue[occ_cl[o]] -= 1
                else:
                    nfalse[occ_cl[o]] -= 1
        assign[v] = -1
    if qhead > to:
        qhead = to
    return qhead, to


@njit
def dpll_enumerate(nv, ptr, lits, assume, max_solutions, node_budget):
    """Enumerate every satisfying assignment of a CNF.

    Plain DPLL with counter-based unit propagation, branching false-first
    on the lowest unassigned variable. ``assume[v]`` in {-1, 0, 1} pins
    variables (used to split work across processes).

    Returns (solutions, status, nodes); status 0 = exhaustive, 1 = stopped
    at ``max_solutions``, 2 = stopped at ``node_budget`` decisions.
    """
    ncl = ptr.shape[0] - 1
    occ_ptr = np.zeros(nv + 1, np.int64)
    for q in range(lits.shape[0]):
        occ_ptr[(lits[q] >> 1) + 1] += 1
    for v in range(nv):
        occ_ptr[v + 1] += occ_ptr[v]
    fill = occ_ptr[:-1].copy()
    occ_cl = np.empty(lits.shape[0], np.int64)
    occ_sign = np.empty(lits.shape[0], np.int8)
    for c in range(ncl):
        for q in range(ptr[c], ptr[c + 1]):
            v = lits[q] >> 1
            occ_cl[fill[v]] = c
            occ_sign[fill[v]] = lits[q] & 1
            fill[v] += 1

    ntrue = np.zeros(ncl, np.int32)
    nfalse = np.zeros(ncl, np.int32)
    assign = np.full(nv, -1, np.int8)
    trail = np.empty(nv + 1, np.int64)
    tlen = 0
    qhead = 0
    cap = 16
    sols = np.zeros((cap, nv), np.uint8)
    nsol = 0
    nodes = 0

    for c in range(ncl):
        if ptr[c + 1] - ptr[c] == 1:
            v = lits[ptr[c]] >> 1
            want = lits[ptr[c]] & 1
            if assign[v] == -1:
                assign[v] = want
                trail[tlen] = v
                tlen += 1
            elif assign[v] != want:
                return sols[:0], 0, nodes
    for v in range(nv):
        if assume[v] >= 0:
            if assign[v] == -1:
                assign[v] = assume[v]
                trail[tlen] = v
                tlen += 1
            elif assign[v] != assume[v]:
                return sols[:0], 0, nodes
    ok, qhead, tlen = _propagate(qhead, tlen, assign, trail, occ_ptr, occ_cl, occ_sign, ptr, lits, ntrue, nfalse)
    if not ok:
        return sols[:0], 0, nodes

    dvar = np.empty(nv + 1, np.int64)
    dstart = np.empty(nv + 1, np.int64)
    dphase = np.empty(nv + 1, np.int8)
    level = 0
    status = 0
    while True:
        v = -1
        for i in range(nv):
            if assign[i] == -1:
                v = i
                break
        back = False
        if v == -1:
            if nsol == cap:
                grown = np.zeros((cap * 2, nv), np.uint8)
                grown[:cap] = sols
                sols = grown
                cap *= 2
            for i in range(nv):
                sols[nsol, i] = assign[i]
            nsol += 1
            if nsol >= max_solutions:
                status = 1
                break
            back = True
        else:
            nodes += 1
            if node_budget > 0 and nodes > node_budget:
                status = 2
                break
            dvar[level] = v
            dstart[level] = tlen
            dphase[level] = 0
            level += 1
            assign[v] = 0
            trail[tlen] = v
            tlen += 1
            ok, qhead, tlen = _propagate(qhead, tlen, assign, trail, occ_ptr, occ_cl, occ_sign, ptr, lits, ntrue, nfalse)
            back = not ok
        if back:
            resumed = False
            while level > 0:
                lv = level - 1
                qhead, tlen = _undo(dstart[lv], qhead, tlen, assign, trail, occ_ptr, occ_cl, occ_sign, ntrue, nfalse)
                if dphase[lv] == 0:
                    dphase[lv] = 1
                    w = dvar[lv]
                    assign[w] = 1
                    trail[tlen] = w
                    tlen += 1
                    ok, qhead, tlen = _propagate(qhead, tlen, assign, trail, occ_ptr, occ_cl, occ_sign, ptr, lits, ntrue, nfalse)
                    if ok:
                        resumed = True
                        break
                else:
                    level -= 1
            if not resumed:
                break
    return sols[:nsol], status, nodes


# ---------------------------------------------------- derived-matroid closure


@njit
def is_dependent(x, anti, r):
    """x contains a member of the antichain, or has more than r elements."""
    if popcount(x) > r or (anti.shape[0] and anti[0] == 0):
        return True
    sub = x
    while sub:
        if _contains(anti, sub):
            return True
        sub = (sub - 1) & x
    return False


@njit
def eps_round(anti, r):
    """One elimination round over pairs of minimal dependent sets.

    For minimal A1 != A2 the intersection is a proper subset of a minimal
    set, hence independent, so every common element C is eligible and
    (A1 | A2) - C is produced. Sets already dependent (or larger than r)
    are dropped. ``anti`` must be sorted.
    """
    na = anti.shape[0]
    buf = np.empty(1024, np.int64)
    cnt = 0
    for i in range(na):
        a1 = anti[i]
        for j in range(i + 1, na):
            a2 = anti[j]
            inter = a1 & a2
            if inter == 0:
                continue
            both = a1 | a2
            if popcount(both) - 1 > r:
                continue
            cs = inter
            while cs:
                cb = cs & -cs
                cs ^= cb
                g = both ^ cb
                if is_dependent(g, anti, r):
                    continue
                if cnt == buf.shape[0]:
                    grown = np.empty(cnt * 2, np.int64)
                    grown[:cnt] = buf
                    buf = grown
                buf[cnt] = g
                cnt += 1
    return np.unique(buf[:cnt])


@njit
def minimal_members(cands):
    """Members of the sorted array with no proper subset in the array."""
    keep = np.ones(cands.shape[0], np.bool_)
    if cands.shape[0] and cands[0] == 0:
        keep[1:] = False
        return cands[keep]
    for i in range(cands.shape[0]):
        x = cands[i]
        sub = (x - 1) & x
        while sub:
            if _contains(cands, sub):
                keep[i] = False
                break
            sub = (sub - 1) & x
    return cands[keep]


# ------------------------------------------------------------- val_X tables


@njit
def _union_best_length_jit(xmasks, m):
    size = np.int64(1) << m
    best = np.full(size, -1, np.int64)
    best[0] = 0
    for u in range(size):
        bu = best[u]
        if bu < 0:
            continue
        for q in range(xmasks.shape[0]):
            x = xmasks[q]
            if x & ~u:
                v = u | x
                if best[v] < bu + 1:
                    best[v] = bu + 1
    return best


def _union_best_length_numpy(xmasks, m):
    size = 1 << m
    best = np.full(size, -1, np.int64)
    best[0] = 0
    pc = popcount_table(m)
    # a step always enlarges the union, so popcount layers are processed in order
    for k in range(m):
        layer = np.nonzero((pc == k) & (best >= 0))[0]
        if not len(layer):
            continue
        step = best[layer] + 1
        for x in xmasks.tolist():
            sel = (x & ~layer) != 0
            if sel.any():
                np.maximum.at(best, layer[sel] | x, step[sel])
    return best


def union_best_length(xmasks: np.ndarray, m: int) -> np.ndarray:
    """Longest proper sequence (each set brings an element not in the
    running union) ending at each union; -1 where unreachable."""
    if USE_NUMBA:
        return _union_best_length_jit(xmasks, m)
    return _union_best_length_numpy(xmasks, m)


def valx_from_best(best: np.ndarray, m: int) -> np.ndarray:
    """val(F) = min over reachable u of |F | u| - best[u].

    Equal to min over T containing F of |T| - h[T], where h[T] is the best
    length of any union inside T; both are O(m 2^m) transforms.
    """
    h = best.copy()
    for i in range(m):
        lo, hi = _bitviews(h, i)
        np.maximum(hi, lo, out=hi)
    out = popcount_table(m).astype(np.int64) - h
    for i in range(m):
        lo, hi = _bitviews(out, i)
        np.minimum(lo, hi, out=lo)
    return out


def submodular_violation(values: np.ndarray, m: int) -> tuple[int, int]:
    """(A, B) with f(A)+f(B) < f(A|B)+f(A&B), or (-1, -1).

    Uses the local form f(S+i)+f(S+j) >= f(S+i+j)+f(S), which is equivalent
    on the boolean lattice.
    """
    idx = np.arange(1 << m, dtype=np.int64)
    for i in range(m):
        for j in range(i + 1, m):
            S = idx[(idx >> i & 1 == 0) & (idx >> j & 1 == 0)]
            a, b = S | 1 << i, S | 1 << j
            bad = values[a] + values[b] < values[a | b] + values[S]
            if bad.any():
                k = int(np.argmax(bad))
                return int(a[k]), int(b[k])
    return -1, -1


@njit
def minimal_outside(cands, anti):
    """Members of ``cands`` containing no member of the sorted ``anti``."""
    keep = np.ones(cands.shape[0], np.bool_)
    # anti is sorted, so an empty member sits first and is in everything
    if anti.shape[0] and anti[0] == 0:
        keep[:] = False
        return keep
    for i in range(cands.shape[0]):
        x = cands[i]
        sub = x
        while sub:
            if _contains(anti, sub):
                keep[i] = False
                break
            sub = (sub - 1) & x
    return keep


# ----------------------------------------------------------------- lattices


@njit
def _join_table_jit(leq, order):
    m = leq.shape[0]
    table = np.empty((m, m), np.int64)
    for x in range(m):
        table[x, x] = x
        for y in range(x + 1, m):
            z = -1
            for k in range(m):
                w = order[k]
                if leq[x, w] and leq[y, w]:
                    z = w
                    break
            if z < 0:
                return table, x, y
            for w in range(m):
                if leq[x, w] and leq[y, w] and not leq[z, w]:
                    return table, x, y
            table[x, y] = z
            table[y, x] = z
    return table, -1, -1


def _join_table_numpy(leq, order):
    m = leq.shape[0]
    table = np.empty((m, m), np.int64)
    leq_sorted = leq[:, order]
    for x in range(m):
        common = leq[x][None, :] & leq
        common_sorted = leq_sorted[x][None, :] & leq_sorted
        has = common_sorted.any(axis=1)
        if not has.all():
            y = int(np.argmin(has))
            return table, x, y
        z = order[np.argmax(common_sorted, axis=1)]
        bad = (common & ~leq[z]).any(axis=1)
        if bad.any():
            return table, x, int(np.argmax(bad))
        table[x] = z
    return table, -1, -1


def join_table(leq: np.ndarray, order: np.ndarray):
    """Least-upper-bound table; returns (table, x, y) with x = -1 on success
    and (x, y) a pair without a unique join otherwise."""
    if USE_NUMBA:
        return _join_table_jit(leq, order)
    return _join_table_numpy(leq, order)


# ------------------------------------------------------------ numpy tables


def _bitviews(arr: np.ndarray, i: int):
    view = arr.reshape(-1, 2, 1 << i)
    return view[:, 0, :], view[:, 1, :]


def down_closure_table(table: np.ndarray, m: int) -> np.ndarray:
    """out[S] = any(table[T] for T superset of S)."""
    out = table.astype(np.bool_).copy()
    for i in range(m):
        lo, hi = _bitviews(out, i)
        lo |= hi
    return out


def up_closure_table(table: np.ndarray, m: int) -> np.ndarray:
    """out[S] = any(table[T] for T subset of S)."""
    out = table.astype(np.bool_).copy()
    for i in range(m):
        lo, hi = _bitviews(out, i)
        hi |= lo
    return out


def popcount_table(m: int) -> np.ndarray:
    return np.bitwise_count(np.arange(1 << m, dtype=np.uint64)).astype(np.int8)


def rank_table_from_independent(indep: np.ndarray, m: int) -> np.ndarray:
    """rank[S] = largest independent subset size, from an independence table."""
    rank = np.where(indep, popcount_table(m), 0).astype(np.int8)
    for i in range(m):
        lo, hi = _bitviews(rank, i)
        np.maximum(hi, lo, out=hi)
    return rank


def rank_table_from_bases(bases: np.ndarray, m: int) -> np.ndarray:
    seed = np.zeros(1 << m, dtype=np.bool_)
    seed[bases] = True
    return rank_table_from_independent(down_closure_table(seed, m), m)
