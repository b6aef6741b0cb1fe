"""Named matroids with fixed labelings.

Labelings (all 0-based):

* ``K4``: edges 01, 02, 03, 12, 13, 23 of the complete graph.
* ``Fano`` / ``NonFano``: columns of ``_FANO_COLS`` over GF(2) / GF(3);
  the only extra basis of NonFano is ``{3, 4, 5}``.
* ``P6``: rank 3 on 6 points with the single line ``{0,1,2}``.
* ``Q6``: lines ``{0,1,2}`` and ``{0,3,4}`` meeting in a point.
* ``R6``: disjoint lines ``{0,1,2}`` and ``{3,4,5}``.
* ``AG32``: vectors ``(1, x)`` for ``x`` in GF(2)^3, ``x`` in binary order.
* ``MatrixA``: columns of the 3x7 GF(2) matrix below.
* ``TernaryDowling3``: GF(3) vectors e1, e2, e3, e1+e2, e1-e2, e1+e3,
  e1-e3, e2+e3, e2-e3.
* ``U(k,n)``: rank ``k`` on ``n`` elements.
"""

from __future__ import annotations

import re
from itertools import product

from .errors import UnknownName
from .gfp import GFMatrix
from .matroid import Matroid, from_matrix, graphic, rank3_from_lines, uniform

_FANO_COLS = [
    [1, 0, 0, 1, 1, 0, 1],
    [0, 1, 0, 1, 0, 1, 1],
    [0, 0, 1, 0, 1, 1, 1],
]

MATRIX_A = GFMatrix(2, [
    [1, 0, 0, 1, 1, 1, 1],
    [0, 1, 1, 1, 0, 1, 1],
    [0, 0, 1, 0, 1, 1, 1],
])

K4_EDGES = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def _ag32() -> Matroid:
    cols = [(1,) + x for x in product((0, 1), repeat=3)]
    return from_matrix(GFMatrix(2, [list(r) for r in zip(*cols)]))


def _dowling3() -> Matroid:
    cols = [
        (1, 0, 0), (0, 1, 0), (0, 0, 1),
        (1, 1, 0), (1, 2, 0), (1, 0, 1), (1, 0, 2), (0, 1, 1), (0, 1, 2),
    ]
    return from_matrix(GFMatrix(3, [list(r) for r in zip(*cols)]))


_BUILDERS = {
    "K4": lambda: graphic(4, K4_EDGES),
    "Fano": lambda: from_matrix(GFMatrix(2, _FANO_COLS)),
    "FanoDual": lambda: from_matrix(GFMatrix(2, _FANO_COLS)).dual,
    "NonFano": lambda: from_matrix(GFMatrix(3, _FANO_COLS)),
    "NonFanoDual": lambda: from_matrix(GFMatrix(3, _FANO_COLS)).dual,
    "P6": lambda: rank3_from_lines(6, [[0, 1, 2]]),
    "Q6": lambda: rank3_from_lines(6, [[0, 1, 2], [0, 3, 4]]),
    "R6": lambda: rank3_from_lines(6, [[0, 1, 2], [3, 4, 5]]),
    "AG32": _ag32,
    "MatrixA": lambda: from_matrix(MATRIX_A),
    "MatrixADual": lambda: from_matrix(MATRIX_A).dual,
    "TernaryDowling3": _dowling3,
}

_UNIFORM = re.compile(r"^U\(\s*(\d+)\s*,\s*(\d+)\s*\)$")

NAMES = tuple(_BUILDERS) + ("U(k,n)",)


def catalog(name: str) -> Matroid:
    """Build a named matroid; ``catalog:`` prefixes are accepted."""
    if name.startswith("catalog:"):
        name = name[len("catalog:"):]
    hit = _UNIFORM.match(name)
    if hit:
        return uniform(int(hit.group(1)), int(hit.group(2)))
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise UnknownName(f"unknown catalog matroid {name!r}") from None
