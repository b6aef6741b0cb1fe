"""Recomputing the reference adjoint catalogs and diffing against the
expected values, which live here as plain data."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .adjoint import enumerate_adjoints, is_adjoint, sandwich_bounds_cached
from .catalog import MATRIX_A, catalog
from .errors import AdjointForgeError, ExpectationMismatch
from .iso import is_isomorphic
from .matroid import from_bases, linear_derived_matroid, weak_order_leq

# budget for the default (not --long) AG32 search
AG32_NODE_BUDGET = 200_000


def _row(count, histogram, **extra) -> dict:
    return {"count": count, "histogram": histogram, **extra}


EXPECTED: dict[str, dict] = {
    "K4": _row(2, {28: 1, 29: 1}, types={28: "Fano", 29: "NonFano"}, minimal=[28], maximal=[29]),
    "FanoDual": _row(1, {28: 1}, types={28: "Fano"}, minimal=[28], maximal=[28]),
    "NonFanoDual": _row(1, {68: 1}, types={68: "TernaryDowling3"}, maximal=[68]),
    "Q6": _row(4, {136: 1, 137: 2, 138: 1}, splits={136: [1], 137: [2], 138: [1]},
               minimal=[136], maximal=[138]),
    "R6": _row(64, {135: 1, 136: 6, 137: 15, 138: 20, 139: 15, 140: 6, 141: 1},
               splits={135: [1], 136: [6], 137: [9, 6], 138: [12, 8], 139: [9, 6], 140: [6], 141: [1]},
               minimal=[135], maximal=[141]),
    "P6": _row(64, {238: 1, 239: 6, 240: 15, 241: 20, 242: 15, 243: 6, 244: 1},
               splits={238: [1], 239: [6], 240: [9, 6], 241: [12, 8], 242: [9, 6], 243: [6], 244: [1]},
               minimal=[238], maximal=[244]),
    "MatrixA": _row(2, {304: 1, 318: 1}, linear_derived_bases=304, linear_derived_is=304,
                    weak_order_304_below_318=True),
    "MatrixADual": _row(2, {28: 1, 29: 1}, types={28: "Fano", 29: "NonFano"}, minimal=[28], maximal=[29]),
    "AG32": {"lopp_elements": 14, "lopp_rank": 4, "lopp_bases": 616, "lopp_is_matroid": True,
             "lopp_is_adjoint": True, "no_second_adjoint": True},
}

NAMES = tuple(EXPECTED)


@dataclass
class ReproResult:
    name: str
    expected: dict
    computed: dict
    seconds: float
    notes: list[str] = field(default_factory=list)

    @property
    def diff(self) -> dict:
        return {k: {"expected": v, "computed": self.computed.get(k)}
                for k, v in self.expected.items() if self.computed.get(k) != v}

    @property
    def match(self) -> bool:
        return not self.diff

    def to_json(self) -> dict:
        def keyed(d):
            return {k: ({str(a): b for a, b in v.items()} if isinstance(v, dict) else v) for k, v in d.items()}

        return {
            "name": self.name,
            "match": self.match,
            "seconds": round(self.seconds, 3),
            "expected": keyed(self.expected),
            "computed": keyed(self.computed),
            "diff": keyed(self.diff),
            "notes": self.notes,
        }


def _types(adjoints, wanted: dict) -> dict:
    out = {}
    for N in adjoints:
        k = len(N.bases)
        if k in wanted and k not in out:
            target = catalog(wanted[k])
            out[k] = wanted[k] if is_isomorphic(N, target) is not None else None
    return out


def _summary(rep, expected: dict) -> dict:
    comp = {"count": rep.count, "histogram": rep.histogram}
    if "splits" in expected:
        comp["splits"] = rep.class_splits()
    if "types" in expected:
        comp["types"] = _types(rep.adjoints, expected["types"])
    if "minimal" in expected:
        comp["minimal"] = sorted(len(N.bases) for N, f in zip(rep.adjoints, rep.minimal) if f)
    if "maximal" in expected:
        comp["maximal"] = sorted(len(N.bases) for N, f in zip(rep.adjoints, rep.maximal) if f)
    return comp


def _ag32(workers: int, long: bool) -> tuple[dict, list[str]]:
    M = catalog("AG32")
    b = sandwich_bounds_cached(M)
    comp = {"lopp_elements": b.m, "lopp_rank": b.r, "lopp_bases": len(b.mandatory)}
    try:
        N = from_bases(b.m, b.mandatory)
        comp["lopp_is_matroid"] = True
        comp["lopp_is_adjoint"] = is_adjoint(M, N)
    except AdjointForgeError:
        comp["lopp_is_matroid"] = False
        comp["lopp_is_adjoint"] = False
        N = None
    rep = enumerate_adjoints(M, workers=workers, node_budget=0 if long else AG32_NODE_BUDGET, classify=False)
    notes = [f"free r-sets {rep.free}, complete {rep.complete}"]
    # without --long a partial search can only fail to find a second adjoint
    comp["no_second_adjoint"] = all(A == N for A in rep.adjoints)
    if long or rep.complete:
        comp["count"] = rep.count
    if not rep.complete:
        notes.append("node budget exhausted; uniqueness holds only within the budget (use --long)")
    return comp, notes


def reproduce(name: str, workers: int = 1, long: bool = False, strict: bool = False) -> ReproResult:
    """Recompute one reference row; ``strict`` raises on mismatch."""
    if name not in EXPECTED:
        raise KeyError(f"no expectations for {name!r}; known: {', '.join(NAMES)}")
    t0 = time.perf_counter()
    expected = dict(EXPECTED[name])
    notes: list[str] = []
    if name == "AG32":
        comp, notes = _ag32(workers, long)
        if long:
            expected["count"] = 1
    else:
        M = catalog(name)
        rep = enumerate_adjoints(M, workers=workers)
        comp = _summary(rep, expected)
        if not rep.complete:
            notes.append("search incomplete")
        if name == "MatrixA":
            D = linear_derived_matroid(MATRIX_A)
            comp["linear_derived_bases"] = len(D.bases)
            same = [len(N.bases) for N in rep.adjoints if N == D]
            comp["linear_derived_is"] = same[0] if same else None
            by_count = {len(N.bases): N for N in rep.adjoints}
            comp["weak_order_304_below_318"] = (
                304 in by_count and 318 in by_count and weak_order_leq(by_count[304], by_count[318]))
    res = ReproResult(name, expected, comp, time.perf_counter() - t0, notes)
    if strict and not res.match:
        raise ExpectationMismatch(name, res.diff)
    return res


def reproduce_all(workers: int = 1, long: bool = False) -> list[ReproResult]:
    return [reproduce(n, workers=workers, long=long) for n in NAMES]
