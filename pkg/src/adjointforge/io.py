"""Loading matroids, lattices and subsets from files or catalog names."""

from __future__ import annotations

import json
from pathlib import Path

from .bits import mask_of
from .catalog import MATRIX_A, catalog
from .errors import AdjointForgeError, FileFormatError, UnknownName
from .gfp import GFMatrix
from .lattice import FiniteLattice, lattice_from_json, lattice_of_flats
from .matroid import Matroid, from_bases, from_matrix


def read_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise FileFormatError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: invalid json ({exc.msg})") from exc


def matroid_from_json(obj) -> tuple[Matroid, GFMatrix | None]:
    """Matroid plus its matrix when the input was ``{"field", "matrix"}``."""
    if not isinstance(obj, dict):
        raise FileFormatError("matroid json must be an object")
    if "bases" in obj:
        try:
            n = int(obj["n"])
            bases = [[int(x) for x in b] for b in obj["bases"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise FileFormatError(f"bad matroid json: {exc}") from exc
        if any(x < 0 or x >= n for b in bases for x in b):
            raise FileFormatError("basis element outside range(n)")
        return from_bases(n, bases), None
    if "matrix" in obj:
        try:
            A = GFMatrix(int(obj["field"]), obj["matrix"])
        except (KeyError, TypeError) as exc:
            raise FileFormatError(f"bad matrix json: {exc}") from exc
        except AdjointForgeError:
            raise
        except ValueError as exc:
            raise FileFormatError(f"bad matrix json: {exc}") from exc
        return from_matrix(A), A
    raise FileFormatError('matroid json needs "bases" or "matrix"')


def _is_file(spec: str) -> bool:
    return not spec.startswith("catalog:") and Path(spec).is_file()


def load_matroid_with_matrix(spec: str) -> tuple[Matroid, GFMatrix | None]:
    if not _is_file(spec):
        try:
            M = catalog(spec)
        except UnknownName:
            if spec.startswith("catalog:"):
                raise
            raise FileFormatError(f"{spec!r} is neither a file nor a catalog name") from None
        name = spec.removeprefix("catalog:")
        return M, MATRIX_A if name == "MatrixA" else None
    return matroid_from_json(read_json(spec))


def load_matroid(spec: str) -> Matroid:
    """A catalog name (``catalog:`` prefix optional) or a json file."""
    return load_matroid_with_matrix(spec)[0]


def load_lattice(spec: str) -> FiniteLattice:
    """A lattice json file, or any matroid spec (its lattice of flats)."""
    if not _is_file(spec):
        return lattice_of_flats(load_matroid(spec))
    obj = read_json(spec)
    if isinstance(obj, dict) and "leq_pairs" in obj:
        return lattice_from_json(obj)
    return lattice_of_flats(matroid_from_json(obj)[0])


def parse_subset(text: str) -> int:
    """``"0,2,5"``, ``"[0, 2, 5]"`` or ``""`` as a bitmask."""
    body = text.strip().strip("[]{}")
    if not body:
        return 0
    try:
        return mask_of(int(tok) for tok in body.replace(" ", ",").split(",") if tok)
    except ValueError as exc:
        raise FileFormatError(f"bad subset {text!r}") from exc


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=False)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text
