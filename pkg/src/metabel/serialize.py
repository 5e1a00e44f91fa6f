"""JSON encodings for every domain value, and validating file parsers."""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Any

from .algebra import Algebra
from .cohomo import ExtCatalog
from .codimone import TPair, validate_tpair
from .datum import DiscreteBimodule, DiscreteCocycle, MetabelianDatum
from .dimone import BilinearForm
from .errors import InvariantViolation, ParseError
from .exactla import Matrix, Vector


def matrix_to_json(m: Matrix) -> dict:
    return {"p": m.p, "rows": m.rows, "cols": m.cols, "entries": m.entries}


def vector_to_json(v: Vector) -> dict:
    return {"p": v.p, "coords": list(v.coords)}


def algebra_to_json(a: Algebra) -> dict:
    out = {"p": a.p, "dim": a.dim, "sc": a.sc.tolist()}
    if a.labels is not None:
        out["labels"] = list(a.labels)
    return out


def bimodule_to_json(b: DiscreteBimodule) -> dict:
    return {"p": b.p, "dimP": b.dim_p, "dimV": b.dim_v,
            "right": [matrix_to_json(m) for m in b.right],
            "left": [matrix_to_json(m) for m in b.left]}


def datum_to_json(d: MetabelianDatum) -> dict:
    out = bimodule_to_json(d.bimodule)
    out["theta"] = [[vector_to_json(v) for v in row] for row in d.cocycle.theta]
    return out


def form_to_json(t: BilinearForm) -> dict:
    return matrix_to_json(t.matrix)


def tpair_to_json(t: TPair) -> dict:
    return {"p": t.p, "X": t.X.entries, "Y": t.Y.entries}


def catalog_to_json(cat: ExtCatalog) -> list[dict]:
    return [{"bimodule": bimodule_to_json(e.bimodule),
             "thetaRep": [[vector_to_json(v) for v in row] for row in e.theta.theta],
             "algebra": algebra_to_json(e.algebra.total)}
            for e in cat.entries]


_INT_LIST = re.compile(r"\[[\s\d,-]*\]")


def dumps(obj: Any) -> str:
    """Indented JSON with every flat integer list kept on one line."""
    text = json.dumps(obj, indent=2)
    return _INT_LIST.sub(lambda m: json.dumps(json.loads(m.group())), text) + "\n"


# --- parsing -----------------------------------------------------------------

def _field(obj: dict, name: str, kind=None, where: str = ""):
    if not isinstance(obj, dict):
        raise ParseError(f"{where or 'value'}: expected an object")
    if name not in obj:
        raise ParseError(f"{where}{'.' if where else ''}{name}: missing field")
    value = obj[name]
    if kind is int and (not isinstance(value, int) or isinstance(value, bool)):
        raise ParseError(f"{where}{'.' if where else ''}{name}: expected an integer")
    if kind is list and not isinstance(value, list):
        raise ParseError(f"{where}{'.' if where else ''}{name}: expected an array")
    return value


def _prime(obj: dict, where: str = "") -> int:
    p = _field(obj, "p", int, where)
    try:
        from .exactla import modulus
        return modulus(p)
    except ValueError as exc:
        raise ParseError(f"{where}.p: {exc}") from exc


def _int_grid(value, shape: tuple[int, ...], where: str):
    def check(v, dims, path):
        if not dims:
            if not isinstance(v, int) or isinstance(v, bool):
                raise ParseError(f"{path}: expected an integer")
            return
        if not isinstance(v, list) or len(v) != dims[0]:
            raise ParseError(f"{path}: expected an array of length {dims[0]}")
        for i, item in enumerate(v):
            check(item, dims[1:], f"{path}[{i}]")
    check(value, shape, where)
    return value


def matrix_from_json(obj: dict, where: str = "matrix") -> Matrix:
    p = _prime(obj, where)
    rows = _field(obj, "rows", int, where)
    cols = _field(obj, "cols", int, where)
    entries = _int_grid(_field(obj, "entries", list, where), (rows, cols), f"{where}.entries")
    return Matrix(entries, p, (rows, cols))


def vector_from_json(obj: dict, where: str = "vector", dim: int | None = None) -> Vector:
    p = _prime(obj, where)
    coords = _field(obj, "coords", list, where)
    _int_grid(coords, (len(coords) if dim is None else dim,), f"{where}.coords")
    return Vector(coords, p)


def algebra_from_json(obj: dict) -> Algebra:
    p = _prime(obj, "algebra")
    n = _field(obj, "dim", int, "algebra")
    sc = _int_grid(_field(obj, "sc", list, "algebra"), (n, n, n), "algebra.sc")
    labels = obj.get("labels")
    if labels is not None and (not isinstance(labels, list) or len(labels) != n):
        raise ParseError(f"algebra.labels: expected {n} strings")
    return Algebra(sc, p, labels)


def bimodule_from_json(obj: dict, where: str = "datum") -> DiscreteBimodule:
    p = _prime(obj, where)
    m = _field(obj, "dimP", int, where)
    n = _field(obj, "dimV", int, where)
    mats = {}
    for side in ("right", "left"):
        items = _field(obj, side, list, where)
        if len(items) != m:
            raise ParseError(f"{where}.{side}: expected {m} matrices")
        mats[side] = [matrix_from_json(x, f"{where}.{side}[{i}]") for i, x in enumerate(items)]
        for i, mat in enumerate(mats[side]):
            if mat.shape != (n, n) or mat.p != p:
                raise ParseError(f"{where}.{side}[{i}]: expected a {n}x{n} matrix over F_{p}")
    return DiscreteBimodule(p, m, n, mats["right"], mats["left"])


def datum_from_json(obj: dict, validate: bool = True) -> MetabelianDatum:
    b = bimodule_from_json(obj)
    theta = _field(obj, "theta", list, "datum")
    if len(theta) != b.dim_p or any(not isinstance(r, list) or len(r) != b.dim_p for r in theta):
        raise ParseError(f"datum.theta: expected a {b.dim_p}x{b.dim_p} table")
    table = [[vector_from_json(v, f"datum.theta[{i}][{j}]", b.dim_v) for j, v in enumerate(row)]
             for i, row in enumerate(theta)]
    d = MetabelianDatum(b, DiscreteCocycle(b, table))
    if validate:
        report = d.validate()
        if not report:
            raise InvariantViolation(report.messages()[0])
    return d


def form_from_json(obj: dict) -> BilinearForm:
    m = matrix_from_json(obj, "form")
    if m.rows != m.cols:
        raise InvariantViolation("form: matrix must be square")
    return BilinearForm(m)


def tpair_from_json(obj: dict) -> TPair:
    p = _prime(obj, "pair")
    x = _field(obj, "X", list, "pair")
    n = len(x)
    X = Matrix(_int_grid(x, (n, n), "pair.X"), p, (n, n))
    Y = Matrix(_int_grid(_field(obj, "Y", list, "pair"), (n, n), "pair.Y"), p, (n, n))
    t = validate_tpair(X, Y)
    if t is None:
        raise InvariantViolation("pair: need X^2 = Y^2 = 0 and XY = YX")
    return t


def catalog_from_json(obj: list) -> list[tuple[DiscreteBimodule, DiscreteCocycle, Algebra]]:
    if not isinstance(obj, list):
        raise ParseError("catalog: expected an array")
    out = []
    for i, item in enumerate(obj):
        where = f"catalog[{i}]"
        b = bimodule_from_json(_field(item, "bimodule", None, where), f"{where}.bimodule")
        rows = _field(item, "thetaRep", list, where)
        table = [[vector_from_json(v, f"{where}.thetaRep", b.dim_v) for v in row] for row in rows]
        out.append((b, DiscreteCocycle(b, table), algebra_from_json(_field(item, "algebra", None, where))))
    return out


def load_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def parse_algebra(path) -> Algebra:
    return algebra_from_json(load_json(path))


def parse_datum(path, validate: bool = True) -> MetabelianDatum:
    return datum_from_json(load_json(path), validate)


def parse_form(path) -> BilinearForm:
    return form_from_json(load_json(path))


def parse_tpair(path) -> TPair:
    return tpair_from_json(load_json(path))
