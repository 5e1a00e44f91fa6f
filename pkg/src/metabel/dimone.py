"""Metabelian algebras with one-dimensional derived algebra.

Every such algebra is P_theta: basis (F_1..F_n, E) with F_i F_j = theta_ij E.
Two of them are isomorphic exactly when the forms are homothetic, and the
automorphisms of P_theta are the triples (u, lam, psi) acting by
(p, x) -> (psi p, lam(p) + u x).
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np

from .algebra import (Algebra, ExtensionTriple, automorphism_group,
                      derived_subalgebra, find_isomorphism, is_associative,
                      is_metabelian)
from .datum import DiscreteBimodule, DiscreteCocycle, MetabelianDatum, metabelian_product
from .errors import InternalError, InvalidParams, UnknownFamily
from .exactla import (Matrix, PrimeField, gl_array, matrices_array, modulus)


@dataclass(frozen=True)
class BilinearForm:
    """theta(e_i, e_j) = matrix[i, j]."""

    matrix: Matrix

    def __post_init__(self):
        if self.matrix.rows != self.matrix.cols:
            raise ValueError("a bilinear form needs a square matrix")

    @classmethod
    def of(cls, entries, p) -> BilinearForm:
        return cls(Matrix(entries, p))

    @property
    def n(self) -> int:
        return self.matrix.rows

    @property
    def p(self) -> int:
        return self.matrix.p

    @property
    def array(self) -> np.ndarray:
        return self.matrix.array

    def is_zero(self) -> bool:
        return self.matrix.is_zero()

    def __call__(self, x, y) -> int:
        return int(np.asarray(x) @ self.array @ np.asarray(y) % self.p)


@dataclass(frozen=True)
class HomothetyWitness:
    u: int
    C: Matrix


@dataclass(frozen=True)
class GElement:
    """(u, lam, psi); ``lam`` is a linear functional given as a row of coefficients."""

    u: int
    lam: tuple[int, ...]
    psi: Matrix

    def __mul__(self, other: GElement) -> GElement:
        p = self.psi.p
        lam = (np.array(self.lam) @ other.psi.array + self.u * np.array(other.lam)) % p
        return GElement(self.u * other.u % p, tuple(int(x) for x in lam), self.psi @ other.psi)

    def inverse(self) -> GElement:
        p = self.psi.p
        uinv = pow(self.u, -1, p)
        psi_inv = self.psi.inverse()
        lam = (-uinv * (np.array(self.lam) @ psi_inv.array)) % p
        return GElement(uinv, tuple(int(x) for x in lam), psi_inv)

    def as_matrix(self) -> Matrix:
        """Matrix of (p, x) -> (psi p, lam(p) + u x) on the basis (F_1..F_n, E)."""
        n, p = self.psi.rows, self.psi.p
        m = np.zeros((n + 1, n + 1), dtype=np.int64)
        m[:n, :n] = self.psi.array
        m[n, :n] = self.lam
        m[n, n] = self.u
        return Matrix._wrap(m, p)


def build_P_theta(theta: BilinearForm) -> ExtensionTriple:
    n, p = theta.n, theta.p
    b = DiscreteBimodule.trivial(n, 1, p)
    e = metabelian_product(MetabelianDatum(b, DiscreteCocycle.from_array(b, theta.array)))
    expected = 0 if theta.is_zero() else 1
    if derived_subalgebra(e.total).dim != expected:
        raise InternalError(f"P_theta has derived dimension != {expected}")
    return e


def _congruence_hits(t1: np.ndarray, t2: np.ndarray, u: int, gl: np.ndarray, p: int) -> np.ndarray:
    """Indices of C in ``gl`` with u * t1 == C^T t2 C."""
    rhs = np.einsum("gki,kl,glj->gij", gl, t2, gl) % p
    return np.nonzero((rhs == (u * t1) % p).reshape(gl.shape[0], -1).all(axis=1))[0]


def homothetic(t1: BilinearForm, t2: BilinearForm, budget: int | None = None,
               units=None) -> HomothetyWitness | None:
    """First (u, C), u ascending then C in encoding order, with u t1 = C^T t2 C.

    Equal forms short-circuit to (1, I).
    """
    if (t1.n, t1.p) != (t2.n, t2.p):
        raise ValueError("forms must share dimension and field")
    p = t1.p
    gl = gl_array(t1.n, p, budget)
    if (units is None or 1 in units) and np.array_equal(t1.array, t2.array):
        return HomothetyWitness(1, Matrix.identity(t1.n, p))
    for u in (range(1, p) if units is None else units):
        hits = _congruence_hits(t1.array, t2.array, u, gl, p)
        if hits.size:
            return HomothetyWitness(u, Matrix._wrap(gl[hits[0]], p))
    return None


def isometric(t1: BilinearForm, t2: BilinearForm, budget: int | None = None) -> Matrix | None:
    w = homothetic(t1, t2, budget, units=(1,))
    return None if w is None else w.C


# --- census ------------------------------------------------------------------

@dataclass
class AgreementReport:
    n: int
    p: int
    forms: list[BilinearForm]
    iso: np.ndarray
    hom: np.ndarray
    isometry: np.ndarray
    disagreements: list[tuple[int, int]] = field(default_factory=list)

    @property
    def pairs(self) -> int:
        return self.iso.size

    @property
    def ok(self) -> bool:
        return not self.disagreements

    def classes(self, mode: str = "homothety") -> list[list[int]]:
        rel = {"homothety": self.hom, "isometry": self.isometry, "isomorphism": self.iso}[mode]
        seen, out = set(), []
        for i in range(len(self.forms)):
            if i in seen:
                continue
            cls = [j for j in range(len(self.forms)) if rel[i, j]]
            seen.update(cls)
            out.append(cls)
        return out

    def is_equivalence(self, mode: str = "homothety") -> bool:
        rel = {"homothety": self.hom, "isometry": self.isometry, "isomorphism": self.iso}[mode]
        n = rel.shape[0]
        if not rel.diagonal().all() or not (rel == rel.T).all():
            return False
        r = rel.astype(np.int64)
        return bool(((r @ r > 0) <= rel).all())


@lru_cache(maxsize=4)
def _census(n: int, p: int) -> tuple[list[BilinearForm], list[Algebra]]:
    forms = [BilinearForm(Matrix._wrap(f, p)) for f in matrices_array(n, n, p)]
    return forms, [build_P_theta(t).total for t in forms]


def _row_verdicts(args):
    i, n, p = args
    forms, algebras = _census(n, p)
    t1, a = forms[i], algebras[i]
    iso, hom, isom = [], [], []
    for t2, b in zip(forms, algebras):
        iso.append(find_isomorphism(a, b) is not None)
        w = homothetic(t1, t2)
        hom.append(w is not None)
        isom.append(w is not None and (w.u == 1 or isometric(t1, t2) is not None))
    return iso, hom, isom


def homothety_agreement(n: int, field: PrimeField | int, jobs: int = 1) -> AgreementReport:
    """Compare algebra isomorphism of P_theta with homothety over all ordered pairs."""
    p = modulus(field)
    forms = matrices_array(n, n, p)
    tasks = [(i, n, p) for i in range(forms.shape[0])]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            rows = list(ex.map(_row_verdicts, tasks))
    else:
        rows = [_row_verdicts(t) for t in tasks]
    report = AgreementReport(
        n, p, [BilinearForm(Matrix._wrap(f, p)) for f in forms],
        np.array([r[0] for r in rows]), np.array([r[1] for r in rows]),
        np.array([r[2] for r in rows]))
    report.disagreements = [tuple(int(x) for x in ij)
                            for ij in np.argwhere(report.iso != report.hom)]
    return report


# --- automorphisms ----------------------------------------------------------

def aut_group_G(theta: BilinearForm, budget: int | None = None) -> list[GElement]:
    """All (u, lam, psi) with u theta(p, q) = theta(psi p, psi q).

    Checks closure under the group law and that the induced maps are exactly
    the brute-force automorphisms of P_theta.
    """
    if theta.is_zero():
        raise InvalidParams("the automorphism description needs theta != 0")
    n, p = theta.n, theta.p
    gl = gl_array(n, p, budget)
    lams = matrices_array(1, n, p).reshape(-1, n)
    group = []
    for u in range(1, p):
        for g in _congruence_hits(theta.array, theta.array, u, gl, p):
            psi = Matrix._wrap(gl[g], p)
            group.extend(GElement(u, tuple(int(x) for x in lam), psi) for lam in lams)
    members = set(group)
    for g in group:
        if g.inverse() not in members:
            raise InternalError(f"{g} has no inverse in the group")
        for h in group:
            gh = g * h
            if gh not in members:
                raise InternalError("group law leaves the set")
            if g.as_matrix() @ h.as_matrix() != gh.as_matrix():
                raise InternalError("composition does not follow the group law")
    auts = set(automorphism_group(build_P_theta(theta).total, budget))
    images = {g.as_matrix() for g in group}
    if len(images) != len(group) or images != auts:
        raise InternalError(
            f"|G| = {len(group)} but |Aut| = {len(auts)} or the images differ")
    return group


# --- catalogs ---------------------------------------------------------------

@dataclass(frozen=True)
class CatalogEntry:
    family: str
    kind: str
    params: tuple[str, ...]
    template: dict
    dim: int


@lru_cache(maxsize=1)
def _catalog_data() -> dict:
    text = resources.files("metabel").joinpath("data/catalogs.json").read_text()
    return json.loads(text)


def catalog_entries() -> dict[str, CatalogEntry]:
    out = {}
    for fam, t in _catalog_data().items():
        dim = t["n"] if t["kind"] == "form" else len(t["basis"])
        out[fam] = CatalogEntry(fam, t["kind"], tuple(t["params"]), t, dim)
    return out


def _subst(value, params: dict[str, int]) -> int:
    if isinstance(value, str):
        return params[value]
    return value


def catalog(family: str, params: dict[str, int] | None = None,
            field: PrimeField | int = 2) -> BilinearForm | Algebra:
    """Instantiate a canonical-form family over F_p.

    These are classification lists over algebraically closed fields of
    characteristic != 2; over F_p they are formal instantiations only.
    """
    entries = catalog_entries()
    if family not in entries:
        raise UnknownFamily(f"unknown family {family!r}; known: {sorted(entries)}")
    entry = entries[family]
    p = modulus(field)
    params = dict(params or {})
    if set(params) != set(entry.params):
        raise InvalidParams(f"{family} takes parameters {list(entry.params)}, got {sorted(params)}")
    for k, v in params.items():
        if not isinstance(v, (int, np.integer)) or isinstance(v, bool):
            raise InvalidParams(f"parameter {k} must be an integer, got {v!r}")
    t = entry.template
    if entry.kind == "form":
        rows = [[_subst(x, params) for x in row] for row in t["matrix"]]
        return BilinearForm(Matrix(rows, p))
    basis = t["basis"]
    n = len(basis)
    sc = np.zeros((n, n, n), dtype=np.int64)
    e = basis.index("E")
    for left, right, coeff in t["products"]:
        sc[basis.index(left), basis.index(right), e] = _subst(coeff, params)
    a = Algebra(sc, p, basis)
    if not (is_associative(a) and is_metabelian(a) and derived_subalgebra(a).dim == 1):
        raise InternalError(f"catalog algebra {family} fails its structural checks over F_{p}")
    return a


def catalog_algebra_for(form_family: str) -> str:
    return catalog_entries()[form_family].template["algebra"]
