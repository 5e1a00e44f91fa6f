"""Discrete cocycles, coboundaries and the enumeration of Ext(P0, V0).

Cocycle tables are flattened row-major as ``theta[j][j'][k]``.  A linear
map r: P -> V is stored as a dim_v x dim_p matrix whose column j is r(p_j);
as a vector it is flattened column by column, i.e. (r(p_1), r(p_2), ...).
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .algebra import ExtensionTriple, extension_equivalent
from .datum import (DiscreteBimodule, DiscreteCocycle, MetabelianDatum,
                    bimodule_violations, metabelian_product, validate_bimodule)
from .errors import BimoduleMismatch, InternalError, InvalidBimodule
from .exactla import (Matrix, PrimeField, QuotientSpace, Subspace, Vector,
                      _rref_array, check_budget, kernel, matrices_array,
                      modulus, quotient)


def _require_valid(b: DiscreteBimodule) -> None:
    report = validate_bimodule(b)
    if not report:
        raise InvalidBimodule("; ".join(report.messages()))


@dataclass(frozen=True)
class CocycleSpace:
    bimodule: DiscreteBimodule
    space: Subspace

    @property
    def ambient_dim(self) -> int:
        return self.space.ambient_dim

    def __len__(self):
        return self.space.cardinality()


@dataclass(frozen=True)
class CoboundarySpace:
    bimodule: DiscreteBimodule
    space: Subspace

    def __len__(self):
        return self.space.cardinality()


@dataclass(frozen=True)
class DH2:
    bimodule: DiscreteBimodule
    quotient: QuotientSpace

    def __len__(self):
        return len(self.quotient)

    def representatives(self) -> list[DiscreteCocycle]:
        return [DiscreteCocycle.from_array(self.bimodule, v.array)
                for v in self.quotient.transversal]


def _cocycle_equations(b: DiscreteBimodule) -> np.ndarray:
    """Rows of the linear system  L_i theta(j, j') = R_j' theta(i, j)."""
    m, n = b.dim_p, b.dim_v
    right, left = b.right_array, b.left_array
    idx = lambda j, jj: (j * m + jj) * n
    rows = []
    for i, j, jj in itertools.product(range(m), repeat=3):
        for r in range(n):
            row = np.zeros(m * m * n, dtype=np.int64)
            row[idx(j, jj):idx(j, jj) + n] += left[i][r]
            row[idx(i, j):idx(i, j) + n] -= right[jj][r]
            rows.append(row)
    return np.array(rows, dtype=np.int64).reshape(-1, m * m * n) % b.p


def cocycle_space(b: DiscreteBimodule) -> CocycleSpace:
    """DZ^2 as the kernel of the (linear) cocycle condition."""
    _require_valid(b)
    eqs = _cocycle_equations(b)
    dim = b.dim_p * b.dim_p * b.dim_v
    if eqs.shape[0] == 0:
        return CocycleSpace(b, Subspace.full(dim, b.p))
    return CocycleSpace(b, kernel(Matrix._wrap(eqs, b.p)))


def coboundary_map(b: DiscreteBimodule) -> Matrix:
    """Matrix of r -> dr, (dr)(p, q) = p |> r(q) + r(p) <| q."""
    m, n = b.dim_p, b.dim_v
    right, left = b.right_array, b.left_array
    cols = []
    for j0 in range(m):
        for k0 in range(n):
            r = np.zeros((m, n), dtype=np.int64)
            r[j0, k0] = 1
            d = np.zeros((m, m, n), dtype=np.int64)
            for j, jj in itertools.product(range(m), repeat=2):
                d[j, jj] = left[j] @ r[jj] + right[jj] @ r[j]
            cols.append(d.reshape(-1))
    if not cols:
        return Matrix.zeros(m * m * n, 0, b.p)
    return Matrix._wrap(np.stack(cols, axis=1), b.p)


def coboundary_space(b: DiscreteBimodule) -> CoboundarySpace:
    _require_valid(b)
    d = coboundary_map(b)
    space = Subspace.from_array(d.array.T, d.rows, b.p)
    if not space.issubspace(cocycle_space(b).space):
        raise InternalError("a coboundary fails the cocycle condition")
    return CoboundarySpace(b, space)


def dh2(b: DiscreteBimodule) -> DH2:
    return DH2(b, quotient(cocycle_space(b).space, coboundary_space(b).space))


def coboundary(b: DiscreteBimodule, r: Matrix) -> DiscreteCocycle:
    """The cocycle dr for r given as a dim_v x dim_p matrix."""
    flat = r.array.T.reshape(-1)
    return DiscreteCocycle.from_array(b, coboundary_map(b).array @ flat % b.p)


def cohomologous(c1: DiscreteCocycle, c2: DiscreteCocycle) -> Matrix | None:
    """Some r with theta1 = theta2 + dr, or None.

    Among all solutions the one with the lexicographically smallest
    flattening (r(p_1), r(p_2), ...) is returned.
    """
    if c1.bimodule != c2.bimodule:
        raise BimoduleMismatch("cocycles live over different bimodules")
    b = c1.bimodule
    d = coboundary_map(b)
    rhs = (c1.flat - c2.flat) % b.p
    k = d.cols
    if k == 0:
        return Matrix.zeros(b.dim_v, b.dim_p, b.p) if not rhs.any() else None
    aug = np.concatenate([d.array, rhs[:, None]], axis=1)
    red, piv = _rref_array(aug, b.p)
    if k in piv:
        return None
    x = np.zeros(k, dtype=np.int64)
    for row, pc in enumerate(piv):
        x[pc] = red[row, k]
    x = kernel(d).reduce_array(x)
    return Matrix._wrap(x.reshape(b.dim_p, b.dim_v).T.copy(), b.p)


# --- Ext enumeration -------------------------------------------------------

def enumerate_bimodules(dim_p: int, dim_v: int, field: PrimeField | int,
                        budget: int | None = None) -> list[DiscreteBimodule]:
    """All valid discrete bimodule structures, ordered by their (R, L) encoding."""
    p = modulus(field)
    per_side = p ** (dim_v * dim_v * dim_p)
    check_budget(per_side * per_side, budget)
    mats = matrices_array(dim_v, dim_v, p)
    # Same-side products must vanish, so only square-zero matrices can occur.
    nil = [m for m in mats if not (m @ m % p).any()]
    families = [np.array(t, dtype=np.int64).reshape(dim_p, dim_v, dim_v)
                for t in itertools.product(nil, repeat=dim_p)]
    ok_side = [f for f in families if not any(v[0] == "right_square" for v in
                                              bimodule_violations(f, np.zeros_like(f), p))]
    out = []
    for right in ok_side:
        for left in ok_side:
            if not bimodule_violations(right, left, p):
                out.append(DiscreteBimodule(
                    p, dim_p, dim_v,
                    tuple(Matrix._wrap(r, p) for r in right),
                    tuple(Matrix._wrap(m, p) for m in left)))
    out.sort(key=DiscreteBimodule.key)
    return out


@dataclass(frozen=True)
class ExtEntry:
    bimodule: DiscreteBimodule
    theta: DiscreteCocycle
    algebra: ExtensionTriple


@dataclass
class ExtCatalog:
    dim_p: int
    dim_v: int
    p: int
    entries: list[ExtEntry] = field(default_factory=list)
    summary: list[tuple[int, int, int, int]] = field(default_factory=list)
    datums_checked: int = 0
    failures: list[str] = field(default_factory=list)

    def __len__(self):
        return len(self.entries)

    @property
    def verified(self) -> bool:
        return not self.failures

    def summary_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bimodule_id", "dz2", "b2", "dh2"])
        w.writerows(self.summary)
        return buf.getvalue()


def all_datums(b: DiscreteBimodule) -> list[MetabelianDatum]:
    """Every cocycle over ``b`` as a datum, in coefficient order."""
    return [MetabelianDatum(b, DiscreteCocycle.from_array(b, v))
            for v in cocycle_space(b).space.elements_array()]


def ext_enumerate(dim_p: int, dim_v: int, field: PrimeField | int,
                  budget: int | None = None, verify: bool = True) -> ExtCatalog:
    """One metabelian product per (bimodule, cohomology class).

    With ``verify`` every datum of the given size is compared, by brute-force
    extension equivalence, against every catalog entry: each must match
    exactly one.
    """
    p = modulus(field)
    cat = ExtCatalog(dim_p, dim_v, p)
    bimodules = enumerate_bimodules(dim_p, dim_v, p, budget)
    for bid, b in enumerate(bimodules):
        z = cocycle_space(b)
        bd = coboundary_space(b)
        h = dh2(b)
        cat.summary.append((bid, len(z), len(bd), len(h)))
        for theta in h.representatives():
            product = metabelian_product(MetabelianDatum(b, theta))
            cat.entries.append(ExtEntry(b, theta, product))
    if verify:
        _verify_catalog(cat, bimodules)
    return cat


def _verify_catalog(cat: ExtCatalog, bimodules: list[DiscreteBimodule]) -> None:
    reps = [e.algebra for e in cat.entries]
    for b in bimodules:
        for d in all_datums(b):
            cat.datums_checked += 1
            e = metabelian_product(d)
            matches = sum(extension_equivalent(e, r) is not None for r in reps)
            if matches != 1:
                cat.failures.append(
                    f"datum {d.cocycle.flat.tolist()} over bimodule {b.key()} "
                    f"matches {matches} catalog entries")


@lru_cache(maxsize=32)
def ext_class_count(dim_p: int, dim_v: int, p: int) -> int:
    return len(ext_enumerate(dim_p, dim_v, p, verify=False))
