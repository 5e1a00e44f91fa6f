"""Metabelian algebras whose derived algebra has codimension one.

These are k * V for pairs (X, Y) of square-zero commuting matrices and a
vector u with Xu = Yu, on the basis (F, E_1..E_n):

    F F = sum_j u_j E_j,   F E_i = sum_j Y[j, i] E_j,   E_i F = sum_j X[j, i] E_j.

X is the right action x <| p = p X x and Y the left action p |> x = p Y x.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .algebra import ExtensionTriple, extension_equivalent
from .cohomo import ext_enumerate
from .datum import (DiscreteBimodule, DiscreteCocycle, MetabelianDatum,
                    all_action_families, all_theta_tables, bimodule_violations,
                    cocycle_violations, metabelian_product)
from .errors import DimensionMismatch, InternalError
from .exactla import (Matrix, PrimeField, Subspace, Vector, check_budget,
                      image, kernel, matrices_array, modulus, quotient)


@dataclass(frozen=True)
class TPair:
    X: Matrix
    Y: Matrix

    @property
    def n(self) -> int:
        return self.X.rows

    @property
    def p(self) -> int:
        return self.X.p

    def bimodule(self) -> DiscreteBimodule:
        return DiscreteBimodule(self.p, 1, self.n, (self.X,), (self.Y,))


@dataclass(frozen=True)
class ExtClassRep:
    pair: TPair
    u: Vector


def _is_tpair(x: np.ndarray, y: np.ndarray, p: int) -> bool:
    return not ((x @ x) % p).any() and not ((y @ y) % p).any() \
        and not ((x @ y - y @ x) % p).any()


def validate_tpair(X: Matrix, Y: Matrix) -> TPair | None:
    if X.p != Y.p or X.rows != X.cols or X.shape != Y.shape:
        raise DimensionMismatch("X and Y must be square matrices of one size over one field")
    return TPair(X, Y) if _is_tpair(X.array, Y.array, X.p) else None


def square_zero_matrices(n: int, field: PrimeField | int, budget: int | None = None) -> np.ndarray:
    p = modulus(field)
    mats = matrices_array(n, n, p, budget)
    return mats[~(np.einsum("gij,gjk->gik", mats, mats) % p).reshape(len(mats), -1).any(axis=1)]


def enumerate_T(n: int, field: PrimeField | int, budget: int | None = None) -> list[TPair]:
    """All (X, Y) with X^2 = Y^2 = 0 and XY = YX, ordered by (X, Y) encoding."""
    p = modulus(field)
    check_budget(p ** (2 * n * n), budget)
    nil = square_zero_matrices(n, p)
    out = []
    for x in nil:
        for y in nil:
            if not ((x @ y - y @ x) % p).any():
                out.append(TPair(Matrix._wrap(x, p), Matrix._wrap(y, p)))
    return out


def equalizer(t: TPair) -> Subspace:
    """{u : Xu = Yu} = Ker(X - Y)."""
    return kernel(t.X - t.Y)


def im_sum(t: TPair) -> Subspace:
    """Im(X + Y), contained in the equalizer for every T-pair."""
    im = image(t.X + t.Y)
    if ((t.X - t.Y) @ (t.X + t.Y)).array.any() or not im.issubspace(equalizer(t)):
        raise InternalError(f"Im(X+Y) is not inside Ker(X-Y) for {t}")
    return im


def ext_classes(t: TPair) -> list[ExtClassRep]:
    q = quotient(equalizer(t), im_sum(t))
    return [ExtClassRep(t, u) for u in q.transversal]


def datum_of(t: TPair, u: Vector) -> MetabelianDatum:
    """The datum x <| p = p X x, p |> x = p Y x, theta(p, q) = pq u."""
    b = t.bimodule()
    return MetabelianDatum(b, DiscreteCocycle.from_array(b, u.array))


def build_algebra(rep: ExtClassRep) -> ExtensionTriple:
    e = metabelian_product(datum_of(rep.pair, rep.u))
    labels = ["F"] + [f"E{i + 1}" for i in range(rep.pair.n)]
    total = type(e.total)(e.total.sc, e.total.p, labels)
    return ExtensionTriple(total, 1, rep.pair.n)


# --- censuses ------------------------------------------------------------------

@dataclass
class MetKVReport:
    dim_v: int
    p: int
    datum_count: int
    triple_count: int
    bijection_ok: bool

    @property
    def ok(self) -> bool:
        return self.datum_count == self.triple_count and self.bijection_ok


def met_kv_census(dim_v: int, field: PrimeField | int, budget: int | None = None) -> MetKVReport:
    """Count Met(k, V) two ways and check theta(p, q) = pq zeta matches them up."""
    p = modulus(field)
    check_budget(p ** (2 * dim_v * dim_v + dim_v), budget)
    # Datum side: every (R, L, theta) passing the datum axioms.
    actions = all_action_families(1, dim_v, p)
    thetas = all_theta_tables(1, dim_v, p)
    datums = set()
    for right in actions:
        for left in actions:
            if bimodule_violations(right, left, p):
                continue
            for theta in thetas:
                if not cocycle_violations(right, left, theta, p):
                    datums.add((right.tobytes(), left.tobytes(), theta.tobytes()))
    # Triple side: (X, Y, zeta) checked directly.
    mats = matrices_array(dim_v, dim_v, p)
    vecs = matrices_array(1, dim_v, p).reshape(-1, dim_v)
    triples = []
    for x in mats:
        for y in mats:
            if not _is_tpair(x, y, p):
                continue
            triples.extend((x, y, z) for z in vecs if not ((x @ z - y @ z) % p).any())
    images = {(x[None].tobytes(), y[None].tobytes(), z.reshape(1, 1, dim_v).tobytes())
              for x, y, z in triples}
    return MetKVReport(dim_v, p, len(datums), len(triples), images == datums)


@dataclass
class ExtKReport:
    dim_v: int
    p: int
    quotient_count: int
    catalog_count: int
    brute_force_count: int
    catalog_verified: bool

    @property
    def ok(self) -> bool:
        return (self.quotient_count == self.catalog_count == self.brute_force_count
                and self.catalog_verified)


def brute_force_class_count(extensions: list[ExtensionTriple]) -> int:
    """Partition by pairwise extension equivalence; returns the number of blocks."""
    reps: list[ExtensionTriple] = []
    for e in extensions:
        if not any(extension_equivalent(e, r) is not None for r in reps):
            reps.append(e)
    return len(reps)


def ext_k_census(dim_v: int, field: PrimeField | int, budget: int | None = None) -> ExtKReport:
    p = modulus(field)
    pairs = enumerate_T(dim_v, p, budget)
    q_count = sum(len(ext_classes(t)) for t in pairs)
    cat = ext_enumerate(1, dim_v, p, budget)
    products = []
    for t in pairs:
        for u in equalizer(t).elements():
            products.append(metabelian_product(datum_of(t, u)))
    return ExtKReport(dim_v, p, q_count, len(cat), brute_force_class_count(products),
                      cat.verified)
