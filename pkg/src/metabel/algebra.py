"""Structure-constant algebras and brute-force searches over them.

An :class:`Algebra` of dimension n over F_p is a tensor ``sc`` of shape
``(n, n, n)`` with ``e_i e_j = sum_k sc[i, j, k] e_k``.  Associativity is a
checked predicate, not an invariant, so candidate tensors can be built
during enumeration.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from .errors import (DimensionMismatch, HypothesisFailed, InternalError,
                     NotAssociative)
from .exactla import (Matrix, PrimeField, Subspace, Vector, all_subspaces,
                      check_budget, gl_array, matrices_array, modulus)

_CHUNK = 1 << 15


class Algebra:
    __slots__ = ("p", "sc", "labels", "__dict__")

    def __init__(self, sc, p: PrimeField | int, labels: Sequence[str] | None = None):
        self.p = modulus(p)
        a = np.array(sc, dtype=np.int64)
        if a.ndim != 3 or not (a.shape[0] == a.shape[1] == a.shape[2]):
            raise DimensionMismatch(f"structure constants must have shape (n, n, n), got {a.shape}")
        a %= self.p
        a.setflags(write=False)
        self.sc = a
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != a.shape[0]:
                raise DimensionMismatch("one label per basis vector is required")
        self.labels = labels

    @classmethod
    def abelian(cls, n: int, p) -> Algebra:
        return cls(np.zeros((n, n, n), dtype=np.int64), p)

    @classmethod
    def from_products(cls, n: int, p, products: dict[tuple[int, int], Sequence[int]],
                      labels: Sequence[str] | None = None) -> Algebra:
        """Build from ``{(i, j): coords of e_i e_j}``; unlisted products are 0."""
        sc = np.zeros((n, n, n), dtype=np.int64)
        for (i, j), coords in products.items():
            sc[i, j] = coords
        return cls(sc, p, labels)

    @property
    def dim(self) -> int:
        return self.sc.shape[0]

    @property
    def field(self) -> PrimeField:
        return PrimeField(self.p)

    def basis_product(self, i: int, j: int) -> Vector:
        return Vector._wrap(self.sc[i, j], self.p)

    def multiply(self, x: Vector, y: Vector) -> Vector:
        return multiply(self, x, y)

    def is_abelian(self) -> bool:
        return not self.sc.any()

    def change_basis(self, basis: Matrix) -> Algebra:
        """Same algebra written in the basis given by the columns of ``basis``.

        ``basis`` is then an algebra isomorphism from the result onto ``self``.
        """
        if basis.shape != (self.dim, self.dim):
            raise DimensionMismatch("basis change must be a square matrix of size dim")
        b = basis.array
        binv = basis.inverse().array
        prod = np.einsum("ki,lj,klm->ijm", b, b, self.sc) % self.p
        return Algebra(np.einsum("rm,ijm->ijr", binv, prod), self.p)

    def encoding(self) -> tuple[int, ...]:
        return tuple(int(x) for x in self.sc.reshape(-1))

    def __eq__(self, other):
        return (isinstance(other, Algebra) and self.p == other.p
                and self.sc.shape == other.sc.shape and np.array_equal(self.sc, other.sc))

    def __hash__(self):
        return hash((self.p, self.sc.shape, self.sc.tobytes()))

    def __repr__(self):
        return f"Algebra(dim={self.dim}, p={self.p}, sc={self.sc.tolist()})"

    @cached_property
    def associative(self) -> bool:
        return is_associative(self)


def multiply(a: Algebra, x: Vector, y: Vector) -> Vector:
    if x.dim != a.dim or y.dim != a.dim or x.p != a.p or y.p != a.p:
        raise DimensionMismatch("vectors must lie in the algebra")
    return Vector._wrap(np.einsum("i,j,ijk->k", x.array, y.array, a.sc), a.p)


def _products_of(a: Algebra, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """All products ``left[s] * right[t]`` as rows of a ``(S*T, n)`` array."""
    out = np.einsum("si,tj,ijk->stk", left, right, a.sc) % a.p
    return out.reshape(-1, a.dim)


def is_associative(a: Algebra) -> bool:
    c = a.sc
    left = np.einsum("ijl,lkm->ijkm", c, c) % a.p
    right = np.einsum("jkl,ilm->ijkm", c, c) % a.p
    return bool(np.array_equal(left, right))


def derived_subalgebra(a: Algebra) -> Subspace:
    """Span of all products e_i e_j."""
    return Subspace.from_array(a.sc.reshape(-1, a.dim), a.dim, a.p)


def _power_chain(a: Algebra, m: int) -> Subspace:
    """The span of all length-m products (left-normed)."""
    cur = Subspace.full(a.dim, a.p)
    eye = np.eye(a.dim, dtype=np.int64)
    for _ in range(m - 1):
        if cur.dim == 0:
            break
        cur = Subspace.from_array(_products_of(a, cur.array, eye), a.dim, a.p)
    return cur


def nilpotency_index_at_most(a: Algebra, m: int) -> bool:
    """True iff every product of ``m`` elements of ``a`` vanishes."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if not is_associative(a):
        raise NotAssociative("products of length m depend on parenthesization")
    return _power_chain(a, m).dim == 0


def nilpotency_index(a: Algebra) -> int:
    """Smallest m such that all length-m products vanish, or 0 if none does."""
    if not is_associative(a):
        raise NotAssociative("products of length m depend on parenthesization")
    for m in range(1, a.dim + 2):
        if _power_chain(a, m).dim == 0:
            return m
    return 0


def is_abelian_subspace(a: Algebra, s: Subspace) -> bool:
    return not _products_of(a, s.array, s.array).any()


def is_subalgebra(a: Algebra, s: Subspace) -> bool:
    prods = _products_of(a, s.array, s.array)
    return all(s.contains_array(row) for row in prods)


def is_metabelian(a: Algebra) -> bool:
    """Derived subalgebra abelian, cross-checked against xyzt = 0."""
    if not is_associative(a):
        raise NotAssociative("is_metabelian is defined for associative algebras")
    derived_abelian = is_abelian_subspace(a, derived_subalgebra(a))
    four_fold_zero = _power_chain(a, 4).dim == 0
    if derived_abelian != four_fold_zero:
        raise InternalError(
            f"derived-abelian={derived_abelian} but four-fold-zero={four_fold_zero} for {a!r}")
    return derived_abelian


# --- isomorphism search ----------------------------------------------------

def morphism_mask(mats: np.ndarray, a: Algebra, b: Algebra) -> np.ndarray:
    """Boolean mask: which ``C`` in the stack satisfy C(xy) = C(x)C(y), a -> b."""
    p, n = a.p, a.dim
    # float64 routes the products through BLAS; entries stay far below 2**53.
    c_all = np.asarray(mats, dtype=np.float64)
    a_sc = a.sc.astype(np.float64)
    b_flat = b.sc.reshape(n, n * n).astype(np.float64)
    alive = np.arange(mats.shape[0])
    c = c_all
    # One basis pair at a time, so most candidates die after a cheap test.
    for i in range(n):
        for j in range(n):
            if alive.size == 0:
                break
            lhs = c @ a_sc[i, j]
            t = (c[:, :, i] @ b_flat).reshape(-1, n, n)
            rhs = np.einsum("gkm,gk->gm", t, c[:, :, j])
            keep = (np.fmod(lhs - rhs, p) == 0).all(axis=1)
            if not keep.all():
                alive = alive[keep]
                c = c[keep]
    mask = np.zeros(mats.shape[0], dtype=bool)
    mask[alive] = True
    return mask


def _iso_candidates(a: Algebra, b: Algebra, budget: int | None) -> np.ndarray:
    if a.p != b.p or a.dim != b.dim:
        raise DimensionMismatch("algebras must share field and dimension")
    return gl_array(a.dim, a.p, budget)


def find_isomorphism(a: Algebra, b: Algebra, budget: int | None = None) -> Matrix | None:
    """First invertible C (encoding order) with C(xy) = (Cx)(Cy), or None.

    Equal structure constants short-circuit to the identity.
    """
    gl = _iso_candidates(a, b, budget)
    if np.array_equal(a.sc, b.sc):
        return Matrix.identity(a.dim, a.p)
    for start in range(0, gl.shape[0], _CHUNK):
        chunk = gl[start:start + _CHUNK]
        hits = np.nonzero(morphism_mask(chunk, a, b))[0]
        if hits.size:
            return Matrix._wrap(chunk[hits[0]], a.p)
    return None


def is_algebra_map(c: Matrix, a: Algebra, b: Algebra) -> bool:
    return bool(morphism_mask(c.array[None], a, b)[0])


def automorphism_group(a: Algebra, budget: int | None = None) -> list[Matrix]:
    gl = _iso_candidates(a, a, budget)
    found = []
    for start in range(0, gl.shape[0], _CHUNK):
        chunk = gl[start:start + _CHUNK]
        found.extend(chunk[morphism_mask(chunk, a, a)])
    group = [Matrix._wrap(m, a.p) for m in found]
    _check_group(group, a)
    return group


def _check_group(group: list[Matrix], a: Algebra) -> None:
    members = set(group)
    if Matrix.identity(a.dim, a.p) not in members:
        raise InternalError("automorphism list misses the identity")
    for g in group:
        if g.inverse() not in members:
            raise InternalError(f"automorphism list not closed under inverse at {g!r}")
        for h in group:
            if g @ h not in members:
                raise InternalError("automorphism list not closed under products")


# --- extensions ------------------------------------------------------------

@dataclass(frozen=True)
class ExtensionTriple:
    """An algebra presented as an extension of P by V.

    The first ``p_dim`` basis vectors project onto a basis of P and the last
    ``v_dim`` basis vectors span the embedded copy of V.
    """

    total: Algebra
    p_dim: int
    v_dim: int

    def __post_init__(self):
        if self.p_dim + self.v_dim != self.total.dim:
            raise DimensionMismatch("p_dim + v_dim must equal the algebra dimension")

    @property
    def v_span(self) -> Subspace:
        n = self.total.dim
        return Subspace.from_array(np.eye(n, dtype=np.int64)[self.p_dim:], n, self.total.p)

    def is_metabelian_extension(self) -> bool:
        """V is an ideal with V V = 0 and every product lands in V."""
        m = self.p_dim
        sc = self.total.sc
        return not sc[:, :, :m].any() and not sc[m:, m:, :].any()


def extension_equivalent(e1: ExtensionTriple, e2: ExtensionTriple) -> Matrix | None:
    """Search phi(p, x) = (p, x + r(p)) over all linear r: P -> V.

    Returns the matrix of the first such phi that is an algebra map from
    ``e1.total`` to ``e2.total``, or None.
    """
    if (e1.p_dim, e1.v_dim, e1.total.p) != (e2.p_dim, e2.v_dim, e2.total.p):
        raise DimensionMismatch("extensions must have the same shape and field")
    m, n, p = e1.p_dim, e1.v_dim, e1.total.p
    rs = matrices_array(n, m, p)
    phis = np.zeros((rs.shape[0], m + n, m + n), dtype=np.int64)
    phis[:, range(m + n), range(m + n)] = 1
    phis[:, m:, :m] = rs
    hits = np.nonzero(morphism_mask(phis, e1.total, e2.total))[0]
    return Matrix._wrap(phis[hits[0]], p) if hits.size else None


# --- Ito ---------------------------------------------------------------------

@dataclass
class ItoReport:
    p_subalgebra: bool
    v_subalgebra: bool
    p_abelian: bool
    v_abelian: bool
    spans_sum: bool
    metabelian: bool
    four_fold_zero: bool

    @property
    def conclusion_holds(self) -> bool:
        return self.metabelian and self.four_fold_zero


def ito_check(a: Algebra, p_span: Subspace, v_span: Subspace) -> ItoReport:
    """Check A = P0 + V0 with P0, V0 abelian subalgebras, then that A is metabelian.

    Raises :class:`HypothesisFailed` on a failed hypothesis; a failed
    conclusion is reported, never raised.
    """
    if not is_associative(a):
        raise NotAssociative("ito_check needs an associative algebra")
    checks = {}
    for name, s in (("p", p_span), ("v", v_span)):
        checks[name + "_subalgebra"] = is_subalgebra(a, s)
        if not checks[name + "_subalgebra"]:
            raise HypothesisFailed("subalgebra", f"{name}_span is not multiplicatively closed")
        checks[name + "_abelian"] = is_abelian_subspace(a, s)
        if not checks[name + "_abelian"]:
            raise HypothesisFailed("abelian", f"{name}_span is not abelian")
    if (p_span + v_span).dim != a.dim:
        raise HypothesisFailed("sum", "p_span + v_span is a proper subspace")
    derived_abelian = is_abelian_subspace(a, derived_subalgebra(a))
    return ItoReport(**checks, spans_sum=True, metabelian=derived_abelian,
                     four_fold_zero=_power_chain(a, 4).dim == 0)


def abelian_subalgebras(a: Algebra) -> list[Subspace]:
    return [s for s in all_subspaces(a.dim, a.p) if is_abelian_subspace(a, s)]


def abelian_sum_decomposition(a: Algebra) -> tuple[Subspace, Subspace] | None:
    """First pair of abelian subalgebras with P0 + V0 = A, if any."""
    subs = abelian_subalgebras(a)
    for s, t in itertools.combinations_with_replacement(subs, 2):
        if (s + t).dim == a.dim:
            return s, t
    return None


# --- corpus enumeration ----------------------------------------------------

@dataclass
class _Search:
    n: int
    p: int
    budget: int
    nodes: int = 0
    sc: list = field(default_factory=list)
    known: list = field(default_factory=list)


def _determined_associator_fails(s: _Search) -> bool:
    n, p, sc, known = s.n, s.p, s.sc, s.known
    for i in range(n):
        for j in range(n):
            if not known[i][j]:
                continue
            cij = sc[i][j]
            for k in range(n):
                if not known[j][k]:
                    continue
                cjk = sc[j][k]
                if any(cij[l] and not known[l][k] for l in range(n)):
                    continue
                if any(cjk[l] and not known[i][l] for l in range(n)):
                    continue
                for m in range(n):
                    lhs = sum(cij[l] * sc[l][k][m] for l in range(n) if cij[l])
                    rhs = sum(cjk[l] * sc[i][l][m] for l in range(n) if cjk[l])
                    if (lhs - rhs) % p:
                        return True
    return False


def enumerate_associative_algebras(n: int, field: PrimeField | int, prune: bool = True,
                                   budget: int | None = None) -> Iterator[Algebra]:
    """Every associative structure-constant tensor of dimension n over F_p.

    Output is in increasing row-major encoding of the tensor.  With
    ``prune`` the products e_i e_j are fixed one at a time (row-major) and a
    branch is cut as soon as a fully determined associator is nonzero; the
    budget then bounds visited search nodes instead of raw tensors.
    """
    p = modulus(field)
    slots = [(i, j) for i in range(n) for j in range(n)]
    values = list(itertools.product(range(p), repeat=n))
    if not prune:
        check_budget(p ** (n ** 3), budget)
        for code in itertools.product(values, repeat=len(slots)):
            a = Algebra(np.array(code, dtype=np.int64).reshape(n, n, n), p)
            if is_associative(a):
                yield a
        return

    from .exactla import default_budget
    s = _Search(n, p, default_budget() if budget is None else budget)
    s.sc = [[(0,) * n for _ in range(n)] for _ in range(n)]
    s.known = [[False] * n for _ in range(n)]

    def walk(depth):
        if depth == len(slots):
            yield Algebra(np.array(s.sc, dtype=np.int64), p)
            return
        i, j = slots[depth]
        s.known[i][j] = True
        for v in values:
            s.nodes += 1
            check_budget(s.nodes, s.budget, "search nodes")
            s.sc[i][j] = v
            if not _determined_associator_fails(s):
                yield from walk(depth + 1)
        s.known[i][j] = False
        s.sc[i][j] = (0,) * n

    yield from walk(0)
