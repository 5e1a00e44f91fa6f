"""Exact linear algebra over prime fields F_p.

Matrices and vectors are immutable values backed by read-only ``int64``
numpy arrays with entries in ``[0, p)``.  Subspaces are stored in reduced
row echelon form so that equal subspaces compare equal.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import BudgetExceeded, DimensionMismatch, NotASubspace

MAX_PRIME = 251
_CHUNK = 1 << 16


def default_budget() -> int:
    """Enumeration budget: ``METABEL_BUDGET`` if set, else 2**24."""
    return int(os.environ.get("METABEL_BUDGET", 1 << 24))


def check_budget(count: int, budget: int | None, what: str = "candidates") -> None:
    limit = default_budget() if budget is None else budget
    if count > limit:
        raise BudgetExceeded(count, limit, what)


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(p**0.5) + 1))


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or isinstance(self.p, bool):
            raise ValueError(f"modulus must be an int, got {self.p!r}")
        if not (2 <= self.p <= MAX_PRIME and _is_prime(int(self.p))):
            raise ValueError(f"{self.p} is not a prime in [2, {MAX_PRIME}]")
        object.__setattr__(self, "p", int(self.p))

    def inv(self, x: int) -> int:
        return pow(int(x) % self.p, -1, self.p)

    def elements(self) -> range:
        return range(self.p)

    def units(self) -> range:
        return range(1, self.p)

    def squares(self) -> frozenset[int]:
        return frozenset(x * x % self.p for x in range(self.p))

    def __str__(self):
        return f"F_{self.p}"


def modulus(field: PrimeField | int) -> int:
    """Accept either a :class:`PrimeField` or a bare prime."""
    if isinstance(field, PrimeField):
        return field.p
    return PrimeField(field).p


@lru_cache(maxsize=None)
def _inverses(p: int) -> np.ndarray:
    inv = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        inv[x] = pow(x, -1, p)
    inv.setflags(write=False)
    return inv


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class Vector:
    """Column vector over F_p."""

    __slots__ = ("p", "_a")

    def __init__(self, coords: Iterable[int], p: PrimeField | int):
        self.p = modulus(p)
        a = np.array(list(coords) if not isinstance(coords, np.ndarray) else coords,
                     dtype=np.int64).reshape(-1)
        self._a = _frozen(a % self.p)

    @classmethod
    def _wrap(cls, a: np.ndarray, p: int) -> Vector:
        v = cls.__new__(cls)
        v.p = p
        v._a = _frozen(np.asarray(a, dtype=np.int64) % p)
        return v

    @classmethod
    def zero(cls, n: int, p) -> Vector:
        return cls([0] * n, p)

    @classmethod
    def unit(cls, i: int, n: int, p) -> Vector:
        """Standard basis vector e_i (0-based)."""
        c = [0] * n
        c[i] = 1
        return cls(c, p)

    @property
    def array(self) -> np.ndarray:
        return self._a

    @property
    def coords(self) -> tuple[int, ...]:
        return tuple(int(x) for x in self._a)

    @property
    def dim(self) -> int:
        return self._a.shape[0]

    def __len__(self):
        return self.dim

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return int(self._a[i])

    def is_zero(self) -> bool:
        return not self._a.any()

    def _check(self, other: Vector):
        if not isinstance(other, Vector) or other.p != self.p or other.dim != self.dim:
            raise DimensionMismatch(f"incompatible vectors {self!r} and {other!r}")

    def __add__(self, other: Vector) -> Vector:
        self._check(other)
        return Vector._wrap(self._a + other._a, self.p)

    def __sub__(self, other: Vector) -> Vector:
        self._check(other)
        return Vector._wrap(self._a - other._a, self.p)

    def __neg__(self) -> Vector:
        return Vector._wrap(-self._a, self.p)

    def __mul__(self, c: int) -> Vector:
        return Vector._wrap(self._a * int(c), self.p)

    __rmul__ = __mul__

    def __eq__(self, other):
        return (isinstance(other, Vector) and self.p == other.p
                and self.coords == other.coords)

    def __lt__(self, other: Vector) -> bool:
        self._check(other)
        return self.coords < other.coords

    def __hash__(self):
        return hash((self.p, self.coords))

    def __repr__(self):
        return f"Vector({list(self.coords)}, p={self.p})"


class Matrix:
    """Dense matrix over F_p; acts on column vectors."""

    __slots__ = ("p", "_a")

    def __init__(self, entries, p: PrimeField | int, shape: tuple[int, int] | None = None):
        self.p = modulus(p)
        a = np.array(entries, dtype=np.int64)
        if shape is not None:
            a = a.reshape(shape)
        if a.ndim != 2:
            raise DimensionMismatch(f"matrix entries must be 2-dimensional, got shape {a.shape}")
        self._a = _frozen(a % self.p)

    @classmethod
    def _wrap(cls, a: np.ndarray, p: int) -> Matrix:
        m = cls.__new__(cls)
        m.p = p
        m._a = _frozen(np.asarray(a, dtype=np.int64) % p)
        return m

    @classmethod
    def identity(cls, n: int, p) -> Matrix:
        return cls._wrap(np.eye(n, dtype=np.int64), modulus(p))

    @classmethod
    def zeros(cls, rows: int, cols: int, p) -> Matrix:
        return cls._wrap(np.zeros((rows, cols), dtype=np.int64), modulus(p))

    @classmethod
    def unit(cls, i: int, j: int, n: int, p) -> Matrix:
        """Matrix unit E_ij (0-based indices)."""
        a = np.zeros((n, n), dtype=np.int64)
        a[i, j] = 1
        return cls._wrap(a, modulus(p))

    @classmethod
    def from_columns(cls, columns: Sequence[Vector], p, rows: int | None = None) -> Matrix:
        p = modulus(p)
        if not columns:
            return cls.zeros(rows or 0, 0, p)
        return cls._wrap(np.stack([c.array for c in columns], axis=1), p)

    @classmethod
    def from_encoding(cls, code: int, rows: int, cols: int, p) -> Matrix:
        p = modulus(p)
        digits = []
        for _ in range(rows * cols):
            code, d = divmod(code, p)
            digits.append(d)
        return cls._wrap(np.array(digits[::-1], dtype=np.int64).reshape(rows, cols), p)

    @property
    def array(self) -> np.ndarray:
        return self._a

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    @property
    def entries(self) -> list[list[int]]:
        return self._a.tolist()

    @property
    def T(self) -> Matrix:
        return Matrix._wrap(self._a.T.copy(), self.p)

    def column(self, j: int) -> Vector:
        return Vector._wrap(self._a[:, j], self.p)

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def encoding(self) -> int:
        """Row-major base-p integer; orders matrices lexicographically."""
        code = 0
        for x in self._a.reshape(-1):
            code = code * self.p + int(x)
        return code

    def is_zero(self) -> bool:
        return not self._a.any()

    def rank(self) -> int:
        return len(_rref_array(self._a, self.p)[1])

    def is_invertible(self) -> bool:
        return self.rows == self.cols and self.rank() == self.rows

    def inverse(self) -> Matrix:
        n = self.rows
        if self.rows != self.cols:
            raise DimensionMismatch("only square matrices are invertible")
        aug = np.concatenate([self._a, np.eye(n, dtype=np.int64)], axis=1)
        r, piv = _rref_array(aug, self.p)
        if piv[:n] != list(range(n)):
            raise ZeroDivisionError("matrix is singular")
        return Matrix._wrap(r[:, n:], self.p)

    def __matmul__(self, other):
        if isinstance(other, Vector):
            return mat_apply(self, other)
        return mat_mul(self, other)

    def __add__(self, other: Matrix) -> Matrix:
        return mat_add(self, other)

    def __sub__(self, other: Matrix) -> Matrix:
        return mat_add(self, -other)

    def __neg__(self) -> Matrix:
        return Matrix._wrap(-self._a, self.p)

    def __mul__(self, c: int) -> Matrix:
        return Matrix._wrap(self._a * int(c), self.p)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Matrix:
        out = Matrix.identity(self.rows, self.p)
        for _ in range(k):
            out = out @ self
        return out

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.p == other.p
                and self.shape == other.shape and np.array_equal(self._a, other._a))

    def __hash__(self):
        return hash((self.p, self.shape, self._a.tobytes()))

    def __repr__(self):
        return f"Matrix({self.entries}, p={self.p})"


def mat_apply(m: Matrix, v: Vector) -> Vector:
    if m.p != v.p or m.cols != v.dim:
        raise DimensionMismatch(f"cannot apply {m.shape} matrix to vector of length {v.dim}")
    return Vector._wrap(m.array @ v.array, m.p)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if a.p != b.p or a.cols != b.rows:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return Matrix._wrap(a.array @ b.array, a.p)


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    if a.p != b.p or a.shape != b.shape:
        raise DimensionMismatch(f"cannot add {a.shape} and {b.shape}")
    return Matrix._wrap(a.array + b.array, a.p)


def mat_transpose(m: Matrix) -> Matrix:
    return m.T


# --- row reduction ---------------------------------------------------------

def _rref_array(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of ``a`` mod p and its pivot columns."""
    r = np.array(a, dtype=np.int64) % p
    rows, cols = r.shape
    inv = _inverses(p)
    pivots: list[int] = []
    i = 0
    for j in range(cols):
        if i == rows:
            break
        nz = np.nonzero(r[i:, j])[0]
        if nz.size == 0:
            continue
        k = i + nz[0]
        if k != i:
            r[[i, k]] = r[[k, i]]
        r[i] = r[i] * inv[r[i, j]] % p
        col = r[:, j].copy()
        col[i] = 0
        if col.any():
            r = (r - np.outer(col, r[i])) % p
        pivots.append(j)
        i += 1
    return r, pivots


def rref(m: Matrix) -> tuple[Matrix, int, list[int]]:
    """Return ``(R, rank, pivots)`` with R the reduced row echelon form of ``m``."""
    r, piv = _rref_array(m.array, m.p)
    return Matrix._wrap(r, m.p), len(piv), piv


# --- subspaces -------------------------------------------------------------

@dataclass(frozen=True)
class Subspace:
    """Subspace of F_p^n in canonical form.

    ``basis`` holds the nonzero rows of the RREF of any spanning set, so two
    spans are equal exactly when their ``Subspace`` values are equal.
    """

    ambient_dim: int
    p: int
    basis: tuple[tuple[int, ...], ...]

    @classmethod
    def from_array(cls, rows: np.ndarray, n: int, p: int) -> Subspace:
        rows = np.asarray(rows, dtype=np.int64).reshape(-1, n)
        if rows.shape[0] == 0:
            return cls(n, p, ())
        r, piv = _rref_array(rows, p)
        return cls(n, p, tuple(tuple(int(x) for x in row) for row in r[:len(piv)]))

    @classmethod
    def span(cls, vectors: Iterable[Vector], n: int, p) -> Subspace:
        p = modulus(p)
        vs = list(vectors)
        for v in vs:
            if v.dim != n or v.p != p:
                raise DimensionMismatch(f"vector {v!r} not in F_{p}^{n}")
        if not vs:
            return cls(n, p, ())
        return cls.from_array(np.stack([v.array for v in vs]), n, p)

    @classmethod
    def full(cls, n: int, p) -> Subspace:
        p = modulus(p)
        return cls(n, p, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zero(cls, n: int, p) -> Subspace:
        return cls(n, modulus(p), ())

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.basis, dtype=np.int64).reshape(self.dim, self.ambient_dim)

    @property
    def pivots(self) -> list[int]:
        return [next(j for j, x in enumerate(row) if x) for row in self.basis]

    def basis_vectors(self) -> list[Vector]:
        return [Vector(row, self.p) for row in self.basis]

    def matrix(self) -> Matrix:
        """Basis vectors as the columns of an ``ambient_dim x dim`` matrix."""
        return Matrix._wrap(self.array.T.copy(), self.p)

    def cardinality(self) -> int:
        return self.p ** self.dim

    def reduce_array(self, v: np.ndarray) -> np.ndarray:
        """Zero every pivot coordinate of ``v`` using the basis rows.

        The result is the lexicographically smallest element of ``v + self``.
        """
        out = np.array(v, dtype=np.int64) % self.p
        for row, piv in zip(self.basis, self.pivots):
            c = out[..., piv]
            if np.any(c):
                out = (out - np.multiply.outer(c, np.array(row, dtype=np.int64))) % self.p
        return out

    def reduce(self, v: Vector) -> Vector:
        self._check_vector(v)
        return Vector._wrap(self.reduce_array(v.array), self.p)

    def _check_vector(self, v: Vector):
        if v.dim != self.ambient_dim or v.p != self.p:
            raise DimensionMismatch(f"vector {v!r} not in F_{self.p}^{self.ambient_dim}")

    def __contains__(self, v: Vector) -> bool:
        self._check_vector(v)
        return not self.reduce_array(v.array).any()

    def contains_array(self, v: np.ndarray) -> bool:
        return not self.reduce_array(v).any()

    def issubspace(self, other: Subspace) -> bool:
        """True when ``self`` is contained in ``other``."""
        self._check_compatible(other)
        return all(other.contains_array(np.array(row)) for row in self.basis)

    __le__ = issubspace

    def __add__(self, other: Subspace) -> Subspace:
        self._check_compatible(other)
        return Subspace.from_array(np.concatenate([self.array, other.array]),
                                   self.ambient_dim, self.p)

    def _check_compatible(self, other: Subspace):
        if self.ambient_dim != other.ambient_dim or self.p != other.p:
            raise DimensionMismatch("subspaces live in different ambient spaces")

    def elements_array(self) -> np.ndarray:
        """All p**dim elements, ordered by their coefficient tuples."""
        if self.dim == 0:
            return np.zeros((1, self.ambient_dim), dtype=np.int64)
        coeffs = np.array(list(itertools.product(range(self.p), repeat=self.dim)),
                          dtype=np.int64).reshape(-1, self.dim)
        return coeffs @ self.array % self.p

    def elements(self) -> Iterator[Vector]:
        for row in self.elements_array():
            yield Vector._wrap(row, self.p)


def kernel(m: Matrix) -> Subspace:
    """Null space ``{v : m v = 0}``."""
    r, piv = _rref_array(m.array, m.p)
    n = m.cols
    free = [j for j in range(n) if j not in piv]
    vecs = []
    for f in free:
        v = np.zeros(n, dtype=np.int64)
        v[f] = 1
        for i, pc in enumerate(piv):
            v[pc] = -r[i, f]
        vecs.append(v % m.p)
    if not vecs:
        return Subspace.zero(n, m.p)
    return Subspace.from_array(np.stack(vecs), n, m.p)


def image(m: Matrix) -> Subspace:
    """Column space of ``m``."""
    return Subspace.from_array(m.array.T, m.rows, m.p)


def all_subspaces(n: int, p, dim: int | None = None) -> Iterator[Subspace]:
    """Every subspace of F_p^n (optionally of one dimension), in a fixed order."""
    p = modulus(p)
    dims = range(n + 1) if dim is None else [dim]
    for d in dims:
        for piv in itertools.combinations(range(n), d):
            slots = [(i, j) for i, pc in enumerate(piv)
                     for j in range(pc + 1, n) if j not in piv]
            for vals in itertools.product(range(p), repeat=len(slots)):
                rows = [[0] * n for _ in range(d)]
                for i, pc in enumerate(piv):
                    rows[i][pc] = 1
                for (i, j), x in zip(slots, vals):
                    rows[i][j] = x
                yield Subspace(n, p, tuple(tuple(r) for r in rows))


# --- quotients -------------------------------------------------------------

@dataclass(frozen=True)
class QuotientSpace:
    """``ambient / sub`` with lexicographically minimal coset representatives."""

    ambient: Subspace
    sub: Subspace
    transversal: tuple[Vector, ...]

    @property
    def dim(self) -> int:
        return self.ambient.dim - self.sub.dim

    def __len__(self):
        return len(self.transversal)

    def representative(self, v: Vector) -> Vector:
        if v not in self.ambient:
            raise NotASubspace(f"{v!r} is not in the ambient space")
        return self.sub.reduce(v)

    def index(self, v: Vector) -> int:
        return self.transversal.index(self.representative(v))


def quotient(ambient: Subspace, sub: Subspace) -> QuotientSpace:
    if not sub.issubspace(ambient):
        raise NotASubspace("sub is not contained in ambient")
    # Reduction mod sub is linear, so the minimal representatives form a
    # subspace of dimension dim(ambient) - dim(sub).
    reps_space = Subspace.from_array(sub.reduce_array(ambient.array),
                                     ambient.ambient_dim, ambient.p)
    assert reps_space.dim == ambient.dim - sub.dim
    reps = sorted({tuple(int(x) for x in row) for row in reps_space.elements_array()})
    return QuotientSpace(ambient, sub, tuple(Vector(r, ambient.p) for r in reps))


# --- GL(n, p) --------------------------------------------------------------

def _det_mod_p(batch: np.ndarray, p: int) -> np.ndarray:
    """Leibniz determinant of a stack of small square matrices, mod p."""
    n = batch.shape[-1]
    total = np.zeros(batch.shape[0], dtype=np.int64)
    for perm in itertools.permutations(range(n)):
        term = np.ones(batch.shape[0], dtype=np.int64)
        for i, j in enumerate(perm):
            term = term * batch[:, i, j] % p
        inversions = sum(perm[a] > perm[b] for a in range(n) for b in range(a + 1, n))
        total = (total - term) if inversions % 2 else (total + term)
    return total % p


def _matrices_by_code(start: int, stop: int, n: int, p: int) -> np.ndarray:
    codes = np.arange(start, stop, dtype=np.int64)
    digits = np.empty((codes.size, n * n), dtype=np.int64)
    for k in range(n * n - 1, -1, -1):
        codes, digits[:, k] = np.divmod(codes, p)
    return digits.reshape(-1, n, n)


@lru_cache(maxsize=16)
def _gl_cached(n: int, p: int) -> np.ndarray:
    total = p ** (n * n)
    parts = []
    for start in range(0, total, _CHUNK):
        mats = _matrices_by_code(start, min(total, start + _CHUNK), n, p)
        parts.append(mats[_det_mod_p(mats, p) != 0])
    return _frozen(np.concatenate(parts) if parts else np.zeros((0, n, n), dtype=np.int64))


def gl_array(n: int, field: PrimeField | int, budget: int | None = None) -> np.ndarray:
    """All of GL(n, p) as a read-only ``(N, n, n)`` array in encoding order."""
    p = modulus(field)
    check_budget(p ** (n * n), budget)
    return _gl_cached(n, p)


def gl_order(n: int, p: int) -> int:
    out = 1
    for i in range(n):
        out *= p**n - p**i
    return out


def gl_enumerate(n: int, field: PrimeField | int, budget: int | None = None) -> Iterator[Matrix]:
    """Yield every invertible n x n matrix once, in row-major encoding order."""
    p = modulus(field)
    for a in gl_array(n, p, budget):
        yield Matrix._wrap(a, p)


def matrices_array(rows: int, cols: int, field, budget: int | None = None) -> np.ndarray:
    """Every rows x cols matrix over F_p, in encoding order."""
    p = modulus(field)
    total = p ** (rows * cols)
    check_budget(total, budget)
    k = rows * cols
    if k == 0:
        return np.zeros((1, rows, cols), dtype=np.int64)
    codes = np.arange(total, dtype=np.int64)
    digits = np.empty((total, k), dtype=np.int64)
    for i in range(k - 1, -1, -1):
        codes, digits[:, i] = np.divmod(codes, p)
    return digits.reshape(-1, rows, cols)


def all_matrices(rows: int, cols: int, field, budget: int | None = None) -> Iterator[Matrix]:
    p = modulus(field)
    for a in matrices_array(rows, cols, p, budget):
        yield Matrix._wrap(a, p)


def all_vectors(n: int, field) -> Iterator[Vector]:
    p = modulus(field)
    for c in itertools.product(range(p), repeat=n):
        yield Vector(c, p)
