"""Metabelian datums, the metabelian product, and the section decomposition.

A datum of P by V is stored as matrix families: ``right[j]`` is the map
``x -> x <| p_j`` and ``left[j]`` is ``x -> p_j |> x`` (both dim_v x dim_v),
plus the cocycle table ``theta[j][j']`` = theta(p_j, p_j') in V.
The product algebra uses the basis (p_1..p_m, x_1..x_n).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import (Algebra, ExtensionTriple, derived_subalgebra,
                      extension_equivalent, is_algebra_map, is_associative,
                      is_metabelian)
from .errors import InternalError, InvalidBimodule, InvalidDatum, NotMetabelian
from .exactla import (Matrix, PrimeField, Subspace, Vector, check_budget,
                      matrices_array, modulus)


@dataclass(frozen=True)
class DiscreteBimodule:
    p: int
    dim_p: int
    dim_v: int
    right: tuple[Matrix, ...]
    left: tuple[Matrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "right", tuple(self.right))
        object.__setattr__(self, "left", tuple(self.left))
        if len(self.right) != self.dim_p or len(self.left) != self.dim_p:
            raise InvalidBimodule("need one right and one left matrix per basis vector of P")
        for m in self.right + self.left:
            if m.shape != (self.dim_v, self.dim_v) or m.p != self.p:
                raise InvalidBimodule(f"action matrix {m!r} is not {self.dim_v}x{self.dim_v} over F_{self.p}")

    @classmethod
    def trivial(cls, dim_p: int, dim_v: int, p) -> DiscreteBimodule:
        p = modulus(p)
        z = Matrix.zeros(dim_v, dim_v, p)
        return cls(p, dim_p, dim_v, (z,) * dim_p, (z,) * dim_p)

    @property
    def right_array(self) -> np.ndarray:
        return np.array([m.array for m in self.right], dtype=np.int64).reshape(
            self.dim_p, self.dim_v, self.dim_v)

    @property
    def left_array(self) -> np.ndarray:
        return np.array([m.array for m in self.left], dtype=np.int64).reshape(
            self.dim_p, self.dim_v, self.dim_v)

    def is_trivial(self) -> bool:
        return all(m.is_zero() for m in self.right + self.left)

    def key(self) -> tuple[int, ...]:
        """Encoding of the (R, L) matrix tuple; orders bimodules deterministically."""
        return tuple(m.encoding() for m in self.right) + tuple(m.encoding() for m in self.left)


@dataclass
class ValidationReport:
    violations: list[tuple] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def messages(self) -> list[str]:
        return [_describe(v) for v in self.violations]


def _describe(v: tuple) -> str:
    kind = v[0]
    if kind == "right_square":
        return f"bimodule: R_{v[1]} R_{v[2]} != 0"
    if kind == "left_square":
        return f"bimodule: L_{v[1]} L_{v[2]} != 0"
    if kind == "mixed":
        return f"bimodule: L_{v[1]} R_{v[2]} != R_{v[2]} L_{v[1]}"
    return f"cocycle: p_{v[1]} |> theta(p_{v[2]}, p_{v[3]}) != theta(p_{v[1]}, p_{v[2]}) <| p_{v[3]}"


def bimodule_violations(right: np.ndarray, left: np.ndarray, p: int) -> list[tuple]:
    """Failures of (x<|p)<|q = 0, p|>(q|>x) = 0 and p|>(x<|q) = (p|>x)<|q."""
    m = right.shape[0]
    out = []
    for i, j in itertools.product(range(m), repeat=2):
        if ((right[j] @ right[i]) % p).any():
            out.append(("right_square", j, i))
        if ((left[i] @ left[j]) % p).any():
            out.append(("left_square", i, j))
        if ((left[i] @ right[j] - right[j] @ left[i]) % p).any():
            out.append(("mixed", i, j))
    return out


def cocycle_violations(right: np.ndarray, left: np.ndarray, theta: np.ndarray,
                       p: int) -> list[tuple]:
    m = right.shape[0]
    out = []
    for i, j, k in itertools.product(range(m), repeat=3):
        if ((left[i] @ theta[j, k] - right[k] @ theta[i, j]) % p).any():
            out.append(("cocycle", i, j, k))
    return out


def validate_bimodule(b: DiscreteBimodule) -> ValidationReport:
    return ValidationReport(bimodule_violations(b.right_array, b.left_array, b.p))


@dataclass(frozen=True)
class DiscreteCocycle:
    bimodule: DiscreteBimodule
    theta: tuple[tuple[Vector, ...], ...]

    def __post_init__(self):
        b = self.bimodule
        theta = tuple(tuple(Vector(v, b.p) if not isinstance(v, Vector) else v for v in row)
                      for row in self.theta)
        if len(theta) != b.dim_p or any(len(row) != b.dim_p for row in theta):
            raise InvalidDatum("theta must be a dim_p x dim_p table")
        if any(v.dim != b.dim_v or v.p != b.p for row in theta for v in row):
            raise InvalidDatum("theta values must lie in V")
        object.__setattr__(self, "theta", theta)

    @classmethod
    def from_array(cls, b: DiscreteBimodule, theta: np.ndarray) -> DiscreteCocycle:
        theta = np.asarray(theta, dtype=np.int64).reshape(b.dim_p, b.dim_p, b.dim_v)
        return cls(b, tuple(tuple(Vector._wrap(theta[i, j], b.p) for j in range(b.dim_p))
                            for i in range(b.dim_p)))

    @classmethod
    def zero(cls, b: DiscreteBimodule) -> DiscreteCocycle:
        return cls.from_array(b, np.zeros((b.dim_p, b.dim_p, b.dim_v), dtype=np.int64))

    @property
    def array(self) -> np.ndarray:
        b = self.bimodule
        return np.array([[v.array for v in row] for row in self.theta],
                        dtype=np.int64).reshape(b.dim_p, b.dim_p, b.dim_v)

    @property
    def flat(self) -> np.ndarray:
        """theta[j][j'][k] flattened row-major."""
        return self.array.reshape(-1)


def validate_cocycle(c: DiscreteCocycle) -> ValidationReport:
    b = c.bimodule
    if not validate_bimodule(b):
        raise InvalidBimodule("cocycle over an invalid bimodule")
    return ValidationReport(cocycle_violations(b.right_array, b.left_array, c.array, b.p))


@dataclass(frozen=True)
class MetabelianDatum:
    bimodule: DiscreteBimodule
    cocycle: DiscreteCocycle

    def __post_init__(self):
        if self.cocycle.bimodule != self.bimodule:
            raise InvalidDatum("cocycle belongs to a different bimodule")

    @classmethod
    def build(cls, right: Sequence, left: Sequence, theta, p) -> MetabelianDatum:
        """Convenience constructor from nested lists; no validation."""
        p = modulus(p)
        dim_p = len(right)
        theta = np.asarray(theta, dtype=np.int64)
        dim_v = Matrix(right[0], p).rows if dim_p else theta.shape[-1]
        right = [Matrix(r, p, (dim_v, dim_v)) for r in right]
        left = [Matrix(m, p, (dim_v, dim_v)) for m in left]
        b = DiscreteBimodule(p, dim_p, dim_v, right, left)
        return cls(b, DiscreteCocycle.from_array(b, theta))

    @property
    def p(self) -> int:
        return self.bimodule.p

    @property
    def dim_p(self) -> int:
        return self.bimodule.dim_p

    @property
    def dim_v(self) -> int:
        return self.bimodule.dim_v

    def validate(self) -> ValidationReport:
        b = self.bimodule
        report = validate_bimodule(b)
        if report.ok:
            report.violations.extend(validate_cocycle(self.cocycle).violations)
        return report


def raw_product(right: np.ndarray, left: np.ndarray, theta: np.ndarray, p: int) -> Algebra:
    """Structure constants of (p, x)(q, y) = (0, theta(p, q) + p|>y + x<|q), unchecked."""
    m, n = theta.shape[0], theta.shape[-1]
    sc = np.zeros((m + n, m + n, m + n), dtype=np.int64)
    sc[:m, :m, m:] = theta
    # p_j x_i = L_j x_i: the k-th coordinate is L_j[k, i].
    sc[:m, m:, m:] = np.transpose(left, (0, 2, 1))
    # x_i p_j = R_j x_i
    sc[m:, :m, m:] = np.transpose(right, (2, 0, 1))
    return Algebra(sc, p)


def metabelian_product(d: MetabelianDatum) -> ExtensionTriple:
    report = d.validate()
    if not report:
        raise InvalidDatum("; ".join(report.messages()))
    b = d.bimodule
    a = raw_product(b.right_array, b.left_array, d.cocycle.array, b.p)
    if not is_associative(a):
        raise InternalError(f"product of a valid datum is not associative: {a!r}")
    if not is_metabelian(a):
        raise InternalError(f"product of a valid datum is not metabelian: {a!r}")
    return ExtensionTriple(a, b.dim_p, b.dim_v)


@dataclass
class IffReport:
    dim_p: int
    dim_v: int
    p: int
    total: int = 0
    datums: int = 0
    associative: int = 0
    disagreements: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.disagreements


def all_action_families(dim_p: int, dim_v: int, p: int, budget: int | None = None) -> np.ndarray:
    """Every dim_p-tuple of dim_v x dim_v matrices, shape (N, dim_p, dim_v, dim_v)."""
    mats = matrices_array(dim_v, dim_v, p, budget)
    idx = itertools.product(range(mats.shape[0]), repeat=dim_p)
    return np.array([mats[list(t)] for t in idx], dtype=np.int64).reshape(
        -1, dim_p, dim_v, dim_v)


def all_theta_tables(dim_p: int, dim_v: int, p: int) -> np.ndarray:
    k = dim_p * dim_p * dim_v
    return matrices_array(1, k, p).reshape(-1, dim_p, dim_p, dim_v)


def associativity_iff_datum(dim_p: int, dim_v: int, field: PrimeField | int,
                            budget: int | None = None) -> IffReport:
    """Exhaustively compare 'raw product associative' with 'datum axioms hold'."""
    p = modulus(field)
    n_actions = p ** (dim_v * dim_v * dim_p)
    check_budget(n_actions * n_actions * p ** (dim_p * dim_p * dim_v), budget)
    actions = all_action_families(dim_p, dim_v, p)
    thetas = all_theta_tables(dim_p, dim_v, p)
    report = IffReport(dim_p, dim_v, p)
    for right in actions:
        for left in actions:
            bimodule_ok = not bimodule_violations(right, left, p)
            for theta in thetas:
                report.total += 1
                axioms = bimodule_ok and not cocycle_violations(right, left, theta, p)
                assoc = is_associative(raw_product(right, left, theta, p))
                report.datums += axioms
                report.associative += assoc
                if axioms != assoc:
                    report.disagreements.append(
                        (right.tolist(), left.tolist(), theta.tolist()))
    return report


# --- decomposition ---------------------------------------------------------

@dataclass(frozen=True)
class Section:
    """A complement of A' whose vectors lift a basis of A/A'."""

    algebra: Algebra
    complement_basis: tuple[Vector, ...]
    derived: Subspace

    @property
    def basis_matrix(self) -> Matrix:
        """Columns: complement vectors, then the RREF basis of A'."""
        return Matrix.from_columns(list(self.complement_basis) + self.derived.basis_vectors(),
                                   self.algebra.p)


def section(a: Algebra) -> Section:
    """Extend the RREF basis of A' greedily by standard basis vectors."""
    derived = derived_subalgebra(a)
    n, p = a.dim, a.p
    span = derived
    chosen = []
    for i in range(n):
        e = Vector.unit(i, n, p)
        if e not in span:
            chosen.append(e)
            span = span + Subspace.span([e], n, p)
    return Section(a, tuple(chosen), derived)


def decompose(a: Algebra) -> tuple[MetabelianDatum, Matrix]:
    """Datum of A/A' by A' and the isomorphism phi(p, x) = s(p) + x onto ``a``."""
    if not is_associative(a) or not is_metabelian(a):
        raise NotMetabelian(f"{a!r} is not metabelian")
    s = section(a)
    m, n, p = len(s.complement_basis), s.derived.dim, a.p
    phi = s.basis_matrix
    # Write every product in the adapted basis: the first m coordinates are
    # the P-part and must vanish since all products lie in A'.
    adapted = a.change_basis(phi)
    sc = adapted.sc
    if sc[:, :, :m].any():
        raise InternalError("a product left the derived subalgebra")
    right = np.transpose(sc[m:, :m, m:], (1, 2, 0))
    left = np.transpose(sc[:m, m:, m:], (0, 2, 1))
    theta = sc[:m, :m, m:]
    datum = MetabelianDatum.build(list(right), list(left), theta, p)
    product = metabelian_product(datum)
    if not is_algebra_map(phi, product.total, a):
        raise InternalError("phi is not an algebra map")
    if extension_equivalent(product, ExtensionTriple(adapted, m, n)) is None:
        raise InternalError("product is not extension-equivalent to the adapted algebra")
    return datum, phi
