import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from metabel.errors import BudgetExceeded, DimensionMismatch, NotASubspace
from metabel.exactla import (Matrix, PrimeField, Subspace, Vector, all_subspaces,
                             gl_array, gl_enumerate, gl_order, image, kernel,
                             mat_apply, mat_mul, matrices_array, quotient, rref)

from conftest import PRIMES, matrices


E12 = Matrix.unit(0, 1, 2, 2)


def brute_kernel(m: Matrix) -> set:
    return {v for v in itertools.product(range(m.p), repeat=m.cols)
            if not (m.array @ np.array(v) % m.p).any()}


def brute_cosets(big: Subspace, small: Subspace) -> list:
    """Lexicographically least element of every coset, by full enumeration."""
    smalls = [tuple(v) for v in small.elements_array()]
    mins = set()
    for v in big.elements_array():
        coset = [tuple((v + s) % big.p) for s in np.array(smalls)]
        mins.add(min(coset))
    return sorted(mins)


class TestField:
    def test_rejects_composite(self):
        with pytest.raises(ValueError):
            PrimeField(4)

    def test_inverse(self):
        f = PrimeField(7)
        assert all(x * f.inv(x) % 7 == 1 for x in f.units())

    def test_squares_of_f3(self):
        assert PrimeField(3).squares() == frozenset({0, 1})


class TestRref:
    def test_identity(self):
        red, rank, _ = rref(Matrix.identity(2, 2))
        assert red == Matrix.identity(2, 2) and rank == 2

    def test_zero(self):
        red, rank, _ = rref(Matrix.zeros(3, 3, 3))
        assert red.is_zero() and rank == 0

    def test_all_ones(self):
        red, rank, _ = rref(Matrix([[1, 1], [1, 1]], 2))
        assert red == Matrix([[1, 1], [0, 0]], 2) and rank == 1

    @given(matrices())
    def test_idempotent(self, m):
        red = rref(m)[0]
        assert rref(red)[0] == red

    @given(matrices())
    def test_rank_nullity(self, m):
        assert m.rank() + kernel(m).dim == m.cols

    @given(matrices(max_rows=3, max_cols=3, p=3))
    def test_kernel_matches_brute_force(self, m):
        assert {v.coords for v in kernel(m).elements()} == brute_kernel(m)

    @given(matrices(), st.data())
    def test_row_space_is_canonical(self, m, data):
        g = data.draw(matrices(p=m.p, rows=m.rows, cols=m.rows))
        if g.is_invertible():
            assert Subspace.from_array((g @ m).array, m.cols, m.p) == \
                Subspace.from_array(m.array, m.cols, m.p)


class TestKernelImage:
    def test_kernel_of_zero(self):
        assert kernel(Matrix.zeros(2, 2, 2)).dim == 2

    def test_kernel_of_e12(self):
        assert kernel(E12) == Subspace.span([Vector([1, 0], 2)], 2, 2)

    def test_image_of_e12(self):
        assert image(E12) == Subspace.span([Vector([1, 0], 2)], 2, 2)

    @given(matrices())
    def test_image_dim_is_rank(self, m):
        assert image(m).dim == m.rank()


class TestQuotient:
    def test_by_zero(self):
        assert len(quotient(Subspace.full(2, 2), Subspace.zero(2, 2))) == 4

    def test_by_itself(self):
        s = Subspace.span([Vector([1, 0], 2)], 2, 2)
        assert [v.coords for v in quotient(s, s).transversal] == [(0, 0)]

    def test_plane_by_line(self):
        s = Subspace.span([Vector([1, 0], 2)], 2, 2)
        q = quotient(Subspace.full(2, 2), s)
        assert [v.coords for v in q.transversal] == [(0, 0), (0, 1)]

    def test_not_a_subspace(self):
        a = Subspace.span([Vector([1, 0], 2)], 2, 2)
        b = Subspace.span([Vector([0, 1], 2)], 2, 2)
        with pytest.raises(NotASubspace):
            quotient(a, b)

    @given(PRIMES, st.data())
    def test_transversal_matches_coset_minima(self, p, data):
        p = min(p, 3)
        n = data.draw(st.integers(1, 3))
        subs = list(all_subspaces(n, p))
        big = data.draw(st.sampled_from(subs))
        small = data.draw(st.sampled_from([s for s in subs if s <= big]))
        q = quotient(big, small)
        assert len(q) == p ** (big.dim - small.dim)
        assert [v.coords for v in q.transversal] == brute_cosets(big, small)


class TestGL:
    @pytest.mark.parametrize("n,p,order", [(1, 2, 1), (2, 2, 6), (2, 3, 48), (3, 2, 168)])
    def test_orders(self, n, p, order):
        assert len(gl_array(n, p)) == order == gl_order(n, p)

    def test_brute_force_gl22(self):
        mats = [Matrix(np.array(e).reshape(2, 2), 2)
                for e in itertools.product(range(2), repeat=4)]
        assert {m for m in mats if m.is_invertible()} == set(gl_enumerate(2, 2))

    def test_encoding_order(self):
        codes = [m.encoding() for m in gl_enumerate(2, 3)]
        assert codes == sorted(codes)

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            gl_array(3, 3, budget=100)

    @given(matrices(p=5, rows=3, cols=3))
    def test_inverse(self, m):
        if m.is_invertible():
            assert m @ m.inverse() == Matrix.identity(3, 5)
        else:
            with pytest.raises(ZeroDivisionError):
                m.inverse()


class TestMatrixOps:
    def test_identity_apply(self):
        v = Vector([1, 2], 3)
        assert mat_apply(Matrix.identity(2, 3), v) == v

    def test_square_of_ones(self):
        m = Matrix([[1, 1], [1, 1]], 2)
        assert (m @ m).is_zero()

    def test_e12_e21(self):
        assert E12 @ Matrix.unit(1, 0, 2, 2) == Matrix.unit(0, 0, 2, 2)

    def test_mismatch(self):
        with pytest.raises(DimensionMismatch):
            mat_mul(Matrix.zeros(2, 3, 2), Matrix.zeros(2, 3, 2))

    def test_encoding_round_trip(self):
        for code in range(81):
            assert Matrix.from_encoding(code, 2, 2, 3).encoding() == code

    def test_matrices_array_counts(self):
        assert matrices_array(2, 2, 3).shape == (81, 2, 2)
