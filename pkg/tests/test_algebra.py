import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from metabel.acceptance import corpus
from metabel.algebra import (Algebra, ExtensionTriple, automorphism_group,
                             derived_subalgebra, enumerate_associative_algebras,
                             extension_equivalent, find_isomorphism, is_algebra_map,
                             is_associative, is_metabelian, ito_check,
                             nilpotency_index, nilpotency_index_at_most)
from metabel.codimone import ExtClassRep, TPair, build_algebra
from metabel.dimone import BilinearForm, build_P_theta, catalog
from metabel.errors import BudgetExceeded, HypothesisFailed, NotAssociative
from metabel.exactla import Matrix, Subspace, Vector, gl_array

K3M1 = catalog("alg3:k3_minus1", {}, 3)          # F1 F2 = E, F2 F1 = -E
IDEMPOTENT = Algebra([[[1]]], 2)
FFE = Algebra.from_products(2, 2, {(0, 0): [0, 1]})  # F F = E


def mult(a, x, y):
    """Product by explicit summation over structure constants."""
    n, p = a.dim, a.p
    return [sum(x[i] * y[j] * int(a.sc[i, j, k]) for i in range(n) for j in range(n)) % p
            for k in range(n)]


def oracle_associative(a):
    n = a.dim
    basis = np.eye(n, dtype=int).tolist()
    return all(mult(a, mult(a, x, y), z) == mult(a, x, mult(a, y, z))
               for x, y, z in itertools.product(basis, repeat=3))


def oracle_is_map(c, a, b):
    cols = [list(c.array[:, i]) for i in range(a.dim)]
    return all(list(c.array @ np.array(mult(a, e1, e2)) % a.p) ==
               mult(b, cols[i], cols[j])
               for (i, e1), (j, e2) in itertools.product(
                   enumerate(np.eye(a.dim, dtype=int).tolist()), repeat=2))


def span(vectors, n, p):
    return Subspace.span([Vector(v, p) for v in vectors], n, p)


class TestProducts:
    def test_abelian(self):
        a = Algebra.abelian(2, 5)
        assert a.multiply(Vector([1, 3], 5), Vector([2, 4], 5)).is_zero()

    def test_k3m1_signs(self):
        f1, f2, e = (Vector.unit(i, 3, 3) for i in range(3))
        assert K3M1.multiply(f1, f2) == e
        assert K3M1.multiply(f2, f1) == e * 2

    def test_derived(self):
        assert derived_subalgebra(Algebra.abelian(3, 2)).dim == 0
        assert derived_subalgebra(K3M1) == span([[0, 0, 1]], 3, 3)

    def test_codim_one_derived(self):
        e12 = Matrix.unit(0, 1, 2, 2)
        a = build_algebra(ExtClassRep(TPair(e12, e12), Vector([1, 0], 2))).total
        # basis (F, E1, E2): derived is span{E1}
        assert derived_subalgebra(a) == span([[0, 1, 0]], 3, 2)


class TestPredicates:
    @pytest.mark.parametrize("a", [Algebra.abelian(3, 2), K3M1, IDEMPOTENT])
    def test_associative_examples(self, a):
        assert is_associative(a)

    def test_catalog_algebras_associative(self):
        for fam in ("alg4:k4_3", "alg4:k4_5", "alg4:k4_6"):
            assert is_associative(catalog(fam, {}, 3))

    def test_nonassociative(self):
        a = Algebra.from_products(2, 2, {(0, 0): [0, 1], (1, 0): [1, 0]})
        assert not is_associative(a) and not oracle_associative(a)
        with pytest.raises(NotAssociative):
            nilpotency_index_at_most(a, 3)

    @pytest.mark.parametrize("a,m,expected", [
        (Algebra.abelian(2, 2), 2, True), (K3M1, 3, True), (K3M1, 2, False),
        (IDEMPOTENT, 5, False)])
    def test_nilpotency(self, a, m, expected):
        assert nilpotency_index_at_most(a, m) is expected

    def test_nilpotency_index(self):
        assert nilpotency_index(FFE) == 3
        assert nilpotency_index(IDEMPOTENT) == 0

    @pytest.mark.parametrize("a,expected", [
        (Algebra.abelian(2, 3), True), (K3M1, True), (IDEMPOTENT, False)])
    def test_metabelian(self, a, expected):
        assert is_metabelian(a) is expected

    def test_three_fold_products_can_survive(self):
        # Metabelian, yet F F F = E2: three-fold products need not vanish,
        # only four-fold ones do.
        e21 = Matrix.unit(1, 0, 2, 2)
        a = build_algebra(ExtClassRep(TPair(e21, e21), Vector([1, 0], 2))).total
        assert is_metabelian(a)
        assert not nilpotency_index_at_most(a, 3)
        assert nilpotency_index_at_most(a, 4)


class TestCorpus:
    @pytest.mark.parametrize("n,p,count", [(1, 2, 2), (1, 3, 3), (2, 2, 28), (2, 3, 121)])
    def test_counts(self, n, p, count):
        assert len(list(enumerate_associative_algebras(n, p))) == count

    @pytest.mark.parametrize("p", [2, 3])
    def test_pruned_equals_oracle(self, p):
        pruned = list(enumerate_associative_algebras(2, p))
        tensors = itertools.product(range(p), repeat=8)
        brute = [Algebra(np.array(t).reshape(2, 2, 2), p) for t in tensors]
        assert pruned == [a for a in brute if oracle_associative(a)]
        assert pruned == list(enumerate_associative_algebras(2, p, prune=False))

    def test_dim3_f2_frozen(self):
        assert len(corpus(3, 2)) == 1688

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            list(enumerate_associative_algebras(3, 2, budget=50))


class TestIsomorphism:
    def test_identity(self):
        assert find_isomorphism(K3M1, K3M1) == Matrix.identity(3, 3)
        assert find_isomorphism(Algebra.abelian(2, 2), Algebra.abelian(2, 2)) == Matrix.identity(2, 2)

    def test_homothetic_forms(self):
        a = build_P_theta(BilinearForm.of([[1]], 3)).total
        b = build_P_theta(BilinearForm.of([[2]], 3)).total
        c = find_isomorphism(a, b)
        assert c is not None and oracle_is_map(c, a, b)

    def test_different_derived_dims(self):
        assert find_isomorphism(K3M1, Algebra.abelian(3, 3)) is None

    @given(st.integers(0, 120), st.integers(0, 47))
    def test_change_of_basis(self, i, g):
        a = corpus(2, 3)[i]
        basis = Matrix(gl_array(2, 3)[g], 3)
        b = a.change_basis(basis)
        assert is_algebra_map(basis, b, a) and oracle_is_map(basis, b, a)
        c = find_isomorphism(b, a)
        assert c is not None and oracle_is_map(c, b, a)


class TestAutomorphisms:
    def test_abelian(self):
        assert len(automorphism_group(Algebra.abelian(2, 2))) == 6

    def test_form_identity(self):
        assert len(automorphism_group(build_P_theta(BilinearForm.of(np.eye(2), 2)).total)) == 8

    def test_idempotent(self):
        assert automorphism_group(IDEMPOTENT) == [Matrix.identity(1, 2)]


class TestExtensionEquivalence:
    def test_same(self):
        e = ExtensionTriple(FFE, 1, 1)
        assert extension_equivalent(e, e) == Matrix.identity(2, 2)

    def test_theta_one_vs_zero(self):
        e1 = ExtensionTriple(FFE, 1, 1)
        e2 = ExtensionTriple(Algebra.abelian(2, 2), 1, 1)
        assert extension_equivalent(e1, e2) is None


class TestIto:
    def test_abelian(self):
        a = Algebra.abelian(3, 2)
        r = ito_check(a, Subspace.full(3, 2), Subspace.zero(3, 2))
        assert r.conclusion_holds

    def test_k3m1(self):
        r = ito_check(K3M1, span([[1, 0, 0], [0, 0, 1]], 3, 3), span([[0, 1, 0], [0, 0, 1]], 3, 3))
        assert r.p_abelian and r.v_abelian and r.conclusion_holds

    def test_not_closed(self):
        with pytest.raises(HypothesisFailed) as err:
            ito_check(FFE, span([[1, 0]], 2, 2), span([[0, 1]], 2, 2))
        assert err.value.hypothesis == "subalgebra"

    def test_not_abelian(self):
        with pytest.raises(HypothesisFailed) as err:
            ito_check(IDEMPOTENT, Subspace.full(1, 2), Subspace.zero(1, 2))
        assert err.value.hypothesis == "abelian"

    def test_not_spanning(self):
        with pytest.raises(HypothesisFailed) as err:
            ito_check(Algebra.abelian(2, 2), span([[1, 0]], 2, 2), span([[1, 0]], 2, 2))
        assert err.value.hypothesis == "sum"
