import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from metabel.algebra import (Algebra, derived_subalgebra, extension_equivalent,
                             find_isomorphism, is_metabelian)
from metabel.acceptance import corpus
from metabel.cohomo import ext_enumerate
from metabel.codimone import (ExtClassRep, TPair, build_algebra, enumerate_T, equalizer,
                              ext_classes, ext_k_census, im_sum, met_kv_census,
                              validate_tpair)
from metabel.errors import DimensionMismatch
from metabel.exactla import Matrix, Subspace, Vector


def unit(i, j, p=2):
    return Matrix.unit(i, j, 2, p)


def rep(x, y, u):
    return ExtClassRep(TPair(x, y), Vector(u, x.p))


class TestPairs:
    def test_examples(self):
        z = Matrix.zeros(2, 2, 2)
        assert validate_tpair(z, z) is not None
        assert validate_tpair(unit(0, 1), unit(0, 1)) is not None
        assert validate_tpair(unit(0, 1), unit(1, 0)) is None

    def test_shape(self):
        with pytest.raises(DimensionMismatch):
            validate_tpair(Matrix.zeros(2, 2, 2), Matrix.zeros(1, 1, 2))

    @pytest.mark.parametrize("n,p,count", [(1, 2, 1), (1, 5, 1), (2, 2, 10), (2, 3, 33), (3, 2, 148)])
    def test_counts(self, n, p, count):
        assert len(enumerate_T(n, p)) == count

    @pytest.mark.parametrize("p", [2, 3])
    def test_against_brute_force(self, p):
        mats = [Matrix(np.array(e).reshape(2, 2), p) for e in itertools.product(range(p), repeat=4)]
        brute = [(x, y) for x in mats for y in mats
                 if (x @ x).is_zero() and (y @ y).is_zero() and x @ y == y @ x]
        assert [(t.X, t.Y) for t in enumerate_T(2, p)] == brute


class TestClasses:
    def test_zero_n1(self):
        t = TPair(Matrix.zeros(1, 1, 5), Matrix.zeros(1, 1, 5))
        assert [r.u.coords for r in ext_classes(t)] == [(c,) for c in range(5)]

    def test_e12_zero(self):
        assert [r.u.coords for r in ext_classes(TPair(unit(0, 1), Matrix.zeros(2, 2, 2)))] == [(0, 0)]

    def test_e12_e12(self):
        assert len(ext_classes(TPair(unit(0, 1), unit(0, 1)))) == 4

    @pytest.mark.parametrize("p", [2, 3])
    def test_image_inside_equalizer(self, p):
        for t in enumerate_T(2, p):
            assert im_sum(t) <= equalizer(t)


class TestBuild:
    def test_abelian(self):
        z = Matrix.zeros(2, 2, 3)
        assert build_algebra(rep(z, z, [0, 0])).total.is_abelian()

    def test_ffe(self):
        z = Matrix.zeros(1, 1, 2)
        assert build_algebra(rep(z, z, [1])).total == Algebra.from_products(2, 2, {(0, 0): [0, 1]})

    def test_e12(self):
        a = build_algebra(rep(unit(0, 1), unit(0, 1), [1, 0])).total
        expected = Algebra.from_products(3, 2, {(0, 0): [0, 1, 0], (0, 2): [0, 1, 0],
                                               (2, 0): [0, 1, 0]})
        assert a == expected and list(a.labels) == ["F", "E1", "E2"]

    @pytest.mark.parametrize("p", [2, 3])
    def test_derived_span(self, p):
        for t in enumerate_T(2, p):
            for u in equalizer(t).elements():
                a = build_algebra(ExtClassRep(t, u)).total
                cols = [u] + t.X.columns() + t.Y.columns()
                expected = Subspace.span([Vector((0,) + v.coords, p) for v in cols], 3, p)
                assert is_metabelian(a) and derived_subalgebra(a) == expected

    def test_cosets_decide_equivalence(self):
        for t in enumerate_T(2, 2):
            eq, im = equalizer(t), im_sum(t)
            us = list(eq.elements())
            ext = {u: build_algebra(ExtClassRep(t, u)) for u in us}
            for u, v in itertools.product(us, repeat=2):
                same_coset = (u - v) in im
                assert (extension_equivalent(ext[u], ext[v]) is not None) == same_coset

    def test_codim_one_corpus_covered(self):
        # Every 3-dim metabelian algebra over F2 with a 2-dim derived algebra
        # is isomorphic to one of the built algebras.
        built = [e.algebra.total for e in ext_enumerate(1, 2, 2).entries]
        for a in corpus(3, 2):
            if is_metabelian(a) and derived_subalgebra(a).dim == 2:
                assert any(find_isomorphism(a, b) is not None for b in built)


class TestCensus:
    @pytest.mark.parametrize("n,p,count", [(1, 2, 2), (1, 3, 3), (2, 2, 28), (2, 3, 153)])
    def test_met_kv(self, n, p, count):
        r = met_kv_census(n, p)
        assert r.ok and r.datum_count == count

    def test_met_kv_sum_over_pairs(self):
        assert met_kv_census(2, 2).datum_count == sum(
            equalizer(t).cardinality() for t in enumerate_T(2, 2))

    @pytest.mark.parametrize("n,p,count", [(1, 2, 2), (1, 3, 3), (2, 2, 22), (2, 3, 73)])
    def test_ext_k(self, n, p, count):
        r = ext_k_census(n, p)
        assert r.ok and r.catalog_count == count
