import itertools
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, strategies as st

from metabel.algebra import Algebra, derived_subalgebra
from metabel.dimone import (BilinearForm, GElement, aut_group_G, build_P_theta,
                            catalog, catalog_algebra_for, catalog_entries,
                            homothetic, homothety_agreement, isometric)
from metabel.errors import InvalidParams, UnknownFamily
from metabel.exactla import Matrix, matrices_array


def form(entries, p):
    return BilinearForm.of(entries, p)


def brute_homothetic(t1, t2):
    """Search (u, C) over all units and all matrices, invertibility checked by rank."""
    n, p = t1.n, t1.p
    for u in range(1, p):
        for c in matrices_array(n, n, p):
            if Matrix(c, p).is_invertible() and \
                    ((c.T @ t2.array @ c - u * t1.array) % p == 0).all():
                return True
    return False


class TestBuild:
    def test_zero_is_abelian(self):
        a = build_P_theta(form(np.zeros((2, 2)), 3)).total
        assert a == Algebra.abelian(3, 3)

    def test_skew(self):
        a = build_P_theta(form([[0, 1], [-1, 0]], 3)).total
        assert (a.sc == catalog("alg3:k3_minus1", {}, 3).sc).all()

    def test_theta6(self):
        a = build_P_theta(catalog("n3:theta6", {}, 5)).total
        assert int(a.sc[:, :, 3].sum()) == 5
        assert (a.sc == catalog("alg4:k4_6", {}, 5).sc).all()

    @given(st.lists(st.integers(0, 2), min_size=4, max_size=4))
    def test_derived_dim_one(self, entries):
        t = form(np.array(entries).reshape(2, 2), 3)
        assert derived_subalgebra(build_P_theta(t).total).dim == (0 if t.is_zero() else 1)


class TestHomothety:
    def test_self(self):
        t = form([[1, 2], [0, 1]], 3)
        w = homothetic(t, t)
        assert w.u == 1 and w.C == Matrix.identity(2, 3)

    def test_scaling(self):
        w = homothetic(form([[1]], 3), form([[2]], 3))
        assert w.u == 2 and w.C == Matrix([[1]], 3)

    def test_rank_differs(self):
        assert homothetic(form([[1]], 2), form([[0]], 2)) is None

    def test_isometry_examples(self):
        assert isometric(form([[1]], 3), form([[1]], 3)) == Matrix([[1]], 3)
        assert isometric(form([[1]], 3), form([[2]], 3)) is None
        assert isometric(form([[1]], 5), form([[4]], 5)) == Matrix([[2]], 5)

    @given(st.data())
    def test_against_brute_force(self, data):
        p = data.draw(st.sampled_from([2, 3]))
        draw = lambda: form(np.array(data.draw(
            st.lists(st.integers(0, p - 1), min_size=4, max_size=4))).reshape(2, 2), p)
        t1, t2 = draw(), draw()
        assert (homothetic(t1, t2) is not None) == brute_homothetic(t1, t2)
        if isometric(t1, t2) is not None:
            assert homothetic(t1, t2) is not None


class TestAgreement:
    def test_n1_f3(self):
        r = homothety_agreement(1, 3)
        assert r.ok and r.classes() == [[0], [1, 2]]

    def test_n2_f2(self):
        r = homothety_agreement(2, 2)
        assert r.ok and r.pairs == 256 and len(r.classes()) == 6
        assert (r.hom == r.isometry).all()
        assert r.is_equivalence("homothety") and r.is_equivalence("isometry")

    def test_jobs_do_not_change_output(self):
        a, b = homothety_agreement(2, 2), homothety_agreement(2, 2, jobs=2)
        assert (a.iso == b.iso).all() and (a.hom == b.hom).all()

    @pytest.mark.slow
    def test_n2_f3(self):
        r = homothety_agreement(2, 3)
        assert r.ok and r.pairs == 6561
        assert len(r.classes("homothety")) == 8 and len(r.classes("isometry")) == 10
        assert r.is_equivalence("homothety")


@lru_cache(maxsize=1)
def _sample_group():
    return aut_group_G(form([[1, 1], [0, 2]], 3))


class TestAutomorphismGroup:
    def test_rejects_zero(self):
        with pytest.raises(InvalidParams):
            aut_group_G(form([[0]], 2))

    def test_line(self):
        group = aut_group_G(form([[1]], 2))
        assert sorted(g.lam for g in group) == [(0,), (1,)]
        assert all(g.u == 1 for g in group)

    def test_identity_form(self):
        assert len(aut_group_G(form(np.eye(2), 2))) == 8

    @given(st.data())
    def test_group_law(self, data):
        group = _sample_group()
        g, h, k = (data.draw(st.sampled_from(group)) for _ in range(3))
        ident = GElement(1, (0, 0), Matrix.identity(2, 3))
        assert (g * h) * k == g * (h * k)
        assert g * ident == g == ident * g
        assert g * g.inverse() == ident
        assert (g * h).as_matrix() == g.as_matrix() @ h.as_matrix()


class TestCatalog:
    def test_theta_ab_zero(self):
        assert catalog("n2:theta_ab", {"a": 0, "b": 0}, 2).matrix == Matrix([[1, 0], [0, 0]], 2)

    def test_k3_ab(self):
        a = catalog("alg3:k3_ab", {"a": 1, "b": 0}, 5)
        nonzero = {(i, j) for i, j in itertools.product(range(3), repeat=2) if a.sc[i, j].any()}
        assert nonzero == {(0, 0), (0, 1)}
        assert a.labels == ("F1", "F2", "E") or list(a.labels) == ["F1", "F2", "E"]

    def test_theta4_skew_block(self):
        m = catalog("n3:theta4", {}, 3).array
        assert m.tolist() == [[0, 0, 0], [0, 0, 1], [0, 2, 0]]

    def test_every_form_has_its_algebra(self):
        entries = catalog_entries()
        for fam, e in entries.items():
            if e.kind == "form":
                assert entries[catalog_algebra_for(fam)].params == e.params

    def test_unknown(self):
        with pytest.raises(UnknownFamily):
            catalog("n4:nothing", {}, 3)

    def test_bad_params(self):
        with pytest.raises(InvalidParams):
            catalog("n2:theta_ab", {"a": 1}, 3)
        with pytest.raises(InvalidParams):
            catalog("n2:theta_ab", {"a": 1, "b": "x"}, 3)
