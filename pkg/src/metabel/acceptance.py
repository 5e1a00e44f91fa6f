"""Exhaustive acceptance checks, shared by the test suite and ``metabel selftest``."""

from __future__ import annotations

import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .algebra import (Algebra, ExtensionTriple, abelian_sum_decomposition,
                      automorphism_group, derived_subalgebra,
                      enumerate_associative_algebras, extension_equivalent,
                      is_abelian_subspace, is_algebra_map, is_metabelian,
                      ito_check, nilpotency_index_at_most)
from .cohomo import all_datums, enumerate_bimodules, ext_enumerate
from .codimone import ext_k_census
from .datum import associativity_iff_datum, decompose, metabelian_product
from .dimone import (BilinearForm, aut_group_G, build_P_theta, catalog,
                     catalog_algebra_for, catalog_entries, homothetic,
                     isometric, homothety_agreement)
from .exactla import (Matrix, Subspace, gl_order, kernel, image, quotient, rref)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} [{self.number:2d}] {self.name}: {self.detail} ({self.seconds:.1f}s)"


CORPORA = ((2, 2), (2, 3), (3, 2))


@lru_cache(maxsize=None)
def corpus(n: int, p: int) -> tuple[Algebra, ...]:
    return tuple(enumerate_associative_algebras(n, p))


def corpus_algebras():
    for n, p in CORPORA:
        for a in corpus(n, p):
            yield (n, p), a


def _datum_products():
    shapes = [((1, 1), 2), ((1, 2), 2), ((2, 1), 2), ((1, 1), 3), ((1, 2), 3), ((2, 1), 3)]
    for (m, n), p in shapes:
        for b in enumerate_bimodules(m, n, p):
            for d in all_datums(b):
                yield metabelian_product(d)


# --- the criteria ---------------------------------------------------------------

def c1_datum_iff_associative():
    parts, ok = [], True
    for (m, n), p, total in (((1, 1), 2, 8), ((1, 1), 3, 27), ((1, 2), 2, 1024)):
        r = associativity_iff_datum(m, n, p)
        ok &= r.ok and r.total == total
        parts.append(f"({m},{n})/F{p}: {r.total} triples, {len(r.disagreements)} disagreements")
    return ok, "; ".join(parts)


def c2_metabelian_criteria():
    exceptions, sizes = 0, {}
    for key, a in corpus_algebras():
        sizes[key] = sizes.get(key, 0) + 1
        if nilpotency_index_at_most(a, 4) != is_abelian_subspace(a, derived_subalgebra(a)):
            exceptions += 1
    products = bad = 0
    for e in _datum_products():
        products += 1
        bad += not nilpotency_index_at_most(e.total, 4)
    sizes_text = ", ".join(f"dim {n}/F{p}: {c}" for (n, p), c in sizes.items())
    return (exceptions == 0 and bad == 0,
            f"{sizes_text}; {exceptions} exceptions; {products} products, {bad} with a nonzero 4-fold product")


def _round_trip_ok(a: Algebra) -> bool:
    datum, phi = decompose(a)
    m, n = datum.dim_p, datum.dim_v
    product = metabelian_product(datum)
    if not phi.is_invertible() or not is_algebra_map(phi, product.total, a):
        return False
    # phi carries the V block onto A'.
    v_image = Subspace.span(phi.columns()[m:], a.dim, a.p)
    if v_image != derived_subalgebra(a):
        return False
    w = extension_equivalent(product, ExtensionTriple(a.change_basis(phi), m, n))
    if w is None:
        return False
    # The witness fixes V pointwise and induces the identity on P.
    arr = w.array
    return (not arr[:m, m:].any() and (arr[:m, :m] == np.eye(m, dtype=np.int64)).all()
            and (arr[m:, m:] == np.eye(n, dtype=np.int64)).all())


def c3_round_trip():
    total = good = 0
    for _, a in corpus_algebras():
        if not is_metabelian(a):
            continue
        total += 1
        good += _round_trip_ok(a)
    return total > 0 and good == total, f"{good}/{total} metabelian algebras reproduced"


def c4_abelian_sums():
    decomposable = counter = 0
    for _, a in corpus_algebras():
        spans = abelian_sum_decomposition(a)
        if spans is None:
            continue
        decomposable += 1
        counter += not ito_check(a, *spans).conclusion_holds
    return counter == 0, f"{decomposable} decomposable algebras, {counter} counterexamples"


def c5_homothety(jobs: int = 1):
    ok, parts = True, []
    for p, forms, pairs in ((2, 16, 256), (3, 81, 6561)):
        r = homothety_agreement(2, p, jobs=jobs)
        ok &= r.ok and len(r.forms) == forms and r.pairs == pairs
        parts.append(f"F{p}: {r.pairs} pairs, {len(r.disagreements)} disagreements")
        if p == 2:
            same = bool((r.hom == r.isometry).all())
            ok &= same
            parts.append(f"F2 homothety == isometry: {same}")
    t1, t2 = BilinearForm.of([[1]], 3), BilinearForm.of([[2]], 3)
    witness = homothetic(t1, t2) is not None and isometric(t1, t2) is None
    ok &= witness
    parts.append(f"(1) vs (2) over F3 homothetic but not isometric: {witness}")
    return ok, "; ".join(parts)


def c6_automorphisms():
    from .exactla import matrices_array
    checked, ok = 0, True
    for f in matrices_array(2, 2, 2):
        theta = BilinearForm(Matrix(f, 2))
        if theta.is_zero():
            continue
        group = aut_group_G(theta)
        auts = set(automorphism_group(build_P_theta(theta).total))
        images = {g.as_matrix() for g in group}
        closed = all(g * h in set(group) for g in group for h in group)
        ok &= len(group) == len(auts) and images == auts and len(images) == len(group) and closed
        checked += 1
    return ok and checked == 15, f"{checked} nonzero forms, group orders match Aut and the map is a bijection"


def c7_codim_one():
    ok, parts = True, []
    for n, p in ((1, 2), (2, 2), (1, 3)):
        r = ext_k_census(n, p)
        ok &= r.ok
        parts.append(f"dimV={n}/F{p}: {r.quotient_count}/{r.catalog_count}/{r.brute_force_count}")
    anchors = ext_k_census(1, 2).catalog_count == 2 and ext_k_census(1, 3).catalog_count == 3
    return ok and anchors, "; ".join(parts)


def c8_dim_one_ext():
    ok, parts = True, []
    for n in (1, 2):
        for p in (2, 3):
            cat = ext_enumerate(n, 1, p)
            trivial = len(cat.summary) == 1 and cat.entries[0].bimodule.is_trivial()
            ok &= len(cat) == p ** (n * n) and trivial and cat.verified
            parts.append(f"n={n}/F{p}: {len(cat)}")
    return ok, "; ".join(parts)


def c9_catalogs():
    entries = catalog_entries()
    checked, ok = 0, True
    for p in (2, 3, 5):
        for fam, e in entries.items():
            grids = [{}] if not e.params else [
                dict(zip(e.params, vals))
                for vals in np.ndindex(*([p] * len(e.params)))]
            for params in grids:
                params = {k: int(v) for k, v in params.items()}
                value = catalog(fam, params, p)  # algebras are checked on load
                if e.kind == "form":
                    alg = catalog(catalog_algebra_for(fam), params, p)
                    built = build_P_theta(value).total
                    ok &= bool((built.sc == alg.sc).all())
                checked += 1
    return ok, f"{checked} instantiations over F2, F3, F5"


def c10_linear_algebra(seed: int = 0, trials: int = 200):
    rng = np.random.default_rng(seed)
    ok = True
    for _ in range(trials):
        p = int(rng.choice([2, 3, 5, 7]))
        r, c = int(rng.integers(1, 6)), int(rng.integers(1, 7))
        m = Matrix(rng.integers(0, p, size=(r, c)), p)
        red, rank, _ = rref(m)
        ok &= rank + kernel(m).dim == c
        ok &= rref(red)[0] == red
        ok &= image(m).dim == rank
        # Mixing the rows by an invertible matrix keeps the row space.
        g = Matrix(rng.integers(0, p, size=(r, r)), p)
        if g.is_invertible():
            ok &= Subspace.from_array((g @ m).array, c, p) == Subspace.from_array(m.array, c, p)
        # Quotient sizes.
        big = Subspace.from_array(m.array, c, p)
        small = Subspace.from_array(m.array[: max(r - 1, 0)], c, p)
        ok &= len(quotient(big, small)) == p ** (big.dim - small.dim)
    orders = (gl_order(2, 2), gl_order(2, 3))
    ok &= orders == (6, 48)
    return ok, f"{trials} random trials; |GL(2,2)|={orders[0]}, |GL(2,3)|={orders[1]}"


CRITERIA = (
    (1, "datum axioms iff associativity", c1_datum_iff_associative),
    (2, "derived abelian iff 4-fold products vanish", c2_metabelian_criteria),
    (3, "decompose then product round trip", c3_round_trip),
    (4, "sum of abelian subalgebras is metabelian", c4_abelian_sums),
    (5, "isomorphism of P_theta iff homothety", c5_homothety),
    (6, "automorphisms of P_theta", c6_automorphisms),
    (7, "codimension one class counts", c7_codim_one),
    (8, "one-dimensional derived algebra classes", c8_dim_one_ext),
    (9, "catalog regression", c9_catalogs),
    (10, "linear algebra substrate", c10_linear_algebra),
)


def run_criterion(number: int, jobs: int = 1) -> CriterionResult:
    _, name, func = CRITERIA[number - 1]
    start = time.perf_counter()
    kwargs = {"jobs": jobs} if func is c5_homothety else {}
    try:
        passed, detail = func(**kwargs)
    except Exception as exc:  # a crash is a failure, reported like any other
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    return CriterionResult(number, name, bool(passed), detail, time.perf_counter() - start)


def run_all(jobs: int = 1):
    for number, _, _ in CRITERIA:
        yield run_criterion(number, jobs)
