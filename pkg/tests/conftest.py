import numpy as np
from hypothesis import settings, strategies as st

from metabel.exactla import Matrix

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

PRIMES = st.sampled_from([2, 3, 5, 7])


@st.composite
def matrices(draw, p=None, max_rows=5, max_cols=5, rows=None, cols=None):
    p = draw(PRIMES) if p is None else p
    r = draw(st.integers(1, max_rows)) if rows is None else rows
    c = draw(st.integers(1, max_cols)) if cols is None else cols
    flat = draw(st.lists(st.integers(0, p - 1), min_size=r * c, max_size=r * c))
    return Matrix(np.array(flat, dtype=np.int64).reshape(r, c), p)
