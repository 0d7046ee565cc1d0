import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dtwsearch.core import InvalidInputError, SearchParams, lp_dist
from dtwsearch.dtw import WarpingPath, cost_matrix, dtw, dtw_bruteforce, warping_paths

from conftest import exponents, series_pair

FULL = 1000


def P(p=1.0, w=FULL):
    return SearchParams(p=p, w=w)


class TestFixtures:
    @pytest.mark.parametrize("p", [1.0, 2.0, 4.0, math.inf])
    def test_identity(self, p):
        x = np.array([3.0, -1.0, 4.0, 1.0, 5.0])
        assert dtw(x, x, P(p, 1)) == 0.0

    def test_sqrt17(self):
        assert dtw([0, 0, 1, 0], [2, 3, 2, 2], P(2.0)) == pytest.approx(math.sqrt(17), abs=1e-12)
        assert dtw_bruteforce([0, 0, 1, 0], [2, 3, 2, 2], P(2.0)) == pytest.approx(math.sqrt(17), abs=1e-12)

    @pytest.mark.parametrize("p", [1.0, 2.0, 3.0, 4.0])
    def test_shifted_ramp(self, p):
        x, y = [0, 1, 2], [1, 2, 3]
        assert dtw(x, y, P(p)) == pytest.approx(2 ** (1 / p), abs=1e-12)
        assert lp_dist(x, y, p) == pytest.approx(3 ** (1 / p), abs=1e-12)

    def test_max_norm_counterexample(self):
        z = [7, 7, 7, 0]
        assert dtw(z, [7, 0, 5, 0], P(math.inf)) == 5.0
        assert dtw(z, [7, 0, 1, 0], P(math.inf)) == 1.0

    def test_banded_bruteforce(self):
        assert dtw_bruteforce([0, 0, 0], [0, 5, 0], P(1.0, 1)) == 5.0

    def test_band_zero_is_lp(self, rng):
        x, y = rng.standard_normal((2, 30))
        for p in (1.0, 2.0, math.inf):
            assert dtw(x, y, P(p, 0)) == pytest.approx(lp_dist(x, y, p), rel=1e-12)

    def test_errors(self):
        with pytest.raises(InvalidInputError):
            dtw([1.0, 2.0], [1.0], P())
        with pytest.raises(InvalidInputError):
            dtw_bruteforce(np.zeros(11), np.zeros(11), P())


class TestPaths:
    def test_counts(self):
        assert len(warping_paths(1)) == 1
        assert len(warping_paths(2)) == 1
        assert len(warping_paths(6)) == 83

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_every_path_is_valid(self, n):
        for path in warping_paths(n):
            assert path.covers(n) and path.is_monotone() and path.is_minimal()
            assert n <= len(path) <= 2 * n - 2 or n == 1
            assert path.matches[0] == (0, 0) and path.matches[-1] == (n - 1, n - 1)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_enumeration_is_complete(self, n):
        # every subset of the grid that is a minimal monotone cover must be listed
        cells = [(i, j) for i in range(n) for j in range(n)]
        found = {pth.matches for pth in warping_paths(n)}
        expected = set()
        for k in range(n, 2 * n):
            for subset in itertools.combinations(cells, k):
                ordered = tuple(sorted(subset))
                steps = zip(ordered, ordered[1:])
                if ordered[0] != (0, 0) or ordered[-1] != (n - 1, n - 1):
                    continue
                if not all(b[0] - a[0] in (0, 1) and b[1] - a[1] in (0, 1) and b != a for a, b in steps):
                    continue
                if WarpingPath(ordered).is_minimal():
                    expected.add(ordered)
        assert found == expected

    def test_return_path(self):
        value, path = dtw_bruteforce([0, 0, 1, 0], [2, 3, 2, 2], P(2.0), return_path=True)
        assert path.cost(np.array([0, 0, 1, 0.0]), np.array([2, 3, 2, 2.0]), 2.0) == pytest.approx(value)


small_ints = st.integers(1, 7).flatmap(
    lambda n: st.tuples(
        st.lists(st.integers(-3, 3), min_size=n, max_size=n),
        st.lists(st.integers(-3, 3), min_size=n, max_size=n),
    )
)


@given(small_ints, st.integers(0, 7), exponents)
def test_dp_matches_bruteforce(pair, w, p):
    x, y = (np.array(v, dtype=float) for v in pair)
    assert dtw(x, y, P(p, w)) == pytest.approx(dtw_bruteforce(x, y, P(p, w)), abs=1e-9)


@given(series_pair(max_size=20), st.integers(0, 25), exponents)
def test_symmetric(pair, w, p):
    x, y = pair
    assert dtw(x, y, P(p, w)) == pytest.approx(dtw(y, x, P(p, w)), rel=1e-12, abs=1e-12)


@given(series_pair(max_size=20), st.integers(0, 20), exponents)
def test_band_monotone(pair, w, p):
    x, y = pair
    wide, narrow = dtw(x, y, P(p, w + 1)), dtw(x, y, P(p, w))
    assert wide <= narrow * (1 + 1e-12) + 1e-12
    assert narrow <= lp_dist(x, y, p) * (1 + 1e-12) + 1e-12


@given(series_pair(max_size=15), st.integers(0, 15), exponents)
def test_cost_matrix_corner(pair, w, p):
    x, y = pair
    q = cost_matrix(x, y, P(p, w))
    n = len(x)
    assert q.shape == (n + 1, n + 1)
    assert q[n, n] == 0
    d = q[0, 0] if math.isinf(p) else q[0, 0] ** (1 / p)
    assert d == pytest.approx(dtw(x, y, P(p, w)), rel=1e-9, abs=1e-9)


def test_max_norm_triangle_needs_full_band():
    # composing two banded paths can leave the band, so the plain triangle
    # inequality for the max norm only survives without a constraint
    x, y, z = np.array([1, 2, 2, 1.0]), np.array([2, 2, 0, 1.0]), np.array([1, -2, -2, -1.0])
    banded = P(math.inf, 1)
    assert dtw_bruteforce(x, y, banded) + dtw_bruteforce(y, z, banded) < dtw_bruteforce(x, z, banded)
    free = P(math.inf, 3)
    assert dtw(x, y, free) + dtw(y, z, free) >= dtw(x, z, free)


@given(series_pair(max_size=20), st.integers(0, 2**32 - 1))
def test_max_norm_triangle_unconstrained(pair, seed):
    x, y = pair
    z = np.random.default_rng(seed).standard_normal(len(x)) * 10
    free = P(math.inf, len(x))
    assert dtw(x, y, free) + dtw(y, z, free) >= dtw(x, z, free) - 1e-9
