import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import norm

import oracle
from tsdict.symbolic import (
    BreakpointTable,
    decode_word,
    dft_batch,
    dft_truncate,
    disjoint_windows,
    encode_word,
    equi_depth_breakpoints,
    gaussian_breakpoints,
    mcb_discretise,
    mcb_fit,
    paa,
    prefix_word_keys,
    sax_word,
    sliding_windows,
    word_keys,
    znormalize,
)


class TestPAA:
    @pytest.mark.parametrize(
        "x, l, expected",
        [
            ([1, 1, 1, 1, 3, 3, 3, 3], 2, [1, 3]),
            ([5, 7, 5, 7], 4, [5, 7, 5, 7]),
            ([0, 2, 4, 6], 2, [1, 5]),
        ],
    )
    def test_examples(self, x, l, expected):
        np.testing.assert_allclose(paa(x, l), expected)

    def test_fractional_chunks(self):
        # w=5, l=2: chunk 0 = x0 + x1 + half of x2, over 2.5 points
        x = [1.0, 2.0, 3.0, 4.0, 5.0]
        np.testing.assert_allclose(paa(x, 2), [(1 + 2 + 1.5) / 2.5, (1.5 + 4 + 5) / 2.5])

    def test_matches_oracle(self, rng):
        for w in range(2, 20):
            x = rng.normal(size=w)
            for l in range(1, w + 1):
                np.testing.assert_allclose(paa(x, l), oracle.paa(list(x), l), atol=1e-12)

    @pytest.mark.parametrize("l", [0, 5])
    def test_bad_length(self, l):
        with pytest.raises(ValueError):
            paa([1.0, 2.0, 3.0, 4.0], l)

    def test_single_point_window(self):
        with pytest.raises(ValueError):
            paa([1.0], 1)

    def test_constant(self):
        for l in (1, 2, 3, 6):
            np.testing.assert_allclose(paa(np.full(6, 2.5), l), 2.5)


class TestGaussianBreakpoints:
    def test_alpha2(self):
        assert gaussian_breakpoints(2).tolist() == [0.0]

    @pytest.mark.parametrize("alpha", [3, 4])
    def test_quantiles(self, alpha):
        np.testing.assert_allclose(gaussian_breakpoints(alpha), oracle.gaussian_breakpoints(alpha), atol=1e-9)

    def test_values(self):
        np.testing.assert_allclose(gaussian_breakpoints(4), [-0.6745, 0.0, 0.6745], atol=1e-3)
        np.testing.assert_allclose(gaussian_breakpoints(3), [-0.4307, 0.4307], atol=1e-3)

    @pytest.mark.parametrize("alpha", range(2, 21))
    def test_antisymmetric(self, alpha):
        bp = gaussian_breakpoints(alpha)
        assert np.array_equal(bp, -bp[::-1])

    def test_bad_alpha(self):
        with pytest.raises(ValueError):
            gaussian_breakpoints(1)


class TestSAX:
    def test_flat_window(self):
        assert sax_word([3, 3, 3, 3], 2, 4).tolist() == [1, 1]
        assert np.all(znormalize(np.full(5, 7.0)) == 0)

    def test_outer_bins(self):
        # z-normalised PAA is [-1, 1]
        assert sax_word([-1, -1, 1, 1], 2, 4).tolist() == [0, 3]

    def test_inner_bins(self):
        # mean 0 and variance 0.25 + d^2 = 1, so the window is already
        # z-normalised and its pairwise means are -0.5 and 0.5
        d = np.sqrt(0.75)
        x = np.array([-0.5 - d, -0.5 + d, 0.5 - d, 0.5 + d])
        np.testing.assert_allclose(paa(znormalize(x), 2), [-0.5, 0.5], atol=1e-12)
        assert sax_word(x, 2, 4).tolist() == [1, 2]

    def test_bin_of_half(self):
        table = BreakpointTable.gaussian(2, 4)
        assert table.discretise(np.array([-0.5, 0.5])).tolist() == [1, 2]

    def test_matches_oracle(self, rng):
        for _ in range(200):
            w = int(rng.integers(2, 16))
            l = int(rng.integers(1, w + 1))
            alpha = int(rng.integers(2, 9))
            x = rng.normal(size=w)
            ref = oracle.paa(oracle.znorm(list(x)), l)
            if min(abs(v - b) for v in ref for b in oracle.gaussian_breakpoints(alpha)) < 1e-9:
                continue  # a rounding-level tie with a breakpoint
            assert sax_word(x, l, alpha).tolist() == oracle.sax_word(list(x), l, alpha)


class TestDFT:
    def test_constant(self):
        assert np.allclose(dft_truncate(np.full(8, 3.2), 4, True), 0)

    def test_cosine(self):
        w = 8
        x = np.cos(2 * np.pi * np.arange(w) / w)
        np.testing.assert_allclose(dft_truncate(x, 2, True), [4.0, 0.0], atol=1e-9)

    def test_keep_mean(self):
        x = np.arange(6.0)
        out = dft_truncate(x, 4, False)
        assert out[0] == pytest.approx(15.0)
        assert out[1] == 0.0

    def test_matches_oracle(self, rng):
        for _ in range(100):
            w = int(rng.integers(4, 30))
            x = rng.normal(size=w)
            l = 2 * int(rng.integers(1, w // 2))
            for p in (True, False):
                np.testing.assert_allclose(dft_truncate(x, l, p), oracle.dft(list(x), l, p), atol=1e-9)

    def test_offset_and_linearity(self, rng):
        for _ in range(100):
            x, y = rng.normal(size=(2, 16))
            a, b, c = rng.normal(size=3)
            np.testing.assert_allclose(dft_truncate(x + c, 6, True), dft_truncate(x, 6, True), atol=1e-9)
            lhs = dft_truncate(a * x + b * y, 6, True)
            rhs = a * dft_truncate(x, 6, True) + b * dft_truncate(y, 6, True)
            np.testing.assert_allclose(lhs, rhs, atol=1e-9)

    def test_odd_length(self):
        with pytest.raises(ValueError):
            dft_truncate(np.ones(8), 3, True)

    def test_batch_shape(self, rng):
        W = rng.normal(size=(3, 5, 10))
        assert dft_batch(W, 4, True).shape == (3, 5, 4)


class TestMCB:
    def test_equi_depth_examples(self):
        assert equi_depth_breakpoints(np.arange(1, 9), 4).tolist() == [2, 4, 6]
        assert equi_depth_breakpoints(np.full(9, 3.0), 4).tolist() == [3, 3, 3]
        assert equi_depth_breakpoints(np.array([10.0, 0.0]), 2).tolist() == [0]

    @pytest.mark.parametrize("value, symbol", [(5, 2), (2, 0), (9, 3)])
    def test_discretise_examples(self, value, symbol):
        table = BreakpointTable(np.array([[2.0, 4.0, 6.0]]))
        assert mcb_discretise([value], table).tolist() == [symbol]

    def test_degenerate_row_goes_last(self):
        table = BreakpointTable(np.array([[3.0, 3.0, 3.0]]))
        assert mcb_discretise([3.0], table).tolist() == [0]
        assert mcb_discretise([3.5], table).tolist() == [3]

    def test_dimension_mismatch(self):
        table = BreakpointTable(np.array([[0.0], [1.0]]))
        with pytest.raises(ValueError):
            mcb_discretise([0.5], table)

    def test_fit_matches_oracle(self, rng):
        X = rng.normal(size=(5, 23))
        for p in (True, False):
            table = mcb_fit(X, 7, 4, 4, p)
            np.testing.assert_allclose(table.rows, oracle.mcb_table(X.tolist(), 7, 4, 4, p), atol=1e-9)

    def test_partial_window_dropped(self):
        X = np.arange(10.0)[None, :]
        assert disjoint_windows(X, 4).shape == (2, 4)

    def test_equi_depth_occupancy(self, rng):
        for _ in range(100):
            n = int(rng.integers(10, 400))
            alpha = int(rng.integers(2, 9))
            vals = rng.normal(size=n)
            row = equi_depth_breakpoints(vals, alpha)
            occ = np.bincount(np.searchsorted(row, vals, side="left"), minlength=alpha)
            assert occ.max() - occ.min() <= 1

    def test_monotone(self, rng):
        table = BreakpointTable(np.sort(rng.normal(size=(3, 5)), axis=1))
        v = np.sort(rng.normal(size=(50, 3)) * 2, axis=0)
        sym = table.discretise(v)
        assert np.all(np.diff(sym, axis=0) >= 0)

    def test_empty(self):
        with pytest.raises(ValueError):
            mcb_fit(np.empty((0, 10)), 4, 2, 4, True)

    def test_window_too_long(self):
        with pytest.raises(ValueError, match="window exceeds series length"):
            mcb_fit(np.ones((2, 5)), 6, 2, 4, True)


class TestTable:
    def test_text_round_trip(self, rng):
        table = BreakpointTable(np.sort(rng.normal(size=(4, 3)), axis=1))
        again = BreakpointTable.from_text(table.to_text())
        assert again == table
        assert np.array_equal(again.rows, table.rows)

    def test_unsorted_rejected(self):
        with pytest.raises(ValueError):
            BreakpointTable(np.array([[1.0, 0.0]]))

    def test_head(self):
        t = BreakpointTable.gaussian(6, 4)
        assert t.head(2).word_length == 2
        assert t.alpha == 4


class TestWordKeys:
    @settings(max_examples=200, deadline=None)
    @given(st.integers(2, 16).flatmap(lambda a: st.tuples(st.just(a), st.lists(st.integers(0, a - 1), min_size=1, max_size=16))))
    def test_round_trip(self, case):
        alpha, symbols = case
        if alpha ** len(symbols) > 2**64:
            with pytest.raises(ValueError):
                encode_word(symbols, alpha)
            return
        k = encode_word(symbols, alpha)
        assert k == oracle.key(symbols, alpha)
        assert decode_word(k, len(symbols), alpha) == symbols

    def test_vectorised(self, rng):
        S = rng.integers(0, 4, size=(6, 16))
        keys = word_keys(S, 4)
        assert keys.dtype == np.uint64
        assert [int(k) for k in keys] == [encode_word(s, 4) for s in S]
        pref = prefix_word_keys(S, 4)
        for l in range(1, 17):
            assert np.array_equal(pref[:, l - 1], word_keys(S[:, :l], 4))

    def test_full_64_bit(self):
        symbols = [15] * 16
        assert encode_word(symbols, 16) == 2**64 - 1
        assert int(word_keys(np.array([symbols]), 16)[0]) == 2**64 - 1


def test_sliding_windows():
    X = np.arange(10.0).reshape(2, 5)
    W = sliding_windows(X, 3)
    assert W.shape == (2, 3, 3)
    assert W[1, 2].tolist() == [7, 8, 9]
    with pytest.raises(ValueError, match="window exceeds series length"):
        sliding_windows(X, 6)


def test_breakpoints_agree_with_scipy():
    np.testing.assert_allclose(gaussian_breakpoints(7), norm.ppf(np.arange(1, 7) / 7), atol=1e-12)
