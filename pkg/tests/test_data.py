import json

import numpy as np
import pytest

from tsdict.data import (
    SHAPELET_LENGTH,
    LabeledDataset,
    _head_shoulders_shape,
    _sine_shape,
    ParseError,
    generate_dictionary_data,
    read_ucr,
    read_ucr_split,
    stratified_resample,
    write_generated,
    write_ucr,
)

SHAPES = {"sine": _sine_shape(SHAPELET_LENGTH), "head_shoulders": _head_shoulders_shape(SHAPELET_LENGTH)}


class TestReadUCR:
    def test_comma(self, tmp_path):
        f = tmp_path / "a.csv"
        f.write_text("1,0.5,0.6\n2,0.1,0.2\n")
        data = read_ucr(f)
        assert data.X.shape == (2, 2)
        assert data.y.tolist() == [0, 1]
        assert data.classes == ("1", "2")

    def test_tab_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.tsv"
        a.write_text("1,0.5,0.6\n2,0.1,0.2\n")
        b.write_text("1\t0.5\t0.6\n2\t0.1\t0.2\n")
        da, db = read_ucr(a), read_ucr(b)
        assert np.array_equal(da.X, db.X) and np.array_equal(da.y, db.y)

    def test_space(self, tmp_path):
        f = tmp_path / "a.txt"
        f.write_text("  1.0000000e+00   5.0e-01  6.0e-01\n  2.0e+00  1.0  2.0\n")
        data = read_ucr(f)
        assert data.classes == ("1", "2")
        assert data.X[0].tolist() == [0.5, 0.6]

    def test_ragged(self, tmp_path):
        f = tmp_path / "a.csv"
        f.write_text("1,0.5,0.6\n2,0.1\n")
        with pytest.raises(ParseError, match=":2:"):
            read_ucr(f)

    def test_non_numeric(self, tmp_path):
        f = tmp_path / "a.csv"
        f.write_text("1,0.5,abc\n")
        with pytest.raises(ParseError, match=":1:"):
            read_ucr(f)

    def test_nan(self, tmp_path):
        f = tmp_path / "a.csv"
        f.write_text("1,0.5,NaN\n")
        with pytest.raises(ParseError):
            read_ucr(f)

    def test_empty(self, tmp_path):
        f = tmp_path / "a.csv"
        f.write_text("\n")
        with pytest.raises(ParseError):
            read_ucr(f)

    def test_numeric_label_order(self, tmp_path):
        f = tmp_path / "a.csv"
        f.write_text("10,1,2\n2,3,4\n-1,5,6\n")
        assert read_ucr(f).classes == ("-1", "2", "10")

    def test_round_trip(self, tmp_path, rng):
        data = LabeledDataset(rng.normal(size=(4, 7)), [0, 1, 1, 0], classes=("a", "b"))
        write_ucr(data, tmp_path / "x.csv")
        again = read_ucr(tmp_path / "x.csv")
        assert np.array_equal(again.X, data.X)
        assert again.classes == data.classes

    def test_split_shares_labels(self, tmp_path):
        (tmp_path / "D_TRAIN.tsv").write_text("1\t1\t2\n1\t2\t3\n")
        (tmp_path / "D_TEST.tsv").write_text("2\t1\t2\n1\t0\t0\n")
        train, test = read_ucr_split(tmp_path / "D_TRAIN.tsv", tmp_path / "D_TEST.tsv")
        assert train.name == "D"
        assert test.y.tolist() == [1, 0]

    def test_vendored(self, italy):
        train, test = italy
        assert train.X.shape == (67, 24) and test.X.shape == (1029, 24)


class TestResample:
    def test_seed_zero(self, italy):
        train, test = italy
        a, b = stratified_resample(train, test, 0)
        assert a is train and b is test

    def test_stratified(self, italy):
        train, test = italy
        for seed in (1, 2, 3):
            a, b = stratified_resample(train, test, seed)
            assert np.array_equal(np.bincount(a.y), np.bincount(train.y))
            assert np.array_equal(np.bincount(b.y), np.bincount(test.y))
            pool = np.sort(np.vstack([train.X, test.X]), axis=0)
            assert np.array_equal(np.sort(np.vstack([a.X, b.X]), axis=0), pool)

    def test_deterministic(self, italy):
        a1, _ = stratified_resample(*italy, 4)
        a2, _ = stratified_resample(*italy, 4)
        assert np.array_equal(a1.X, a2.X)

    def test_differs_from_original(self, italy):
        a, _ = stratified_resample(*italy, 1)
        assert not np.array_equal(a.X, italy[0].X)

    def test_absent_class(self):
        train = LabeledDataset(np.ones((2, 3)), [0, 0], classes=("a", "b"))
        test = LabeledDataset(np.ones((1, 3)), [0], classes=("a", "b"))
        with pytest.raises(ValueError):
            stratified_resample(train, test, 3)


class TestGenerator:
    def test_noise_free_zero_count(self):
        data = generate_dictionary_data(4, 200, counts=(3, 0), noise_std=0.0, seed=1)
        assert np.all(data.X[data.y == 1] == 0)

    def test_exact_counts(self):
        data = generate_dictionary_data(6, 300, counts=(5, 1), noise_std=0.0, seed=2)
        for x, lab, places in zip(data.X, data.y, data.meta["placements"]):
            assert len(places) == (5, 1)[lab]
            rebuilt = np.zeros(300)
            for start, kind in places:
                rebuilt[start : start + SHAPELET_LENGTH] += 2.0 * SHAPES[kind]
            np.testing.assert_allclose(x, rebuilt, atol=1e-12)
            nz = np.flatnonzero(np.abs(x) > 1e-12)
            assert 1 + np.sum(np.diff(nz) > 1) == (5, 1)[lab]

    def test_tight_packing(self):
        data = generate_dictionary_data(2, 4 * SHAPELET_LENGTH, counts=(4, 1), noise_std=0.0, seed=0)
        assert [s for s, _ in data.meta["placements"][0]] == [0, 29, 58, 87]

    def test_no_overlap(self):
        data = generate_dictionary_data(20, 180, counts=(6, 2), seed=3)
        for places in data.meta["placements"]:
            starts = sorted(s for s, _ in places)
            assert all(b - a >= 29 for a, b in zip(starts, starts[1:]))
            assert starts[-1] + 29 <= 180

    def test_reproducible(self):
        a = generate_dictionary_data(3, 300, seed=5)
        b = generate_dictionary_data(3, 300, seed=5)
        assert np.array_equal(a.X, b.X)

    def test_infeasible(self):
        with pytest.raises(ValueError):
            generate_dictionary_data(2, 100, counts=(5, 1))
        with pytest.raises(ValueError):
            generate_dictionary_data(2, 100, counts=(1, 1))

    def test_sidecar(self, tmp_path):
        data = generate_dictionary_data(2, 100, counts=(2, 1), seed=7)
        write_generated(data, tmp_path / "g.csv")
        meta = json.loads((tmp_path / "g.csv.json").read_text())
        assert meta["seed"] == 7 and meta["counts"] == [2, 1]
        assert np.allclose(read_ucr(tmp_path / "g.csv").X, data.X)
