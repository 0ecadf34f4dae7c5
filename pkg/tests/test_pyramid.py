import numpy as np
import pytest

from tsdict.bagging import Approx, BagConfig, Disc, bag_dataset, bag_series
from tsdict.classifiers import EnsembleMember, ParameterGrid, WordTransform, ensemble_predict
from tsdict.data import LabeledDataset
from tsdict.distances import boss_distance, histogram_intersection
from tsdict.pyramid import (
    MAX_ENSEMBLE,
    PyramidTransform,
    SpatialPyramidBOSS,
    build_pyramid,
    build_sp_ensemble,
    format_pyramids,
    parse_pyramids,
    pyramid_distance,
    segment_bounds,
)

CFG = BagConfig(w=8, l=4, alpha=4, p=True, approx=Approx.DFT, disc=Disc.MCB)


def fitted(rng, n=6, m=64):
    X = rng.normal(size=(n, m)).cumsum(axis=1)
    bags, model = bag_dataset(LabeledDataset(X, np.arange(n) % 2), CFG)
    return X, bags, model


class TestSegments:
    def test_even(self):
        assert segment_bounds(8, 4).tolist() == [0, 2, 4, 6, 8]

    def test_remainder_to_leading(self):
        assert segment_bounds(10, 4).tolist() == [0, 3, 6, 8, 10]


class TestBuild:
    def test_one_level_is_plain_bag(self, rng):
        X, bags, model = fitted(rng)
        pyr = build_pyramid(X[0], CFG, model, 1)
        assert len(pyr.segments) == 1
        level, idx, hist = pyr.segments[0]
        assert (level, idx, hist.weight) == (1, 0, 1.0)
        assert hist == bags[0][0]

    def test_three_levels(self, rng):
        X, _, model = fitted(rng)
        pyr = build_pyramid(X[0], CFG, model, 3)
        assert len(pyr.segments) == 7
        weights = {lev: h.weight for lev, _, h in pyr.segments}
        assert weights == {1: 0.25, 2: 0.5, 3: 1.0}

    def test_two_level_weights(self, rng):
        X, _, model = fitted(rng)
        pyr = build_pyramid(X[1], CFG, model, 2)
        assert [h.weight for _, _, h in pyr.segments] == [0.5, 1.0, 1.0]

    def test_levels_conserve_counts(self, rng):
        X, bags, model = fitted(rng)
        for x, (bag, _) in zip(X, bags):
            pyr = build_pyramid(x, CFG, model, 3)
            for level in (1, 2, 3):
                assert pyr.level_sum(level) == dict(bag)

    def test_storage_bound(self, rng):
        X, bags, model = fitted(rng)
        for x, (bag, _) in zip(X, bags):
            entries = sum(len(h) for _, _, h in build_pyramid(x, CFG, model, 3).segments)
            assert entries <= 7 * len(bag)

    def test_segment_shorter_than_window(self, rng):
        X, _, model = fitted(rng, m=30)
        with pytest.raises(ValueError):
            build_pyramid(X[0], CFG, model, 3)


class TestDistance:
    def test_self(self, rng):
        X, _, model = fitted(rng)
        pyr = build_pyramid(X[0], CFG, model, 2)
        assert pyramid_distance(pyr, pyr, "boss") == 0
        mass = sum(pyr.to_vector().values())
        assert pyramid_distance(pyr, pyr, "hi") == pytest.approx(mass)

    def test_one_level_equals_flat(self, rng):
        X, bags, model = fitted(rng)
        a, b = build_pyramid(X[0], CFG, model, 1), build_pyramid(X[1], CFG, model, 1)
        assert pyramid_distance(a, b, "boss") == boss_distance(bags[0][0], bags[1][0])
        assert pyramid_distance(a, b, "hi") == histogram_intersection(bags[0][0], bags[1][0])

    def test_weights_multiply_counts(self, rng):
        X, _, model = fitted(rng)
        a, b = build_pyramid(X[0], CFG, model, 2), build_pyramid(X[3], CFG, model, 2)
        va, vb = a.to_vector(), b.to_vector()
        expected = sum((v - vb.get(k, 0)) ** 2 for k, v in va.items())
        assert pyramid_distance(a, b, "boss") == pytest.approx(expected)

    def test_mismatched_depth(self, rng):
        X, _, model = fitted(rng)
        with pytest.raises(ValueError):
            pyramid_distance(build_pyramid(X[0], CFG, model, 1), build_pyramid(X[0], CFG, model, 2), "hi")


class TestRows:
    def test_rows_match_objects(self, rng):
        X, _, model = fitted(rng)
        tr = PyramidTransform(WordTransform(CFG, model), 3, X.shape[1], normalize=False)
        rows = tr.transform(X)
        for i, x in enumerate(X):
            vec = build_pyramid(x, CFG, model, 3).to_vector()
            sel = rows.rows == i
            assert np.isclose(rows.values[sel].sum(), sum(vec.values()))
            assert sel.sum() == len(vec)

    def test_l1_for_hi(self, rng):
        X, _, model = fitted(rng)
        tr = PyramidTransform(WordTransform(CFG, model), 2, X.shape[1], normalize=True)
        rows = tr.transform(X)
        np.testing.assert_allclose(np.bincount(rows.rows, weights=rows.values), 1.0)


def test_one_level_predictions_equal_plain_boss():
    for seed in range(20):
        g = np.random.default_rng(seed)
        X = g.normal(size=(8, 40)).cumsum(axis=1)
        y = np.arange(8) % 2
        Z = g.normal(size=(5, 40)).cumsum(axis=1)
        bags, model = bag_dataset(LabeledDataset(X, y), CFG)
        word = WordTransform(CFG, model)
        plain = EnsembleMember(word, word.transform(X), y, "boss", 1.0)
        for measure in ("boss", "hi"):
            pyr = PyramidTransform(word, 1, 40, normalize=False)
            member = EnsembleMember(pyr, pyr.transform(X), y, measure, 1.0)
            flat = EnsembleMember(word, word.transform(X), y, measure, 1.0)
            assert np.array_equal(member.predict(Z), flat.predict(Z))
        assert np.array_equal(ensemble_predict(Z, [plain]), plain.predict(Z))


class TestEnsemble:
    def test_single_window(self, italy):
        train, _ = italy
        members = build_sp_ensemble(train, ParameterGrid(windows=(8,)), "hi")
        assert len(members) == 1

    def test_cap(self, italy):
        train, _ = italy
        members = build_sp_ensemble(train, ParameterGrid(windows=tuple(range(4, 25))), "boss", max_ensemble=3)
        assert len(members) <= 3
        assert MAX_ENSEMBLE == 100

    def test_no_upgrade_on_ties(self):
        # every series identical within class: every L scores 1.0, so L stays 1
        X = np.tile(np.sin(np.arange(48) / 3.0), (4, 1))
        X[2:] = np.cos(np.arange(48) / 5.0)
        members = build_sp_ensemble(LabeledDataset(X, [0, 0, 1, 1]), ParameterGrid(windows=(8,)), "hi")
        assert members[0].params["L"] == 1

    def test_estimator(self, italy):
        train, test = italy
        model = SpatialPyramidBOSS("hi", ParameterGrid(windows=(6, 8, 10, 12))).fit(train)
        assert model.score(test.X, test.y) > 0.8

    def test_bad_measure(self, italy):
        with pytest.raises(ValueError):
            build_sp_ensemble(italy[0], ParameterGrid(windows=(8,)), "euclid")


def test_text_round_trip(rng):
    X, _, model = fitted(rng)
    pyrs = [(build_pyramid(x, CFG, model, 2), i % 2) for i, x in enumerate(X)]
    again = parse_pyramids(format_pyramids(pyrs), 2)
    for (a, la), (b, lb) in zip(pyrs, again):
        assert la == lb
        assert a.to_vector() == b.to_vector()
    assert format_pyramids(pyrs).split("\n")[0].split()[2].startswith("1.0:")


def test_bag_series_unchanged_by_pyramid(rng):
    X, bags, model = fitted(rng)
    assert bag_series(X[2], CFG, model) == bags[2][0]
