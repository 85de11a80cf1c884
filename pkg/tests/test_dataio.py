"""Dataset I/O tests: bit-exact round trips, fold discipline, rebalancing."""

import io
import json

import numpy as np
import pytest

from courtlift import (
    CameraCalibration,
    Dataset,
    ImagePoint,
    WorldPoint,
    assign_folds,
    generate_dataset,
    read_dataset,
    rebalance,
    split,
    write_dataset,
)
from courtlift.dataio import dataset_to_string
from courtlift.errors import (
    FoldViolation,
    MalformedRecord,
    OneSidedDataset,
    SchemaVersionMismatch,
    UnknownFold,
)
from courtlift.synth import BallSample


def _dummy_cal() -> CameraCalibration:
    return CameraCalibration(
        fx=1000.0,
        fy=1000.0,
        cx=960.0,
        cy=540.0,
        rotation=np.eye(3),
        translation=np.zeros(3),
        image_width=1920.0,
        image_height=1080.0,
    )


def _sample(sample_id: int, arena_id: int = 0, z: float = 1.0) -> BallSample:
    return BallSample(
        sample_id=sample_id,
        arena_id=arena_id,
        cal=_dummy_cal(),
        ball_3d=WorldPoint(0.1 * sample_id, -0.2, z),
        ball_px=ImagePoint(100.0 + sample_id, 200.0),
        foot_px=ImagePoint(100.0 + sample_id, 260.0),
        h_true=60.0,
        diameter_px_true=48.0,
    )


class TestRoundTrip:
    def test_empty_dataset(self):
        ds = Dataset(samples=[], folds={})
        text = dataset_to_string(ds)
        rec = read_dataset(io.StringIO(text))
        assert rec.samples == [] and rec.folds == {}
        assert dataset_to_string(rec) == text

    def test_synthetic_dataset_is_bit_exact(self):
        samples = generate_dataset(seed=13, n=10_000, n_arenas=10)
        ds = Dataset(samples=samples, folds=assign_folds(range(10), 5))
        text = dataset_to_string(ds)
        rec = read_dataset(io.StringIO(text))
        assert dataset_to_string(rec) == text
        for a, b in zip(ds.samples, rec.samples):
            assert a.ball_3d == b.ball_3d  # float fields compare bit-exact
            assert a.ball_px == b.ball_px
            assert a.h_true == b.h_true and a.diameter_px_true == b.diameter_px_true
            np.testing.assert_array_equal(a.cal.rotation, b.cal.rotation)

    def test_file_round_trip(self, tmp_path):
        samples = generate_dataset(seed=14, n=20, n_arenas=2)
        ds = Dataset(samples=samples, folds={"A": {0}, "B": {1}})
        path = tmp_path / "ds.jsonl"
        write_dataset(ds, path)
        rec = read_dataset(path)
        assert len(rec.samples) == 20
        assert rec.folds == {"A": frozenset({0}), "B": frozenset({1})}


class TestReadValidation:
    def _text(self, ds: Dataset) -> list[str]:
        return dataset_to_string(ds).splitlines()

    def test_missing_key_is_malformed_with_index(self):
        ds = Dataset(samples=[_sample(0)], folds={"A": {0}})
        header, record = self._text(ds)
        broken = json.loads(record)
        del broken["cal"]
        text = header + "\n" + json.dumps(broken) + "\n"
        with pytest.raises(MalformedRecord, match="record 0"):
            read_dataset(io.StringIO(text))

    def test_wrong_schema_version(self):
        text = '{"schema_version": 99, "folds": {}}\n'
        with pytest.raises(SchemaVersionMismatch):
            read_dataset(io.StringIO(text))

    def test_empty_file(self):
        with pytest.raises(SchemaVersionMismatch):
            read_dataset(io.StringIO(""))

    def test_invalid_record_json(self):
        ds = Dataset(samples=[], folds={})
        text = dataset_to_string(ds) + "{not json}\n"
        with pytest.raises(MalformedRecord):
            read_dataset(io.StringIO(text))


class TestDatasetInvariants:
    def test_arena_in_two_folds(self):
        with pytest.raises(FoldViolation):
            Dataset(samples=[_sample(0)], folds={"A": {0}, "B": {0}})

    def test_sample_arena_not_in_any_fold(self):
        with pytest.raises(FoldViolation):
            Dataset(samples=[_sample(0, arena_id=7)], folds={"A": {0}})

    def test_duplicate_sample_ids(self):
        with pytest.raises(MalformedRecord):
            Dataset(samples=[_sample(3), _sample(3)], folds={"A": {0}})


class TestSplit:
    def test_single_fold_gives_empty_train(self):
        ds = Dataset(samples=[_sample(i) for i in range(4)], folds={"A": {0}})
        train, test = split(ds, "A")
        assert train.samples == []
        assert [s.sample_id for s in test.samples] == [0, 1, 2, 3]

    def test_fifteen_arena_split_is_disjoint(self):
        samples = generate_dataset(seed=15, n=150, n_arenas=15)
        ds = Dataset(samples=samples, folds=assign_folds(range(15), 5))
        for fold in ds.folds:
            train, test = split(ds, fold)
            assert train.arena_ids.isdisjoint(test.arena_ids)
            assert len(train.samples) + len(test.samples) == 150
            assert test.arena_ids <= ds.folds[fold]

    def test_unknown_fold(self):
        ds = Dataset(samples=[_sample(0)], folds={"A": {0}})
        with pytest.raises(UnknownFold):
            split(ds, "Z")


class TestRebalance:
    def test_balanced_input_is_unchanged_and_stable(self):
        samples = [_sample(0, z=0.5), _sample(1, z=3.0), _sample(2, z=1.0), _sample(3, z=2.5)]
        out = rebalance(samples, 2.0, seed=1)
        assert out == samples

    def test_oversamples_minority_to_equal_counts(self):
        samples = [_sample(i, z=0.5) for i in range(741)] + [
            _sample(741 + i, z=3.5) for i in range(60)
        ]
        out = rebalance(samples, 2.0, seed=3)
        above = sum(1 for s in out if s.ball_3d.z >= 2.0)
        below = sum(1 for s in out if s.ball_3d.z < 2.0)
        assert above == below == 741
        assert out[: len(samples)] == samples  # originals retained in order

    def test_threshold_is_inclusive_above(self):
        # A ball at exactly 2 m counts as "above".
        samples = [_sample(0, z=2.0), _sample(1, z=1.0)]
        out = rebalance(samples, 2.0, seed=0)
        assert len(out) == 2

    def test_deterministic_and_idempotent(self):
        samples = [_sample(i, z=0.5 if i % 5 else 4.0) for i in range(50)]
        once = rebalance(samples, 2.0, seed=9)
        again = rebalance(samples, 2.0, seed=9)
        assert [s.sample_id for s in once] == [s.sample_id for s in again]
        rebalanced_twice = rebalance(once, 2.0, seed=9)
        assert [s.sample_id for s in rebalanced_twice] == [s.sample_id for s in once]

    def test_one_sided_raises(self):
        with pytest.raises(OneSidedDataset):
            rebalance([_sample(0, z=0.5), _sample(1, z=1.0)], 2.0, seed=0)
