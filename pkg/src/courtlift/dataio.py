"""Dataset serialization (JSON Lines), arena-fold splitting, rebalancing.

File format: a header line ``{"schema_version": 1, "folds": {...}}``
followed by one JSON object per sample. Floats are serialized with
round-trip-exact decimal formatting (Python's repr), so read(write(ds))
is bit-exact.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .camera import (
    ImagePoint,
    WorldPoint,
    calibration_from_json_dict,
    calibration_to_json_dict,
)
from .errors import (
    FoldViolation,
    MalformedRecord,
    OneSidedDataset,
    SchemaVersionMismatch,
    UnknownFold,
)
from .rng import PURPOSE_REBALANCE, stream
from .synth import BallSample

SCHEMA_VERSION = 1

_RECORD_KEYS = ("id", "arena", "cal", "ball_3d", "ball_px", "foot_px", "h_true", "diam_px")


@dataclass(frozen=True)
class Dataset:
    """Samples plus a partition of arena ids into named folds."""

    samples: list[BallSample]
    folds: dict[str, frozenset[int]]
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        object.__setattr__(
            self, "folds", {name: frozenset(ids) for name, ids in self.folds.items()}
        )
        self._check_invariants()

    def _check_invariants(self) -> None:
        seen_arenas: dict[int, str] = {}
        for name, ids in self.folds.items():
            for arena in ids:
                if arena in seen_arenas:
                    raise FoldViolation(
                        f"arena {arena} appears in folds {seen_arenas[arena]!r} and {name!r}"
                    )
                seen_arenas[arena] = name
        seen_ids = set()
        for i, s in enumerate(self.samples):
            if s.sample_id in seen_ids:
                raise MalformedRecord(i, f"duplicate sample id {s.sample_id}")
            seen_ids.add(s.sample_id)
            if s.arena_id not in seen_arenas:
                raise FoldViolation(f"sample {s.sample_id}: arena {s.arena_id} is in no fold")

    @property
    def arena_ids(self) -> set[int]:
        return {s.arena_id for s in self.samples}


def assign_folds(arena_ids: Sequence[int], n_folds: int) -> dict[str, set[int]]:
    """Round-robin arenas into n_folds named A, B, C, ..."""
    arenas = sorted(set(arena_ids))
    n_folds = max(1, min(n_folds, len(arenas)))
    names = [_fold_name(i) for i in range(n_folds)]
    folds: dict[str, set[int]] = {name: set() for name in names}
    for i, arena in enumerate(arenas):
        folds[names[i % n_folds]].add(arena)
    return folds


def _fold_name(i: int) -> str:
    letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    return letters[i] if i < len(letters) else f"F{i}"


def _sample_to_record(s: BallSample) -> dict:
    return {
        "id": s.sample_id,
        "arena": s.arena_id,
        "cal": calibration_to_json_dict(s.cal),
        "ball_3d": [s.ball_3d.x, s.ball_3d.y, s.ball_3d.z],
        "ball_px": [s.ball_px.x, s.ball_px.y],
        "foot_px": [s.foot_px.x, s.foot_px.y],
        "h_true": s.h_true,
        "diam_px": s.diameter_px_true,
    }


def _sample_from_record(obj: dict, index: int) -> BallSample:
    missing = [k for k in _RECORD_KEYS if k not in obj]
    if missing:
        raise MalformedRecord(index, f"missing keys {missing}")
    try:
        return BallSample(
            sample_id=int(obj["id"]),
            arena_id=int(obj["arena"]),
            cal=calibration_from_json_dict(obj["cal"]),
            ball_3d=WorldPoint(*[float(x) for x in obj["ball_3d"]]),
            ball_px=ImagePoint(*[float(x) for x in obj["ball_px"]]),
            foot_px=ImagePoint(*[float(x) for x in obj["foot_px"]]),
            h_true=float(obj["h_true"]),
            diameter_px_true=float(obj["diam_px"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedRecord(index, str(exc)) from exc


def write_dataset(ds: Dataset, sink) -> None:
    """Write a dataset as JSON Lines to a path or text file object."""
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8") as f:
            write_dataset(ds, f)
        return
    header = {
        "schema_version": ds.schema_version,
        "folds": {name: sorted(ids) for name, ids in sorted(ds.folds.items())},
    }
    sink.write(json.dumps(header, sort_keys=True) + "\n")
    for s in ds.samples:
        sink.write(json.dumps(_sample_to_record(s), sort_keys=True) + "\n")


def read_dataset(source) -> Dataset:
    """Read a dataset from a path or text file object, validating as it goes."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as f:
            return read_dataset(f)
    lines = [line for line in source.read().splitlines() if line.strip()]
    if not lines:
        raise SchemaVersionMismatch("empty dataset file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise SchemaVersionMismatch(f"unreadable header: {exc}") from exc
    version = header.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"expected schema_version {SCHEMA_VERSION}, got {version!r}"
        )
    folds = {
        str(name): frozenset(int(a) for a in ids)
        for name, ids in header.get("folds", {}).items()
    }
    samples = []
    for index, line in enumerate(lines[1:]):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedRecord(index, f"invalid JSON: {exc}") from exc
        samples.append(_sample_from_record(obj, index))
    return Dataset(samples=samples, folds=folds)


def dataset_to_string(ds: Dataset) -> str:
    buf = io.StringIO()
    write_dataset(ds, buf)
    return buf.getvalue()


def split(ds: Dataset, test_fold: str) -> tuple[Dataset, Dataset]:
    """Partition by arena membership of the named fold; arenas never leak."""
    if test_fold not in ds.folds:
        raise UnknownFold(f"fold {test_fold!r} not in {sorted(ds.folds)}")
    test_arenas = ds.folds[test_fold]
    train_samples = [s for s in ds.samples if s.arena_id not in test_arenas]
    test_samples = [s for s in ds.samples if s.arena_id in test_arenas]
    train_folds = {name: ids for name, ids in ds.folds.items() if name != test_fold}
    train = Dataset(samples=train_samples, folds=train_folds)
    test = Dataset(samples=test_samples, folds={test_fold: test_arenas})
    return train, test


def rebalance(
    samples: Sequence[BallSample], threshold_m: float, seed: int
) -> list[BallSample]:
    """Equalize counts above/below a height threshold by oversampling.

    The minority side is duplicated (sampling with replacement, seeded)
    until both sides match; all original samples are retained in order,
    duplicates are appended. "Above" means ball z >= threshold.
    Idempotent on balanced input and deterministic under a fixed seed.
    """
    above = [s for s in samples if s.ball_3d.z >= threshold_m]
    below = [s for s in samples if s.ball_3d.z < threshold_m]
    if not above or not below:
        raise OneSidedDataset(
            f"{len(above)} samples above and {len(below)} below {threshold_m} m"
        )
    need = len(above) - len(below)
    if need == 0:
        return list(samples)
    minority = below if need > 0 else above
    rng = stream(seed, 0, PURPOSE_REBALANCE)
    picks = rng.integers(0, len(minority), size=abs(need))
    return list(samples) + [minority[int(j)] for j in picks]
