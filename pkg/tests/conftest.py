import numpy as np
import pytest

from courtlift import ArenaSpec, CameraCalibration, generate_dataset, make_camera
from courtlift.rng import PURPOSE_CAMERA, stream
from courtlift.synth import sample_camera


@pytest.fixture
def identity_cal() -> CameraCalibration:
    """Camera at the origin looking along world +Z (optical axis = Z)."""
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


@pytest.fixture
def cam_a() -> CameraCalibration:
    """Elevated arena camera: center (0, -20, 3), looking at the court origin."""
    return make_camera(
        center=(0.0, -20.0, 3.0),
        look_at=(0.0, 0.0, 0.0),
        focal=2000.0,
        image_width=4500.0,
        image_height=1500.0,
        cx=2250.0,
        cy=750.0,
    )


@pytest.fixture
def side_cal() -> CameraCalibration:
    """Side-on camera: horizontal optical axis along +Y, up +Z.

    World verticals map exactly to image columns, so the local vertical is
    (0, 1) everywhere below the horizon row.
    """
    return make_camera(
        center=(0.0, -20.0, 1.5),
        look_at=(0.0, 0.0, 1.5),
        focal=2000.0,
        image_width=4500.0,
        image_height=1500.0,
        cx=2250.0,
        cy=750.0,
    )


ZERO_DIST_ARENA = ArenaSpec(k1_range=(0.0, 0.0), k2_range=(0.0, 0.0))
STRONG_DIST_ARENA = ArenaSpec(k1_range=(-0.3, 0.3), k2_range=(-0.05, 0.05))


def random_cameras(n: int, seed: int = 0, arena: ArenaSpec = ZERO_DIST_ARENA):
    return [sample_camera(stream(seed, i, PURPOSE_CAMERA), arena) for i in range(n)]


@pytest.fixture(scope="session")
def clean_samples():
    """1000 zero-distortion samples shared across exactness tests."""
    return generate_dataset(seed=101, n=1000, arena=ZERO_DIST_ARENA, n_arenas=8)


@pytest.fixture(scope="session")
def distorted_samples():
    """1000 samples with strong distortion (|k1| up to 0.3)."""
    return generate_dataset(seed=102, n=1000, arena=STRONG_DIST_ARENA, n_arenas=8)
