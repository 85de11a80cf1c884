"""Pluggable height/diameter predictors standing in for a trained model.

Three kinds: ``oracle`` returns the ground truth, ``gaussian`` adds
normal noise, ``heavy_tailed`` adds Student-t noise (outlier-prone
predictions, one tail knob ``nu``). Noise can be calibrated to a target
pixel MAE using the closed-form mean absolute value of each law:
E|z| = sigma * sqrt(2/pi) for the normal, and
E|t_nu| = 2 sqrt(nu) Gamma((nu+1)/2) / (sqrt(pi) (nu-1) Gamma(nu/2))
for Student-t with nu > 1.

Draws come from per-sample Philox streams keyed by (seed, sample_id), so
the prediction for a sample never depends on evaluation order, subset
choice, or thread count. Height noise is additive in pixels; diameter
noise is multiplicative (relative), since diameter errors scale with
apparent size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels as _k
from .errors import MissingGroundTruth
from .reconstruct import BALL_DIAMETER_M
from .rng import PURPOSE_DIAMETER_NOISE, PURPOSE_HEIGHT_NOISE, stream

KINDS = ("oracle", "gaussian", "heavy_tailed")


@dataclass(frozen=True)
class PredictorSpec:
    """Configuration of a synthetic predictor.

    ``sigma`` is the raw noise scale (px for heights, relative for
    diameters); when ``target_mae`` is set it overrides sigma and the
    scale is solved so the noise MAE equals the target.
    """

    kind: str
    sigma: float = 0.0
    nu: float = 3.0
    target_mae: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.sigma < 0.0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if not self.nu > 1.0:
            raise ValueError(f"nu must be > 1, got {self.nu}")
        if self.target_mae is not None and not self.target_mae > 0.0:
            raise ValueError(f"target_mae must be > 0, got {self.target_mae}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "sigma": self.sigma,
            "nu": self.nu,
            "target_mae": self.target_mae,
            "seed": self.seed,
        }

    @staticmethod
    def from_json_dict(obj: dict) -> "PredictorSpec":
        return PredictorSpec(
            kind=obj["kind"],
            sigma=float(obj.get("sigma", 0.0)),
            nu=float(obj.get("nu", 3.0)),
            target_mae=None if obj.get("target_mae") is None else float(obj["target_mae"]),
            seed=int(obj.get("seed", 0)),
        )


def mean_abs_student_t(nu: float) -> float:
    """E|T| for Student-t with nu degrees of freedom (nu > 1)."""
    log_ratio = math.lgamma(0.5 * (nu + 1.0)) - math.lgamma(0.5 * nu)
    return 2.0 * math.sqrt(nu) * math.exp(log_ratio) / (math.sqrt(math.pi) * (nu - 1.0))


MEAN_ABS_NORMAL = math.sqrt(2.0 / math.pi)


def noise_scale(spec: PredictorSpec) -> float:
    """Scale applied to the unit noise draw for this spec."""
    if spec.kind == "oracle":
        return 0.0
    if spec.target_mae is not None:
        unit_mae = MEAN_ABS_NORMAL if spec.kind == "gaussian" else mean_abs_student_t(spec.nu)
        return spec.target_mae / unit_mae
    return spec.sigma


def _noise_draw(spec: PredictorSpec, sample_id: int, purpose: int) -> float:
    rng = stream(spec.seed, sample_id, purpose)
    if spec.kind == "gaussian":
        return float(rng.standard_normal())
    return float(rng.standard_t(spec.nu))


def _require(sample, attr: str):
    value = getattr(sample, attr, None)
    if value is None:
        raise MissingGroundTruth(f"sample lacks {attr}")
    return value


def predict_height(spec: PredictorSpec, sample) -> float:
    """Predicted pixel height for one sample (px; may be negative)."""
    h_true = float(_require(sample, "h_true"))
    if spec.kind == "oracle":
        return h_true
    sample_id = int(_require(sample, "sample_id"))
    return h_true + noise_scale(spec) * _noise_draw(spec, sample_id, PURPOSE_HEIGHT_NOISE)


def predict_heights(spec: PredictorSpec, samples: Sequence) -> np.ndarray:
    """Vectorized predict_height over a sample sequence."""
    out = np.empty(len(samples), dtype=np.float64)
    for i, sample in enumerate(samples):
        out[i] = predict_height(spec, sample)
    return out


def predict_diameter(
    spec: PredictorSpec, sample, ball_diameter_m: float = BALL_DIAMETER_M
) -> float:
    """Predicted image diameter (px) with relative (multiplicative) noise."""
    cal = _require(sample, "cal")
    ball = _require(sample, "ball_3d")
    depth = float(_k.camera_depth(cal.as_array(), ball.x, ball.y, ball.z))
    if depth <= _k.EPS_DEPTH:
        raise MissingGroundTruth("sample ball is behind its camera")
    d_true = 0.5 * (cal.fx + cal.fy) * ball_diameter_m / depth
    if spec.kind == "oracle":
        return d_true
    sample_id = int(_require(sample, "sample_id"))
    rel = noise_scale(spec) * _noise_draw(spec, sample_id, PURPOSE_DIAMETER_NOISE)
    return d_true * (1.0 + rel)


def predict_diameters(
    spec: PredictorSpec, samples: Sequence, ball_diameter_m: float = BALL_DIAMETER_M
) -> np.ndarray:
    """Vectorized predict_diameter over a sample sequence."""
    out = np.empty(len(samples), dtype=np.float64)
    for i, sample in enumerate(samples):
        out[i] = predict_diameter(spec, sample, ball_diameter_m)
    return out
