"""The two-headed reward model: a scoring head over the feature vector and a
weight-allocation head over [features ; verification], both 3-layer MLPs with
GeLU activations and sigmoid outputs.

The scoring head estimates per-dimension semantic quality s in (0,1)^3; the
weight head estimates per-dimension reliability w in (0,1)^3 and is the only
place the trinary verification vector (encoded as raw signed reals) enters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import erf

from ..judge import ReliabilityWeights, SemanticScores
from ..ses import VerificationVector
from .features import FEATURE_VERSION, FeatureConfig

DEFAULT_HIDDEN = 64
MODEL_FORMAT = "qreward-vrm/1"

_SQRT2 = np.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


class ShapeMismatch(ValueError):
    pass


def gelu(x: np.ndarray) -> np.ndarray:
    return 0.5 * x * (1.0 + erf(x / _SQRT2))


def gelu_prime(x: np.ndarray) -> np.ndarray:
    phi = _INV_SQRT_2PI * np.exp(-0.5 * x * x)
    return 0.5 * (1.0 + erf(x / _SQRT2)) + x * phi


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


@dataclass
class Mlp:
    """Three affine layers; weights are (out, in), applied as x @ W.T + b."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @staticmethod
    def init(rng: np.random.Generator, dims: tuple[int, ...]) -> "Mlp":
        weights, biases = [], []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
            biases.append(rng.uniform(-bound, bound, size=fan_out))
        return Mlp(weights, biases)

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.weights[0].shape[1],) + tuple(w.shape[0] for w in self.weights)

    def parameter_count(self) -> int:
        return sum(w.size for w in self.weights) + sum(b.size for b in self.biases)

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Batch forward: GeLU between layers, sigmoid on the output."""
        return self.forward_trace(x)[-1][1]

    def forward_trace(
        self, x: np.ndarray
    ) -> list[tuple[np.ndarray, np.ndarray]]:
        """Per-layer (pre-activation, activation) pairs, input excluded."""
        trace = []
        a = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = a @ w.T + b
            a = sigmoid(z) if i == last else gelu(z)
            trace.append((z, a))
        return trace


@dataclass
class VrmModel:
    scoring: Mlp
    dwa: Mlp
    feature_config: FeatureConfig = field(default_factory=FeatureConfig)
    hidden: int = DEFAULT_HIDDEN
    seed: int = 0

    @staticmethod
    def init(
        seed: int = 0,
        feature_config: FeatureConfig | None = None,
        hidden: int = DEFAULT_HIDDEN,
    ) -> "VrmModel":
        feature_config = feature_config or FeatureConfig()
        rng = np.random.default_rng(seed)
        d = feature_config.dim
        scoring = Mlp.init(rng, (d, hidden, hidden, 3))
        dwa = Mlp.init(rng, (d + 3, hidden, hidden, 3))
        return VrmModel(scoring, dwa, feature_config, hidden, seed)

    @property
    def dim(self) -> int:
        return self.feature_config.dim

    def forward_batch(
        self, h: np.ndarray, v: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        """h: (B, d) features; v: (B, 3) signed indicators -> (s, w)."""
        if h.ndim != 2 or h.shape[1] != self.dim:
            raise ShapeMismatch(
                f"features must be (B, {self.dim}), got {h.shape}"
            )
        if v.shape != (h.shape[0], 3):
            raise ShapeMismatch(f"indicators must be (B, 3), got {v.shape}")
        s = self.scoring.forward(h)
        w = self.dwa.forward(np.concatenate([h, v], axis=1))
        return s, w

    def forward(
        self, h: np.ndarray, v: VerificationVector
    ) -> tuple[SemanticScores, ReliabilityWeights]:
        s, w = self.forward_batch(
            h.reshape(1, -1), np.asarray([v.as_tuple()], dtype=np.float64)
        )
        return (
            SemanticScores.clamped(*s[0]),
            ReliabilityWeights.clamped(*w[0]),
        )

    # -- persistence -------------------------------------------------------

    def to_json_dict(self) -> dict:
        def dump(mlp: Mlp) -> list[dict]:
            return [
                {"w": w.tolist(), "b": b.tolist()}
                for w, b in zip(mlp.weights, mlp.biases)
            ]

        return {
            "format": MODEL_FORMAT,
            "feature_config": self.feature_config.to_json_dict(),
            "hidden": self.hidden,
            "seed": self.seed,
            "scoring": dump(self.scoring),
            "dwa": dump(self.dwa),
        }

    @staticmethod
    def from_json_dict(obj: dict) -> "VrmModel":
        if obj.get("format") != MODEL_FORMAT:
            raise ValueError(f"unsupported model format {obj.get('format')!r}")
        feature_config = FeatureConfig.from_json_dict(obj["feature_config"])

        def load(layers: list[dict]) -> Mlp:
            return Mlp(
                weights=[np.asarray(l["w"], dtype=np.float64) for l in layers],
                biases=[np.asarray(l["b"], dtype=np.float64) for l in layers],
            )

        return VrmModel(
            scoring=load(obj["scoring"]),
            dwa=load(obj["dwa"]),
            feature_config=feature_config,
            hidden=int(obj["hidden"]),
            seed=int(obj["seed"]),
        )

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh)

    @staticmethod
    def load(path: str | Path) -> "VrmModel":
        with open(path, encoding="utf-8") as fh:
            return VrmModel.from_json_dict(json.load(fh))


def check_feature_compatibility(model: VrmModel) -> None:
    """Refuse models whose feature config mismatches this extractor build."""
    if model.feature_config.version != FEATURE_VERSION:
        raise ValueError(
            f"model feature config {model.feature_config.version!r} does not "
            f"match extractor version {FEATURE_VERSION!r}"
        )
