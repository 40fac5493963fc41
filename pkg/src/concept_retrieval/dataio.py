"""On-disk formats: feature matrices, result JSON, experiment configs.

Feature matrix container: 8-byte magic "FMAT0001", then little-endian
u64 n and u64 d, then n*d float32 values row-major.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import EngineConfig
from .errors import DimensionError
from .synth import SyntheticConfig

_FMAT_MAGIC = b"FMAT0001"


def features_bytes(features: np.ndarray) -> bytes:
    features = np.asarray(features)
    if features.ndim != 2:
        raise DimensionError(f"feature matrix must be 2-D, got {features.shape}")
    n, d = features.shape
    return b"".join([
        _FMAT_MAGIC,
        struct.pack("<QQ", n, d),
        np.ascontiguousarray(features, dtype="<f4").tobytes(),
    ])


def write_features(path, features: np.ndarray) -> None:
    blob = features_bytes(features)
    if hasattr(path, "write"):
        path.write(blob)
    else:
        Path(path).write_bytes(blob)


def read_features(path) -> np.ndarray:
    with open(path, "rb") as fh:
        blob = fh.read()
    return parse_features(blob, name=str(path))


def parse_features(blob: bytes, name: str = "features") -> np.ndarray:
    if blob[:8] != _FMAT_MAGIC:
        raise DimensionError(f"{name}: bad magic {blob[:8]!r}")
    n, d = struct.unpack_from("<QQ", blob, 8)
    expected = 24 + 4 * n * d
    if len(blob) != expected:
        raise DimensionError(f"{name}: expected {expected} bytes, got {len(blob)}")
    values = np.frombuffer(blob, dtype="<f4", count=n * d, offset=24)
    return values.reshape(n, d).astype(np.float64)


def result_json(
    rounds: int,
    strategies: dict[str, dict[str, list[float]]],
    include_timing: bool = True,
) -> str:
    """Canonical result document; timings can be excluded so that two
    identically seeded runs serialize byte-identically."""
    doc = {"rounds": rounds, "strategies": {}}
    for name in sorted(strategies):
        entry = dict(strategies[name])
        if not include_timing:
            entry.pop("wall_ms", None)
        doc["strategies"][name] = {k: entry[k] for k in sorted(entry)}
    return json.dumps(doc, sort_keys=True, indent=2)


@dataclass(frozen=True)
class ExperimentSpec:
    """Parsed experiment config file: dataset generator + engine constants
    + harness settings."""

    synthetic: SyntheticConfig
    engine: EngineConfig
    test_per_class: int = 20
    eval_concepts: int = 2
    cv_concepts: int = 2

    @classmethod
    def from_file(cls, path) -> "ExperimentSpec":
        raw = json.loads(Path(path).read_text())
        return cls(
            synthetic=SyntheticConfig(**raw.get("synthetic", {})),
            engine=EngineConfig.from_dict(raw.get("engine", {})),
            test_per_class=raw.get("test_per_class", 20),
            eval_concepts=raw.get("eval_concepts", 2),
            cv_concepts=raw.get("cv_concepts", 2),
        )
