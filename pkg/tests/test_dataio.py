import json
import struct

import numpy as np
import pytest

from concept_retrieval.dataio import (
    ExperimentSpec,
    features_bytes,
    parse_features,
    read_features,
    write_features,
)
from concept_retrieval.errors import DimensionError


class TestFeatureFile:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(13, 5)).astype(np.float32)
        path = tmp_path / "x.fmat"
        write_features(path, x)
        back = read_features(path)
        np.testing.assert_allclose(back, x, rtol=1e-6)

    def test_header_layout(self):
        x = np.arange(6, dtype=np.float64).reshape(2, 3)
        blob = features_bytes(x)
        assert blob[:8] == b"FMAT0001"
        n, d = struct.unpack_from("<QQ", blob, 8)
        assert (n, d) == (2, 3)
        values = np.frombuffer(blob, dtype="<f4", offset=24)
        np.testing.assert_array_equal(values, np.arange(6, dtype=np.float32))

    def test_bad_magic(self):
        with pytest.raises(DimensionError):
            parse_features(b"NOTMAGIC" + b"\x00" * 32)

    def test_truncated_payload(self):
        x = np.ones((4, 4))
        blob = features_bytes(x)[:-8]
        with pytest.raises(DimensionError):
            parse_features(blob)


class TestExperimentSpec:
    def test_parse_with_defaults(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({
            "synthetic": {"n": 500, "d": 4, "num_classes": 4, "positive_prior": 0.3,
                          "taxonomy_depth": 2, "seed": 5},
            "engine": {"k_visual": 8, "bins": 16, "lambda_reg": 2.0},
            "eval_concepts": 1,
        }))
        spec = ExperimentSpec.from_file(path)
        assert spec.synthetic.n == 500
        assert spec.synthetic.seed == 5
        assert spec.engine.k_visual == 8
        assert spec.engine.k_semantic == 10  # untouched default
        assert spec.eval_concepts == 1
        assert spec.test_per_class == 20
