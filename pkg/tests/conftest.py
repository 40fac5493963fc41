import io
import json

import numpy as np
import pytest

from concept_retrieval.dataio import write_features
from concept_retrieval.synth import SyntheticConfig, generate_synthetic


def fixture_dataset(n=120, num_classes=4, seed=11):
    """Tiny dataset for service/CLI fixtures: 4 leaf classes at depth 2."""
    return generate_synthetic(SyntheticConfig(
        n=n, d=6, num_classes=num_classes, positive_prior=0.5,
        cluster_spread=0.8, taxonomy_depth=2, seed=seed,
    ))


def fixture_engine_json(**overrides):
    cfg = {
        "k_visual": 12,
        "k_semantic": 2,
        "bins": 16,
        "lambda_reg": 5.0,
        "semantic_sigma": 0.38,
    }
    cfg.update(overrides)
    return json.dumps(cfg).encode()


def fixture_files(dataset, thumbnail_template=None):
    """(features, classes, taxonomy, config) bytes for collection upload."""
    buf = io.BytesIO()
    write_features(buf, dataset.features)

    rows = ["item_id,class_id"]
    for i, cls in enumerate(dataset.item_classes):
        rows.append(f"item{i:05d},{cls}")
    classes = ("\n".join(rows) + "\n").encode()

    nodes = []
    tx = dataset.taxonomy
    for node_id in tx.node_ids:
        parent = None
        for candidate in tx.node_ids:
            if node_id in tx.children(candidate):
                parent = candidate
                break
        leaf = not tx.children(node_id)
        count = sum(1 for c in dataset.item_classes if c == node_id) if leaf else 0
        nodes.append({"id": node_id, "parent": parent, "count": count})
    taxonomy = json.dumps({"nodes": nodes}).encode()

    overrides = {}
    if thumbnail_template:
        overrides["thumbnail_template"] = thumbnail_template
    config = fixture_engine_json(**overrides)
    return buf.getvalue(), classes, taxonomy, config


@pytest.fixture
def tiny_dataset():
    return fixture_dataset()


@pytest.fixture
def collection_files(tiny_dataset):
    return fixture_files(tiny_dataset)
