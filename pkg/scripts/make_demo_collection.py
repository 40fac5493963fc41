"""Generate a small on-disk collection (features/classes/taxonomy/config)
ready for `retrieve precompute` or the HTTP service.

    python scripts/make_demo_collection.py --out demo/ [--n 800] [--classes 16]
"""

import argparse
import json
from pathlib import Path

from concept_retrieval.dataio import write_features
from concept_retrieval.synth import SyntheticConfig, generate_synthetic


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", required=True)
    parser.add_argument("--n", type=int, default=800)
    parser.add_argument("--classes", type=int, default=16)
    parser.add_argument("--depth", type=int, default=2)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    dataset = generate_synthetic(SyntheticConfig(
        n=args.n, d=12, num_classes=args.classes, positive_prior=0.5,
        cluster_spread=1.0, taxonomy_depth=args.depth, seed=args.seed,
    ))
    write_features(out / "features.fmat", dataset.features)

    rows = ["item_id,class_id"]
    rows += [f"item{i:05d},{cls}" for i, cls in enumerate(dataset.item_classes)]
    (out / "classes.csv").write_text("\n".join(rows) + "\n")

    tx = dataset.taxonomy
    parent_of = {}
    for node in tx.node_ids:
        for child in tx.children(node):
            parent_of[child] = node
    nodes = []
    for node in tx.node_ids:
        leaf = not tx.children(node)
        count = sum(1 for c in dataset.item_classes if c == node) if leaf else 0
        nodes.append({"id": node, "parent": parent_of.get(node), "count": count})
    (out / "taxonomy.json").write_text(json.dumps({"nodes": nodes}, indent=2))

    (out / "config.json").write_text(json.dumps({
        "k_visual": 24,
        "k_semantic": 4,
        "bins": 32,
        "lambda_reg": 5.0,
        "semantic_sigma": 0.38,
    }, indent=2))

    concepts = [
        {"name": c.name, "classes": sorted(c.positive_classes)} for c in dataset.concepts
    ]
    (out / "concepts.json").write_text(json.dumps(concepts, indent=2))
    print(f"wrote demo collection ({args.n} items, {args.classes} classes) to {out}")


if __name__ == "__main__":
    main()
