"""Reproduce the strategy-comparison curves (adaptive / constant / random)
on the default synthetic collection and write the result JSON.

    python scripts/run_strategy_comparison.py --out comparison.json \
        [--rounds 200] [--seeds 20]
"""

import argparse
import json
from pathlib import Path

import numpy as np

from concept_retrieval.active import QueryStrategy
from concept_retrieval.config import EXPERIMENT_ENGINE
from concept_retrieval.dataio import result_json
from concept_retrieval.experiment import build_modalities, run_experiment
from concept_retrieval.synth import SyntheticConfig, generate_synthetic


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", required=True)
    parser.add_argument("--rounds", type=int, default=200)
    parser.add_argument("--seeds", type=int, default=20)
    parser.add_argument("--data-seed", type=int, default=1)
    args = parser.parse_args()

    dataset = generate_synthetic(SyntheticConfig(seed=args.data_seed))
    concept = [c for c in dataset.concepts if len(c.positive_classes) > 1][0]
    print(f"concept {concept.name!r}: {int(dataset.concept_mask(concept).sum())} positives")
    modalities = build_modalities(dataset, EXPERIMENT_ENGINE)
    strategies = {}
    for kind in ("adaptive", "constant", "random"):
        res = run_experiment(
            dataset, modalities, concept, QueryStrategy(kind=kind),
            rounds=args.rounds, seeds=list(range(args.seeds)),
            cfg=EXPERIMENT_ENGINE, test_per_class=10,
        )
        strategies[kind] = {"f1": res.f1, "ap": res.ap,
                            "theta": res.theta, "wall_ms": res.wall_ms}
        print(f"{kind:9s} F1: round0={res.f1[0]:.3f} final={res.f1[-1]:.3f}")
    Path(args.out).write_text(result_json(args.rounds, strategies))
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
