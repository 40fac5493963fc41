"""Command-line entry points.

retrieve precompute   build and persist the per-collection bases
retrieve experiment   run simulated feedback sessions on synthetic data
retrieve cv-alpha     step-size cross-validation curves
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .active import QueryStrategy
from .config import EngineConfig
from .dataio import ExperimentSpec, read_features, result_json
from .eigenmap import save_basis
from .experiment import build_modalities, cross_validate_step_alpha, run_experiment
from .modalities import build_semantic, build_visual
from .synth import generate_synthetic
from .taxonomy import load_item_classes, load_taxonomy


def _cmd_precompute(args: argparse.Namespace) -> int:
    features = read_features(args.features)
    item_ids, item_classes = load_item_classes(Path(args.classes).read_text())
    taxonomy = load_taxonomy(Path(args.taxonomy).read_text())
    if len(item_ids) != features.shape[0]:
        raise SystemExit(
            f"classes file lists {len(item_ids)} items, features hold {features.shape[0]}"
        )
    cfg = EngineConfig(
        bins=args.bins, k_visual=args.k_visual, k_semantic=args.k_semantic
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    visual = build_visual(features, cfg)
    semantic = build_semantic(taxonomy, item_classes, cfg)
    save_basis(out / "visual.eigb", visual.basis)
    np.savez(
        out / "pca.npz",
        mean=visual.pca.mean,
        components=visual.pca.components,
        explained_variances=visual.pca.explained_variances,
    )
    np.savez(
        out / "class_basis.npz",
        class_ids=np.array(semantic.class_basis.class_ids),
        vectors=semantic.class_basis.vectors,
        eigenvalues=semantic.class_basis.eigenvalues,
    )
    (out / "meta.json").write_text(
        json.dumps(
            {
                "n": features.shape[0],
                "d": features.shape[1],
                "k_visual": visual.modality.k,
                "k_semantic": semantic.modality.k,
                "bins": cfg.bins,
            },
            indent=2,
        )
    )
    print(f"wrote bases for {features.shape[0]} items to {out}")
    return 0


def _strategies(names: str) -> list[QueryStrategy]:
    return [QueryStrategy(kind=name.strip()) for name in names.split(",") if name.strip()]


def _cmd_experiment(args: argparse.Namespace) -> int:
    spec = ExperimentSpec.from_file(args.config)
    dataset = generate_synthetic(spec.synthetic)
    if len(dataset.concepts) < spec.eval_concepts:
        raise SystemExit(
            f"dataset yields {len(dataset.concepts)} concepts, need {spec.eval_concepts}"
        )
    concepts = dataset.concepts[: spec.eval_concepts]
    modalities = build_modalities(dataset, spec.engine)
    seeds = list(range(args.seeds))
    strategies: dict[str, dict[str, list[float]]] = {}
    for strategy in _strategies(args.strategy):
        per_concept = [
            run_experiment(
                dataset, modalities, concept, strategy, args.rounds, seeds,
                spec.engine, spec.test_per_class,
            )
            for concept in concepts
        ]
        strategies[strategy.kind] = {
            "f1": np.mean([r.f1 for r in per_concept], axis=0).tolist(),
            "ap": np.mean([r.ap for r in per_concept], axis=0).tolist(),
            "theta": np.mean([r.theta for r in per_concept], axis=0).tolist(),
            "wall_ms": np.mean([r.wall_ms for r in per_concept], axis=0).tolist(),
        }
    payload = result_json(args.rounds, strategies, include_timing=not args.no_timing)
    Path(args.out).write_text(payload)
    print(f"wrote {args.out}")
    return 0


def _cmd_cv_alpha(args: argparse.Namespace) -> int:
    spec = ExperimentSpec.from_file(args.config)
    dataset = generate_synthetic(spec.synthetic)
    eval_classes: set[str] = set()
    for concept in dataset.concepts[: spec.eval_concepts]:
        eval_classes |= concept.positive_classes
    # cross-validation concepts must not share classes with evaluation ones
    candidates = [
        c for c in dataset.concepts[spec.eval_concepts :]
        if eval_classes.isdisjoint(c.positive_classes)
    ]
    concepts = candidates[: spec.cv_concepts]
    if len(concepts) < spec.cv_concepts:
        raise SystemExit(
            f"dataset yields {len(candidates)} concepts disjoint from the "
            f"{spec.eval_concepts} evaluation concepts; need {spec.cv_concepts}"
        )
    modalities = build_modalities(dataset, spec.engine)
    alphas = [float(a) for a in args.alphas.split(",")]
    seeds = list(range(args.seeds))
    curves = cross_validate_step_alpha(
        dataset, modalities, concepts, alphas, args.rounds, seeds,
        spec.engine, spec.test_per_class,
    )
    doc = {
        "rounds": args.rounds,
        "alphas": {f"{alpha:g}": curve for alpha, curve in sorted(curves.items())},
    }
    Path(args.out).write_text(json.dumps(doc, sort_keys=True, indent=2))
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="retrieve")
    sub = parser.add_subparsers(dest="command", required=True)

    pre = sub.add_parser("precompute", help="build and persist collection bases")
    pre.add_argument("--features", required=True)
    pre.add_argument("--classes", required=True)
    pre.add_argument("--taxonomy", required=True)
    pre.add_argument("--bins", type=int, default=500)
    pre.add_argument("--k-visual", type=int, default=256)
    pre.add_argument("--k-semantic", type=int, default=10)
    pre.add_argument("--out", required=True)
    pre.set_defaults(func=_cmd_precompute)

    exp = sub.add_parser("experiment", help="run simulated feedback sessions")
    exp.add_argument("--config", required=True)
    exp.add_argument("--strategy", default="adaptive",
                     help="comma-separated subset of adaptive,constant,random")
    exp.add_argument("--rounds", type=int, default=200)
    exp.add_argument("--seeds", type=int, default=20)
    exp.add_argument("--no-timing", action="store_true",
                     help="omit wall_ms so identically seeded runs are byte-identical")
    exp.add_argument("--out", required=True)
    exp.set_defaults(func=_cmd_experiment)

    cv = sub.add_parser("cv-alpha", help="step-size cross-validation")
    cv.add_argument("--config", required=True)
    cv.add_argument("--alphas", default="0.5,1,2,4,8")
    cv.add_argument("--rounds", type=int, default=20)
    cv.add_argument("--seeds", type=int, default=3)
    cv.add_argument("--out", required=True)
    cv.set_defaults(func=_cmd_cv_alpha)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
