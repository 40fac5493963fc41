"""Experiment harness: simulated feedback sessions over synthetic data.

A run fixes a dataset and a concept, splits out a test set, seeds the
session with labeled examples, then performs feedback rounds where a
ground-truth oracle answers each query. F1 on the test set is evaluated
at the strategy's decision threshold (the evolving theta for adaptive,
the configured constant otherwise); average precision is threshold-free.
Everything is averaged across replicate seeds.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .active import QueryStrategy, RetrievalState, run_round, start_session
from .config import EngineConfig
from .metrics import average_precision, f1_score
from .modalities import Modality, build_semantic, build_visual
from .solver import FusionWeights
from .synth import Concept, Dataset, initial_labels, split


@dataclass(frozen=True)
class ExperimentResult:
    """Per-round curves; index 0 is the state before any feedback round."""

    f1: list[float]
    ap: list[float]
    theta: list[float]
    wall_ms: list[float]
    queried: list[list[int]] = field(default_factory=list)

    @property
    def rounds(self) -> int:
        return len(self.f1) - 1


def build_modalities(dataset: Dataset, cfg: EngineConfig) -> tuple[Modality, ...]:
    """Offline bases for both modalities; depends on the dataset only."""
    visual = build_visual(dataset.features, cfg)
    semantic = build_semantic(dataset.taxonomy, dataset.item_classes, cfg)
    return (visual.modality, semantic.modality)


def _eval_threshold(state: RetrievalState, strategy: QueryStrategy) -> float:
    if strategy.kind == "adaptive":
        return state.threshold.theta
    if strategy.kind == "constant":
        return strategy.constant_theta
    return 0.0


def run_single(
    dataset: Dataset,
    modalities: tuple[Modality, ...],
    concept: Concept,
    strategy: QueryStrategy,
    rounds: int,
    seed: int,
    cfg: EngineConfig,
    test_per_class: int = 20,
) -> ExperimentResult:
    """One replicate: split, seed labels, then `rounds` feedback rounds."""
    pool, test_idx = split(dataset, test_per_class, seed=_derive(seed, 0))
    state0 = initial_labels(
        dataset, concept, pool, seed=_derive(seed, 1), lambda_reg=cfg.lambda_reg
    )
    strategy = QueryStrategy(
        kind=strategy.kind,
        constant_theta=strategy.constant_theta,
        seed=_derive(seed, 2),
    )
    fusion = FusionWeights(dict(cfg.fusion))
    state = start_session(
        modalities, fusion, state0, strategy,
        step_alpha=cfg.step_alpha, candidates=pool,
    )
    mask = dataset.concept_mask(concept)
    actual_test = np.where(mask[test_idx], 1, -1)

    def oracle(i: int) -> int:
        return 1 if mask[i] else -1

    def evaluate(state: RetrievalState) -> tuple[float, float]:
        theta = _eval_threshold(state, strategy)
        scores = state.fused.values[test_idx]
        predicted = np.where(scores > theta, 1, -1)
        return f1_score(predicted, actual_test), average_precision(scores, actual_test)

    f1_0, ap_0 = evaluate(state)
    result_f1, result_ap = [f1_0], [ap_0]
    thetas = [_eval_threshold(state, strategy)]
    wall = [0.0]
    queried: list[int] = []
    for _ in range(rounds):
        t0 = time.perf_counter()
        idx, state = run_round(state, strategy, oracle)
        wall.append((time.perf_counter() - t0) * 1000.0)
        queried.append(idx)
        f1_r, ap_r = evaluate(state)
        result_f1.append(f1_r)
        result_ap.append(ap_r)
        thetas.append(_eval_threshold(state, strategy))
    return ExperimentResult(
        f1=result_f1, ap=result_ap, theta=thetas, wall_ms=wall, queried=[queried]
    )


def _derive(seed: int, stream: int) -> int:
    """Independent deterministic substream seeds."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(stream,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def run_experiment(
    dataset: Dataset,
    modalities: tuple[Modality, ...],
    concept: Concept,
    strategy: QueryStrategy,
    rounds: int,
    seeds: list[int],
    cfg: EngineConfig,
    test_per_class: int = 20,
) -> ExperimentResult:
    """Average the per-round curves across replicate seeds."""
    singles = [
        run_single(dataset, modalities, concept, strategy, rounds, s, cfg, test_per_class)
        for s in seeds
    ]
    mean = lambda attr: np.mean([getattr(r, attr) for r in singles], axis=0).tolist()
    return ExperimentResult(
        f1=mean("f1"),
        ap=mean("ap"),
        theta=mean("theta"),
        wall_ms=mean("wall_ms"),
        queried=[r.queried[0] for r in singles],
    )


def cross_validate_step_alpha(
    dataset: Dataset,
    modalities: tuple[Modality, ...],
    concepts: list[Concept],
    alphas: list[float],
    rounds: int,
    seeds: list[int],
    cfg: EngineConfig,
    test_per_class: int = 20,
) -> dict[float, list[float]]:
    """Averaged adaptive-strategy F1 curve per step size; the concepts here
    should be disjoint from the ones used for evaluation."""
    curves: dict[float, list[float]] = {}
    for alpha in alphas:
        alpha_cfg = EngineConfig.from_dict({**cfg.to_dict(), "step_alpha": alpha})
        per_concept = [
            run_experiment(
                dataset, modalities, concept, QueryStrategy(kind="adaptive"),
                rounds, seeds, alpha_cfg, test_per_class,
            ).f1
            for concept in concepts
        ]
        curves[alpha] = np.mean(per_concept, axis=0).tolist()
    return curves
