"""Pool-based active learning around an adaptive decision threshold.

One feedback round queries the unlabeled item whose fused score sits
closest to the current threshold, obtains its label, nudges the threshold
by 1/(step_alpha * round) when the prediction was wrong (adaptive strategy
only), adds the label, and re-solves every modality.

Threshold semantics: a score strictly above theta predicts +1; exact
equality predicts -1, so ties are deterministic. The round counter in the
step denominator is the pre-increment value, and it advances on every
round whether or not the threshold moved.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import DimensionError, PoolExhaustedError
from .modalities import Modality
from .solver import FusionWeights, LabelFunction, LabelState, fuse, solve_reduced

DEFAULT_STEP_ALPHA = 2.0


@dataclass(frozen=True)
class ThresholdState:
    theta: float = 0.0
    round: int = 1
    step_alpha: float = DEFAULT_STEP_ALPHA

    def __post_init__(self):
        if self.round < 1:
            raise DimensionError("round counter starts at 1")
        if self.step_alpha <= 0:
            raise DimensionError("step_alpha must be positive")


@dataclass(frozen=True)
class QueryStrategy:
    kind: str = "adaptive"            # adaptive | constant | random
    constant_theta: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("adaptive", "constant", "random"):
            raise DimensionError(f"unknown strategy kind {self.kind!r}")


def nearest_to_threshold(
    f: LabelFunction, theta: float, excluded: set[int] | np.ndarray
) -> int:
    """Index of the non-excluded item whose score is closest to theta;
    ties go to the lowest index."""
    values = f.values
    dist = np.abs(values - theta)
    if isinstance(excluded, np.ndarray):
        mask = excluded
    else:
        mask = np.zeros(len(values), dtype=bool)
        if excluded:
            mask[np.fromiter(excluded, dtype=np.intp)] = True
    if mask.all():
        raise PoolExhaustedError("every item is excluded")
    dist = np.where(mask, np.inf, dist)
    return int(np.argmin(dist))


def predict_label(f: LabelFunction, theta: float, i: int) -> int:
    return 1 if f.values[i] > theta else -1


def threshold_update(s: ThresholdState, predicted: int, actual: int) -> ThresholdState:
    """Move theta toward the mistake by 1/(step_alpha * round); always
    advance the round counter."""
    theta = s.theta
    if predicted != actual:
        step = 1.0 / (s.step_alpha * s.round)
        theta = theta - step if predicted == -1 else theta + step
    return replace(s, theta=theta, round=s.round + 1)


@dataclass(frozen=True)
class RetrievalState:
    """One retrieval episode: modality bases, labels, threshold, fused scores.

    `candidates` restricts queries to a sub-pool (experiment harness keeps
    test items out); None means every unlabeled item is fair game. The
    random strategy's generator is carried along and advanced in place, so
    a fixed seed yields a fixed query sequence.
    """

    modalities: tuple[Modality, ...]
    fusion: FusionWeights
    label_state: LabelState
    threshold: ThresholdState
    fused: LabelFunction
    candidates: np.ndarray | None = None
    rng: np.random.Generator | None = None
    per_modality: tuple[LabelFunction, ...] = field(default=(), repr=False)

    @property
    def n(self) -> int:
        return len(self.fused)


def solve_all(
    modalities: tuple[Modality, ...], fusion: FusionWeights, state: LabelState
) -> tuple[tuple[LabelFunction, ...], LabelFunction]:
    per = tuple(
        solve_reduced(m.u, m.eigenvalues, state, modality_tag=m.tag) for m in modalities
    )
    return per, fuse(list(per), fusion)


def start_session(
    modalities: tuple[Modality, ...],
    fusion: FusionWeights,
    label_state: LabelState,
    strategy: QueryStrategy,
    step_alpha: float = DEFAULT_STEP_ALPHA,
    candidates: np.ndarray | None = None,
) -> RetrievalState:
    per, fused = solve_all(modalities, fusion, label_state)
    theta0 = strategy.constant_theta if strategy.kind == "constant" else 0.0
    rng = np.random.default_rng(strategy.seed) if strategy.kind == "random" else None
    return RetrievalState(
        modalities=modalities,
        fusion=fusion,
        label_state=label_state,
        threshold=ThresholdState(theta=theta0, round=1, step_alpha=step_alpha),
        fused=fused,
        candidates=candidates,
        rng=rng,
        per_modality=per,
    )


def _excluded_mask(state: RetrievalState) -> np.ndarray:
    mask = np.ones(state.n, dtype=bool)
    if state.candidates is None:
        mask[:] = False
    else:
        mask[state.candidates] = False
    labeled = state.label_state.indices
    if labeled.size:
        mask[labeled] = True
    return mask


def select_query(state: RetrievalState, strategy: QueryStrategy) -> int:
    """Pick the next item to label under the given strategy."""
    mask = _excluded_mask(state)
    if strategy.kind == "adaptive":
        return nearest_to_threshold(state.fused, state.threshold.theta, mask)
    if strategy.kind == "constant":
        return nearest_to_threshold(state.fused, strategy.constant_theta, mask)
    pool = np.flatnonzero(~mask)
    if pool.size == 0:
        raise PoolExhaustedError("every item is excluded")
    return int(state.rng.choice(pool))


def run_round(
    state: RetrievalState,
    strategy: QueryStrategy,
    oracle: Callable[[int], int],
) -> tuple[int, RetrievalState]:
    """One feedback round; returns the queried index and the next state."""
    queried = select_query(state, strategy)
    actual = int(oracle(queried))
    if actual not in (-1, 1):
        raise DimensionError(f"oracle returned {actual}, expected +/-1")
    threshold = state.threshold
    if strategy.kind == "adaptive":
        predicted = predict_label(state.fused, threshold.theta, queried)
        threshold = threshold_update(threshold, predicted, actual)
    else:
        threshold = replace(threshold, round=threshold.round + 1)
    label_state = state.label_state.with_label(queried, actual)
    per, fused = solve_all(state.modalities, state.fusion, label_state)
    return queried, replace(
        state,
        label_state=label_state,
        threshold=threshold,
        fused=fused,
        per_modality=per,
    )
