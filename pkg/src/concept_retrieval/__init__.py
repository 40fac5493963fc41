"""Interactive concept retrieval over large item collections.

Eigenfunction-approximated graph-based semi-supervised learning fused
across feature modalities, driven by uncertainty-sampling active learning
with an adaptive decision threshold.
"""

__version__ = "0.1.0"

from .active import QueryStrategy, ThresholdState, run_round, start_session
from .config import EngineConfig
from .solver import FusionWeights, LabelFunction, LabelState

__all__ = [
    "EngineConfig",
    "FusionWeights",
    "LabelFunction",
    "LabelState",
    "QueryStrategy",
    "ThresholdState",
    "run_round",
    "start_session",
    "__version__",
]
