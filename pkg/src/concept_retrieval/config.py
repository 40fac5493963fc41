"""Engine configuration shared by the CLI, harness, and service."""

from __future__ import annotations

from dataclasses import dataclass, field, asdict


@dataclass(frozen=True)
class EngineConfig:
    """Solver constants: basis sizes, bandwidths, regularization, fusion."""

    lambda_reg: float = 100.0
    fusion: dict[str, float] = field(
        default_factory=lambda: {"visual": 0.5, "semantic": 0.5}
    )
    k_visual: int = 256
    k_semantic: int = 10
    bins: int = 500
    pca_dims: int | None = None          # None: min(d, 64)
    rbf_sigma_factor: float | tuple[float, ...] = 0.2
    semantic_sigma: float = 0.5
    affinity_form: str = "rbf"           # or "lin"
    class_prior: str = "frequency"       # or "uniform"
    discard_epsilon: float = 1e-10
    step_alpha: float = 2.0

    def to_dict(self) -> dict:
        d = asdict(self)
        if isinstance(d["rbf_sigma_factor"], tuple):
            d["rbf_sigma_factor"] = list(d["rbf_sigma_factor"])
        return d

    @classmethod
    def from_dict(cls, raw: dict) -> "EngineConfig":
        known = {f for f in cls.__dataclass_fields__}
        kwargs = {k: v for k, v in raw.items() if k in known}
        if isinstance(kwargs.get("rbf_sigma_factor"), list):
            kwargs["rbf_sigma_factor"] = tuple(kwargs["rbf_sigma_factor"])
        return cls(**kwargs)


# settings that keep the simulated-feedback experiments well conditioned at
# desk scale (n ~ 1e4, a few hundred classes): a soft semantic fit and a
# populated histogram
EXPERIMENT_ENGINE = EngineConfig(
    lambda_reg=1.0,
    k_visual=256,
    k_semantic=48,
    bins=64,
    semantic_sigma=0.38,
)
