"""Run configuration: every constant is a named key with a documented default."""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path

from .benchmark import CANONICAL_SEED, REPEATED_SEEDS
from .branch_cf import CFConfig
from .branch_rl import RLConfig
from .fusion import ALPHA_GRID, CF_GRID, RL_GRID

CONFIG_ENV = "TALENTREC_CONFIG"


@dataclass
class RunConfig:
    # collaborative branch
    beta: float = 0.85
    gamma: float = 0.7
    decay: float = 0.8
    # bandit branch
    eta: float = 0.2
    reward_pos: float = 1.0
    reward_neg: float = -0.2
    negatives_per_positive: int = 2
    passes: int = 30
    omega: float = 0.7
    mix_family: float = 0.75
    mix_pop: float = 0.25
    # TOPSIS branch
    topsis_normalization: str = "vector"
    # selection grids
    alpha_grid: tuple[float, ...] = ALPHA_GRID
    cf_grid: tuple[float, ...] = CF_GRID
    rl_grid: tuple[float, ...] = RL_GRID
    latent_dims: tuple[int, ...] = (6, 10, 14)
    nmf_iterations: int = 200
    svd_iterations: int = 50
    # protocol
    seeds: tuple[int, ...] = REPEATED_SEEDS
    canonical_seed: int = CANONICAL_SEED
    # optional resource files (None = shipped defaults)
    taxonomy_path: str | None = None
    digital_terms_path: str | None = None
    innovation_terms_path: str | None = None
    role_cues_path: str | None = None
    allow_list_path: str | None = None
    jobs: int = 1
    post_hoc: bool = False
    comparisons: tuple[str, ...] = field(default=("repeat_last", "markov", "transition_cf", "cf_topsis"))

    def cf_config(self) -> CFConfig:
        return CFConfig(self.beta, self.gamma, self.decay)

    def rl_config(self, seed: int = 0) -> RLConfig:
        return RLConfig(
            eta=self.eta,
            reward_pos=self.reward_pos,
            reward_neg=self.reward_neg,
            negatives_per_positive=self.negatives_per_positive,
            passes=self.passes,
            omega=self.omega,
            mix_family=self.mix_family,
            mix_pop=self.mix_pop,
            decay=self.decay,
            seed=seed,
        )

    def updated(self, **overrides) -> "RunConfig":
        return dataclasses.replace(self, **{k: _coerce(self, k, v) for k, v in overrides.items() if v is not None})

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        """Flat ``key = value`` file; ``#`` starts a comment."""
        values = {}
        for no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{no}: expected key = value")
            k, v = (s.strip() for s in line.split("=", 1))
            if k not in _FIELDS:
                raise ValueError(f"{path}:{no}: unknown config key {k!r}")
            values[k] = v
        return cls().updated(**values)

    @classmethod
    def default(cls) -> "RunConfig":
        path = os.environ.get(CONFIG_ENV)
        return cls.from_file(path) if path else cls()

    def to_text(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(str(x) for x in v)
            lines.append(f"{f.name} = {'' if v is None else v}")
        return "\n".join(lines) + "\n"


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}


def parse_seeds(text: str) -> tuple[int, ...]:
    """``100..109`` ranges and comma lists."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return tuple(out)


def _coerce(cfg: RunConfig, key: str, value):
    if not isinstance(value, str):
        return value
    current = _FIELDS[key].default
    value = value.strip()
    if key == "seeds":
        return parse_seeds(value)
    if key.endswith("_path"):
        return value or None
    if isinstance(current, bool):
        return value.lower() in ("1", "true", "yes", "on")
    if isinstance(current, int):
        return int(value)
    if isinstance(current, float):
        return float(value)
    if isinstance(getattr(cfg, key), tuple):
        items = [s.strip() for s in value.split(",") if s.strip()]
        sample = getattr(cfg, key)[0] if getattr(cfg, key) else ""
        if isinstance(sample, int):
            return tuple(int(s) for s in items)
        if isinstance(sample, float):
            return tuple(float(s) for s in items)
        return tuple(items)
    return value
