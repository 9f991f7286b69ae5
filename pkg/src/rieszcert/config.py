"""Campaign configuration: JSON schema, validation, defaults.

A config fixes everything that varies between certification runs: the seed,
the exponent sweep, the model roster, mollification widths, tolerances and
budgets.  Validation failures raise :class:`ConfigError`, which the CLI maps
to exit code 2.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path


class ConfigError(ValueError):
    """Malformed campaign configuration."""


DEFAULT_TOLERANCES = {
    "assert_tol": 1e-9,
    "rel_tol": 1e-6,
    "trunc_frac": 1e-3,
    "quad_tol": 1e-6,
    "fit_tol": 0.05,
}

DEFAULT_BUDGETS = {
    "samples": 10,
    "ascent_iters": 80,
    "time_nodes": 192,
}

DEFAULT_MODELS = [
    {"kind": "weighted_circle", "N": 128, "phi": {"type": "zero"}, "label": "flat_circle"},
    {
        "kind": "weighted_circle",
        "N": 128,
        "phi": {"type": "cos", "amplitude": 1.0},
        "label": "cos_circle",
    },
    {"kind": "ou_line", "K": 32, "d": 1, "label": "ou_line"},
]


@dataclass
class CampaignConfig:
    seed: int = 0
    p_list: list[float] = field(default_factory=lambda: [2.0, 3.0])
    models: list[dict] = field(default_factory=lambda: [dict(m) for m in DEFAULT_MODELS])
    kappa_list: list[float] = field(default_factory=lambda: [0.1])
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    budgets: dict = field(default_factory=lambda: dict(DEFAULT_BUDGETS))
    outputs: str = "out"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not isinstance(self.seed, int):
            raise ConfigError("seed must be an integer")
        if not self.p_list:
            raise ConfigError("p_list must be nonempty")
        for p in self.p_list:
            if not (isinstance(p, (int, float)) and p > 1.0):
                raise ConfigError(f"p_list entries must be > 1, got {p!r}")
        if not self.models:
            raise ConfigError("models must be nonempty")
        for m in self.models:
            if not isinstance(m, dict) or "kind" not in m:
                raise ConfigError("each model config needs a 'kind'")
        for k in self.kappa_list:
            if not (0.0 < k < 1.0):
                raise ConfigError(f"kappa must lie in (0, 1), got {k!r}")
        merged_tol = dict(DEFAULT_TOLERANCES)
        merged_tol.update(self.tolerances or {})
        for name, val in merged_tol.items():
            if name not in DEFAULT_TOLERANCES:
                raise ConfigError(f"unknown tolerance {name!r}")
            if not (val > 0.0):
                raise ConfigError(f"tolerance {name} must be positive")
        self.tolerances = merged_tol
        merged_bud = dict(DEFAULT_BUDGETS)
        merged_bud.update(self.budgets or {})
        for name, val in merged_bud.items():
            if name not in DEFAULT_BUDGETS:
                raise ConfigError(f"unknown budget {name!r}")
            if not (isinstance(val, int) and val > 0):
                raise ConfigError(f"budget {name} must be a positive integer")
        self.budgets = merged_bud

    def bellman_p(self, p: float) -> float:
        """Exponent handed to the Bellman machinery.

        For p in (1, 2) the two evolved fields swap roles and the conjugate
        exponent q = p/(p-1) >= 2 drives the Bellman side; the final bound
        only sees p* = max(p, q), which the swap leaves unchanged.
        """
        return p if p >= 2.0 else p / (p - 1.0)

    @classmethod
    def from_dict(cls, raw: dict) -> "CampaignConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a JSON object")
        known = {"seed", "p_list", "models", "kappa_list", "tolerances", "budgets", "outputs"}
        extra = set(raw) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        kwargs = {}
        for key in known:
            if key in raw:
                kwargs[key] = raw[key]
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_file(cls, path: str | Path) -> "CampaignConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(raw)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "p_list": list(self.p_list),
            "models": [dict(m) for m in self.models],
            "kappa_list": list(self.kappa_list),
            "tolerances": dict(self.tolerances),
            "budgets": dict(self.budgets),
            "outputs": self.outputs,
        }
