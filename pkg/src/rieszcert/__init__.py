"""Numerical certification of a Bellman-function proof of dimension-free
Riesz transform bounds: the explicit two-regime Bellman function and its
Hessian convexity, its mollification, exact discrete weighted model spaces,
and the bilinear-embedding and operator-norm ceilings."""

from .bellman import BellmanParams, BellmanPoint, eval_beta, eval_Q
from .config import CampaignConfig, ConfigError
from .models import Field, FormField, build_circle_model, build_ou_model
from .report import CertificationReport, CheckResult

__all__ = [
    "BellmanParams",
    "BellmanPoint",
    "eval_beta",
    "eval_Q",
    "CampaignConfig",
    "ConfigError",
    "Field",
    "FormField",
    "build_circle_model",
    "build_ou_model",
    "CertificationReport",
    "CheckResult",
]

__version__ = "0.1.0"
