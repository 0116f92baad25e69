"""Average block-error-rate toolkit for a surface-assisted two-user
cooperative downlink in the short-packet regime.

Two independent evaluation paths over the same system model:

- closed forms (`risnoma.analytic`): a moment-matched gamma approximation
  of the cascaded surface link feeds per-decoding-step SINR CDFs, and the
  linearized finite-blocklength error model collapses every average BLER
  to a single CDF evaluation;
- simulation (`risnoma.montecarlo`): seeded, chunk-deterministic Monte
  Carlo averaging the exact finite-blocklength error model per trial.

The CLI (`python -m risnoma`) writes both as CSV and cross-checks them.
"""

from .analytic import avg_bler_ceu_mrc, avg_bler_ceu_sc, avg_bler_cu, diversity_order
from .channel import SystemConfig
from .fbl import CodeSpec
from .montecarlo import BlerEstimate, ScenarioKind, run_trials, sweep

__version__ = "0.1.0"

__all__ = [
    "SystemConfig",
    "CodeSpec",
    "ScenarioKind",
    "BlerEstimate",
    "avg_bler_cu",
    "avg_bler_ceu_sc",
    "avg_bler_ceu_mrc",
    "diversity_order",
    "run_trials",
    "sweep",
    "__version__",
]
