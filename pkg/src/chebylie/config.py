import os
from dataclasses import dataclass, replace

from .errors import ConstraintError

# Covers E7 (2,903,040); E8 needs an explicit override
DEFAULT_MAX_WEYL_ORDER = 3_000_000
DEFAULT_MAX_PAIR_BUDGET = 10**8
# Coset-pair sweeps below this size always run in-process
PARALLEL_PAIR_THRESHOLD = 2_000_000

ENV_WORKERS = "CHEBYLIE_WORKERS"
ENV_MAX_WEYL_ORDER = "CHEBYLIE_MAX_WEYL_ORDER"
ENV_MAX_PAIR_BUDGET = "CHEBYLIE_MAX_PAIR_BUDGET"


@dataclass(frozen=True)
class Settings:
    workers: int
    max_weyl_order: int
    max_pair_budget: int


def _positive_int(name: str, raw: str | None, default: int) -> int:
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConstraintError(f"{name} must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ConstraintError(f"{name} must be a positive integer, got {value}")
    return value


def load_settings(workers: int | None = None,
                  max_weyl_order: int | None = None,
                  max_pair_budget: int | None = None) -> Settings:
    # Explicit arguments win over the environment, which wins over the defaults
    env = os.environ
    settings = Settings(
        workers=_positive_int(ENV_WORKERS, env.get(ENV_WORKERS), os.cpu_count() or 1),
        max_weyl_order=_positive_int(ENV_MAX_WEYL_ORDER, env.get(ENV_MAX_WEYL_ORDER),
                                     DEFAULT_MAX_WEYL_ORDER),
        max_pair_budget=_positive_int(ENV_MAX_PAIR_BUDGET, env.get(ENV_MAX_PAIR_BUDGET),
                                      DEFAULT_MAX_PAIR_BUDGET),
    )
    overrides = {"workers": workers,
                 "max_weyl_order": max_weyl_order,
                 "max_pair_budget": max_pair_budget}
    for name, value in overrides.items():
        if value is not None:
            if value < 1:
                raise ConstraintError(f"{name} must be a positive integer, got {value}")
            settings = replace(settings, **{name: value})
    return settings
