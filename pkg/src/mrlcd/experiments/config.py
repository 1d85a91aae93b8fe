"""Experiment configuration: a JSON file plus command-line overrides."""

import json
from dataclasses import asdict, dataclass, field, fields, replace

from ..ensembles import EntryLaw
from ..errors import ParameterError
from ..geometry import SphereParams

__all__ = ["ExperimentConfig", "load_config"]


@dataclass(frozen=True)
class ExperimentConfig:
    """Settings shared by every experiment.

    Experiment-specific knobs (``J``, ``r_grid``, ``cap``, ``vector`` ...)
    live in ``extra`` and are read by the runner that needs them.
    """

    name: str = "experiment"
    n: int = 8
    law: EntryLaw = field(default_factory=EntryLaw.rademacher)
    trials: int = 100
    master_seed: int = 0
    eps_grid: tuple = (0.01, 0.1, 1.0)
    L: float = 1.0
    lam: float = 0.125
    p: float = 0.1
    c0: float = 0.5
    c1: float = 0.5
    c_spread: float = None
    K: float = 3.0
    workers: int = 1
    out: str = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if isinstance(self.law, (str, dict)):
            object.__setattr__(self, "law", EntryLaw.from_dict(self.law))
        object.__setattr__(self, "eps_grid", tuple(float(e) for e in self.eps_grid))
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"n must be a positive integer, got {self.n}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ParameterError(f"trials must be a positive integer, got {self.trials}")
        if list(self.eps_grid) != sorted(self.eps_grid) or any(e < 0 for e in self.eps_grid):
            raise ParameterError("eps_grid must be nonnegative and sorted ascending")
        if not self.K >= 1:
            raise ParameterError(f"K must be >= 1, got {self.K}")
        if self.workers < 1:
            raise ParameterError("workers must be >= 1")

    @property
    def sphere(self):
        return SphereParams(self.c0, self.c1, self.c_spread)

    def get(self, key, default=None):
        return self.extra.get(key, default)

    def to_dict(self):
        d = asdict(self)
        d["law"] = self.law.to_dict()
        d["eps_grid"] = list(self.eps_grid)
        d.pop("workers")
        d.pop("out")
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "lambda" in d:
            d["lam"] = d.pop("lambda")
        if "seed" in d:
            d["master_seed"] = d.pop("seed")
        known = {f.name for f in fields(cls)}
        extra = dict(d.pop("extra", {}))
        for key in list(d):
            if key not in known:
                extra[key] = d.pop(key)
        return cls(**d, extra=extra)

    def with_overrides(self, **kw):
        kw = {k: v for k, v in kw.items() if v is not None}
        if "lambda" in kw:
            kw["lam"] = kw.pop("lambda")
        if "seed" in kw:
            kw["master_seed"] = kw.pop("seed")
        return replace(self, **kw)


def load_config(path=None, defaults=None, **overrides):
    """Read a JSON config (or start from ``defaults``) and apply non-None overrides."""
    base = dict(defaults or {})
    if path is not None:
        try:
            with open(path) as fh:
                base.update(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise ParameterError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = ExperimentConfig.from_dict(base)
    except ParameterError:
        raise
    except (TypeError, ValueError) as exc:
        raise ParameterError(str(exc)) from exc
    return cfg.with_overrides(**overrides)
