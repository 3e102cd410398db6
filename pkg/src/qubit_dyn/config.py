"""Run configuration: flat ``key = value`` text files plus flag overrides."""
from __future__ import annotations

import dataclasses
import math
import re
from dataclasses import dataclass, fields

from . import analytics
from .core import Environment, ModelParams, WernerFamilyInit, to_density_matrix
from .errors import ConfigError, QubitDynError
from .propagators import IntegratorConfig, Method, dt_max

COMMANDS = ("simulate", "timeline", "sweep", "verify", "recipe")
EVALUATORS = ("auto", "analytic", "numeric")

_PI_EXPR = re.compile(r"^\s*([+-]?[0-9.]*(?:e[+-]?\d+)?)\s*\*?\s*pi\s*(?:/\s*([0-9.]+))?\s*$")


def parse_real(text: str) -> float:
    """Float, optionally as a multiple of pi: ``0.3``, ``pi/2``, ``0.25pi``, ``-pi``."""
    text = text.strip()
    try:
        return float(text)
    except ValueError:
        pass
    m = _PI_EXPR.match(text.lower())
    if not m:
        raise ConfigError(f"cannot parse number {text!r}")
    coef = m.group(1)
    coef = -1.0 if coef == "-" else 1.0 if coef in ("", "+") else float(coef)
    denom = float(m.group(2)) if m.group(2) else 1.0
    return coef * math.pi / denom


@dataclass(frozen=True)
class RunConfig:
    command: str = "simulate"
    model: str = "decay"
    a: float = 0.4
    chi: float = 0.0
    v: float = 0.0
    omega0: float = 0.0
    rate_a: float = 1.0
    rate_b: float = 1.0
    t_end: float = 5.0
    dt: float | None = None
    method: str = "rk4"
    sample_every: int = 1
    horizon: float | None = None
    grid_n: int | None = None
    evaluator: str = "auto"
    output: str | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.model not in ("decay", "dephasing"):
            raise ConfigError(f"model must be decay or dephasing, got {self.model!r}")
        if self.method not in ("rk4", "exp"):
            raise ConfigError(f"method must be rk4 or exp, got {self.method!r}")
        if self.evaluator not in EVALUATORS:
            raise ConfigError(f"evaluator must be one of {EVALUATORS}")
        if not 0.0 <= self.a <= 1.0:
            raise ConfigError(f"a must lie in [0, 1], got {self.a}")
        if self.t_end < 0 or (self.horizon is not None and self.horizon <= 0):
            raise ConfigError("t_end must be >= 0 and horizon > 0")
        if self.rate_a < 0 or self.rate_b < 0 or self.omega0 < 0:
            raise ConfigError("rates and omega0 must be nonnegative")
        if self.dt is not None and self.dt <= 0:
            raise ConfigError("dt must be positive")
        if self.sample_every < 1:
            raise ConfigError("sample_every must be >= 1")
        if self.grid_n is not None and self.grid_n < 1000:
            raise ConfigError("grid_n must be >= 1000")

    # -- derived objects -------------------------------------------------

    @property
    def environment(self) -> Environment:
        return Environment(self.model)

    def model_params(self) -> ModelParams:
        if self.environment is Environment.DECAY:
            return ModelParams.decay(self.v, self.rate_a, self.rate_b, self.omega0)
        return ModelParams.dephasing(self.v, self.rate_a, self.rate_b, self.omega0)

    def initial_state(self):
        return to_density_matrix(WernerFamilyInit(self.a, self.chi))

    def integrator(self) -> IntegratorConfig:
        params = self.model_params()
        limit = dt_max(params)
        dt = limit if self.dt is None else self.dt
        if self.method == "rk4" and dt > limit * (1 + 1e-12):
            raise ConfigError(f"dt={dt:g} exceeds dt_max={limit:g}")
        return IntegratorConfig(dt, self.t_end, Method(self.method), self.sample_every)

    def analytic_params(self) -> analytics.AnalyticParams | None:
        """Closed-form parameters, or None when rates differ or vanish."""
        if self.rate_a != self.rate_b or self.rate_a <= 0:
            return None
        return analytics.AnalyticParams(self.a, self.chi, self.v / self.rate_a,
                                        self.environment)

    # -- text round trip ---------------------------------------------------

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            lines.append(f"{f.name} = {'' if value is None else repr(value) if isinstance(value, float) else value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, **overrides) -> "RunConfig":
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            values[key] = value
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_mapping(values)

    @classmethod
    def from_mapping(cls, values: dict) -> "RunConfig":
        known = {f.name: f for f in fields(cls)}
        unknown = sorted(set(values) - set(known))
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
        kwargs = {k: _coerce(known[k], v) for k, v in values.items()}
        try:
            return cls(**kwargs)
        except QubitDynError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)


def _coerce(f: dataclasses.Field, value):
    if not isinstance(value, str):
        return value
    kind = str(f.type)
    if value == "" and "None" in kind:
        return None
    try:
        if kind.startswith("float"):
            return parse_real(value)
        if kind.startswith("int"):
            return int(value)
    except ValueError as exc:
        raise ConfigError(f"{f.name}: {exc}") from exc
    return value
