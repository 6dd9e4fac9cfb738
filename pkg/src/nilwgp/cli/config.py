"""Experiment configuration with a canonical ``key=value`` text form.

Keys appear one per line in the fixed order of ``KEYS``; ``from_text`` is
strict (unknown, duplicate or missing keys are errors, blank lines and
``#`` comments are ignored), so ``to_text(from_text(t)) == t`` for every
canonical text ``t``.
"""

from __future__ import annotations

import re
from dataclasses import asdict, dataclass, fields, replace

from ..errors import ConfigError
from ..progressions import DEFAULT_BUDGET

KINDS = ("nilbox", "nilprog", "ap", "ball")
MODES = ("random", "symbolic")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment_id: str = "es"
    group: str = "heisenberg"
    kind: str = "nilbox"
    ell: int = 2
    ns: tuple = (2, 3, 4, 6, 8)
    mode: str = "random"
    bit_size: int = 32
    seed: int = 2024
    alpha: int = 3
    tau: int = 4
    annihilator: tuple | None = (2, 0.4, 64)  # (degree, threshold, trials)
    budget: int = DEFAULT_BUDGET
    threshold: float = 3.0  # doubling above this fails the approximate-subgroup test
    min_slope: float = 1.8
    min_gap: float = 0.1
    csv_path: str = ""
    report_path: str = ""

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not re.fullmatch(r"[A-Za-z0-9_.-]+", self.experiment_id):
            raise ConfigError(f"experiment_id {self.experiment_id!r} must be a plain token")
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.ell < 1:
            raise ConfigError("ell must be positive")
        if not self.ns or any(n < 1 for n in self.ns) or any(b <= a for a, b in zip(self.ns, self.ns[1:])):
            raise ConfigError("ns must be a strictly increasing list of positive integers")
        for name in ("bit_size", "alpha", "tau", "budget"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.threshold <= 0:
            raise ConfigError("threshold must be positive")
        if self.annihilator is not None:
            d, theta, trials = self.annihilator
            if d < 1 or trials < 1 or not 0 < theta <= 1:
                raise ConfigError("annihilator needs degree >= 1, 0 < threshold <= 1 and trials >= 1")

    def with_(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)

    def to_text(self) -> str:
        return "".join(f"{k}={_format(k, v)}\n" for k, v in asdict(self).items())

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            if key not in KEYS:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            if key in values:
                raise ConfigError(f"line {lineno}: duplicate key {key!r}")
            values[key] = _parse(key, value)
        missing = [k for k in KEYS if k not in values]
        if missing:
            raise ConfigError(f"missing keys: {', '.join(missing)}")
        return cls(**values)

    @classmethod
    def load(cls, path: str) -> "ExperimentConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                return cls.from_text(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc


KEYS = tuple(f.name for f in fields(ExperimentConfig))
_INTS = {"ell", "bit_size", "seed", "alpha", "tau", "budget"}
_FLOATS = {"threshold", "min_slope", "min_gap"}


def _format(key, value) -> str:
    if key == "ns":
        return ",".join(str(n) for n in value)
    if key == "annihilator":
        return "off" if value is None else f"{value[0]},{value[1]!r},{value[2]}"
    if key in _FLOATS:
        return repr(float(value))
    return str(value)


def _parse(key: str, value: str):
    try:
        if key in _INTS:
            return int(value)
        if key in _FLOATS:
            return float(value)
        if key == "ns":
            return tuple(int(v) for v in value.split(","))
        if key == "annihilator":
            if value == "off":
                return None
            d, theta, trials = value.split(",")
            return int(d), float(theta), int(trials)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {value!r}") from exc
    return value
