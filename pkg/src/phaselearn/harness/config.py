"""Experiment configuration: a flat key=value file plus command-line overrides."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

LEARNERS = (
    "binary",
    "sparse",
    "generalized",
    "stabilizer",
    "noisy-global",
    "noisy-local",
    "circuit-binary",
    "circuit-dyadic",
)


class ConfigError(ValueError):
    pass


def _int_list(text: str) -> list[int]:
    out = []
    for part in text.replace(" ", "").split(","):
        if not part:
            continue
        if ":" in part:
            # start:stop:step, stop inclusive
            bits = [int(v) for v in part.split(":")]
            start, stop = bits[0], bits[1]
            step = bits[2] if len(bits) > 2 else 1
            out.extend(range(start, stop + 1, step))
        else:
            out.append(int(part))
    return out


@dataclass
class ExperimentSpec:
    learner: str = "binary"
    n: list[int] = field(default_factory=lambda: [8])
    d: int = 2
    q: int = 0
    s: int = 4
    eps: float = 0.0
    gd: int = 2
    dim: int = 5
    m_support: int = 40
    decoder: str = "round"
    gates: int = 15
    grid: list[int] = field(default_factory=lambda: [64])
    trials: int = 100
    seed: int = 0
    output: str = "-"
    workers: int = 1
    timing: bool = True

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.learner not in LEARNERS:
            raise ConfigError(f"unknown learner {self.learner!r}; choose from {', '.join(LEARNERS)}")
        if not self.n:
            raise ConfigError("n grid is empty")
        if not self.grid:
            raise ConfigError("sample grid is empty")
        if any(m < 1 for m in self.grid):
            raise ConfigError("sample counts must be positive")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.d < 1:
            raise ConfigError("d must be >= 1")
        if any(k < self.d and self.learner in ("binary", "sparse", "generalized") for k in self.n):
            raise ConfigError("need n >= d")
        if not 0 <= self.eps < 1:
            raise ConfigError("eps must lie in [0, 1)")
        if self.decoder not in ("round", "joint"):
            raise ConfigError("decoder must be round or joint")

    @property
    def modulus(self) -> int:
        return self.q or (1 << self.d)

    def items(self) -> list[tuple[str, str]]:
        out = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, list):
                v = ",".join(str(x) for x in v)
            elif isinstance(v, bool):
                v = "true" if v else "false"
            out.append((f.name, str(v)))
        return out

    def header(self) -> str:
        from phaselearn import __version__

        lines = [f"# phaselearn {__version__}"]
        lines += [f"# {k}={v}" for k, v in self.items()]
        return "\n".join(lines) + "\n"


def _coerce(name: str, text: str):
    kinds = {f.name: f.type for f in dataclasses.fields(ExperimentSpec)}
    if name not in kinds:
        raise ConfigError(f"unknown config key {name!r}")
    kind = kinds[name]
    try:
        if kind == "list[int]":
            return _int_list(text)
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        if kind == "bool":
            low = text.strip().lower()
            if low not in ("true", "false", "1", "0", "yes", "no", "on", "off"):
                raise ValueError(text)
            return low in ("true", "1", "yes", "on")
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {text!r}") from exc
    return text.strip()


def parse_pairs(lines: Iterable[str], where: str = "config") -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{where}:{lineno}: expected key=value, got {raw.strip()!r}")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def load_spec(path: str | Path | None = None, overrides: Iterable[str] = ()) -> ExperimentSpec:
    values: dict[str, str] = {}
    if path is not None:
        values.update(parse_pairs(Path(path).read_text().splitlines(), str(path)))
    values.update(parse_pairs(overrides, "command line"))
    kwargs = {k: _coerce(k, v) for k, v in values.items()}
    return ExperimentSpec(**kwargs)
