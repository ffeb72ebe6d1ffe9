from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Iterator

import numpy as np

from phaselearn.f2poly import F2Poly, format_poly
from phaselearn.f2solve import StabSupport
from phaselearn.oracle import PhaseOracle
from phaselearn.zqpoly import ZqPoly, format_zq


@dataclass
class LearnReport:
    """Outcome of one learner run.  ``samples_used`` is the oracle counter delta."""

    result: F2Poly | ZqPoly | None
    status: str = "ok"
    samples_used: int = 0
    wall_time: float = 0.0
    per_round: list[dict[str, Any]] = field(default_factory=list)
    support: StabSupport | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_dict(self) -> dict[str, Any]:
        if isinstance(self.result, F2Poly):
            text = format_poly(self.result)
        elif isinstance(self.result, ZqPoly):
            text = format_zq(self.result)
        else:
            text = None
        out: dict[str, Any] = {
            "status": self.status,
            "samples_used": self.samples_used,
            "wall_time": round(self.wall_time, 6),
            "result": text,
            "per_round": self.per_round,
        }
        if self.support is not None:
            out["support"] = {"a": self.support.a, "basis": list(self.support.basis)}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


@contextmanager
def accounting(o: PhaseOracle, report: LearnReport) -> Iterator[LearnReport]:
    start_copies = o.copies_used
    start = time.perf_counter()
    try:
        yield report
    finally:
        report.samples_used = o.copies_used - start_copies
        report.wall_time = time.perf_counter() - start


def pack_bits(values: np.ndarray) -> int:
    """Little-endian int whose bit k is values[k] & 1."""
    if values.size == 0:
        return 0
    packed = np.packbits(np.asarray(values, dtype=np.uint8) & 1, bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")
