"""Certificate record returned by every checker."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

CONDITIONS = (
    "metric-axioms",
    "eq1-contractive",
    "ciric-type1",
    "ciric-type2",
    "kannan",
    "common-type1",
    "common-type2",
    "continuity",
    "orbital-continuity",
    "uniqueness",
)


@dataclass(frozen=True)
class Certificate:
    """Outcome of checking a condition over a finite sample.

    ``worst_margin`` is the minimum normalized slack over all checks, so
    ``passed`` holds exactly when ``worst_margin >= -eps_pos``. ``witness`` is
    the first violation found, in the checker's documented order.
    """

    condition: str
    passed: bool
    worst_margin: float
    witness: tuple | None = None
    sample_size: int = 0
    max_power: int = 0
    details: dict = field(default_factory=dict)
    derived_gauge: np.ndarray | None = None

    def __post_init__(self):
        if self.condition not in CONDITIONS:
            raise ValueError(f"unknown condition {self.condition!r}")
        if self.passed != (self.witness is None):
            raise ValueError("a certificate carries a witness iff it failed")

    def to_dict(self) -> dict[str, Any]:
        out = {
            "condition": self.condition,
            "passed": self.passed,
            "worst_margin": self.worst_margin,
            "witness": None if self.witness is None else [to_jsonable(w) for w in self.witness],
            "sample_size": self.sample_size,
            "max_power": self.max_power,
            "details": to_jsonable(self.details),
        }
        if self.derived_gauge is not None:
            out["derived_gauge"] = to_jsonable(self.derived_gauge)
        return out


def threshold_margin(value: float, threshold: float, eps_pos: float) -> float:
    """Map a ``value <= threshold`` check onto the margin scale.

    The result is ``>= -eps_pos`` exactly when the check passes, which keeps
    threshold-style checks comparable with order margins.
    """
    if value <= threshold:
        return 0.0 if threshold <= 0 or eps_pos == 0 else -eps_pos * value / threshold
    if threshold <= 0 or eps_pos == 0:
        return min(-(value - threshold), -2.0 * eps_pos)
    return -eps_pos * value / threshold


def to_jsonable(obj):
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            if not np.any(obj.imag):
                return obj.real.tolist()
            return {"re": obj.real.tolist(), "im": obj.imag.tolist()}
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    return obj
