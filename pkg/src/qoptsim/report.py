"""Run reports and power-law fits for the experiment harness."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class RunReport:
    algorithm: str  # "avg" | "pstc"
    seed: int | None
    chosen_index: int  # 1-based
    L_avg_at_chosen: float
    L_pstc_at_chosen: float
    ledger: dict
    wall_time_ms: float
    details: dict = field(default_factory=dict, repr=False)

    def to_json(self) -> str:
        doc = {
            "algorithm": self.algorithm,
            "seed": self.seed,
            "chosen_index": self.chosen_index,
            "L_avg_at_chosen": self.L_avg_at_chosen,
            "L_pstc_at_chosen": self.L_pstc_at_chosen,
            "ledger": self.ledger,
            "wall_time_ms": self.wall_time_ms,
        }
        return json.dumps(doc)


@dataclass(frozen=True)
class ScalingFit:
    points: tuple  # ((M, median_cost), ...)
    slope: float
    intercept: float
    r2: float


def fit_power_law(points) -> ScalingFit:
    """Least-squares fit of log2(cost) against log2(M)."""
    points = tuple((int(m), float(c)) for m, c in points)
    if len(points) < 3:
        raise ValueError("power-law fit needs at least 3 grid sizes")
    xs = np.log2([m for m, _ in points])
    ys = np.log2([c for _, c in points])
    slope, intercept = np.polyfit(xs, ys, 1)
    pred = slope * xs + intercept
    ss_res = float(np.sum((ys - pred) ** 2))
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return ScalingFit(points=points, slope=float(slope),
                      intercept=float(intercept), r2=r2)
