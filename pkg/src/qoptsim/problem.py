"""Discretized optimization problems: a parameter grid, a sample set and a
per-(parameter, sample) loss table.

The loss table is the single source of truth for every oracle in the
package. The number of parameters M must be a power of two (it indexes a
qubit register); the sample count N may be arbitrary and is padded to the
next power of two inside the circuits, with pad columns that never count as
hits and are excluded from averages.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np


def _is_power_of_two(x: int) -> bool:
    return x >= 1 and (x & (x - 1)) == 0


@dataclass(frozen=True)
class ProblemInstance:
    theta_values: np.ndarray
    losses: np.ndarray  # shape (M, N), row i = losses of parameter i
    samples: tuple = ()
    default_threshold: float | None = None

    def __post_init__(self):
        theta = np.asarray(self.theta_values, dtype=float)
        losses = np.asarray(self.losses, dtype=float)
        object.__setattr__(self, "theta_values", theta)
        object.__setattr__(self, "losses", losses)
        if losses.ndim != 2:
            raise ValueError("loss table must be 2-D (parameters x samples)")
        m, n = losses.shape
        if theta.shape != (m,):
            raise ValueError("theta grid and loss table disagree on M")
        if not _is_power_of_two(m):
            raise ValueError(f"M={m} must be a power of two")
        if n < 1:
            raise ValueError("need at least one sample")
        if m > 1 and not np.all(np.diff(theta) > 0):
            raise ValueError("theta grid must be strictly ascending")
        if not np.all(np.isfinite(losses)) or np.min(losses) < 0:
            raise ValueError("losses must be finite and non-negative")
        if not self.samples:
            object.__setattr__(self, "samples", tuple(range(n)))
        elif len(self.samples) != n:
            raise ValueError("sample handles and loss table disagree on N")

    @property
    def num_parameters(self) -> int:
        return self.losses.shape[0]

    @property
    def num_samples(self) -> int:
        return self.losses.shape[1]

    @property
    def theta_qubits(self) -> int:
        return int(math.log2(self.num_parameters))

    @property
    def num_samples_padded(self) -> int:
        return 1 << self.sample_qubits

    @property
    def sample_qubits(self) -> int:
        return max(0, math.ceil(math.log2(self.num_samples)))

    def loss(self, theta_index: int, sample_index: int) -> float:
        return float(self.losses[theta_index, sample_index])

    @classmethod
    def from_function(cls, theta_values: Sequence[float], samples: Sequence,
                      loss_fn: Callable[[float, object], float],
                      default_threshold: float | None = None) -> "ProblemInstance":
        table = np.array(
            [[loss_fn(t, x) for x in samples] for t in theta_values], dtype=float
        )
        return cls(np.asarray(theta_values, dtype=float), table,
                   samples=tuple(samples), default_threshold=default_threshold)


def problem_to_dict(problem: ProblemInstance) -> dict:
    doc = {
        "theta_values": problem.theta_values.tolist(),
        "loss_table": problem.losses.tolist(),
    }
    if problem.default_threshold is not None:
        doc["ell_threshold"] = problem.default_threshold
    return doc


def problem_from_dict(doc: dict) -> ProblemInstance:
    return ProblemInstance(
        theta_values=np.asarray(doc["theta_values"], dtype=float),
        losses=np.asarray(doc["loss_table"], dtype=float),
        default_threshold=doc.get("ell_threshold"),
    )


def save_problem(problem: ProblemInstance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(problem_to_dict(problem)))


def load_problem(path: str | Path) -> ProblemInstance:
    return problem_from_dict(json.loads(Path(path).read_text()))
