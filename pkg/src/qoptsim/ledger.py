"""Query accounting with model-cost semantics.

Counters record what the algorithms are *charged*, not what the simulator
computes: whole-table materialization needed only to run the simulation is
booked under `setup_loss_evals` and excluded from scaling fits.
"""
from __future__ import annotations

from dataclasses import dataclass, fields


@dataclass
class QueryLedger:
    classical_loss_evals: int = 0
    quantum_parallel_calls: int = 0
    circuit_runs: int = 0
    boost_iterations: int = 0
    setup_loss_evals: int = 0

    def charge_classical(self, n: int) -> None:
        self.classical_loss_evals += int(n)

    def charge_setup(self, n: int) -> None:
        self.setup_loss_evals += int(n)

    def snapshot(self) -> dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def diff(self, earlier: dict[str, int]) -> dict[str, int]:
        return {k: v - earlier[k] for k, v in self.snapshot().items()}

    def merge(self, other: "QueryLedger") -> None:
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))
