"""Grover-style amplitude amplification and search with an unknown number
of marked values.

Reflections about the prepared state are exact: the preparation is a
recorded list of self-inverse gates, so ref(prepared) = prep o reflect-zero
o prep^-1 without any matrix inversion. Measured candidates are always
re-checked classically before they are accepted.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .ledger import QueryLedger
from .sim import (
    Gate,
    GateSequence,
    RegisterLike,
    StateVector,
    measure,
    new_zero_state,
    sample_index,
)


@dataclass(frozen=True)
class AmplificationPlan:
    iterations: int
    mode: str  # "exact-p" | "unknown-p"
    p_estimate: float | None = None


def plan_iterations(p: float) -> AmplificationPlan:
    """Iteration count floor((pi/4) / asin(sqrt(p))) for known good mass p."""
    if not 0 < p <= 1:
        raise ValueError(f"success probability {p} outside (0, 1]")
    iterations = int(math.floor((math.pi / 4.0) / math.asin(math.sqrt(p))))
    return AmplificationPlan(iterations=iterations, mode="exact-p", p_estimate=p)


def grover_iterate(state: StateVector, mark: Gate, prep: GateSequence,
                   ledger: QueryLedger | None = None) -> StateVector:
    """One amplification round: mark good states, reflect about the prep."""
    mark.apply(state, ledger)
    prep.apply_inverse(state, ledger)
    state.amps[1:] *= -1.0  # reflect about the all-zeros state
    prep.apply(state, ledger)
    if ledger is not None:
        ledger.boost_iterations += 1
    return state


def bbht_bounds(space_size: int):
    """Iteration bounds of the classic unknown-count schedule.

    Starts at 1, grows by ceil(6/5 * b), capped at ceil(sqrt(space))."""
    cap = max(1, math.ceil(math.sqrt(space_size)))
    b = 1
    while True:
        yield b
        b = min(math.ceil(6 * b / 5), cap)


@dataclass
class CircuitSearch:
    """Statevector engine: prepare, iterate, measure one register."""

    layout: object
    prep: GateSequence
    register: RegisterLike
    mark: Gate
    ledger: QueryLedger | None = None
    on_oracle: Callable[[], None] | None = None

    def run(self, iterations: int, rng: np.random.Generator) -> int:
        state = new_zero_state(self.layout)
        self.prep.apply(state, self.ledger)
        if self.ledger is not None:
            self.ledger.circuit_runs += 1
        for _ in range(iterations):
            grover_iterate(state, self.mark, self.prep, self.ledger)
            if self.on_oracle is not None:
                self.on_oracle()
        return measure(state, self.register, rng).value


def grover_outcome_distribution(num_values: int, marked: np.ndarray,
                                iterations: int) -> np.ndarray:
    """Exact measurement distribution of uniform-prep Grover search."""
    marked = np.asarray(marked, dtype=bool)
    k = int(marked.sum())
    probs = np.empty(num_values, dtype=float)
    if k == 0:
        probs.fill(1.0 / num_values)
        return probs
    phi = math.asin(math.sqrt(k / num_values))
    s = math.sin((2 * iterations + 1) * phi) ** 2
    probs[marked] = s / k
    if k < num_values:
        probs[~marked] = (1.0 - s) / (num_values - k)
    return probs


@dataclass
class UniformSearch:
    """Closed-form engine for uniform preparation; RNG-compatible with
    `CircuitSearch` (same draws in the same order)."""

    marked: np.ndarray
    ledger: QueryLedger | None = None
    on_oracle: Callable[[], None] | None = None

    def run(self, iterations: int, rng: np.random.Generator) -> int:
        if self.ledger is not None:
            self.ledger.circuit_runs += 1
            self.ledger.boost_iterations += iterations
        if self.on_oracle is not None:
            for _ in range(iterations):
                self.on_oracle()
        probs = grover_outcome_distribution(len(self.marked), self.marked, iterations)
        return sample_index(probs, rng)


@dataclass
class SearchResult:
    value: Optional[int]
    rounds: int
    oracle_calls: int  # iterations plus one verification per round


def run_unknown_count_search(engine, space_size: int, verify: Callable[[int], bool],
                             rng: np.random.Generator, max_rounds: int = 48,
                             budget: float | None = None) -> SearchResult:
    """Shared schedule: grow the iteration bound, measure, verify classically."""
    if budget is None:
        budget = math.inf
    spent = 0
    rounds = 0
    for bound in bbht_bounds(space_size):
        if rounds >= max_rounds or spent >= budget:
            break
        iterations = int(rng.integers(0, bound))
        value = engine.run(iterations, rng)
        spent += iterations + 1
        rounds += 1
        if verify(value):
            return SearchResult(value=value, rounds=rounds, oracle_calls=spent)
    return SearchResult(value=None, rounds=rounds, oracle_calls=spent)


def search_unknown_count(prep: GateSequence, marked, rng: np.random.Generator,
                         max_rounds: int = 48, *, layout, register: RegisterLike,
                         ledger: QueryLedger | None = None,
                         budget: float | None = None) -> Optional[int]:
    """Find a marked value of `register` under the given preparation, or None.

    `marked` is a predicate or boolean array over register values; it drives
    both the phase oracle and the classical re-check of measured candidates.
    """
    from .sim import PhaseOracleGate, register_qubits

    qubits = register_qubits(register)
    num_values = 1 << len(qubits)
    if callable(marked):
        marked_arr = np.fromiter(
            (bool(marked(v)) for v in range(num_values)), dtype=bool, count=num_values
        )
    else:
        marked_arr = np.asarray(marked, dtype=bool)
    engine = CircuitSearch(
        layout=layout,
        prep=prep,
        register=qubits,
        mark=PhaseOracleGate(qubits, marked_arr),
        ledger=ledger,
    )
    result = run_unknown_count_search(
        engine, num_values, lambda v: bool(marked_arr[v]), rng,
        max_rounds=max_rounds, budget=budget,
    )
    return result.value
