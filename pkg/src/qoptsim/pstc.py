"""Cut-off optimizer built on the superposed swap-test circuit.

The circuit compares, for every parameter at once, the indicator state of
that parameter against a constant all-hits state. Measuring the parameter
register after post-selecting the ancilla on 0 samples good parameters with
probability proportional to 1/2 + 1/2 * (hit fraction)^2; amplitude
amplification boosts the mass of the region above a score threshold.

The amplified routine contains mid-circuit measurements in its one-shot
form; amplification is therefore run over the measurement-free prefix of
the circuit, with the good subspace defined as (ancilla = 0 AND parameter
in region), and the classical score check applied only to the final
measured candidate.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .amplify import CircuitSearch, grover_iterate, plan_iterations, run_unknown_count_search
from .ledger import QueryLedger
from .oracles import (
    CutoffTable,
    average_loss,
    build_cutoff_table,
    layout_for_table,
    prep_sequence,
    row_sum_fraction,
    row_sum_fractions,
)
from .problem import ProblemInstance
from .report import RunReport
from .sim import (
    ControlledSwapGate,
    GateSequence,
    HadamardGate,
    PhaseOracleGate,
    PstcLayout,
    StateVector,
    marginal_probability,
    measure,
    new_zero_state,
    register_values,
)

log = logging.getLogger(__name__)

SCORE_FLOOR = 0.5


class EmptyRegionError(RuntimeError):
    """No parameter reaches the score threshold; lower it and retry."""


class RetryExhaustedError(RuntimeError):
    """The ancilla kept reading 1; the loss threshold is pathological."""


@dataclass
class PstcConfig:
    xi_mode: str = "adaptive"  # "static" | "adaptive"
    p_mode: str = "exact"  # "exact" | "unknown"
    outer_rounds: int | None = None  # default ceil(log2 M), at least 1
    restart_cap: int = 64
    ell_threshold: float | None = None  # force the loss threshold
    threshold_mode: str = "full"  # "full" | "sampled"
    threshold_sample_count: int = 8
    xi_threshold: float | None = None  # force the score threshold

    def __post_init__(self):
        if self.xi_mode not in ("static", "adaptive"):
            raise ValueError(f"unknown xi_mode {self.xi_mode!r}")
        if self.p_mode not in ("exact", "unknown"):
            raise ValueError(f"unknown p_mode {self.p_mode!r}")
        if self.outer_rounds is not None and self.outer_rounds < 1:
            raise ValueError("outer_rounds must be at least 1")
        if self.restart_cap < 1:
            raise ValueError("restart_cap must be at least 1")


@dataclass(frozen=True)
class ThetaCandidate:
    theta_index: int
    flag: int
    xi: float


def swap_score(table: CutoffTable, theta_index: int,
               ledger: QueryLedger | None = None) -> float:
    """Classical score 1/2 + 1/2 * (hit fraction)^2; costs N loss queries."""
    if not 0 <= theta_index < table.num_parameters:
        raise IndexError(f"parameter index {theta_index} out of range")
    if ledger is not None:
        ledger.charge_classical(table.num_samples)
    frac = row_sum_fraction(table, theta_index)
    return 0.5 + 0.5 * frac * frac


def swap_scores(table: CutoffTable) -> np.ndarray:
    """Score of every parameter (simulator-side table, no model charge)."""
    frac = row_sum_fractions(table)
    return 0.5 + 0.5 * frac * frac


def check_fraction(table: CutoffTable, theta_index: int,
                   ledger: QueryLedger | None = None) -> float:
    """Hit fraction of one parameter, charged as a classical check."""
    if ledger is not None:
        ledger.charge_classical(table.num_samples)
    return row_sum_fraction(table, theta_index)


def swap_circuit_sequence(layout: PstcLayout, table: CutoffTable,
                          theta_index: int | None = None) -> GateSequence:
    """Full measurement-free circuit: input prep, then the swap test."""
    prep = prep_sequence(layout, table, theta_index=theta_index)
    return GateSequence(
        prep.gates
        + (
            HadamardGate(layout.ancilla.qubits),
            ControlledSwapGate(layout.ancilla, layout.reg_a, layout.reg_b),
            HadamardGate(layout.ancilla.qubits),
        )
    )


def run_swap_circuit(table: CutoffTable, layout: PstcLayout | None = None,
                     ledger: QueryLedger | None = None,
                     theta_index: int | None = None) -> StateVector:
    """Run the circuit up to (not including) measurement; one circuit run."""
    if layout is None:
        layout = layout_for_table(table)
    state = new_zero_state(layout)
    swap_circuit_sequence(layout, table, theta_index=theta_index).apply(state, ledger)
    if ledger is not None:
        ledger.circuit_runs += 1
    return state


def ancilla_zero_probability(state: StateVector, layout: PstcLayout) -> float:
    return float(marginal_probability(state, layout.ancilla)[0])


def conditional_theta_distribution(state: StateVector,
                                   layout: PstcLayout) -> np.ndarray:
    """Exact distribution of the parameter register given ancilla = 0."""
    joint_reg = layout.ancilla.qubits + layout.theta.qubits
    joint = marginal_probability(state, joint_reg)
    anc0 = joint[::2]  # ancilla is the low bit of the joint value
    total = anc0.sum()
    if total <= 0:
        raise RuntimeError("ancilla never reads 0; degenerate circuit state")
    return anc0 / total


def _good_region_gate(layout: PstcLayout, region_mask: np.ndarray) -> PhaseOracleGate:
    """Phase oracle marking (ancilla = 0) AND (parameter in region)."""
    joint_reg = layout.ancilla.qubits + layout.theta.qubits
    values = np.arange(1 << (layout.m + 1))
    good = ((values & 1) == 0) & region_mask[values >> 1]
    return PhaseOracleGate(joint_reg, good)


def _good_probability(state: StateVector, layout: PstcLayout,
                      region_mask: np.ndarray) -> float:
    joint = marginal_probability(state, layout.ancilla.qubits + layout.theta.qubits)
    values = np.arange(len(joint))
    good = ((values & 1) == 0) & region_mask[values >> 1]
    return float(joint[good].sum())


def sample_candidate(table: CutoffTable, layout: PstcLayout, xi_threshold: float,
                     rng: np.random.Generator, restart_cap: int = 64,
                     ledger: QueryLedger | None = None) -> ThetaCandidate:
    """One-shot sampling: run the circuit, restart while the ancilla reads 1,
    then measure the parameter register and score it classically."""
    for _ in range(restart_cap):
        state = run_swap_circuit(table, layout, ledger)
        if measure(state, layout.ancilla, rng).value == 1:
            continue
        theta = measure(state, layout.theta, rng).value
        xi = swap_score(table, theta, ledger)
        return ThetaCandidate(theta_index=theta, flag=int(xi >= xi_threshold), xi=xi)
    raise RetryExhaustedError(
        f"ancilla read 1 in {restart_cap} consecutive runs; "
        "the loss threshold admits almost nothing"
    )


def amplified_search(table: CutoffTable, layout: PstcLayout, xi_threshold: float,
                     rng: np.random.Generator, config: PstcConfig | None = None,
                     ledger: QueryLedger | None = None) -> int:
    """Amplify the mass of the above-threshold region, measure, verify.

    Returns a parameter index from the region with probability close to 1
    when the region is non-empty; raises EmptyRegionError otherwise.
    """
    if config is None:
        config = PstcConfig()
    scores = swap_scores(table)
    region = scores >= xi_threshold
    if not region.any():
        raise EmptyRegionError(f"no parameter scores at least {xi_threshold}")

    prep = swap_circuit_sequence(layout, table)
    mark = _good_region_gate(layout, region)

    def attempt_exact() -> int | None:
        state = new_zero_state(layout)
        prep.apply(state, ledger)
        if ledger is not None:
            ledger.circuit_runs += 1
        p = _good_probability(state, layout, region)
        for _ in range(plan_iterations(p).iterations):
            grover_iterate(state, mark, prep, ledger)
        if measure(state, layout.ancilla, rng).value == 1:
            return None  # outside the good subspace; restart
        return measure(state, layout.theta, rng).value

    last = None
    if config.p_mode == "exact":
        for _ in range(config.restart_cap):
            candidate = attempt_exact()
            if candidate is None:
                continue
            last = candidate
            xi = swap_score(table, last, ledger)
            if xi >= xi_threshold:
                return last
    else:
        engine = CircuitSearch(
            layout=layout, prep=prep,
            register=layout.ancilla.qubits + layout.theta.qubits,
            mark=mark, ledger=ledger,
        )

        def verify(joint_value: int) -> bool:
            if joint_value & 1:
                return False
            xi = swap_score(table, joint_value >> 1, ledger)
            return xi >= xi_threshold

        result = run_unknown_count_search(
            engine, 1 << (layout.m + 1), verify, rng,
            max_rounds=config.restart_cap,
        )
        if result.value is not None:
            return result.value >> 1
        last = engine.run(0, rng) >> 1
    if last is None:
        raise RetryExhaustedError(
            f"ancilla read 1 in {config.restart_cap} amplification attempts"
        )
    log.warning("amplified search retries exhausted; returning last candidate")
    return int(last)


def pstc_search(problem: ProblemInstance, rng: np.random.Generator,
                config: PstcConfig | None = None,
                ledger: QueryLedger | None = None) -> RunReport:
    """Full cut-off optimizer: pick thresholds, then alternate amplified
    candidate search with classical fraction checks, keeping the best."""
    start = time.perf_counter()
    if config is None:
        config = PstcConfig()
    if ledger is None:
        ledger = QueryLedger()
    m_count = problem.num_parameters
    n = problem.num_samples

    best = int(rng.integers(m_count))
    theta_ref = int(rng.integers(m_count))
    if config.ell_threshold is not None:
        ell = float(config.ell_threshold)
    elif config.threshold_mode == "sampled":
        k = min(n, config.threshold_sample_count)
        picks = rng.choice(n, size=k, replace=False)
        ledger.charge_classical(k)
        ell = float(problem.losses[theta_ref, picks].mean())
    else:
        ell = average_loss(problem, theta_ref, ledger)

    table = build_cutoff_table(problem, ell, ledger=ledger)
    layout = layout_for_table(table)
    xi_threshold = config.xi_threshold
    if xi_threshold is None:
        xi_threshold = swap_score(table, theta_ref, ledger)
    best_fraction = check_fraction(table, best, ledger)

    rounds = config.outer_rounds
    if rounds is None:
        rounds = max(1, math.ceil(math.log2(m_count))) if m_count > 1 else 1
    per_round_iterations: list[int] = []

    if m_count > 1:
        for _ in range(rounds):
            before = ledger.snapshot()
            try:
                candidate = amplified_search(
                    table, layout, xi_threshold, rng, config, ledger
                )
            except EmptyRegionError:
                log.warning("score region empty; keeping the current best")
                per_round_iterations.append(0)
                continue
            per_round_iterations.append(ledger.diff(before)["boost_iterations"])
            frac = check_fraction(table, candidate, ledger)
            if frac >= best_fraction:
                best, best_fraction = candidate, frac
                if config.xi_mode == "adaptive":
                    xi_threshold = max(xi_threshold, 0.5 + 0.5 * frac * frac)

    elapsed_ms = (time.perf_counter() - start) * 1000.0
    return RunReport(
        algorithm="pstc",
        seed=None,
        chosen_index=best + 1,
        L_avg_at_chosen=average_loss(problem, best, ledger),
        L_pstc_at_chosen=best_fraction,
        ledger=ledger.snapshot(),
        wall_time_ms=elapsed_ms,
        details={
            "ell_threshold": ell,
            "xi_threshold_final": xi_threshold,
            "per_round_iterations": per_round_iterations,
        },
    )
