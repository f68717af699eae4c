"""Problem-specific tables and circuit inputs.

Builds the hit-indicator table (which samples fall at or below a loss
threshold for each parameter), the classical summaries derived from it, the
integer sum table used by the minimum-finding oracle, and the superposed
input state of the comparison circuit.

Cost semantics: constructing whole tables is simulator overhead and is
charged once to the ledger's setup counter; the model costs (one parallel
call per indicator write, N loss evaluations per classical check) are
charged where the algorithms incur them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ledger import QueryLedger
from .problem import ProblemInstance
from .sim import (
    MAX_QUBITS,
    BitOracleGate,
    GateSequence,
    HadamardGate,
    PstcLayout,
    ResourceLimitError,
    StateVector,
    XGate,
    new_zero_state,
    register_values,
)


@dataclass(frozen=True)
class CutoffTable:
    """Bit matrix: bits[i, j] == 1 iff loss(i, j) <= ell_threshold (and the
    optional parameter restriction holds for i)."""

    bits: np.ndarray  # (M, N) uint8, true (unpadded) sample count
    ell_threshold: float
    restriction: np.ndarray | None = None  # bool per parameter index

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.uint8)
        object.__setattr__(self, "bits", bits)
        if bits.ndim != 2:
            raise ValueError("bit matrix must be 2-D")

    @property
    def num_parameters(self) -> int:
        return self.bits.shape[0]

    @property
    def num_samples(self) -> int:
        return self.bits.shape[1]

    @property
    def theta_qubits(self) -> int:
        return int(math.log2(self.num_parameters))

    @property
    def sample_qubits(self) -> int:
        return max(0, math.ceil(math.log2(self.num_samples)))

    def padded_bits(self) -> np.ndarray:
        """Bits padded with zero columns up to the next power of two."""
        n_pad = 1 << self.sample_qubits
        if n_pad == self.num_samples:
            return self.bits
        out = np.zeros((self.num_parameters, n_pad), dtype=np.uint8)
        out[:, : self.num_samples] = self.bits
        return out


def build_cutoff_table(problem: ProblemInstance, ell_threshold: float,
                       restriction=None,
                       ledger: QueryLedger | None = None) -> CutoffTable:
    """Evaluate the indicator over the whole grid (charged as setup)."""
    if not np.isfinite(ell_threshold):
        raise ValueError("loss threshold must be finite")
    bits = (problem.losses <= ell_threshold).astype(np.uint8)
    restr_arr = None
    if restriction is not None:
        if callable(restriction):
            restr_arr = np.fromiter(
                (bool(restriction(i)) for i in range(problem.num_parameters)),
                dtype=bool,
                count=problem.num_parameters,
            )
        else:
            restr_arr = np.asarray(restriction, dtype=bool)
        bits = bits * restr_arr[:, None].astype(np.uint8)
    if ledger is not None:
        ledger.charge_setup(problem.num_parameters * problem.num_samples)
    return CutoffTable(bits=bits, ell_threshold=float(ell_threshold),
                       restriction=restr_arr)


def row_sum_fraction(table: CutoffTable, theta_index: int) -> float:
    """Fraction of samples at or below the threshold for one parameter."""
    return float(table.bits[theta_index].sum()) / table.num_samples


def row_sum_fractions(table: CutoffTable) -> np.ndarray:
    return table.bits.sum(axis=1).astype(float) / table.num_samples


def average_loss(problem: ProblemInstance, theta_index: int,
                 ledger: QueryLedger | None = None) -> float:
    """Mean loss of one parameter over the sample set (N classical queries)."""
    if ledger is not None:
        ledger.charge_classical(problem.num_samples)
    return float(problem.losses[theta_index].mean())


@dataclass(frozen=True)
class SumOracleTable:
    """Scaled integer row sums, sized for a value-oracle output register."""

    values: np.ndarray  # (M,) int64
    num_value_qubits: int
    scale: float


def build_sum_oracle(problem: ProblemInstance, scale: float,
                     ledger: QueryLedger | None = None,
                     qubit_budget: int | None = None) -> SumOracleTable:
    """Quantize row sums to integers: table[i] = round(scale * sum_j loss(i, j)).

    Output width is the smallest t with every value < 2**t (at least 1).
    Rounds half up; the encoding of real sums into qubits is our choice.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    sums = problem.losses.sum(axis=1)
    values = np.floor(sums * scale + 0.5).astype(np.int64)
    vmax = int(values.max(initial=0))
    t = max(1, math.ceil(math.log2(vmax + 1)))
    budget = qubit_budget if qubit_budget is not None else MAX_QUBITS - problem.theta_qubits
    if t > budget:
        raise ResourceLimitError(
            f"sum oracle needs {t} value qubits, budget is {budget}; lower the scale"
        )
    if ledger is not None:
        ledger.charge_setup(problem.num_parameters * problem.num_samples)
    return SumOracleTable(values=values, num_value_qubits=t, scale=float(scale))


def layout_for_table(table: CutoffTable) -> PstcLayout:
    return PstcLayout(n=table.sample_qubits, m=table.theta_qubits)


def indicator_oracle_values(table: CutoffTable) -> np.ndarray:
    """Flat indicator table indexed by (theta << n) | sample, zero-padded."""
    padded = table.padded_bits()
    return padded.reshape(-1).astype(np.int64)


def prep_sequence(layout: PstcLayout, table: CutoffTable,
                  theta_index: int | None = None) -> GateSequence:
    """Recorded input preparation of the comparison circuit.

    Uniform superposition over parameters (or a fixed basis parameter when
    `theta_index` is given), uniform sample index entangled with its
    indicator bit on side A, uniform sample index with a constant 1 flag on
    side B.
    """
    if layout.n != table.sample_qubits or layout.m != table.theta_qubits:
        raise ValueError("layout does not match the table dimensions")
    gates: list = []
    if theta_index is None:
        if layout.m:
            gates.append(HadamardGate(layout.theta.qubits))
    else:
        if not 0 <= theta_index < table.num_parameters:
            raise ValueError(f"parameter index {theta_index} out of range")
        set_bits = tuple(
            q for k, q in enumerate(layout.theta.qubits) if (theta_index >> k) & 1
        )
        if set_bits:
            gates.append(XGate(set_bits))
    if layout.n:
        gates.append(HadamardGate(layout.index_a.qubits))
    gates.append(
        BitOracleGate(
            in_register=layout.index_a.qubits + layout.theta.qubits,
            out_register=layout.flag_a.qubits,
            values=indicator_oracle_values(table),
        )
    )
    if layout.n:
        gates.append(HadamardGate(layout.index_b.qubits))
    gates.append(XGate(layout.flag_b.qubits))
    return GateSequence(gates)


def prepare_pstc_input(layout: PstcLayout, table: CutoffTable,
                       ledger: QueryLedger | None = None,
                       theta_index: int | None = None) -> StateVector:
    """Build the circuit input state; one parallel call regardless of N."""
    state = new_zero_state(layout)
    prep_sequence(layout, table, theta_index=theta_index).apply(state, ledger)
    return state


def state_overlaps(state: StateVector, layout: PstcLayout) -> np.ndarray:
    """Inner product of the two compared registers for every parameter.

    Reads the prepared (pre swap-test) state: for each parameter value the
    A-side block is proportional to its indicator state, so projecting onto
    the constant-flag side recovers the padded hit fraction exactly.
    """
    m_vals = 1 << layout.m
    n_pad = 1 << layout.n
    amps = state.amps
    theta_val = register_values(state, layout.theta)
    a_val = register_values(state, layout.reg_a)
    b_val = register_values(state, layout.reg_b)
    anc_val = register_values(state, layout.ancilla)
    # |psi> on the B side: uniform sample index with the flag bit set
    psi = np.zeros(1 << (layout.n + 1))
    psi[np.arange(n_pad) | (1 << layout.n)] = 1.0 / math.sqrt(n_pad)
    overlaps = np.zeros(m_vals)
    for theta in range(m_vals):
        sel = (theta_val == theta) & (anc_val == 0)
        block = np.zeros((1 << (layout.n + 1), 1 << (layout.n + 1)), dtype=np.complex128)
        block[a_val[sel], b_val[sel]] = amps[sel]
        # block = phi_theta psi^T / sqrt(M); psi is real and normalized
        phi = math.sqrt(m_vals) * (block @ psi)
        overlaps[theta] = float(np.real(phi @ psi))
    return overlaps
