"""Dense statevector simulator for small register-structured circuits.

Conventions used throughout the package:

* qubit 0 is the least-significant bit of a basis-state index;
* a register's value is read with its first qubit as the LSB;
* gates mutate the state in place and return it, so calls can be chained;
* probabilities are computed exactly from amplitudes, sampling is reserved
  for end-to-end algorithm runs.

Everything here is an involution or a permutation/phase gate, which keeps
recorded circuits trivially invertible (see `GateSequence`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

MAX_QUBITS = 26
NORM_ATOL = 1e-10

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


class LayoutError(ValueError):
    """A register reference does not fit the state it is applied to."""


class ResourceLimitError(RuntimeError):
    """The requested state exceeds the desk-scale memory guard."""


@dataclass(frozen=True)
class Register:
    """A contiguous block of qubits with a name."""

    name: str
    start: int
    size: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(range(self.start, self.start + self.size))

    @property
    def num_values(self) -> int:
        return 1 << self.size


RegisterLike = Union[Register, Sequence[int], int]


def register_qubits(register: RegisterLike) -> tuple[int, ...]:
    """Normalize a register-like argument to an explicit qubit tuple."""
    if isinstance(register, Register):
        return register.qubits
    if isinstance(register, (int, np.integer)):
        return (int(register),)
    return tuple(int(q) for q in register)


class RegisterLayout:
    """Named, disjoint registers covering all qubits of a state."""

    def __init__(self, registers: Sequence[Register]):
        self.registers = tuple(registers)
        seen: set[int] = set()
        for reg in self.registers:
            if reg.size < 0 or reg.start < 0:
                raise LayoutError(f"bad register spec: {reg}")
            qs = set(reg.qubits)
            if qs & seen:
                raise LayoutError(f"register {reg.name} overlaps another register")
            seen |= qs
        self.num_qubits = sum(r.size for r in self.registers)
        if seen != set(range(self.num_qubits)):
            raise LayoutError("registers must cover qubits 0..Q-1 exactly")
        self._by_name = {r.name: r for r in self.registers}

    @classmethod
    def from_sizes(cls, sizes: Sequence[tuple[str, int]]) -> "RegisterLayout":
        regs = []
        start = 0
        for name, size in sizes:
            regs.append(Register(name, start, size))
            start += size
        return cls(regs)

    def __getitem__(self, name: str) -> Register:
        return self._by_name[name]

    def __contains__(self, name: str) -> bool:
        return name in self._by_name


class PstcLayout(RegisterLayout):
    """Wire layout of the superposed swap-test circuit.

    Register order (LSB first): 1 ancilla, n+1 qubits for the first compared
    register (sample index + indicator flag), n+1 for the second (sample
    index + constant flag), m qubits for the parameter index.
    Total Q = 2n + m + 3.
    """

    def __init__(self, n: int, m: int):
        if n < 0 or m < 0:
            raise LayoutError("register widths must be non-negative")
        super().__init__(
            RegisterLayout.from_sizes(
                [
                    ("ancilla", 1),
                    ("index_a", n),
                    ("flag_a", 1),
                    ("index_b", n),
                    ("flag_b", 1),
                    ("theta", m),
                ]
            ).registers
        )
        self.n = n
        self.m = m
        # full (n+1)-qubit spans exchanged by the controlled swap
        self.reg_a = Register("reg_a", 1, n + 1)
        self.reg_b = Register("reg_b", n + 2, n + 1)

    @property
    def ancilla(self) -> Register:
        return self["ancilla"]

    @property
    def index_a(self) -> Register:
        return self["index_a"]

    @property
    def flag_a(self) -> Register:
        return self["flag_a"]

    @property
    def index_b(self) -> Register:
        return self["index_b"]

    @property
    def flag_b(self) -> Register:
        return self["flag_b"]

    @property
    def theta(self) -> Register:
        return self["theta"]


class StateVector:
    """Complex amplitude vector over 2**num_qubits basis states."""

    __slots__ = ("amps", "num_qubits")

    def __init__(self, amps: np.ndarray, num_qubits: int):
        amps = np.asarray(amps, dtype=np.complex128)
        if amps.shape != (1 << num_qubits,):
            raise LayoutError(
                f"amplitude vector of length {amps.shape} does not match "
                f"{num_qubits} qubits"
            )
        self.amps = amps
        self.num_qubits = num_qubits

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits

    def copy(self) -> "StateVector":
        return StateVector(self.amps.copy(), self.num_qubits)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amps) ** 2)))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def assert_normalized(self, atol: float = NORM_ATOL) -> None:
        if abs(self.norm() - 1.0) > atol:
            raise AssertionError(f"state norm {self.norm()} deviates from 1")


def new_zero_state(layout) -> StateVector:
    """All-zeros basis state for a layout (anything with .num_qubits)."""
    q = int(layout.num_qubits)
    if q > MAX_QUBITS:
        raise ResourceLimitError(
            f"{q} qubits exceeds the {MAX_QUBITS}-qubit memory guard"
        )
    amps = np.zeros(1 << q, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(amps, q)


def _check_qubits(state: StateVector, qubits: Sequence[int]) -> None:
    for q in qubits:
        if not 0 <= q < state.num_qubits:
            raise LayoutError(f"qubit {q} outside 0..{state.num_qubits - 1}")
    if len(set(qubits)) != len(qubits):
        raise LayoutError(f"duplicate qubits in register {qubits}")


_INDEX_CACHE: dict[int, np.ndarray] = {}


def _indices(dim: int) -> np.ndarray:
    arr = _INDEX_CACHE.get(dim)
    if arr is None:
        arr = np.arange(dim, dtype=np.int64)
        _INDEX_CACHE[dim] = arr
    return arr


def register_values(state_or_qubits, register: RegisterLike) -> np.ndarray:
    """Value of `register` for every basis index, LSB-first."""
    if isinstance(state_or_qubits, StateVector):
        dim = state_or_qubits.dim
    else:
        dim = 1 << int(state_or_qubits)
    qubits = register_qubits(register)
    idx = _indices(dim)
    if not qubits:
        return np.zeros(dim, dtype=np.int64)
    if _is_contiguous(qubits):
        mask = (1 << len(qubits)) - 1
        return (idx >> qubits[0]) & mask
    val = np.zeros(dim, dtype=np.int64)
    for k, q in enumerate(qubits):
        val |= ((idx >> q) & 1) << k
    return val


def _is_contiguous(qubits: tuple[int, ...]) -> bool:
    return all(qubits[k] == qubits[0] + k for k in range(len(qubits)))


def _h_one(amps: np.ndarray, qubit: int) -> None:
    a = amps.reshape(-1, 2, 1 << qubit)
    lo = a[:, 0, :].copy()
    hi = a[:, 1, :].copy()
    a[:, 0, :] = (lo + hi) * _INV_SQRT2
    a[:, 1, :] = (lo - hi) * _INV_SQRT2


def apply_hadamard(state: StateVector, register: RegisterLike) -> StateVector:
    """Hadamard on every qubit of the register."""
    qubits = register_qubits(register)
    _check_qubits(state, qubits)
    for q in qubits:
        _h_one(state.amps, q)
    return state


def apply_x(state: StateVector, qubit: RegisterLike) -> StateVector:
    """Bit flip on one qubit (or each qubit of a register)."""
    qubits = register_qubits(qubit)
    _check_qubits(state, qubits)
    for q in qubits:
        a = state.amps.reshape(-1, 2, 1 << q)
        a[:, :, :] = a[:, ::-1, :]
    return state


def _deposit(values: np.ndarray, qubits: tuple[int, ...]) -> np.ndarray:
    if _is_contiguous(qubits):
        return values << qubits[0]
    out = np.zeros_like(values)
    for k, q in enumerate(qubits):
        out |= ((values >> k) & 1) << q
    return out


def _field_mask(qubits: tuple[int, ...]) -> int:
    mask = 0
    for q in qubits:
        mask |= 1 << q
    return mask


def cswap_permutation(num_qubits: int, control: RegisterLike,
                      reg_a: RegisterLike, reg_b: RegisterLike) -> np.ndarray:
    """Basis permutation of a register-wise controlled swap."""
    ctrl = register_qubits(control)
    qa = register_qubits(reg_a)
    qb = register_qubits(reg_b)
    if len(ctrl) != 1:
        raise LayoutError("controlled swap takes a single control qubit")
    if len(qa) != len(qb):
        raise LayoutError("swapped registers must have equal size")
    if set(qa) & set(qb) or ctrl[0] in qa or ctrl[0] in qb:
        raise LayoutError("control and swapped registers must be disjoint")
    dim = 1 << num_qubits
    idx = _indices(dim)
    a_val = register_values(num_qubits, qa)
    b_val = register_values(num_qubits, qb)
    cleared = idx & ~np.int64(_field_mask(qa) | _field_mask(qb))
    swapped = cleared | _deposit(b_val, qa) | _deposit(a_val, qb)
    on = (idx >> ctrl[0]) & 1
    return np.where(on == 1, swapped, idx)


def apply_controlled_swap(state: StateVector, control: RegisterLike,
                          reg_a: RegisterLike, reg_b: RegisterLike) -> StateVector:
    """Qubit-wise swap of reg_a and reg_b on the control=1 branch."""
    for q in register_qubits(control) + register_qubits(reg_a) + register_qubits(reg_b):
        if not 0 <= q < state.num_qubits:
            raise LayoutError(f"qubit {q} outside the state")
    perm = cswap_permutation(state.num_qubits, control, reg_a, reg_b)
    state.amps = state.amps[perm]  # involution, so perm == its inverse
    return state


def _xor_shift(num_qubits: int, in_register: RegisterLike,
               out_register: RegisterLike, values: np.ndarray) -> np.ndarray:
    in_q = register_qubits(in_register)
    out_q = register_qubits(out_register)
    if set(in_q) & set(out_q):
        raise LayoutError("oracle input and output registers must be disjoint")
    values = np.asarray(values, dtype=np.int64)
    if values.shape != (1 << len(in_q),):
        raise LayoutError(
            f"oracle table of length {values.shape} does not match "
            f"{len(in_q)} input qubits"
        )
    if values.size and (values.min() < 0 or values.max() >= (1 << len(out_q))):
        raise LayoutError("oracle table values exceed the output register")
    in_val = register_values(num_qubits, in_q)
    return _deposit(values[in_val], out_q)


def apply_bit_oracle(state: StateVector, in_register: RegisterLike,
                     out_qubit: RegisterLike, table: Sequence[int]) -> StateVector:
    """XOR a classical bit table into one output qubit: |v>|b> -> |v>|b ^ t[v]>."""
    out_q = register_qubits(out_qubit)
    if len(out_q) != 1:
        raise LayoutError("bit oracle writes a single qubit")
    return apply_value_oracle(state, in_register, out_q, table)


def apply_value_oracle(state: StateVector, in_register: RegisterLike,
                       out_register: RegisterLike,
                       values: Sequence[int]) -> StateVector:
    """XOR a classical value table into the output register (a permutation)."""
    xor = _xor_shift(state.num_qubits, in_register, out_register, np.asarray(values))
    idx = _indices(state.dim)
    state.amps = state.amps[idx ^ xor]  # XOR write is an involution
    return state


def _marked_array(marked, num_values: int) -> np.ndarray:
    if callable(marked):
        return np.fromiter(
            (bool(marked(v)) for v in range(num_values)), dtype=bool, count=num_values
        )
    arr = np.asarray(marked, dtype=bool)
    if arr.shape != (num_values,):
        raise LayoutError(
            f"marked array of shape {arr.shape} does not match {num_values} values"
        )
    return arr


def apply_phase_oracle(state: StateVector, register: RegisterLike,
                       marked) -> StateVector:
    """Flip the sign of every basis state whose register value is marked.

    `marked` is a predicate over register values or a boolean array of
    length 2**|register|.
    """
    qubits = register_qubits(register)
    _check_qubits(state, qubits)
    arr = _marked_array(marked, 1 << len(qubits))
    val = register_values(state, qubits)
    state.amps[arr[val]] *= -1.0
    return state


def apply_reflect_zero(state: StateVector, register: RegisterLike) -> StateVector:
    """Keep register value 0, negate every other value (diag(1,-1,...,-1))."""
    qubits = register_qubits(register)
    _check_qubits(state, qubits)
    val = register_values(state, qubits)
    state.amps[val != 0] *= -1.0
    return state


def marginal_probability(state: StateVector, register: RegisterLike) -> np.ndarray:
    """Exact Born-rule marginal over the register, without collapse."""
    qubits = register_qubits(register)
    _check_qubits(state, qubits)
    val = register_values(state, qubits)
    return np.bincount(val, weights=state.probabilities(), minlength=1 << len(qubits))


def sample_index(probs: np.ndarray, rng: np.random.Generator) -> int:
    """Draw an index from a probability vector via one uniform variate.

    Shared by statevector measurement and the closed-form search engine so
    that both consume the RNG identically.
    """
    total = probs.sum()
    cum = np.cumsum(probs / total)
    u = rng.random()
    value = int(np.searchsorted(cum, u, side="right"))
    value = min(value, len(probs) - 1)
    while probs[value] == 0.0 and value > 0:
        value -= 1
    return value


@dataclass
class MeasurementOutcome:
    value: int
    posterior: StateVector
    probability: float


def measure(state: StateVector, register: RegisterLike,
            rng: np.random.Generator) -> MeasurementOutcome:
    """Projective measurement of a register; collapses the state in place."""
    qubits = register_qubits(register)
    probs = marginal_probability(state, qubits)
    value = sample_index(probs, rng)
    val = register_values(state, qubits)
    state.amps[val != value] = 0.0
    state.amps /= math.sqrt(probs[value])
    return MeasurementOutcome(value=value, posterior=state, probability=float(probs[value]))


# --- recorded gates -------------------------------------------------------
#
# Prep circuits are stored as gate lists so that reflections about the
# prepared state can be applied exactly: every gate below is self-inverse,
# hence inverting a sequence is just replaying it in reverse order.


class Gate:
    def apply(self, state: StateVector, ledger=None) -> StateVector:
        raise NotImplementedError


@dataclass(frozen=True)
class HadamardGate(Gate):
    register: tuple[int, ...]

    def apply(self, state, ledger=None):
        return apply_hadamard(state, self.register)


@dataclass(frozen=True)
class XGate(Gate):
    register: tuple[int, ...]

    def apply(self, state, ledger=None):
        return apply_x(state, self.register)


class ControlledSwapGate(Gate):
    def __init__(self, control: RegisterLike, reg_a: RegisterLike, reg_b: RegisterLike):
        self.control = register_qubits(control)
        self.reg_a = register_qubits(reg_a)
        self.reg_b = register_qubits(reg_b)
        self._perm: np.ndarray | None = None

    def apply(self, state, ledger=None):
        if self._perm is None or len(self._perm) != state.dim:
            self._perm = cswap_permutation(
                state.num_qubits, self.control, self.reg_a, self.reg_b
            )
        state.amps = state.amps[self._perm]
        return state


class BitOracleGate(Gate):
    """XOR-writes a classical table; each application is one parallel call."""

    def __init__(self, in_register: RegisterLike, out_register: RegisterLike,
                 values: Sequence[int]):
        self.in_register = register_qubits(in_register)
        self.out_register = register_qubits(out_register)
        self.values = np.asarray(values, dtype=np.int64)
        self._xor: np.ndarray | None = None

    def apply(self, state, ledger=None):
        if self._xor is None or len(self._xor) != state.dim:
            self._xor = _xor_shift(
                state.num_qubits, self.in_register, self.out_register, self.values
            )
        idx = _indices(state.dim)
        state.amps = state.amps[idx ^ self._xor]
        if ledger is not None:
            ledger.quantum_parallel_calls += 1
        return state


class PhaseOracleGate(Gate):
    def __init__(self, register: RegisterLike, marked):
        self.register = register_qubits(register)
        self.marked = _marked_array(marked, 1 << len(self.register))
        self._mask: np.ndarray | None = None

    def apply(self, state, ledger=None):
        if self._mask is None or len(self._mask) != state.dim:
            val = register_values(state.num_qubits, self.register)
            self._mask = self.marked[val]
        state.amps[self._mask] *= -1.0
        return state


class ReflectZeroGate(Gate):
    def __init__(self, register: RegisterLike):
        self.register = register_qubits(register)
        self._mask: np.ndarray | None = None

    def apply(self, state, ledger=None):
        if self._mask is None or len(self._mask) != state.dim:
            val = register_values(state.num_qubits, self.register)
            self._mask = val != 0
        state.amps[self._mask] *= -1.0
        return state


class GateSequence:
    """An ordered, invertible list of self-inverse gates."""

    def __init__(self, gates: Sequence[Gate]):
        self.gates = tuple(gates)

    def apply(self, state: StateVector, ledger=None) -> StateVector:
        for g in self.gates:
            g.apply(state, ledger)
        return state

    def apply_inverse(self, state: StateVector, ledger=None) -> StateVector:
        for g in reversed(self.gates):
            g.apply(state, ledger)
        return state

    def __len__(self) -> int:
        return len(self.gates)
