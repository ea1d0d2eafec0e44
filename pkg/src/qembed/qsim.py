"""Statevector simulator: state construction, gate application, readout.

Qubit indices are 0-based little-endian: qubit 0 is the least significant
bit of a basis-state index.  States that never entangle (products of
single-qubit states) are kept as per-qubit factors in O(n) memory and only
expanded to the dense 2^n amplitude array when an entangling gate or a
full-probability readout forces it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DuplicateQubitIndex,
    IndexOutOfRange,
    NonFiniteAngle,
    QubitCapExceeded,
)

DEFAULT_MAX_QUBITS = 24

DENSE = "dense"
PRODUCT = "product"

_NORM_TOL = 1e-9


class StateVector:
    """Immutable n-qubit pure state.

    layout "dense": `_data` holds the 2^n complex amplitudes.
    layout "product": `_data` is an (n, 2) array of per-qubit factors,
    each row a normalized single-qubit state; the equivalent dense
    amplitude at index i is the product of `_data[q, bit(i, q)]` over q.
    """

    __slots__ = ("n_qubits", "layout", "_data")

    def __init__(self, n_qubits: int, data: np.ndarray, layout: str):
        data = np.ascontiguousarray(data, dtype=complex)
        if not np.all(np.isfinite(data.view(float))):
            raise ValueError("state amplitudes must be finite")
        if layout == DENSE:
            if data.shape != (1 << n_qubits,):
                raise ValueError("dense amplitude count must be 2^n_qubits")
            if abs(np.sum(np.abs(data) ** 2) - 1.0) > _NORM_TOL:
                raise ValueError("state is not normalized")
        elif layout == PRODUCT:
            if data.shape != (n_qubits, 2):
                raise ValueError("product layout needs one 2-amplitude factor per qubit")
            norms = np.sum(np.abs(data) ** 2, axis=1)
            if np.any(np.abs(norms - 1.0) > _NORM_TOL):
                raise ValueError("every product factor must be normalized")
        else:
            raise ValueError(f"unknown layout {layout!r}")
        data.setflags(write=False)
        object.__setattr__(self, "n_qubits", n_qubits)
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "_data", data)

    def __setattr__(self, name, value):
        raise AttributeError("StateVector is immutable")

    @property
    def amps(self) -> np.ndarray:
        """Dense amplitude array of length 2^n (expands product layout)."""
        if self.layout == DENSE:
            return self._data
        amps = self._data[self.n_qubits - 1]
        for q in range(self.n_qubits - 2, -1, -1):
            amps = np.kron(amps, self._data[q])
        amps.setflags(write=False)
        return amps

    @property
    def factors(self) -> np.ndarray | None:
        """(n, 2) per-qubit factors, or None for dense layout."""
        return self._data if self.layout == PRODUCT else None

    def to_dense(self) -> "StateVector":
        if self.layout == DENSE:
            return self
        return StateVector(self.n_qubits, self.amps, DENSE)

    def __repr__(self):
        return f"StateVector(n_qubits={self.n_qubits}, layout={self.layout!r})"


def new_zero_state(n_qubits: int, max_qubits: int = DEFAULT_MAX_QUBITS) -> StateVector:
    """All-qubits-|0> state in product layout."""
    if not 1 <= n_qubits <= max_qubits:
        raise QubitCapExceeded(f"n_qubits={n_qubits} outside [1, {max_qubits}]")
    factors = np.zeros((n_qubits, 2), dtype=complex)
    factors[:, 0] = 1.0
    return StateVector(n_qubits, factors, PRODUCT)


def from_amplitudes(amps, max_qubits: int = DEFAULT_MAX_QUBITS) -> StateVector:
    """Dense state from a full 2^n amplitude array (must be normalized)."""
    amps = np.asarray(amps, dtype=complex)
    n = int(round(math.log2(amps.size)))
    if 1 << n != amps.size or n < 1:
        raise ValueError("amplitude count must be a power of two >= 2")
    if n > max_qubits:
        raise QubitCapExceeded(f"n_qubits={n} exceeds cap {max_qubits}")
    return StateVector(n, amps, DENSE)


# --- single-qubit gates -------------------------------------------------------

def _check_angle(theta: float) -> float:
    theta = float(theta)
    if not math.isfinite(theta):
        raise NonFiniteAngle(f"angle {theta!r} is not finite")
    return theta


def rx_gate(theta: float) -> np.ndarray:
    """Rotation about the X axis: [[cos(t/2), -i sin(t/2)], [-i sin(t/2), cos(t/2)]]."""
    theta = _check_angle(theta)
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def ry_gate(theta: float) -> np.ndarray:
    """Rotation about the Y axis: [[cos(t/2), -sin(t/2)], [sin(t/2), cos(t/2)]]."""
    theta = _check_angle(theta)
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz_gate(theta: float) -> np.ndarray:
    """Rotation about the Z axis: diag(e^{-it/2}, e^{it/2})."""
    theta = _check_angle(theta)
    return np.array(
        [[np.exp(-0.5j * theta), 0.0], [0.0, np.exp(0.5j * theta)]], dtype=complex
    )


def hadamard() -> np.ndarray:
    """H = (1/sqrt 2) [[1, 1], [1, -1]]."""
    return np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def pauli_x() -> np.ndarray:
    """Bit flip X = [[0, 1], [1, 0]]."""
    return np.array([[0, 1], [1, 0]], dtype=complex)


def s_gate() -> np.ndarray:
    """Phase gate S = diag(1, i)."""
    return np.array([[1, 0], [0, 1j]], dtype=complex)


def is_unitary(gate: np.ndarray, tol: float = 1e-9) -> bool:
    gate = np.asarray(gate, dtype=complex)
    if gate.shape != (2, 2):
        return False
    return bool(np.all(np.abs(gate @ gate.conj().T - np.eye(2)) <= tol))


# --- circuit operations -------------------------------------------------------

SINGLE = "single"
CNOT = "cnot"
SWAP = "swap"
TOFFOLI = "toffoli"


@dataclass(frozen=True)
class CircuitOp:
    """One gate application: a 1-qubit unitary or cnot/swap/toffoli."""

    kind: str
    qubits: tuple[int, ...]
    gate: np.ndarray | None = None

    @staticmethod
    def single(gate: np.ndarray, target: int) -> "CircuitOp":
        gate = np.asarray(gate, dtype=complex)
        if gate.shape != (2, 2):
            raise ValueError("single-qubit gate must be a 2x2 matrix")
        return CircuitOp(SINGLE, (target,), gate)

    @staticmethod
    def cnot(control: int, target: int) -> "CircuitOp":
        return CircuitOp(CNOT, (control, target))

    @staticmethod
    def swap(a: int, b: int) -> "CircuitOp":
        return CircuitOp(SWAP, (a, b))

    @staticmethod
    def toffoli(control1: int, control2: int, target: int) -> "CircuitOp":
        return CircuitOp(TOFFOLI, (control1, control2, target))


def _check_qubits(op: CircuitOp, n_qubits: int) -> None:
    for q in op.qubits:
        if not 0 <= q < n_qubits:
            raise IndexOutOfRange(f"qubit {q} out of range for {n_qubits}-qubit state")
    if len(set(op.qubits)) != len(op.qubits):
        raise DuplicateQubitIndex(f"duplicate qubit index in {op.qubits}")


def _axis(n_qubits: int, qubit: int) -> int:
    # reshape([2]*n) puts the most significant bit on axis 0
    return n_qubits - 1 - qubit


def _apply_single_dense(amps: np.ndarray, gate: np.ndarray, qubit: int, n: int) -> np.ndarray:
    # Pairs (i, i | 1<<qubit) with the qubit bit clear/set are mixed by the
    # 2x2 matrix; the reshape exposes those pairs as two slices of one axis.
    psi = amps.reshape([2] * n)
    axis = _axis(n, qubit)
    lo = np.take(psi, 0, axis=axis)
    hi = np.take(psi, 1, axis=axis)
    out = np.empty_like(psi)
    sel0 = [slice(None)] * n
    sel1 = [slice(None)] * n
    sel0[axis] = 0
    sel1[axis] = 1
    out[tuple(sel0)] = gate[0, 0] * lo + gate[0, 1] * hi
    out[tuple(sel1)] = gate[1, 0] * lo + gate[1, 1] * hi
    return out.reshape(-1)


def _slices(n: int, assignments: dict[int, int]) -> tuple:
    sel = [slice(None)] * n
    for axis, bit in assignments.items():
        sel[axis] = bit
    return tuple(sel)


def apply(state: StateVector, op: CircuitOp) -> StateVector:
    """Apply one operation, returning a new state.

    Single-qubit gates keep a product-layout state in product layout;
    cnot/swap/toffoli force dense layout first.
    """
    n = state.n_qubits
    _check_qubits(op, n)

    if op.kind == SINGLE:
        target = op.qubits[0]
        if state.layout == PRODUCT:
            factors = state._data.copy()
            factors[target] = op.gate @ factors[target]
            return StateVector(n, factors, PRODUCT)
        return StateVector(n, _apply_single_dense(state.amps, op.gate, target, n), DENSE)

    amps = state.amps.copy()
    psi = amps.reshape([2] * n)
    if op.kind == CNOT:
        c, t = (_axis(n, q) for q in op.qubits)
        a = psi[_slices(n, {c: 1, t: 0})].copy()
        psi[_slices(n, {c: 1, t: 0})] = psi[_slices(n, {c: 1, t: 1})]
        psi[_slices(n, {c: 1, t: 1})] = a
    elif op.kind == SWAP:
        a_ax, b_ax = (_axis(n, q) for q in op.qubits)
        tmp = psi[_slices(n, {a_ax: 0, b_ax: 1})].copy()
        psi[_slices(n, {a_ax: 0, b_ax: 1})] = psi[_slices(n, {a_ax: 1, b_ax: 0})]
        psi[_slices(n, {a_ax: 1, b_ax: 0})] = tmp
    elif op.kind == TOFFOLI:
        c1, c2, t = (_axis(n, q) for q in op.qubits)
        tmp = psi[_slices(n, {c1: 1, c2: 1, t: 0})].copy()
        psi[_slices(n, {c1: 1, c2: 1, t: 0})] = psi[_slices(n, {c1: 1, c2: 1, t: 1})]
        psi[_slices(n, {c1: 1, c2: 1, t: 1})] = tmp
    else:
        raise ValueError(f"unknown op kind {op.kind!r}")
    return StateVector(n, amps, DENSE)


# --- readout ------------------------------------------------------------------

def probabilities(state: StateVector) -> np.ndarray:
    """Measurement probabilities |amps[i]|^2 over all 2^n basis states."""
    return np.abs(state.amps) ** 2


def expectation_z(state: StateVector, qubit: int) -> float:
    """Z expectation of one qubit: P(bit=0) - P(bit=1).

    O(1) per qubit in product layout; dense layout marginalizes the
    probability array.
    """
    if not 0 <= qubit < state.n_qubits:
        raise IndexOutOfRange(f"qubit {qubit} out of range")
    if state.layout == PRODUCT:
        f = state._data[qubit]
        return float(abs(f[0]) ** 2 - abs(f[1]) ** 2)
    n = state.n_qubits
    probs = (np.abs(state.amps) ** 2).reshape([2] * n)
    axis = _axis(n, qubit)
    marg = probs.sum(axis=tuple(a for a in range(n) if a != axis))
    return float(marg[0] - marg[1])


def tensor_product(
    a: StateVector, b: StateVector, max_qubits: int = DEFAULT_MAX_QUBITS
) -> StateVector:
    """Combined state with a's qubits above b's: amps[(i << n_b) | j] = a[i] b[j]."""
    n = a.n_qubits + b.n_qubits
    if n > max_qubits:
        raise QubitCapExceeded(f"combined {n} qubits exceeds cap {max_qubits}")
    if a.layout == PRODUCT and b.layout == PRODUCT:
        return StateVector(n, np.vstack([b._data, a._data]), PRODUCT)
    return StateVector(n, np.kron(a.amps, b.amps), DENSE)


def states_equal_up_to_phase(a: StateVector, b: StateVector, tol: float = 1e-9) -> bool:
    """True when the two states differ only by a global phase."""
    if a.n_qubits != b.n_qubits:
        return False
    return bool(abs(abs(np.vdot(a.amps, b.amps)) - 1.0) <= tol)
