"""Exact dense state-vector simulator and the logical circuit format.

Conventions, fixed once:
  - wire 0 is the most significant bit of the amplitude index;
  - at most 24 qubits (two 7-qubit blocks plus one ancilla block, or one
    23-qubit block, both fit);
  - gates mutate the amplitude array in place and return the state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    CapacityError,
    CircuitParseError,
    IsometryError,
    ShapeError,
    UnknownGateError,
    WireError,
)

MAX_QUBITS = 24
_SQRT2 = math.sqrt(2.0)

GATE_1Q = {
    "H": np.array([[1, 1], [1, -1]], dtype=np.complex128) / _SQRT2,
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
    "S": np.array([[1, 0], [0, 1j]], dtype=np.complex128),
    "Sdg": np.array([[1, 0], [0, -1j]], dtype=np.complex128),
    "T": np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=np.complex128),
    "Tdg": np.array([[1, 0], [0, np.exp(-1j * np.pi / 4)]], dtype=np.complex128),
}

LOGICAL_GATES = ("H", "CNOT", "T")


class StateVector:
    """Pure state over num_qubits qubits; amps has 2^num_qubits entries."""

    __slots__ = ("num_qubits", "amps")

    def __init__(self, num_qubits: int, amps, check: bool = True):
        if num_qubits < 0 or num_qubits > MAX_QUBITS:
            raise CapacityError(f"{num_qubits} qubits outside [0, {MAX_QUBITS}]")
        amps = np.asarray(amps, dtype=np.complex128)
        if amps.shape != (1 << num_qubits,):
            raise ShapeError(
                f"expected {1 << num_qubits} amplitudes, got {amps.shape}")
        if check:
            norm = float(np.vdot(amps, amps).real)
            if abs(norm - 1.0) > 1e-9:
                raise ShapeError(f"state norm {norm} is not 1")
        self.num_qubits = num_qubits
        self.amps = amps

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amps.copy(), check=False)

    def norm(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)


def basis_state(m: int, label: str) -> StateVector:
    if len(label) != m or any(ch not in "01" for ch in label):
        raise ShapeError(f"label {label!r} is not an {m}-bit string")
    amps = np.zeros(1 << m, dtype=np.complex128)
    amps[int(label, 2) if m else 0] = 1.0
    return StateVector(m, amps, check=False)


def state_from_amps(amps) -> StateVector:
    amps = np.asarray(amps, dtype=np.complex128)
    m = int(amps.shape[0]).bit_length() - 1
    if (1 << m) != amps.shape[0]:
        raise ShapeError(f"{amps.shape[0]} amplitudes is not a power of two")
    return StateVector(m, amps.copy())


@dataclass(frozen=True)
class GateOp:
    kind: str
    wires: tuple[int, ...]

    def __post_init__(self):
        if self.kind == "CNOT":
            if len(self.wires) != 2:
                raise WireError("CNOT takes two wires")
            if self.wires[0] == self.wires[1]:
                raise WireError(f"CNOT wires must be distinct, got {self.wires}")
        elif self.kind in GATE_1Q:
            if len(self.wires) != 1:
                raise WireError(f"{self.kind} takes one wire")
        else:
            raise WireError(f"unknown gate kind {self.kind!r}")
        if any(w < 0 for w in self.wires):
            raise WireError(f"negative wire in {self.wires}")


def _view1(amps: np.ndarray, w: int) -> np.ndarray:
    return amps.reshape(1 << w, 2, -1)


def _apply_single(amps: np.ndarray, m: int, w: int, mat: np.ndarray) -> None:
    if not 0 <= w < m:
        raise WireError(f"wire {w} out of range for {m} qubits")
    view = _view1(amps, w)
    if mat[0, 1] == 0 and mat[1, 0] == 0:
        if mat[0, 0] != 1:
            view[:, 0, :] *= mat[0, 0]
        if mat[1, 1] != 1:
            view[:, 1, :] *= mat[1, 1]
        return
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :].copy()
    view[:, 0, :] = mat[0, 0] * a0 + mat[0, 1] * a1
    view[:, 1, :] = mat[1, 0] * a0 + mat[1, 1] * a1


def _apply_cnot(amps: np.ndarray, m: int, c: int, t: int) -> None:
    if not (0 <= c < m and 0 <= t < m):
        raise WireError(f"CNOT wires ({c},{t}) out of range for {m} qubits")
    lo, hi = (c, t) if c < t else (t, c)
    view = amps.reshape(1 << lo, 2, 1 << (hi - lo - 1), 2, -1)
    if c < t:
        tmp = view[:, 1, :, 0, :].copy()
        view[:, 1, :, 0, :] = view[:, 1, :, 1, :]
        view[:, 1, :, 1, :] = tmp
    else:
        tmp = view[:, 0, :, 1, :].copy()
        view[:, 0, :, 1, :] = view[:, 1, :, 1, :]
        view[:, 1, :, 1, :] = tmp


def apply_gate(state: StateVector, g: GateOp) -> StateVector:
    if g.kind == "CNOT":
        _apply_cnot(state.amps, state.num_qubits, g.wires[0], g.wires[1])
    else:
        _apply_single(state.amps, state.num_qubits, g.wires[0], GATE_1Q[g.kind])
    return state


def measure_z(state: StateVector, wire: int,
              rng: np.random.Generator) -> tuple[int, StateVector]:
    """Projective Z measurement; collapses in place and renormalizes."""
    if not 0 <= wire < state.num_qubits:
        raise WireError(f"wire {wire} out of range")
    view = _view1(state.amps, wire)
    p1 = float(np.sum(np.abs(view[:, 1, :]) ** 2))
    bit = 1 if rng.random() < p1 else 0
    p = p1 if bit else 1.0 - p1
    view[:, 1 - bit, :] = 0
    state.amps /= math.sqrt(p)
    return bit, state


def fidelity(a: StateVector, b: StateVector) -> float:
    if a.num_qubits != b.num_qubits:
        raise ShapeError(f"qubit counts differ: {a.num_qubits} vs {b.num_qubits}")
    return float(abs(np.vdot(a.amps, b.amps)) ** 2)


def kron_states(a: StateVector, b: StateVector) -> StateVector:
    m = a.num_qubits + b.num_qubits
    if m > MAX_QUBITS:
        raise CapacityError(f"{m} qubits exceeds {MAX_QUBITS}")
    return StateVector(m, np.kron(a.amps, b.amps), check=False)


def permute_wires(state: StateVector, perm: list[int]) -> StateVector:
    """Reorder wires so that new wire i is old wire perm[i]."""
    m = state.num_qubits
    if sorted(perm) != list(range(m)):
        raise WireError(f"{perm} is not a permutation of 0..{m - 1}")
    amps = state.amps.reshape([2] * m).transpose(perm).reshape(-1)
    return StateVector(m, np.ascontiguousarray(amps), check=False)


class BlockIsometry:
    """Sparse 2-column isometry sending one wire into an n-qubit block.

    Column b is stored as (indices, values) over the 2^n block basis.
    Columns must be orthonormal (Gram deviation below 1e-10).
    """

    __slots__ = ("block_qubits", "cols")

    def __init__(self, block_qubits: int, cols):
        if len(cols) != 2:
            raise IsometryError("an encoding isometry needs exactly 2 columns")
        parsed = []
        for idx, vals in cols:
            idx = np.asarray(idx, dtype=np.int64)
            vals = np.asarray(vals, dtype=np.complex128)
            if idx.shape != vals.shape or idx.ndim != 1:
                raise IsometryError("column index/value shape mismatch")
            order = np.argsort(idx)
            parsed.append((idx[order], vals[order]))
        for i in range(2):
            for j in range(2):
                g = _sparse_vdot(*parsed[i], *parsed[j])
                want = 1.0 if i == j else 0.0
                if abs(g - want) > 1e-10:
                    raise IsometryError(
                        f"column Gram [{i},{j}] = {g}, expected {want}")
        self.block_qubits = block_qubits
        self.cols = tuple(parsed)


def _sparse_vdot(ia, va, ib, vb) -> complex:
    common, ka, kb = np.intersect1d(ia, ib, return_indices=True)
    if common.size == 0:
        return 0.0
    return complex(np.vdot(va[ka], vb[kb]))


def apply_block_isometry(state: StateVector, wire: int,
                         iso: BlockIsometry) -> StateVector:
    """Replace `wire` by an n-qubit block; all other wires untouched."""
    m = state.num_qubits
    if not 0 <= wire < m:
        raise WireError(f"wire {wire} out of range")
    n = iso.block_qubits
    m2 = m - 1 + n
    if m2 > MAX_QUBITS:
        raise CapacityError(f"{m2} qubits exceeds {MAX_QUBITS}")
    src = state.amps.reshape(1 << wire, 2, -1)
    out = np.zeros((1 << wire, 1 << n, src.shape[2]), dtype=np.complex128)
    for b in range(2):
        idx, vals = iso.cols[b]
        out[:, idx, :] += vals[None, :, None] * src[:, b, :][:, None, :]
    return StateVector(m2, out.reshape(-1), check=False)


def contract_block_isometry(state: StateVector, start: int,
                            iso: BlockIsometry) -> tuple[StateVector, float]:
    """Inverse of apply_block_isometry on the block at qubits
    [start, start+n); returns (smaller state, leaked weight outside the
    column span). The result is renormalized."""
    m = state.num_qubits
    n = iso.block_qubits
    if start < 0 or start + n > m:
        raise WireError(f"block [{start}, {start + n}) out of range")
    view = state.amps.reshape(1 << start, 1 << n, -1)
    out = np.empty((1 << start, 2, view.shape[2]), dtype=np.complex128)
    for b in range(2):
        idx, vals = iso.cols[b]
        out[:, b, :] = np.einsum("j,ajb->ab", vals.conj(), view[:, idx, :])
    kept = float(np.sum(np.abs(out) ** 2))
    leakage = max(0.0, 1.0 - kept)
    if kept > 0:
        out /= math.sqrt(kept)
    return StateVector(m - n + 1, out.reshape(-1), check=False), leakage


def contract_block_state(state: StateVector, start: int, n: int,
                         idx, vals) -> tuple[StateVector, float]:
    """Project the block at [start, start+n) onto a fixed sparse block state
    and drop it; returns (smaller state, weight lost). Used to verify and
    discard unentangled ancilla blocks."""
    m = state.num_qubits
    if start < 0 or start + n > m:
        raise WireError(f"block [{start}, {start + n}) out of range")
    idx = np.asarray(idx, dtype=np.int64)
    vals = np.asarray(vals, dtype=np.complex128)
    view = state.amps.reshape(1 << start, 1 << n, -1)
    out = np.einsum("j,ajb->ab", vals.conj(), view[:, idx, :])
    kept = float(np.sum(np.abs(out) ** 2))
    lost = max(0.0, 1.0 - kept)
    if kept > 0:
        out /= math.sqrt(kept)
    return StateVector(m - n, out.reshape(-1), check=False), lost


def _parity64(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.int64)
    x ^= x >> 32
    x ^= x >> 16
    x ^= x >> 8
    x ^= x >> 4
    x ^= x >> 2
    x ^= x >> 1
    return x & 1


def apply_block_pauli(state: StateVector, start: int, n: int,
                      x_mask: int, z_mask: int) -> StateVector:
    """Apply Z^z then X^x on the block at qubits [start, start+n), with
    masks given as block-local integers (bit n-1-j of the mask acts on the
    j-th qubit of the block, matching index arithmetic)."""
    if start < 0 or start + n > state.num_qubits:
        raise WireError(f"block [{start}, {start + n}) out of range")
    if x_mask == 0 and z_mask == 0:
        return state
    view = state.amps.reshape(1 << start, 1 << n, -1)
    j = np.arange(1 << n, dtype=np.int64)
    if z_mask:
        signs = (1.0 - 2.0 * _parity64(j & z_mask)).astype(np.complex128)
        out = view * signs[None, :, None]
    else:
        out = view
    if x_mask:
        out = out[:, j ^ x_mask, :]
    view[:] = out
    return state


def mask_of_bits(bits: np.ndarray) -> int:
    """Block-local mask integer for a bit vector (bit 0 most significant)."""
    m = 0
    for b in bits:
        m = (m << 1) | int(b)
    return m


def remove_block(state: StateVector, start: int, n: int,
                 bits: str) -> StateVector:
    """Drop a collapsed block whose qubits hold the definite string `bits`."""
    if len(bits) != n:
        raise ShapeError(f"bits {bits!r} is not {n} long")
    view = state.amps.reshape(1 << start, 1 << n, -1)
    out = view[:, int(bits, 2), :].copy()
    kept = float(np.sum(np.abs(out) ** 2))
    if abs(kept - 1.0) > 1e-9:
        raise ShapeError(f"block not collapsed to |{bits}>: weight {kept}")
    out /= math.sqrt(kept)
    return StateVector(state.num_qubits - n, out.reshape(-1), check=False)


@dataclass(frozen=True)
class LogicalCircuit:
    num_wires: int
    gates: tuple[GateOp, ...]

    def __post_init__(self):
        for g in self.gates:
            if g.kind not in LOGICAL_GATES:
                raise WireError(f"gate {g.kind} is not in the logical set")
            if any(w >= self.num_wires for w in g.wires):
                raise WireError(f"wire in {g.wires} exceeds {self.num_wires}")


def parse_circuit(text: str) -> LogicalCircuit:
    """Parse the line format: 'H <w>' | 'T <w>' | 'CNOT <wc> <wt>'.

    '#' starts a comment; blank lines are skipped.
    """
    gates: list[GateOp] = []
    max_wire = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        name, args = parts[0], parts[1:]
        if name not in LOGICAL_GATES:
            raise UnknownGateError(f"unknown gate {name!r}", lineno)
        want = 2 if name == "CNOT" else 1
        if len(args) != want:
            raise CircuitParseError(
                f"{name} takes {want} wire argument(s), got {len(args)}", lineno)
        try:
            wires = tuple(int(a) for a in args)
        except ValueError:
            raise CircuitParseError(f"bad wire index in {line!r}", lineno)
        try:
            gates.append(GateOp(name, wires))
        except WireError as exc:
            raise CircuitParseError(str(exc), lineno)
        max_wire = max(max_wire, *wires)
    return LogicalCircuit(num_wires=max_wire + 1, gates=tuple(gates))


def circuit_to_text(c: LogicalCircuit) -> str:
    return "\n".join(f"{g.kind} {' '.join(str(w) for w in g.wires)}"
                     for g in c.gates)


def count_t_gates(c: LogicalCircuit) -> int:
    return sum(1 for g in c.gates if g.kind == "T")


def run_circuit(state: StateVector, c: LogicalCircuit) -> StateVector:
    if c.num_wires > state.num_qubits:
        raise WireError(
            f"circuit needs {c.num_wires} wires, state has {state.num_qubits}")
    for g in c.gates:
        apply_gate(state, g)
    return state
