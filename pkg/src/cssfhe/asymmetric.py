"""Public-key scheme: encrypt by encoding under a published scrambled code
and deliberately injecting Pauli errors; evaluation tracks an error-weight
bound per block and asks the key holder to refresh the ciphertext before
any gate would push a bound past the correction radius.

Bob can decode T-gadget measurement records himself with the public code's
syndrome table; the hardness of doing so for a scrambled code at real sizes
is exactly what this desk-scale model does not test.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import css, sim
from .css import CssCode, ScrambledSecretKey
from .errors import (
    ParameterError,
    RefreshAuthorityError,
    ShapeError,
    WeightTooLargeError,
    WireError,
)
from .symmetric import BlockSlot, base_pair


@dataclass(eq=False)
class PublicKey:
    code: CssCode      # scrambled pair, u = v = 0
    ct_weight: int     # injected errors per block at encryption time


@dataclass(eq=False)
class AsymKeyPair:
    private: ScrambledSecretKey
    public: PublicKey


def keygen(base_name: str, c: float, rng: np.random.Generator) -> AsymKeyPair:
    if not 0.0 < c < 1.0:
        raise ParameterError(f"c must be in (0, 1), got {c}")
    c1, c2 = base_pair(base_name)
    private = css.keygen_scrambled(c1, c2, rng)
    t = private.scrambled_code.t
    ct_weight = math.floor(c * t)
    if ct_weight == 0:
        warnings.warn(
            f"floor({c} * {t}) = 0: encryption will inject no errors",
            stacklevel=2)
    return AsymKeyPair(private=private,
                       public=PublicKey(code=private.scrambled_code,
                                        ct_weight=ct_weight))


@dataclass(eq=False)
class AsymCiphertext:
    state: sim.StateVector
    n: int
    t: int
    layout: list[BlockSlot]
    bounds: dict[int, int]                      # sid -> tracked upper bound
    injected: dict[int, dict[str, np.ndarray]]  # sid -> actual masks (tests only)
    session_weight: int
    next_sid: int

    def slot_start(self, sid: int) -> int:
        for i, slot in enumerate(self.layout):
            if slot.sid == sid:
                return i * self.n
        raise WireError(f"slot {sid} is not live")

    def wire_slot(self, wire: int) -> BlockSlot:
        for slot in self.layout:
            if slot.kind == "data" and slot.wire == wire:
                return slot
        raise WireError(f"no block for wire {wire}")

    @property
    def num_wires(self) -> int:
        return sum(1 for s in self.layout if s.kind == "data")

    def wire_bounds(self) -> list[int]:
        return [self.bounds[s.sid] for s in self.layout if s.kind == "data"]


def _inject(state: sim.StateVector, start: int, n: int, positions, kinds):
    """Apply one Pauli per (position, kind) pair on a block; returns the
    x/z masks actually applied. kind 0 = X, 1 = Y, 2 = Z."""
    x = np.zeros(n, dtype=np.uint8)
    z = np.zeros(n, dtype=np.uint8)
    for p, k in zip(positions, kinds):
        if k != 2:
            x[p] ^= 1
        if k != 0:
            z[p] ^= 1
    sim.apply_block_pauli(state, start, n,
                          x_mask=sim.mask_of_bits(x), z_mask=sim.mask_of_bits(z))
    return x, z


def encrypt(pk: PublicKey, plaintext: sim.StateVector,
            rng: np.random.Generator,
            override_weight: int | None = None) -> AsymCiphertext:
    """Encode every wire under the public code, then hit each block with
    `weight` Pauli errors at distinct random positions."""
    code = pk.code
    weight = pk.ct_weight if override_weight is None else override_weight
    if weight > code.t:
        raise WeightTooLargeError(
            f"{weight} injected errors exceed the radius t={code.t}; "
            f"the ciphertext would be undecryptable")
    state = css.encode_blocks(code, plaintext)
    m = plaintext.num_qubits
    layout = [BlockSlot(sid=w, kind="data", wire=w) for w in range(m)]
    bounds: dict[int, int] = {}
    injected: dict[int, dict[str, np.ndarray]] = {}
    for w in range(m):
        positions = rng.choice(code.n, size=weight, replace=False)
        kinds = rng.integers(0, 3, size=weight)
        x, z = _inject(state, w * code.n, code.n, positions, kinds)
        bounds[w] = weight
        injected[w] = {"x": x, "z": z}
    return AsymCiphertext(state=state, n=code.n, t=code.t, layout=layout,
                          bounds=bounds, injected=injected,
                          session_weight=weight, next_sid=m)


def decrypt(private: ScrambledSecretKey, ct: AsymCiphertext) -> sim.StateVector:
    """Correct each block with the syndrome tables, strip the encoding,
    and put wires back in logical order."""
    code = private.scrambled_code
    state = sim.StateVector(ct.state.num_qubits, ct.state.amps.copy(),
                            check=False)
    for i in range(len(ct.layout)):
        state, _, _ = css.correct_errors(code, state, i)
    plain = css.decode_blocks(code, state)
    wires = [s.wire for s in ct.layout]
    perm = [wires.index(w) for w in range(len(wires))]
    return sim.permute_wires(plain, perm)


def refresh(private: ScrambledSecretKey, ct: AsymCiphertext,
            rng: np.random.Generator) -> AsymCiphertext:
    """Decrypt and re-encrypt with fresh randomness. The session's error
    weight is re-injected into a single uniformly chosen block so the
    total never grows with the block count; bounds drop to the actual
    fresh counts."""
    plaintext = decrypt(private, ct)
    code = private.scrambled_code
    state = css.encode_blocks(code, plaintext)
    m = plaintext.num_qubits
    layout = [BlockSlot(sid=w, kind="data", wire=w) for w in range(m)]
    bounds = {w: 0 for w in range(m)}
    injected = {w: {"x": np.zeros(code.n, dtype=np.uint8),
                    "z": np.zeros(code.n, dtype=np.uint8)} for w in range(m)}
    if ct.session_weight > 0:
        target = int(rng.integers(m))
        positions = rng.choice(code.n, size=ct.session_weight, replace=False)
        kinds = rng.integers(0, 3, size=ct.session_weight)
        x, z = _inject(state, target * code.n, code.n, positions, kinds)
        bounds[target] = ct.session_weight
        injected[target] = {"x": x, "z": z}
    return AsymCiphertext(state=state, n=code.n, t=code.t, layout=layout,
                          bounds=bounds, injected=injected,
                          session_weight=ct.session_weight, next_sid=m)


def make_refresh_authority(private: ScrambledSecretKey,
                           rng: np.random.Generator):
    def authority(ct: AsymCiphertext) -> AsymCiphertext:
        return refresh(private, ct, rng)
    return authority


@dataclass(frozen=True)
class ProtocolMessage:
    kind: str                 # Cipher | RefreshRequest | RefreshResponse | Result
    seq: int
    bounds: tuple[int, ...]
    payload: object = None


@dataclass
class Transcript:
    messages: list[ProtocolMessage] = field(default_factory=list)

    @property
    def refresh_count(self) -> int:
        return sum(1 for m in self.messages if m.kind == "RefreshRequest")

    def append(self, kind: str, bounds, payload=None) -> None:
        self.messages.append(ProtocolMessage(
            kind=kind, seq=len(self.messages), bounds=tuple(bounds),
            payload=payload))


def _predicted_bounds(ct: AsymCiphertext, gate: sim.GateOp) -> list[int]:
    if gate.kind == "H":
        return []
    if gate.kind == "CNOT":
        bc = ct.bounds[ct.wire_slot(gate.wires[0]).sid]
        bt = ct.bounds[ct.wire_slot(gate.wires[1]).sid]
        return [min(ct.n, bc + bt)] * 2
    # T: the output block inherits the data block's bound
    return [ct.bounds[ct.wire_slot(gate.wires[0]).sid]]


def _gate_h(ct: AsymCiphertext, wire: int) -> None:
    slot = ct.wire_slot(wire)
    start = ct.slot_start(slot.sid)
    for q in range(ct.n):
        sim.apply_gate(ct.state, sim.GateOp("H", (start + q,)))
    rec = ct.injected[slot.sid]
    rec["x"], rec["z"] = rec["z"], rec["x"]


def _gate_cnot(ct: AsymCiphertext, wc: int, wt: int) -> None:
    sc, st = ct.wire_slot(wc), ct.wire_slot(wt)
    c0, t0 = ct.slot_start(sc.sid), ct.slot_start(st.sid)
    for q in range(ct.n):
        sim.apply_gate(ct.state, sim.GateOp("CNOT", (c0 + q, t0 + q)))
    ct.injected[st.sid]["x"] = ct.injected[st.sid]["x"] ^ ct.injected[sc.sid]["x"]
    ct.injected[sc.sid]["z"] = ct.injected[sc.sid]["z"] ^ ct.injected[st.sid]["z"]
    nb = min(ct.n, ct.bounds[sc.sid] + ct.bounds[st.sid])
    ct.bounds[sc.sid] = nb
    ct.bounds[st.sid] = nb


def _gate_t(ct: AsymCiphertext, wire: int, code: CssCode,
            rng: np.random.Generator) -> None:
    """Bob's own T gadget: he prepares an error-free encoded magic state
    from the public code, runs n CNOTs with the ancilla as control, measures
    the whole data block, and decodes the record himself.

    The ancilla is a fresh product factor, so the joint register is never
    materialized (it would not fit for the 23-bit code): measuring the data
    block after the transversal CNOTs leaves sum_a alpha_a |a> (x) |rest at
    y xor a>, which is spliced together directly from the ancilla amplitudes
    and slices of the existing state. The record y is one draw from the XOR
    convolution of the two block marginals, so y = a xor d with a, d drawn
    independently."""
    data = ct.wire_slot(wire)
    n = ct.n
    d0 = ct.slot_start(data.sid)
    pre = 1 << d0
    post = 1 << (ct.state.num_qubits - d0 - n)
    cube = ct.state.amps.reshape(pre, 1 << n, post)

    a_idx, a_val = css.magic_ancilla_sparse(code)
    probs = np.abs(a_val) ** 2
    j = int(rng.choice(a_idx.shape[0], p=probs / probs.sum()))
    marginal = np.einsum("pdq->d", np.abs(cube) ** 2)
    cum = np.cumsum(marginal / marginal.sum())
    d = min(int(np.searchsorted(cum, rng.random(), side="right")),
            (1 << n) - 1)
    y = int(a_idx[j]) ^ d
    bits = format(y, f"0{n}b")

    new = np.zeros_like(cube)
    new[:, a_idx, :] = a_val[None, :, None] * cube[:, y ^ a_idx, :]
    flat = new.reshape(-1)
    flat /= np.linalg.norm(flat)
    ct.state = sim.StateVector(ct.state.num_qubits, flat, check=False)

    outcome = css.logical_readout(code, bits)
    if outcome == 1:
        # logical SX correction: transversal X then transversal Sdg, done
        # blockwise (X^n reverses the block axis, Sdg^n is diagonal)
        cube = ct.state.amps.reshape(pre, 1 << n, post)[:, ::-1, :]
        pc = np.zeros(1 << n, dtype=np.int64)
        for b in range(n):
            pc += (np.arange(1 << n) >> b) & 1
        cube = cube * ((-1j) ** (pc % 4))[None, :, None]
        ct.state = sim.StateVector(ct.state.num_qubits, cube.reshape(-1),
                                   check=False)

    # bound is inherited: the output block keeps the data block's slot
    ct.injected[data.sid] = {
        "x": np.zeros(n, dtype=np.uint8),
        "z": ct.injected[data.sid]["z"],
    }


def evaluate_session(pk: PublicKey, circuit: sim.LogicalCircuit,
                     ct: AsymCiphertext, alice,
                     rng: np.random.Generator) -> tuple[AsymCiphertext, Transcript]:
    """Run the circuit, interleaving refresh round trips with the key
    holder whenever the next gate would push a tracked bound past t."""
    if circuit.num_wires > ct.num_wires:
        raise WireError(
            f"circuit uses {circuit.num_wires} wires, ciphertext has "
            f"{ct.num_wires}")
    transcript = Transcript()
    transcript.append("Cipher", ct.wire_bounds(), payload=ct)
    for gate in circuit.gates:
        if any(b > ct.t for b in _predicted_bounds(ct, gate)):
            transcript.append("RefreshRequest", ct.wire_bounds())
            try:
                ct = alice(ct)
            except Exception as exc:
                raise RefreshAuthorityError(f"refresh failed: {exc}") from exc
            transcript.append("RefreshResponse", ct.wire_bounds(), payload=ct)
            if any(b > ct.t for b in _predicted_bounds(ct, gate)):
                raise RefreshAuthorityError(
                    f"bounds {ct.wire_bounds()} still exceed t={ct.t} after "
                    f"a refresh; gate {gate.kind} cannot run")
        if gate.kind == "H":
            _gate_h(ct, gate.wires[0])
        elif gate.kind == "CNOT":
            _gate_cnot(ct, gate.wires[0], gate.wires[1])
        else:
            _gate_t(ct, gate.wires[0], pk.code, rng)
    transcript.append("Result", ct.wire_bounds(), payload=ct)
    return ct, transcript
