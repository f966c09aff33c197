"""Symmetric scheme: encrypt under a secret CSS code, evaluate H/CNOT/T
blindly on the encoded blocks, decrypt with the secret key.

The evaluator sees only the block length n, the circuit, the ciphertext,
and a classical readout oracle (n-bit string in, one bit out) that the key
holder answers during each T gadget. It never touches key material, and it
never runs an error-correction round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import codes as codes_mod
from . import css, gf2, sim
from .codes import LinearCode
from .css import CssCode, FamilySecretKey, KeyEvolver, ScrambledSecretKey
from .errors import (
    AncillaExhaustedError,
    CapacityError,
    LeakageError,
    ParameterError,
    ShapeError,
    WireError,
)

ANCILLA_PRODUCT_TOL = 1e-9


def base_pair(name: str) -> tuple[LinearCode, LinearCode]:
    builtins = codes_mod.builtin_codes()
    if name == "steane":
        return builtins["hamming74"], builtins["simplex73"]
    if name == "golay":
        g = builtins["golay2312"]
        return g, codes_mod.dual(g)
    raise ParameterError(f"unknown base pair {name!r}")


@dataclass(eq=False)
class SymKey:
    variant: str  # "scrambled" | "family"
    base_name: str
    secret: ScrambledSecretKey | FamilySecretKey

    @property
    def code(self) -> CssCode:
        if self.variant == "scrambled":
            return self.secret.scrambled_code
        return self.secret.code

    def evolver(self) -> KeyEvolver:
        if not hasattr(self, "_evolver"):
            code = self.code
            self._evolver = KeyEvolver(code.c1, code.c2)
        return self._evolver


def keygen(base_name: str, mode: str, rng: np.random.Generator) -> SymKey:
    c1, c2 = base_pair(base_name)
    if mode == "scrambled":
        return SymKey("scrambled", base_name, css.keygen_scrambled(c1, c2, rng))
    if mode == "family":
        return SymKey("family", base_name, css.keygen_family(c1, c2, rng))
    raise ParameterError(f"unknown key mode {mode!r}")


@dataclass
class BlockSlot:
    sid: int
    kind: str          # "data" | "ancilla"
    wire: int | None


@dataclass(eq=False)
class SymCiphertext:
    state: sim.StateVector
    n: int
    layout: list[BlockSlot]               # physical order of live blocks
    variant: str
    events: list[tuple] = field(default_factory=list)
    executed: list[sim.GateOp] = field(default_factory=list)
    gadget_outcomes: list[int] = field(default_factory=list)
    log: list[str] = field(default_factory=list)
    rng: np.random.Generator | None = None

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
    def ancilla_pool(self) -> list[BlockSlot]:
        return [s for s in self.layout if s.kind == "ancilla"]

    @property
    def num_wires(self) -> int:
        return sum(1 for s in self.layout if s.kind == "data")


def encrypt(sk: SymKey, plaintext: sim.StateVector, t_budget: int,
            rng: np.random.Generator) -> SymCiphertext:
    """Encode each wire into an n-qubit block and append t_budget encoded
    magic ancillas; the ancillas ride along inside the same register."""
    code = sk.code
    m = plaintext.num_qubits
    total = (m + t_budget) * code.n
    if total > sim.MAX_QUBITS:
        raise CapacityError(
            f"{m} wires + {t_budget} ancillas need {total} qubits "
            f"(limit {sim.MAX_QUBITS})")
    state = css.encode_blocks(code, plaintext)
    layout = [BlockSlot(sid=w, kind="data", wire=w) for w in range(m)]
    for a in range(t_budget):
        state = sim.kron_states(state, css.magic_ancilla(code))
        layout.append(BlockSlot(sid=m + a, kind="ancilla", wire=None))
    return SymCiphertext(state=state, n=code.n, layout=layout,
                         variant=sk.variant, rng=rng)


def _transversal_h(ct: SymCiphertext, wire: int) -> None:
    slot = ct.wire_slot(wire)
    start = ct.slot_start(slot.sid)
    for q in range(ct.n):
        sim.apply_gate(ct.state, sim.GateOp("H", (start + q,)))
    ct.events.append(("H", slot.sid))


def _transversal_cnot(ct: SymCiphertext, wc: int, wt: int) -> None:
    sc, st = ct.wire_slot(wc), ct.wire_slot(wt)
    c0, t0 = ct.slot_start(sc.sid), ct.slot_start(st.sid)
    for q in range(ct.n):
        sim.apply_gate(ct.state, sim.GateOp("CNOT", (c0 + q, t0 + q)))
    ct.events.append(("CNOT", sc.sid, st.sid))


def ft_t_gadget(ct: SymCiphertext, wire: int, readout) -> SymCiphertext:
    """Teleport a T gate through one encoded magic ancilla.

    Transversal CNOTs with the ancilla block as control write the data onto
    the ancilla; measuring the data block yields an n-bit record whose
    logical bit the oracle reports; outcome 1 takes the transversal X then
    S-dagger correction. The measured block is retired and the ancilla
    becomes the wire's block.
    """
    pool = ct.ancilla_pool
    if not pool:
        raise AncillaExhaustedError(f"no ancilla left for T on wire {wire}")
    anc = pool[0]
    data = ct.wire_slot(wire)
    n = ct.n

    a0, d0 = ct.slot_start(anc.sid), ct.slot_start(data.sid)
    for q in range(n):
        sim.apply_gate(ct.state, sim.GateOp("CNOT", (a0 + q, d0 + q)))
    ct.events.append(("CNOT", anc.sid, data.sid))

    d0 = ct.slot_start(data.sid)
    bits = ""
    for q in range(n):
        b, _ = sim.measure_z(ct.state, d0 + q, ct.rng)
        bits += str(b)
    ct.events.append(("MEASURE", data.sid, bits))

    outcome = int(readout(bits))
    ct.log.append(f"READOUT {data.sid} {bits} -> {outcome}")
    ct.gadget_outcomes.append(outcome)

    if outcome == 1:
        a0 = ct.slot_start(anc.sid)
        for q in range(n):
            sim.apply_gate(ct.state, sim.GateOp("X", (a0 + q,)))
        for q in range(n):
            sim.apply_gate(ct.state, sim.GateOp("Sdg", (a0 + q,)))
        ct.events.append(("SDGX", anc.sid))

    ct.state = sim.remove_block(ct.state, ct.slot_start(data.sid), n, bits)
    ct.layout.remove(data)
    ct.events.append(("RETIRE", data.sid, wire, anc.sid))
    anc.kind = "data"
    anc.wire = wire
    return ct


def evaluate(n: int, circuit: sim.LogicalCircuit, ct: SymCiphertext,
             readout) -> SymCiphertext:
    """Run the circuit on the encoded blocks. Inputs are the public block
    length, the circuit, the ciphertext, and the classical readout oracle;
    no key material is accepted."""
    if n != ct.n:
        raise ShapeError(f"block length {n} does not match ciphertext {ct.n}")
    if circuit.num_wires > ct.num_wires:
        raise WireError(
            f"circuit uses {circuit.num_wires} wires, ciphertext has "
            f"{ct.num_wires}")
    if sim.count_t_gates(circuit) > len(ct.ancilla_pool):
        raise AncillaExhaustedError(
            f"{sim.count_t_gates(circuit)} T gates but only "
            f"{len(ct.ancilla_pool)} ancillas")
    for g in circuit.gates:
        if g.kind == "H":
            _transversal_h(ct, g.wires[0])
        elif g.kind == "CNOT":
            _transversal_cnot(ct, g.wires[0], g.wires[1])
        else:
            ft_t_gadget(ct, g.wires[0], readout)
        ct.executed.append(g)
    return ct


def _replay_keys(sk: SymKey, events: list[tuple]) -> dict[int, tuple]:
    """Walk the event log and return each slot's current (u, v)."""
    code = sk.code
    keys: dict[int, tuple] = {}

    def key_of(sid):
        if sid not in keys:
            keys[sid] = (code.u.copy(), code.v.copy())
        return keys[sid]

    if sk.variant == "scrambled":
        # static key: transversal operations keep u = v = 0
        return keys
    ev = sk.evolver()
    for event in events:
        if event[0] == "H":
            keys[event[1]] = ev.h_rule(*key_of(event[1]))
        elif event[0] == "CNOT":
            kc, kt = ev.cnot_rule(key_of(event[1]), key_of(event[2]))
            keys[event[1]], keys[event[2]] = kc, kt
        elif event[0] == "SDGX":
            keys[event[1]] = ev.sdgx_rule(*key_of(event[1]))
    return keys


def _slot_code(sk: SymKey, keys: dict[int, tuple], sid: int) -> CssCode:
    code = sk.code
    if sk.variant == "scrambled" or sid not in keys:
        return code
    return code.with_key(*keys[sid])


def make_readout(sk: SymKey, ct: SymCiphertext):
    """Alice's side of the oracle boundary: maps the n-bit measurement
    record of the most recent gadget to its logical bit. Only classical
    strings cross this callable."""

    def readout(bits: str) -> int:
        keys = _replay_keys(sk, ct.events)
        measured = [e for e in ct.events if e[0] == "MEASURE"]
        if not measured:
            raise ShapeError("no measurement to read out")
        sid = measured[-1][1]
        return css.logical_readout(_slot_code(sk, keys, sid), bits)

    return readout


def decrypt(sk: SymKey, ct: SymCiphertext) -> sim.StateVector:
    """Replay the executed operations to recover each block's key, discard
    unconsumed ancillas (verified unentangled), decode the data blocks,
    and put the wires back in logical order."""
    keys = _replay_keys(sk, ct.events)
    state = ct.state
    prefix_wires: list[int] = []
    prefix = 0
    for slot in ct.layout:
        code = _slot_code(sk, keys, slot.sid)
        if slot.kind == "ancilla":
            idx, vals = css.magic_ancilla_sparse(code)
            state, lost = sim.contract_block_state(state, prefix, ct.n, idx, vals)
            if lost > ANCILLA_PRODUCT_TOL:
                raise LeakageError(
                    f"ancilla slot {slot.sid} is not the expected product "
                    f"state (weight {lost:.3e} lost)")
        else:
            state, leak = sim.contract_block_isometry(state, prefix,
                                                      css.isometry(code))
            if leak > css.DECODE_LEAKAGE_TOL:
                raise LeakageError(
                    f"block for wire {slot.wire}: weight {leak:.3e} outside "
                    f"the code space")
            prefix_wires.append(slot.wire)
            prefix += 1
    perm = [prefix_wires.index(w) for w in range(len(prefix_wires))]
    return sim.permute_wires(state, perm)


def attack_key_guess(ct: SymCiphertext, candidates: list[SymKey],
                     rng: np.random.Generator) -> dict:
    """Try to identify the key by decoding one data block under each
    candidate. Reports how many candidates decode without leakage; clean
    decode alone cannot single out the true key when several do."""
    data_slots = [s for s in ct.layout if s.kind == "data"]
    if not data_slots:
        raise ShapeError("ciphertext has no data blocks")
    start = ct.slot_start(data_slots[0].sid)
    clean = []
    for cand in candidates:
        _, leak = sim.contract_block_isometry(ct.state, start,
                                              css.isometry(cand.code))
        clean.append(bool(leak <= css.DECODE_LEAKAGE_TOL))
    return {
        "candidates": len(candidates),
        "clean": int(sum(clean)),
        "per_candidate": clean,
        "identified": sum(clean) == 1,
    }


def attack_ancilla_leak(copies: int, candidates: list[SymKey],
                        true_key: SymKey, rng: np.random.Generator,
                        trials: int = 1000) -> dict:
    """Monte Carlo of the ancilla-comparison attack.

    Per candidate key the attacker measures each of `copies` leaked
    ancillas in the {magic, orthogonal} basis of that key; a candidate
    survives if every copy passes. The attacker guesses uniformly among
    survivors. With 0 copies this is a uniform guess at 1/K."""
    true_anc = css.magic_ancilla(true_key.code)
    overlaps = [sim.fidelity(css.magic_ancilla(c.code), true_anc)
                for c in candidates]
    true_idx = next(
        (i for i, c in enumerate(candidates)
         if np.array_equal(c.code.u, true_key.code.u)
         and np.array_equal(c.code.v, true_key.code.v)), None)
    if true_idx is None:
        raise ParameterError("true key must be among the candidates")
    hits = 0
    for _ in range(trials):
        survivors = [i for i, p in enumerate(overlaps)
                     if all(rng.random() < p for _ in range(copies))]
        pick = survivors[rng.integers(len(survivors))]
        if pick == true_idx:
            hits += 1
    return {
        "copies": copies,
        "trials": trials,
        "success": hits / trials,
        "overlaps": overlaps,
    }
