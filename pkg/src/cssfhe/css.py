"""CSS code objects keyed by a phase vector u and a shift vector v.

A code instance encodes one logical qubit into n physical qubits. The
logical zero is the superposition of the inner code's codewords, phased by
u and shifted by v; the logical one uses the fixed coset representative x1
(minimum weight, lexicographic tie break).

Key generation comes in two flavors: a scrambled generator matrix in the
McEliece style (u = v = 0), or a random (u, v) pair over a fixed public
base. Transversal operations move (u, v) keys to other members of the
family; the KeyEvolver below calibrates those moves by direct simulation
rather than trusting closed-form rules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import codes as codes_mod
from . import gf2, sim
from .codes import LinearCode, SyndromeTable
from .errors import (
    CapacityError,
    CssFheError,
    DecodeFailureError,
    InvalidPairError,
    LeakageError,
    ShapeError,
)

DECODE_LEAKAGE_TOL = 1e-9
ENUMERATION_LIMIT = 7

MAGIC_PHASE = np.exp(1j * np.pi / 4)
MAGIC_AMPS = np.array([1.0, MAGIC_PHASE], dtype=np.complex128) / math.sqrt(2.0)


class _Counter:
    """Instrumentation: counts projective error-correction rounds."""

    def __init__(self):
        self.count = 0

    def bump(self):
        self.count += 1


correction_counter = _Counter()


@dataclass(eq=False)
class CssCode:
    c1: LinearCode
    c2: LinearCode
    u: np.ndarray
    v: np.ndarray
    n: int
    t: int
    x1: np.ndarray
    # caches shared between all (u, v) siblings over the same base pair
    _shared: dict = field(default_factory=dict, repr=False)

    def with_key(self, u, v) -> "CssCode":
        u, v = gf2.as_vec(u), gf2.as_vec(v)
        if u.shape[0] != self.n or v.shape[0] != self.n:
            raise ShapeError(f"key vectors must have length {self.n}")
        return replace(self, u=u, v=v)

    def key_bytes(self) -> tuple[bytes, bytes]:
        return self.u.tobytes(), self.v.tobytes()


def _vec_indices(rows: np.ndarray) -> np.ndarray:
    """Bitstring rows -> amplitude indices (bit 0 most significant)."""
    n = rows.shape[-1]
    weights = (1 << np.arange(n - 1, -1, -1)).astype(np.int64)
    return rows.astype(np.int64) @ weights


def build(c1: LinearCode, c2: LinearCode, u, v) -> CssCode:
    """Validate the pair and assemble a code with t = floor((d-1)/2)."""
    if c1.n != c2.n:
        raise InvalidPairError(f"length mismatch {c1.n} vs {c2.n}")
    if not codes_mod.is_subcode(c2, c1):
        raise InvalidPairError("inner code is not contained in the outer code")
    if c1.k - c2.k != 1:
        raise InvalidPairError(
            f"dimension gap {c1.k - c2.k}, need exactly 1 logical qubit")
    u, v = gf2.as_vec(u), gf2.as_vec(v)
    if u.shape[0] != c1.n or v.shape[0] != c1.n:
        raise ShapeError(f"key vectors must have length {c1.n}")
    d = min(codes_mod.min_distance(c1),
            codes_mod.min_distance(codes_mod.dual(c2)))
    t = (d - 1) // 2
    cw1 = codes_mod.codewords(c1)
    outside = cw1[gf2.mat_mul(cw1, c2.pchk.T).any(axis=1)]
    order = np.lexsort((_vec_indices(outside), outside.sum(axis=1)))
    x1 = outside[order[0]]
    return CssCode(c1=c1, c2=c2, u=u, v=v, n=c1.n, t=t, x1=x1)


def _inner_words(code: CssCode) -> np.ndarray:
    if "inner_words" not in code._shared:
        code._shared["inner_words"] = codes_mod.codewords(code.c2)
    return code._shared["inner_words"]


def _iso_columns(code: CssCode):
    """Sparse logical-basis columns for the current (u, v); cached."""
    cache = code._shared.setdefault("iso", {})
    key = code.key_bytes()
    if key not in cache:
        w2 = _inner_words(code)
        scale = 1.0 / math.sqrt(w2.shape[0])
        cols = []
        for rep in (np.zeros(code.n, dtype=np.uint8), code.x1):
            words = w2 ^ rep
            idx = _vec_indices(words ^ code.v)
            signs = 1.0 - 2.0 * (gf2.mat_mul(words, code.u[:, None])[:, 0])
            cols.append((idx, signs.astype(np.complex128) * scale))
        cache[key] = tuple(cols)
    return cache[key]


def isometry(code: CssCode) -> sim.BlockIsometry:
    cache = code._shared.setdefault("iso_obj", {})
    key = code.key_bytes()
    if key not in cache:
        cache[key] = sim.BlockIsometry(code.n, _iso_columns(code))
    return cache[key]


def logical_basis(code: CssCode) -> tuple[sim.StateVector, sim.StateVector]:
    out = []
    for idx, vals in _iso_columns(code):
        amps = np.zeros(1 << code.n, dtype=np.complex128)
        amps[idx] = vals
        out.append(sim.StateVector(code.n, amps, check=False))
    return out[0], out[1]


def encode_blocks(code: CssCode, logical_state: sim.StateVector) -> sim.StateVector:
    """Encode every wire into its own n-qubit block, wire w at qubits
    [w*n, (w+1)*n)."""
    state = logical_state.copy()
    iso = isometry(code)
    for w in range(logical_state.num_qubits):
        state = sim.apply_block_isometry(state, w * code.n, iso)
    return state


def decode_blocks(code: CssCode, physical_state: sim.StateVector,
                  per_block: list[CssCode] | None = None) -> sim.StateVector:
    """Inverse of encode_blocks. With per_block, block i is decoded under
    its own code (the keys a transversal circuit evolved them to)."""
    n = code.n
    if physical_state.num_qubits % n:
        raise ShapeError(
            f"{physical_state.num_qubits} qubits is not a multiple of n={n}")
    m = physical_state.num_qubits // n
    if per_block is not None and len(per_block) != m:
        raise ShapeError(f"need {m} block codes, got {len(per_block)}")
    state = physical_state
    for i in range(m):
        block_code = per_block[i] if per_block is not None else code
        state, leak = sim.contract_block_isometry(state, i, isometry(block_code))
        if leak > DECODE_LEAKAGE_TOL:
            raise LeakageError(
                f"block {i}: weight {leak:.3e} outside the code space")
    return state


@dataclass(frozen=True)
class StabilizerSet:
    x_type: tuple[tuple[np.ndarray, int], ...]
    z_type: tuple[tuple[np.ndarray, int], ...]


def stabilizers(code: CssCode) -> StabilizerSet:
    """Signed generators: (-1)^(u.g) X^g for g spanning the inner code,
    (-1)^(h.v) Z^h for h spanning the outer code's dual."""
    xs = tuple((g.copy(), gf2.dot(code.u, g)) for g in code.c2.gen)
    zs = tuple((h.copy(), gf2.dot(h, code.v)) for h in code.c1.pchk)
    return StabilizerSet(x_type=xs, z_type=zs)


def _tables(code: CssCode) -> tuple[SyndromeTable, SyndromeTable]:
    if "tables" not in code._shared:
        x_table = codes_mod.build_syndrome_table(code.c1, code.t)
        z_table = codes_mod.build_syndrome_table(codes_mod.dual(code.c2), code.t)
        code._shared["tables"] = (x_table, z_table)
    return code._shared["tables"]


def correct_errors(code: CssCode, state: sim.StateVector,
                   block: int) -> tuple[sim.StateVector, np.ndarray, np.ndarray]:
    """Measure the signed stabilizers of one block and apply the coset-leader
    correction. The input must carry a definite Pauli error on the block
    (the only way errors enter this package), which makes both syndromes
    deterministic: the bit-flip syndrome is read off any occupied basis
    index, the phase-flip syndrome off amplitude ratios within a coset."""
    n = code.n
    start = block * n
    if start < 0 or start + n > state.num_qubits:
        raise ShapeError(f"block {block} out of range")
    x_table, z_table = _tables(code)
    correction_counter.bump()
    post = state.num_qubits - start - n

    jidx = int(np.argmax(np.abs(state.amps)))
    y_idx = (jidx >> post) & ((1 << n) - 1)
    y = np.array([(y_idx >> (n - 1 - j)) & 1 for j in range(n)], dtype=np.uint8)

    x_syn = gf2.mat_mul(code.c1.pchk, (y ^ code.v)[:, None])[:, 0]
    x_leader = x_table.entries.get(x_syn.tobytes())
    if x_leader is None:
        raise DecodeFailureError(
            f"bit-flip syndrome outside radius t={code.t} on block {block}")
    if x_leader.any():
        sim.apply_block_pauli(state, start, n,
                              x_mask=sim.mask_of_bits(x_leader), z_mask=0)
        jidx ^= sim.mask_of_bits(x_leader) << post

    ref = state.amps[jidx]
    z_syn = np.zeros(code.c2.gen.shape[0], dtype=np.uint8)
    for i, g in enumerate(code.c2.gen):
        other = state.amps[jidx ^ (sim.mask_of_bits(g) << post)]
        ratio = other / ref
        if abs(abs(ratio) - 1.0) > 1e-6 or abs(ratio.imag) > 1e-6:
            raise DecodeFailureError(
                f"block {block} does not carry a definite Pauli error")
        measured = 1 if ratio.real < 0 else 0
        z_syn[i] = measured ^ gf2.dot(code.u, g)
    z_leader = z_table.entries.get(z_syn.tobytes())
    if z_leader is None:
        raise DecodeFailureError(
            f"phase-flip syndrome outside radius t={code.t} on block {block}")
    if z_leader.any():
        sim.apply_block_pauli(state, start, n,
                              x_mask=0, z_mask=sim.mask_of_bits(z_leader))
    return state, x_syn, z_syn


@dataclass(eq=False)
class ScrambledSecretKey:
    s: np.ndarray
    g: np.ndarray
    p: np.ndarray
    scrambled_code: CssCode


@dataclass(eq=False)
class FamilySecretKey:
    c1: LinearCode
    c2: LinearCode
    u: np.ndarray
    v: np.ndarray
    code: CssCode


def keygen_scrambled(c1: LinearCode, c2: LinearCode,
                     rng: np.random.Generator) -> ScrambledSecretKey:
    """Present the base pair through a random row mixer S and a shared
    column permutation P; the scrambled pair is (C1 P, C2 P) with u = v = 0."""
    s = gf2.random_nonsingular(c1.k, rng)
    p = gf2.random_permutation(c1.n, rng)
    ghat = gf2.mat_mul(gf2.mat_mul(s, c1.gen), p)
    c1s = codes_mod.from_generator(ghat)
    c2s = codes_mod.from_generator(gf2.mat_mul(c2.gen, p))
    zero = gf2.zeros_vec(c1.n)
    return ScrambledSecretKey(s=s, g=c1.gen, p=p,
                              scrambled_code=build(c1s, c2s, zero, zero))


def keygen_family(c1: LinearCode, c2: LinearCode,
                  rng: np.random.Generator) -> FamilySecretKey:
    u = gf2.random_vector(c1.n, rng)
    v = gf2.random_vector(c1.n, rng)
    return FamilySecretKey(c1=c1, c2=c2, u=u, v=v, code=build(c1, c2, u, v))


def magic_ancilla(code: CssCode) -> sim.StateVector:
    """Encoded (|0> + e^{i pi/4} |1>)/sqrt(2)."""
    plain = sim.StateVector(1, MAGIC_AMPS.copy(), check=False)
    return encode_blocks(code, plain)


def magic_ancilla_sparse(code: CssCode) -> tuple[np.ndarray, np.ndarray]:
    (i0, v0), (i1, v1) = _iso_columns(code)
    idx = np.concatenate([i0, i1])
    vals = np.concatenate([v0, MAGIC_PHASE * v1]) / math.sqrt(2.0)
    return idx, vals


def logical_readout(code: CssCode, y) -> int:
    """Classically correct an n-bit measurement record and return the
    logical bit it encodes."""
    if isinstance(y, str):
        y = gf2.as_vec(y)
    y = gf2.as_vec(y)
    if y.shape[0] != code.n:
        raise ShapeError(f"record length {y.shape[0]}, expected {code.n}")
    x_table, _ = _tables(code)
    syn = gf2.mat_mul(code.c1.pchk, (y ^ code.v)[:, None])[:, 0]
    leader = x_table.entries.get(syn.tobytes())
    if leader is None:
        raise DecodeFailureError(
            f"measurement record outside radius t={code.t}")
    word = y ^ leader ^ code.v
    in_inner = not gf2.mat_mul(code.c2.pchk, word[:, None]).any() \
        if code.c2.pchk.shape[0] else True
    return 0 if in_inner else 1


def _class_signature(idx_zero: np.ndarray, idx_one: np.ndarray,
                     s0: np.ndarray, s1: np.ndarray) -> tuple:
    """Canonical form of the encoded code space: each basis state is reduced
    to (sorted support, signs with the first forced positive), then the two
    reduced states are sorted. Quotients out per-state global sign and the
    zero/one labelling, leaving exactly the 2-dim subspace."""
    parts = []
    for idx, signs in ((idx_zero, s0), (idx_one, s1)):
        order = np.argsort(idx)
        sg = signs[order]
        sg = sg * sg[0]
        parts.append((tuple(idx[order].tolist()), tuple(sg.tolist())))
    parts.sort()
    return tuple(parts)


def family_signature(code: CssCode) -> tuple:
    """Class signature of this code's (u, v); two keys span the same encoded
    code space iff signatures match."""
    w2 = _inner_words(code)
    w2x = w2 ^ code.x1
    s0 = 1 - 2 * gf2.mat_mul(w2, code.u[:, None])[:, 0].astype(np.int64)
    s1 = 1 - 2 * gf2.mat_mul(w2x, code.u[:, None])[:, 0].astype(np.int64)
    return _class_signature(_vec_indices(w2 ^ code.v),
                            _vec_indices(w2x ^ code.v), s0, s1)


def family_key_classes(c1: LinearCode, c2: LinearCode) -> dict[tuple, tuple]:
    """Map class signature -> first (u, v) reaching it, scanning keys in
    lexicographic order. Brute force, n <= 7 only."""
    n = c1.n
    if n > ENUMERATION_LIMIT:
        raise CapacityError(f"n={n} exceeds enumeration bound {ENUMERATION_LIMIT}")
    code0 = build(c1, c2, gf2.zeros_vec(n), gf2.zeros_vec(n))
    w2 = _inner_words(code0)
    w2x = w2 ^ code0.x1
    idx_w2 = _vec_indices(w2)
    idx_w2x = _vec_indices(w2x)
    all_keys = ((np.arange(1 << n, dtype=np.int64)[:, None]
                 >> np.arange(n - 1, -1, -1)) & 1).astype(np.uint8)
    sign0 = 1 - 2 * gf2.mat_mul(all_keys, w2.T).astype(np.int64)
    sign1 = 1 - 2 * gf2.mat_mul(all_keys, w2x.T).astype(np.int64)
    classes: dict[tuple, tuple] = {}
    for ui in range(1 << n):
        for vi in range(1 << n):
            sig = _class_signature(idx_w2 ^ vi, idx_w2x ^ vi,
                                   sign0[ui], sign1[ui])
            if sig not in classes:
                classes[sig] = (all_keys[ui].copy(), all_keys[vi].copy())
    return classes


def count_distinct_family_codes(c1: LinearCode, c2: LinearCode) -> int:
    return len(family_key_classes(c1, c2))


_PROBE_1Q = [
    np.array([0.6, 0.8 * np.exp(1j * np.pi / 3)], dtype=np.complex128),
    np.array([1.0, np.exp(-1j * np.pi / 7) * math.sqrt(2.0)],
             dtype=np.complex128) / math.sqrt(3.0),
]

_PROBE_2Q = [
    np.array([0.5, 0.3j, -0.4, 0.2 + 0.1j], dtype=np.complex128),
    np.array([0.1, -0.2 + 0.4j, 0.3, 0.6j], dtype=np.complex128),
]


def _normalized(amps: np.ndarray) -> np.ndarray:
    return amps / math.sqrt(float(np.vdot(amps, amps).real))


class KeyEvolver:
    """Calibrated (u, v) update rules for transversal operations.

    For each operation the algebraic candidate is tried first and verified
    by exact simulation on generic probe states; if it fails (it should
    not for the shipped base pairs), a brute-force search over all keys
    runs at n <= 7. Verified rules are cached per input key.
    """

    def __init__(self, c1: LinearCode, c2: LinearCode):
        self.c1, self.c2 = c1, c2
        self.n = c1.n
        zero = gf2.zeros_vec(self.n)
        self.code0 = build(c1, c2, zero, zero)
        self._cache: dict = {}

    def _code(self, u, v) -> CssCode:
        return self.code0.with_key(u, v)

    # --- verification -------------------------------------------------

    def _decode_matches(self, state: sim.StateVector, cand: CssCode,
                        expected: sim.StateVector) -> bool:
        try:
            out = decode_blocks(cand, state)
        except LeakageError:
            return False
        return sim.fidelity(out, expected) >= 1.0 - 1e-10

    def _encoded_probes_1q(self, code: CssCode, gate: str):
        """Encode each probe and apply the physical transversal operation;
        cache per (key, gate)."""
        key = ("probes", gate, code.key_bytes())
        if key in self._cache:
            return self._cache[key]
        out = []
        for amps in _PROBE_1Q:
            plain = sim.StateVector(1, _normalized(amps), check=False)
            enc = encode_blocks(code, plain)
            if gate == "H":
                for q in range(self.n):
                    sim.apply_gate(enc, sim.GateOp("H", (q,)))
                ref = sim.run_circuit(plain.copy(),
                                      sim.LogicalCircuit(1, (sim.GateOp("H", (0,)),)))
            elif gate == "SdgX":
                for q in range(self.n):
                    sim.apply_gate(enc, sim.GateOp("X", (q,)))
                for q in range(self.n):
                    sim.apply_gate(enc, sim.GateOp("Sdg", (q,)))
                ref = plain.copy()
                sim.apply_gate(ref, sim.GateOp("X", (0,)))
                sim.apply_gate(ref, sim.GateOp("S", (0,)))
            else:
                raise CssFheError(f"no single-block rule for {gate}")
            out.append((enc, ref))
        self._cache[key] = out
        return out

    def _verify_1q(self, probes, cand: CssCode) -> bool:
        return all(self._decode_matches(enc, cand, ref) for enc, ref in probes)

    def _search_1q(self, probes) -> tuple[np.ndarray, np.ndarray] | None:
        for ui in range(1 << self.n):
            u = np.array([(ui >> (self.n - 1 - j)) & 1 for j in range(self.n)],
                         dtype=np.uint8)
            for vi in range(1 << self.n):
                v = np.array([(vi >> (self.n - 1 - j)) & 1
                              for j in range(self.n)], dtype=np.uint8)
                if self._verify_1q(probes, self._code(u, v)):
                    return u, v
        return None

    def _rule_1q(self, gate: str, u, v, proposal) -> tuple[np.ndarray, np.ndarray]:
        u, v = gf2.as_vec(u), gf2.as_vec(v)
        key = (gate, u.tobytes(), v.tobytes())
        if key in self._cache:
            return self._cache[key]
        probes = self._encoded_probes_1q(self._code(u, v), gate)
        pu, pv = proposal
        if self._verify_1q(probes, self._code(pu, pv)):
            result = (pu, pv)
        else:
            if self.n > ENUMERATION_LIMIT:
                raise CssFheError(
                    f"{gate} calibration failed and n={self.n} is too large "
                    f"for exhaustive search")
            found = self._search_1q(probes)
            if found is None:
                raise CssFheError(f"{gate} calibration found no key")
            result = found
        self._cache[key] = result
        return result

    # --- public rules ---------------------------------------------------

    def h_rule(self, u, v) -> tuple[np.ndarray, np.ndarray]:
        u, v = gf2.as_vec(u), gf2.as_vec(v)
        return self._rule_1q("H", u, v, (v.copy(), u.copy()))

    def sdgx_rule(self, u, v) -> tuple[np.ndarray, np.ndarray]:
        u, v = gf2.as_vec(u), gf2.as_vec(v)
        return self._rule_1q("SdgX", u, v, (u ^ v, v.copy()))

    def cnot_rule(self, key_c, key_t):
        uc, vc = (gf2.as_vec(x) for x in key_c)
        ut, vt = (gf2.as_vec(x) for x in key_t)
        cache_key = ("CNOT", uc.tobytes(), vc.tobytes(),
                     ut.tobytes(), vt.tobytes())
        if cache_key in self._cache:
            return self._cache[cache_key]
        probes = self._encoded_probes_cnot(uc, vc, ut, vt)
        prop = ((uc ^ ut, vc.copy()), (ut.copy(), vc ^ vt))
        if self._verify_cnot(probes, prop[0], prop[1]):
            result = prop
        else:
            result = self._search_cnot(probes)
        self._cache[cache_key] = result
        return result

    def _encoded_probes_cnot(self, uc, vc, ut, vt):
        code_c, code_t = self._code(uc, vc), self._code(ut, vt)
        out = []
        for amps in _PROBE_2Q:
            plain = sim.StateVector(2, _normalized(amps), check=False)
            enc = plain.copy()
            enc = sim.apply_block_isometry(enc, 0, isometry(code_c))
            enc = sim.apply_block_isometry(enc, self.n, isometry(code_t))
            for q in range(self.n):
                sim.apply_gate(enc, sim.GateOp("CNOT", (q, self.n + q)))
            ref = plain.copy()
            sim.apply_gate(ref, sim.GateOp("CNOT", (0, 1)))
            out.append((enc, ref))
        return out

    def _verify_cnot(self, probes, key_c2, key_t2) -> bool:
        cand_c = self._code(*key_c2)
        cand_t = self._code(*key_t2)
        for enc, ref in probes:
            try:
                mid, leak_c = sim.contract_block_isometry(enc, 0, isometry(cand_c))
                if leak_c > DECODE_LEAKAGE_TOL:
                    return False
                out, leak_t = sim.contract_block_isometry(mid, 1, isometry(cand_t))
                if leak_t > DECODE_LEAKAGE_TOL:
                    return False
            except LeakageError:
                return False
            if sim.fidelity(out, ref) < 1.0 - 1e-10:
                return False
        return True

    def _block_shortlist(self, probes, start: int) -> list[tuple]:
        """Keys whose single-block decode of every probe is leakage free."""
        keep = []
        for ui in range(1 << self.n):
            u = np.array([(ui >> (self.n - 1 - j)) & 1 for j in range(self.n)],
                         dtype=np.uint8)
            for vi in range(1 << self.n):
                v = np.array([(vi >> (self.n - 1 - j)) & 1
                              for j in range(self.n)], dtype=np.uint8)
                cand = self._code(u, v)
                ok = True
                for enc, _ in probes:
                    _, leak = sim.contract_block_isometry(
                        enc, start, isometry(cand))
                    if leak > DECODE_LEAKAGE_TOL:
                        ok = False
                        break
                if ok:
                    keep.append((u, v))
        return keep

    def _search_cnot(self, probes):
        if self.n > ENUMERATION_LIMIT:
            raise CssFheError(
                f"CNOT calibration failed and n={self.n} is too large "
                f"for exhaustive search")
        targets = self._block_shortlist(probes, self.n)
        for key_c in self._block_shortlist(probes, 0):
            for key_t in targets:
                if self._verify_cnot(probes, key_c, key_t):
                    return key_c, key_t
        raise CssFheError("CNOT calibration found no key pair")
