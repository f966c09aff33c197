"""On-disk formats: keys, states, circuits, ciphertexts, transcripts.

Everything is JSON with sorted keys and no whitespace so identical inputs
produce byte-identical files. Matrices are lists of '0'/'1' strings, one
per row, which keeps key files human-diffable.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import asymmetric, codes as codes_mod, css, gf2, sim, symmetric
from .errors import ShapeError


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def read_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _bits_str(v: np.ndarray) -> str:
    return "".join(str(int(b)) for b in v)


def matrix_fragment(m: np.ndarray) -> dict:
    m = gf2.as_bits(m)
    return {"rows": int(m.shape[0]), "cols": int(m.shape[1]),
            "data": [_bits_str(r) for r in m]}


def parse_matrix(frag: dict) -> np.ndarray:
    rows, cols = frag["rows"], frag["cols"]
    if len(frag["data"]) != rows or any(len(r) != cols for r in frag["data"]):
        raise ShapeError("matrix fragment shape mismatch")
    if rows == 0:
        return np.zeros((0, cols), dtype=np.uint8)
    return gf2.as_bits(frag["data"])


def code_fragment(c: codes_mod.LinearCode) -> dict:
    return {"n": c.n, "k": c.k, "gen": matrix_fragment(c.gen)}


def parse_code(frag: dict) -> codes_mod.LinearCode:
    return codes_mod.from_generator(parse_matrix(frag["gen"]))


def key_record(key, base_name: str, ct_weight: int | None = None) -> dict:
    """Serialize a symmetric key (either variant) or an asymmetric pair's
    private key (scrambled variant plus its public error count)."""
    if isinstance(key, symmetric.SymKey):
        variant, secret, code = key.variant, key.secret, key.code
    elif isinstance(key, asymmetric.AsymKeyPair):
        variant, secret, code = "scrambled", key.private, key.private.scrambled_code
        ct_weight = key.public.ct_weight
    else:
        raise ShapeError(f"cannot serialize {type(key).__name__}")
    c1, c2 = symmetric.base_pair(base_name)
    rec = {
        "kind": variant,
        "base": {"name": base_name,
                 "c1": code_fragment(c1), "c2": code_fragment(c2)},
        "S": matrix_fragment(secret.s) if variant == "scrambled" else None,
        "P": matrix_fragment(secret.p) if variant == "scrambled" else None,
        "u": _bits_str(code.u),
        "v": _bits_str(code.v),
        "n": code.n,
        "t": code.t,
    }
    if ct_weight is not None:
        rec["ct"] = ct_weight
    return rec


def parse_key_record(rec: dict):
    """Rebuild a SymKey (or an AsymKeyPair when the record carries a public
    error count) from its file form."""
    base_name = rec["base"]["name"]
    c1 = parse_code(rec["base"]["c1"])
    c2 = parse_code(rec["base"]["c2"])
    if rec["kind"] == "family":
        u, v = gf2.as_vec(rec["u"]), gf2.as_vec(rec["v"])
        secret = css.FamilySecretKey(c1=c1, c2=c2, u=u, v=v,
                                     code=css.build(c1, c2, u, v))
        return symmetric.SymKey("family", base_name, secret)
    s = parse_matrix(rec["S"])
    p = parse_matrix(rec["P"])
    ghat = gf2.mat_mul(gf2.mat_mul(s, c1.gen), p)
    zero = gf2.zeros_vec(c1.n)
    scrambled = css.ScrambledSecretKey(
        s=s, g=c1.gen, p=p,
        scrambled_code=css.build(codes_mod.from_generator(ghat),
                                 codes_mod.from_generator(gf2.mat_mul(c2.gen, p)),
                                 zero, zero))
    key = symmetric.SymKey("scrambled", base_name, scrambled)
    if "ct" in rec:
        return asymmetric.AsymKeyPair(
            private=scrambled,
            public=asymmetric.PublicKey(code=scrambled.scrambled_code,
                                        ct_weight=rec["ct"]))
    return key


def state_record(state: sim.StateVector) -> dict:
    return {"qubits": state.num_qubits,
            "amps": [[float(a.real), float(a.imag)] for a in state.amps]}


def parse_state(rec: dict) -> sim.StateVector:
    amps = np.array([complex(re, im) for re, im in rec["amps"]],
                    dtype=np.complex128)
    if amps.shape[0] != 1 << rec["qubits"]:
        raise ShapeError("state record has the wrong number of amplitudes")
    return sim.StateVector(rec["qubits"], amps)


def sym_ciphertext_record(ct: symmetric.SymCiphertext) -> dict:
    blocks = {str(s.wire): i for i, s in enumerate(ct.layout)
              if s.kind == "data"}
    ancillas = [i for i, s in enumerate(ct.layout) if s.kind == "ancilla"]
    max_wire = max((w for g in ct.executed for w in g.wires), default=-1)
    executed = sim.LogicalCircuit(max_wire + 1, tuple(ct.executed))
    return {
        **state_record(ct.state),
        "n": ct.n,
        "blocks": blocks,
        "ancillas": ancillas,
        "executed": sim.circuit_to_text(executed),
        "gadget_outcomes": list(ct.gadget_outcomes),
        "key_variant": ct.variant,
    }


def transcript_records(tr: asymmetric.Transcript) -> list[dict]:
    return [{"seq": m.seq, "kind": m.kind, "bounds": list(m.bounds)}
            for m in tr.messages]
