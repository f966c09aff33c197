"""Command-line front door.

Commands: keygen, roundtrip, session, experiment, enumerate. All randomness
flows from --seed through named substreams, so identical invocations write
byte-identical files. Reports are one JSON object per line.

Exit codes: 0 success, 1 usage, 2 validation failure, 3 decode failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import asymmetric, css, files, sim, symmetric
from .errors import (
    AncillaExhaustedError,
    CapacityError,
    CircuitParseError,
    CssFheError,
    DecodeFailureError,
    DegenerateCodeError,
    InvalidPairError,
    IsometryError,
    LeakageError,
    ParameterError,
    RefreshAuthorityError,
    ShapeError,
    SingularMatrixError,
    WeightTooLargeError,
    WireError,
)

FIDELITY_GATE = 1.0 - 1e-9

_VALIDATION_ERRORS = (
    ParameterError, CapacityError, ShapeError, WireError, CircuitParseError,
    AncillaExhaustedError, WeightTooLargeError, InvalidPairError,
    IsometryError, SingularMatrixError, DegenerateCodeError,
)
_DECODE_ERRORS = (DecodeFailureError, LeakageError, RefreshAuthorityError)

# named substreams hanging off --seed
STREAM_KEYGEN = 0
STREAM_ERRORS = 1
STREAM_MEASURE = 2
STREAM_EXPERIMENT = 3
STREAM_REFRESH = 4


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng([seed, stream])


def _emit(obj) -> None:
    sys.stdout.write(files.dumps(obj))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cssfhe")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scheme=True):
        if scheme:
            p.add_argument("--scheme", choices=["sym", "asym"], default="sym")
        p.add_argument("--base", choices=["steane", "golay"], default="steane")
        p.add_argument("--mode", choices=["scrambled", "family"],
                       default="scrambled")
        p.add_argument("--c", type=float, default=0.5)
        p.add_argument("--seed", type=int, required=True)
        p.add_argument("--out", type=str, default=None)

    p = sub.add_parser("keygen")
    common(p)

    p = sub.add_parser("roundtrip")
    common(p)
    p.add_argument("--state", type=str, required=True)
    p.add_argument("--circuit", type=str, required=True)
    p.add_argument("--tbudget", type=int, default=None)
    p.add_argument("--weight", type=int, default=None)

    p = sub.add_parser("session")
    common(p, scheme=False)
    p.add_argument("--circuit", type=str, required=True)
    p.add_argument("--weight", type=int, default=None)

    p = sub.add_parser("experiment")
    p.add_argument("kind")
    common(p)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--copies", type=int, default=1)
    p.add_argument("--candidates", type=int, default=16)

    p = sub.add_parser("enumerate")
    common(p)
    return parser


def _family_candidates(base: str, count: int,
                       true_key: symmetric.SymKey) -> list[symmetric.SymKey]:
    """A roster of keys with pairwise distinct encodings: the true key, its
    same-space sibling (v shifted by the coset representative, so its ancilla
    overlaps the true one partially rather than 0 or 1), then representatives
    of other code-space classes."""
    c1, c2 = symmetric.base_pair(base)

    def family_key(u, v) -> symmetric.SymKey:
        secret = css.FamilySecretKey(c1=c1, c2=c2, u=u, v=v,
                                     code=css.build(c1, c2, u, v))
        return symmetric.SymKey("family", base, secret)

    out = [true_key]
    if count > 1:
        out.append(family_key(true_key.code.u,
                              true_key.code.v ^ true_key.code.x1))
    classes = css.family_key_classes(c1, c2)
    true_sig = css.family_signature(true_key.code)
    for sig, (u, v) in classes.items():
        if len(out) >= count:
            break
        if sig == true_sig:
            continue
        out.append(family_key(u, v))
    return out


def cmd_keygen(args) -> int:
    rng = _rng(args.seed, STREAM_KEYGEN)
    if args.scheme == "sym":
        key = symmetric.keygen(args.base, args.mode, rng)
        rec = files.key_record(key, args.base)
        report = {"kind": args.mode, "n": key.code.n, "t": key.code.t}
    else:
        pair = asymmetric.keygen(args.base, args.c, rng)
        rec = files.key_record(pair, args.base)
        report = {"kind": "asym", "n": pair.public.code.n,
                  "t": pair.public.code.t, "ct": pair.public.ct_weight}
    if args.out:
        files.write_json(args.out, rec)
        report["out"] = args.out
    _emit(report)
    return 0


def _run_sym_roundtrip(args, plaintext, circuit):
    key = symmetric.keygen(args.base, args.mode, _rng(args.seed, STREAM_KEYGEN))
    tbudget = args.tbudget
    if tbudget is None:
        tbudget = sim.count_t_gates(circuit)
    ct = symmetric.encrypt(key, plaintext, tbudget,
                           _rng(args.seed, STREAM_MEASURE))
    symmetric.evaluate(key.code.n, circuit, ct, symmetric.make_readout(key, ct))
    out = symmetric.decrypt(key, ct)
    reference = sim.run_circuit(plaintext.copy(), circuit)
    return sim.fidelity(out, reference), key.code.n


def _run_asym_roundtrip(args, plaintext, circuit):
    pair = asymmetric.keygen(args.base, args.c, _rng(args.seed, STREAM_KEYGEN))
    ct = asymmetric.encrypt(pair.public, plaintext,
                            _rng(args.seed, STREAM_ERRORS),
                            override_weight=args.weight)
    alice = asymmetric.make_refresh_authority(pair.private,
                                              _rng(args.seed, STREAM_REFRESH))
    ct, transcript = asymmetric.evaluate_session(
        pair.public, circuit, ct, alice, _rng(args.seed, STREAM_MEASURE))
    out = asymmetric.decrypt(pair.private, ct)
    reference = sim.run_circuit(plaintext.copy(), circuit)
    return sim.fidelity(out, reference), pair.public.code.n


def cmd_roundtrip(args) -> int:
    plaintext = files.parse_state(files.read_json(args.state))
    circuit = sim.parse_circuit(Path(args.circuit).read_text(encoding="utf-8"))
    if args.scheme == "sym":
        fidelity, n = _run_sym_roundtrip(args, plaintext, circuit)
    else:
        fidelity, n = _run_asym_roundtrip(args, plaintext, circuit)
    ok = fidelity >= FIDELITY_GATE
    report = {"fidelity": fidelity, "n": n, "ok": ok}
    if args.out:
        files.write_json(args.out, report)
    _emit(report)
    return 0 if ok else 3


def cmd_session(args) -> int:
    circuit = sim.parse_circuit(Path(args.circuit).read_text(encoding="utf-8"))
    pair = asymmetric.keygen(args.base, args.c, _rng(args.seed, STREAM_KEYGEN))
    m = max(circuit.num_wires, 1)
    plaintext = sim.basis_state(m, "0" * m)
    ct = asymmetric.encrypt(pair.public, plaintext,
                            _rng(args.seed, STREAM_ERRORS),
                            override_weight=args.weight)
    alice = asymmetric.make_refresh_authority(pair.private,
                                              _rng(args.seed, STREAM_REFRESH))
    ct, transcript = asymmetric.evaluate_session(
        pair.public, circuit, ct, alice, _rng(args.seed, STREAM_MEASURE))
    out = asymmetric.decrypt(pair.private, ct)
    reference = sim.run_circuit(plaintext.copy(), circuit)
    fidelity = sim.fidelity(out, reference)
    if args.out:
        files.write_json(args.out, files.transcript_records(transcript))
    _emit({"refreshes": transcript.refresh_count,
           "gates": len(circuit.gates),
           "final_fidelity": fidelity})
    return 0 if fidelity >= FIDELITY_GATE else 3


def cmd_experiment(args) -> int:
    if args.kind == "family-count":
        c1, c2 = symmetric.base_pair(args.base)
        _emit({"base": args.base,
               "count": css.count_distinct_family_codes(c1, c2)})
        return 0
    if args.kind == "key-guess":
        key = symmetric.keygen(args.base, "family",
                               _rng(args.seed, STREAM_KEYGEN))
        rng = _rng(args.seed, STREAM_EXPERIMENT)
        candidates = _family_candidates(args.base, args.candidates, key)
        plain = sim.StateVector(1, np.array([0.6, 0.8]), check=False)
        ct = symmetric.encrypt(key, plain, 0, rng)
        stats = symmetric.attack_key_guess(ct, candidates, rng)
        _emit({"kind": "key-guess", "candidates": stats["candidates"],
               "clean": stats["clean"], "identified": stats["identified"]})
        return 0
    if args.kind == "ancilla-leak":
        key = symmetric.keygen(args.base, "family",
                               _rng(args.seed, STREAM_KEYGEN))
        rng = _rng(args.seed, STREAM_EXPERIMENT)
        candidates = _family_candidates(args.base, args.candidates, key)
        stats = symmetric.attack_ancilla_leak(
            args.copies, candidates, key, rng, trials=args.trials)
        _emit({"kind": "ancilla-leak", "copies": stats["copies"],
               "trials": stats["trials"], "success": stats["success"]})
        return 0
    sys.stderr.write(f"unknown experiment kind {args.kind!r}\n")
    return 1


def cmd_enumerate(args) -> int:
    c1, c2 = symmetric.base_pair(args.base)
    _emit({"base": args.base,
           "count": css.count_distinct_family_codes(c1, c2)})
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    handlers = {
        "keygen": cmd_keygen,
        "roundtrip": cmd_roundtrip,
        "session": cmd_session,
        "experiment": cmd_experiment,
        "enumerate": cmd_enumerate,
    }
    try:
        return handlers[args.command](args)
    except _DECODE_ERRORS as exc:
        sys.stderr.write(f"decode failure: {exc}\n")
        return 3
    except _VALIDATION_ERRORS as exc:
        sys.stderr.write(f"invalid request: {exc}\n")
        return 2
    except (CssFheError, FileNotFoundError, ValueError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
