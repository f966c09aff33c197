"""Asymmetric scheme: public-code encryption with injected errors, bound
tracking, refresh round trips, and the session protocol."""

import warnings

import numpy as np
import pytest

from cssfhe import asymmetric, css, sim
from cssfhe.errors import (
    ParameterError,
    RefreshAuthorityError,
    WeightTooLargeError,
    WireError,
)

from helpers import random_state, rng


def steane_pair(seed):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # floor(c * 1) = 0 for every c
        return asymmetric.keygen("steane", 0.5, rng(seed))


@pytest.fixture(scope="module")
def golay_pair():
    return asymmetric.keygen("golay", 0.5, rng(200))


def mask_weight(rec):
    return int(np.count_nonzero(rec["x"] | rec["z"]))


def test_keygen_validates_c():
    for bad in (0.0, 1.0, -0.5, 2.0):
        with pytest.raises(ParameterError):
            asymmetric.keygen("golay", bad, rng(0))


def test_keygen_golay_weights():
    kp = asymmetric.keygen("golay", 0.5, rng(1))
    assert kp.public.code.t == 3
    assert kp.public.ct_weight == 1  # floor(0.5 * 3)
    assert asymmetric.keygen("golay", 0.99, rng(2)).public.ct_weight == 2
    assert asymmetric.keygen("golay", 0.34, rng(3)).public.ct_weight == 1


def test_keygen_steane_warns_on_zero_weight():
    with pytest.warns(UserWarning):
        kp = asymmetric.keygen("steane", 0.9, rng(4))
    assert kp.public.ct_weight == 0  # floor(0.9 * 1)


def test_public_code_has_zero_key():
    kp = steane_pair(5)
    assert not kp.public.code.u.any() and not kp.public.code.v.any()
    assert kp.public.code is kp.private.scrambled_code


def test_encrypt_zero_weight_roundtrip():
    g = rng(6)
    kp = steane_pair(6)
    psi = random_state(g, 2)
    ct = asymmetric.encrypt(kp.public, psi, g)
    assert ct.state.num_qubits == 14
    assert ct.wire_bounds() == [0, 0]
    for rec in ct.injected.values():
        assert mask_weight(rec) == 0
    out = asymmetric.decrypt(kp.private, ct)
    assert sim.fidelity(out, psi) >= 1 - 1e-10


def test_encrypt_injects_per_block():
    g = rng(7)
    kp = steane_pair(7)
    psi = random_state(g, 2)
    ct = asymmetric.encrypt(kp.public, psi, g, override_weight=1)
    assert ct.wire_bounds() == [1, 1]
    assert ct.session_weight == 1
    for rec in ct.injected.values():
        assert mask_weight(rec) == 1
    out = asymmetric.decrypt(kp.private, ct)
    assert sim.fidelity(out, psi) >= 1 - 1e-10


def test_encrypt_rejects_weight_beyond_radius():
    g = rng(8)
    kp = steane_pair(8)
    with pytest.raises(WeightTooLargeError):
        asymmetric.encrypt(kp.public, random_state(g, 1), g, override_weight=2)


def test_decrypt_single_pauli_sweep():
    """Every weight-1 Pauli on the block is recovered exactly."""
    g = rng(9)
    kp = steane_pair(9)
    psi = random_state(g, 1)
    ct = asymmetric.encrypt(kp.public, psi, g)
    clean_amps = ct.state.amps.copy()
    for pos in range(7):
        for kind in ("X", "Y", "Z"):
            ct.state = sim.StateVector(7, clean_amps.copy(), check=False)
            x = int(kind in ("X", "Y")) << (6 - pos)
            z = int(kind in ("Y", "Z")) << (6 - pos)
            sim.apply_block_pauli(ct.state, 0, 7, x_mask=x, z_mask=z)
            out = asymmetric.decrypt(kp.private, ct)
            assert sim.fidelity(out, psi) >= 1 - 1e-10


def test_decrypt_random_weights_many_seeds():
    for seed in range(10):
        g = rng(300 + seed)
        kp = steane_pair(10)
        psi = random_state(g, 2)
        ct = asymmetric.encrypt(kp.public, psi, g, override_weight=1)
        out = asymmetric.decrypt(kp.private, ct)
        assert sim.fidelity(out, psi) >= 1 - 1e-10


def test_refresh_resets_bounds_to_one_block():
    g = rng(11)
    kp = steane_pair(11)
    psi = random_state(g, 2)
    ct = asymmetric.encrypt(kp.public, psi, g, override_weight=1)
    fresh = asymmetric.refresh(kp.private, ct, g)
    assert sorted(fresh.wire_bounds()) == [0, 1]  # total stays session_weight
    assert fresh.session_weight == 1
    total = sum(mask_weight(rec) for rec in fresh.injected.values())
    assert total == 1
    out = asymmetric.decrypt(kp.private, fresh)
    assert sim.fidelity(out, psi) >= 1 - 1e-10


def test_refresh_single_block_restores_encryption_weight(golay_pair):
    g = rng(12)
    psi = random_state(g, 1)
    ct = asymmetric.encrypt(golay_pair.public, psi, g)
    assert ct.wire_bounds() == [1]
    fresh = asymmetric.refresh(golay_pair.private, ct, g)
    assert fresh.wire_bounds() == [1]  # floor(c * t) again
    out = asymmetric.decrypt(golay_pair.private, fresh)
    assert sim.fidelity(out, psi) >= 1 - 1e-10


def test_refresh_five_times_stays_exact():
    g = rng(13)
    kp = steane_pair(13)
    psi = random_state(g, 2)
    ct = asymmetric.encrypt(kp.public, psi, g, override_weight=1)
    for _ in range(5):
        ct = asymmetric.refresh(kp.private, ct, g)
    out = asymmetric.decrypt(kp.private, ct)
    assert sim.fidelity(out, psi) >= 1 - 1e-9


def test_gate_h_swaps_masks():
    g = rng(14)
    kp = steane_pair(14)
    psi = random_state(g, 1)
    ct = asymmetric.encrypt(kp.public, psi, g, override_weight=1)
    x0 = ct.injected[0]["x"].copy()
    z0 = ct.injected[0]["z"].copy()
    asymmetric._gate_h(ct, 0)
    assert np.array_equal(ct.injected[0]["x"], z0)
    assert np.array_equal(ct.injected[0]["z"], x0)
    assert ct.wire_bounds() == [1]
    want = sim.apply_gate(psi.copy(), sim.GateOp("H", (0,)))
    assert sim.fidelity(asymmetric.decrypt(kp.private, ct), want) >= 1 - 1e-10


def test_gate_cnot_propagates_masks_and_bounds():
    g = rng(15)
    kp = steane_pair(15)
    psi = random_state(g, 2)
    ct = asymmetric.encrypt(kp.public, psi, g, override_weight=1)
    xc, zc = (ct.injected[0][k].copy() for k in ("x", "z"))
    xt, zt = (ct.injected[1][k].copy() for k in ("x", "z"))
    asymmetric._gate_cnot(ct, 0, 1)
    assert np.array_equal(ct.injected[1]["x"], xt ^ xc)
    assert np.array_equal(ct.injected[0]["z"], zc ^ zt)
    assert np.array_equal(ct.injected[0]["x"], xc)
    assert np.array_equal(ct.injected[1]["z"], zt)
    assert ct.wire_bounds() == [2, 2]


def test_gate_masks_match_physical_error():
    """Undoing the recorded masks must land exactly on the clean encoding
    of the evolved plaintext (Paulis are involutions up to global phase)."""
    g = rng(16)
    kp = steane_pair(16)
    code = kp.public.code
    psi = random_state(g, 2)
    ct = asymmetric.encrypt(kp.public, psi, g, override_weight=1)
    asymmetric._gate_h(ct, 0)
    asymmetric._gate_cnot(ct, 0, 1)
    asymmetric._gate_h(ct, 1)
    evolved = sim.run_circuit(psi.copy(),
                              sim.parse_circuit("H 0\nCNOT 0 1\nH 1"))
    probe = ct.state.copy()
    for sid in (0, 1):
        rec = ct.injected[sid]
        sim.apply_block_pauli(probe, ct.slot_start(sid), 7,
                              x_mask=sim.mask_of_bits(rec["x"]),
                              z_mask=sim.mask_of_bits(rec["z"]))
    clean = css.encode_blocks(code, evolved)
    assert sim.fidelity(probe, clean) >= 1 - 1e-10


def test_gate_t_inherits_phase_mask_and_bound():
    """T consumes the data block; the replacement inherits its Z mask and
    bound, while X corruption is absorbed by the corrected readout."""
    for seed in range(10):
        g = rng(400 + seed)
        kp = steane_pair(17)
        psi = random_state(g, 1)
        ct = asymmetric.encrypt(kp.public, psi, g)
        # definite Y error: both mask kinds at one position
        sim.apply_block_pauli(ct.state, 0, 7, x_mask=1 << 3, z_mask=1 << 3)
        ct.injected[0] = {
            "x": np.array([0, 0, 0, 1, 0, 0, 0], dtype=np.uint8),
            "z": np.array([0, 0, 0, 1, 0, 0, 0], dtype=np.uint8)}
        ct.bounds[0] = 1
        asymmetric._gate_t(ct, 0, kp.public.code, g)
        assert not ct.injected[0]["x"].any()
        assert np.array_equal(ct.injected[0]["z"],
                              np.array([0, 0, 0, 1, 0, 0, 0], dtype=np.uint8))
        assert ct.wire_bounds() == [1]
        want = sim.apply_gate(psi.copy(), sim.GateOp("T", (0,)))
        assert sim.fidelity(asymmetric.decrypt(kp.private, ct), want) >= 1 - 1e-10


def test_gate_t_on_entangled_wires():
    g = rng(18)
    kp = steane_pair(18)
    bell = sim.run_circuit(sim.basis_state(2, "00"),
                           sim.parse_circuit("H 0\nCNOT 0 1"))
    ct = asymmetric.encrypt(kp.public, bell, g)
    asymmetric._gate_t(ct, 1, kp.public.code, g)
    want = sim.apply_gate(bell.copy(), sim.GateOp("T", (1,)))
    assert sim.fidelity(asymmetric.decrypt(kp.private, ct), want) >= 1 - 1e-10


def test_bounds_dominate_actual_weights():
    """Property: after every gate the tracked bound is at least the true
    corrupted-position count of its block."""
    g = rng(19)
    kp = steane_pair(19)
    psi = random_state(g, 2)
    ct = asymmetric.encrypt(kp.public, psi, g, override_weight=1)
    plain = psi.copy()
    for step in range(30):
        pick = g.integers(3)
        if pick == 0:
            w = int(g.integers(2))
            asymmetric._gate_h(ct, w)
            plain = sim.apply_gate(plain, sim.GateOp("H", (w,)))
        elif pick == 1:
            wc = int(g.integers(2))
            gate = sim.GateOp("CNOT", (wc, 1 - wc))
            if max(asymmetric._predicted_bounds(ct, gate)) > ct.t:
                ct = asymmetric.refresh(kp.private, ct, g)
            asymmetric._gate_cnot(ct, wc, 1 - wc)
            plain = sim.apply_gate(plain, gate)
        else:
            continue
        for slot in ct.layout:
            assert ct.bounds[slot.sid] >= mask_weight(ct.injected[slot.sid])
            assert ct.bounds[slot.sid] <= ct.t or pick == 1
    out = asymmetric.decrypt(kp.private, ct)
    # bounds can sit above t right after a CNOT; refresh before comparing
    assert sim.fidelity(out, plain) >= 1 - 1e-9 or sim.fidelity(
        asymmetric.decrypt(kp.private, asymmetric.refresh(kp.private, ct, g)),
        plain) >= 1 - 1e-9


def test_session_no_refresh_without_cnot():
    g = rng(20)
    kp = steane_pair(20)
    psi = random_state(g, 1)
    ct = asymmetric.encrypt(kp.public, psi, g, override_weight=1)
    alice = asymmetric.make_refresh_authority(kp.private, g)
    circuit = sim.parse_circuit("H 0\nT 0\nH 0")
    final, transcript = asymmetric.evaluate_session(kp.public, circuit, ct,
                                                    alice, g)
    assert transcript.refresh_count == 0
    want = sim.run_circuit(psi.copy(), sim.parse_circuit("H 0\nT 0\nH 0"))
    assert sim.fidelity(asymmetric.decrypt(kp.private, final), want) >= 1 - 1e-9


@pytest.mark.parametrize("k", [1, 2, 3])
def test_session_refresh_count_tracks_cnots(k):
    g = rng(21 + k)
    kp = steane_pair(21)
    psi = random_state(g, 2)
    ct = asymmetric.encrypt(kp.public, psi, g, override_weight=1)
    alice = asymmetric.make_refresh_authority(kp.private, g)
    text = "\n".join(["CNOT 0 1"] * k)
    circuit = sim.parse_circuit(text)
    final, transcript = asymmetric.evaluate_session(kp.public, circuit, ct,
                                                    alice, g)
    assert transcript.refresh_count == k
    kinds = [m.kind for m in transcript.messages]
    assert kinds == (["Cipher"]
                     + ["RefreshRequest", "RefreshResponse"] * k
                     + ["Result"])
    assert [m.seq for m in transcript.messages] == list(range(len(kinds)))
    want = sim.run_circuit(psi.copy(), circuit)
    assert sim.fidelity(asymmetric.decrypt(kp.private, final), want) >= 1 - 1e-9


def test_session_transcript_bounds_snapshots():
    g = rng(25)
    kp = steane_pair(25)
    psi = random_state(g, 2)
    ct = asymmetric.encrypt(kp.public, psi, g, override_weight=1)
    alice = asymmetric.make_refresh_authority(kp.private, g)
    _, transcript = asymmetric.evaluate_session(
        kp.public, sim.parse_circuit("CNOT 0 1"), ct, alice, g)
    cipher, request, response, result = transcript.messages
    assert cipher.bounds == (1, 1)
    assert request.bounds == (1, 1)      # taken just before the refresh
    assert sorted(response.bounds) == [0, 1]
    assert result.bounds == (1, 1)       # both blocks after the CNOT
    assert cipher.payload is ct
    assert result.payload is not None


def test_session_stale_authority_rejected():
    g = rng(26)
    kp = steane_pair(26)
    psi = random_state(g, 2)
    ct = asymmetric.encrypt(kp.public, psi, g, override_weight=1)
    with pytest.raises(RefreshAuthorityError):
        asymmetric.evaluate_session(kp.public, sim.parse_circuit("CNOT 0 1"),
                                    ct, lambda c: c, g)


def test_session_raising_authority_wrapped():
    g = rng(27)
    kp = steane_pair(27)
    psi = random_state(g, 2)
    ct = asymmetric.encrypt(kp.public, psi, g, override_weight=1)

    def broken(_):
        raise ValueError("authority offline")

    with pytest.raises(RefreshAuthorityError):
        asymmetric.evaluate_session(kp.public, sim.parse_circuit("CNOT 0 1"),
                                    ct, broken, g)


def test_session_rejects_extra_wires():
    g = rng(28)
    kp = steane_pair(28)
    ct = asymmetric.encrypt(kp.public, random_state(g, 1), g)
    alice = asymmetric.make_refresh_authority(kp.private, g)
    with pytest.raises(WireError):
        asymmetric.evaluate_session(kp.public, sim.parse_circuit("CNOT 0 1"),
                                    ct, alice, g)


def test_golay_weight_three_roundtrip(golay_pair):
    g = rng(29)
    psi = random_state(g, 1)
    ct = asymmetric.encrypt(golay_pair.public, psi, g, override_weight=3)
    out = asymmetric.decrypt(golay_pair.private, ct)
    assert sim.fidelity(out, psi) >= 1 - 1e-10


def test_golay_weight_four_rejected_or_corrupted(golay_pair):
    g = rng(30)
    with pytest.raises(WeightTooLargeError):
        asymmetric.encrypt(golay_pair.public, random_state(g, 1), g,
                           override_weight=4)


def test_golay_session_h_then_t(golay_pair):
    g = rng(31)
    psi = random_state(g, 1)
    ct = asymmetric.encrypt(golay_pair.public, psi, g)
    alice = asymmetric.make_refresh_authority(golay_pair.private, g)
    final, transcript = asymmetric.evaluate_session(
        golay_pair.public, sim.parse_circuit("H 0\nT 0"), ct, alice, g)
    assert transcript.refresh_count == 0
    want = sim.run_circuit(psi.copy(), sim.parse_circuit("H 0\nT 0"))
    assert sim.fidelity(asymmetric.decrypt(golay_pair.private, final),
                        want) >= 1 - 1e-9
