import numpy as np
import pytest

from privcell.errors import ProtocolError
from privcell.protocol import (
    ALL_APS,
    BYTES_COMPLEX,
    BYTES_REAL,
    CPU,
    Backhaul,
    Message,
    MessageKind,
    ap_name,
    audit_privacy_surface,
    dump_transcript,
    is_ap,
    load_transcript_meta,
    payload_nbytes,
)


def hermitian(n, seed=0):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return a + a.conj().T


def test_names():
    assert ap_name(3) == "ap3"
    assert is_ap("ap0") and is_ap("ap17")
    assert not is_ap("cpu") and not is_ap("apx") and not is_ap(3)


def test_direction_rules():
    net = Backhaul()
    g = hermitian(4)
    net.send(MessageKind.GRAM_RELEASE, "ap0", CPU, 1, g)
    net.broadcast(MessageKind.EIG_BROADCAST, 1, (np.ones(4, dtype=complex), 2.0))
    with pytest.raises(ProtocolError):
        net.send(MessageKind.GRAM_RELEASE, "ap0", "ap1", 1, g)
    with pytest.raises(ProtocolError):
        net.send(MessageKind.EIG_BROADCAST, "ap0", CPU, 1, (np.ones(4), 1.0))
    with pytest.raises(ProtocolError):
        net.send(MessageKind.BASIS_BROADCAST, CPU, "ap0", 1, g)
    with pytest.raises(ProtocolError):
        net.send(MessageKind.GRAM_RELEASE, CPU, ALL_APS, 1, g)
    with pytest.raises(ProtocolError):
        net.send(MessageKind.GRAM_RELEASE, "eve", CPU, 1, g)


def test_payload_byte_counts():
    tau_c, k = 10, 3
    assert payload_nbytes(
        MessageKind.GRAM_RELEASE, np.zeros((tau_c, tau_c), dtype=complex)
    ) == tau_c * tau_c * BYTES_COMPLEX
    assert payload_nbytes(
        MessageKind.EIG_BROADCAST, (np.zeros(tau_c, dtype=complex), 1.0)
    ) == tau_c * BYTES_COMPLEX + BYTES_REAL
    assert payload_nbytes(
        MessageKind.BASIS_BROADCAST, np.zeros((tau_c, k), dtype=complex)
    ) == tau_c * k * BYTES_COMPLEX
    assert payload_nbytes(
        MessageKind.LOCAL_DETECTION, np.zeros((k, 7), dtype=complex)
    ) == k * 7 * BYTES_COMPLEX


def test_broadcast_byte_ratio():
    """T eigenpair broadcasts vs one basis broadcast: T(16 tau_c + 8)
    against K * 16 tau_c bytes."""
    tau_c, k, t = 60, 4, 8
    net = Backhaul()
    for n in range(1, t + 1):
        net.broadcast(MessageKind.EIG_BROADCAST, n, (np.zeros(tau_c, dtype=complex), 1.0))
    iterative = net.ledger.broadcast_bytes
    net2 = Backhaul()
    net2.broadcast(MessageKind.BASIS_BROADCAST, 1, np.zeros((tau_c, k), dtype=complex))
    one_shot = net2.ledger.broadcast_bytes
    assert iterative == t * (16 * tau_c + 8)
    assert one_shot == k * 16 * tau_c
    assert iterative / one_shot == pytest.approx((t / k) * (1 + 1 / (2 * tau_c)))


def test_ledger_accounting():
    net = Backhaul()
    for rnd in (1, 2):
        for m in range(3):
            net.send(MessageKind.GRAM_RELEASE, ap_name(m), CPU, rnd, hermitian(4))
        net.broadcast(MessageKind.EIG_BROADCAST, rnd, (np.ones(4, dtype=complex), 1.0))
    led = net.ledger
    assert led.count(MessageKind.GRAM_RELEASE) == 6
    assert led.count(MessageKind.EIG_BROADCAST) == 2
    assert led.kind_counts[(MessageKind.GRAM_RELEASE, 1)] == 3
    assert led.unicast_bytes["ap0"] == 2 * 16 * 16
    assert led.total_unicast_bytes == 6 * 16 * 16
    assert led.broadcast_bytes == 2 * (4 * 16 + 8)
    assert len(net.round_payloads(MessageKind.GRAM_RELEASE, 2)) == 3


def test_audit_passes_on_clean_transcript():
    net = Backhaul()
    net.send(MessageKind.GRAM_RELEASE, "ap0", CPU, 1, hermitian(5))
    net.send(MessageKind.LOCAL_DETECTION, "ap0", CPU, 0, np.zeros((2, 6), dtype=complex))
    net.broadcast(MessageKind.BASIS_BROADCAST, 1, np.zeros((5, 2), dtype=complex))
    report = audit_privacy_surface(net.transcript, tau_c=5, n_users=2, n_payload=6)
    assert report.ok
    assert bool(report)


def test_audit_flags_injected_raw_signal():
    """A raw observation block smuggled past send() must be caught."""
    net = Backhaul()
    net.send(MessageKind.GRAM_RELEASE, "ap0", CPU, 1, hermitian(5))
    raw = np.ones((2, 5), dtype=complex)  # antennas x slots, not a Gram
    net.transcript.append(
        Message(MessageKind.GRAM_RELEASE, "ap1", CPU, 1, raw, raw.size * 16)
    )
    report = audit_privacy_surface(net.transcript, tau_c=5)
    assert not report.ok
    assert report.failures[0][0] == 1
    assert "square" in report.failures[0][1]


def test_audit_flags_non_hermitian_and_wrong_side():
    net = Backhaul()
    skewed = hermitian(5)
    skewed[0, 1] += 1.0  # break the symmetry only
    net.transcript.append(
        Message(MessageKind.GRAM_RELEASE, "ap0", CPU, 1, skewed, skewed.size * 16)
    )
    net.transcript.append(
        Message(MessageKind.GRAM_RELEASE, "ap1", CPU, 1, hermitian(4), 4 * 4 * 16)
    )
    report = audit_privacy_surface(net.transcript, tau_c=5)
    assert not report.ok
    reasons = [r for _, r in report.failures]
    assert any("Hermitian" in r for r in reasons)
    assert any("side" in r for r in reasons)


def test_audit_flags_wrong_detection_shape():
    net = Backhaul()
    net.send(MessageKind.LOCAL_DETECTION, "ap0", CPU, 0, np.zeros((3, 6), dtype=complex))
    ok = audit_privacy_surface(net.transcript, n_users=3, n_payload=6)
    assert ok.ok
    bad = audit_privacy_surface(net.transcript, n_users=2, n_payload=6)
    assert not bad.ok


def test_transcript_dump_and_load(tmp_path):
    net = Backhaul()
    net.send(MessageKind.GRAM_RELEASE, "ap0", CPU, 1, hermitian(3))
    net.broadcast(MessageKind.EIG_BROADCAST, 1, (np.ones(3, dtype=complex), 1.0))
    path = tmp_path / "transcript.jsonl"
    dump_transcript(net.transcript, path)
    meta = load_transcript_meta(path)
    assert len(meta) == 2
    assert meta[0] == {
        "round": 1, "sender": "ap0", "receiver": "cpu",
        "kind": "GramRelease", "bytes": 9 * 16,
    }
    assert meta[1]["receiver"] == ALL_APS
