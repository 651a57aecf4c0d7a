"""PQC-secured control plane: sessions, signed schedule commitments, freshness.

The provider abstraction carries the protocol role of the post-quantum
primitives (a KEM for key establishment, a signature for authenticating
per-CPI schedule commitments). The bundled deterministic provider emulates
suite byte sizes with keyed hashes so tests are fast and reproducible; it is
NOT cryptographically secure and exists only to exercise the protocol. Real
suites can be bound by implementing the same interface.

Commitment wire format (byte-exact):

    version   1 byte  (0x01)
    cpi_index 8 bytes big-endian unsigned
    digest    32 bytes (SHA3-256 of the schedule audit text)
    ct_len    4 bytes big-endian unsigned, then ct_len bytes of KEM ciphertext
    sig_len   4 bytes big-endian unsigned, then sig_len bytes of signature

The signature covers everything before it (version through ciphertext).
"""

from __future__ import annotations

import hashlib
import hmac
from dataclasses import dataclass, field

import numpy as np

from .codebook import Codebook, CodeSchedule, schedule_from_seed
from .scenario import ScenarioConfig, ValidationError
from .scene_auth import AdversaryModel

__all__ = [
    "CryptoProvider",
    "DeterministicProvider",
    "SessionState",
    "ScheduleCommitment",
    "VerifyResult",
    "ControlOverhead",
    "ControlPlaneError",
    "establish_session",
    "commit_schedule",
    "verify_commitment",
    "control_overhead",
    "encode_commitment",
    "decode_commitment",
]

WIRE_VERSION = 1


class ControlPlaneError(RuntimeError):
    pass


class CryptoProvider:
    """Interface for the KEM + signature suite backing the control plane."""

    suite_id: str = "abstract"
    quantum_resistant: bool = True

    def kem_keypair(self, rng: np.random.Generator) -> tuple[bytes, bytes]:
        raise NotImplementedError

    def kem_encapsulate(self, public_key: bytes, rng: np.random.Generator) -> tuple[bytes, bytes]:
        """Returns (ciphertext, shared_secret >= 32 bytes)."""
        raise NotImplementedError

    def kem_decapsulate(self, secret_key: bytes, ciphertext: bytes) -> bytes:
        raise NotImplementedError

    def sign(self, signing_key: bytes, message: bytes) -> bytes:
        raise NotImplementedError

    def verify(self, verifying_key: bytes, message: bytes, signature: bytes) -> bool:
        raise NotImplementedError

    def sig_keypair(self, rng: np.random.Generator) -> tuple[bytes, bytes]:
        raise NotImplementedError

    @property
    def ciphertext_bytes(self) -> int:
        raise NotImplementedError

    @property
    def signature_bytes(self) -> int:
        raise NotImplementedError


class DeterministicProvider(CryptoProvider):
    """Keyed-hash emulation of an ML-KEM-768 + Falcon-512-sized suite.

    Deterministic, dependency-free, and sized like the real suites so
    overhead accounting is faithful. The 'signature' is an HMAC whose
    verification key equals the signing key; confidentiality/unforgeability
    hold only against parties without the key material, which suffices for
    protocol tests.
    """

    def __init__(self, config: ScenarioConfig | None = None, quantum_resistant: bool = True):
        cfg = config or ScenarioConfig()
        self._ct_bytes = cfg.kem_ciphertext_bytes
        self._ss_bytes = cfg.kem_shared_secret_bytes
        self._sig_bytes = cfg.sig_bytes
        self.quantum_resistant = quantum_resistant
        self.suite_id = "emu-mlkem768+falcon512" if quantum_resistant else "emu-legacy-ecdh+ecdsa"
        if not quantum_resistant:
            self._ct_bytes, self._sig_bytes = 32, 72  # classical ECDH/ECDSA sizes

    def kem_keypair(self, rng: np.random.Generator) -> tuple[bytes, bytes]:
        sk = rng.bytes(32)
        pk = hashlib.sha3_256(b"pk" + sk).digest()
        return sk, pk

    def kem_encapsulate(self, public_key: bytes, rng: np.random.Generator) -> tuple[bytes, bytes]:
        eph = rng.bytes(32)
        ct = hashlib.shake_256(b"ct" + public_key + eph).digest(self._ct_bytes)
        ss = hashlib.shake_256(b"ss" + public_key + ct).digest(self._ss_bytes)
        return ct, ss

    def kem_decapsulate(self, secret_key: bytes, ciphertext: bytes) -> bytes:
        pk = hashlib.sha3_256(b"pk" + secret_key).digest()
        return hashlib.shake_256(b"ss" + pk + ciphertext).digest(self._ss_bytes)

    def sig_keypair(self, rng: np.random.Generator) -> tuple[bytes, bytes]:
        key = rng.bytes(32)
        return key, key  # symmetric emulation: verify key equals signing key

    def sign(self, signing_key: bytes, message: bytes) -> bytes:
        mac = hmac.new(signing_key, message, hashlib.sha3_256).digest()
        pad = hashlib.shake_256(b"pad" + mac).digest(self._sig_bytes - len(mac))
        return mac + pad

    def verify(self, verifying_key: bytes, message: bytes, signature: bytes) -> bool:
        if len(signature) != self._sig_bytes:
            return False
        return hmac.compare_digest(self.sign(verifying_key, message), signature)

    @property
    def ciphertext_bytes(self) -> int:
        return self._ct_bytes

    @property
    def signature_bytes(self) -> int:
        return self._sig_bytes


@dataclass
class SessionState:
    """One control-plane session (single-threaded state machine)."""

    shared_secret: bytes
    sign_key: bytes
    peer_verifying_key: bytes
    kem_secret_key: bytes
    kem_public_key: bytes
    entropy_bits: float
    compromised: bool
    suite_id: str
    cpi_counter: int = 0
    accepted_cpis: set[int] = field(default_factory=set)

    def __post_init__(self) -> None:
        if len(self.shared_secret) < 32:
            raise ValidationError([f"shared secret must be >= 32 bytes, got {len(self.shared_secret)}"])
        if self.entropy_bits < 0:
            raise ValidationError(["entropy_bits must be >= 0"])


@dataclass(frozen=True)
class ScheduleCommitment:
    cpi_index: int
    schedule_digest: bytes
    encapsulated_seed: bytes
    signature: bytes

    @property
    def byte_size(self) -> int:
        return len(encode_commitment(self))


@dataclass(frozen=True)
class VerifyResult:
    accepted: bool
    reason: str  # ok | bad_signature | replay | stale | digest_mismatch

    REASONS = ("ok", "bad_signature", "replay", "stale", "digest_mismatch")


@dataclass(frozen=True)
class ControlOverhead:
    bytes_per_cpi: int
    latency_s: float
    feasible: bool


def establish_session(
    provider: CryptoProvider,
    adversary: AdversaryModel,
    rng: np.random.Generator,
) -> SessionState:
    """KEM handshake plus entropy accounting under the modeled adversary.

    PQC suites keep H(K | adversary) at the 256-bit design floor for every
    class, including harvest-now storage; the legacy suite collapses to zero
    against key-recovery (Shor-capable) classes and the session is flagged.
    """
    try:
        kem_sk, kem_pk = provider.kem_keypair(rng)
        ct, shared = provider.kem_encapsulate(kem_pk, rng)
        check = provider.kem_decapsulate(kem_sk, ct)
        if check != shared:
            raise ControlPlaneError("KEM decapsulation mismatch")
        sign_key, verify_key = provider.sig_keypair(rng)
    except ControlPlaneError:
        raise
    except Exception as exc:  # provider failure surfaces as a session error
        raise ControlPlaneError(f"provider failure during establishment: {exc}") from exc

    broken = (not provider.quantum_resistant) and adversary.key_recovery
    return SessionState(
        shared_secret=shared,
        sign_key=sign_key,
        peer_verifying_key=verify_key,
        kem_secret_key=kem_sk,
        kem_public_key=kem_pk,
        entropy_bits=0.0 if broken else 256.0,
        compromised=broken,
        suite_id=provider.suite_id,
    )


def derive_cpi_seed(shared_secret: bytes, cpi_index: int, encap_secret: bytes) -> bytes:
    return hashlib.shake_256(
        b"cpi-seed" + shared_secret + int(cpi_index).to_bytes(8, "big") + encap_secret
    ).digest(32)


def schedule_digest(schedule: CodeSchedule) -> bytes:
    return hashlib.sha3_256(schedule.to_text().encode()).digest()


def _signed_span(cpi_index: int, digest: bytes, ct: bytes) -> bytes:
    return (
        bytes([WIRE_VERSION])
        + int(cpi_index).to_bytes(8, "big")
        + digest
        + len(ct).to_bytes(4, "big")
        + ct
    )


def encode_commitment(c: ScheduleCommitment) -> bytes:
    span = _signed_span(c.cpi_index, c.schedule_digest, c.encapsulated_seed)
    return span + len(c.signature).to_bytes(4, "big") + c.signature


def decode_commitment(wire: bytes) -> ScheduleCommitment:
    if len(wire) < 45 or wire[0] != WIRE_VERSION:
        raise ControlPlaneError("malformed commitment: bad header")
    cpi = int.from_bytes(wire[1:9], "big")
    digest = wire[9:41]
    ct_len = int.from_bytes(wire[41:45], "big")
    if len(wire) < 45 + ct_len + 4:
        raise ControlPlaneError("malformed commitment: truncated ciphertext")
    ct = wire[45: 45 + ct_len]
    off = 45 + ct_len
    sig_len = int.from_bytes(wire[off: off + 4], "big")
    sig = wire[off + 4: off + 4 + sig_len]
    if len(sig) != sig_len:
        raise ControlPlaneError("malformed commitment: truncated signature")
    return ScheduleCommitment(cpi_index=cpi, schedule_digest=digest, encapsulated_seed=ct, signature=sig)


def commit_schedule(
    state: SessionState,
    codebook: Codebook,
    config: ScenarioConfig,
    provider: CryptoProvider,
    rng: np.random.Generator,
) -> tuple[ScheduleCommitment, CodeSchedule]:
    """Derive the next CPI's schedule from the session and sign its commitment."""
    cpi = state.cpi_counter
    try:
        ct, encap_secret = provider.kem_encapsulate(state.kem_public_key, rng)
        seed = derive_cpi_seed(state.shared_secret, cpi, encap_secret)
        schedule = schedule_from_seed(seed, codebook, config, cpi_index=cpi)
        digest = schedule_digest(schedule)
        signature = provider.sign(state.sign_key, _signed_span(cpi, digest, ct))
    except (ControlPlaneError, ValidationError):
        raise
    except Exception as exc:
        raise ControlPlaneError(f"signing failure: {exc}") from exc
    state.cpi_counter = cpi + 1
    return ScheduleCommitment(cpi, digest, ct, signature), schedule


def verify_commitment(
    state: SessionState,
    commitment: ScheduleCommitment,
    config: ScenarioConfig,
    codebook: Codebook,
    provider: CryptoProvider,
) -> VerifyResult:
    """Accept iff the signature verifies, the CPI index is fresh, and the
    digest matches the locally re-derived schedule."""
    span = _signed_span(commitment.cpi_index, commitment.schedule_digest, commitment.encapsulated_seed)
    if not provider.verify(state.peer_verifying_key, span, commitment.signature):
        return VerifyResult(False, "bad_signature")
    if commitment.cpi_index in state.accepted_cpis:
        return VerifyResult(False, "replay")
    if state.accepted_cpis and commitment.cpi_index < max(state.accepted_cpis):
        return VerifyResult(False, "stale")
    encap_secret = provider.kem_decapsulate(state.kem_secret_key, commitment.encapsulated_seed)
    seed = derive_cpi_seed(state.shared_secret, commitment.cpi_index, encap_secret)
    schedule = schedule_from_seed(seed, codebook, config, cpi_index=commitment.cpi_index)
    if schedule_digest(schedule) != commitment.schedule_digest:
        return VerifyResult(False, "digest_mismatch")
    state.accepted_cpis.add(commitment.cpi_index)
    return VerifyResult(True, "ok")


def control_overhead(
    state: SessionState, provider: CryptoProvider, config: ScenarioConfig
) -> ControlOverhead:
    """Per-CPI control bytes and latency against the CPI budget.

    Latency = crypto compute + wire serialization at the bus rate + per-element
    RIS programming; feasible while it fits inside eta * t_cpi.
    """
    n_bytes = (
        config.commit_header_bytes + provider.ciphertext_bytes + provider.signature_bytes + 4
    )
    latency = config.crypto_compute_s
    latency += 8.0 * n_bytes / config.control_bus_rate_bps
    latency += config.m_elements * config.t_bus
    return ControlOverhead(
        bytes_per_cpi=n_bytes,
        latency_s=latency,
        feasible=latency <= config.eta * config.t_cpi,
    )
