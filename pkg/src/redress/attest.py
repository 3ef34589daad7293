"""Canonical serialization, hashing, and signing for receipts and abuse certificates.

Canonical form: UTF-8 JSON, keys sorted lexicographically at every level, no
insignificant whitespace, integers in base 10, strings escaped per JSON rules,
non-ASCII characters emitted raw. Floats and None are rejected so signed bytes
never depend on platform float formatting; monetary amounts are integer minor
units throughout the package.

Signatures are detached Ed25519 over the canonical bytes of a document body.
The on-disk certificate format is a single JSON envelope
``{"body": ..., "signature": <base64>, "key_id": <hex>}``.
"""

import base64
import hashlib
import json
from dataclasses import dataclass
from datetime import datetime

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric import ed25519

from .errors import MalformedDocument, NotValidated, UnsupportedValue
from .timefmt import ts_to_str

_ATOMIC = (str, int, bool)


def _check_tree(value) -> None:
    if isinstance(value, bool):
        return
    if isinstance(value, float):
        raise UnsupportedValue("floats are not allowed in signed documents")
    if value is None:
        raise UnsupportedValue("None is not allowed in signed documents; omit the key")
    if isinstance(value, _ATOMIC):
        return
    if isinstance(value, dict):
        for key, item in value.items():
            if not isinstance(key, str):
                raise UnsupportedValue(f"non-string map key: {key!r}")
            _check_tree(item)
        return
    if isinstance(value, (list, tuple)):
        for item in value:
            _check_tree(item)
        return
    raise UnsupportedValue(f"unsupported value type: {type(value).__name__}")


def canonicalize(document) -> bytes:
    """Encode a tree of maps/lists/strings/ints/bools to canonical bytes.

    Structurally equal documents produce identical bytes regardless of map
    insertion order.
    """
    _check_tree(document)
    return json.dumps(
        document, sort_keys=True, separators=(",", ":"), ensure_ascii=False
    ).encode("utf-8")


def digest(document) -> bytes:
    """32-byte SHA-256 digest of the canonical encoding."""
    return hashlib.sha256(canonicalize(document)).digest()


def digest_hex(document) -> str:
    return digest(document).hex()


class SigningKey:
    """Ed25519 key pair plus the short key id used in envelopes."""

    def __init__(self, private_bytes: bytes):
        if len(private_bytes) != 32:
            raise ValueError("Ed25519 private key must be 32 bytes")
        self._key = ed25519.Ed25519PrivateKey.from_private_bytes(private_bytes)
        self.public_bytes = self._key.public_key().public_bytes_raw()
        self.key_id = hashlib.sha256(self.public_bytes).hexdigest()[:16]

    @classmethod
    def generate(cls) -> "SigningKey":
        key = ed25519.Ed25519PrivateKey.generate()
        return cls(key.private_bytes_raw())

    @classmethod
    def from_seed(cls, seed: int) -> "SigningKey":
        """Derive a key deterministically from an integer seed (simulator use)."""
        material = hashlib.sha256(b"redress-signing-key:" + str(seed).encode()).digest()
        return cls(material)

    def sign(self, message: bytes) -> bytes:
        return self._key.sign(message)

    def private_hex(self) -> str:
        return self._key.private_bytes_raw().hex()


def verify_bytes(message: bytes, signature: bytes, public_key: bytes) -> bool:
    try:
        ed25519.Ed25519PublicKey.from_public_bytes(public_key).verify(signature, message)
        return True
    except (InvalidSignature, ValueError):
        return False


@dataclass(frozen=True)
class SignedAcknowledgement:
    """Signed receipt that a report was filed: hash of the report plus a timestamp."""

    case_id: str
    report_digest: bytes
    received_at: datetime
    platform_key_id: str
    signature: bytes

    def body(self) -> dict:
        return {
            "case_id": self.case_id,
            "report_digest": self.report_digest.hex(),
            "received_at": ts_to_str(self.received_at),
            "platform_key_id": self.platform_key_id,
        }

    def envelope(self) -> dict:
        return _envelope(self.body(), self.signature, self.platform_key_id)


@dataclass(frozen=True)
class AbuseCertificate:
    """Platform-signed attestation that a validated abuse incident occurred."""

    certificate_id: str
    case_id: str
    abuse_type: str
    description: str
    occurred_at: datetime
    aggregate_impact: int
    issued_at: datetime
    platform_key_id: str
    signature: bytes

    def body(self) -> dict:
        return {
            "certificate_id": self.certificate_id,
            "case_id": self.case_id,
            "abuse_type": self.abuse_type,
            "description": self.description,
            "occurred_at": ts_to_str(self.occurred_at),
            "aggregate_impact": self.aggregate_impact,
            "issued_at": ts_to_str(self.issued_at),
            "platform_key_id": self.platform_key_id,
        }

    def envelope(self) -> dict:
        return _envelope(self.body(), self.signature, self.platform_key_id)


def _envelope(body: dict, signature: bytes, key_id: str) -> dict:
    return {
        "body": body,
        "signature": base64.b64encode(signature).decode("ascii"),
        "key_id": key_id,
    }


def _sign_body(body: dict, key: SigningKey) -> bytes:
    return key.sign(canonicalize(body))


def issue_ack(
    case_id: str, filing_document: dict, now: datetime, signing_key: SigningKey
) -> SignedAcknowledgement:
    """Sign a receipt for a just-filed report.

    ``filing_document`` is the canonical filing content (reporter, accused,
    category, narrative, evidence ids, filed_at); its digest goes into the ack.
    """
    report_digest = digest(filing_document)
    body = {
        "case_id": case_id,
        "report_digest": report_digest.hex(),
        "received_at": ts_to_str(now),
        "platform_key_id": signing_key.key_id,
    }
    return SignedAcknowledgement(
        case_id=case_id,
        report_digest=report_digest,
        received_at=now,
        platform_key_id=signing_key.key_id,
        signature=_sign_body(body, signing_key),
    )


def issue_certificate(
    certificate_id: str,
    case_id: str,
    abuse_type: str,
    description: str,
    occurred_at: datetime,
    outcome_decision: str,
    aggregate_impact: int,
    now: datetime,
    signing_key: SigningKey,
) -> AbuseCertificate:
    """Issue a signed abuse certificate. Only Validated outcomes qualify."""
    if outcome_decision != "Validated":
        raise NotValidated(f"cannot certify outcome {outcome_decision}")
    body = {
        "certificate_id": certificate_id,
        "case_id": case_id,
        "abuse_type": abuse_type,
        "description": description,
        "occurred_at": ts_to_str(occurred_at),
        "aggregate_impact": aggregate_impact,
        "issued_at": ts_to_str(now),
        "platform_key_id": signing_key.key_id,
    }
    return AbuseCertificate(
        certificate_id=certificate_id,
        case_id=case_id,
        abuse_type=abuse_type,
        description=description,
        occurred_at=occurred_at,
        aggregate_impact=aggregate_impact,
        issued_at=now,
        platform_key_id=signing_key.key_id,
        signature=_sign_body(body, signing_key),
    )


def _decode_signature(encoded: str) -> bytes:
    # Strict round trip: Python's lenient base64 would accept non-canonical
    # padding bits, letting some mutated signatures decode to the same bytes.
    try:
        raw = base64.b64decode(encoded, validate=True)
    except Exception as exc:
        raise MalformedDocument(f"bad base64 signature: {exc}") from exc
    if base64.b64encode(raw).decode("ascii") != encoded:
        raise MalformedDocument("non-canonical base64 signature")
    return raw


def parse_envelope(data) -> tuple[dict, bytes, str]:
    """Split an envelope (dict or JSON bytes/str) into (body, signature, key_id)."""
    if isinstance(data, (bytes, str)):
        try:
            data = json.loads(data)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise MalformedDocument(f"not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise MalformedDocument("envelope must be a JSON object")
    missing = {"body", "signature", "key_id"} - set(data)
    if missing:
        raise MalformedDocument(f"envelope missing fields: {sorted(missing)}")
    if not isinstance(data["body"], dict) or not isinstance(data["signature"], str):
        raise MalformedDocument("envelope fields have wrong types")
    return data["body"], _decode_signature(data["signature"]), data["key_id"]


def verify(signed_doc, public_key: bytes) -> bool:
    """True iff the envelope's signature matches the canonical bytes of its body.

    Accepts an envelope dict, JSON bytes/str, or an issued ack/certificate
    object. Raises MalformedDocument for input that cannot be parsed at all.
    """
    if isinstance(signed_doc, (SignedAcknowledgement, AbuseCertificate)):
        return verify_bytes(canonicalize(signed_doc.body()), signed_doc.signature, public_key)
    body, signature, key_id = parse_envelope(signed_doc)
    if "platform_key_id" in body and body["platform_key_id"] != key_id:
        raise MalformedDocument("envelope key_id does not match the signed body")
    try:
        message = canonicalize(body)
    except UnsupportedValue:
        return False
    return verify_bytes(message, signature, public_key)
