import hashlib
import json
import random
from datetime import datetime, timezone

import pytest
from hypothesis import given
from hypothesis import strategies as st

from redress import attest
from redress.errors import MalformedDocument, NotValidated, UnsupportedValue

NOW = datetime(2025, 3, 1, 12, 0, 0, tzinfo=timezone.utc)
KEY = attest.SigningKey.from_seed(42)
OTHER_KEY = attest.SigningKey.from_seed(43)


class TestCanonicalize:
    def test_sorted_keys(self):
        assert attest.canonicalize({"b": 1, "a": 2}) == b'{"a":2,"b":1}'

    def test_nested_sorting(self):
        doc = {"outer": {"z": True, "a": [{"y": 1, "x": 2}]}}
        assert attest.canonicalize(doc) == b'{"outer":{"a":[{"x":2,"y":1}],"z":true}}'

    def test_float_rejected(self):
        with pytest.raises(UnsupportedValue):
            attest.canonicalize({"amount": 1.5})

    def test_none_rejected(self):
        with pytest.raises(UnsupportedValue):
            attest.canonicalize({"amount": None})

    def test_non_string_key_rejected(self):
        with pytest.raises(UnsupportedValue):
            attest.canonicalize({1: "x"})

    def test_utf8_not_escaped(self):
        assert attest.canonicalize({"t": "héllo"}) == '{"t":"héllo"}'.encode("utf-8")

    @given(
        st.dictionaries(
            st.text(max_size=8),
            st.one_of(st.integers(), st.booleans(), st.text(max_size=8)),
            max_size=6,
        )
    )
    def test_insertion_order_irrelevant(self, doc):
        items = list(doc.items())
        random.Random(0).shuffle(items)
        assert attest.canonicalize(dict(items)) == attest.canonicalize(doc)

    def test_digest_is_sha256_of_canonical_bytes(self):
        doc = {"b": 1, "a": "x"}
        assert attest.digest(doc) == hashlib.sha256(b'{"a":"x","b":1}').digest()


class TestAcknowledgement:
    def test_round_trip_verifies(self):
        ack = attest.issue_ack("case-1", {"reporter": "alice"}, NOW, KEY)
        assert attest.verify(ack, KEY.public_bytes)
        assert attest.verify(ack.envelope(), KEY.public_bytes)

    def test_digest_deterministic(self):
        a = attest.issue_ack("case-1", {"reporter": "alice"}, NOW, KEY)
        b = attest.issue_ack("case-1", {"reporter": "alice"}, NOW, KEY)
        assert a.report_digest == b.report_digest
        assert a.signature == b.signature

    def test_wrong_key_fails(self):
        ack = attest.issue_ack("case-1", {"reporter": "alice"}, NOW, KEY)
        assert not attest.verify(ack, OTHER_KEY.public_bytes)


class TestCertificate:
    def _issue(self):
        return attest.issue_certificate(
            certificate_id="cert-1",
            case_id="case-1",
            abuse_type="Harassment",
            description="repeated hostile messages",
            occurred_at=NOW,
            outcome_decision="Validated",
            aggregate_impact=4,
            now=NOW,
            signing_key=KEY,
        )

    def test_fields_copied(self):
        certificate = self._issue()
        assert certificate.abuse_type == "Harassment"
        assert certificate.aggregate_impact == 4
        assert attest.verify(certificate, KEY.public_bytes)

    def test_rejected_case_refused(self):
        with pytest.raises(NotValidated):
            attest.issue_certificate(
                certificate_id="cert-2",
                case_id="case-2",
                abuse_type="Threat",
                description="x",
                occurred_at=NOW,
                outcome_decision="RejectedGoodFaith",
                aggregate_impact=1,
                now=NOW,
                signing_key=KEY,
            )

    def test_envelope_shape(self):
        envelope = self._issue().envelope()
        assert set(envelope) == {"body", "signature", "key_id"}
        assert envelope["key_id"] == KEY.key_id
        # envelope is pure JSON and survives a round trip
        assert attest.verify(json.dumps(envelope), KEY.public_bytes)


class TestTamperDetection:
    def test_single_byte_mutations_all_fail(self):
        certificate = attest.issue_certificate(
            certificate_id="cert-9",
            case_id="case-9",
            abuse_type="Doxxing",
            description="posted my address",
            occurred_at=NOW,
            outcome_decision="Validated",
            aggregate_impact=5,
            now=NOW,
            signing_key=KEY,
        )
        encoded = attest.canonicalize(certificate.envelope())
        rng = random.Random(99)
        for _ in range(1000):
            position = rng.randrange(len(encoded))
            replacement = rng.randrange(256)
            if encoded[position] == replacement:
                continue
            mutated = encoded[:position] + bytes([replacement]) + encoded[position + 1 :]
            try:
                assert not attest.verify(mutated, KEY.public_bytes)
            except MalformedDocument:
                pass  # unparseable counts as failed verification

    def test_truncated_document(self):
        ack = attest.issue_ack("case-1", {"n": 1}, NOW, KEY)
        encoded = attest.canonicalize(ack.envelope())
        with pytest.raises(MalformedDocument):
            attest.verify(encoded[: len(encoded) // 2], KEY.public_bytes)

    def test_missing_fields(self):
        with pytest.raises(MalformedDocument):
            attest.verify({"body": {}}, KEY.public_bytes)

    def test_non_canonical_base64_rejected(self):
        ack = attest.issue_ack("case-1", {"n": 1}, NOW, KEY)
        envelope = ack.envelope()
        # flip a padding bit that a lenient decoder would silently drop:
        # the final group's second char keeps only its top 2 of 6 bits
        alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/"
        sig = envelope["signature"]
        assert sig.endswith("==")
        flipped = alphabet[alphabet.index(sig[-3]) ^ 1]
        envelope["signature"] = sig[:-3] + flipped + sig[-2:]
        with pytest.raises(MalformedDocument):
            attest.verify(envelope, KEY.public_bytes)

    def test_envelope_key_id_bound_to_body(self):
        ack = attest.issue_ack("case-1", {"n": 1}, NOW, KEY)
        envelope = ack.envelope()
        envelope["key_id"] = "0" * 16
        with pytest.raises(MalformedDocument):
            attest.verify(envelope, KEY.public_bytes)
