import struct

import pytest

from redress.errors import CorruptLog
from redress.eventlog import EventLog, read_records, read_records_bytes


def build_log(path, n=5):
    log = EventLog(path)
    for i in range(n):
        log.append(f"2025-01-01T00:00:{i:02d}Z", "platform", "tick", {"i": i})
    log.close()
    return path


class TestRoundTrip:
    def test_append_read(self, tmp_path):
        path = build_log(tmp_path / "events.log")
        records = read_records(path)
        assert [r.seq for r in records] == [1, 2, 3, 4, 5]
        assert records[2].payload == {"i": 2}

    def test_reopen_continues_chain(self, tmp_path):
        path = build_log(tmp_path / "events.log")
        log = EventLog(path)
        log.append("2025-01-01T00:01:00Z", "platform", "tick", {"i": 5})
        log.close()
        assert [r.seq for r in read_records(path)] == [1, 2, 3, 4, 5, 6]

    def test_empty_log(self, tmp_path):
        path = tmp_path / "events.log"
        EventLog(path).close()
        assert read_records(path) == []


class TestCorruption:
    def _raw_records(self, path):
        data = path.read_bytes()
        out = []
        offset = 0
        while offset < len(data):
            (length,) = struct.unpack(">I", data[offset : offset + 4])
            out.append(data[offset : offset + 4 + length])
            offset += 4 + length
        return out

    def test_deleted_middle_record(self, tmp_path):
        path = build_log(tmp_path / "events.log")
        chunks = self._raw_records(path)
        mutilated = b"".join(chunks[:2] + chunks[3:])
        with pytest.raises(CorruptLog):
            read_records_bytes(mutilated)

    def test_tampered_payload(self, tmp_path):
        path = build_log(tmp_path / "events.log")
        data = path.read_bytes()
        target = data.find(b'"i":2')
        tampered = data[:target] + b'"i":7' + data[target + 5 :]
        with pytest.raises(CorruptLog):
            read_records_bytes(tampered)

    def test_torn_tail_tolerated(self, tmp_path):
        path = build_log(tmp_path / "events.log")
        data = path.read_bytes()
        assert len(read_records_bytes(data[:-3])) == 4  # last record torn off

    def test_truncation_at_every_boundary(self, tmp_path):
        path = build_log(tmp_path / "events.log")
        chunks = self._raw_records(path)
        for keep in range(len(chunks) + 1):
            prefix = b"".join(chunks[:keep])
            assert len(read_records_bytes(prefix)) == keep
