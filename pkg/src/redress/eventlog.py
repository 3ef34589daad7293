"""Append-only event log: length-prefixed JSON records with a rolling hash.

Each record carries ``chain = sha256(prev_chain || canonical(record body))``,
so any dropped, reordered, or edited record breaks verification. A torn write
at the tail (incomplete length prefix or body) is treated as end-of-log so a
crash leaves a valid prefix; a sequence gap or chain mismatch anywhere else
raises CorruptLog.
"""

import hashlib
import io
import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Callable, Optional

from .attest import canonicalize
from .errors import CorruptLog

_GENESIS = "0" * 64
_LEN = struct.Struct(">I")


@dataclass(frozen=True)
class EventRecord:
    seq: int
    ts: str  # RFC 3339 UTC
    module: str
    kind: str
    payload: dict
    chain: str

    def body(self) -> dict:
        return {
            "seq": self.seq,
            "ts": self.ts,
            "module": self.module,
            "kind": self.kind,
            "payload": self.payload,
        }

    def export(self) -> dict:
        return {**self.body(), "chain": self.chain}


def _chain_hash(prev_chain: str, body: dict) -> str:
    return hashlib.sha256(prev_chain.encode("ascii") + canonicalize(body)).hexdigest()


class EventLog:
    """Single-appender log; in-memory unless given a path."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self.records: list[EventRecord] = []
        self._last_chain = _GENESIS
        self._handle: Optional[BinaryIO] = None
        self.observers: list[Callable[[EventRecord], None]] = []
        if self.path is not None:
            if self.path.exists():
                self.records = read_records(self.path)
                if self.records:
                    self._last_chain = self.records[-1].chain
            self._handle = open(self.path, "ab")

    def append(self, ts: str, module: str, kind: str, payload: dict) -> EventRecord:
        body = {
            "seq": len(self.records) + 1,
            "ts": ts,
            "module": module,
            "kind": kind,
            "payload": payload,
        }
        record = EventRecord(chain=_chain_hash(self._last_chain, body), **body)
        self.records.append(record)
        self._last_chain = record.chain
        if self._handle is not None:
            encoded = canonicalize(record.export())
            self._handle.write(_LEN.pack(len(encoded)) + encoded)
            self._handle.flush()
        for observer in self.observers:
            observer(record)
        return record

    def close(self) -> None:
        if self._handle is not None:
            self._handle.close()
            self._handle = None

    def __len__(self) -> int:
        return len(self.records)


def _read_stream(stream: BinaryIO) -> list[EventRecord]:
    records: list[EventRecord] = []
    last_chain = _GENESIS
    while True:
        prefix = stream.read(_LEN.size)
        if len(prefix) < _LEN.size:
            break  # torn tail or clean EOF
        (length,) = _LEN.unpack(prefix)
        encoded = stream.read(length)
        if len(encoded) < length:
            break  # torn tail
        try:
            raw = json.loads(encoded)
            record = EventRecord(
                seq=raw["seq"],
                ts=raw["ts"],
                module=raw["module"],
                kind=raw["kind"],
                payload=raw["payload"],
                chain=raw["chain"],
            )
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise CorruptLog(f"unreadable record after seq {len(records)}: {exc}") from exc
        if record.seq != len(records) + 1:
            raise CorruptLog(f"sequence gap: expected {len(records) + 1}, got {record.seq}")
        if record.chain != _chain_hash(last_chain, record.body()):
            raise CorruptLog(f"chain hash mismatch at seq {record.seq}")
        records.append(record)
        last_chain = record.chain
    return records


def read_records(path: str | Path) -> list[EventRecord]:
    """Load and verify a log file: contiguous sequence, intact hash chain."""
    with open(path, "rb") as stream:
        return _read_stream(stream)


def read_records_bytes(data: bytes) -> list[EventRecord]:
    """Verify a log held in memory (tests, truncation experiments)."""
    return _read_stream(io.BytesIO(data))
