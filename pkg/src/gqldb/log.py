"""Append-only transaction log.

File layout: 8-byte magic ``GQLLOG01`` followed by framed records::

    [length: u32 LE] [kind: u8] [payload] [crc32: u32 LE over kind+payload]

where ``length`` counts the kind byte plus the payload.  Payload primitives:
unsigned LEB128 varints, strings as varint length + UTF-8 bytes, property
values as a one-byte type tag followed by the tag-specific payload (int:
zigzag varint, float: 8-byte LE double, bool: one byte, string: as above).

Record positions are the byte offset of the length field; they are the
permanent identities of all committed objects.  Within a transaction run,
records reference not-yet-appended records through provisional positions
(negative integers, ``-(index+1)`` into the run), which ``append_commit``
resolves to final offsets.
"""

from __future__ import annotations

import os
import struct
import zlib
from dataclasses import dataclass, field

from .errors import (
    BadMagic,
    CrcMismatch,
    IoFailure,
    PayloadTooLarge,
    TruncatedRecord,
    UnknownKind,
)
from .values import (
    TAG_BOOL,
    TAG_FLOAT,
    TAG_INT,
    TAG_NULL,
    TAG_STRING,
    Value,
    tag_of,
)

MAGIC = b"GQLLOG01"
MAX_PAYLOAD = 2 ** 31


# --- primitive codec ---

class Writer:
    def __init__(self):
        self.buf = bytearray()

    def varint(self, n: int):
        if n < 0:
            raise ValueError("varint must be non-negative")
        while True:
            byte = n & 0x7F
            n >>= 7
            if n:
                self.buf.append(byte | 0x80)
            else:
                self.buf.append(byte)
                return

    def signed(self, n: int):
        self.varint((n << 1) if n >= 0 else ((-n) << 1) - 1)

    def string(self, s: str):
        data = s.encode("utf-8")
        self.varint(len(data))
        self.buf += data

    def boolean(self, b: bool):
        self.buf.append(1 if b else 0)

    def value(self, v: Value):
        tag = tag_of(v)
        self.buf.append(tag)
        if tag == TAG_BOOL:
            self.boolean(v)
        elif tag == TAG_INT:
            self.signed(v)
        elif tag == TAG_FLOAT:
            self.buf += struct.pack("<d", v)
        elif tag == TAG_STRING:
            self.string(v)


class Reader:
    def __init__(self, buf: bytes, offset: int = 0):
        self.buf = buf
        self.i = offset

    def varint(self) -> int:
        shift = 0
        out = 0
        while True:
            byte = self.buf[self.i]
            self.i += 1
            out |= (byte & 0x7F) << shift
            if not byte & 0x80:
                return out
            shift += 7

    def signed(self) -> int:
        z = self.varint()
        return (z >> 1) if not z & 1 else -((z + 1) >> 1)

    def string(self) -> str:
        n = self.varint()
        out = self.buf[self.i:self.i + n].decode("utf-8")
        self.i += n
        return out

    def boolean(self) -> bool:
        b = self.buf[self.i]
        self.i += 1
        return b != 0

    def value(self) -> Value:
        tag = self.buf[self.i]
        self.i += 1
        if tag == TAG_NULL:
            return None
        if tag == TAG_BOOL:
            return self.boolean()
        if tag == TAG_INT:
            return self.signed()
        if tag == TAG_FLOAT:
            out = struct.unpack_from("<d", self.buf, self.i)[0]
            self.i += 8
            return out
        if tag == TAG_STRING:
            return self.string()
        raise ValueError(f"bad value tag {tag}")


# --- record kinds ---

TXN_BEGIN = 1
TXN_COMMIT = 2
SCHEMA_DEF = 3
NODE_TYPE_DEF = 4
EDGE_TYPE_DEF = 5
PROPERTY_DEF = 6
GRAPH_TYPE_DEF = 7
GRAPH_DEF = 8
NODE_REC = 9
EDGE_REC = 10
UPDATE_REC = 11
DELETE_REC = 12
SUB_PROPERTY_REC = 13


def _enc_pos(w: Writer, pos: int):
    if pos < 0:
        raise ValueError("unresolved provisional position")
    w.varint(pos)


@dataclass
class TxnBegin:
    kind = TXN_BEGIN
    txn_id: int

    def encode_payload(self, w: Writer):
        w.varint(self.txn_id)

    @staticmethod
    def decode_payload(r: Reader) -> "TxnBegin":
        return TxnBegin(r.varint())

    def map_positions(self, fn):
        return self


@dataclass
class TxnCommit:
    kind = TXN_COMMIT
    txn_id: int

    def encode_payload(self, w: Writer):
        w.varint(self.txn_id)

    @staticmethod
    def decode_payload(r: Reader) -> "TxnCommit":
        return TxnCommit(r.varint())

    def map_positions(self, fn):
        return self


@dataclass
class SchemaDef:
    kind = SCHEMA_DEF
    segments: tuple[str, ...]

    def encode_payload(self, w: Writer):
        w.varint(len(self.segments))
        for s in self.segments:
            w.string(s)

    @staticmethod
    def decode_payload(r: Reader) -> "SchemaDef":
        return SchemaDef(tuple(r.string() for _ in range(r.varint())))

    def map_positions(self, fn):
        return self


@dataclass
class NodeTypeDef:
    kind = NODE_TYPE_DEF
    display: str
    quoted: bool
    origin_graph: int  # GraphDef position, 0 when typed at graph-type level
    singleton: bool

    def encode_payload(self, w: Writer):
        w.string(self.display)
        w.boolean(self.quoted)
        _enc_pos(w, self.origin_graph)
        w.boolean(self.singleton)

    @staticmethod
    def decode_payload(r: Reader) -> "NodeTypeDef":
        return NodeTypeDef(r.string(), r.boolean(), r.varint(), r.boolean())

    def map_positions(self, fn):
        return NodeTypeDef(self.display, self.quoted, fn(self.origin_graph),
                           self.singleton)


@dataclass
class EdgeTypeDef:
    kind = EDGE_TYPE_DEF
    display: str
    quoted: bool
    origin_graph: int
    singleton: bool
    # (source display, source quoted, target display, target quoted) or None
    connecting: tuple[str, bool, str, bool] | None = None

    def encode_payload(self, w: Writer):
        w.string(self.display)
        w.boolean(self.quoted)
        _enc_pos(w, self.origin_graph)
        w.boolean(self.singleton)
        if self.connecting is None:
            w.boolean(False)
        else:
            w.boolean(True)
            src_d, src_q, tgt_d, tgt_q = self.connecting
            w.string(src_d)
            w.boolean(src_q)
            w.string(tgt_d)
            w.boolean(tgt_q)

    @staticmethod
    def decode_payload(r: Reader) -> "EdgeTypeDef":
        display, quoted = r.string(), r.boolean()
        origin, singleton = r.varint(), r.boolean()
        connecting = None
        if r.boolean():
            connecting = (r.string(), r.boolean(), r.string(), r.boolean())
        return EdgeTypeDef(display, quoted, origin, singleton, connecting)

    def map_positions(self, fn):
        return EdgeTypeDef(self.display, self.quoted, fn(self.origin_graph),
                           self.singleton, self.connecting)


@dataclass
class PropertyDef:
    kind = PROPERTY_DEF
    owner_type: int  # NodeTypeDef/EdgeTypeDef position
    display: str
    tag: int

    def encode_payload(self, w: Writer):
        _enc_pos(w, self.owner_type)
        w.string(self.display)
        w.varint(self.tag)

    @staticmethod
    def decode_payload(r: Reader) -> "PropertyDef":
        return PropertyDef(r.varint(), r.string(), r.varint())

    def map_positions(self, fn):
        return PropertyDef(fn(self.owner_type), self.display, self.tag)


@dataclass
class GraphTypeDef:
    kind = GRAPH_TYPE_DEF
    segments: tuple[str, ...]
    node_refs: list[int]
    edge_refs: list[int]

    def encode_payload(self, w: Writer):
        w.varint(len(self.segments))
        for s in self.segments:
            w.string(s)
        w.varint(len(self.node_refs))
        for p in self.node_refs:
            _enc_pos(w, p)
        w.varint(len(self.edge_refs))
        for p in self.edge_refs:
            _enc_pos(w, p)

    @staticmethod
    def decode_payload(r: Reader) -> "GraphTypeDef":
        segments = tuple(r.string() for _ in range(r.varint()))
        node_refs = [r.varint() for _ in range(r.varint())]
        edge_refs = [r.varint() for _ in range(r.varint())]
        return GraphTypeDef(segments, node_refs, edge_refs)

    def map_positions(self, fn):
        return GraphTypeDef(self.segments, [fn(p) for p in self.node_refs],
                            [fn(p) for p in self.edge_refs])


@dataclass
class GraphDefRec:
    kind = GRAPH_DEF
    segments: tuple[str, ...]
    closed: bool
    type_ref: int = 0  # GraphTypeDef position when closed

    def encode_payload(self, w: Writer):
        w.varint(len(self.segments))
        for s in self.segments:
            w.string(s)
        w.boolean(self.closed)
        _enc_pos(w, self.type_ref)

    @staticmethod
    def decode_payload(r: Reader) -> "GraphDefRec":
        segments = tuple(r.string() for _ in range(r.varint()))
        return GraphDefRec(segments, r.boolean(), r.varint())

    def map_positions(self, fn):
        return GraphDefRec(self.segments, self.closed, fn(self.type_ref))


@dataclass
class NodeRec:
    kind = NODE_REC
    graph: int  # GraphDef position the node was inserted into
    label_types: list[int]  # NodeTypeDef positions, label-set order
    props: list[tuple[int, Value]] = field(default_factory=list)

    def encode_payload(self, w: Writer):
        _enc_pos(w, self.graph)
        w.varint(len(self.label_types))
        for p in self.label_types:
            _enc_pos(w, p)
        w.varint(len(self.props))
        for ref, value in self.props:
            _enc_pos(w, ref)
            w.value(value)

    @staticmethod
    def decode_payload(r: Reader) -> "NodeRec":
        graph = r.varint()
        labels = [r.varint() for _ in range(r.varint())]
        props = [(r.varint(), r.value()) for _ in range(r.varint())]
        return NodeRec(graph, labels, props)

    def map_positions(self, fn):
        return NodeRec(fn(self.graph), [fn(p) for p in self.label_types],
                       [(fn(ref), v) for ref, v in self.props])


@dataclass
class EdgeRec:
    kind = EDGE_REC
    graph: int
    label_types: list[int]  # EdgeTypeDef positions
    leaving: int  # NodeRec position
    arriving: int
    props: list[tuple[int, Value]] = field(default_factory=list)

    def encode_payload(self, w: Writer):
        _enc_pos(w, self.graph)
        w.varint(len(self.label_types))
        for p in self.label_types:
            _enc_pos(w, p)
        _enc_pos(w, self.leaving)
        _enc_pos(w, self.arriving)
        w.varint(len(self.props))
        for ref, value in self.props:
            _enc_pos(w, ref)
            w.value(value)

    @staticmethod
    def decode_payload(r: Reader) -> "EdgeRec":
        graph = r.varint()
        labels = [r.varint() for _ in range(r.varint())]
        leaving, arriving = r.varint(), r.varint()
        props = [(r.varint(), r.value()) for _ in range(r.varint())]
        return EdgeRec(graph, labels, leaving, arriving, props)

    def map_positions(self, fn):
        return EdgeRec(fn(self.graph), [fn(p) for p in self.label_types],
                       fn(self.leaving), fn(self.arriving),
                       [(fn(ref), v) for ref, v in self.props])


@dataclass
class UpdateRec:
    kind = UPDATE_REC
    target: int
    sets: list[tuple[int, Value]]  # (PropertyDef pos, value); None clears

    def encode_payload(self, w: Writer):
        _enc_pos(w, self.target)
        w.varint(len(self.sets))
        for ref, value in self.sets:
            _enc_pos(w, ref)
            w.value(value)

    @staticmethod
    def decode_payload(r: Reader) -> "UpdateRec":
        target = r.varint()
        sets = [(r.varint(), r.value()) for _ in range(r.varint())]
        return UpdateRec(target, sets)

    def map_positions(self, fn):
        return UpdateRec(fn(self.target), [(fn(ref), v) for ref, v in self.sets])


@dataclass
class DeleteRec:
    kind = DELETE_REC
    target: int

    def encode_payload(self, w: Writer):
        _enc_pos(w, self.target)

    @staticmethod
    def decode_payload(r: Reader) -> "DeleteRec":
        return DeleteRec(r.varint())

    def map_positions(self, fn):
        return DeleteRec(fn(self.target))


@dataclass
class SubPropertyRec:
    kind = SUB_PROPERTY_REC
    sub_type: int  # EdgeTypeDef positions
    super_type: int

    def encode_payload(self, w: Writer):
        _enc_pos(w, self.sub_type)
        _enc_pos(w, self.super_type)

    @staticmethod
    def decode_payload(r: Reader) -> "SubPropertyRec":
        return SubPropertyRec(r.varint(), r.varint())

    def map_positions(self, fn):
        return SubPropertyRec(fn(self.sub_type), fn(self.super_type))


LogRecord = (TxnBegin | TxnCommit | SchemaDef | NodeTypeDef | EdgeTypeDef
             | PropertyDef | GraphTypeDef | GraphDefRec | NodeRec | EdgeRec
             | UpdateRec | DeleteRec | SubPropertyRec)

_DECODERS = {
    cls.kind: cls.decode_payload
    for cls in (TxnBegin, TxnCommit, SchemaDef, NodeTypeDef, EdgeTypeDef,
                PropertyDef, GraphTypeDef, GraphDefRec, NodeRec, EdgeRec,
                UpdateRec, DeleteRec, SubPropertyRec)
}


# --- framing ---

def encode_record(record: LogRecord) -> bytes:
    w = Writer()
    record.encode_payload(w)
    payload = bytes(w.buf)
    if 1 + len(payload) > MAX_PAYLOAD:
        raise PayloadTooLarge(f"payload of {len(payload)} bytes")
    body = bytes([record.kind]) + payload
    crc = zlib.crc32(body) & 0xFFFFFFFF
    return struct.pack("<I", len(body)) + body + struct.pack("<I", crc)


def decode_record(buf: bytes, offset: int) -> tuple[LogRecord, int]:
    if offset + 4 > len(buf):
        raise TruncatedRecord(offset)
    (length,) = struct.unpack_from("<I", buf, offset)
    end = offset + 4 + length + 4
    if length < 1 or end > len(buf):
        raise TruncatedRecord(offset)
    body = buf[offset + 4:offset + 4 + length]
    (crc,) = struct.unpack_from("<I", buf, offset + 4 + length)
    if zlib.crc32(body) & 0xFFFFFFFF != crc:
        raise CrcMismatch(offset)
    kind = body[0]
    decoder = _DECODERS.get(kind)
    if decoder is None:
        raise UnknownKind(offset, kind)
    r = Reader(body, 1)
    return decoder(r), end


# --- the store ---

class Store:
    """Handle on one log file; tracks the end of the committed prefix."""

    def __init__(self, path: str, create_if_missing: bool = True):
        self.path = path
        try:
            if not os.path.exists(path):
                if not create_if_missing:
                    raise IoFailure(f"no such database: {path}")
                with open(path, "wb") as f:
                    f.write(MAGIC)
            with open(path, "rb") as f:
                data = f.read()
        except OSError as exc:
            raise IoFailure(str(exc)) from exc
        if data[:8] != MAGIC:
            raise BadMagic(f"{path} is not a database file")
        self.committed_end = 8
        self.txn_count = 0
        offset = 8
        while offset < len(data):
            try:
                record, offset = decode_record(data, offset)
            except (TruncatedRecord, CrcMismatch, UnknownKind):
                break  # torn tail; ignored and truncated on next append
            if isinstance(record, TxnCommit):
                self.committed_end = offset
                self.txn_count += 1

    def append_commit(self, records: list[LogRecord]) -> dict[int, int]:
        """Atomically append one transaction run, resolving provisional
        references; returns provisional index -> final position."""
        if not records or not isinstance(records[0], TxnBegin) \
                or not isinstance(records[-1], TxnCommit):
            raise ValueError("a run must be TxnBegin ... TxnCommit")
        mapping: dict[int, int] = {}

        def resolve(pos: int) -> int:
            if pos < 0:
                idx = -pos - 1
                if idx not in mapping:
                    raise ValueError(f"forward provisional reference {idx}")
                return mapping[idx]
            return pos

        buf = bytearray()
        positions: list[int] = []
        for i, record in enumerate(records):
            pos = self.committed_end + len(buf)
            mapping[i] = pos
            positions.append(pos)
            buf += encode_record(record.map_positions(resolve))
        try:
            with open(self.path, "r+b") as f:
                f.seek(self.committed_end)
                f.truncate(self.committed_end)
                f.write(bytes(buf))
                f.flush()
                os.fsync(f.fileno())
        except OSError as exc:
            raise IoFailure(str(exc)) from exc
        self.committed_end += len(buf)
        self.txn_count += 1
        return mapping

    def replay(self, visitor):
        """Invoke ``visitor(position, record)`` for every record of every
        complete transaction, in position order."""
        try:
            with open(self.path, "rb") as f:
                data = f.read(self.committed_end)
        except OSError as exc:
            raise IoFailure(str(exc)) from exc
        offset = 8
        while offset < self.committed_end:
            pos = offset
            record, offset = decode_record(data, offset)
            visitor(pos, record)

    def resolved_records(self) -> list[tuple[int, LogRecord]]:
        out: list[tuple[int, LogRecord]] = []
        self.replay(lambda pos, rec: out.append((pos, rec)))
        return out
