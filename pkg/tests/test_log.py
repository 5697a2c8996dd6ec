import hashlib
import random
import struct
import zlib

import pytest

from gqldb import log
from gqldb.errors import (
    BadMagic,
    CrcMismatch,
    IoFailure,
    TruncatedRecord,
    UnknownKind,
)


# --- golden frames, built independently from the documented layout ---

def frame(kind: int, payload: bytes) -> bytes:
    body = bytes([kind]) + payload
    return (struct.pack("<I", len(body)) + body
            + struct.pack("<I", zlib.crc32(body)))


def leb128(n: int) -> bytes:
    out = bytearray()
    while True:
        b = n & 0x7F
        n >>= 7
        if n:
            out.append(b | 0x80)
        else:
            out.append(b)
            return bytes(out)


def test_golden_txn_commit_frame():
    # TxnCommit(1): payload is varint(1); kind byte 2.
    expected = frame(2, b"\x01")
    assert expected == b"\x02\x00\x00\x00" + b"\x02\x01" \
        + struct.pack("<I", zlib.crc32(b"\x02\x01"))
    assert log.encode_record(log.TxnCommit(1)) == expected


def test_golden_schema_def_frame():
    # SchemaDef(("yc",)): varint count then length-prefixed UTF-8.
    payload = leb128(1) + leb128(2) + b"yc"
    assert log.encode_record(log.SchemaDef(("yc",))) == frame(3, payload)


def test_golden_delete_frame_multibyte_varint():
    payload = leb128(300)
    assert log.encode_record(log.DeleteRec(300)) == frame(12, payload)
    assert payload == b"\xac\x02"


def test_golden_node_frame_with_values():
    # NodeRec(graph=9, label_types=[5], props=[(7, -3), (8, True)]).
    payload = (leb128(9) + leb128(1) + leb128(5) + leb128(2)
               + leb128(7) + bytes([2]) + leb128(5)   # int tag, zigzag(-3)=5
               + leb128(8) + bytes([1, 1]))           # bool tag, true
    rec = log.NodeRec(9, [5], [(7, -3), (8, True)])
    assert log.encode_record(rec) == frame(9, payload)


def test_golden_float_encoding():
    # UpdateRec(1, [(4, 2.5)]): target, count, ref, float tag, 8-byte LE double.
    payload = (leb128(1) + leb128(1) + leb128(4) + bytes([3])
               + struct.pack("<d", 2.5))
    rec = log.UpdateRec(1, [(4, 2.5)])
    assert log.encode_record(rec) == frame(11, payload)


def test_zigzag_oracle():
    w = log.Writer()
    for n in (0, -1, 1, -2, 2, 2**40, -(2**40)):
        w.buf.clear()
        w.signed(n)
        # Zigzag: non-negatives map to evens, negatives to odds.
        expected = 2 * n if n >= 0 else -2 * n - 1
        assert bytes(w.buf) == leb128(expected)
        assert log.Reader(bytes(w.buf)).signed() == n


# --- codec round-trip ---

def random_record(rng: random.Random) -> log.LogRecord:
    def value():
        return rng.choice([None, True, False, rng.randrange(-10**9, 10**9),
                           rng.random() * 100, "s'tr", "", "é☃"])

    def props():
        return [(rng.randrange(1, 1000), value())
                for _ in range(rng.randrange(0, 4))]

    choices = [
        lambda: log.TxnBegin(rng.randrange(1000)),
        lambda: log.TxnCommit(rng.randrange(1000)),
        lambda: log.SchemaDef(tuple(f"s{i}" for i in range(rng.randrange(1, 4)))),
        lambda: log.NodeTypeDef("Person", rng.random() < 0.5,
                                rng.randrange(100), rng.random() < 0.5),
        lambda: log.EdgeTypeDef("Member", True, rng.randrange(100), True,
                                rng.choice([None, ("A", False, "B", True)])),
        lambda: log.PropertyDef(rng.randrange(1, 100), "name",
                                rng.randrange(5)),
        lambda: log.GraphTypeDef(("a", "b"),
                                 [rng.randrange(100) for _ in range(2)],
                                 [rng.randrange(100)]),
        lambda: log.GraphDefRec(("a", "g"), rng.random() < 0.5,
                                rng.randrange(100)),
        lambda: log.NodeRec(rng.randrange(100),
                            [rng.randrange(1, 100)], props()),
        lambda: log.EdgeRec(rng.randrange(100), [rng.randrange(1, 100)],
                            rng.randrange(1, 100), rng.randrange(1, 100),
                            props()),
        lambda: log.UpdateRec(rng.randrange(1, 100), props()),
        lambda: log.DeleteRec(rng.randrange(1, 10**9)),
        lambda: log.SubPropertyRec(rng.randrange(1, 100), rng.randrange(1, 100)),
    ]
    return rng.choice(choices)()


def test_roundtrip_random_records():
    rng = random.Random(5)
    for _ in range(500):
        rec = random_record(rng)
        buf = log.encode_record(rec)
        decoded, end = log.decode_record(buf, 0)
        assert end == len(buf)
        assert decoded == rec


def test_roundtrip_concatenated_stream():
    rng = random.Random(6)
    records = [random_record(rng) for _ in range(40)]
    buf = b"".join(log.encode_record(r) for r in records)
    out = []
    offset = 0
    while offset < len(buf):
        rec, offset = log.decode_record(buf, offset)
        out.append(rec)
    assert out == records


# --- corruption detection ---

def test_crc_mismatch_on_any_body_bitflip():
    buf = log.encode_record(log.SchemaDef(("yc", "social")))
    for i in range(4, len(buf) - 4):  # every body byte
        corrupt = bytearray(buf)
        corrupt[i] ^= 0x40
        with pytest.raises(CrcMismatch) as exc:
            log.decode_record(bytes(corrupt), 0)
        assert exc.value.position == 0


def test_truncated_record():
    buf = log.encode_record(log.DeleteRec(7))
    for cut in range(len(buf)):
        with pytest.raises(TruncatedRecord):
            log.decode_record(buf[:cut], 0)


def test_unknown_kind():
    buf = frame(99, b"")
    with pytest.raises(UnknownKind) as exc:
        log.decode_record(buf, 0)
    assert exc.value.kind == 99


def test_unresolved_provisional_position_is_rejected():
    with pytest.raises(ValueError):
        log.encode_record(log.DeleteRec(-1))


# --- the store ---

def make_store(tmp_path, name="t.gqldb") -> log.Store:
    return log.Store(str(tmp_path / name))


def run_of(*records) -> list[log.LogRecord]:
    return [log.TxnBegin(1), *records, log.TxnCommit(1)]


def test_fresh_store_is_magic_only(tmp_path):
    store = make_store(tmp_path)
    assert (tmp_path / "t.gqldb").read_bytes() == b"GQLLOG01"
    assert store.committed_end == 8
    assert store.txn_count == 0


def test_missing_file_without_create(tmp_path):
    with pytest.raises(IoFailure):
        log.Store(str(tmp_path / "absent.gqldb"), create_if_missing=False)


def test_bad_magic(tmp_path):
    path = tmp_path / "junk.gqldb"
    path.write_bytes(b"NOTADB00rest")
    with pytest.raises(BadMagic):
        log.Store(str(path))


def test_append_positions_are_byte_offsets(tmp_path):
    store = make_store(tmp_path)
    run = run_of(log.SchemaDef(("a",)), log.GraphDefRec(("a", "g"), False, 0))
    mapping = store.append_commit(run)
    offset = 8
    for i, rec in enumerate(run):
        assert mapping[i] == offset
        offset += len(log.encode_record(rec))
    assert store.committed_end == offset
    assert store.txn_count == 1


def test_provisional_references_resolve_to_offsets(tmp_path):
    store = make_store(tmp_path)
    run = [log.TxnBegin(1),
           log.SchemaDef(("a",)),                      # index 1 -> pos -2
           log.GraphDefRec(("a", "g"), False, 0),      # index 2 -> pos -3
           log.NodeTypeDef("x", False, -3, True),      # index 3 -> pos -4
           log.NodeRec(-3, [-4], []),
           log.TxnCommit(1)]
    mapping = store.append_commit(run)
    records = store.resolved_records()
    node = records[4][1]
    assert isinstance(node, log.NodeRec)
    assert node.graph == mapping[2]
    assert node.label_types == [mapping[3]]


def test_forward_provisional_reference_is_rejected(tmp_path):
    store = make_store(tmp_path)
    with pytest.raises(ValueError):
        store.append_commit([log.TxnBegin(1), log.NodeRec(-3, [], []),
                             log.SchemaDef(("a",)), log.TxnCommit(1)])


def test_run_must_be_bracketed(tmp_path):
    store = make_store(tmp_path)
    with pytest.raises(ValueError):
        store.append_commit([log.SchemaDef(("a",))])
    with pytest.raises(ValueError):
        store.append_commit([])


def test_replay_order_and_content(tmp_path):
    store = make_store(tmp_path)
    store.append_commit(run_of(log.SchemaDef(("a",))))
    store.append_commit(run_of(log.SchemaDef(("b",))))
    records = store.resolved_records()
    positions = [pos for pos, _ in records]
    assert positions == sorted(positions)
    kinds = [type(rec).__name__ for _, rec in records]
    assert kinds == ["TxnBegin", "SchemaDef", "TxnCommit"] * 2


def test_append_is_pure_append(tmp_path):
    path = tmp_path / "t.gqldb"
    store = log.Store(str(path))
    digests = []
    for i in range(4):
        store.append_commit(run_of(log.SchemaDef((f"s{i}",))))
        digests.append((store.committed_end,
                        hashlib.sha256(path.read_bytes()).hexdigest()))
    final = path.read_bytes()
    for end, digest in digests:
        assert hashlib.sha256(final[:end]).hexdigest() == digest


def test_torn_tail_is_ignored_and_overwritten(tmp_path):
    path = tmp_path / "t.gqldb"
    store = log.Store(str(path))
    store.append_commit(run_of(log.SchemaDef(("a",))))
    good_end = store.committed_end
    # Simulate a crash mid-write: garbage past the committed prefix.
    with open(path, "ab") as f:
        f.write(b"\xff\xfe\x00garbage")
    reopened = log.Store(str(path))
    assert reopened.committed_end == good_end
    assert reopened.txn_count == 1
    reopened.append_commit(run_of(log.SchemaDef(("b",))))
    # The torn bytes are gone; the whole file now replays cleanly.
    records = reopened.resolved_records()
    assert [r.segments for _, r in records
            if isinstance(r, log.SchemaDef)] == [("a",), ("b",)]
    assert reopened.committed_end == path.stat().st_size


def test_uncommitted_run_tail_is_ignored(tmp_path):
    path = tmp_path / "t.gqldb"
    store = log.Store(str(path))
    store.append_commit(run_of(log.SchemaDef(("a",))))
    good_end = store.committed_end
    # A run whose TxnCommit never made it to disk.
    with open(path, "ab") as f:
        f.write(log.encode_record(log.TxnBegin(2)))
        f.write(log.encode_record(log.SchemaDef(("b",))))
    reopened = log.Store(str(path))
    assert reopened.committed_end == good_end
    assert [r.segments for _, r in reopened.resolved_records()
            if isinstance(r, log.SchemaDef)] == [("a",)]


def test_corruption_inside_committed_region_fails_replay(tmp_path):
    path = tmp_path / "t.gqldb"
    store = log.Store(str(path))
    store.append_commit(run_of(log.SchemaDef(("alpha",))))
    data = bytearray(path.read_bytes())
    data[store.committed_end - 6] ^= 0x01  # inside the TxnCommit frame
    path.write_bytes(bytes(data))
    reopened = log.Store(str(path))
    # The damaged run no longer counts as committed.
    assert reopened.committed_end == 8
    assert reopened.txn_count == 0
