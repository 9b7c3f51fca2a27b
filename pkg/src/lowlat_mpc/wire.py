"""Binary frames for online reveals and offline dealer distribution.

All ring elements travel as little-endian 8-byte words (low word first
for rings wider than 64 bits). Byte accounting counts payload bytes only.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import ProtocolError
from .ring import Ring

ONLINE_MAGIC = b"MPCR"
OFFLINE_MAGIC = b"MPCD"

_ONLINE_HEAD = struct.Struct("<4sIHHB")  # magic, round, sender, cid length, ndim
_OFFLINE_HEAD = struct.Struct("<4sQHBHB")  # magic, session, cid length, role, key, ndim
_TAIL = struct.Struct("<BI")  # words per element, payload length

ROLE_ENTRY = 0
ROLE_MASK = 1


@dataclass(frozen=True)
class Frame:
    round_index: int
    sender: int
    correlation_id: str
    shape: tuple
    payload: bytes

    @property
    def payload_length(self) -> int:
        return len(self.payload)


@dataclass(frozen=True)
class OfflineFrame:
    session_id: int
    correlation_id: str
    role: int
    key: int
    shape: tuple
    payload: bytes


def _pack_shape(shape) -> bytes:
    return struct.pack(f"<{len(shape)}I", *shape)


def _body(values: np.ndarray, ring: Ring) -> tuple[bytes, bytes]:
    payload = ring.to_words(values)
    return _TAIL.pack(ring.words, len(payload)), payload


def encode_frame(round_index: int, sender: int, correlation_id: str,
                 values: np.ndarray, ring: Ring) -> bytes:
    cid = correlation_id.encode()
    tail, payload = _body(values, ring)
    return b"".join([
        _ONLINE_HEAD.pack(ONLINE_MAGIC, round_index, sender, len(cid), values.ndim),
        cid, _pack_shape(values.shape), tail, payload,
    ])


def _read_tail(buf: bytes, off: int, ndim: int, ring: Ring):
    shape = struct.unpack_from(f"<{ndim}I", buf, off)
    off += 4 * ndim
    words, length = _TAIL.unpack_from(buf, off)
    off += _TAIL.size
    if words != ring.words:
        raise ProtocolError(f"frame carries {words}-word elements, ring expects {ring.words}")
    payload = bytes(buf[off:off + length])
    if len(payload) != length:
        raise ProtocolError("truncated frame payload")
    return tuple(shape), payload


def decode_frame(buf: bytes, ring: Ring) -> tuple[Frame, np.ndarray]:
    magic, rnd, sender, cid_len, ndim = _ONLINE_HEAD.unpack_from(buf, 0)
    if magic != ONLINE_MAGIC:
        raise ProtocolError("not an online frame")
    off = _ONLINE_HEAD.size
    cid = bytes(buf[off:off + cid_len]).decode()
    shape, payload = _read_tail(buf, off + cid_len, ndim, ring)
    return Frame(rnd, sender, cid, shape, payload), ring.from_words(payload, shape)


def encode_offline_frame(session_id: int, correlation_id: str, role: int, key: int,
                         values: np.ndarray, ring: Ring) -> bytes:
    cid = correlation_id.encode()
    tail, payload = _body(values, ring)
    return b"".join([
        _OFFLINE_HEAD.pack(OFFLINE_MAGIC, session_id, len(cid), role, key, values.ndim),
        cid, _pack_shape(values.shape), tail, payload,
    ])


def decode_offline_frame(buf: bytes, ring: Ring) -> tuple[OfflineFrame, np.ndarray]:
    magic, session_id, cid_len, role, key, ndim = _OFFLINE_HEAD.unpack_from(buf, 0)
    if magic != OFFLINE_MAGIC:
        raise ProtocolError("not an offline frame")
    off = _OFFLINE_HEAD.size
    cid = bytes(buf[off:off + cid_len]).decode()
    shape, payload = _read_tail(buf, off + cid_len, ndim, ring)
    frame = OfflineFrame(session_id, cid, role, key, shape, payload)
    return frame, ring.from_words(payload, shape)
