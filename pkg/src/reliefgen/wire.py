"""Binary frame codec shared by the streaming service and its clients.

Layout (little-endian): magic u32 "RFM1", seq u32, point_count u32,
span f32, point_count f32 heights, 3*point_count f32 normals.  Total
byte length is 16 + 16 * point_count.  Point order follows the
session's visible-index order announced at connect time.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import MalformedFile

MAGIC = 0x52464D31  # u32 value; spells "RFM1" most-significant byte first
_HEADER = struct.Struct("<IIIf")


@dataclass(frozen=True)
class FrameMessage:
    seq: int
    span: float
    z: np.ndarray        # (N,) float32
    normals: np.ndarray  # (N, 3) float32

    @property
    def point_count(self):
        return len(self.z)


def encode_frame(msg: FrameMessage) -> bytes:
    z = np.ascontiguousarray(msg.z, dtype="<f4")
    n = np.ascontiguousarray(msg.normals, dtype="<f4")
    if n.shape != (len(z), 3):
        raise ValueError("normals must be (point_count, 3)")
    head = _HEADER.pack(MAGIC, msg.seq, len(z), msg.span)
    return head + z.tobytes() + n.tobytes()


def decode_frame(buf: bytes) -> FrameMessage:
    if len(buf) < _HEADER.size:
        raise MalformedFile(f"frame too short ({len(buf)} bytes)")
    magic, seq, count, span = _HEADER.unpack_from(buf)
    if magic != MAGIC:
        raise MalformedFile(f"bad frame magic 0x{magic:08X}")
    if len(buf) != 16 + 16 * count:
        raise MalformedFile(
            f"frame length {len(buf)} != {16 + 16 * count} for {count} points")
    z = np.frombuffer(buf, dtype="<f4", count=count, offset=16)
    normals = np.frombuffer(buf, dtype="<f4", count=3 * count,
                            offset=16 + 4 * count).reshape(count, 3)
    return FrameMessage(seq=int(seq), span=float(span), z=z, normals=normals)
