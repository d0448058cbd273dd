import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reliefgen import FrameMessage, decode_frame, encode_frame
from reliefgen.errors import MalformedFile

FIXTURES = Path(__file__).parent / "fixtures"


class TestGolden:
    def test_golden_bytes(self):
        # shared with the browser viewer's codec tests
        spec = json.loads((FIXTURES / "frame_golden.json").read_text())
        blob = (FIXTURES / "frame_golden.bin").read_bytes()
        assert len(blob) == spec["byte_length"] == 16 + 16 * spec["point_count"]
        assert blob[:4] == bytes.fromhex("314d4652")  # LE u32 0x52464D31
        msg = decode_frame(blob)
        assert msg.seq == spec["seq"]
        assert msg.span == spec["span"]
        assert msg.z.tolist() == spec["z"]
        assert msg.normals.tolist() == spec["normals"]
        re = encode_frame(FrameMessage(msg.seq, msg.span, msg.z, msg.normals))
        assert re == blob


class TestRoundTrip:
    @settings(max_examples=25)
    @given(st.integers(0, 2 ** 32 - 1), st.integers(1, 40),
           st.floats(0, 1e6, width=32))
    def test_lossless(self, seq, count, span):
        rng = np.random.default_rng(count)
        z = rng.normal(size=count).astype(np.float32)
        n = rng.normal(size=(count, 3)).astype(np.float32)
        msg = decode_frame(encode_frame(FrameMessage(seq, span, z, n)))
        assert msg.seq == seq
        assert msg.span == np.float32(span)
        assert np.array_equal(msg.z, z)
        assert np.array_equal(msg.normals, n)

    def test_length_formula(self):
        z = np.zeros(11, np.float32)
        n = np.zeros((11, 3), np.float32)
        assert len(encode_frame(FrameMessage(1, 0.0, z, n))) == 16 + 16 * 11


class TestErrors:
    def test_bad_magic(self):
        with pytest.raises(MalformedFile):
            decode_frame(b"\x00" * 32)

    def test_short_buffer(self):
        with pytest.raises(MalformedFile):
            decode_frame(b"\x01\x02")

    def test_length_mismatch(self):
        blob = (FIXTURES / "frame_golden.bin").read_bytes()
        with pytest.raises(MalformedFile):
            decode_frame(blob[:-4])

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            encode_frame(FrameMessage(1, 0.0, np.zeros(3, np.float32),
                                      np.zeros((2, 3), np.float32)))
