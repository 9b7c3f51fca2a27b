import numpy as np
import pytest
from hypothesis import given, strategies as st

from lowlat_mpc.errors import ConfigurationError, EncodingRangeError
from lowlat_mpc.ring import (RING64, FixedPointCodec, Ring, decode, encode, ring_add, ring_mul,
                             ring_sub, truncate)

Q = 1 << 64
codec = FixedPointCodec(16)


def test_encode_examples():
    assert encode(1.0) == 65536
    assert encode(0.0) == 0
    assert encode(-0.5) == Q - 32768


def test_decode_examples():
    assert decode(65536) == 1.0
    assert decode(Q - 32768) == -0.5
    assert abs(decode(encode(3.14159)) - 3.14159) <= 2 ** -17


def test_ring_ops_wrap():
    assert ring_add(Q - 1, 1) == 0
    assert ring_mul(2, 3) == 6
    assert ring_mul(1 << 63, 2) == 0
    assert ring_sub(0, 1) == Q - 1


def test_truncate_examples():
    assert truncate(encode(6.0) * 65536 % Q, 16, RING64) == encode(6.0)
    assert truncate(0, 16, RING64) == 0
    scaled = (RING64.to_signed(encode(-2.0)) * 65536) % Q
    assert truncate(scaled, 16, RING64) == encode(-2.0)


@given(st.floats(-1e4, 1e4, allow_nan=False))
def test_roundtrip_bound(x):
    assert abs(decode(encode(x)) - x) <= 2 ** -17


def test_vector_roundtrip():
    xs = np.linspace(-100, 100, 41)
    enc = codec.encode(xs)
    assert enc.dtype == object and enc.shape == xs.shape
    np.testing.assert_allclose(codec.decode(enc), xs, atol=2 ** -17)


def test_encode_rejects_out_of_range_and_nan():
    with pytest.raises(EncodingRangeError):
        codec.encode(2.0 ** 47)
    with pytest.raises(EncodingRangeError):
        codec.encode(float("nan"))


def test_precision_bounds():
    with pytest.raises(ConfigurationError):
        FixedPointCodec(7)
    with pytest.raises(ConfigurationError):
        FixedPointCodec(33)
    assert FixedPointCodec(32).scale == 2 ** 32


@pytest.mark.parametrize("bits", [8, 64, 65, 128, 256])
def test_words_roundtrip(bits, rng):
    ring = Ring(bits)
    vals = ring.random(rng, (3, 5))
    assert all(0 <= int(v) < ring.modulus for v in vals.flat)
    back = ring.from_words(ring.to_words(vals), (3, 5))
    assert (back == vals).all()
    assert len(ring.to_words(vals)) == 15 * ring.element_bytes


def test_wide_ring_arithmetic():
    ring = Ring(256)
    a = ring.asarray([ring.modulus - 1, 5])
    assert list(ring.add(a, 1)) == [0, 6]
    assert ring.to_signed(ring.neg(ring.asarray(3))) == -3
    assert ring.asarray(7).shape == ()
