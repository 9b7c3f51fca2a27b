import numpy as np
import pytest
from scipy import stats

from lowlat_mpc.errors import ConfigurationError, ProtocolError
from lowlat_mpc.ring import RING64, FixedPointCodec, Ring
from lowlat_mpc.sharing import (ShareVector, ZeroShareGenerator, add_public, add_shared, align,
                                mul_public, przs_next, reconstruct, share, sub_shared)

Q = RING64.modulus
codec = FixedPointCodec(16)


def test_share_roundtrip(rng):
    shares = share([5], 3, rng, RING64)
    assert len(shares) == 3
    assert list(reconstruct(shares)) == [5]


def test_zero_secret_two_parties_are_negatives(rng):
    s0, s1 = share([0], 2, rng, RING64)
    assert (int(s0.data[0]) + int(s1.data[0])) % Q == 0


def test_random_roundtrip(rng):
    x = RING64.random(rng, 50)
    assert (reconstruct(share(x, 4, rng, RING64)) == x).all()


def test_reconstruct_zero_shares():
    shares = [ShareVector(p, RING64.zeros(3), RING64) for p in range(3)]
    assert list(reconstruct(shares)) == [0, 0, 0]


def test_codec_composition(rng):
    shares = share(codec.encode(np.array([2.5])), 3, rng, RING64, frac_bits=16)
    assert codec.decode(reconstruct(shares))[0] == 2.5


def test_share_needs_two_parties(rng):
    with pytest.raises(ConfigurationError):
        share([1], 1, rng, RING64)


def test_reconstruct_rejects_mismatch(rng):
    a = share([1, 2], 2, rng, RING64)
    b = share([1, 2, 3], 2, rng, RING64)
    with pytest.raises(ProtocolError):
        reconstruct([a[0], b[1]])


def test_share_uniformity_small_ring(rng):
    ring = Ring(8)
    first = [int(share([77], 3, rng, ring)[0].data[0]) for _ in range(10_000)]
    counts = np.bincount(first, minlength=256)
    assert stats.chisquare(counts).pvalue > 0.01


def test_przs_sums_to_zero():
    gens = [ZeroShareGenerator(p, 3, seed=9, ring=RING64) for p in range(3)]
    assert list(reconstruct([przs_next(g, 4) for g in gens])) == [0, 0, 0, 0]


def test_przs_deterministic():
    a = ZeroShareGenerator(1, 3, seed=5, ring=RING64)
    b = ZeroShareGenerator(1, 3, seed=5, ring=RING64)
    for _ in range(3):
        assert (a.next(6) == b.next(6)).all()


def test_przs_two_parties_negatives():
    g0, g1 = (ZeroShareGenerator(p, 2, seed=1, ring=RING64) for p in range(2))
    x0, x1 = g0.next(5), g1.next(5)
    assert all((int(a) + int(b)) % Q == 0 for a, b in zip(x0, x1))
    assert any(int(a) != 0 for a in x0)


def test_linear_ops(rng):
    a, b = share([3], 3, rng, RING64), share([4], 3, rng, RING64)
    assert list(reconstruct([add_shared(x, y) for x, y in zip(a, b)])) == [7]
    assert list(reconstruct([sub_shared(x, y) for x, y in zip(a, b)])) == [Q - 1]

    one = share(codec.encode(np.array([1.0])), 3, rng, RING64, 16)
    out = reconstruct([add_public(s, codec.encode(2.0)) for s in one])
    assert out[0] == codec.encode(3.0)
    half = share(codec.encode(np.array([1.5])), 3, rng, RING64, 16)
    assert reconstruct([mul_public(s, 2) for s in half])[0] == codec.encode(3.0)


def test_strict_binary_ops(rng):
    a = share([1], 2, rng, RING64, frac_bits=16)
    b = share([1], 2, rng, RING64, frac_bits=32)
    with pytest.raises(ProtocolError):
        add_shared(a[0], b[0])
    with pytest.raises(ProtocolError):
        add_shared(a[0], a[1])


def test_align_scales_up(rng):
    a = share(codec.encode(np.array([1.25])), 2, rng, RING64, 16)
    up = [align(s, 20) for s in a]
    assert up[0].frac_bits == 20
    assert codec.decode(reconstruct(up), 20)[0] == 1.25
    assert align(a[0], 32).scale_exponent(16) == 2
