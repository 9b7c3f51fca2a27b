"""Additive (n, 0) secret sharing over a power-of-two ring."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ProtocolError
from .ring import Ring, norm_shape

PartyId = int


@dataclass(frozen=True, eq=False)
class ShareVector:
    """One party's additive share of a secret tensor.

    ``frac_bits`` counts the fractional bits embedded in the secret: 0 for
    plain ring integers, L for a freshly encoded fixed-point value, and a
    multiple of the working precision after products whose rescaling has
    not happened yet.
    """

    owner: PartyId
    data: np.ndarray
    ring: Ring
    frac_bits: int = 0

    def __post_init__(self):
        if not (isinstance(self.data, np.ndarray) and self.data.dtype == object):
            object.__setattr__(self, "data", np.asarray(self.data, dtype=object))

    @property
    def shape(self) -> tuple:
        return self.data.shape

    def __len__(self):
        return len(self.data)

    def scale_exponent(self, precision_bits: int) -> int:
        """Number of whole B = 2**precision_bits factors embedded."""
        return self.frac_bits // precision_bits

    def with_data(self, data, frac_bits: int | None = None) -> "ShareVector":
        return ShareVector(
            self.owner, data, self.ring, self.frac_bits if frac_bits is None else frac_bits
        )

    def __getitem__(self, idx) -> "ShareVector":
        return self.with_data(self.data[idx])

    def reshape(self, *shape) -> "ShareVector":
        return self.with_data(self.data.reshape(*shape))


def share(secret, n: int, rng: np.random.Generator, ring: Ring, frac_bits: int = 0):
    """Split ``secret`` into ``n`` shares: n-1 uniform, the last one balancing."""
    if n < 2:
        raise ConfigurationError(f"sharing needs n >= 2 parties, got {n}")
    secret = ring.asarray(secret)
    parts = [ring.random(rng, secret.shape) for _ in range(n - 1)]
    last = secret
    for p in parts:
        last = ring.sub(last, p)
    parts.append(last)
    return [ShareVector(i, d, ring, frac_bits) for i, d in enumerate(parts)]


def reconstruct(shares) -> np.ndarray:
    if not shares:
        raise ProtocolError("nothing to reconstruct")
    first = shares[0]
    for s in shares[1:]:
        if s.shape != first.shape:
            raise ProtocolError(f"share shapes differ: {s.shape} vs {first.shape}")
        if s.frac_bits != first.frac_bits:
            raise ProtocolError("shares carry different scales")
    ring = first.ring
    total = first.data
    for s in shares[1:]:
        total = ring.add(total, s.data)
    return total


class ZeroShareGenerator:
    """Pairwise-seeded pseudorandom zero sharing for one party.

    Party p keeps one stream per ordered pair (p, q) and (q, p). Its output
    is sum_q PRG(p, q) - PRG(q, p); summed over all parties every stream
    appears once with each sign, so the total is exactly zero.
    """

    def __init__(self, party: PartyId, n_parties: int, seed: int, ring: Ring):
        if not 0 <= party < n_parties:
            raise ConfigurationError(f"party {party} outside [0, {n_parties})")
        self.party = party
        self.n_parties = n_parties
        self.ring = ring
        self._out = {}
        self._in = {}
        for q in range(n_parties):
            if q == party:
                continue
            self._out[q] = _pair_stream(seed, party, q)
            self._in[q] = _pair_stream(seed, q, party)

    def next(self, shape) -> np.ndarray:
        shape = norm_shape(shape)
        acc = self.ring.zeros(shape)
        for q in sorted(self._out):
            acc = acc + self.ring.random(self._out[q], shape) - self.ring.random(self._in[q], shape)
        return acc & self.ring.mask


def _pair_stream(seed: int, p: int, q: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(7, p, q))))


def przs_next(gen: ZeroShareGenerator, length) -> ShareVector:
    return ShareVector(gen.party, gen.next(length), gen.ring, 0)


def _check_pair(a: ShareVector, b: ShareVector):
    if a.owner != b.owner:
        raise ProtocolError(f"shares belong to parties {a.owner} and {b.owner}")
    if a.shape != b.shape:
        raise ProtocolError(f"shape mismatch {a.shape} vs {b.shape}")
    if a.frac_bits != b.frac_bits:
        raise ProtocolError(f"scale mismatch: {a.frac_bits} vs {b.frac_bits} fractional bits")


def add_shared(a: ShareVector, b: ShareVector) -> ShareVector:
    _check_pair(a, b)
    return a.with_data(a.ring.add(a.data, b.data))


def sub_shared(a: ShareVector, b: ShareVector) -> ShareVector:
    _check_pair(a, b)
    return a.with_data(a.ring.sub(a.data, b.data))


def neg(a: ShareVector) -> ShareVector:
    return a.with_data(a.ring.neg(a.data))


def add_public(a: ShareVector, c) -> ShareVector:
    """Add a public ring value (already at ``a``'s scale); only party 0 applies it."""
    if a.owner != 0:
        return a
    return a.with_data(a.ring.add(a.data, a.ring.asarray(c)))


def mul_public(a: ShareVector, c: int) -> ShareVector:
    """Multiply every share by a public integer; the scale is unchanged."""
    return a.with_data(a.ring.mul(a.data, a.ring.asarray(c)))


def align(a: ShareVector, frac_bits: int) -> ShareVector:
    """Raise ``a`` to ``frac_bits`` fractional bits by an exact power-of-two multiply."""
    if frac_bits < a.frac_bits:
        raise ProtocolError("lowering the scale needs truncation, not alignment")
    if frac_bits == a.frac_bits:
        return a
    return a.with_data(a.ring.mul(a.data, 1 << (frac_bits - a.frac_bits)), frac_bits)
