"""Power-of-two ring arithmetic and the fixed-point codec.

Ring elements are Python integers in ``[0, Q)`` with ``Q = 2**bits``.
Vectors of ring elements are numpy arrays with ``dtype=object`` so the
same code serves 8-bit test rings, the 64-bit reference ring and the
wider rings sessions use for multivariate products.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, EncodingRangeError

RingElement = int


def _as_object_array(values) -> np.ndarray:
    arr = np.asarray(values)
    if arr.dtype == object:
        return arr
    if arr.dtype.kind in "iu":
        if arr.ndim == 0:
            return np.array(int(arr), dtype=object)
        out = np.empty(arr.shape, dtype=object)
        out.flat[:] = [int(v) for v in arr.flat]
        return out
    if arr.dtype.kind == "b":
        return arr.astype(int).astype(object)
    raise TypeError(f"ring values must be integers, got dtype {arr.dtype}")


def norm_shape(shape) -> tuple:
    if isinstance(shape, (int, np.integer)):
        return (int(shape),)
    return tuple(int(s) for s in shape)


class Ring:
    """The ring Z/QZ with Q = 2**bits."""

    def __init__(self, bits: int = 64):
        if bits < 2:
            raise ConfigurationError(f"ring needs at least 2 bits, got {bits}")
        self.bits = bits
        self.modulus = 1 << bits
        self.mask = self.modulus - 1
        self.half = 1 << (bits - 1)
        self.words = -(-bits // 64)
        self.element_bytes = 8 * self.words

    def __repr__(self):
        return f"Ring(bits={self.bits})"

    def __eq__(self, other):
        return isinstance(other, Ring) and other.bits == self.bits

    def __hash__(self):
        return hash(("Ring", self.bits))

    def asarray(self, values) -> np.ndarray:
        """Reduce integers (scalars or arrays) into an object array of residues."""
        return np.asarray(_as_object_array(values) & self.mask, dtype=object)

    def zeros(self, shape) -> np.ndarray:
        out = np.empty(shape, dtype=object)
        out.fill(0)
        return out

    def add(self, a, b):
        return (a + b) & self.mask

    def sub(self, a, b):
        return (a - b) & self.mask

    def mul(self, a, b):
        return (a * b) & self.mask

    def neg(self, a):
        return (-a) & self.mask

    def matmul(self, a, b):
        return np.matmul(a, b) & self.mask

    def to_signed(self, a):
        """Two's-complement view: residues >= Q/2 map to negative integers."""
        if isinstance(a, np.ndarray):
            return np.where(a >= self.half, a - self.modulus, a)
        a = int(a)
        return a - self.modulus if a >= self.half else a

    def random(self, rng: np.random.Generator, shape=()) -> np.ndarray:
        """Uniform residues drawn from 64-bit words of ``rng``."""
        shape = norm_shape(shape)
        count = math.prod(shape)
        words = rng.integers(0, 1 << 64, size=(count, self.words), dtype=np.uint64, endpoint=False)
        vals = [0] * count
        for i, row in enumerate(words.tolist()):
            v = 0
            for j, w in enumerate(row):
                v |= w << (64 * j)
            vals[i] = v & self.mask
        out = np.empty(count, dtype=object)
        out[:] = vals
        return out.reshape(shape)

    def to_words(self, a: np.ndarray) -> bytes:
        """Serialize residues as little-endian 8-byte words, low word first."""
        flat = np.asarray(a, dtype=object).ravel()
        if self.words == 1:
            return np.fromiter((int(v) for v in flat), dtype="<u8", count=flat.size).tobytes()
        m = (1 << 64) - 1
        words = np.fromiter(
            ((int(v) >> (64 * j)) & m for v in flat for j in range(self.words)),
            dtype="<u8",
            count=flat.size * self.words,
        )
        return words.tobytes()

    def from_words(self, payload: bytes, shape) -> np.ndarray:
        words = np.frombuffer(payload, dtype="<u8").tolist()
        count = len(words) // self.words
        if self.words == 1:
            vals = words
        else:
            vals = []
            for i in range(count):
                v = 0
                for j in range(self.words):
                    v |= words[i * self.words + j] << (64 * j)
                vals.append(v)
        out = np.empty(count, dtype=object)
        out[:] = [v & self.mask for v in vals]
        return out.reshape(shape)


RING64 = Ring(64)


def ring_add(a, b, ring: Ring = RING64):
    return ring.add(a, b)


def ring_sub(a, b, ring: Ring = RING64):
    return ring.sub(a, b)


def ring_mul(a, b, ring: Ring = RING64):
    return ring.mul(a, b)


def truncate(x, bits: int, ring: Ring = RING64):
    """Arithmetic right shift of the signed interpretation, re-embedded mod Q."""
    return ring.asarray(ring.to_signed(x) >> bits) if isinstance(x, np.ndarray) else (
        (ring.to_signed(x) >> bits) & ring.mask
    )


@dataclass(frozen=True)
class FixedPointCodec:
    """Maps reals to ring elements as round(x * 2**precision_bits)."""

    precision_bits: int = 16
    ring: Ring = field(default_factory=lambda: RING64)

    def __post_init__(self):
        if not 8 <= self.precision_bits <= 32:
            raise ConfigurationError(
                f"precision_bits must lie in [8, 32], got {self.precision_bits}"
            )
        if self.ring.bits < self.precision_bits + 8:
            raise ConfigurationError("ring too small for the requested precision")

    @property
    def scale(self) -> int:
        return 1 << self.precision_bits

    @property
    def max_abs(self) -> float:
        """Exclusive bound on encodable magnitudes."""
        return 2.0 ** (self.ring.bits - 2 - self.precision_bits)

    def encode(self, x, frac_bits: int | None = None):
        """Round-to-nearest encoding; negatives become two's-complement residues."""
        f = self.precision_bits if frac_bits is None else frac_bits
        arr = np.asarray(x, dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            raise EncodingRangeError("cannot encode non-finite values")
        limit = 2.0 ** (self.ring.bits - 2 - f)
        if arr.size and np.max(np.abs(arr)) >= limit:
            raise EncodingRangeError(
                f"|x| must be < 2^{self.ring.bits - 2 - f} for {f} fractional bits"
            )
        scaled = np.rint(np.ldexp(arr, f))
        if arr.ndim == 0:
            return int(scaled) & self.ring.mask
        out = np.empty(arr.shape, dtype=object)
        out.flat[:] = [int(v) & self.ring.mask for v in scaled.flat]
        return out

    def decode(self, x, frac_bits: int | None = None):
        """Signed residue divided by 2**frac_bits (exact integer division to float)."""
        f = self.precision_bits if frac_bits is None else frac_bits
        den = 1 << f
        if isinstance(x, np.ndarray):
            signed = self.ring.to_signed(x)
            out = np.empty(signed.shape, dtype=np.float64)
            out.flat[:] = [int(v) / den for v in signed.flat]
            return out
        return self.ring.to_signed(int(x)) / den


def encode(x_f, codec: FixedPointCodec | None = None):
    return (codec or FixedPointCodec()).encode(x_f)


def decode(x, codec: FixedPointCodec | None = None):
    return (codec or FixedPointCodec()).decode(x)


def ceil_log2(x: float) -> int:
    return max(0, math.ceil(math.log2(x))) if x > 0 else 0
