"""Trusted dealer: Beaver triples, n-ary auxiliary sets and matrix triples.

Every correlation can carry per-input truncation shifts. For an input
whose shift is t > 0 the dealer draws a uniform reveal mask m and derives
the effective mask e = -((-m mod Q) >> t). Opening x - m and shifting the
public value right by t then yields x >> t = (opened >> t) + e up to one
unit, so products of fixed-point values are rescaled as part of the
opening they need anyway. Subset products in auxiliary sets are taken over
the effective masks; with t = 0 the two masks coincide and no extra share
is sent.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ProtocolError
from .ring import Ring, norm_shape
from .sharing import reconstruct, share
from .wire import ROLE_ENTRY, ROLE_MASK, decode_offline_frame, encode_offline_frame

TRIPLE = "triple"
AUX = "aux"
MATRIX = "matrix"


@dataclass(frozen=True)
class CorrelationRequest:
    kind: str
    shape: tuple
    arity: int = 2
    shifts: tuple = (0, 0)


@dataclass(eq=False)
class CorrelationShare:
    """One party's slice of a correlation; single use."""

    kind: str
    correlation_id: str
    request: CorrelationRequest
    entries: dict
    masks: dict = field(default_factory=dict)
    spent: bool = False

    def consume(self):
        if self.spent:
            raise ProtocolError(f"correlation {self.correlation_id} was already consumed")
        self.spent = True

    def reveal_mask(self, index: int) -> np.ndarray:
        return self.masks.get(index, self.entries[1 << index])


@dataclass
class _Correlation:
    kind: str
    arity: int
    entries: dict
    masks: dict = field(default_factory=dict)

    def for_party(self, p: int, cid: str, request: CorrelationRequest) -> CorrelationShare:
        return CorrelationShare(
            self.kind, cid, request,
            {k: v[p].data for k, v in self.entries.items()},
            {k: v[p].data for k, v in self.masks.items()},
        )


@dataclass
class BeaverTriple(_Correlation):
    """Binary triple; entries 1, 2, 3 hold shares of a, b and ab."""

    @property
    def a(self):
        return self.entries[1]

    @property
    def b(self):
        return self.entries[2]

    @property
    def c(self):
        return self.entries[3]


@dataclass
class AuxSet(_Correlation):
    """Shares of every nonempty subset product of ``arity`` masks, keyed by bitmask."""

    def __len__(self):
        return len(self.entries)


@dataclass
class MatrixTriple(_Correlation):
    """Entries 1, 2, 3 hold shares of A, B and A @ B."""

    @property
    def A(self):
        return self.entries[1]

    @property
    def B(self):
        return self.entries[2]

    @property
    def C(self):
        return self.entries[3]


@dataclass
class DealerRecord:
    """Offline accounting: ring elements each party received, by correlation."""

    n_parties: int
    element_bytes: int
    items: list = field(default_factory=list)

    def add(self, kind, cid, arity, shape, beaver_elements, mask_elements):
        self.items.append(dict(kind=kind, correlation_id=cid, arity=arity, shape=tuple(shape),
                               beaver_elements=beaver_elements, mask_elements=mask_elements))

    @property
    def beaver_elements(self) -> int:
        """Elements per party spent on triples and auxiliary sets proper."""
        return sum(i["beaver_elements"] for i in self.items)

    @property
    def mask_elements(self) -> int:
        """Elements per party spent on reveal masks of rescaled inputs."""
        return sum(i["mask_elements"] for i in self.items)

    @property
    def elements_per_party(self) -> int:
        return self.beaver_elements + self.mask_elements


def offline_bytes(record: DealerRecord) -> int:
    return record.elements_per_party * record.n_parties * record.element_bytes


def effective_mask(m, shift: int, ring: Ring):
    if shift == 0:
        return m
    return ring.neg(ring.neg(m) >> shift)


class TrustedDealer:
    def __init__(self, n_parties: int, ring: Ring, seed: int = 0, max_arity: int = 4,
                 rng: np.random.Generator | None = None):
        if n_parties < 2:
            raise ConfigurationError("dealer needs n_parties >= 2")
        self.n_parties = n_parties
        self.ring = ring
        self.max_arity = max_arity
        self.rng = rng if rng is not None else np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(11,))))
        self.record = DealerRecord(n_parties, ring.element_bytes)
        self._counter = 0

    def _share(self, value):
        return share(value, self.n_parties, self.rng, self.ring)

    def _masks(self, shapes, shifts):
        """Uniform reveal masks and the effective masks used inside products."""
        eff, masks = [], {}
        for i, (shape, t) in enumerate(zip(shapes, shifts)):
            m = self.ring.random(self.rng, shape)
            if t:
                masks[i] = self._share(m)
            eff.append(effective_mask(m, t, self.ring))
        return eff, masks

    def _log(self, kind, arity, shape, corr):
        cid = f"off{self._counter}:{kind}"
        self._counter += 1
        beaver = sum(v[0].data.size for v in corr.entries.values())
        mask = sum(v[0].data.size for v in corr.masks.values())
        self.record.add(kind, cid, arity, shape, beaver, mask)
        return cid

    def gen_triple(self, shape, shifts=(0, 0)) -> BeaverTriple:
        shape = norm_shape(shape)
        (a, b), masks = self._masks([shape, shape], shifts)
        t = BeaverTriple(TRIPLE, 2, {1: self._share(a), 2: self._share(b),
                                     3: self._share(self.ring.mul(a, b))}, masks)
        self._log(TRIPLE, 2, shape, t)
        return t

    def gen_aux_set(self, arity: int, shape, shifts=None) -> AuxSet:
        if not 2 <= arity <= self.max_arity:
            raise ConfigurationError(f"arity {arity} outside [2, {self.max_arity}]")
        shape = norm_shape(shape)
        shifts = tuple(shifts) if shifts is not None else (0,) * arity
        eff, masks = self._masks([shape] * arity, shifts)
        products = {}
        for mask_bits in range(1, 1 << arity):
            low = mask_bits & -mask_bits
            i = low.bit_length() - 1
            rest = mask_bits ^ low
            products[mask_bits] = eff[i] if not rest else self.ring.mul(products[rest], eff[i])
        aux = AuxSet(AUX, arity, {k: self._share(v) for k, v in products.items()}, masks)
        self._log(AUX, arity, shape, aux)
        return aux

    def gen_matrix_triple(self, dims, shifts=(0, 0)) -> MatrixTriple:
        m, k, n = dims
        (A, B), masks = self._masks([(m, k), (k, n)], shifts)
        t = MatrixTriple(MATRIX, 2, {1: self._share(A), 2: self._share(B),
                                     3: self._share(self.ring.matmul(A, B))}, masks)
        self._log(MATRIX, 2, (m, k, n), t)
        return t

    def generate(self, request: CorrelationRequest):
        if request.kind == TRIPLE:
            return self.gen_triple(request.shape, request.shifts)
        if request.kind == AUX:
            return self.gen_aux_set(request.arity, request.shape, request.shifts)
        if request.kind == MATRIX:
            return self.gen_matrix_triple(request.shape, request.shifts)
        raise ConfigurationError(f"unknown correlation kind {request.kind!r}")


def correlation_frames(corr: _Correlation, party: int, session_id: int, cid: str, ring: Ring):
    frames = [encode_offline_frame(session_id, cid, ROLE_ENTRY, k, v[party].data, ring)
              for k, v in sorted(corr.entries.items())]
    frames += [encode_offline_frame(session_id, cid, ROLE_MASK, k, v[party].data, ring)
               for k, v in sorted(corr.masks.items())]
    return frames


def correlation_from_frames(frames, request: CorrelationRequest, ring: Ring) -> CorrelationShare:
    entries, masks, cid = {}, {}, None
    for buf in frames:
        head, values = decode_offline_frame(buf, ring)
        cid = head.correlation_id
        (entries if head.role == ROLE_ENTRY else masks)[head.key] = values
    return CorrelationShare(request.kind, cid, request, entries, masks)


def check_consistency(corr: _Correlation, ring: Ring) -> bool:
    """Brute-force check of every subset product; for tests and debugging."""
    if corr.kind == MATRIX:
        return np.array_equal(reconstruct(corr.C), ring.matmul(reconstruct(corr.A), reconstruct(corr.B)))
    singles = {i: reconstruct(corr.entries[1 << i]) for i in range(corr.arity)}
    for key, shares in corr.entries.items():
        expect = None
        for i in range(corr.arity):
            if key >> i & 1:
                expect = singles[i] if expect is None else ring.mul(expect, singles[i])
        if not np.array_equal(reconstruct(shares), expect):
            return False
    return True
