"""Beaver-style multiplication protocols and polynomial evaluation.

Products are split into ``begin_*`` (mask operands, defer their reveals)
and ``result()`` (finish locally once the context has flushed), so
independent products can share one round.

Fixed-point rescaling is folded into openings: an operand carrying more
than the target number of fractional bits is opened at its own scale and
shifted publicly, with the dealer's effective mask absorbing the shift.
Products therefore come back at the sum of their operands' target scales
and are rescaled the next time they are masked and opened. No extra
round is spent on truncation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import SCALE_HEADROOM
from .errors import ConfigurationError, ProtocolError
from .sharing import ShareVector, add_public, align, mul_public, neg


def _target(ctx, frac_bits):
    return ctx.codec.precision_bits if frac_bits is None else frac_bits


def _shift(x: ShareVector, target: int) -> int:
    return max(0, x.frac_bits - target)


def _check_scale(frac_bits: int, ring):
    if frac_bits and frac_bits > ring.bits - SCALE_HEADROOM:
        raise ConfigurationError(
            f"{frac_bits} fractional bits leave no headroom in a {ring.bits}-bit ring")


# -- local helpers ------------------------------------------------------------

def add(a: ShareVector, b: ShareVector) -> ShareVector:
    """Add two shares, aligning the lower scale up first."""
    f = max(a.frac_bits, b.frac_bits)
    a, b = align(a, f), align(b, f)
    if a.shape != b.shape:
        raise ProtocolError(f"shape mismatch {a.shape} vs {b.shape}")
    return a.with_data(a.ring.add(a.data, b.data))


def sub(a: ShareVector, b: ShareVector) -> ShareVector:
    return add(a, neg(b))


def add_public_real(ctx, x: ShareVector, value) -> ShareVector:
    return add_public(x, ctx.codec.encode(value, x.frac_bits))


def mul_public_real(ctx, x: ShareVector, value: float, bits: int | None = None) -> ShareVector:
    """Multiply by a public real: encode at ``bits`` fractional bits, multiply,
    and leave the extra scale for the next opening to remove."""
    if float(value).is_integer() and abs(value) < 2 ** 31:
        return mul_public(x, int(value))
    if bits is None:
        bits = ctx.codec.precision_bits + max(0, math.ceil(-math.log2(abs(value))))
    c = int(round(value * 2 ** bits))
    _check_scale(x.frac_bits + bits, x.ring)
    return x.with_data(x.ring.mul(x.data, c & x.ring.mask), x.frac_bits + bits)


def scale_pow2(x: ShareVector, exponent: int) -> ShareVector:
    """Multiply by 2**exponent exactly by reinterpreting the scale."""
    if exponent >= 0:
        return mul_public(x, 1 << exponent)
    return x.with_data(x.data, x.frac_bits - exponent)


def truncate_shared(x: ShareVector, factors: int, precision_bits: int) -> ShareVector:
    """Local division of each share by B**factors.

    Every party shifts the signed view of its own share. With two parties
    the result is off by at most one unit except with probability about
    |value| / Q; with three or more parties the shares' wrap count is
    unknown to each of them and the result is wrong far more often, which
    is why the product protocols rescale at openings instead.
    """
    if factors < 1:
        raise ConfigurationError("truncate_shared needs factors >= 1")
    bits = factors * precision_bits
    if x.frac_bits < bits + precision_bits:
        raise ConfigurationError(
            f"share carries {x.frac_bits} fractional bits, cannot drop {bits}")
    ring = x.ring
    return x.with_data(ring.asarray(ring.to_signed(x.data) >> bits), x.frac_bits - bits)


# -- binary Beaver ------------------------------------------------------------

class PendingMul:
    def __init__(self, ctx, x: ShareVector, y: ShareVector, frac_bits=None, label="mul"):
        if x.shape != y.shape:
            raise ProtocolError(f"mul operands differ in shape: {x.shape} vs {y.shape}")
        target = _target(ctx, frac_bits)
        self.ctx = ctx
        self.shifts = (_shift(x, target), _shift(y, target))
        self.frac_bits = x.frac_bits + y.frac_bits - sum(self.shifts)
        _check_scale(self.frac_bits, x.ring)
        self.corr = ctx.take_triple(x.shape, self.shifts)
        self.corr.consume()
        ring = x.ring
        self._eps = ctx.defer_reveal(x.with_data(ring.sub(x.data, self.corr.reveal_mask(0))), f"{label}.eps")
        self._delta = ctx.defer_reveal(y.with_data(ring.sub(y.data, self.corr.reveal_mask(1))), f"{label}.delta")

    @property
    def opened(self):
        """The public masked differences (x - a, y - b) once flushed."""
        return self._eps.value, self._delta.value

    def result(self) -> ShareVector:
        ring = self.ctx.ring
        eps = self._eps.value >> self.shifts[0]
        delta = self._delta.value >> self.shifts[1]
        a, b, c = self.corr.entries[1], self.corr.entries[2], self.corr.entries[3]
        z = c + eps * b + a * delta
        if self.ctx.party == 0:
            z = z + eps * delta
        return ShareVector(self.ctx.party, z & ring.mask, ring, self.frac_bits)


def begin_mul(ctx, x, y, frac_bits=None, label="mul") -> PendingMul:
    return PendingMul(ctx, x, y, frac_bits, label)


async def mul(ctx, x: ShareVector, y: ShareVector, frac_bits=None) -> ShareVector:
    """Elementwise product via one Beaver triple: one online round."""
    pending = begin_mul(ctx, x, y, frac_bits)
    await ctx.flush()
    return pending.result()


# -- multivariate -------------------------------------------------------------

@dataclass(frozen=True)
class ProductPlan:
    """Pairs each subset S of revealed differences with the aux entry over
    its complement. Complement 0 marks the public all-delta term."""

    arity: int
    terms: tuple

    @classmethod
    def build(cls, arity: int) -> "ProductPlan":
        full = (1 << arity) - 1
        return cls(arity, tuple((s, full ^ s) for s in range(1 << arity)))


def evaluate_product(plan: ProductPlan, deltas, entries, party: int, ring) -> np.ndarray:
    """Local share of prod(delta_i + a_i) given public deltas and aux shares."""
    prods = {0: None}
    for s in range(1, 1 << plan.arity):
        low = s & -s
        i = low.bit_length() - 1
        rest = s ^ low
        prods[s] = deltas[i] if rest == 0 else (prods[rest] * deltas[i]) & ring.mask
    acc = 0
    for s, comp in plan.terms:
        if comp == 0:
            if party == 0:
                acc = acc + prods[s]
        elif s == 0:
            acc = acc + entries[comp]
        else:
            acc = acc + prods[s] * entries[comp]
    return acc & ring.mask


class PendingMulMulti:
    def __init__(self, ctx, xs, frac_bits=None, label="mulmulti"):
        n = len(xs)
        if not 2 <= n <= ctx.config.max_arity:
            raise ConfigurationError(f"arity {n} outside [2, {ctx.config.max_arity}]")
        shape = xs[0].shape
        if any(x.shape != shape for x in xs):
            raise ProtocolError("multivariate operands differ in shape")
        target = _target(ctx, frac_bits)
        self.ctx = ctx
        self.plan = ProductPlan.build(n)
        self.shifts = tuple(_shift(x, target) for x in xs)
        self.frac_bits = sum(x.frac_bits for x in xs) - sum(self.shifts)
        _check_scale(self.frac_bits, xs[0].ring)
        self.corr = ctx.take_aux(n, shape, self.shifts)
        self.corr.consume()
        ring = xs[0].ring
        self._tickets = [
            ctx.defer_reveal(x.with_data(ring.sub(x.data, self.corr.reveal_mask(i))), f"{label}.delta{i}")
            for i, x in enumerate(xs)
        ]

    def result(self) -> ShareVector:
        ring = self.ctx.ring
        deltas = [t.value >> s for t, s in zip(self._tickets, self.shifts)]
        z = evaluate_product(self.plan, deltas, self.corr.entries, self.ctx.party, ring)
        return ShareVector(self.ctx.party, z, ring, self.frac_bits)


def begin_mul_multi(ctx, xs, frac_bits=None, label="mulmulti"):
    """Start an n-ary product; arity 2 takes the binary triple path."""
    if len(xs) == 2:
        return begin_mul(ctx, xs[0], xs[1], frac_bits, label)
    return PendingMulMulti(ctx, xs, frac_bits, label)


async def mul_multi(ctx, xs, frac_bits=None) -> ShareVector:
    """Product of up to ``max_arity`` shares in one online round."""
    xs = list(xs)
    if len(xs) > ctx.config.max_arity:
        raise ConfigurationError(f"arity {len(xs)} exceeds max_arity {ctx.config.max_arity}")
    if len(xs) == 1:
        return xs[0]
    pending = begin_mul_multi(ctx, xs, frac_bits)
    await ctx.flush()
    return pending.result()


async def mul_chain(ctx, xs, frac_bits=None) -> ShareVector:
    """Naive left-to-right chain of binary products: n - 1 rounds."""
    acc = xs[0]
    for x in xs[1:]:
        acc = await mul(ctx, acc, x, frac_bits)
    return acc


# -- matrices -----------------------------------------------------------------

class PendingMatmul:
    def __init__(self, ctx, X: ShareVector, Y: ShareVector, frac_bits=None, label="matmul"):
        if X.data.ndim != 2 or Y.data.ndim != 2 or X.shape[1] != Y.shape[0]:
            raise ProtocolError(f"cannot multiply {X.shape} by {Y.shape}")
        target = _target(ctx, frac_bits)
        self.ctx = ctx
        self.shifts = (_shift(X, target), _shift(Y, target))
        self.frac_bits = X.frac_bits + Y.frac_bits - sum(self.shifts)
        _check_scale(self.frac_bits, X.ring)
        m, k = X.shape
        n = Y.shape[1]
        self.corr = ctx.take_matrix_triple((m, k, n), self.shifts)
        self.corr.consume()
        ring = X.ring
        self._e = ctx.defer_reveal(X.with_data(ring.sub(X.data, self.corr.reveal_mask(0))), f"{label}.E")
        self._f = ctx.defer_reveal(Y.with_data(ring.sub(Y.data, self.corr.reveal_mask(1))), f"{label}.F")

    def result(self) -> ShareVector:
        ring = self.ctx.ring
        E = self._e.value >> self.shifts[0]
        F = self._f.value >> self.shifts[1]
        A, B, C = self.corr.entries[1], self.corr.entries[2], self.corr.entries[3]
        Z = C + np.matmul(E, B) + np.matmul(A, F)
        if self.ctx.party == 0:
            Z = Z + np.matmul(E, F)
        return ShareVector(self.ctx.party, Z & ring.mask, ring, self.frac_bits)


def begin_matmul(ctx, X, Y, frac_bits=None, label="matmul") -> PendingMatmul:
    return PendingMatmul(ctx, X, Y, frac_bits, label)


async def matmul(ctx, X: ShareVector, Y: ShareVector, frac_bits=None) -> ShareVector:
    """Matrix product with a matrix triple: one online round for any dims."""
    pending = begin_matmul(ctx, X, Y, frac_bits)
    await ctx.flush()
    return pending.result()


# -- univariate polynomials ---------------------------------------------------

@dataclass(frozen=True)
class PolyPlan:
    coefficients: tuple
    base_size: int = 4

    def __post_init__(self):
        if len(self.coefficients) < 1:
            raise ConfigurationError("a polynomial needs at least one coefficient")
        if self.base_size < 2:
            raise ConfigurationError("base tuple size must be >= 2")
        if not all(math.isfinite(c) for c in self.coefficients):
            raise ConfigurationError("coefficients must be finite")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def blocks(self) -> int:
        return -(-len(self.coefficients) // self.base_size)

    def online_rounds(self) -> int:
        if self.degree <= 1:
            return 0
        return 1 + max(0, self.blocks - 1)


def _weighted(ctx, terms, coeffs, frac_bits):
    """sum_j c_j * g_j over the non-None g_j with nonzero c_j."""
    acc = None
    for g, c in zip(terms, coeffs):
        if c == 0 or g is None:
            continue
        bits = frac_bits + max(0, math.ceil(-math.log2(abs(c))))
        t = mul_public_real(ctx, g, c, bits)
        acc = t if acc is None else add(acc, t)
    return acc


async def poly_eval(ctx, x: ShareVector, plan: PolyPlan, frac_bits=None) -> ShareVector:
    """Evaluate sum_i b_i x^i with a base tuple (1, x, ..., x^(m-1)).

    All base powers, plus x^m when more than one block is needed, come out
    of one round of parallel products; each further block costs one round
    that multiplies the tuple by x^m.
    """
    target = _target(ctx, frac_bits)
    b = [float(c) for c in plan.coefficients]
    m = plan.base_size
    if m > ctx.config.max_arity:
        raise ConfigurationError(f"base size {m} exceeds max_arity {ctx.config.max_arity}")
    const = ctx.constant(b[0], x.shape, target)
    if plan.degree == 0:
        return const
    if plan.degree == 1:
        lin = _weighted(ctx, [x], [b[1]], target)
        return const if lin is None else add(lin, const)

    size = min(m, len(b))
    need_step = plan.blocks > 1
    with ctx.scope("poly"):
        powers = {i: begin_mul_multi(ctx, [x] * i, target, f"pow{i}") for i in range(2, size)}
        if need_step:
            powers[m] = begin_mul_multi(ctx, [x] * m, target, f"pow{m}")
        await ctx.flush()
        xs = {1: x}
        xs.update({i: p.result() for i, p in powers.items()})

        g = [None] + [xs[i] for i in range(1, size)]
        acc = _weighted(ctx, g, b[:size], target)
        for blk in range(1, plan.blocks):
            step = [begin_mul(ctx, xs[m], gj, target, "step") if gj is not None else None for gj in g]
            await ctx.flush()
            g = [p.result() if p is not None else xs[m] for p in step]
            part = _weighted(ctx, g, b[blk * m:(blk + 1) * m], target)
            if part is not None:
                acc = part if acc is None else add(acc, part)
    return const if acc is None else add(acc, const)
