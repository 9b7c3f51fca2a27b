"""Iterative approximations of nonlinear functions on shares.

Every function here is an arithmetic circuit: public scalings, additions
and the product protocols. There is no secret-dependent range reduction,
so each function is accurate only on its documented domain:

========== ===================== ==========================================
function   domain                online rounds (defaults)
========== ===================== ==========================================
exp        |x| <= 8              n_exp = 8
reciprocal x in [0.01, 100]      n_exp + iterations = 18
log        x in [0.05, 60]       n_exp + iterations * (n_exp + 1 + 3) = 32
sin, cos   |x| <= 2*pi           iterations = 10
sigmoid    |x| <= 6              n_exp + reciprocal = 26
tanh       |x| <= 3              as sigmoid
softmax    entries in [-4, 4]    n_exp + reciprocal + 1 = 27
========== ===================== ==========================================

Intermediate values are kept at ``ApproxConfig.work_bits`` fractional bits
so that the long iterations do not accumulate error at the coarser output
precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import ApproxConfig
from .errors import ProtocolError
from .protocols import (PolyPlan, add_public_real, begin_mul, mul, mul_multi,
                        mul_public_real, poly_eval, scale_pow2, sub)
from .sharing import ShareVector, mul_public, neg

DOMAINS = {
    "exp": (-8.0, 8.0),
    "log": (0.05, 60.0),
    "reciprocal": (0.01, 100.0),
    "sin": (-2 * math.pi, 2 * math.pi),
    "cos": (-2 * math.pi, 2 * math.pi),
    "sigmoid": (-6.0, 6.0),
    "tanh": (-3.0, 3.0),
    "softmax": (-4.0, 4.0),
}

RECIPROCAL_GUESS = (3.0, 0.5, 0.003)      # 3 * exp(0.5 - x) + 0.003
LOG_GUESS = (1 / 120, 20.0, 2.0, 1.0, 3.0)  # x/120 - 20 * exp(-(2x + 1)) + 3


@dataclass(frozen=True)
class ComplexShare:
    re: ShareVector
    im: ShareVector

    def __post_init__(self):
        if self.re.shape != self.im.shape:
            raise ProtocolError("complex parts differ in shape")


def _cfg(ctx, cfg):
    return cfg if cfg is not None else ctx.approx


async def exp(ctx, x: ShareVector, cfg: ApproxConfig | None = None) -> ShareVector:
    """e^x as (1 + x / d^n)^(d^n): one d-ary product per iteration."""
    cfg = _cfg(ctx, cfg)
    d, n, w = cfg.exp_base, cfg.exp_iterations, cfg.work_bits
    with ctx.scope("exp"):
        dn = d ** n
        y = mul_public_real(ctx, x, 1.0 / dn, w + math.ceil(math.log2(dn)))
        y = add_public_real(ctx, y, 1.0)
        for _ in range(n):
            y = await mul_multi(ctx, [y] * d, w)
    return y


async def exp_i(ctx, x: ShareVector, cfg: ApproxConfig | None = None) -> ComplexShare:
    """e^{ix} by repeated complex squaring of 1 + ix / 2^n."""
    cfg = _cfg(ctx, cfg)
    n, w = cfg.trig_iterations, cfg.work_bits
    with ctx.scope("trig"):
        re = ctx.constant(1.0, x.shape, w)
        im = scale_pow2(x, -n)
        for _ in range(n):
            rr = begin_mul(ctx, re, re, w, "re2")
            ii = begin_mul(ctx, im, im, w, "im2")
            ri = begin_mul(ctx, re, im, w, "reim")
            await ctx.flush()
            re = sub(rr.result(), ii.result())
            im = mul_public(ri.result(), 2)
    return ComplexShare(re, im)


async def sin(ctx, x, cfg=None) -> ShareVector:
    return (await exp_i(ctx, x, cfg)).im


async def cos(ctx, x, cfg=None) -> ShareVector:
    return (await exp_i(ctx, x, cfg)).re


async def reciprocal(ctx, x: ShareVector, cfg: ApproxConfig | None = None) -> ShareVector:
    """1/x for positive x by Newton steps y <- 2y - x*y*y.

    Each step is a single 3-ary product.
    """
    cfg = _cfg(ctx, cfg)
    a, b, c = RECIPROCAL_GUESS
    w = cfg.work_bits
    with ctx.scope("reciprocal"):
        e = await exp(ctx, add_public_real(ctx, neg(x), b), cfg)
        y = add_public_real(ctx, mul_public(e, int(a)), c)
        for _ in range(cfg.reciprocal_iterations):
            xyy = await mul_multi(ctx, [x, y, y], w)
            y = sub(mul_public(y, 2), xyy)
    return y


def log_series(order: int) -> PolyPlan:
    """Coefficients of sum_{k=1..order} h^k / k."""
    return PolyPlan((0.0,) + tuple(1.0 / k for k in range(1, order + 1)), base_size=4)


async def log(ctx, x: ShareVector, cfg: ApproxConfig | None = None) -> ShareVector:
    """ln x by Householder steps y <- y - sum_k h^k / k with h = 1 - x e^{-y}."""
    cfg = _cfg(ctx, cfg)
    w = cfg.work_bits
    s, amp, two, one, off = LOG_GUESS
    plan = log_series(cfg.log_order)
    if plan.base_size > ctx.config.max_arity:
        plan = PolyPlan(plan.coefficients, ctx.config.max_arity)
    with ctx.scope("log"):
        z = add_public_real(ctx, neg(mul_public(x, int(two))), -one)
        e = await exp(ctx, z, cfg)
        y = sub(mul_public_real(ctx, x, s), mul_public(e, int(amp)))
        y = add_public_real(ctx, y, off)
        for _ in range(cfg.log_iterations):
            ey = await exp(ctx, neg(y), cfg)
            h = add_public_real(ctx, neg(await mul(ctx, x, ey, w)), 1.0)
            y = sub(y, await poly_eval(ctx, h, plan, w))
    return y


async def sigmoid(ctx, x: ShareVector, cfg: ApproxConfig | None = None) -> ShareVector:
    """1 / (1 + e^{-x})."""
    with ctx.scope("sigmoid"):
        e = await exp(ctx, neg(x), cfg)
        return await reciprocal(ctx, add_public_real(ctx, e, 1.0), cfg)


async def tanh(ctx, x: ShareVector, cfg: ApproxConfig | None = None) -> ShareVector:
    with ctx.scope("tanh"):
        s = await sigmoid(ctx, mul_public(x, 2), cfg)
        return add_public_real(ctx, mul_public(s, 2), -1.0)


def _sum_last(x: ShareVector) -> ShareVector:
    return x.with_data(np.sum(x.data, axis=-1) & x.ring.mask)


def _broadcast_last(x: ShareVector, shape) -> ShareVector:
    data = np.broadcast_to(x.data[..., None], shape).copy()
    return x.with_data(data)


async def softmax(ctx, x: ShareVector, cfg: ApproxConfig | None = None) -> ShareVector:
    """Softmax along the last axis; every exponential shares the same rounds."""
    cfg = _cfg(ctx, cfg)
    with ctx.scope("softmax"):
        e = await exp(ctx, x, cfg)
        inv = await reciprocal(ctx, _sum_last(e), cfg)
        return await mul(ctx, e, _broadcast_last(inv, e.shape), cfg.work_bits)


FUNCTIONS = {
    "exp": exp,
    "log": log,
    "reciprocal": reciprocal,
    "sin": sin,
    "cos": cos,
    "sigmoid": sigmoid,
    "tanh": tanh,
    "softmax": softmax,
}


def truncation_budget(reference, cfg: ApproxConfig, precision_bits: int = 16) -> np.ndarray:
    """Elementwise error allowed against the matching double-precision oracle.

    ``10 * 2^-L`` covers the last rescaling; the second term is the loss from
    rescaling intermediates to ``work_bits`` inside an exponential, which
    the ``d^n``-fold power amplifies in relative terms.
    """
    ref = np.abs(np.asarray(reference, dtype=float))
    rel = 2.0 * cfg.exp_base ** cfg.exp_iterations * 2.0 ** -cfg.work_bits
    return 10 * 2.0 ** -precision_bits + rel * np.maximum(ref, 1.0)
