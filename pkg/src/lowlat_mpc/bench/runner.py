"""Benchmark scenarios run on fresh seeded sessions."""
from __future__ import annotations

import logging

import numpy as np

from .. import nonlinear, oracles, protocols
from ..config import PROFILES, NetProfile, SessionConfig
from ..engine import run_session
from .mlp import MLP, sample_inputs, secure_program
from .report import BenchReport

log = logging.getLogger(__name__)

METHODS = ("naive", "multivariate")


def _config_fields(config: SessionConfig) -> dict:
    a = config.approx
    return dict(
        parties=config.n_parties, profile=config.net.name, latency_ms=config.net.latency_ms,
        bandwidth_gbps=config.net.bandwidth_bps / 1e9, max_arity=config.max_arity,
        fxp_bits=config.precision_bits, ring_bits=config.ring_bits, seed=config.seed,
        coalesce="on" if config.coalesce else "off",
        exp_base=a.exp_base, exp_iterations=a.exp_iterations, log_order=a.log_order,
        log_iterations=a.log_iterations, reciprocal_iterations=a.reciprocal_iterations,
        trig_iterations=a.trig_iterations, work_bits=a.work_bits,
    )


def _stats_fields(result, timing: bool) -> dict:
    clock = result.clock
    return dict(
        online_rounds=result.stats.online_rounds,
        online_bytes=result.stats.online_bytes,
        offline_bytes=result.stats.offline_bytes,
        offline_elements=result.record.beaver_elements,
        mask_elements=result.record.mask_elements,
        simulated_time_ms=float(clock.elapsed),
        latency_time_ms=float(clock.latency_total),
        transfer_time_ms=float(clock.transfer_total),
        t_comp_s=round(result.t_comp_s, 6) if timing else None,
    )


def _with_profile(config: SessionConfig, profile) -> SessionConfig:
    if profile is None:
        return config
    net = profile if isinstance(profile, NetProfile) else PROFILES[profile]
    return SessionConfig(**{**config.__dict__, "net": net})


def _mul_program(arity, count, method, values):
    async def program(ctx):
        outs = []
        for k in range(count):
            xs = [ctx.input(values[k, i] if ctx.party == i % ctx.n_parties else None,
                            i % ctx.n_parties, ()) for i in range(arity)]
            if method == "naive":
                y = await protocols.mul_chain(ctx, xs)
            else:
                y = await protocols.mul_multi(ctx, xs)
            outs.append(y)
        return outs

    return program


def bench_mul(arity: int, count: int = 100, profile=None, method=None,
              config: SessionConfig | None = None, timing: bool = False) -> BenchReport:
    """``count`` sequential ``arity``-ary products of fresh inputs in [-2, 2].

    Reports one row per method; ``method`` restricts to one of them.
    """
    config = _with_profile(config or SessionConfig(), profile)
    if not 2 <= arity <= config.max_arity:
        raise ValueError(f"arity must lie in [2, {config.max_arity}]")
    rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(31,)))
    values = rng.uniform(-2.0, 2.0, (count, arity))
    report = BenchReport("bench-mul")
    for m in METHODS if method is None else (method,):
        result = run_session(_mul_program(arity, count, m, values), config)
        report.add(scenario="bench-mul", method=m, arity=arity, count=count,
                   **_config_fields(config), **_stats_fields(result, timing))
    return report


def default_grid(function: str, points: int = 101, lo=None, hi=None) -> np.ndarray:
    """Evenly spaced points over the documented domain; softmax gets
    ``points`` random 3-vectors instead."""
    d_lo, d_hi = nonlinear.DOMAINS[function]
    lo = d_lo if lo is None else lo
    hi = d_hi if hi is None else hi
    if function == "softmax":
        rng = np.random.default_rng(np.random.SeedSequence(points, spawn_key=(37,)))
        return rng.uniform(lo, hi, (points, 3))
    return np.linspace(lo, hi, points)


def bench_nonlinear(function: str, grid=None, profile=None,
                    config: SessionConfig | None = None, timing: bool = False) -> BenchReport:
    """Evaluate ``function`` over the whole grid at once and compare with
    the double-precision recurrence and with the true function."""
    if function not in nonlinear.FUNCTIONS:
        raise ValueError(f"unknown function {function!r}; choose from {sorted(nonlinear.FUNCTIONS)}")
    config = _with_profile(config or SessionConfig(), profile)
    grid = default_grid(function) if grid is None else np.asarray(grid, dtype=float)
    fn = nonlinear.FUNCTIONS[function]

    async def program(ctx):
        x = ctx.input(grid if ctx.party == 0 else None, 0, grid.shape)
        return await ctx.open(await fn(ctx, x))

    result = run_session(program, config)
    out = np.asarray(result.outputs[0], dtype=float)
    codec = config.codec
    xq = np.asarray(codec.decode(codec.encode(grid)), dtype=float)
    ref = oracles.from_config(function, config.approx)(xq)
    err_o = np.abs(out - ref)
    err_t = np.abs(out - oracles.TRUE[function](xq))
    budget = nonlinear.truncation_budget(ref, config.approx, config.precision_bits)
    report = BenchReport("bench-nonlinear")
    report.add(scenario="bench-nonlinear", method="multivariate", function=function,
               points=int(grid.shape[0]), **_config_fields(config), **_stats_fields(result, timing),
               max_abs_err_oracle=float(err_o.max()), mean_abs_err_oracle=float(err_o.mean()),
               max_abs_err_true=float(err_t.max()), mean_abs_err_true=float(err_t.mean()),
               within_budget=bool(np.all(err_o <= budget)))
    return report


def bench_mlp(profile=None, coalesce: bool | None = None, count: int = 100,
              config: SessionConfig | None = None, timing: bool = False) -> BenchReport:
    """Secure inference of the seeded MLP on ``count`` inputs.

    The first row is the whole run; the rest attribute online rounds and
    bytes to the operation that spent them.
    """
    config = _with_profile(config or SessionConfig(), profile)
    if coalesce is not None:
        config = SessionConfig(**{**config.__dict__, "coalesce": coalesce})
    model = MLP.seeded(config.seed)
    X = sample_inputs(count, config.seed)
    result = run_session(secure_program(model, X), config)
    probs = np.asarray(result.outputs[0], dtype=float)
    plain = model.forward(X)
    agree = int(np.sum(probs.argmax(axis=1) == plain.argmax(axis=1)))
    err = np.abs(probs - plain)
    report = BenchReport("bench-mlp")
    base = _config_fields(config)
    report.add(scenario="bench-mlp", method="multivariate", count=count, **base,
               **_stats_fields(result, timing), agreement=agree,
               max_abs_err_true=float(err.max()), mean_abs_err_true=float(err.mean()))
    for scope in sorted(result.attribution):
        a = result.attribution[scope]
        report.add(scenario=f"bench-mlp.{scope}", method="multivariate", count=count, **base,
                   online_rounds=a["rounds"], online_bytes=a["bytes"])
    log.info("mlp agreement %d/%d", agree, count)
    return report
