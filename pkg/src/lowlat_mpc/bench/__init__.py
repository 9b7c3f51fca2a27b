"""Benchmarks for round counts, payloads and simulated latency."""
from .report import FIELDS, BenchReport, emit, load
from .runner import bench_mlp, bench_mul, bench_nonlinear

__all__ = ["FIELDS", "BenchReport", "emit", "load", "bench_mlp", "bench_mul", "bench_nonlinear"]
