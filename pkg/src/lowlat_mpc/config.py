"""Session, network and approximation settings."""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigurationError
from .ring import FixedPointCodec, Ring

SCALE_HEADROOM = 24


@dataclass(frozen=True)
class NetProfile:
    latency_ms: float
    bandwidth_bps: float
    name: str = "custom"

    def __post_init__(self):
        if self.latency_ms < 0:
            raise ConfigurationError("latency must be >= 0")
        if self.bandwidth_bps <= 0:
            raise ConfigurationError("bandwidth must be > 0")


PROFILES = {
    "n_low": NetProfile(0.1, 1e9, "n_low"),
    "n_med": NetProfile(5.0, 1e9, "n_med"),
    "n_high": NetProfile(40.0, 1e9, "n_high"),
}


def get_profile(name: str, latency_ms: float | None = None, bandwidth_gbps: float | None = None):
    if name == "custom":
        if latency_ms is None or bandwidth_gbps is None:
            raise ConfigurationError("custom profile needs --latency-ms and --bandwidth-gbps")
        return NetProfile(float(latency_ms), float(bandwidth_gbps) * 1e9, "custom")
    try:
        return PROFILES[name]
    except KeyError:
        raise ConfigurationError(f"unknown network profile {name!r}") from None


@dataclass(frozen=True)
class ApproxConfig:
    """Iteration parameters of the nonlinear approximations.

    ``work_bits`` is the fractional precision products are rescaled to
    inside the iterations; outputs are opened at whatever scale they end at.
    """

    exp_base: int = 3
    exp_iterations: int = 8
    log_order: int = 8
    log_iterations: int = 2
    reciprocal_iterations: int = 10
    trig_iterations: int = 10
    work_bits: int = 32

    def __post_init__(self):
        if self.exp_base < 2:
            raise ConfigurationError("exp_base must be >= 2")
        for name in ("exp_iterations", "log_order", "log_iterations",
                     "reciprocal_iterations", "trig_iterations"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be >= 1")


@dataclass(frozen=True)
class SessionConfig:
    n_parties: int = 3
    max_arity: int = 4
    precision_bits: int = 16
    ring_bits: int = 256
    seed: int = 0
    net: NetProfile = field(default_factory=lambda: PROFILES["n_med"])
    coalesce: bool = True
    approx: ApproxConfig = field(default_factory=ApproxConfig)
    timeout_s: float = 600.0

    def __post_init__(self):
        if self.n_parties < 2:
            raise ConfigurationError("n_parties must be >= 2")
        if self.max_arity < 2:
            raise ConfigurationError("max_arity must be >= 2")
        if self.ring_bits < 8:
            raise ConfigurationError("ring_bits must be >= 8")
        if self.timeout_s <= 0:
            raise ConfigurationError("timeout_s must be > 0")
        if not 8 <= self.precision_bits <= 32:
            raise ConfigurationError(f"precision_bits must lie in [8, 32], got {self.precision_bits}")

    @property
    def fixed_point_ok(self) -> bool:
        """Whether a full-arity product of fresh fixed-point inputs fits the ring.

        Narrower rings still serve integer-only programs; fixed-point work
        on them fails at the first product that would overflow.
        """
        return self.ring_bits >= self.max_arity * self.precision_bits + SCALE_HEADROOM

    @property
    def ring(self) -> Ring:
        return Ring(self.ring_bits)

    @property
    def codec(self) -> FixedPointCodec:
        return FixedPointCodec(self.precision_bits, self.ring)
