"""Additive secret-sharing MPC engine with multivariate Beaver products."""
from .config import PROFILES, ApproxConfig, NetProfile, SessionConfig, get_profile
from .engine import PartyContext, RoundStats, SessionResult, advance_clock, run_session
from .errors import (ConfigurationError, DeadlockError, EncodingRangeError, MPCError,
                     ProtocolDesyncError, ProtocolError, UsageError)
from .ring import RING64, FixedPointCodec, Ring, decode, encode
from .sharing import ShareVector, reconstruct, share

__all__ = [
    "PROFILES", "ApproxConfig", "NetProfile", "SessionConfig", "get_profile",
    "PartyContext", "RoundStats", "SessionResult", "advance_clock", "run_session",
    "ConfigurationError", "DeadlockError", "EncodingRangeError", "MPCError",
    "ProtocolDesyncError", "ProtocolError", "UsageError",
    "RING64", "FixedPointCodec", "Ring", "decode", "encode",
    "ShareVector", "reconstruct", "share",
]
