"""Session orchestration over a virtual-clock, all-to-all round network.

Every party runs the same async program against its own ``PartyContext``.
The only communication primitive is an all-to-all exchange of masked
shares; a round completes when all parties have contributed, and its
simulated cost is one latency plus the transfer time of the largest
per-party payload. The dealer runs entirely before the online phase.
"""
from __future__ import annotations

import asyncio
import contextlib
import functools
import logging
import time
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .config import NetProfile, SessionConfig
from .dealer import (
    AUX, MATRIX, TRIPLE, CorrelationRequest, CorrelationShare, DealerRecord, TrustedDealer,
    correlation_frames, correlation_from_frames, offline_bytes,
)
from .errors import DeadlockError, ProtocolDesyncError, ProtocolError, UsageError
from .ring import norm_shape
from .sharing import ShareVector, ZeroShareGenerator
from .wire import decode_frame, encode_frame

log = logging.getLogger(__name__)

DEALER = "dealer"


def _exact(x: float) -> Fraction:
    return Fraction(str(x))


def advance_clock(round_bytes: int, profile: NetProfile) -> float:
    """Simulated milliseconds one round costs: latency plus transfer time."""
    return profile.latency_ms + round_bytes * 8 / profile.bandwidth_bps * 1000


class VirtualClock:
    """Accumulates round costs exactly (rational milliseconds)."""

    def __init__(self, profile: NetProfile):
        self.profile = profile
        self.elapsed = Fraction(0)
        self.latency_total = Fraction(0)
        self.transfer_total = Fraction(0)
        self._lat = _exact(profile.latency_ms)
        self._bw = _exact(profile.bandwidth_bps)

    def tick(self, round_bytes: int) -> Fraction:
        transfer = Fraction(round_bytes * 8 * 1000) / self._bw
        self.latency_total += self._lat
        self.transfer_total += transfer
        self.elapsed += self._lat + transfer
        return self._lat + transfer


@dataclass
class RoundStats:
    online_rounds: int = 0
    online_bytes: int = 0
    offline_bytes: int = 0
    simulated_time_ms: float = 0.0

    def as_dict(self):
        return dict(online_rounds=self.online_rounds, online_bytes=self.online_bytes,
                    offline_bytes=self.offline_bytes, simulated_time_ms=self.simulated_time_ms)


class RevealTicket:
    """A reveal postponed until the owning context flushes."""

    def __init__(self, correlation_id: str, share: ShareVector, scope: str):
        self.correlation_id = correlation_id
        self.share = share
        self.scope = scope
        self._value = None
        self.resolved = False

    def _resolve(self, value):
        if self.resolved:
            raise UsageError(f"ticket {self.correlation_id} resolved twice")
        self._value = value
        self.resolved = True

    @property
    def value(self) -> np.ndarray:
        if not self.resolved:
            raise UsageError(f"ticket {self.correlation_id} read before flush()")
        return self._value


class _Inventory:
    def __init__(self, items):
        self._items = deque(items)

    def take(self, request: CorrelationRequest) -> CorrelationShare:
        if not self._items:
            raise ProtocolError(f"preprocessing exhausted while requesting {request}")
        corr = self._items.popleft()
        if corr.request != request:
            raise ProtocolError(
                f"preprocessing mismatch: planned {corr.request}, program asked for {request}")
        return corr


class _Planner:
    """Records correlation requests and hands out zero-filled placeholders."""

    def __init__(self, ring):
        self.ring = ring
        self.requests = []

    def take(self, request: CorrelationRequest) -> CorrelationShare:
        self.requests.append(request)
        if request.kind == MATRIX:
            m, k, n = request.shape
            entries = {1: self.ring.zeros((m, k)), 2: self.ring.zeros((k, n)), 3: self.ring.zeros((m, n))}
            shapes = {0: (m, k), 1: (k, n)}
        else:
            entries = {key: self.ring.zeros(request.shape) for key in range(1, 1 << request.arity)}
            shapes = {i: request.shape for i in range(request.arity)}
        masks = {i: self.ring.zeros(shapes[i]) for i, t in enumerate(request.shifts) if t}
        return CorrelationShare(request.kind, f"plan{len(self.requests)}", request, entries, masks)


class _Loopback:
    """Planning transport: every party is alone, so a reveal returns its own share."""

    async def exchange(self, party, items):
        return [data for _, data, _ in items]


class _Network:
    def __init__(self, config: SessionConfig, stats: RoundStats, clock: VirtualClock):
        self.n = config.n_parties
        self.ring = config.ring
        self.stats = stats
        self.clock = clock
        self.round_index = 0
        self.rounds = []
        self.attribution = {}
        self.messages_by_sender = {p: 0 for p in range(self.n)}
        self.messages_by_sender[DEALER] = 0
        self._contrib = {}
        self._finished = set()
        self._waiter = None

    def _future(self):
        if self._waiter is None:
            self._waiter = asyncio.get_running_loop().create_future()
        return self._waiter

    async def exchange(self, party, items):
        fut = self._future()
        frames = [encode_frame(self.round_index, party, cid, data, self.ring) for cid, data, _ in items]
        self._contrib[party] = (frames, [scope for _, _, scope in items])
        if len(self._contrib) == self.n:
            self._complete()
        else:
            self._check_stall()
        return await fut

    def party_done(self, party):
        self._finished.add(party)
        self._check_stall()

    def _check_stall(self):
        if self._contrib and self._waiter is not None and not self._waiter.done() \
                and len(self._contrib) + len(self._finished) >= self.n:
            cids = sorted({decode_frame(f, self.ring)[0].correlation_id
                           for frames, _ in self._contrib.values() for f in frames})
            missing = sorted(set(range(self.n)) - set(self._contrib))
            self._waiter.set_exception(DeadlockError(
                f"round {self.round_index} blocked on {', '.join(cids)}: "
                f"parties {missing} never entered it", cids))
            self._reset()

    def _reset(self):
        self._contrib = {}
        self._waiter = None

    def _complete(self):
        fut = self._waiter
        decoded = {}
        for p in range(self.n):
            frames, _ = self._contrib[p]
            decoded[p] = [decode_frame(f, self.ring) for f in frames]
        layout = [(h.correlation_id, h.shape) for h, _ in decoded[0]]
        for p in range(1, self.n):
            other = [(h.correlation_id, h.shape) for h, _ in decoded[p]]
            if other != layout:
                fut.set_exception(ProtocolDesyncError(
                    f"round {self.round_index}: party {p} sent {other}, party 0 sent {layout}"))
                self._reset()
                return
        sums = []
        for i in range(len(layout)):
            total = decoded[0][i][1]
            for p in range(1, self.n):
                total = self.ring.add(total, decoded[p][i][1])
            sums.append(total)
        sent = {p: (self.n - 1) * sum(h.payload_length for h, _ in decoded[p]) for p in range(self.n)}
        round_bytes = max(sent.values())
        increment = self.clock.tick(round_bytes)
        self.stats.online_rounds += 1
        self.stats.online_bytes += round_bytes
        self.stats.simulated_time_ms = float(self.clock.elapsed)
        for p in range(self.n):
            self.messages_by_sender[p] += (self.n - 1) * len(decoded[p])
        scopes = self._contrib[0][1]
        for (h, _), scope in zip(decoded[0], scopes):
            slot = self.attribution.setdefault(scope, {"rounds": 0, "bytes": 0})
            slot["bytes"] += (self.n - 1) * h.payload_length
        if scopes:
            self.attribution[scopes[0]]["rounds"] += 1
        self.rounds.append(dict(index=self.round_index, bytes=round_bytes, elapsed=increment,
                                correlation_ids=[c for c, _ in layout]))
        self.round_index += 1
        self._reset()
        fut.set_result(sums)


class PartyContext:
    """Everything one party's program may touch."""

    def __init__(self, party: int, config: SessionConfig, network, correlations, planning=False):
        self.party = party
        self.config = config
        self.n_parties = config.n_parties
        self.ring = config.ring
        self.approx = config.approx
        self.planning = planning
        self._net = network
        self._corr = correlations
        self._przs = ZeroShareGenerator(party, config.n_parties, config.seed, self.ring)
        self._pending = []
        self._seq = 0
        self._scopes = []

    @functools.cached_property
    def codec(self):
        return self.config.codec

    # -- inputs -------------------------------------------------------------
    def _zero(self, shape):
        return self._przs.next(shape)

    def input(self, value=None, owner: int = 0, shape=None, frac_bits: int | None = None) -> ShareVector:
        """Secret-share a real tensor held by ``owner`` (zero rounds)."""
        f = self.codec.precision_bits if frac_bits is None else frac_bits
        enc = None
        if self.party == owner:
            enc = self.codec.encode(np.asarray(value, dtype=float), f)
            enc = enc if isinstance(enc, np.ndarray) else self.ring.asarray(enc)
            shape = enc.shape
        elif shape is None:
            raise UsageError("non-owners must pass the public shape of the input")
        data = self._zero(norm_shape(shape))
        if enc is not None:
            data = self.ring.add(data, enc)
        return ShareVector(self.party, data, self.ring, f)

    def input_ring(self, values=None, owner: int = 0, shape=None) -> ShareVector:
        enc = None
        if self.party == owner:
            enc = self.ring.asarray(values)
            shape = enc.shape
        elif shape is None:
            raise UsageError("non-owners must pass the public shape of the input")
        data = self._zero(norm_shape(shape))
        if enc is not None:
            data = self.ring.add(data, enc)
        return ShareVector(self.party, data, self.ring, 0)

    def constant(self, value, shape=(), frac_bits: int | None = None) -> ShareVector:
        """A public constant as a trivial sharing held by party 0."""
        f = self.codec.precision_bits if frac_bits is None else frac_bits
        enc = self.codec.encode(np.broadcast_to(np.asarray(value, dtype=float), norm_shape(shape)), f)
        enc = enc if isinstance(enc, np.ndarray) else self.ring.asarray(enc)
        data = enc if self.party == 0 else self.ring.zeros(enc.shape)
        return ShareVector(self.party, data, self.ring, f)

    # -- preprocessing ------------------------------------------------------
    def take(self, kind: str, shape, arity: int = 2, shifts=None) -> CorrelationShare:
        shape = tuple(shape) if kind == MATRIX else norm_shape(shape)
        shifts = tuple(shifts) if shifts is not None else (0,) * arity
        return self._corr.take(CorrelationRequest(kind, shape, arity, shifts))

    def take_triple(self, shape, shifts=(0, 0)):
        return self.take(TRIPLE, shape, 2, shifts)

    def take_aux(self, arity, shape, shifts=None):
        return self.take(AUX, shape, arity, shifts)

    def take_matrix_triple(self, dims, shifts=(0, 0)):
        return self.take(MATRIX, dims, 2, shifts)

    # -- communication ------------------------------------------------------
    @contextlib.contextmanager
    def scope(self, name: str):
        self._scopes.append(name)
        try:
            yield
        finally:
            self._scopes.pop()

    def _cid(self, label):
        cid = f"{self._seq}:{label}"
        self._seq += 1
        return cid

    def _scope_name(self, label):
        return self._scopes[0] if self._scopes else label.split(".")[0]

    def defer_reveal(self, share: ShareVector, label: str = "reveal") -> RevealTicket:
        ticket = RevealTicket(self._cid(label), share, self._scope_name(label))
        self._pending.append(ticket)
        return ticket

    @property
    def pending(self) -> int:
        return len(self._pending)

    async def flush(self):
        """Resolve every deferred reveal; one round when coalescing is on."""
        pending, self._pending = self._pending, []
        if not pending:
            return
        if self.config.coalesce:
            values = await self._net.exchange(
                self.party, [(t.correlation_id, t.share.data, t.scope) for t in pending])
            for t, v in zip(pending, values):
                t._resolve(v)
        else:
            for t in pending:
                (v,) = await self._net.exchange(self.party, [(t.correlation_id, t.share.data, t.scope)])
                t._resolve(v)

    async def exchange_reveal(self, shares, label: str = "reveal"):
        """Open a list of shares in exactly one round (none for an empty list)."""
        if not shares:
            return []
        items = []
        for s in shares:
            items.append((self._cid(label), s.data, self._scope_name(label)))
        return await self._net.exchange(self.party, items)

    async def reveal(self, share: ShareVector) -> np.ndarray:
        (value,) = await self.exchange_reveal([share], "output")
        return value

    async def open(self, share: ShareVector) -> np.ndarray:
        """Reveal and decode at the share's own scale (exact division)."""
        return self.codec.decode(await self.reveal(share), share.frac_bits)


@dataclass
class SessionResult:
    outputs: list
    stats: RoundStats
    record: DealerRecord
    rounds: list = field(default_factory=list)
    attribution: dict = field(default_factory=dict)
    messages_by_sender: dict = field(default_factory=dict)
    clock: VirtualClock | None = None
    t_comp_s: float = 0.0


async def _drive(contexts, program, network, timeout):
    async def run_party(ctx):
        try:
            return await program(ctx)
        finally:
            network.party_done(ctx.party)

    tasks = [asyncio.ensure_future(run_party(c)) for c in contexts]
    done, pending = await asyncio.wait(tasks, timeout=timeout)
    if pending:
        for t in pending:
            t.cancel()
        await asyncio.gather(*pending, return_exceptions=True)
        raise DeadlockError(f"session exceeded {timeout}s at round {network.round_index}")
    errors = [t.exception() for t in tasks if t.exception() is not None]
    if errors:
        primary = [e for e in errors if not isinstance(e, DeadlockError)]
        raise (primary or errors)[0]
    return [t.result() for t in tasks]


def run_session(program, config: SessionConfig | None = None, session_id: int = 0) -> SessionResult:
    """Plan, preprocess, then execute ``program`` on every party.

    ``program`` is ``async def program(ctx) -> output``. A planning pass runs
    party 0 alone to learn which correlations the program consumes; the
    dealer then generates and distributes all of them before the first
    online round. Programs must therefore request correlations in a
    data-independent order, which holds for arithmetic circuits.
    """
    config = config or SessionConfig()
    ring = config.ring

    planner = _Planner(ring)
    asyncio.run(program(PartyContext(0, config, _Loopback(), planner, planning=True)))

    dealer = TrustedDealer(config.n_parties, ring, seed=config.seed, max_arity=config.max_arity)
    inventories = [[] for _ in range(config.n_parties)]
    dealer_frames = 0
    for request in planner.requests:
        corr = dealer.generate(request)
        cid = dealer.record.items[-1]["correlation_id"]
        for p in range(config.n_parties):
            frames = correlation_frames(corr, p, session_id, cid, ring)
            dealer_frames += len(frames)
            inventories[p].append(correlation_from_frames(frames, request, ring))

    stats = RoundStats(offline_bytes=offline_bytes(dealer.record))
    clock = VirtualClock(config.net)
    network = _Network(config, stats, clock)
    network.messages_by_sender[DEALER] = dealer_frames
    contexts = [PartyContext(p, config, network, _Inventory(inventories[p]))
                for p in range(config.n_parties)]
    start = time.perf_counter()
    outputs = asyncio.run(_drive(contexts, program, network, config.timeout_s))
    t_comp = time.perf_counter() - start
    log.debug("session done: %s", stats)
    return SessionResult(outputs, stats, dealer.record, network.rounds, network.attribution,
                         network.messages_by_sender, clock, t_comp)
