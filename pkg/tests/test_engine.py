import numpy as np
import pytest

from lowlat_mpc import PROFILES, NetProfile, advance_clock
from lowlat_mpc.errors import DeadlockError, ProtocolDesyncError, UsageError
from lowlat_mpc.protocols import mul

from conftest import held_by, session


def test_advance_clock_examples():
    assert advance_clock(0, PROFILES["n_high"]) == 40.0
    assert advance_clock(2 ** 20, PROFILES["n_low"]) == pytest.approx(0.1 + 8.388608)
    med = PROFILES["n_med"]
    assert advance_clock(100, med) + advance_clock(100, med) == pytest.approx(10 + 2 * 800 / 1e6)


def test_reveal_everywhere():
    async def prog(ctx):
        return await ctx.reveal(ctx.input_ring(held_by(ctx, 1, [42]), owner=1, shape=(1,)))

    r = session(prog)
    assert all(list(out) == [42] for out in r.outputs)
    assert r.stats.online_rounds == 1


def test_exchange_many_is_one_round_and_empty_is_free():
    async def prog(ctx):
        xs = [ctx.input_ring(held_by(ctx, 0, [i, i + 1]), 0, (2,)) for i in range(4)]
        assert await ctx.exchange_reveal([]) == []
        return [list(v) for v in await ctx.exchange_reveal(xs)]

    r = session(prog)
    assert r.outputs[0] == [[i, i + 1] for i in range(4)]
    assert r.stats.online_rounds == 1


def _deferred(n, coalesce):
    async def prog(ctx):
        tickets = [ctx.defer_reveal(ctx.input_ring(held_by(ctx, 2, [7 * i]), 2, (1,))) for i in range(n)]
        assert ctx.pending == n
        await ctx.flush()
        return [int(t.value[0]) for t in tickets]

    return session(prog, coalesce=coalesce)


def test_coalescing_preserves_payloads():
    on, off = _deferred(5, True), _deferred(5, False)
    assert on.outputs == off.outputs
    assert on.outputs[0] == [0, 7, 14, 21, 28]
    assert (on.stats.online_rounds, off.stats.online_rounds) == (1, 5)
    assert on.stats.online_bytes == off.stats.online_bytes


def test_flush_without_tickets():
    async def prog(ctx):
        await ctx.flush()

    assert session(prog).stats.online_rounds == 0


def test_ticket_before_flush():
    async def prog(ctx):
        t = ctx.defer_reveal(ctx.input_ring(held_by(ctx, 0, [1]), 0, (1,)))
        t.value

    with pytest.raises(UsageError):
        session(prog)


def test_single_mul_is_one_round():
    async def prog(ctx):
        x = ctx.input(held_by(ctx, 0, [2.0]), 0, (1,))
        y = ctx.input(held_by(ctx, 1, [3.0]), 1, (1,))
        return await mul(ctx, x, y)

    r = session(prog)
    assert r.stats.online_rounds == 1
    assert r.record.beaver_elements == 3


def test_empty_program():
    async def prog(ctx):
        return None

    r = session(prog)
    assert r.stats.as_dict() == dict(online_rounds=0, online_bytes=0, offline_bytes=0, simulated_time_ms=0.0)


def test_seeded_runs_identical():
    async def prog(ctx):
        x = ctx.input(held_by(ctx, 0, np.linspace(-1, 1, 8)), 0, (8,))
        return list(await ctx.reveal(await mul(ctx, x, x)))

    a, b = session(prog, seed=3), session(prog, seed=3)
    assert a.stats == b.stats and a.outputs == b.outputs
    assert a.rounds == b.rounds


def test_byte_accounting():
    async def prog(ctx):
        await ctx.reveal(ctx.input_ring(held_by(ctx, 0, np.arange(10)), 0, (10,)))

    r = session(prog, n_parties=4, ring_bits=128, net=NetProfile(1.0, 1e6, "t"))
    # each party sends 10 elements of 16 bytes to 3 peers
    assert r.stats.online_bytes == 3 * 10 * 16
    assert r.stats.simulated_time_ms == pytest.approx(1.0 + 480 * 8 / 1e6 * 1000)
    assert r.messages_by_sender[0] == 3


def test_dealer_messages_counted():
    async def prog(ctx):
        x = ctx.input(held_by(ctx, 0, [1.0]), 0, (1,))
        await mul(ctx, x, x)

    r = session(prog)
    assert r.messages_by_sender["dealer"] == 3 * 3


def test_deadlock_names_correlation():
    async def prog(ctx):
        if ctx.party == 0:
            await ctx.reveal(ctx.input_ring([1], 0))

    with pytest.raises(DeadlockError) as err:
        session(prog)
    assert any("output" in c for c in err.value.correlation_ids)


def test_desync_detected():
    async def prog(ctx):
        n = 2 if ctx.party == 1 else 1
        await ctx.reveal(ctx.input_ring(held_by(ctx, 0, [0] * n), 0, (n,)))

    with pytest.raises(ProtocolDesyncError):
        session(prog)


def test_attribution_by_scope():
    async def prog(ctx):
        x = ctx.input(held_by(ctx, 0, [1.0]), 0, (1,))
        with ctx.scope("layer"):
            await mul(ctx, x, x)
        await ctx.reveal(x)

    r = session(prog)
    assert r.attribution["layer"]["rounds"] == 1
    assert r.attribution["output"]["rounds"] == 1
    assert sum(a["bytes"] for a in r.attribution.values()) == r.stats.online_bytes
