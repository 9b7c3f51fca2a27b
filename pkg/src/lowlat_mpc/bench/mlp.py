"""A small seeded two-layer classifier used as the secure-inference demo."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import nonlinear, protocols

IN, HIDDEN, OUT = 8, 16, 3
CLIENT, MODEL_OWNER = 0, 1


@dataclass(frozen=True)
class MLP:
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray

    @classmethod
    def seeded(cls, seed: int = 0) -> "MLP":
        # Weight scales keep hidden pre-activations inside the sigmoid domain
        # and the logits inside the exp/reciprocal domains for inputs in [-1, 1].
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(23,)))
        return cls(
            W1=rng.normal(0.0, 0.6, (IN, HIDDEN)),
            b1=rng.normal(0.0, 0.2, HIDDEN),
            W2=rng.normal(0.0, 0.5, (HIDDEN, OUT)),
            b2=rng.normal(0.0, 0.2, OUT),
        )

    def forward(self, X):
        """Plaintext reference: sigmoid hidden layer, softmax output."""
        h = 1.0 / (1.0 + np.exp(-(X @ self.W1 + self.b1)))
        z = h @ self.W2 + self.b2
        e = np.exp(z - z.max(axis=1, keepdims=True))
        return e / e.sum(axis=1, keepdims=True)


def sample_inputs(count: int = 100, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(29,)))
    return rng.uniform(-1.0, 1.0, (count, IN))


def secure_program(model: MLP, X: np.ndarray):
    """Session program: the client holds ``X``, another party holds the model."""
    n = X.shape[0]

    async def program(ctx):
        mine = ctx.party == MODEL_OWNER
        x = ctx.input(X if ctx.party == CLIENT else None, CLIENT, X.shape)
        W1 = ctx.input(model.W1 if mine else None, MODEL_OWNER, (IN, HIDDEN))
        b1 = ctx.input(np.broadcast_to(model.b1, (n, HIDDEN)) if mine else None, MODEL_OWNER, (n, HIDDEN))
        W2 = ctx.input(model.W2 if mine else None, MODEL_OWNER, (HIDDEN, OUT))
        b2 = ctx.input(np.broadcast_to(model.b2, (n, OUT)) if mine else None, MODEL_OWNER, (n, OUT))

        with ctx.scope("matmul"):
            z1 = protocols.add(await protocols.matmul(ctx, x, W1), b1)
        h = await nonlinear.sigmoid(ctx, z1)
        with ctx.scope("matmul"):
            z2 = protocols.add(await protocols.matmul(ctx, h, W2), b2)
        probs = await nonlinear.softmax(ctx, z2)
        return await ctx.open(probs)

    return program
