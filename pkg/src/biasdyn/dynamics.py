"""Synchronous bias update and trajectory simulation.

Agent ``i`` moves to

    clamp01(B_i + sum_j p(j, i) * bias_ij(B_j - B_i))

where ``p(j, i)`` is the proportional influence of ``j`` over ``i`` and the
sum runs over influencers in ascending id order, so runs are bit-for-bit
reproducible. Agents without influencers keep their belief.
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass

import numpy as np

from .errors import NumericError, ValidationError
from .graph import InfluenceGraph, proportional_influence

_kernels: "weakref.WeakKeyDictionary[InfluenceGraph, _Kernel]" = weakref.WeakKeyDictionary()


class _Kernel:
    __slots__ = ("n", "src", "tgt", "pinf", "groups")

    def __init__(self, g: InfluenceGraph):
        self.n = g.n
        # g.edges is sorted by (target, source); bincount accumulates in input
        # order, which fixes the summation order.
        self.src = np.array([e.source for e in g.edges], dtype=np.intp)
        self.tgt = np.array([e.target for e in g.edges], dtype=np.intp)
        self.pinf = np.array([proportional_influence(g, e.source, e.target) for e in g.edges])
        by_bias: dict = {}
        for k, e in enumerate(g.edges):
            by_bias.setdefault(e.bias, []).append(k)
        self.groups = [(b, np.array(ix, dtype=np.intp)) for b, ix in by_bias.items()]

    def raw(self, B: np.ndarray) -> np.ndarray:
        if not len(self.src):
            return B.copy()
        d = B[self.src] - B[self.tgt]
        if len(self.groups) == 1:
            v = self.groups[0][0](d)
        else:
            v = np.empty_like(d)
            for b, ix in self.groups:
                v[ix] = b(d[ix])
        s = np.bincount(self.tgt, weights=self.pinf * v, minlength=self.n)
        out = B + s
        if not np.isfinite(out).all():
            raise NumericError(f"non-finite belief after update: {out}")
        return out


def _kernel(g: InfluenceGraph) -> _Kernel:
    k = _kernels.get(g)
    if k is None:
        k = _kernels[g] = _Kernel(g)
    return k


def clamp01(r: float) -> float:
    r = float(r)
    if not math.isfinite(r):
        raise NumericError(f"cannot clamp non-finite value {r}")
    return min(max(r, 0.0), 1.0)


def as_state(B, n: int | None = None) -> np.ndarray:
    """Validate a belief vector: finite, in [0, 1], and of length ``n``."""
    arr = np.array(B, dtype=float)
    if arr.ndim != 1:
        raise ValidationError(f"belief state must be one-dimensional, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise ValidationError(f"belief state has {arr.shape[0]} entries, graph has {n} agents")
    if not np.isfinite(arr).all():
        raise NumericError("belief state contains non-finite values")
    bad = np.flatnonzero((arr < 0) | (arr > 1))
    if len(bad):
        raise ValidationError(f"beliefs outside [0, 1] at agents {bad.tolist()}")
    return arr


def update(g: InfluenceGraph, B) -> np.ndarray:
    """One clamped synchronous step."""
    B = as_state(B, g.n)
    return np.clip(_kernel(g).raw(B), 0.0, 1.0)


def update_unclamped(g: InfluenceGraph, B) -> np.ndarray:
    """One step without the clamp.

    Equal to :func:`update` whenever every bias lies in region R.
    """
    B = as_state(B, g.n)
    return _kernel(g).raw(B)


def step_many(g: InfluenceGraph, B, steps: int) -> np.ndarray:
    """Apply ``steps`` clamped updates and return only the final state."""
    k = _kernel(g)
    B = as_state(B, g.n)
    for _ in range(steps):
        B = np.clip(k.raw(B), 0.0, 1.0)
    return B


@dataclass(frozen=True)
class Trajectory:
    """States ``B^0 .. B^T`` as rows of a ``(T + 1, n)`` array."""

    states: np.ndarray

    def __len__(self) -> int:
        return self.states.shape[0]

    @property
    def steps(self) -> int:
        return self.states.shape[0] - 1

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    @property
    def min(self) -> np.ndarray:
        return self.states.min(axis=1)

    @property
    def max(self) -> np.ndarray:
        return self.states.max(axis=1)

    @property
    def gap(self) -> np.ndarray:
        return self.max - self.min


def simulate(g: InfluenceGraph, B0, steps: int, stop_gap: float | None = None) -> Trajectory:
    """Run ``steps`` synchronous updates from ``B0``.

    With ``stop_gap`` set, stop early once max - min falls to or below it.
    """
    if steps < 0:
        raise ValidationError(f"steps must be >= 0, got {steps}")
    k = _kernel(g)
    B = as_state(B0, g.n)
    out = np.empty((steps + 1, g.n))
    out[0] = B
    t = 0
    while t < steps:
        if stop_gap is not None and B.max() - B.min() <= stop_gap:
            break
        B = np.clip(k.raw(B), 0.0, 1.0)
        t += 1
        out[t] = B
    return Trajectory(out[: t + 1])
