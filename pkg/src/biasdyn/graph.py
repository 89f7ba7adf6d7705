"""Weighted directed influence graphs.

Agents are 0-based integers internally. An edge ``(j, i)`` means agent ``j``
influences agent ``i`` with weight ``w`` in (0, 1] and carries the bias agent
``i`` applies to disagreements with ``j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .bias import BiasSpec
from .errors import ValidationError


class Edge(NamedTuple):
    source: int
    target: int
    weight: float
    bias: BiasSpec


@dataclass(frozen=True)
class ComponentPartition:
    """Strongly connected components, ordered by smallest member."""

    components: tuple[frozenset[int], ...]
    source_flags: tuple[bool, ...]

    def __len__(self) -> int:
        return len(self.components)

    @property
    def sources(self) -> list[frozenset[int]]:
        return [c for c, s in zip(self.components, self.source_flags) if s]

    def component_of(self, agent: int) -> int:
        for k, comp in enumerate(self.components):
            if agent in comp:
                return k
        raise ValidationError(f"agent {agent} not in partition")


@dataclass(frozen=True, eq=False)
class InfluenceGraph:
    n: int
    edges: tuple[Edge, ...]
    _weights: dict = field(repr=False, compare=False)
    _in: tuple = field(repr=False, compare=False)
    _out: tuple = field(repr=False, compare=False)

    def weight(self, j: int, i: int) -> float:
        """Weight of the edge ``j -> i``; 0.0 when there is no such edge."""
        self._check(j)
        self._check(i)
        e = self._weights.get((j, i))
        return 0.0 if e is None else e.weight

    def edge(self, j: int, i: int) -> Edge | None:
        return self._weights.get((j, i))

    def in_edges(self, i: int) -> tuple[Edge, ...]:
        """Edges into ``i`` in ascending source order."""
        self._check(i)
        return self._in[i]

    def successors(self, j: int) -> tuple[int, ...]:
        self._check(j)
        return self._out[j]

    def _check(self, i: int) -> None:
        if not (isinstance(i, (int, np.integer)) and 0 <= i < self.n):
            raise ValidationError(f"agent id {i!r} out of range 0..{self.n - 1}")

    def proportional_matrix(self) -> np.ndarray:
        """Matrix ``P`` with ``P[i, j]`` the proportional influence of j over i."""
        P = np.zeros((self.n, self.n))
        for i in range(self.n):
            for e in self._in[i]:
                P[i, e.source] = proportional_influence(self, e.source, i)
        return P

    def subgraph(self, agents: Iterable[int]) -> tuple["InfluenceGraph", list[int]]:
        """Induced subgraph on ``agents``, relabelled 0..k-1.

        Returns the subgraph and the original id of each new agent.
        """
        keep = sorted(set(agents))
        for a in keep:
            self._check(a)
        index = {a: k for k, a in enumerate(keep)}
        edges = [
            (index[e.source], index[e.target], e.weight, e.bias)
            for e in self.edges
            if e.source in index and e.target in index
        ]
        return build_graph(len(keep), edges), keep


def build_graph(n: int, edges: Iterable) -> InfluenceGraph:
    """Validate ``(source, target, weight, bias)`` tuples into a graph.

    Raises ValidationError naming the offending edge for an out-of-range id,
    a weight outside (0, 1], a duplicate ordered pair, or a missing bias.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValidationError(f"agent count must be a positive integer, got {n!r}")
    n = int(n)
    weights: dict[tuple[int, int], Edge] = {}
    for k, raw in enumerate(edges):
        try:
            src, tgt, w, b = raw
        except (TypeError, ValueError):
            raise ValidationError(f"edge #{k}: expected (source, target, weight, bias)") from None
        for end, a in (("source", src), ("target", tgt)):
            if not isinstance(a, (int, np.integer)) or not 0 <= a < n:
                raise ValidationError(f"edge #{k} ({src}->{tgt}): {end} id out of range 0..{n - 1}")
        src, tgt = int(src), int(tgt)
        try:
            w = float(w)
        except (TypeError, ValueError):
            raise ValidationError(f"edge #{k} ({src}->{tgt}): weight {w!r} is not a number") from None
        if not (0.0 < w <= 1.0):
            raise ValidationError(f"edge #{k} ({src}->{tgt}): weight {w} outside (0, 1]")
        if not isinstance(b, BiasSpec):
            raise ValidationError(f"edge #{k} ({src}->{tgt}): bias must be a BiasSpec")
        if (src, tgt) in weights:
            raise ValidationError(f"edge #{k} ({src}->{tgt}): duplicate edge")
        weights[(src, tgt)] = Edge(src, tgt, w, b)

    ordered = tuple(sorted(weights.values(), key=lambda e: (e.target, e.source)))
    into: list[list[Edge]] = [[] for _ in range(n)]
    out: list[list[int]] = [[] for _ in range(n)]
    for e in ordered:
        into[e.target].append(e)
        out[e.source].append(e.target)
    return InfluenceGraph(
        n=n,
        edges=ordered,
        _weights=weights,
        _in=tuple(tuple(x) for x in into),
        _out=tuple(tuple(sorted(x)) for x in out),
    )


def influencers(g: InfluenceGraph, i: int) -> set[int]:
    """The agents with a direct edge into ``i``."""
    return {e.source for e in g.in_edges(i)}


def proportional_influence(g: InfluenceGraph, j: int, i: int) -> float:
    g._check(j)
    g._check(i)
    e = g.edge(j, i)
    if e is None:
        return 0.0
    total = 0.0
    for f in g.in_edges(i):
        total += f.weight
    return e.weight / total


def strongly_connected_components(g: InfluenceGraph) -> ComponentPartition:
    """Tarjan's algorithm, iterative to avoid recursion limits."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    found: list[frozenset[int]] = []
    counter = 0

    for root in range(g.n):
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(g.successors(root)))]
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(g.successors(w))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                found.append(frozenset(comp))

    found.sort(key=min)
    owner = {a: k for k, comp in enumerate(found) for a in comp}
    is_source = [True] * len(found)
    for e in g.edges:
        if owner[e.source] != owner[e.target]:
            is_source[owner[e.target]] = False
    return ComponentPartition(tuple(found), tuple(is_source))


def is_strongly_connected(g: InfluenceGraph) -> bool:
    return len(strongly_connected_components(g)) == 1


def has_path(g: InfluenceGraph, i: int, j: int) -> bool:
    """True iff ``j`` is reachable from ``i``; every agent reaches itself."""
    g._check(i)
    g._check(j)
    seen = {i}
    frontier = [i]
    while frontier:
        v = frontier.pop()
        if v == j:
            return True
        for w in g.successors(v):
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    return False
