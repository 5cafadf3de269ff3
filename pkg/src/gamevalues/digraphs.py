"""Directed graphs and their 3-labelling games over Z_3.

An arc (x, y) asks the label to step up by one: a labelling w: X -> Z_3 is
perfect when w(y) = w(x) + 1 on every arc.  The associated group based game
puts f(x,y) = 2 on arcs, 1 on reversed arcs, 0 otherwise, with the input
density uniform on the (undirected) edge set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import ValidationError, cyclic_group
from .games import GroupGame, InputDensity


@dataclass(frozen=True)
class Digraph:
    n: int
    arcs: frozenset

    def __post_init__(self):
        arcs = frozenset((int(x), int(y)) for x, y in self.arcs)
        for x, y in arcs:
            if not (0 <= x < self.n and 0 <= y < self.n):
                raise ValidationError(f"arc ({x},{y}) out of range")
            if x == y:
                raise ValidationError("loops are not allowed")
            if (y, x) in arcs:
                raise ValidationError(f"arcs ({x},{y}) and ({y},{x}) both present")
        object.__setattr__(self, "arcs", arcs)

    @property
    def edges(self) -> frozenset:
        """E = D union D^t as ordered pairs."""
        return frozenset(self.arcs | {(y, x) for x, y in self.arcs})

    def to_json(self) -> dict:
        return {"n": self.n, "arcs": sorted(self.arcs)}

    @staticmethod
    def from_json(data: dict | str) -> "Digraph":
        if isinstance(data, str):
            data = json.loads(data)
        if "n" not in data or "arcs" not in data:
            raise ValidationError("digraph JSON needs 'n' and 'arcs'")
        return Digraph(n=int(data["n"]), arcs=frozenset(tuple(a) for a in data["arcs"]))

    @staticmethod
    def from_arc_text(text: str) -> "Digraph":
        """One arc per line as "x y"; vertex count is 1 + the largest index."""
        arcs = set()
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValidationError(f"bad arc line {line!r}")
            arcs.add((int(parts[0]), int(parts[1])))
        if not arcs:
            raise ValidationError("arc list is empty")
        n = 1 + max(max(x, y) for x, y in arcs)
        return Digraph(n=n, arcs=frozenset(arcs))


def directed_cycle(k: int) -> Digraph:
    if k < 3:
        raise ValidationError("directed cycle needs k >= 3")
    return Digraph(n=k, arcs=frozenset((x, (x + 1) % k) for x in range(k)))


def game_from_digraph(graph: Digraph) -> tuple[GroupGame, InputDensity]:
    """The Z_3 game of a digraph with density uniform on its edge set."""
    edges = graph.edges
    if not edges:
        raise ValidationError("digraph has no edges")
    n = graph.n
    f = np.zeros((n, n), dtype=np.int64)
    for x, y in graph.arcs:
        f[x, y] = 2
        f[y, x] = 1
    pi = np.zeros((n, n))
    w = 1.0 / len(edges)
    exact = [[Fraction(0)] * n for _ in range(n)]
    for x, y in edges:
        pi[x, y] = w
        exact[x][y] = Fraction(1, len(edges))
    game = GroupGame(group=cyclic_group(3), nx=n, ny=n, f=f)
    return game, InputDensity(pi=pi, exact=tuple(tuple(r) for r in exact))


def net_length(graph: Digraph, cycle: list[int]) -> int:
    """Forward arcs minus backward arcs along a closed walk in the edge set."""
    if len(cycle) < 2:
        raise ValidationError("cycle needs at least two vertices")
    arcs = graph.arcs
    total = 0
    for i, x in enumerate(cycle):
        y = cycle[(i + 1) % len(cycle)]
        if (x, y) in arcs:
            total += 1
        elif (y, x) in arcs:
            total -= 1
        else:
            raise ValidationError(f"({x},{y}) is not an edge of the graph")
    return total


def has_perfect_strategy(graph: Digraph) -> tuple[bool, list[int] | None]:
    """Decide perfect 3-labellability and produce a witness labelling.

    Labels are propagated over a spanning tree of each connected component
    of the edge set, then every edge is checked.  Roots get label 0, so the
    witness is deterministic.
    """
    n = graph.n
    step = {}
    for x, y in graph.arcs:
        step[(x, y)] = 1
        step[(y, x)] = -1
    adj = [[] for _ in range(n)]
    for x, y in step:
        adj[x].append(y)
    labels = [None] * n
    for root in range(n):
        if labels[root] is not None:
            continue
        labels[root] = 0
        stack = [root]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if labels[y] is None:
                    labels[y] = (labels[x] + step[(x, y)]) % 3
                    stack.append(y)
    for (x, y), d in step.items():
        if (labels[x] + d) % 3 != labels[y]:
            return False, None
    return True, labels


def dcut(graph: Digraph, max_vertices: int = 16) -> int:
    """Largest number of arcs satisfied by any 3-labelling (exact search).

    Depth-first search over labellings with the remaining-arc count as an
    admissible bound.  Counts arcs (x, y) with w(y) = w(x) + 1; the edge-set
    form of the same quantity is twice this value.
    """
    if not graph.arcs:
        raise ValidationError("dcut needs at least one arc")
    if graph.n > max_vertices:
        raise ValidationError(f"dcut search guarded to {max_vertices} vertices")
    perfect, labels = has_perfect_strategy(graph)
    if perfect:
        return len(graph.arcs)
    n = graph.n
    arcs_at = [[] for _ in range(n)]  # arcs whose later endpoint is this vertex
    for x, y in graph.arcs:
        arcs_at[max(x, y)].append((x, y))
    # arcs that cannot be decided before a given depth
    future = [0] * (n + 1)
    for depth in range(n - 1, -1, -1):
        future[depth] = future[depth + 1] + len(arcs_at[depth])
    best = 0
    w = [0] * n

    def walk(depth: int, score: int):
        nonlocal best
        if depth == n:
            best = max(best, score)
            return
        if score + future[depth] <= best:
            return
        for label in range(3):
            w[depth] = label
            gained = sum(
                1 for x, y in arcs_at[depth]
                if (w[x] + 1) % 3 == w[y]
            )
            walk(depth + 1, score + gained)

    walk(0, 0)
    return best
