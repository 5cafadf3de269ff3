"""Exact classical values by structured exhaustive search.

The bipartite search enumerates Bob's functions only; for a fixed h_B the
best Alice reply separates over questions and is picked pointwise.  The
synchronous search is a depth-first scan over single functions with the
unresolved input-pair mass as an admissible pruning bound.  Values are exact
rationals whenever the density carries exact rational entries.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .algebra import ValidationError
from .games import DeterministicStrategy, GroupGame, InputDensity, UniqueGame

SEARCH_GUARD = 10**7


@dataclass(frozen=True)
class SearchReport:
    value: Fraction | float
    best: DeterministicStrategy
    explored: int

    def to_json(self) -> dict:
        if isinstance(self.value, Fraction):
            value = {"num": self.value.numerator, "den": self.value.denominator}
        else:
            value = self.value
        return {"value": value, "strategy": self.best.to_json(), "explored": self.explored}


def _weights(pi: InputDensity) -> tuple[np.ndarray, int | None]:
    """Integer weights over a common denominator when pi is rational."""
    if pi.exact is None:
        return pi.pi, None
    denom = lcm(*(v.denominator for row in pi.exact for v in row)) if pi.exact else 1
    w = np.array([[int(v * denom) for v in row] for row in pi.exact], dtype=np.int64)
    return w, denom


def _as_value(total, denom: int | None):
    if denom is None:
        return float(total)
    return Fraction(int(total), denom)


def det_value(game: UniqueGame, pi: InputDensity) -> SearchReport:
    """Exact bipartite deterministic value."""
    if pi.pi.shape != (game.nx, game.ny):
        raise ValidationError("density shape does not match the game")
    if game.k ** game.ny > SEARCH_GUARD:
        raise ValidationError("bipartite search guarded to k^ny <= 1e7")
    w, denom = _weights(pi)
    v = game.win_table()
    # contrib[y, b, x, a] = pi(x,y) V(x,y,a,b)
    contrib = np.einsum("xy,xyab->ybxa", w, v)
    ys = np.arange(game.ny)
    best_total = None
    best_hb = None
    explored = 0
    for hb in itertools.product(range(game.k), repeat=game.ny):
        explored += 1
        score = contrib[ys, hb].sum(axis=0)  # (nx, k)
        total = score.max(axis=1).sum()
        if best_total is None or total > best_total:
            best_total = total
            best_hb = hb
    score = contrib[ys, best_hb].sum(axis=0)
    ha = tuple(int(a) for a in score.argmax(axis=1))
    strat = DeterministicStrategy(hA=ha, hB=best_hb)
    return SearchReport(value=_as_value(best_total, denom), best=strat, explored=explored)


def sync_det_value(game: UniqueGame, pi: InputDensity) -> SearchReport:
    """Exact synchronous value over single functions h: X -> A."""
    if game.nx != game.ny:
        raise ValidationError("synchronous search needs a square game")
    if pi.pi.shape != (game.nx, game.ny):
        raise ValidationError("density shape does not match the game")
    n, k = game.nx, game.k
    if k ** n > SEARCH_GUARD:
        raise ValidationError("synchronous search guarded to k^n <= 1e7")
    w, denom = _weights(pi)
    v = game.win_table()
    # mass still reachable once every input < depth is assigned
    future = np.zeros(n + 1, dtype=w.dtype)
    for d in range(n - 1, -1, -1):
        future[d] = future[d + 1] + w[d, d] + w[:d, d].sum() + w[d, :d].sum()

    h = [0] * n
    best_total = -1 if denom is not None else -1.0
    best_h: tuple = tuple(h)
    explored = 0

    def walk(depth, score):
        nonlocal best_total, best_h, explored
        if depth == n:
            explored += 1
            if score > best_total:
                best_total = score
                best_h = tuple(h)
            return
        if score + future[depth] <= best_total:
            return
        gain_base = w[depth, depth] * np.diag(v[depth, depth])
        for a in range(k):
            gain = gain_base[a]
            for i in range(depth):
                gain += w[i, depth] * v[i, depth, h[i], a] + w[depth, i] * v[depth, i, a, h[i]]
            h[depth] = a
            walk(depth + 1, score + gain)

    walk(0, 0 if denom is not None else 0.0)
    strat = DeterministicStrategy(hA=best_h, hB=best_h, synchronous=True)
    return SearchReport(value=_as_value(best_total, denom), best=strat, explored=explored)


def perfect_sync_group_strategy(game: GroupGame, pi: InputDensity | None = None):
    """Perfect synchronous strategy for a synchronous group based game, if any.

    With no density (or full support) the canonical candidate w(x) = f(x, x0)
    is built and checked on every pair; it succeeds exactly when some perfect
    synchronous strategy exists.  With a density of partial support the
    constraints w(x) w(y)^-1 = f(x,y) are only required on supported pairs,
    and labels are propagated over the support graph instead (roots get the
    identity), then every supported constraint is checked.
    """
    if not game.is_synchronous():
        raise ValidationError("game is not synchronous")
    group = game.group
    t, inv = group.table, group.inverse
    n = game.nx
    if pi is not None and pi.pi.shape != (n, n):
        raise ValidationError("density shape does not match the game")

    if pi is None or np.all(pi.pi > 0):
        w = [int(game.f[x, 0]) for x in range(n)]
        support = [(x, y) for x in range(n) for y in range(n)]
    else:
        support = [(x, y) for x in range(n) for y in range(n) if pi.pi[x, y] > 0]
        # each supported constraint w(x) w(y)^-1 = f(x,y) propagates both ways
        hops: dict[int, dict[int, int]] = {x: {} for x in range(n)}
        for x, y in support:
            fxy = int(game.f[x, y])
            hops[x].setdefault(y, int(inv[fxy]))   # w(y) = f(x,y)^-1 w(x)
            hops[y].setdefault(x, fxy)             # w(x) = f(x,y) w(y)
        w = [None] * n
        for root in range(n):
            if w[root] is not None:
                continue
            w[root] = int(group.identity)
            queue = [root]
            while queue:
                x = queue.pop(0)
                for y in sorted(hops[x]):
                    if w[y] is None:
                        w[y] = int(t[hops[x][y], w[x]])
                        queue.append(y)
    for x, y in support:
        if t[w[x], inv[w[y]]] != game.f[x, y]:
            return None
    return tuple(int(v) for v in w)
