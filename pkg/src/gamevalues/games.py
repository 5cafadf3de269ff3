"""Game and correlation data model.

A unique game stores one permutation of the output set per question pair:
the pair (a, b) wins at (x, y) exactly when a = perm[x][y](b).  Group based
games act by left translation b -> f(x,y)*b and promote losslessly to
unique games.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import FiniteGroup, ValidationError, commutator, group_from_name


@dataclass(frozen=True)
class UniqueGame:
    nx: int
    ny: int
    k: int
    perm: np.ndarray  # (nx, ny, k); perm[x, y, b] = winning a for answer b

    def __post_init__(self):
        perm = np.asarray(self.perm, dtype=np.int64)
        if perm.shape != (self.nx, self.ny, self.k):
            raise ValidationError("perm table must have shape (nx, ny, k)")
        want = np.arange(self.k)
        if not np.all(np.sort(perm, axis=2) == want):
            raise ValidationError("each perm entry must be a bijection on outputs")
        object.__setattr__(self, "perm", perm)
        perm.flags.writeable = False

    def verify(self, x: int, y: int, a: int, b: int) -> int:
        return int(a == self.perm[x, y, b])

    def win_table(self) -> np.ndarray:
        """V as a dense 0/1 array of shape (nx, ny, k, k) indexed [x,y,a,b]."""
        v = np.zeros((self.nx, self.ny, self.k, self.k), dtype=np.int64)
        b = np.arange(self.k)
        for x in range(self.nx):
            for y in range(self.ny):
                v[x, y, self.perm[x, y, b], b] = 1
        return v

    def is_synchronous(self) -> int:
        if self.nx != self.ny:
            return 0
        idx = np.arange(self.k)
        return int(all(np.array_equal(self.perm[x, x], idx) for x in range(self.nx)))

    def is_symmetric(self) -> int:
        if self.nx != self.ny:
            return 0
        for x in range(self.nx):
            for y in range(self.ny):
                inv = np.empty(self.k, dtype=np.int64)
                inv[self.perm[x, y]] = np.arange(self.k)
                if not np.array_equal(self.perm[y, x], inv):
                    return 0
        return 1

    def to_json(self) -> dict:
        return {"kind": "unique", "nx": self.nx, "ny": self.ny, "k": self.k,
                "perm": self.perm.tolist()}


@dataclass(frozen=True)
class GroupGame:
    group: FiniteGroup
    nx: int
    ny: int
    f: np.ndarray  # (nx, ny) group element indices

    def __post_init__(self):
        f = np.asarray(self.f, dtype=np.int64)
        if f.shape != (self.nx, self.ny):
            raise ValidationError("f table must have shape (nx, ny)")
        if f.min() < 0 or f.max() >= self.group.order:
            raise ValidationError("f table contains invalid group elements")
        object.__setattr__(self, "f", f)
        f.flags.writeable = False

    @property
    def k(self) -> int:
        return self.group.order

    def to_unique_game(self) -> UniqueGame:
        # left translation: a = f(x,y) * b
        perm = self.group.table[self.f]  # (nx, ny, k)
        return UniqueGame(nx=self.nx, ny=self.ny, k=self.group.order, perm=perm)

    def is_synchronous(self) -> int:
        if self.nx != self.ny:
            return 0
        e = self.group.identity
        return int(all(self.f[x, x] == e for x in range(self.nx)))

    def is_symmetric(self) -> int:
        if self.nx != self.ny:
            return 0
        inv = self.group.inverse
        return int(np.array_equal(self.f.T, inv[self.f]))

    def to_json(self) -> dict:
        return {"kind": "group", "group": self.group.to_json(),
                "nx": self.nx, "ny": self.ny, "f": self.f.tolist()}


@dataclass(frozen=True)
class InputDensity:
    """Nonnegative matrix over question pairs summing to one.

    exact, when present, carries the same entries as Fractions so searches
    can report exact rational values.
    """

    pi: np.ndarray
    exact: tuple | None = None

    def __post_init__(self):
        pi = np.asarray(self.pi, dtype=float)
        if pi.ndim != 2:
            raise ValidationError("pi must be a matrix")
        if pi.min() < 0:
            raise ValidationError("pi entries must be nonnegative")
        if abs(pi.sum() - 1.0) > 1e-12:
            raise ValidationError("pi entries must sum to 1")
        object.__setattr__(self, "pi", pi)
        pi.flags.writeable = False
        if self.exact is not None:
            ex = tuple(tuple(Fraction(v) for v in row) for row in self.exact)
            if len(ex) != pi.shape[0] or any(len(r) != pi.shape[1] for r in ex):
                raise ValidationError("exact entries must match pi's shape")
            if sum(v for row in ex for v in row) != 1:
                raise ValidationError("exact entries must sum to 1")
            object.__setattr__(self, "exact", ex)

    @property
    def min_entry(self) -> float:
        return float(self.pi.min())

    def to_json(self) -> dict:
        return {"pi": self.pi.tolist()}


def uniform_density(nx: int, ny: int) -> InputDensity:
    w = Fraction(1, nx * ny)
    return InputDensity(
        pi=np.full((nx, ny), 1.0 / (nx * ny)),
        exact=tuple(tuple(w for _ in range(ny)) for _ in range(nx)),
    )


@dataclass(frozen=True)
class Correlation:
    """p(a, b | x, y) stored as array [x, y, a, b]."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.ndim != 4:
            raise ValidationError("correlation must be a 4-index array")
        if p.min() < -1e-12:
            raise ValidationError("correlation entries must be nonnegative")
        sums = p.sum(axis=(2, 3))
        if np.max(np.abs(sums - 1.0)) > 1e-9:
            raise ValidationError("correlation must be normalized per question pair")
        object.__setattr__(self, "p", p)
        p.flags.writeable = False

    def marginal_a(self) -> np.ndarray:
        """sum_b p(a,b|x,y) as array [x, y, a]."""
        return self.p.sum(axis=3)

    def marginal_b(self) -> np.ndarray:
        """sum_a p(a,b|x,y) as array [x, y, b]."""
        return self.p.sum(axis=2)


@dataclass(frozen=True)
class DeterministicStrategy:
    hA: tuple
    hB: tuple
    synchronous: bool = False

    def __post_init__(self):
        object.__setattr__(self, "hA", tuple(int(v) for v in self.hA))
        object.__setattr__(self, "hB", tuple(int(v) for v in self.hB))
        if self.synchronous and self.hA != self.hB:
            raise ValidationError("synchronous strategy needs hA = hB")

    def to_correlation(self, k: int) -> Correlation:
        nx, ny = len(self.hA), len(self.hB)
        p = np.zeros((nx, ny, k, k))
        for x in range(nx):
            for y in range(ny):
                p[x, y, self.hA[x], self.hB[y]] = 1.0
        return Correlation(p)

    def to_json(self) -> dict:
        return {"hA": list(self.hA), "hB": list(self.hB)}


def expected_value(game: UniqueGame, pi: InputDensity, corr: Correlation) -> float:
    """Winning mass sum(pi(x,y) p(a, b|x,y)) over winning tuples."""
    if pi.pi.shape != (game.nx, game.ny) or corr.p.shape != (game.nx, game.ny, game.k, game.k):
        raise ValidationError("shape mismatch between game, density and correlation")
    b = np.arange(game.k)
    total = 0.0
    for x in range(game.nx):
        for y in range(game.ny):
            total += pi.pi[x, y] * corr.p[x, y, game.perm[x, y, b], b].sum()
    return float(total)


def strategy_value(game: UniqueGame, pi: InputDensity, strat: DeterministicStrategy) -> float:
    return sum(
        pi.pi[x, y]
        for x in range(game.nx)
        for y in range(game.ny)
        if game.verify(x, y, strat.hA[x], strat.hB[y])
    )


def strategy_value_exact(game: UniqueGame, pi: InputDensity, strat: DeterministicStrategy):
    """Strategy value as a Fraction when the density is rational, else float."""
    if pi.exact is None:
        return strategy_value(game, pi, strat)
    return sum(
        (pi.exact[x][y]
         for x in range(game.nx)
         for y in range(game.ny)
         if game.verify(x, y, strat.hA[x], strat.hB[y])),
        start=Fraction(0),
    )


def perfect_ns_correlation(game: UniqueGame) -> Correlation:
    """The perfect nonsignalling correlation: 1/k on winning tuples."""
    p = np.zeros((game.nx, game.ny, game.k, game.k))
    b = np.arange(game.k)
    for x in range(game.nx):
        for y in range(game.ny):
            p[x, y, game.perm[x, y, b], b] = 1.0 / game.k
    return Correlation(p)


def symmetrize(game: GroupGame, corr: Correlation) -> Correlation:
    """Average p over simultaneous right translation of both answers.

    The result is invariant under (a, b) -> (a c, b c) and has the same
    expected value as the input for any density.
    """
    m = game.group.order
    if corr.p.shape != (game.nx, game.ny, m, m):
        raise ValidationError("correlation shape does not match the group game")
    t = game.group.table
    out = np.zeros_like(corr.p)
    for c in range(m):
        ac = t[:, c]  # a -> a*c
        out += corr.p[:, :, ac[:, None], ac[None, :]]
    return Correlation(out / m)


def make_chsh(n: int) -> tuple[GroupGame, InputDensity]:
    """X = Y = A = Z_n with rule a - b = x*y (ring product), uniform density."""
    if n < 2:
        raise ValidationError("chsh generalization needs n >= 2")
    group = group_from_name(f"Z{n}")
    idx = np.arange(n)
    f = (idx[:, None] * idx[None, :]) % n
    return GroupGame(group=group, nx=n, ny=n, f=f), uniform_density(n, n)


def make_commutator_game(group: FiniteGroup, allow_large: bool = False) -> tuple[GroupGame, InputDensity]:
    """f(x, y) = x y x^-1 y^-1 on X = Y = A = the group, uniform density."""
    m = group.order
    if m > 24 and not allow_large:
        raise ValidationError("commutator game guarded to order <= 24; pass allow_large to override")
    f = np.array([[commutator(group, x, y) for y in range(m)] for x in range(m)])
    return GroupGame(group=group, nx=m, ny=m, f=f), uniform_density(m, m)


def game_from_json(data: dict | str) -> UniqueGame | GroupGame:
    if isinstance(data, str):
        data = json.loads(data)
    kind = data.get("kind")
    if kind == "unique":
        for key in ("nx", "ny", "k", "perm"):
            if key not in data:
                raise ValidationError(f"unique game JSON is missing field '{key}'")
        return UniqueGame(nx=int(data["nx"]), ny=int(data["ny"]), k=int(data["k"]),
                          perm=np.array(data["perm"]))
    if kind == "group":
        for key in ("group", "f"):
            if key not in data:
                raise ValidationError(f"group game JSON is missing field '{key}'")
        grp = data["group"]
        group = group_from_name(grp) if isinstance(grp, str) else FiniteGroup.from_json(grp)
        f = np.array(data["f"])
        return GroupGame(group=group, nx=f.shape[0], ny=f.shape[1], f=f)
    raise ValidationError("game JSON field 'kind' must be 'unique' or 'group'")


def density_from_json(data: dict | str) -> InputDensity:
    if isinstance(data, str):
        data = json.loads(data)
    if "pi" not in data:
        raise ValidationError("density JSON is missing field 'pi'")
    rows = data["pi"]
    exact = None
    try:
        exact = tuple(tuple(_parse_rational(v) for v in row) for row in rows)
    except (ValueError, TypeError):
        exact = None
    pi = np.array([[float(Fraction(v) if isinstance(v, str) else v) for v in row] for row in rows])
    return InputDensity(pi=pi, exact=exact)


def _parse_rational(v) -> Fraction:
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, float):
        frac = Fraction(v).limit_denominator(10**9)
        if float(frac) == v:
            return frac
    raise ValueError(f"not an exact rational: {v!r}")
