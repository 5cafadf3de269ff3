"""Finite group arithmetic and dense symmetric/Hermitian eigen-routines.

Groups are multiplication tables over element indices 0..m-1.  The
eigensolver is a cyclic Jacobi iteration on real symmetric matrices;
Hermitian input is handled through the standard 2n x 2n real embedding.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT


class ValidationError(ValueError):
    """Input violates a documented precondition."""


class ConvergenceError(RuntimeError):
    """Iteration cap reached; carries the residual at the last iterate."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


# ---------------------------------------------------------------------------
# finite groups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteGroup:
    """A finite group as a Cayley table over indices 0..order-1."""

    order: int
    table: np.ndarray  # table[g, h] = g * h
    name: str = "group"
    identity: int = field(init=False, default=0)
    inverse: np.ndarray = field(init=False, default=None)

    def __post_init__(self):
        table = np.asarray(self.table, dtype=np.int64)
        if table.shape != (self.order, self.order):
            raise ValidationError("group table must be order x order")
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "identity", self._find_identity())
        object.__setattr__(self, "inverse", self._find_inverses())
        self.table.flags.writeable = False
        self.inverse.flags.writeable = False

    def _find_identity(self) -> int:
        rng = np.arange(self.order)
        for e in range(self.order):
            if np.array_equal(self.table[e], rng) and np.array_equal(self.table[:, e], rng):
                return e
        raise ValidationError("table has no identity element")

    def _find_inverses(self) -> np.ndarray:
        inv = np.full(self.order, -1, dtype=np.int64)
        for g in range(self.order):
            hits = np.nonzero(self.table[g] == self.identity)[0]
            if len(hits) != 1:
                raise ValidationError(f"element {g} has no unique inverse")
            inv[g] = hits[0]
        return inv

    def mul(self, g: int, h: int) -> int:
        return int(self.table[g, h])

    def inv(self, g: int) -> int:
        return int(self.inverse[g])

    def is_latin_square(self) -> bool:
        want = np.arange(self.order)
        return all(
            np.array_equal(np.sort(self.table[i]), want)
            and np.array_equal(np.sort(self.table[:, i]), want)
            for i in range(self.order)
        )

    def is_associative(self, samples: int = 100_000) -> bool:
        """Exhaustive associativity check for order <= 24, sampled above."""
        t = self.table
        if self.order <= 24:
            return bool(np.array_equal(t[t, :], t[:, t]))
        rng = np.random.default_rng(0)
        g, h, k = rng.integers(0, self.order, size=(3, samples))
        return bool(np.array_equal(t[t[g, h], k], t[g, t[h, k]]))

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def validate(self) -> None:
        if not self.is_latin_square():
            raise ValidationError("table is not a Latin square")
        if not self.is_associative():
            raise ValidationError("table is not associative")
        if not np.all(self.table[np.arange(self.order), self.inverse] == self.identity):
            raise ValidationError("inverses do not multiply to the identity")

    def to_json(self) -> dict:
        return {"order": self.order, "table": self.table.tolist()}

    @staticmethod
    def from_json(data: dict | str) -> "FiniteGroup":
        if isinstance(data, str):
            data = json.loads(data)
        if "order" not in data or "table" not in data:
            raise ValidationError("group JSON needs 'order' and 'table'")
        g = FiniteGroup(order=int(data["order"]), table=np.array(data["table"]))
        g.validate()
        return g


def cyclic_group(n: int) -> FiniteGroup:
    """(Z_n, +) with identity 0."""
    if n < 1:
        raise ValidationError("cyclic group order must be >= 1")
    idx = np.arange(n)
    return FiniteGroup(order=n, table=(idx[:, None] + idx[None, :]) % n, name=f"Z{n}")


def symmetric_group(n: int) -> FiniteGroup:
    """All permutations of n points, in lexicographic one-line order.

    The product g*h is composition g after h: (g*h)(i) = g(h(i)).
    Orders above 5040 (n = 7) are out of scope, so n <= 7.
    """
    if not 1 <= n <= 7:
        raise ValidationError("symmetric group supported for 1 <= n <= 7")
    elems = sorted(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(elems)}
    m = len(elems)
    table = np.zeros((m, m), dtype=np.int64)
    for i, g in enumerate(elems):
        for j, h in enumerate(elems):
            table[i, j] = index[tuple(g[h[p]] for p in range(n))]
    return FiniteGroup(order=m, table=table, name=f"S{n}")


def group_from_name(name: str) -> FiniteGroup:
    """Resolve built-in names "Z<n>" and "S<n>"."""
    if name.startswith("Z") and name[1:].isdigit():
        return cyclic_group(int(name[1:]))
    if name.startswith("S") and name[1:].isdigit():
        return symmetric_group(int(name[1:]))
    raise ValidationError(f"unknown group name {name!r}")


def commutator(group: FiniteGroup, g: int, h: int) -> int:
    """g * h * g^-1 * h^-1."""
    t = group.table
    return int(t[t[t[g, h], group.inverse[g]], group.inverse[h]])


# ---------------------------------------------------------------------------
# dense spectral routines
# ---------------------------------------------------------------------------

def _jacobi_real(a: np.ndarray, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi on a real symmetric matrix. Returns (ascending w, Q)."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    q = np.eye(n)
    if n == 1:
        return a[0].copy(), q
    scale = max(1.0, float(np.max(np.abs(a))))
    target = 1e-14 * scale * n
    off = np.inf
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off <= target:
            break
        for p in range(n - 1):
            for r in range(p + 1, n):
                apr = a[p, r]
                if abs(apr) <= 1e-16 * scale:
                    continue
                theta = (a[r, r] - a[p, p]) / (2.0 * apr)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rp = a[p, :].copy()
                rr = a[r, :].copy()
                a[p, :] = c * rp - s * rr
                a[r, :] = s * rp + c * rr
                cp = a[:, p].copy()
                cr = a[:, r].copy()
                a[:, p] = c * cp - s * cr
                a[:, r] = s * cp + c * cr
                qp = q[:, p].copy()
                qr = q[:, r].copy()
                q[:, p] = c * qp - s * qr
                q[:, r] = s * qp + c * qr
    else:
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off > target:
            raise ConvergenceError("Jacobi sweep cap reached", float(off))
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], q[:, order]


def _complexify(w: np.ndarray, qreal: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Pick n complex eigenvectors out of the doubled real-embedding spectrum."""
    cols = []
    vals = []
    for idx in range(2 * n):
        v = qreal[:n, idx] + 1j * qreal[n:, idx]
        # remove components along already-selected vectors (duplicated pairs
        # land on the same eigenvalue, so only nearby selections matter)
        for u in cols:
            v = v - u * (np.conj(u) @ v)
        norm = np.linalg.norm(v)
        if norm > 0.5:
            cols.append(v / norm)
            vals.append(w[idx])
            if len(cols) == n:
                break
    q = np.array(cols).T
    # second orthogonalization pass for numerical tightness
    for j in range(n):
        for i in range(j):
            q[:, j] -= q[:, i] * (np.conj(q[:, i]) @ q[:, j])
        q[:, j] /= np.linalg.norm(q[:, j])
    return np.array(vals), q


def eig_sym(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric/Hermitian matrix.

    Returns eigenvalues ascending and a matrix whose columns are the
    matching orthonormal eigenvectors.  Complex Hermitian matrices go
    through the 2n x 2n real embedding [[A, -B], [B, A]].
    """
    m = np.asarray(m)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValidationError("eig_sym needs a square matrix")
    if n > 200:
        raise ValidationError("eig_sym supports dimension <= 200")
    scale = max(1.0, float(np.max(np.abs(m)))) if n else 1.0
    if np.iscomplexobj(m):
        if np.max(np.abs(m - m.conj().T)) > 1e-12 * scale:
            raise ValidationError("matrix is not Hermitian")
        a = np.ascontiguousarray(m.real)
        b = np.ascontiguousarray(m.imag)
        embed = np.block([[a, -b], [b, a]])
        w2, q2 = _jacobi_real(embed)
        return _complexify(w2, q2, n)
    if np.max(np.abs(m - m.T)) > 1e-12 * scale:
        raise ValidationError("matrix is not symmetric")
    return _jacobi_real(m)


def psd_project(m: np.ndarray) -> np.ndarray:
    """Nearest (Frobenius) positive semidefinite matrix: clamp the spectrum."""
    w, q = eig_sym(m)
    r = (q * np.maximum(w, 0.0)) @ q.conj().T
    return (r + r.conj().T) / 2.0


def polar_unitary(m: np.ndarray) -> np.ndarray:
    """Unitary factor U of the polar decomposition M = U P.

    Requires the smallest singular value to be at least 1e-12.
    """
    m = np.asarray(m, dtype=complex)
    u, s, vh = np.linalg.svd(m)
    if s[-1] < 1e-12:
        raise ValidationError(f"matrix is numerically singular (sigma_min {s[-1]:.3e})")
    return u @ vh


def check_reconstruction(m: np.ndarray, w: np.ndarray, q: np.ndarray) -> float:
    """Max-norm residual of M - Q diag(w) Q*."""
    return float(np.max(np.abs(m - (q * w) @ q.conj().T)))


STRUCTURAL_TOL = DEFAULT.structural
