"""Lower bounds on quantum values via explicit vector/unitary strategies and
local search; upper bounds on the synchronous commuting-operator value via
the cost-matrix eigenvalue bound; closed-form directed-cycle bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import ValidationError, eig_sym, polar_unitary
from .games import GroupGame, InputDensity, UniqueGame

XI = np.exp(2j * np.pi / 3)


# ---------------------------------------------------------------------------
# rank-one projective strategies (frames)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Frame:
    """Per question x, k vectors in C^d of which exactly d are an orthonormal
    basis and the rest are zero."""

    nx: int
    k: int
    d: int
    vectors: np.ndarray  # (nx, k, d) complex

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=complex)
        if v.shape != (self.nx, self.k, self.d):
            raise ValidationError("frame vectors must have shape (nx, k, d)")
        object.__setattr__(self, "vectors", v)
        v.flags.writeable = False

    def validate(self, tol: float = 1e-9) -> None:
        if not 1 <= self.d <= self.k:
            raise ValidationError("frame needs 1 <= d <= k")
        for x in range(self.nx):
            norms = np.linalg.norm(self.vectors[x], axis=1)
            nonzero = norms > tol
            if int(nonzero.sum()) != self.d:
                raise ValidationError(f"question {x} must have exactly d nonzero vectors")
            basis = self.vectors[x][nonzero]
            gram = basis.conj() @ basis.T
            if np.max(np.abs(gram - np.eye(self.d))) > tol:
                raise ValidationError(f"question {x} vectors are not orthonormal")

    def masks(self) -> np.ndarray:
        return np.linalg.norm(self.vectors, axis=2) > 1e-9

    def to_json(self) -> dict:
        return {"nx": self.nx, "k": self.k, "d": self.d,
                "vectors": [[[[float(c.real), float(c.imag)] for c in vec]
                             for vec in block] for block in self.vectors]}

    @staticmethod
    def from_json(data: dict) -> "Frame":
        vecs = np.array([[[complex(re, im) for re, im in vec] for vec in block]
                         for block in data["vectors"]])
        return Frame(nx=int(data["nx"]), k=int(data["k"]), d=int(data["d"]), vectors=vecs)


def frame_from_strategy(h, k: int) -> Frame:
    """The d = 1 frame answering deterministically by h."""
    nx = len(h)
    v = np.zeros((nx, k, 1), dtype=complex)
    for x, a in enumerate(h):
        v[x, int(a), 0] = 1.0
    return Frame(nx=nx, k=k, d=1, vectors=v)


def q1_sync_value(frame: Frame, game: UniqueGame, pi: InputDensity) -> float:
    """(1/d) sum over winning tuples of pi(x,y) |<v_{x,a}|v_{y,b}>|^2.

    A certified lower bound on the synchronous rank-one quantum value for
    any valid frame.
    """
    if game.nx != game.ny:
        raise ValidationError("square game required")
    if frame.nx != game.nx or frame.k != game.k:
        raise ValidationError("frame does not match the game")
    frame.validate()
    total = 0.0
    for x in range(game.nx):
        for y in range(game.ny):
            w = pi.pi[x, y]
            if w == 0:
                continue
            for b in range(game.k):
                a = int(game.perm[x, y, b])
                ip = np.vdot(frame.vectors[x, a], frame.vectors[y, b])
                total += w * float(np.abs(ip) ** 2)
    return total / frame.d


def _rodrigues(angle: float) -> np.ndarray:
    """Rotation by angle about the axis (1,1,1)/sqrt(3)."""
    u = np.ones(3) / math.sqrt(3.0)
    k = np.array([[0, -u[2], u[1]], [u[2], 0, -u[0]], [-u[1], u[0], 0]])
    return math.cos(angle) * np.eye(3) + math.sin(angle) * k \
        + (1 - math.cos(angle)) * np.outer(u, u)


def cycle_rotation_matrix(k: int, power: int = 1) -> np.ndarray:
    """The power-th step of the rotation by 2*pi/(3k) about (1,1,1)."""
    return _rodrigues(power * 2.0 * math.pi / (3.0 * k))


def cycle_rotation_frame(k: int) -> Frame:
    """Real d = 3 frame for the directed k-cycle game.

    v_{x,a} is e_1 rotated by (k*a - (k - eps)*x) steps of 2*pi/(3k) about
    (1,1,1), with eps = k mod 3 mapped to {0, 1, -1}.  This choice is
    well defined on Z_k x Z_3 and gives every winning pair the same inner
    product (1 + 2 cos(2*pi/3k))/3; when 3 | k it degenerates to a perfect
    labelling by basis vectors.
    """
    if k < 3:
        raise ValidationError("cycle frame needs k >= 3")
    eps = {0: 0, 1: 1, 2: -1}[k % 3]
    theta = 2.0 * math.pi / (3.0 * k)
    e1 = np.array([1.0, 0.0, 0.0])
    vecs = np.zeros((k, 3, 3), dtype=complex)
    for x in range(k):
        for a in range(3):
            m = (k * a - (k - eps) * x) % (3 * k)
            vecs[x, a] = _rodrigues(m * theta) @ e1
    return Frame(nx=k, k=3, d=3, vectors=vecs)


def cycle_q1_bipartite_value(k: int) -> float:
    """(1 + 2 cos^2(2*pi/3k))/3, re-verified against the explicit entangled
    state over the rotation frame."""
    if k < 4 or k % 3 == 0:
        raise ValidationError("bipartite cycle bound needs k >= 4 with 3 not dividing k")
    c = math.cos(2.0 * math.pi / (3.0 * k))
    closed = (1.0 + 2.0 * c * c) / 3.0

    norm = math.sqrt(1.0 + 2.0 * c * c)
    acoef = c / norm
    bcoef = (1.0 - c) / (3.0 * norm)
    state = acoef * np.eye(3) + bcoef * np.ones((3, 3))  # eta as a 3x3 table
    frame = cycle_rotation_frame(k)
    v = frame.vectors.real
    total = 0.0
    for x in range(k):
        for a in range(3):
            for (vx, vy) in (((x, a), ((x + 1) % k, (a + 1) % 3)),
                             (((x + 1) % k, (a + 1) % 3), (x, a))):
                amp = v[vx] @ state @ v[vy]
                total += np.abs(amp) ** 2 / (2.0 * k)
    if abs(total - closed) > 1e-9:
        raise ValidationError("explicit state does not reproduce the closed form")
    return closed


# ---------------------------------------------------------------------------
# alternating search over frames
# ---------------------------------------------------------------------------

def _win_partners(game: UniqueGame, pi: InputDensity):
    """partners[x][a] = list of (y, b, weight) quadratic-form terms."""
    nx, k = game.nx, game.k
    partners = [[[] for _ in range(k)] for _ in range(nx)]
    for x in range(nx):
        for y in range(nx):
            if x == y:
                continue
            for b in range(k):
                a = int(game.perm[x, y, b])
                if pi.pi[x, y]:
                    partners[x][a].append((y, b, pi.pi[x, y]))
                if pi.pi[y, x]:
                    partners[y][b].append((x, a, pi.pi[y, x]))
    return partners


def _random_unitary(rng, d: int) -> np.ndarray:
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _fast_polar(m: np.ndarray) -> np.ndarray:
    return polar_unitary(m)


def _ascend_frame(vectors, masks, game, pi, frame_d, sweeps=200, ftol=1e-12):
    """Monotone block ascent: each question's basis is refreshed through the
    polar factor of (anchor + gradient), which never decreases the value."""
    partners = _win_partners(game, pi)
    nx, k = game.nx, game.k

    def objective():
        total = 0.0
        for x in range(nx):
            for y in range(nx):
                w = pi.pi[x, y]
                if w == 0:
                    continue
                for b in range(k):
                    a = int(game.perm[x, y, b])
                    total += w * np.abs(np.vdot(vectors[x, a], vectors[y, b])) ** 2
        return total / frame_d

    value = objective()
    for _ in range(sweeps):
        for x in range(nx):
            slots = np.nonzero(masks[x])[0]
            grad = np.zeros((frame_d, len(slots)), dtype=complex)
            for col, a in enumerate(slots):
                m = np.zeros((frame_d, frame_d), dtype=complex)
                for (y, b, w) in partners[x][a]:
                    vb = vectors[y, b]
                    m += w * np.outer(vb, vb.conj())
                grad[:, col] = m @ vectors[x, a]
            anchor = vectors[x, slots, :].T  # columns are current basis vectors
            gnorm = np.linalg.norm(grad)
            if gnorm < 1e-15:
                continue
            try:
                unit = _fast_polar(anchor * (0.01 * gnorm) + grad)
            except (np.linalg.LinAlgError, ValidationError):
                continue
            for col, a in enumerate(slots):
                vectors[x, a] = unit[:, col]
        new_value = objective()
        if new_value < value + ftol:
            value = new_value
            break
        value = new_value
    return value


def q1_search(game: UniqueGame, pi: InputDensity, d: int | None = None,
              restarts: int = 20, seed: int = 0, warm_starts=(), threads: int = 1):
    """Search for a strong frame by alternating ascent with random restarts.

    Returns (best value, best Frame); a lower bound only.  d = None tries
    every dimension 1..k.  warm_starts may carry deterministic strategies
    (as output tuples) seeded as d = 1 frames.
    """
    if game.nx != game.ny:
        raise ValidationError("square game required")
    if d is not None and not 1 <= d <= game.k:
        raise ValidationError("need 1 <= d <= k")
    nx, k = game.nx, game.k
    dims = [d] if d is not None else list(range(1, k + 1))
    master = np.random.default_rng(seed)
    jobs = []
    for dim in dims:
        for r in range(restarts):
            jobs.append((dim, None, int(master.integers(0, 2**63 - 1))))
    for h in warm_starts:
        jobs.append((1, tuple(int(a) for a in h), 0))

    def run(job):
        dim, warm, job_seed = job
        rng = np.random.default_rng(job_seed)
        vectors = np.zeros((nx, k, dim), dtype=complex)
        masks = np.zeros((nx, k), dtype=bool)
        if warm is not None:
            for x, a in enumerate(warm):
                masks[x, a] = True
                vectors[x, a, 0] = 1.0
        else:
            for x in range(nx):
                slots = rng.choice(k, size=dim, replace=False)
                masks[x, np.sort(slots)] = True
                unit = _random_unitary(rng, dim)
                for col, a in enumerate(np.sort(slots)):
                    vectors[x, a] = unit[:, col]
        value = _ascend_frame(vectors, masks, game, pi, dim)
        return value, Frame(nx=nx, k=k, d=dim, vectors=vectors)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(job) for job in jobs]
    best_value, best_frame = results[0]
    for value, frame in results[1:]:
        if value > best_value + 1e-15:
            best_value, best_frame = value, frame
    return best_value, best_frame


def q1_bipartite_search(game: UniqueGame, pi: InputDensity, d: int | None = None,
                        restarts: int = 20, seed: int = 0, sweeps: int = 200):
    """Bipartite rank-one search: frames on both sides plus a shared state.

    Alternates exact state updates (top eigenvector) with monotone polar
    refreshes of each side's bases.  Returns (best value, (alice frame,
    bob frame, state)).  A lower bound only.
    """
    nx, ny, k = game.nx, game.ny, game.k
    dims = [d] if d is not None else list(range(1, k + 1))
    master = np.random.default_rng(seed)
    best = (-1.0, None)
    for dim in dims:
        for _ in range(restarts):
            rng = np.random.default_rng(int(master.integers(0, 2**63 - 1)))
            va = np.zeros((nx, k, dim), dtype=complex)
            wb = np.zeros((ny, k, dim), dtype=complex)
            ma = np.zeros((nx, k), dtype=bool)
            mb = np.zeros((ny, k), dtype=bool)
            for vecs, mask, count in ((va, ma, nx), (wb, mb, ny)):
                for x in range(count):
                    slots = np.sort(rng.choice(k, size=dim, replace=False))
                    mask[x, slots] = True
                    unit = _random_unitary(rng, dim)
                    for col, a in enumerate(slots):
                        vecs[x, a] = unit[:, col]
            z = rng.normal(size=dim * dim) + 1j * rng.normal(size=dim * dim)
            eta = z / np.linalg.norm(z)

            def value_of(eta_mat):
                total = 0.0
                for x in range(nx):
                    for y in range(ny):
                        w = pi.pi[x, y]
                        if w == 0:
                            continue
                        for b in range(k):
                            a = int(game.perm[x, y, b])
                            amp = va[x, a] @ eta_mat.conj() @ wb[y, b]
                            total += w * float(np.abs(amp) ** 2)
                return total

            value = -1.0
            for _ in range(sweeps):
                # exact state step: top eigenvector of the winning-mass form
                mat = np.zeros((dim * dim, dim * dim), dtype=complex)
                for x in range(nx):
                    for y in range(ny):
                        w = pi.pi[x, y]
                        if w == 0:
                            continue
                        for b in range(k):
                            a = int(game.perm[x, y, b])
                            prod = np.kron(va[x, a], wb[y, b])
                            mat += w * np.outer(prod, prod.conj())
                _, evecs = np.linalg.eigh(mat)
                eta = evecs[:, -1]
                eta_mat = eta.reshape(dim, dim)
                hbar = eta_mat.conj()
                # frame steps: amplitude is v^T hbar w, so each side sees a
                # PSD quadratic form built from the other side's vectors
                for side in ("A", "B"):
                    vecs, mask = (va, ma) if side == "A" else (wb, mb)
                    count = nx if side == "A" else ny
                    for q in range(count):
                        slots = np.nonzero(mask[q])[0]
                        grad = np.zeros((dim, len(slots)), dtype=complex)
                        for col, out in enumerate(slots):
                            m = np.zeros((dim, dim), dtype=complex)
                            if side == "A":
                                for y in range(ny):
                                    w = pi.pi[q, y]
                                    if w == 0:
                                        continue
                                    for b in range(k):
                                        if int(game.perm[q, y, b]) == out:
                                            u = hbar @ wb[y, b]
                                            m += w * np.outer(u.conj(), u)
                            else:
                                for x in range(nx):
                                    w = pi.pi[x, q]
                                    if w == 0:
                                        continue
                                    a = int(game.perm[x, q, out])
                                    u = hbar.T @ va[x, a]
                                    m += w * np.outer(u.conj(), u)
                            grad[:, col] = m @ vecs[q, out]
                        gnorm = np.linalg.norm(grad)
                        if gnorm < 1e-15:
                            continue
                        anchor = vecs[q, slots, :].T
                        try:
                            unit = _fast_polar(anchor * (0.01 * gnorm) + grad)
                        except (np.linalg.LinAlgError, ValidationError):
                            continue
                        for col, out in enumerate(slots):
                            vecs[q, out] = unit[:, col]
                new_value = value_of(eta_mat)
                if new_value < value + 1e-12:
                    value = new_value
                    break
                value = new_value
            if value > best[0] + 1e-15:
                best = (value, (Frame(nx=nx, k=k, d=dim, vectors=va),
                                Frame(nx=ny, k=k, d=dim, vectors=wb), eta))
    return best


# ---------------------------------------------------------------------------
# order-3 unitary strategies
# ---------------------------------------------------------------------------

def labelling_unitaries(labels, d: int = 1) -> list[np.ndarray]:
    """Scalar order-3 unitaries xi^{w(x)} I realizing a deterministic
    labelling; their trace formula value equals the labelling's value."""
    return [np.eye(d, dtype=complex) * XI ** int(w) for w in labels]


def unitary_value_z3(game: GroupGame, pi: InputDensity, unitaries, tol: float = 1e-8) -> float:
    """Trace-formula value of a family of order-3 unitaries.

    1/3 + (1/3) sum_{x,y} pi(x,y) 2 Re(xi^{f(x,y)} tr(U_x* U_y)/d); a lower
    bound on the synchronous commuting-operator value of the game.
    """
    if game.group.order != 3 or not np.array_equal(
            game.group.table, (np.arange(3)[:, None] + np.arange(3)[None, :]) % 3):
        raise ValidationError("game must be based on the cyclic group of order 3")
    mats = [np.asarray(u, dtype=complex) for u in unitaries]
    if len(mats) != game.nx:
        raise ValidationError("one unitary per question required")
    d = mats[0].shape[0]
    for u in mats:
        if u.shape != (d, d):
            raise ValidationError("unitaries must share one square shape")
        if np.max(np.abs(u.conj().T @ u - np.eye(d))) > tol:
            raise ValidationError("matrix is not unitary")
        if np.max(np.abs(np.linalg.matrix_power(u, 3) - np.eye(d))) > tol:
            raise ValidationError("unitary does not have order 3")
    total = 0.0
    for x in range(game.nx):
        for y in range(game.ny):
            w = pi.pi[x, y]
            if w == 0:
                continue
            tr = np.trace(mats[x].conj().T @ mats[y]) / d
            total += w * 2.0 * float(np.real(XI ** int(game.f[x, y]) * tr))
    return 1.0 / 3.0 + total / 3.0


# ---------------------------------------------------------------------------
# cost matrix machinery
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CostMatrix:
    dim: int
    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float)
        object.__setattr__(self, "entries", e)
        e.flags.writeable = False


@dataclass(frozen=True)
class CostFreeBasis:
    dim: int
    elements: np.ndarray  # (count, dim, dim)


def cost_matrix(game: UniqueGame, pi: InputDensity) -> CostMatrix:
    """c_{(x,a),(y,b)} = (pi(x,y) V(x,y,a,b) + pi(y,x) V(y,x,b,a)) / 2 with
    (x, a) ordered lexicographically."""
    if game.nx != game.ny:
        raise ValidationError("square game required")
    n, k = game.nx, game.k
    dim = n * k
    c = np.zeros((dim, dim))
    v = game.win_table()
    for x in range(n):
        for y in range(n):
            for a in range(k):
                for b in range(k):
                    val = 0.5 * (pi.pi[x, y] * v[x, y, a, b] + pi.pi[y, x] * v[y, x, b, a])
                    c[x * k + a, y * k + b] = val
    return CostMatrix(dim=dim, entries=c)


def cost_free_basis(game: UniqueGame) -> CostFreeBasis:
    """Symmetrized same-question off-diagonal units plus consecutive diagonal
    differences; every synchronous-strategy indicator annihilates each one."""
    if game.nx != game.ny:
        raise ValidationError("square game required")
    n, k = game.nx, game.k
    dim = n * k
    mats = []
    for x in range(n):
        for a in range(k):
            for b in range(a + 1, k):
                m = np.zeros((dim, dim))
                m[x * k + a, x * k + b] = 1.0
                m[x * k + b, x * k + a] = 1.0
                mats.append(m)
    for x in range(n - 1):
        m = np.zeros((dim, dim))
        for a in range(k):
            m[x * k + a, x * k + a] = 1.0
            m[(x + 1) * k + a, (x + 1) * k + a] = -1.0
        mats.append(m)
    return CostFreeBasis(dim=dim, elements=np.array(mats))


def qc_sync_upper_bound(game: UniqueGame, pi: InputDensity, iters: int = 2000,
                        step: float = 0.02, z_init: np.ndarray | None = None):
    """|X| * lambda_max(C + Z) minimized over the cost-free subspace by
    subgradient descent with diminishing steps; any iterate is a valid upper
    bound on the synchronous commuting-operator value, so the best one is
    returned together with its Z."""
    cm = cost_matrix(game, pi)
    basis = cost_free_basis(game)
    n = game.nx
    z = np.zeros((cm.dim, cm.dim)) if z_init is None else np.asarray(z_init, dtype=float)
    if z.shape != (cm.dim, cm.dim):
        raise ValidationError("Z has the wrong shape")
    coeffs = np.array([np.tensordot(b, z) / np.tensordot(b, b) for b in basis.elements])
    best_bound = np.inf
    best_z = z.copy()
    for t in range(iters + 1):
        zmat = np.tensordot(coeffs, basis.elements, axes=1) if t > 0 else z
        evals, evecs = np.linalg.eigh(cm.entries + zmat)
        bound = n * float(evals[-1])
        if bound < best_bound:
            best_bound = bound
            best_z = zmat.copy()
        if t == iters:
            break
        top = evecs[:, -1]
        grad = np.einsum("bij,i,j->b", basis.elements, top, top)
        gn = np.linalg.norm(grad)
        if gn < 1e-15:
            break
        coeffs = coeffs - (step / math.sqrt(t + 1.0)) * grad / gn
    return best_bound, best_z


def cycle_qc_closed_form(k: int):
    """Optimal certificate matrix for the directed k-cycle.

    Builds Re(t I + alpha I_k (x) S_3 - S_k (x) S_3) at alpha = 2(1-c)/3,
    t = (1+2c)/3, c = cos(2 pi/3k); verifies its spectrum t + alpha
    cos(2 pi j/3) - cos(2 pi j/3k) is nonnegative with minimum zero.
    Returns (t, alpha, eigenvalue list over j).
    """
    if k < 4 or k % 3 == 0:
        raise ValidationError("closed form needs k >= 4 with 3 not dividing k")
    theta = 2.0 * math.pi / (3.0 * k)
    c = math.cos(theta)
    t = (1.0 + 2.0 * c) / 3.0
    alpha = 2.0 * (1.0 - c) / 3.0
    s3 = np.roll(np.eye(3), 1, axis=0)
    sk = np.roll(np.eye(k), 1, axis=0)
    w = np.kron(sk, s3)
    x = t * np.eye(3 * k) + alpha * np.kron(np.eye(k), (s3 + s3.T) / 2.0) \
        - (w + w.T) / 2.0
    lams = np.array([t + alpha * math.cos(2.0 * math.pi * j / 3.0) - math.cos(j * theta)
                     for j in range(3 * k)])
    if lams.min() < -1e-10 or abs(lams.min()) > 1e-10:
        raise ValidationError("closed-form spectrum check failed")
    w, _ = eig_sym(x)
    if np.max(np.abs(np.sort(lams) - w)) > 1e-9:
        raise ValidationError("matrix spectrum does not match the closed form")
    return t, alpha, lams


def chsh3_certificate_z() -> np.ndarray:
    """The explicit cost-free matrix certifying the 5/9 bound for the
    order-3 multiplication game."""
    b = np.array([[-2.0, 3.0, 3.0], [3.0, -2.0, 3.0], [3.0, 3.0, -2.0]])
    z = np.zeros((9, 9))
    z[:3, :3] = 4.0 * np.eye(3)
    z[3:6, 3:6] = b
    z[6:9, 6:9] = b
    return -z / 27.0
