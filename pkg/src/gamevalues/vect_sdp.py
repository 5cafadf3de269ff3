"""Vector-relaxation value of a game as a semidefinite program over Gram
matrices, plus the rounding procedure from near-perfect solutions to
deterministic strategies.

The program variable is the Gram matrix of the family {eta} u {v_{x,a}}
(bipartite mode also carries {w_{y,b}}).  Orthogonality within a question
block and the resolution sum_a v_{x,a} = eta are linear constraints on Gram
entries; the sum constraint is rendered linearly as
sum_a G[(x,a), j] = G[eta, j] for every column j, which is equivalent to the
vector identity because the family spans the relevant subspace.

The solver is first-order operator splitting (consensus ADMM): an affine
least-squares step carrying the objective, a spectral clamp onto the PSD
cone, an entrywise clamp on the nonnegativity mask, and dual updates, with
over-relaxation 1.6 and dual step 1.0.  Projections inside the iteration
use numpy's eigh; reported solutions always carry feasibility residuals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import ValidationError, eig_sym
from .games import DeterministicStrategy, InputDensity, UniqueGame, expected_value

MODES = ("bipartite", "synchronous")


@dataclass(frozen=True)
class VectProgram:
    mode: str
    game: UniqueGame
    pi: InputDensity
    size: int
    objective: np.ndarray      # (size, size) symmetric, >= 0 on winning entries
    constraints: np.ndarray    # (m, d) rows over scaled upper-triangle coords
    rhs: np.ndarray            # (m,)
    labels: tuple              # one descriptor string per constraint row
    mask: np.ndarray           # (size, size) bool, entries kept nonnegative
    projector: np.ndarray      # (d, m) pseudo-inverse factor for the affine step
    tri: tuple                 # cached (rows, cols) of the upper triangle
    tri_scale: np.ndarray      # sqrt(2) off the diagonal, 1 on it

    def alice_index(self, x: int, a: int) -> int:
        return 1 + x * self.game.k + a

    def bob_index(self, y: int, b: int) -> int:
        base = 1 + self.game.nx * self.game.k if self.mode == "bipartite" else 1
        return base + y * self.game.k + b

    # -- scaled upper-triangle vectorization (isometric for Frobenius) --

    def svec(self, mat: np.ndarray) -> np.ndarray:
        return mat[self.tri] * self.tri_scale

    def smat(self, vec: np.ndarray) -> np.ndarray:
        out = np.zeros((self.size, self.size))
        out[self.tri] = vec / self.tri_scale
        return out + np.triu(out, 1).T

    def project_affine(self, mat: np.ndarray) -> np.ndarray:
        v = self.svec(mat)
        v = v - self.projector @ (self.constraints @ v - self.rhs)
        return self.smat(v)

    def value_of(self, gram: np.ndarray) -> float:
        return float(np.tensordot(self.objective, gram))


@dataclass(frozen=True)
class GramSolution:
    program: VectProgram
    gram: np.ndarray
    value: float
    residuals: dict
    status: str
    iterations: int = 0

    def to_json(self, emit_gram: bool = False) -> dict:
        out = {"value": self.value, "residuals": dict(self.residuals),
               "status": self.status, "iterations": self.iterations,
               "mode": self.program.mode}
        if emit_gram:
            out["gram"] = self.gram.tolist()
        return out


def build_program(game: UniqueGame, pi: InputDensity, mode: str) -> VectProgram:
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}")
    if mode == "synchronous" and game.nx != game.ny:
        raise ValidationError("synchronous mode needs a square game")
    if pi.pi.shape != (game.nx, game.ny):
        raise ValidationError("density shape does not match the game")
    nx, ny, k = game.nx, game.ny, game.k
    size = 1 + (nx + ny) * k if mode == "bipartite" else 1 + nx * k
    if size > 200:
        raise ValidationError("program size guarded to 200")

    def aidx(x, a):
        return 1 + x * k + a

    def bidx(y, b):
        return (1 + nx * k if mode == "bipartite" else 1) + y * k + b

    objective = np.zeros((size, size))
    for x in range(nx):
        for y in range(ny):
            w = pi.pi[x, y]
            if w == 0:
                continue
            for b in range(k):
                i, j = aidx(x, int(game.perm[x, y, b])), bidx(y, b)
                if i == j:
                    objective[i, i] += w
                else:
                    objective[i, j] += w / 2.0
                    objective[j, i] += w / 2.0

    mask = np.zeros((size, size), dtype=bool)
    if mode == "bipartite":
        for x in range(nx):
            for y in range(ny):
                for a in range(k):
                    for b in range(k):
                        mask[aidx(x, a), bidx(y, b)] = True
                        mask[bidx(y, b), aidx(x, a)] = True
    else:
        for x in range(nx):
            for y in range(ny):
                if x == y:
                    continue
                for a in range(k):
                    for b in range(k):
                        mask[aidx(x, a), aidx(y, b)] = True

    # affine rows over svec coordinates
    iu = np.triu_indices(size)
    pos = {(int(i), int(j)): t for t, (i, j) in enumerate(zip(*iu))}
    scale = np.where(iu[0] == iu[1], 1.0, math.sqrt(2.0))
    d = len(iu[0])

    rows, rhs, labels = [], [], []

    def add_row(entries: dict, b: float, label: str):
        row = np.zeros(d)
        for (i, j), coeff in entries.items():
            t = pos[(min(i, j), max(i, j))]
            row[t] += coeff / scale[t]
        rows.append(row)
        rhs.append(b)
        labels.append(label)

    add_row({(0, 0): 1.0}, 1.0, "norm")
    blocks = [("A", nx, aidx)]
    if mode == "bipartite":
        blocks.append(("B", ny, bidx))
    for side, count, idx in blocks:
        for x in range(count):
            for a in range(k):
                for a2 in range(a + 1, k):
                    add_row({(idx(x, a), idx(x, a2)): 1.0}, 0.0,
                            f"orthogonality:{side}:{x}:{a}:{a2}")
    for side, count, idx in blocks:
        for x in range(count):
            for j in range(size):
                entries: dict = {}
                for a in range(k):
                    key = (min(idx(x, a), j), max(idx(x, a), j))
                    entries[key] = entries.get(key, 0.0) + 1.0
                key = (0, j)
                entries[key] = entries.get(key, 0.0) - 1.0
                add_row(entries, 0.0, f"sum:{side}:{x}:{j}")

    constraints = np.array(rows)
    rhs = np.array(rhs)
    gram_c = constraints @ constraints.T
    projector = constraints.T @ np.linalg.pinv(gram_c)
    return VectProgram(mode=mode, game=game, pi=pi, size=size,
                       objective=objective, constraints=constraints, rhs=rhs,
                       labels=tuple(labels), mask=mask, projector=projector,
                       tri=iu, tri_scale=scale)


def _clamp_psd(mat: np.ndarray) -> np.ndarray:
    w, q = np.linalg.eigh((mat + mat.T) / 2.0)
    r = (q * np.maximum(w, 0.0)) @ q.T
    return (r + r.T) / 2.0


def check_gram(prog: VectProgram, gram: np.ndarray) -> dict:
    """Feasibility residuals of a Gram matrix against the program."""
    v = prog.svec(gram)
    viol = prog.constraints @ v - prog.rhs
    detail = {"norm": 0.0, "orthogonality": 0.0, "sums": 0.0}
    for err, label in zip(np.abs(viol), prog.labels):
        key = label.split(":")[0]
        key = {"norm": "norm", "orthogonality": "orthogonality", "sum": "sums"}[key]
        detail[key] = max(detail[key], float(err))
    evals = np.linalg.eigvalsh((gram + gram.T) / 2.0)
    cone = float(max(0.0, -evals[0]))
    nonneg = float(max(0.0, -gram[prog.mask].min())) if prog.mask.any() else 0.0
    return {"affine": float(np.max(np.abs(viol))), "cone": cone, "nonneg": nonneg,
            **{f"affine_{k}": v for k, v in detail.items()}}


def solve_vect(prog: VectProgram, tol: float = 1e-7, max_iters: int = 50_000,
               seed: int = 0, over_relax: float = 1.6,
               dual_step: float = 1.0) -> GramSolution:
    """Maximize the winning mass over the program's feasible Gram matrices.

    Terminates when relative primal and dual residuals drop below tol, or at
    the iteration cap with the best iterate flagged "unconverged".
    """
    if prog.size > 200:
        raise ValidationError("program size guarded to 200")
    del seed  # iteration is deterministic; kept for interface stability
    n = prog.size
    rho = dual_step
    y = np.zeros((n, n))
    w = np.zeros((n, n))
    u = np.zeros((n, n))
    vdual = np.zeros((n, n))
    cscale = prog.objective / (2.0 * rho)
    best = None
    best_score = np.inf
    status = "unconverged"
    it = 0
    for it in range(1, max_iters + 1):
        x = prog.project_affine((y - u + w - vdual) / 2.0 + cscale)
        rx_y = over_relax * x + (1.0 - over_relax) * y
        rx_w = over_relax * x + (1.0 - over_relax) * w
        y_new = _clamp_psd(rx_y + u)
        w_new = rx_w + vdual
        np.maximum(w_new, 0.0, where=prog.mask, out=w_new)
        u = u + rx_y - y_new
        vdual = vdual + rx_w - w_new
        if it % 25 == 0 or it == max_iters:
            primal = max(np.linalg.norm(x - y_new), np.linalg.norm(x - w_new))
            dual = rho * max(np.linalg.norm(y_new - y), np.linalg.norm(w_new - w))
            den = max(1.0, np.linalg.norm(x))
            score = max(primal, dual) / den
            if score < best_score:
                best_score = score
                best = y_new.copy()
            if score < tol:
                y = y_new
                status = "converged"
                break
        y = y_new
        w = w_new
    gram = best if status == "unconverged" and best is not None else (y + y.T) / 2.0
    gram = (gram + gram.T) / 2.0
    residuals = check_gram(prog, gram)
    return GramSolution(program=prog, gram=gram, value=prog.value_of(gram),
                        residuals=residuals, status=status, iterations=it)


def project_to_feasible(prog: VectProgram, gram: np.ndarray, tol: float = 1e-8,
                        max_iters: int = 5_000) -> np.ndarray:
    """Dykstra projection of a symmetric matrix onto the feasible set."""
    x = (gram + gram.T) / 2.0
    p1 = np.zeros_like(x)
    p2 = np.zeros_like(x)
    p3 = np.zeros_like(x)
    for it in range(1, max_iters + 1):
        y = prog.project_affine(x + p1)
        p1 = x + p1 - y
        x = y
        y = _clamp_psd(x + p2)
        p2 = x + p2 - y
        x = y
        y = x + p3
        np.maximum(y, 0.0, where=prog.mask, out=y)
        p3 = x + p3 - y
        x = y
        if it % 10 == 0 or it == max_iters:
            res = check_gram(prog, x)
            if max(res["affine"], res["cone"], res["nonneg"]) < tol:
                return x
    return x


def extract_vectors(sol: GramSolution):
    """Factor the Gram matrix into vectors realizing its entries.

    Returns (alice, bob, eta) where alice has shape (nx, k, dim); bob is None
    in synchronous mode (the families coincide).
    """
    prog = sol.program
    w, q = eig_sym(sol.gram)
    rows = q * np.sqrt(np.maximum(w, 0.0))  # row i = vector of index i
    rows = np.real(rows)
    nx, ny, k = prog.game.nx, prog.game.ny, prog.game.k
    eta = rows[0]
    alice = np.array([[rows[prog.alice_index(x, a)] for a in range(k)] for x in range(nx)])
    if prog.mode == "bipartite":
        bob = np.array([[rows[prog.bob_index(y, b)] for b in range(k)] for y in range(ny)])
    else:
        bob = None
    return alice, bob, eta


def rounding_threshold(pi0, k: int, uniform_norm: bool = False):
    """Defect level below which rounding is guaranteed to land on a perfect
    strategy: pi0/(9k) for uniform-norm vector families, pi0/(7 k^2) else."""
    if pi0 <= 0:
        raise ValidationError("threshold needs min pi > 0")
    if k < 2:
        raise ValidationError("threshold needs k >= 2")
    return pi0 / (9 * k) if uniform_norm else pi0 / (7 * k * k)


def round_to_deterministic(game: UniqueGame, pi: InputDensity, vectors):
    """Round a vector family to a deterministic strategy.

    Picks the supported winning tuple of largest probability (lexicographic
    ties on (x, y, a, b)) and reads both reply functions off the game's
    permutations.  Where the density vanishes the permutation rule carries
    no information, so those replies fall back to the probability argmax
    against the picked tuple; in the guaranteed regime both rules agree.
    Status is "guaranteed-perfect" when min pi > 0 and the family's defect
    1 - E is within the rounding threshold, else "heuristic".
    """
    alice, bob, eta = vectors
    if bob is None:
        bob = alice
    nx, ny, k = game.nx, game.ny, game.k
    perm_inv = np.empty_like(game.perm)
    for x in range(nx):
        for y in range(ny):
            perm_inv[x, y, game.perm[x, y]] = np.arange(k)
    p = np.einsum("xad,ybd->xyab", alice, bob)
    best = -np.inf
    pick = None
    for x in range(nx):
        for y in range(ny):
            if pi.pi[x, y] == 0:
                continue
            for a in range(k):
                b = int(perm_inv[x, y, a])
                if p[x, y, a, b] > best:
                    best = p[x, y, a, b]
                    pick = (x, y, a, b)
    if pick is None:
        raise ValidationError("density has empty support")
    x0, y0, a0, b0 = pick
    ha = tuple(
        int(game.perm[x, y0, b0]) if pi.pi[x, y0] > 0
        else int(np.argmax(p[x, y0, :, b0]))
        for x in range(nx)
    )
    a0 = ha[x0]
    hb = tuple(
        int(perm_inv[x0, y, a0]) if pi.pi[x0, y] > 0
        else int(np.argmax(p[x0, y, a0, :]))
        for y in range(ny)
    )
    strat = DeterministicStrategy(hA=ha, hB=hb)

    value = 0.0
    for x in range(nx):
        for y in range(ny):
            bs = np.arange(k)
            value += pi.pi[x, y] * p[x, y, game.perm[x, y, bs], bs].sum()
    defect = 1.0 - value
    pi0 = pi.min_entry
    status = "heuristic"
    if pi0 > 0:
        norms = np.concatenate([
            np.einsum("xad,xad->xa", alice, alice).ravel(),
            np.einsum("ybd,ybd->yb", bob, bob).ravel(),
        ])
        uniform = bool(np.max(np.abs(norms - 1.0 / k)) < 1e-6)
        if defect <= rounding_threshold(pi0, k, uniform):
            status = "guaranteed-perfect"
    return strat, status


# ---------------------------------------------------------------------------
# closed-form certificate for the directed 4-cycle
# ---------------------------------------------------------------------------

def c4_value() -> float:
    """2 (1 - 1/sqrt(3)), the vector-relaxation value of the 4-cycle game."""
    return 2.0 * (1.0 - 1.0 / math.sqrt(3.0))


def c4_certified_construction() -> GramSolution:
    """Explicit optimal synchronous solution for the directed 4-cycle.

    Vectors live in R^5: a constant first coordinate and two planar unit
    vectors rotating by pi/6 and pi/3 per simultaneous (x, a) step, weighted
    so that each question block is orthogonal with block sum (1, 0, 0, 0, 0).
    """
    from .digraphs import directed_cycle, game_from_digraph

    game2, pi = game_from_digraph(directed_cycle(4))
    game = game2.to_unique_game()
    prog = build_program(game, pi, "synchronous")
    alpha = math.sqrt(2.0 * (math.sqrt(3.0) - 1.0))
    beta = math.sqrt(2.0 * (2.0 - math.sqrt(3.0)))

    def planar(angle):
        return np.array([math.cos(angle), math.sin(angle)])

    rows = np.zeros((prog.size, 5))
    rows[0] = np.array([1.0, 0, 0, 0, 0])
    for x in range(4):
        for a in range(3):
            m = 4 * a - 3 * x
            s = planar(m * math.pi / 6.0)
            t = planar(m * math.pi / 3.0)
            rows[prog.alice_index(x, a)] = np.concatenate(([1.0], alpha * s, beta * t)) / 3.0
    gram = rows @ rows.T
    residuals = check_gram(prog, gram)
    value = prog.value_of(gram)
    if max(residuals["affine"], residuals["cone"], residuals["nonneg"]) > 1e-12 \
            or abs(value - c4_value()) > 1e-12:
        raise ValidationError("certified construction failed verification")
    return GramSolution(program=prog, gram=gram, value=value,
                        residuals=residuals, status="certified")
