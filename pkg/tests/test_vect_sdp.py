import math
from fractions import Fraction

import numpy as np
import pytest

from gamevalues.algebra import ValidationError
from gamevalues.classical import sync_det_value
from gamevalues.digraphs import directed_cycle, game_from_digraph
from gamevalues.games import (DeterministicStrategy, UniqueGame, make_chsh,
                              strategy_value_exact, uniform_density)
from gamevalues.vect_sdp import (GramSolution, build_program, c4_certified_construction,
                                 c4_value, check_gram, extract_vectors,
                                 project_to_feasible, round_to_deterministic,
                                 rounding_threshold, solve_vect)


def cycle_game(k):
    game, pi = game_from_digraph(directed_cycle(k))
    return game.to_unique_game(), pi


def feasibility(prog, gram):
    res = check_gram(prog, gram)
    return max(res["affine"], res["cone"], res["nonneg"])


def test_program_sizes():
    game, pi = make_chsh(3)
    prog = build_program(game.to_unique_game(), pi, "bipartite")
    assert prog.size == 19
    g4, pi4 = cycle_game(4)
    assert build_program(g4, pi4, "synchronous").size == 13


def test_program_objective_support():
    g4, pi4 = cycle_game(4)
    prog = build_program(g4, pi4, "synchronous")
    # no weight on same-question mismatched outputs
    for x in range(4):
        for a in range(3):
            for b in range(3):
                if a != b:
                    assert prog.objective[prog.alice_index(x, a), prog.alice_index(x, b)] == 0
    assert prog.objective.min() >= 0


def test_program_mode_validation():
    game = UniqueGame(nx=1, ny=2, k=2, perm=np.array([[[0, 1], [1, 0]]]))
    pi = uniform_density(1, 2)
    with pytest.raises(ValidationError):
        build_program(game, pi, "synchronous")
    with pytest.raises(ValidationError):
        build_program(game, pi, "diagonal")


def test_solve_c4_synchronous():
    g4, pi4 = cycle_game(4)
    sol = solve_vect(build_program(g4, pi4, "synchronous"))
    assert sol.status == "converged"
    assert abs(sol.value - c4_value()) < 1e-3
    assert feasibility(sol.program, sol.gram) < 1e-6


def test_solve_c4_bipartite():
    g4, pi4 = cycle_game(4)
    sol = solve_vect(build_program(g4, pi4, "bipartite"))
    assert abs(sol.value - c4_value()) < 1e-3


def test_solve_perfect_game_reaches_one():
    g6, pi6 = cycle_game(6)
    sol = solve_vect(build_program(g6, pi6, "synchronous"))
    assert abs(sol.value - 1.0) < 1e-5


def test_solve_dominates_sync_value():
    rng = np.random.default_rng(0)
    for _ in range(6):
        n, k = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        perm = np.array([[np.arange(k) if x == y else rng.permutation(k)
                          for y in range(n)] for x in range(n)])
        game = UniqueGame(nx=n, ny=n, k=k, perm=perm)
        pi = uniform_density(n, n)
        sol = solve_vect(build_program(game, pi, "synchronous"))
        assert sol.value >= float(sync_det_value(game, pi).value) - 1e-4


def test_solve_iteration_cap_flags_unconverged():
    g4, pi4 = cycle_game(4)
    sol = solve_vect(build_program(g4, pi4, "synchronous"), max_iters=30)
    assert sol.status == "unconverged"
    assert sol.iterations == 30


def test_extract_vectors_roundtrip():
    g4, pi4 = cycle_game(4)
    sol = solve_vect(build_program(g4, pi4, "synchronous"))
    alice, bob, eta = extract_vectors(sol)
    assert bob is None
    prog = sol.program
    for x in range(4):
        for a in range(3):
            for y in range(4):
                for b in range(3):
                    got = alice[x, a] @ alice[y, b]
                    want = sol.gram[prog.alice_index(x, a), prog.alice_index(y, b)]
                    assert abs(got - want) < 1e-6
    assert abs(eta @ eta - 1.0) < 1e-6


def test_extract_vectors_rank_one_strategy():
    game, pi = make_chsh(3)
    u = game.to_unique_game()
    prog = build_program(u, pi, "bipartite")
    ind = np.zeros(prog.size)
    ind[0] = 1.0
    for x in range(3):
        ind[prog.alice_index(x, 0)] = 1.0
    for y in range(3):
        ind[prog.bob_index(y, 0)] = 1.0
    gram = np.outer(ind, ind)
    sol = GramSolution(program=prog, gram=gram, value=prog.value_of(gram),
                       residuals=check_gram(prog, gram), status="manual")
    alice, bob, eta = extract_vectors(sol)
    for x in range(3):
        assert abs(alice[x, 0] @ eta - 1.0) < 1e-9
        assert np.linalg.norm(alice[x, 1]) < 1e-9


def test_expected_value_from_vectors_matches_objective():
    g4, pi4 = cycle_game(4)
    sol = solve_vect(build_program(g4, pi4, "synchronous"))
    alice, _, _ = extract_vectors(sol)
    total = 0.0
    for x in range(4):
        for y in range(4):
            for b in range(3):
                a = int(g4.perm[x, y, b])
                total += pi4.pi[x, y] * (alice[x, a] @ alice[y, b])
    assert abs(total - sol.value) < 1e-6


def test_c4_certified_construction():
    cert = c4_certified_construction()
    assert abs(cert.value - c4_value()) < 1e-9
    assert feasibility(cert.program, cert.gram) < 1e-12
    prog = cert.program
    # unit block sums and uniform norms 1/3
    for x in range(4):
        for a in range(3):
            i = prog.alice_index(x, a)
            assert abs(cert.gram[i, i] - 1.0 / 3.0) < 1e-12
            for b in range(a + 1, 3):
                assert abs(cert.gram[i, prog.alice_index(x, b)]) < 1e-12
    # round-trip through the factorization
    sol_vecs = extract_vectors(cert)
    alice = sol_vecs[0]
    regram = np.zeros((13, 13))
    rows = [sol_vecs[2]] + [alice[x, a] for x in range(4) for a in range(3)]
    for i, ri in enumerate(rows):
        for j, rj in enumerate(rows):
            regram[i, j] = ri @ rj
    assert np.max(np.abs(regram - cert.gram)) < 1e-9


def test_rounding_threshold_values():
    assert rounding_threshold(Fraction(1, 9), 3) == Fraction(1, 567)
    assert rounding_threshold(Fraction(1, 4), 2) == Fraction(1, 112)
    assert rounding_threshold(Fraction(1, 9), 3, uniform_norm=True) == Fraction(1, 243)
    with pytest.raises(ValidationError):
        rounding_threshold(0.0, 3)
    with pytest.raises(ValidationError):
        rounding_threshold(0.5, 1)


def test_round_perfect_cycle6():
    g6, pi6 = cycle_game(6)
    sol = solve_vect(build_program(g6, pi6, "synchronous"))
    strat, status = round_to_deterministic(g6, pi6, extract_vectors(sol))
    assert strategy_value_exact(g6, pi6, strat) == 1
    assert status == "heuristic"  # density vanishes off the edge set


def test_round_guaranteed_status_full_support():
    game, pi = make_chsh(3)
    u = game.to_unique_game()
    # a perfect unique game: winning reply equals Bob's answer
    perm = np.array([[np.arange(3)] * 3] * 3)
    perfect_game = UniqueGame(nx=3, ny=3, k=3, perm=perm)
    prog = build_program(perfect_game, pi, "bipartite")
    ind = np.zeros(prog.size)
    ind[0] = 1.0
    for x in range(3):
        ind[prog.alice_index(x, 1)] = 1.0
        ind[prog.bob_index(x, 1)] = 1.0
    gram = np.outer(ind, ind)
    sol = GramSolution(program=prog, gram=gram, value=prog.value_of(gram),
                       residuals=check_gram(prog, gram), status="manual")
    strat, status = round_to_deterministic(perfect_game, pi, extract_vectors(sol))
    assert status == "guaranteed-perfect"
    assert strategy_value_exact(perfect_game, pi, strat) == 1


def test_project_to_feasible():
    g4, pi4 = cycle_game(4)
    prog = build_program(g4, pi4, "synchronous")
    rng = np.random.default_rng(5)
    noise = rng.normal(size=(13, 13))
    start = np.eye(13) + 0.05 * (noise + noise.T)
    feasible = project_to_feasible(prog, start)
    assert feasibility(prog, feasible) < 1e-8


def test_gram_solution_invariants_on_solver_output():
    g4, pi4 = cycle_game(4)
    for mode in ("synchronous", "bipartite"):
        prog = build_program(g4, pi4, mode)
        sol = solve_vect(prog, tol=1e-7)
        res = sol.residuals
        assert res["affine_norm"] < 1e-6       # gram[eta, eta] = 1
        assert res["affine_orthogonality"] < 1e-6
        assert res["affine_sums"] < 1e-6
        assert res["cone"] < 1e-6
        assert res["nonneg"] < 1e-6


def test_size_guard():
    game = UniqueGame(nx=8, ny=8, k=4,
                      perm=np.array([[np.arange(4)] * 8] * 8))
    pi = uniform_density(8, 8)
    prog = build_program(game, pi, "bipartite")
    # 1 + 2*8*4 = 65 fits; force the guard with a fake size
    assert prog.size == 65
    big = UniqueGame(nx=25, ny=25, k=4,
                     perm=np.array([[np.arange(4)] * 25] * 25))
    with pytest.raises(ValidationError):
        solve_vect(build_program(big, uniform_density(25, 25), "bipartite"))
