from fractions import Fraction

import numpy as np
import pytest

from gamevalues.algebra import ValidationError, cyclic_group, symmetric_group
from gamevalues.classical import det_value, perfect_sync_group_strategy, sync_det_value
from gamevalues.digraphs import directed_cycle, game_from_digraph
from gamevalues.games import (DeterministicStrategy, GroupGame, UniqueGame,
                              expected_value, make_chsh, make_commutator_game,
                              strategy_value_exact, uniform_density)
from gamevalues.quantum_bounds import cost_free_basis, cost_matrix


def test_chsh3_det_value():
    game, pi = make_chsh(3)
    rep = det_value(game.to_unique_game(), pi)
    assert rep.value == Fraction(2, 3)
    assert rep.explored == 27
    # the reported strategy attains the value
    assert strategy_value_exact(game.to_unique_game(), pi, rep.best) == Fraction(2, 3)


def test_chsh3_det_witness_from_direct_evaluation():
    # oracle: the explicit pair g: 0,1,2 -> 0,1,1 and h = 1 - g wins 6 of 9
    game, pi = make_chsh(3)
    u = game.to_unique_game()
    g = (0, 1, 1)
    h = tuple((1 - v) % 3 for v in g)
    strat = DeterministicStrategy(hA=g, hB=h)
    assert strategy_value_exact(u, pi, strat) == Fraction(2, 3)


def test_chsh3_sync_value_constant():
    game, pi = make_chsh(3)
    rep = sync_det_value(game.to_unique_game(), pi)
    assert rep.value == Fraction(5, 9)
    assert rep.best.hA == (0, 0, 0)  # lexicographically smallest optimum
    for c in range(3):
        const = DeterministicStrategy(hA=(c,) * 3, hB=(c,) * 3)
        assert strategy_value_exact(game.to_unique_game(), pi, const) == Fraction(5, 9)


@pytest.mark.parametrize("k,det,sync", [
    (4, Fraction(3, 4), Fraction(3, 4)),
    (5, Fraction(9, 10), Fraction(4, 5)),
    (7, Fraction(13, 14), Fraction(6, 7)),
    (8, Fraction(7, 8), Fraction(7, 8)),
])
def test_cycle_values(k, det, sync):
    game, pi = game_from_digraph(directed_cycle(k))
    u = game.to_unique_game()
    assert det_value(u, pi).value == det
    assert sync_det_value(u, pi).value == sync


def test_sync_never_exceeds_det():
    rng = np.random.default_rng(0)
    for _ in range(25):
        n = int(rng.integers(2, 4))
        k = int(rng.integers(2, 4))
        perm = np.array([[rng.permutation(k) for _ in range(n)] for _ in range(n)])
        game = UniqueGame(nx=n, ny=n, k=k, perm=perm)
        pi = uniform_density(n, n)
        assert sync_det_value(game, pi).value <= det_value(game, pi).value


def test_even_cycle_det_equals_sync():
    for k in (4, 8):
        game, pi = game_from_digraph(directed_cycle(k))
        u = game.to_unique_game()
        assert det_value(u, pi).value == sync_det_value(u, pi).value


def test_commutator_s3_value():
    game, pi = make_commutator_game(symmetric_group(3))
    rep = sync_det_value(game.to_unique_game(), pi)
    assert rep.value == Fraction(24, 36)


def test_commutator_s3_known_strategy():
    # the labelling fixing everything except the three-cycles, which swap,
    # satisfies 24 of the 36 commutator constraints (oracle: direct count)
    group = symmetric_group(3)
    game, pi = make_commutator_game(group)
    import itertools
    elems = sorted(itertools.permutations(range(3)))
    g = elems.index((1, 2, 0))
    g2 = elems.index((2, 0, 1))
    w = [group.identity] * 6
    w[g] = g2
    w[g2] = g
    count = sum(
        1
        for x in range(6)
        for y in range(6)
        if group.table[w[x], group.inverse[w[y]]] == game.f[x, y]
    )
    assert count == 24
    strat = DeterministicStrategy(hA=tuple(w), hB=tuple(w))
    assert strategy_value_exact(game.to_unique_game(), pi, strat) == Fraction(24, 36)


def test_value_matches_reevaluation():
    rng = np.random.default_rng(1)
    for _ in range(10):
        n = int(rng.integers(2, 4))
        k = int(rng.integers(2, 4))
        perm = np.array([[rng.permutation(k) for _ in range(n)] for _ in range(n)])
        game = UniqueGame(nx=n, ny=n, k=k, perm=perm)
        pi = uniform_density(n, n)
        rep = det_value(game, pi)
        direct = expected_value(game, pi, rep.best.to_correlation(k))
        assert abs(float(rep.value) - direct) < 1e-12
        rep_s = sync_det_value(game, pi)
        direct_s = expected_value(game, pi, rep_s.best.to_correlation(k))
        assert abs(float(rep_s.value) - direct_s) < 1e-12


def test_translation_invariance_of_group_game_values():
    # right translation of a strategy leaves its value unchanged
    group = cyclic_group(3)
    game, pi = make_chsh(3)
    u = game.to_unique_game()
    rng = np.random.default_rng(2)
    for _ in range(10):
        ha = rng.integers(0, 3, size=3)
        hb = rng.integers(0, 3, size=3)
        base = strategy_value_exact(u, pi, DeterministicStrategy(hA=ha, hB=hb))
        for c in range(3):
            shifted = DeterministicStrategy(
                hA=[group.table[a, c] for a in ha],
                hB=[group.table[b, c] for b in hb])
            assert strategy_value_exact(u, pi, shifted) == base


def test_cost_matrix_consistency_with_strategy_values():
    rng = np.random.default_rng(3)
    game, pi = make_chsh(3)
    u = game.to_unique_game()
    cm = cost_matrix(u, pi)
    k = u.k
    for _ in range(15):
        h = rng.integers(0, k, size=u.nx)
        total = sum(cm.entries[x * k + h[x], y * k + h[y]]
                    for x in range(u.nx) for y in range(u.nx))
        strat = DeterministicStrategy(hA=h, hB=h)
        assert abs(total - float(strategy_value_exact(u, pi, strat))) < 1e-12


def test_indicator_annihilation_exact():
    import itertools
    game, _ = game_from_digraph(directed_cycle(3))
    u = game.to_unique_game()
    basis = cost_free_basis(u)
    k = u.k
    for h in itertools.product(range(k), repeat=u.nx):
        v = np.zeros(u.nx * k)
        for x, a in enumerate(h):
            v[x * k + a] = 1.0
        for z in basis.elements:
            assert v @ z @ v == 0.0


def test_search_guards():
    perm = np.array([[np.arange(2)] * 30] * 1)
    game = UniqueGame(nx=1, ny=30, k=2, perm=perm)
    pi = uniform_density(1, 30)
    with pytest.raises(ValidationError):
        det_value(game, pi)
    with pytest.raises(ValidationError):
        sync_det_value(game, pi)  # not square either


def test_perfect_group_strategy_abelian():
    game, _ = make_commutator_game(cyclic_group(4))
    w = perfect_sync_group_strategy(game)
    assert w == (game.group.identity,) * 4


def test_perfect_group_strategy_s3_none():
    game, _ = make_commutator_game(symmetric_group(3))
    assert perfect_sync_group_strategy(game) is None


def test_perfect_group_strategy_cycle6_with_support():
    graph = directed_cycle(6)
    game, pi = game_from_digraph(graph)
    w = perfect_sync_group_strategy(game, pi)
    assert w is not None
    assert all((w[x] + 1) % 3 == w[(x + 1) % 6] for x in range(6))
    # matches the labelling decision
    from gamevalues.digraphs import has_perfect_strategy
    assert has_perfect_strategy(graph)[0]


def test_perfect_group_strategy_cycle4_none():
    game, pi = game_from_digraph(directed_cycle(4))
    assert perfect_sync_group_strategy(game, pi) is None


def test_perfect_group_strategy_requires_synchronous():
    game, _ = make_chsh(3)
    with pytest.raises(ValidationError):
        perfect_sync_group_strategy(game)


def test_report_json():
    game, pi = make_chsh(3)
    rep = det_value(game.to_unique_game(), pi)
    data = rep.to_json()
    assert data["value"] == {"num": 2, "den": 3}
    assert data["explored"] == 27
