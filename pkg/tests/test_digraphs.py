from fractions import Fraction

import numpy as np
import pytest

from gamevalues.algebra import ValidationError
from gamevalues.classical import det_value, sync_det_value
from gamevalues.digraphs import (Digraph, dcut, directed_cycle, game_from_digraph,
                                 has_perfect_strategy, net_length)


def random_digraph(rng, nmax=8):
    n = int(rng.integers(2, nmax + 1))
    arcs = set()
    for x in range(n):
        for y in range(x + 1, n):
            roll = rng.random()
            if roll < 0.25:
                arcs.add((x, y))
            elif roll < 0.5:
                arcs.add((y, x))
    if not arcs:
        arcs.add((0, 1))
    return Digraph(n=n, arcs=frozenset(arcs))


def brute_force_labelling(graph):
    import itertools
    for w in itertools.product(range(3), repeat=graph.n):
        if all((w[x] + 1) % 3 == w[y] for x, y in graph.arcs):
            return w
    return None


def test_digraph_validation():
    with pytest.raises(ValidationError):
        Digraph(n=2, arcs=frozenset({(0, 0)}))
    with pytest.raises(ValidationError):
        Digraph(n=2, arcs=frozenset({(0, 1), (1, 0)}))
    with pytest.raises(ValidationError):
        Digraph(n=2, arcs=frozenset({(0, 5)}))


def test_single_arc_game():
    game, pi = game_from_digraph(Digraph(n=2, arcs=frozenset({(0, 1)})))
    assert game.f.tolist() == [[0, 2], [1, 0]]
    assert pi.pi.tolist() == [[0.0, 0.5], [0.5, 0.0]]


def test_cycle_game_density():
    graph = directed_cycle(4)
    game, pi = game_from_digraph(graph)
    assert len(graph.edges) == 8
    assert set(np.unique(pi.pi)) == {0.0, 0.125}
    assert game.is_synchronous() and game.is_symmetric()


def test_f_antisymmetric_mod_3():
    rng = np.random.default_rng(0)
    for _ in range(20):
        graph = random_digraph(rng)
        game, _ = game_from_digraph(graph)
        assert np.all((game.f + game.f.T) % 3 == 0)


def test_empty_edge_set_rejected():
    with pytest.raises(ValidationError):
        game_from_digraph(Digraph(n=3, arcs=frozenset()))


def test_directed_cycle_shape():
    assert directed_cycle(4).arcs == {(0, 1), (1, 2), (2, 3), (3, 0)}
    g5 = directed_cycle(5)
    assert len(g5.arcs) == 5
    assert len(g5.edges) == 10
    with pytest.raises(ValidationError):
        directed_cycle(2)


def test_net_length_forward_and_reverse():
    graph = directed_cycle(4)
    assert net_length(graph, [0, 1, 2, 3]) == 4
    assert net_length(graph, [3, 2, 1, 0]) == -4


def test_net_length_alternating():
    graph = Digraph(n=4, arcs=frozenset({(0, 1), (2, 1), (2, 3), (0, 3)}))
    assert net_length(graph, [0, 1, 2, 3]) == 0


def test_net_length_not_a_cycle():
    with pytest.raises(ValidationError):
        net_length(directed_cycle(4), [0, 2, 1, 3])


def test_perfect_strategy_cycles():
    ok, w = has_perfect_strategy(directed_cycle(6))
    assert ok
    assert all((w[x] + 1) % 3 == w[(x + 1) % 6] for x in range(6))
    assert has_perfect_strategy(directed_cycle(4)) == (False, None)
    assert has_perfect_strategy(directed_cycle(3))[0]


def test_perfect_strategy_edgeless():
    ok, w = has_perfect_strategy(Digraph(n=3, arcs=frozenset()))
    assert ok and w == [0, 0, 0]


@pytest.mark.parametrize("k", range(3, 16))
def test_perfect_strategy_divisibility(k):
    assert has_perfect_strategy(directed_cycle(k))[0] == (k % 3 == 0)


def test_perfect_strategy_brute_force_oracle():
    rng = np.random.default_rng(1)
    for _ in range(60):
        graph = random_digraph(rng, nmax=7)
        assert has_perfect_strategy(graph)[0] == (brute_force_labelling(graph) is not None)


def test_dcut_cycles():
    assert dcut(directed_cycle(4)) == 3
    assert dcut(directed_cycle(6)) == 6
    assert dcut(Digraph(n=2, arcs=frozenset({(0, 1)}))) == 1


def test_dcut_guard():
    with pytest.raises(ValidationError):
        dcut(Digraph(n=17, arcs=frozenset({(0, 1)})))


def test_dcut_matches_sync_value():
    rng = np.random.default_rng(2)
    for _ in range(30):
        graph = random_digraph(rng, nmax=6)
        game, pi = game_from_digraph(graph)
        value = sync_det_value(game.to_unique_game(), pi).value
        assert value == Fraction(2 * dcut(graph), len(graph.edges))


def test_perfect_agrees_with_dcut():
    rng = np.random.default_rng(3)
    for _ in range(200):
        graph = random_digraph(rng)
        assert has_perfect_strategy(graph)[0] == (dcut(graph) == len(graph.arcs))


def test_det_value_one_implies_labelling():
    # brute-force deterministic value 1 forces a perfect labelling (n <= 6)
    rng = np.random.default_rng(4)
    for _ in range(40):
        graph = random_digraph(rng, nmax=6)
        game, pi = game_from_digraph(graph)
        if det_value(game.to_unique_game(), pi).value == 1:
            assert has_perfect_strategy(graph)[0]


def test_json_and_arc_text():
    graph = directed_cycle(5)
    back = Digraph.from_json(graph.to_json())
    assert back.arcs == graph.arcs
    text = "\n".join(f"{x} {y}" for x, y in sorted(graph.arcs))
    assert Digraph.from_arc_text(text).arcs == graph.arcs


def test_disconnected_components_labelled_independently():
    graph = Digraph(n=6, arcs=frozenset({(0, 1), (1, 2), (2, 0), (3, 4)}))
    ok, w = has_perfect_strategy(graph)
    assert ok
    assert (w[0] + 1) % 3 == w[1]
    assert (w[3] + 1) % 3 == w[4]
    assert w[5] == 0
