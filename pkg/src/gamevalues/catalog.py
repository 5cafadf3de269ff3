"""Named game generators and file-based game loading for the CLI."""

from __future__ import annotations

import json
from pathlib import Path

from .algebra import ValidationError, group_from_name
from .digraphs import Digraph, directed_cycle, game_from_digraph
from .games import (GroupGame, InputDensity, UniqueGame, density_from_json,
                    game_from_json, make_chsh, make_commutator_game, uniform_density)


def resolve_game(spec: str, density_path: str | None = None):
    """Turn a game spec into (game, density, digraph-or-None, canonical id).

    spec is a named generator "chsh:<n>", "commutator:<group>", "cycle:<k>",
    or a path to a game JSON file (with the density either embedded under
    "density", supplied separately, or defaulting to uniform).
    """
    graph = None
    if spec.startswith("chsh:"):
        game, pi = make_chsh(int(spec.split(":", 1)[1]))
    elif spec.startswith("commutator:"):
        group = group_from_name(spec.split(":", 1)[1])
        game, pi = make_commutator_game(group)
    elif spec.startswith("cycle:"):
        graph = directed_cycle(int(spec.split(":", 1)[1]))
        game, pi = game_from_digraph(graph)
    else:
        path = Path(spec)
        if not path.exists():
            raise ValidationError(f"unknown game spec {spec!r} (not a generator, not a file)")
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as err:
            raise ValidationError(f"file {spec} is not valid JSON: {err}") from err
        if "arcs" in data:
            graph = Digraph.from_json(data)
            game, pi = game_from_digraph(graph)
        else:
            game = game_from_json(data)
            if "density" in data:
                pi = density_from_json(data["density"])
            else:
                pi = uniform_density(game.nx, game.ny)
    if density_path is not None:
        pi = density_from_json(json.loads(Path(density_path).read_text()))
    return game, pi, graph, spec


def resolve_digraph(spec: str) -> Digraph:
    """A digraph from "cycle:<k>", a JSON file, or an arc-list text file."""
    if spec.startswith("cycle:"):
        return directed_cycle(int(spec.split(":", 1)[1]))
    path = Path(spec)
    if not path.exists():
        raise ValidationError(f"unknown digraph spec {spec!r}")
    text = path.read_text()
    try:
        return Digraph.from_json(json.loads(text))
    except json.JSONDecodeError:
        return Digraph.from_arc_text(text)


def as_unique(game) -> UniqueGame:
    return game.to_unique_game() if isinstance(game, GroupGame) else game
