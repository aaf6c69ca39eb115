"""Instruction tutorials for VGDL games, generated by static rule analysis."""

from .graph import (
    CriticalPathSet,
    Criticality,
    MechanicGraph,
    NoWinPath,
    build_graph,
    classify,
    export_dot,
    export_json,
    find_critical_paths,
)
from .mechanics import Mechanic, discover_mechanics, load_tables
from .textgen import TutorialDocument, generate_tutorial, grammar_for, realize, select_form
from .vgdl import GameDescription, parse, parse_text, tokenize, validate

__version__ = "0.1.0"


def tutorial_for(source: str, seed: int = 0, include_optional: bool = False, name: str = ""):
    """Parse VGDL text and return (graph, paths, tutorial)."""
    game = parse_text(source)
    graph = build_graph(discover_mechanics(game), game.ancestry())
    paths = find_critical_paths(graph)
    graph = classify(graph, paths)
    doc = generate_tutorial(graph, paths, grammar_for(game), seed, include_optional, name)
    return graph, paths, doc
