import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from vgdl_tutor.games import game_path, game_paths
from vgdl_tutor.graph import build_graph, classify, find_critical_paths
from vgdl_tutor.mechanics import discover_mechanics
from vgdl_tutor.textgen import grammar_for
from vgdl_tutor.vgdl import parse_text


def load(stem):
    return parse_text(game_path(stem).read_text(encoding="utf-8"))


class Pipeline:
    def __init__(self, game):
        self.game = game
        self.mechanics = discover_mechanics(game)
        self.by_id = {m.id: m for m in self.mechanics}
        self.raw_graph = build_graph(self.mechanics, game.ancestry())
        self.paths = find_critical_paths(self.raw_graph)
        self.graph = classify(self.raw_graph, self.paths)
        self.grammar = grammar_for(game)

    def find(self, label):
        (hit,) = [m for m in self.mechanics if m.label == label]
        return hit


@pytest.fixture(scope="session")
def aliens():
    return load("aliens")


@pytest.fixture(scope="session")
def aliens_run(aliens):
    return Pipeline(aliens)


@pytest.fixture(scope="session")
def corpus():
    return {p.stem: parse_text(p.read_text(encoding="utf-8")) for p in game_paths()}


@pytest.fixture(scope="session")
def corpus_runs(corpus):
    return {name: Pipeline(game) for name, game in corpus.items()}


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import REPORT

    if REPORT:
        terminalreporter.section("acceptance criteria")
        for line in REPORT:
            terminalreporter.write_line(line)
