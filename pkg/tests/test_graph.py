import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from vgdl_tutor.graph import (
    DOT_COLORS,
    Criticality,
    CriticalPathSet,
    MechanicGraph,
    NoWinPath,
    build_graph,
    classify,
    export_dot,
    export_json,
    find_critical_paths,
    graph_document,
)
from vgdl_tutor.mechanics import CANNOT_MOVE_PAST, Kind, Mechanic, discover_mechanics
from vgdl_tutor.vgdl import EOS, parse_text


def mech(id, kind, sprites, action="collide with", **kw):
    return Mechanic(id=id, kind=kind, sprites=tuple(sprites), action=action,
                    effect="", source="", label=id, **kw)


MOVE = mech("control:move", Kind.CONTROL, ["avatar"], "move", buttons=("arrow keys",))


def random_pipeline(seed):
    game = parse_text(oracles.random_game_text(random.Random(seed)))
    mechanics = discover_mechanics(game)
    return mechanics, game.ancestry(), build_graph(mechanics, game.ancestry())


class TestBuildGraph:
    def test_control_and_step_back(self):
        step = mech("rule:000", Kind.INTERACTION, ["avatar", EOS], CANNOT_MOVE_PAST)
        graph = build_graph([MOVE, step])
        assert graph.edges == (("control:move", "rule:000", "avatar"),)

    def test_no_shared_sprite(self):
        a = mech("rule:000", Kind.INTERACTION, ["rock", "wall"])
        b = mech("rule:001", Kind.INTERACTION, ["gem", "hole"])
        assert build_graph([a, b]).edges == ()

    def test_path_shaped(self):
        shoot = mech("control:shoot", Kind.CONTROL, ["avatar", "missile"], "shoot",
                     buttons=("space bar",), spawns=("missile",))
        hit = mech("rule:000", Kind.INTERACTION, ["alien", "missile"], "destroy", destroys=("alien",))
        win = mech("term:000", Kind.TERMINATION, ["alien"], "win", win=True)
        graph = build_graph([shoot, hit, win])
        assert graph.edges == (
            ("control:shoot", "rule:000", "missile"),
            ("rule:000", "term:000", "alien"),
        )

    def test_ancestry_labels_with_ancestor(self):
        a = mech("rule:000", Kind.INTERACTION, ["alienGreen", "wall"])
        b = mech("rule:001", Kind.INTERACTION, ["alien", "missile"])
        graph = build_graph([a, b], {"alienGreen": ("alien",)})
        assert graph.edges == (("rule:000", "rule:001", "alien"),)

    def test_duplicate_ids(self):
        with pytest.raises(ValueError):
            build_graph([MOVE, MOVE])

    def test_fixture_edges_sorted(self, aliens_run):
        edges = aliens_run.raw_graph.edges
        assert list(edges) == sorted(edges)
        assert all(a < b for a, b, _ in edges)


class TestCriticalPaths:
    def test_aliens_win_path(self, aliens_run):
        labels = [aliens_run.by_id[i].label for i in aliens_run.paths.win_path]
        assert labels == [
            "player can move left and right (using arrow keys)",
            "player can shoot missile (using space bar)",
            "missile destroys alien",
            "win when alien count reaches 0",
        ]

    def test_aliens_win_path_matches_oracle(self, aliens_run):
        best = oracles.best_win_chain(aliens_run.mechanics, aliens_run.game.ancestry())
        assert aliens_run.paths.win_path == best

    def test_length_two(self):
        # A control that itself clears the counted sprite.
        dig = mech("control:move", Kind.CONTROL, ["avatar", "dirt"], "move",
                   buttons=("arrow keys",), destroys=("dirt",))
        win = mech("term:000", Kind.TERMINATION, ["dirt"], "win", win=True)
        paths = find_critical_paths(build_graph([dig, win]))
        assert paths.win_path == ("control:move", "term:000")
        assert paths.loss_paths == ()

    def test_alien_missile_kills_player_on_loss_path(self, aliens_run):
        (rule,) = [m for m in aliens_run.mechanics if m.source.startswith("avatar alienMissile >")]
        assert any(rule.id in p for p in aliens_run.paths.loss_paths)
        assert aliens_run.graph.classification["emit:alien"] is Criticality.LOSS_CRITICAL

    def test_no_win_path(self):
        win = mech("term:000", Kind.TERMINATION, ["gem"], "win", win=True)
        with pytest.raises(NoWinPath):
            find_critical_paths(build_graph([MOVE, win]))

    def test_no_win_termination(self):
        with pytest.raises(NoWinPath):
            find_critical_paths(build_graph([MOVE]))

    def test_score_sets(self, aliens_run):
        deltas = {i: aliens_run.by_id[i].score_delta for i in aliens_run.paths.positive_nodes}
        assert deltas and all(d > 0 for d in deltas.values())
        assert all(aliens_run.by_id[i].score_delta < 0 for i in aliens_run.paths.negative_nodes)

    def test_boxes_has_no_loss(self, corpus_runs):
        assert corpus_runs["boxes"].paths.loss_paths == ()


class TestClassify:
    def test_win_path_nodes(self, aliens_run):
        for node in aliens_run.paths.win_path:
            assert aliens_run.graph.classification[node] is Criticality.VICTORY_CRITICAL

    def test_positive_off_path(self, aliens_run):
        (rule,) = [m for m in aliens_run.mechanics if m.source == "base missile > killBoth scoreChange=1"]
        assert aliens_run.graph.classification[rule.id] is Criticality.POSITIVE

    def test_isolated_is_optional(self):
        dig = mech("control:move", Kind.CONTROL, ["avatar", "dirt"], "move",
                   buttons=("arrow keys",), destroys=("dirt",))
        win = mech("term:000", Kind.TERMINATION, ["dirt"], "win", win=True)
        deco = mech("rule:000", Kind.INTERACTION, ["cloud", "sky"])
        graph = build_graph([dig, win, deco])
        classes = classify(graph, find_critical_paths(graph)).classification
        assert classes["rule:000"] is Criticality.OPTIONAL

    def test_priority(self):
        graph = build_graph([MOVE])
        paths = CriticalPathSet(("control:move",), (("control:move",),),
                                frozenset({"control:move"}), frozenset())
        assert classify(graph, paths).classification["control:move"] is Criticality.VICTORY_CRITICAL

    def test_partition(self, corpus_runs):
        for run in corpus_runs.values():
            classes = run.graph.classification
            assert set(classes) == set(run.graph.nodes)
            assert all(c in Criticality for c in classes.values())


class TestExports:
    def test_empty_dot(self):
        assert export_dot(MechanicGraph({}, ())) == "digraph mechanics {\n}\n"

    def test_single_green(self):
        graph = MechanicGraph({MOVE.id: MOVE}, (), {}, {MOVE.id: Criticality.VICTORY_CRITICAL})
        assert "color=green" in export_dot(graph)

    def test_green_set_is_win_path(self, aliens_run):
        dot = export_dot(aliens_run.graph)
        green = {line.split('"')[1] for line in dot.splitlines() if "color=green" in line}
        assert green == set(aliens_run.paths.win_path)

    def test_colors_cover_classes(self):
        assert set(DOT_COLORS) == set(Criticality)

    def test_empty_json(self):
        doc = json.loads(export_json(MechanicGraph({}, ()), None))
        assert doc["nodes"] == [] and doc["edges"] == [] and doc["win_path"] == []

    def test_fixture_json(self, aliens_run):
        doc = json.loads(export_json(aliens_run.graph, aliens_run.paths))
        assert len(doc["nodes"]) == len(aliens_run.mechanics)
        assert doc["win_path"] == list(aliens_run.paths.win_path)
        assert doc == graph_document(aliens_run.graph, aliens_run.paths)

    def test_deterministic(self, aliens_run):
        assert export_dot(aliens_run.graph) == export_dot(aliens_run.graph)
        assert export_json(aliens_run.graph, aliens_run.paths) == export_json(
            aliens_run.graph, aliens_run.paths
        )


def _valid_chain(graph, path, mechanics, ancestry):
    by_id = {m.id: m for m in mechanics}
    return all(
        graph.has_edge(a, b) and oracles.can_step(by_id[a], by_id[b], mechanics, ancestry)
        for a, b in zip(path, path[1:])
    )


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_oracle_equivalence(seed):
    mechanics, ancestry, graph = random_pipeline(seed)
    assert len(mechanics) <= 12
    expected = oracles.best_win_chain(mechanics, ancestry)
    if expected is None:
        with pytest.raises(NoWinPath):
            find_critical_paths(graph)
        return
    paths = find_critical_paths(graph)
    assert len(paths.win_path) == len(expected)
    assert paths.win_path == expected


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_paths_are_valid_chains(seed):
    mechanics, ancestry, graph = random_pipeline(seed)
    try:
        paths = find_critical_paths(graph)
    except NoWinPath:
        return
    win = paths.win_path
    assert graph.nodes[win[0]].kind is Kind.CONTROL
    assert graph.nodes[win[-1]].win is True
    assert len(set(win)) == len(win)
    assert _valid_chain(graph, win, mechanics, ancestry)
    for loss in paths.loss_paths:
        assert len(set(loss)) == len(loss)
        assert _valid_chain(graph, loss, mechanics, ancestry)
    classes = classify(graph, paths).classification
    assert {n for n, c in classes.items() if c is Criticality.VICTORY_CRITICAL} == set(win)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), cut=st.integers(0, 11))
def test_edges_monotone(seed, cut):
    # Adding mechanics never removes an edge among the old ones.
    mechanics, ancestry, graph = random_pipeline(seed)
    smaller = build_graph(mechanics[:cut], ancestry)
    assert set(smaller.edges) <= set(graph.edges)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_deterministic_random(seed):
    _, _, first = random_pipeline(seed)
    _, _, second = random_pipeline(seed)
    assert first.edges == second.edges
    try:
        assert find_critical_paths(first) == find_critical_paths(second)
    except NoWinPath:
        pass
