"""Mechanic graph, critical paths and graph exports.

Two mechanics are linked when they mention the same sprite (a sprite and
its ancestors count as the same). Links are undirected, but a *chain* only
walks a link in the direction the game can actually unfold:

* a chain starts at the avatar's movement control (any control when the
  avatar cannot move); loss chains may also start at an autonomous mechanic
  such as an alien firing;
* a control follows another control (move, then shoot);
* an interaction follows a mechanic that brings one of its sprites into
  play; when the rule's object is a spawned sprite (a projectile) that
  spawned sprite must be the one brought in;
* a termination follows a mechanic that destroys a sprite it counts.
"""

from __future__ import annotations

import enum
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .mechanics import Kind, Mechanic
from .vgdl import EOS

SCHEMA_VERSION = 1


class NoWinPath(Exception):
    def __init__(self):
        super().__init__("no chain of mechanics leads from a control to a win")


class Criticality(str, enum.Enum):
    VICTORY_CRITICAL = "VictoryCritical"
    LOSS_CRITICAL = "LossCritical"
    POSITIVE = "Positive"
    NEGATIVE = "Negative"
    OPTIONAL = "Optional"


DOT_COLORS = {
    Criticality.VICTORY_CRITICAL: "green",
    Criticality.LOSS_CRITICAL: "red",
    Criticality.POSITIVE: "blue",
    Criticality.NEGATIVE: "orange",
    Criticality.OPTIONAL: "gray",
}


@dataclass(frozen=True)
class MechanicGraph:
    nodes: Mapping[str, Mechanic]
    edges: tuple[tuple[str, str, str], ...]
    ancestry: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    classification: Mapping[str, Criticality] = field(default_factory=dict)

    def neighbors(self, node: str) -> list[str]:
        out = []
        for a, b, _ in self.edges:
            if a == node:
                out.append(b)
            elif b == node:
                out.append(a)
        return sorted(out)

    def has_edge(self, a: str, b: str) -> bool:
        return any({a, b} == {x, y} for x, y, _ in self.edges)

    def related(self, x: str, y: str) -> bool:
        """Same sprite, or one is an ancestor of the other."""
        return x == y or x in self.ancestry.get(y, ()) or y in self.ancestry.get(x, ())

    @property
    def avatar(self) -> str | None:
        for m in self.nodes.values():
            if m.kind is Kind.CONTROL:
                return m.sprites[0]
        return None


@dataclass(frozen=True)
class CriticalPathSet:
    win_path: tuple[str, ...]
    loss_paths: tuple[tuple[str, ...], ...]
    positive_nodes: frozenset[str]
    negative_nodes: frozenset[str]


def _shared(a: Mechanic, b: Mechanic, ancestry: Mapping[str, tuple[str, ...]]) -> list[str]:
    shared = set()
    for x in a.sprites:
        for y in b.sprites:
            if x == y:
                shared.add(x)
            elif x in ancestry.get(y, ()):
                shared.add(x)
            elif y in ancestry.get(x, ()):
                shared.add(y)
    return sorted(shared)


def build_graph(
    mechanics: Sequence[Mechanic], ancestry: Mapping[str, tuple[str, ...]] | None = None
) -> MechanicGraph:
    ancestry = dict(ancestry or {})
    nodes = {m.id: m for m in mechanics}
    if len(nodes) != len(mechanics):
        raise ValueError("mechanic ids must be unique")
    edges = []
    ids = sorted(nodes)
    for i, a in enumerate(ids):
        for b in ids[i + 1:]:
            shared = _shared(nodes[a], nodes[b], ancestry)
            if shared:
                edges.append((a, b, ",".join(shared)))
    return MechanicGraph(nodes, tuple(edges), ancestry)


# -- chain rule --------------------------------------------------------------

def _provides(m: Mechanic) -> set[str]:
    if m.kind is Kind.TERMINATION:
        return set()
    return (set(m.sprites) - {EOS} - set(m.destroys)) | set(m.spawns)


def _spawned(graph: MechanicGraph) -> set[str]:
    return {s for m in graph.nodes.values() for s in m.spawns}


def entry_controls(graph: MechanicGraph) -> list[str]:
    controls = [i for i, m in graph.nodes.items() if m.kind is Kind.CONTROL]
    moving = [i for i in controls if graph.nodes[i].action == "move"]
    return sorted(moving or controls)


def can_follow(graph: MechanicGraph, a: str, b: str, spawned: set[str] | None = None) -> bool:
    """Whether a chain may step from mechanic ``a`` to mechanic ``b``."""
    if a == b or not graph.has_edge(a, b):
        return False
    ma, mb = graph.nodes[a], graph.nodes[b]
    if spawned is None:
        spawned = _spawned(graph)

    def brought(sprite: str) -> bool:
        return any(graph.related(sprite, p) for p in _provides(ma))

    if mb.kind is Kind.CONTROL:
        return ma.kind is Kind.CONTROL and b not in entry_controls(graph)
    if mb.kind is Kind.TERMINATION:
        return any(graph.related(d, s) for d in ma.destroys for s in mb.sprites)
    subject, obj = mb.sprites[0], mb.sprites[-1]
    if any(graph.related(obj, s) for s in spawned):
        return brought(obj)
    return brought(subject) or brought(obj)


def successors(graph: MechanicGraph, node: str) -> list[str]:
    spawned = _spawned(graph)
    return [n for n in graph.neighbors(node) if can_follow(graph, node, n, spawned)]


def _shortest_chain(
    graph: MechanicGraph, starts: Iterable[str], targets: Iterable[str]
) -> tuple[str, ...] | None:
    """Fewest-node chain from any start to any target; ties go to the
    lexicographically smallest id sequence."""
    succ = {n: successors(graph, n) for n in graph.nodes}
    pred: dict[str, list[str]] = {n: [] for n in graph.nodes}
    for n, outs in succ.items():
        for m in outs:
            pred[m].append(n)

    # Distance (in steps) from each node to the nearest target.
    dist = {t: 0 for t in targets}
    queue = deque(sorted(dist))
    while queue:
        n = queue.popleft()
        for p in pred[n]:
            if p not in dist:
                dist[p] = dist[n] + 1
                queue.append(p)

    reachable = [s for s in starts if s in dist]
    if not reachable:
        return None
    best = min(dist[s] for s in reachable)
    node = min(s for s in reachable if dist[s] == best)
    path = [node]
    while dist[node] > 0:
        node = min(n for n in succ[node] if dist.get(n) == dist[node] - 1)
        path.append(node)
    return tuple(path)


def loss_sources(graph: MechanicGraph) -> list[str]:
    """Loss terminations plus interactions that destroy the avatar."""
    avatar = graph.avatar
    out = []
    for i, m in graph.nodes.items():
        if m.kind is Kind.TERMINATION and m.win is False:
            out.append(i)
        elif (
            m.kind is Kind.INTERACTION
            and avatar is not None
            and any(graph.related(d, avatar) for d in m.destroys)
            and EOS not in m.sprites
        ):
            out.append(i)
    return sorted(out)


def find_critical_paths(graph: MechanicGraph) -> CriticalPathSet:
    wins = [i for i, m in graph.nodes.items() if m.kind is Kind.TERMINATION and m.win]
    entries = entry_controls(graph)
    win_path = _shortest_chain(graph, entries, wins) if wins else None
    if win_path is None:
        raise NoWinPath()

    loss_starts = sorted(
        set(entries) | {i for i, m in graph.nodes.items() if m.autonomous}
    )
    loss_paths = []
    for source in loss_sources(graph):
        path = _shortest_chain(graph, loss_starts, [source])
        if path is not None and path not in loss_paths:
            loss_paths.append(path)

    scored = {i: m.score_delta for i, m in graph.nodes.items() if m.score_delta}
    return CriticalPathSet(
        win_path=win_path,
        loss_paths=tuple(loss_paths),
        positive_nodes=frozenset(i for i, d in scored.items() if d > 0),
        negative_nodes=frozenset(i for i, d in scored.items() if d < 0),
    )


def classify(graph: MechanicGraph, paths: CriticalPathSet) -> MechanicGraph:
    on_win = set(paths.win_path)
    on_loss = {n for p in paths.loss_paths for n in p}
    classes = {}
    for node in graph.nodes:
        if node in on_win:
            classes[node] = Criticality.VICTORY_CRITICAL
        elif node in on_loss:
            classes[node] = Criticality.LOSS_CRITICAL
        elif node in paths.positive_nodes:
            classes[node] = Criticality.POSITIVE
        elif node in paths.negative_nodes:
            classes[node] = Criticality.NEGATIVE
        else:
            classes[node] = Criticality.OPTIONAL
    return MechanicGraph(graph.nodes, graph.edges, graph.ancestry, classes)


def path_position(paths: CriticalPathSet, node: str) -> int | None:
    """Earliest index of ``node`` on the win path or any loss path."""
    positions = [p.index(node) for p in (paths.win_path, *paths.loss_paths) if node in p]
    return min(positions) if positions else None


# -- exports -----------------------------------------------------------------

def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(graph: MechanicGraph) -> str:
    lines = ["digraph mechanics {"]
    for node, m in graph.nodes.items():
        cls = graph.classification.get(node, Criticality.OPTIONAL)
        lines.append(
            f"  {_dot_quote(node)} [label={_dot_quote(m.label)}, color={DOT_COLORS[cls]}];"
        )
    for a, b, label in graph.edges:
        lines.append(f"  {_dot_quote(a)} -> {_dot_quote(b)} [label={_dot_quote(label)}, dir=none];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_document(
    graph: MechanicGraph, paths: CriticalPathSet | None, tutorial: Mapping | None = None
) -> dict:
    doc: dict = {"schema": SCHEMA_VERSION}
    doc["nodes"] = [
        {
            "id": node,
            "kind": m.kind.value,
            "sprites": list(m.sprites),
            "action": m.action,
            "effect": m.effect,
            "label": m.label,
            "score_delta": m.score_delta,
            "win": m.win,
            "classification": graph.classification.get(node, Criticality.OPTIONAL).value,
        }
        for node, m in graph.nodes.items()
    ]
    doc["edges"] = [{"from": a, "to": b, "label": label} for a, b, label in graph.edges]
    doc["win_path"] = list(paths.win_path) if paths else []
    doc["loss_paths"] = [list(p) for p in paths.loss_paths] if paths else []
    doc["positive_nodes"] = sorted(paths.positive_nodes) if paths else []
    doc["negative_nodes"] = sorted(paths.negative_nodes) if paths else []
    if tutorial is not None:
        doc["tutorial"] = tutorial
    return doc


def export_json(
    graph: MechanicGraph, paths: CriticalPathSet | None, tutorial: Mapping | None = None
) -> str:
    return json.dumps(graph_document(graph, paths, tutorial), indent=2) + "\n"
