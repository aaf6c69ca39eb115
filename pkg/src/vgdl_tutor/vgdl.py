"""VGDL game description reader.

Turns the indentation-structured text of a VGDL file into a
:class:`GameDescription`: sprite hierarchy, level mapping, interaction rules
and termination rules. Only structure is enforced here; class and effect
names are kept verbatim and given meaning further down the pipeline.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

EOS = "EOS"
INDENT_WIDTH = 4
SECTIONS = ("SpriteSet", "LevelMapping", "InteractionSet", "TerminationSet")
REQUIRED_SECTIONS = ("SpriteSet", "InteractionSet", "TerminationSet")

# Parameter keys whose values name sprites (stype, stype1, stype2, ...).
_SPRITE_PARAM = re.compile(r"^stype\d*$")


class VGDLError(Exception):
    """Base class for errors raised while reading a VGDL file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class MixedIndentation(VGDLError):
    def __init__(self, line: int):
        super().__init__("tabs and spaces mixed in indentation", line)


class UnevenIndentation(VGDLError):
    def __init__(self, line: int, width: int):
        super().__init__(
            f"indentation of {width} spaces is not a multiple of {INDENT_WIDTH}", line
        )


class MissingSection(VGDLError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"missing section {name}")


class MalformedLine(VGDLError):
    def __init__(self, line: int, reason: str = "malformed line"):
        super().__init__(reason, line)


class DuplicateSprite(VGDLError):
    def __init__(self, name: str, line: int | None = None):
        self.name = name
        super().__init__(f"duplicate sprite {name!r}", line)


class CyclicHierarchy(VGDLError):
    def __init__(self, names: Sequence[str]):
        self.names = tuple(names)
        super().__init__("cyclic sprite hierarchy: " + " -> ".join(self.names))


@dataclass(frozen=True)
class SourceLine:
    line_number: int
    indent: int
    content: str


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "Error" | "Warning"
    line: int | None
    message: str
    file: str = ""

    @property
    def is_error(self) -> bool:
        return self.severity == "Error"


@dataclass(frozen=True)
class RawSprite:
    """A SpriteSet entry before inheritance is applied."""

    name: str
    cls: str | None
    params: Mapping[str, str]
    parent: str | None = None
    line: int | None = None


@dataclass(frozen=True)
class SpriteDef:
    name: str
    cls: str | None
    params: Mapping[str, str]
    parent: str | None = None
    children: tuple[str, ...] = ()
    line: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class InteractionRule:
    subject: str
    object: str
    effect: str
    params: Mapping[str, str] = field(default_factory=dict)
    line: int | None = field(default=None, compare=False)

    @property
    def score_change(self) -> int | None:
        value = self.params.get("scoreChange")
        return None if value is None else int(value)


@dataclass(frozen=True)
class TerminationRule:
    cls: str
    params: Mapping[str, str]
    win: bool
    line: int | None = field(default=None, compare=False)

    @property
    def sprite_refs(self) -> tuple[str, ...]:
        return tuple(v for k, v in self.params.items() if _SPRITE_PARAM.match(k))


@dataclass(frozen=True)
class GameDescription:
    game_class: str
    sprites: tuple[SpriteDef, ...]
    level_mapping: Mapping[str, tuple[str, ...]]
    interactions: tuple[InteractionRule, ...]
    terminations: tuple[TerminationRule, ...]
    avatar_name: str | None
    params: Mapping[str, str] = field(default_factory=dict)
    has_level_mapping: bool = True

    def sprite(self, name: str) -> SpriteDef:
        for s in self.sprites:
            if s.name == name:
                return s
        raise KeyError(name)

    def is_declared(self, name: str) -> bool:
        return any(s.name == name for s in self.sprites)

    def resolves(self, ref: str) -> bool:
        return ref == EOS or self.is_declared(ref)

    def ancestors(self, name: str) -> tuple[str, ...]:
        """Ancestor names of ``name``, nearest first."""
        by_name = {s.name: s for s in self.sprites}
        out = []
        parent = by_name[name].parent if name in by_name else None
        while parent is not None:
            out.append(parent)
            parent = by_name[parent].parent
        return tuple(out)

    def ancestry(self) -> dict[str, tuple[str, ...]]:
        return {s.name: self.ancestors(s.name) for s in self.sprites}

    def descendants(self, name: str) -> tuple[str, ...]:
        return tuple(s.name for s in self.sprites if name in self.ancestors(s.name))

    def avatar_sprites(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.sprites if is_avatar_class(s.cls))


def is_avatar_class(cls: str | None) -> bool:
    # GVG-AI names every player-controlled class "...Avatar".
    return bool(cls) and cls.endswith("Avatar")


def tokenize(source: str) -> list[SourceLine]:
    """Split VGDL text into non-blank, comment-free lines with indent depth."""
    lines = []
    style = None  # "\t" or " ", fixed by the first indented line
    for number, raw in enumerate(source.splitlines(), start=1):
        text = raw.split("#", 1)[0].rstrip()
        content = text.strip()
        if not content:
            continue
        lead = text[: len(text) - len(text.lstrip(" \t"))]
        if " " in lead and "\t" in lead:
            raise MixedIndentation(number)
        if lead:
            if style is None:
                style = lead[0]
            elif lead[0] != style:
                raise MixedIndentation(number)
        if lead.startswith(" "):
            if len(lead) % INDENT_WIDTH:
                raise UnevenIndentation(number, len(lead))
            indent = len(lead) // INDENT_WIDTH
        else:
            indent = len(lead)
        lines.append(SourceLine(number, indent, content))
    return lines


def parse_params(tokens: Iterable[str], line: int) -> dict[str, str]:
    params = {}
    for tok in tokens:
        key, sep, value = tok.partition("=")
        if not sep or not key or not value:
            raise MalformedLine(line, f"expected key=value, got {tok!r}")
        params[key] = value
    return params


def _split_rule(sl: SourceLine) -> tuple[list[str], list[str]]:
    if ">" not in sl.content:
        raise MalformedLine(sl.line_number, f"rule line lacks '>': {sl.content!r}")
    lhs, _, rhs = sl.content.partition(">")
    return lhs.split(), rhs.split()


def _parse_bool(value: str, line: int) -> bool:
    lowered = value.lower()
    if lowered == "true":
        return True
    if lowered == "false":
        return False
    raise MalformedLine(line, f"expected True or False, got {value!r}")


def _children(lines: Sequence[SourceLine], start: int, depth: int) -> tuple[list[int], int]:
    """Indices of the direct block under ``lines[start - 1]``, and the index after it."""
    block = []
    i = start
    while i < len(lines) and lines[i].indent > depth:
        block.append(i)
        i += 1
    return block, i


def _parse_sprites(lines: Sequence[SourceLine], depth: int) -> list[RawSprite]:
    raw: list[RawSprite] = []
    stack: list[tuple[int, str]] = []  # (indent, name)
    for sl in lines:
        if sl.indent <= depth:
            raise MalformedLine(sl.line_number, "sprite outside SpriteSet")
        while stack and stack[-1][0] >= sl.indent:
            stack.pop()
        expected = stack[-1][0] + 1 if stack else depth + 1
        if sl.indent != expected:
            raise MalformedLine(sl.line_number, "unexpected indentation in SpriteSet")
        lhs, rhs = _split_rule(sl)
        if len(lhs) != 1:
            raise MalformedLine(sl.line_number, "sprite line needs exactly one name")
        cls = None
        if rhs and "=" not in rhs[0]:
            cls, rhs = rhs[0], rhs[1:]
        raw.append(
            RawSprite(
                name=lhs[0],
                cls=cls,
                params=parse_params(rhs, sl.line_number),
                parent=stack[-1][1] if stack else None,
                line=sl.line_number,
            )
        )
        stack.append((sl.indent, lhs[0]))
    return raw


def _flat(lines: Sequence[SourceLine], depth: int, section: str) -> list[SourceLine]:
    for sl in lines:
        if sl.indent != depth + 1:
            raise MalformedLine(sl.line_number, f"unexpected nesting in {section}")
    return list(lines)


def _parse_interactions(lines: Sequence[SourceLine]) -> list[InteractionRule]:
    rules = []
    for sl in lines:
        lhs, rhs = _split_rule(sl)
        if len(lhs) < 2 or not rhs:
            raise MalformedLine(sl.line_number, "interaction needs two sprites and an effect")
        params = parse_params(rhs[1:], sl.line_number)
        if "scoreChange" in params:
            try:
                int(params["scoreChange"])
            except ValueError:
                raise MalformedLine(sl.line_number, "scoreChange must be an integer") from None
        # "a b c > e" is shorthand for "a b > e" and "a c > e".
        for obj in lhs[1:]:
            rules.append(InteractionRule(lhs[0], obj, rhs[0], dict(params), sl.line_number))
    return rules


def _parse_terminations(lines: Sequence[SourceLine]) -> list[TerminationRule]:
    rules = []
    for sl in lines:
        tokens = sl.content.split()
        if "=" in tokens[0] or ">" in tokens:
            raise MalformedLine(sl.line_number, "termination must start with a class name")
        params = parse_params(tokens[1:], sl.line_number)
        if "win" not in params:
            raise MalformedLine(sl.line_number, "termination lacks win=True/False")
        win = _parse_bool(params.pop("win"), sl.line_number)
        rules.append(TerminationRule(tokens[0], params, win, sl.line_number))
    return rules


def _parse_mapping(lines: Sequence[SourceLine]) -> dict[str, tuple[str, ...]]:
    mapping = {}
    for sl in lines:
        lhs, rhs = _split_rule(sl)
        if len(lhs) != 1 or len(lhs[0]) != 1 or not rhs:
            raise MalformedLine(sl.line_number, "level mapping must be '<char> > sprites'")
        mapping[lhs[0]] = tuple(rhs)
    return mapping


def parse(lines: Sequence[SourceLine]) -> GameDescription:
    """Build a GameDescription from tokenized lines."""
    if not lines:
        raise MissingSection("SpriteSet")
    root = lines[0]
    if root.indent != 0:
        raise MalformedLine(root.line_number, "first line must name the game class")
    root_tokens = root.content.split()
    game_params = parse_params(root_tokens[1:], root.line_number)

    sections: dict[str, list[SourceLine]] = {}
    i = 1
    while i < len(lines):
        head = lines[i]
        if head.indent != 1:
            raise MalformedLine(head.line_number, "expected a section header")
        name = head.content.split()[0]
        if name not in SECTIONS:
            raise MalformedLine(head.line_number, f"unknown section {name!r}")
        if name in sections:
            raise MalformedLine(head.line_number, f"section {name} repeated")
        block, i = _children(lines, i + 1, 1)
        sections[name] = [lines[j] for j in block]

    for name in REQUIRED_SECTIONS:
        if name not in sections:
            raise MissingSection(name)

    sprites = resolve_hierarchy(_parse_sprites(sections["SpriteSet"], 1))
    interactions = _parse_interactions(_flat(sections["InteractionSet"], 1, "InteractionSet"))
    terminations = _parse_terminations(_flat(sections["TerminationSet"], 1, "TerminationSet"))
    has_mapping = "LevelMapping" in sections
    mapping = _parse_mapping(_flat(sections.get("LevelMapping", []), 1, "LevelMapping"))

    avatars = [s.name for s in sprites if is_avatar_class(s.cls)]
    return GameDescription(
        game_class=root_tokens[0],
        sprites=tuple(sprites),
        level_mapping=mapping,
        interactions=tuple(interactions),
        terminations=tuple(terminations),
        avatar_name=avatars[0] if avatars else None,
        params=game_params,
        has_level_mapping=has_mapping,
    )


def resolve_hierarchy(raw: Sequence[RawSprite]) -> list[SpriteDef]:
    """Materialize inherited class and params; nearest ancestor wins."""
    by_name: dict[str, RawSprite] = {}
    for r in raw:
        if r.name in by_name:
            raise DuplicateSprite(r.name, r.line)
        by_name[r.name] = r

    def chain(name: str) -> list[RawSprite]:
        seen: list[str] = []
        out = []
        current: str | None = name
        while current is not None:
            if current in seen:
                raise CyclicHierarchy(seen[seen.index(current):] + [current])
            if current not in by_name:
                raise VGDLError(f"unknown parent sprite {current!r}", by_name[seen[-1]].line)
            seen.append(current)
            out.append(by_name[current])
            current = by_name[current].parent
        return out

    children: dict[str, list[str]] = {r.name: [] for r in raw}
    for r in raw:
        if r.parent is not None and r.parent in children:
            children[r.parent].append(r.name)

    resolved = []
    for r in raw:
        lineage = chain(r.name)
        params: dict[str, str] = {}
        cls = None
        for node in reversed(lineage):
            params.update(node.params)
            cls = node.cls or cls
        resolved.append(
            SpriteDef(r.name, cls, params, r.parent, tuple(children[r.name]), r.line)
        )
    return resolved


def parse_text(source: str) -> GameDescription:
    return parse(tokenize(source))


def validate(game: GameDescription) -> list[Diagnostic]:
    """Report problems that keep a game from being tutorial-generable."""
    diags: list[Diagnostic] = []

    def error(line, message):
        diags.append(Diagnostic("Error", line, message))

    def warning(line, message):
        diags.append(Diagnostic("Warning", line, message))

    referenced: set[str] = set()

    for rule in game.interactions:
        for ref in (rule.subject, rule.object):
            referenced.add(ref)
            if not game.resolves(ref):
                error(rule.line, f"unresolved sprite reference {ref!r}")
    for rule in game.terminations:
        for ref in rule.sprite_refs:
            referenced.add(ref)
            if not game.is_declared(ref):
                error(rule.line, f"unresolved sprite reference {ref!r}")
    for sprite in game.sprites:
        for key, ref in sprite.params.items():
            if _SPRITE_PARAM.match(key):
                referenced.add(ref)
                if not game.is_declared(ref):
                    error(sprite.line, f"unresolved sprite reference {ref!r}")
    for char, names in game.level_mapping.items():
        for ref in names:
            referenced.add(ref)
            if not game.is_declared(ref):
                error(None, f"unresolved sprite reference {ref!r} in level mapping {char!r}")

    if not any(t.win for t in game.terminations):
        error(None, "no winning termination")

    avatars = game.avatar_sprites()
    if not avatars:
        error(None, "no avatar sprite")
    for extra in avatars[1:]:
        warning(game.sprite(extra).line, f"extra avatar sprite {extra!r} ignored")

    if not game.has_level_mapping:
        warning(None, "no LevelMapping section")

    for sprite in game.sprites:
        family = {sprite.name, *game.ancestors(sprite.name), *game.descendants(sprite.name)}
        if not family & referenced:
            warning(sprite.line, f"sprite {sprite.name!r} is never referenced")

    return diags
