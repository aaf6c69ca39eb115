"""Static discovery of teachable mechanics from a parsed game.

Three sources feed the mechanic list: the avatar class (controls), the
InteractionSet (one mechanic per rule) and the TerminationSet (one mechanic
per rule). Sprites that fire projectiles on their own (``Bomber`` and
friends) add one autonomous "shoot" mechanic each.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .vgdl import EOS, GameDescription, InteractionRule, TerminationRule

ACTION_VERBS = (
    "move", "shoot", "dodge", "kill", "destroy", "collide with", "beat", "lose", "win",
)
CANNOT_MOVE_PAST = "cannot-move-past"
EFFECT_TAGS = ACTION_VERBS + (CANNOT_MOVE_PAST,)

ARROW_KEYS = "arrow keys"
LEFT_RIGHT = "left and right"
SPACE_BAR = "space bar"


class Kind(str, enum.Enum):
    CONTROL = "Control"
    INTERACTION = "Interaction"
    TERMINATION = "Termination"


class Movement(str, enum.Enum):
    HORIZONTAL = "Horizontal"
    VERTICAL = "Vertical"
    FOUR_WAY = "FourWay"
    NONE = "None"


class UnknownAvatarClass(Exception):
    def __init__(self, cls: str | None):
        self.cls = cls
        super().__init__(f"no capability entry for avatar class {cls!r}")


@dataclass(frozen=True)
class AvatarCapability:
    cls: str
    movement: Movement
    can_shoot: bool
    shoot_button: str | None = None

    def __post_init__(self):
        if self.can_shoot and self.shoot_button is None:
            object.__setattr__(self, "shoot_button", SPACE_BAR)


@dataclass(frozen=True)
class Mechanic:
    id: str
    kind: Kind
    sprites: tuple[str, ...]
    action: str
    effect: str
    source: str
    label: str
    buttons: tuple[str, ...] = ()
    score_delta: int | None = None
    win: bool | None = None
    limit: int | None = None
    # Chain semantics used by the graph: sprites brought into play / removed.
    spawns: tuple[str, ...] = ()
    destroys: tuple[str, ...] = ()
    autonomous: bool = False
    movement: Movement | None = None


def _caps(*entries: AvatarCapability) -> dict[str, AvatarCapability]:
    return {c.cls: c for c in entries}


AVATAR_CAPABILITIES = _caps(
    AvatarCapability("FlakAvatar", Movement.HORIZONTAL, True),
    AvatarCapability("HorizontalAvatar", Movement.HORIZONTAL, False),
    AvatarCapability("VerticalAvatar", Movement.VERTICAL, False),
    AvatarCapability("MovingAvatar", Movement.FOUR_WAY, False),
    AvatarCapability("ShootAvatar", Movement.FOUR_WAY, True),
    AvatarCapability("OrientedAvatar", Movement.FOUR_WAY, False),
)

EFFECT_VERBS = {
    "stepBack": CANNOT_MOVE_PAST,
    "killSprite": "destroy",
    "killBoth": "destroy",
    "transformTo": "collide with",
    "bounceForward": "move",
    "pullWithIt": "move",
}
DEFAULT_EFFECT_VERB = "collide with"

# Sprite classes that fire their ``stype`` sprite without player input.
EMITTER_VERBS = {
    "Bomber": "shoot",
    "RandomBomber": "shoot",
    "BomberRandomMissile": "shoot",
}


@dataclass(frozen=True)
class Tables:
    avatars: Mapping[str, AvatarCapability] = field(
        default_factory=lambda: dict(AVATAR_CAPABILITIES)
    )
    effects: Mapping[str, str] = field(default_factory=lambda: dict(EFFECT_VERBS))
    emitters: Mapping[str, str] = field(default_factory=lambda: dict(EMITTER_VERBS))


DEFAULT_TABLES = Tables()


def _parse_capability(cls: str, value: str, lineno: int) -> AvatarCapability:
    parts = [p.strip() for p in value.split(",") if p.strip()]
    try:
        movement = Movement(parts[0])
    except (IndexError, ValueError):
        raise ValueError(f"line {lineno}: bad movement kind in {value!r}") from None
    extras = parts[1:]
    if any(p != "shoot" for p in extras):
        raise ValueError(f"line {lineno}: unknown capability in {value!r}")
    return AvatarCapability(cls, movement, bool(extras))


def parse_tables(text: str, base: Tables = DEFAULT_TABLES) -> Tables:
    """Overlay ``key: value`` entries on ``base``.

    ``Class: Movement[,shoot]`` lines update the avatar table and
    ``effect: verb`` lines the effect table; which one is meant is read off
    the value. Emitter classes need an explicit ``[emitters]`` header.
    """
    avatars = dict(base.avatars)
    effects = dict(base.effects)
    emitters = dict(base.emitters)
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in ("avatars", "effects", "emitters"):
                raise ValueError(f"line {lineno}: unknown section [{section}]")
            continue
        parts = re.split(r"\s*[:=]\s*", line, maxsplit=1)
        key, value = (parts + [""])[:2]
        if len(parts) != 2 or not key or not value:
            raise ValueError(f"line {lineno}: expected 'key: value', got {raw!r}")
        kind = section
        if kind is None:
            head = value.split(",")[0].strip()
            kind = "avatars" if head in Movement._value2member_map_ else "effects"
        if kind == "avatars":
            avatars[key] = _parse_capability(key, value, lineno)
        elif kind == "effects":
            if value not in EFFECT_TAGS:
                raise ValueError(f"line {lineno}: {value!r} is not an action verb")
            effects[key] = value
        else:
            if value not in ACTION_VERBS:
                raise ValueError(f"line {lineno}: {value!r} is not an action verb")
            emitters[key] = value
    return Tables(avatars, effects, emitters)


def load_tables(path: str | Path) -> Tables:
    return parse_tables(Path(path).read_text(encoding="utf-8"))


_CAMEL = re.compile(r"(?<=[a-z0-9])(?=[A-Z])|_+")


def display_name(sprite: str, avatar: str | None = None) -> str:
    """Human-readable sprite name: the avatar is "player", alienMissile -> "alien missile"."""
    if sprite == avatar:
        return "player"
    if sprite == EOS:
        return EOS
    return " ".join(_CAMEL.sub(" ", sprite).lower().split())


_MOVE_WORDS = {
    Movement.HORIZONTAL: " left and right",
    Movement.VERTICAL: " up and down",
    Movement.FOUR_WAY: "",
}


def discover_controls(game: GameDescription, tables: Tables = DEFAULT_TABLES) -> list[Mechanic]:
    avatar = game.avatar_name
    if avatar is None:
        raise UnknownAvatarClass(None)
    cls = game.sprite(avatar).cls
    cap = tables.avatars.get(cls)
    if cap is None:
        raise UnknownAvatarClass(cls)
    source = f"avatar class {cls}"
    out = []
    if cap.movement is not Movement.NONE:
        buttons = (ARROW_KEYS, LEFT_RIGHT) if cap.movement is Movement.HORIZONTAL else (ARROW_KEYS,)
        out.append(
            Mechanic(
                id="control:move",
                kind=Kind.CONTROL,
                sprites=(avatar,),
                action="move",
                effect=cls,
                source=source,
                label=f"player can move{_MOVE_WORDS[cap.movement]} (using arrow keys)",
                buttons=buttons,
                movement=cap.movement,
            )
        )
    if cap.can_shoot:
        projectile = game.sprite(avatar).params.get("stype")
        if projectile is None:
            raise ValueError(f"avatar {avatar!r} of class {cls} names no projectile (stype)")
        out.append(
            Mechanic(
                id="control:shoot",
                kind=Kind.CONTROL,
                sprites=(avatar, projectile),
                action="shoot",
                effect=cls,
                source=source,
                label=f"player can shoot {display_name(projectile)} (using {cap.shoot_button})",
                buttons=(cap.shoot_button,),
                spawns=(projectile,),
            )
        )
    return out


def discover_emitters(game: GameDescription, tables: Tables = DEFAULT_TABLES) -> list[Mechanic]:
    """One autonomous mechanic per sprite whose class fires its stype on its own.

    Subtypes that merely inherit the class and projectile from an emitting
    parent are covered by the parent's mechanic.
    """
    out = []
    for sprite in game.sprites:
        verb = tables.emitters.get(sprite.cls)
        target = sprite.params.get("stype")
        if verb is None or target is None:
            continue
        if sprite.parent is not None:
            parent = game.sprite(sprite.parent)
            if parent.cls == sprite.cls and parent.params.get("stype") == target:
                continue
        out.append(
            Mechanic(
                id=f"emit:{sprite.name}",
                kind=Kind.INTERACTION,
                sprites=(sprite.name, target),
                action=verb,
                effect=sprite.cls,
                source=f"sprite {sprite.name} > {sprite.cls}",
                label=f"{display_name(sprite.name, game.avatar_name)} {_third_person(verb)} "
                f"{display_name(target, game.avatar_name)}",
                spawns=(target,),
                autonomous=True,
            )
        )
    return out


def _destroyed(rule: InteractionRule) -> tuple[str, ...]:
    if rule.effect == "killBoth":
        return (rule.subject, rule.object)
    if rule.effect in ("killSprite", "transformTo") or rule.effect.startswith("killIf"):
        return (rule.subject,)
    return ()


def _third_person(verb: str) -> str:
    head, _, rest = verb.partition(" ")
    head = head + "es" if head.endswith(("s", "sh", "ch", "x", "z", "o")) else head + "s"
    return f"{head} {rest}".strip()


def acts_on_subject(action: str) -> bool:
    """True when a rule's object does the acting (``a b > killSprite``: b destroys a)."""
    return action in ("destroy", "kill", "move")


def _interaction_label(subject: str, obj: str, action: str) -> str:
    if action == CANNOT_MOVE_PAST:
        return f"{subject} can not move past {obj}"
    if acts_on_subject(action):
        return f"{obj} {_third_person(action)} {subject}"
    return f"{subject} {_third_person(action)} {obj}"


def discover_interactions(
    game: GameDescription, tables: Tables = DEFAULT_TABLES
) -> list[Mechanic]:
    avatar = game.avatar_name
    out = []
    for i, rule in enumerate(game.interactions):
        action = tables.effects.get(rule.effect, DEFAULT_EFFECT_VERB)
        destroys = _destroyed(rule)
        if action == "destroy" and avatar is not None and rule.subject == avatar and destroys:
            action = "kill"
        label = _interaction_label(
            display_name(rule.subject, avatar), display_name(rule.object, avatar), action
        )
        out.append(
            Mechanic(
                id=f"rule:{i:03d}",
                kind=Kind.INTERACTION,
                sprites=(rule.subject, rule.object),
                action=action,
                effect=rule.effect,
                source=_rule_source(rule),
                label=label,
                score_delta=rule.score_change,
                destroys=destroys,
            )
        )
    return out


def _rule_source(rule: InteractionRule) -> str:
    text = f"{rule.subject} {rule.object} > {rule.effect}"
    extra = " ".join(f"{k}={v}" for k, v in rule.params.items())
    return f"{text} {extra}".strip()


def _termination_label(rule: TerminationRule, sprites: tuple[str, ...], avatar: str | None) -> str:
    outcome = "win" if rule.win else "lose"
    if not sprites:
        return f"{outcome} on {rule.cls}"
    names = " and ".join(display_name(s, avatar) for s in sprites)
    limit = rule.params.get("limit", "0")
    return f"{outcome} when {names} count reaches {limit}"


def discover_terminations(
    game: GameDescription, tables: Tables = DEFAULT_TABLES
) -> list[Mechanic]:
    out = []
    for i, rule in enumerate(game.terminations):
        sprites = rule.sprite_refs
        try:
            limit = int(rule.params["limit"]) if "limit" in rule.params else None
        except ValueError:
            limit = None
        params = " ".join(f"{k}={v}" for k, v in rule.params.items())
        out.append(
            Mechanic(
                id=f"term:{i:03d}",
                kind=Kind.TERMINATION,
                sprites=sprites,
                action="win" if rule.win else "lose",
                effect=rule.cls,
                source=f"{rule.cls} {params} win={rule.win}".replace("  ", " "),
                label=_termination_label(rule, sprites, game.avatar_name),
                win=rule.win,
                limit=limit,
            )
        )
    return out


def discover_mechanics(game: GameDescription, tables: Tables = DEFAULT_TABLES) -> list[Mechanic]:
    """Controls, emitters, interactions, terminations, in that order."""
    return (
        discover_controls(game, tables)
        + discover_emitters(game, tables)
        + discover_interactions(game, tables)
        + discover_terminations(game, tables)
    )
