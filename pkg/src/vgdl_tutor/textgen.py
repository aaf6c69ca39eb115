"""Tutorial sentences from mechanics, via a fixed tutorial grammar.

Every sentence is one expansion of a grammar nonterminal. Words the
mechanic determines (verb, sprite, button) are copied from it; the remaining
free choices (helping verb, helping adjective, control verb) are drawn with a
seeded RNG. Seed 0 always takes the first, plainest alternative.

Raw expansions are then smoothed into readable English. Each smoothing
step can be undone, which is what :func:`check_membership` does before
parsing a sentence back against the grammar.
"""

from __future__ import annotations

import enum
import random
import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping, NamedTuple, Sequence

from .graph import Criticality, CriticalPathSet, MechanicGraph, NoWinPath, path_position
from .mechanics import (
    ACTION_VERBS,
    CANNOT_MOVE_PAST,
    Kind,
    Mechanic,
    acts_on_subject,
    display_name,
)
from .vgdl import EOS, GameDescription

GRAMMAR_BNF = """
<tutorial> ::= <win> <lose> <negative> <positive> <mechanics> <controls>
<win> ::= 'To win' <actionVerb> <helpingAdj> <sprite>
<lose> ::= 'To lose' <actionVerb> <helpingAdj> <sprite> | ε
<negative> ::= 'Avoid' <actionVerb> <sprite> <negative> | ε
<positive> ::= <actionVerb> <sprite> <positive> | ε
<mechanics> ::= <mech> <mechanics> | <mech>
<mech> ::= <sprite> <helpingVerb> <actionVerb> <helpingAdj> <sprite>
<controls> ::= <cont> <controls> | <cont>
<cont> ::= <controlVerb> <button> 'to' <actionVerb> <sprite>
<helpingAdj> ::= 'all' | 'every' | 'one' | 'some' | 'none' | ε
<helpingVerb> ::= 'can' | 'can not' | 'will' | 'will not' | ε
<actionVerb> ::= 'move' | 'shoot' | 'dodge' | 'kill' | 'destroy' | 'collide with' | 'beat' | 'lose' | 'win'
<controlVerb> ::= 'press' | 'hold' | 'release'
<button> ::= 'arrow keys' | 'left and right' | 'space bar'
"""

EOS_PHRASE = "the edge of the screen"
SECTION_ORDER = ("win", "lose", "negative", "positive", "mechanics", "controls")

Productions = Mapping[str, tuple[tuple[str, ...], ...]]


def parse_bnf(text: str) -> dict[str, tuple[tuple[str, ...], ...]]:
    """Read ``<a> ::= <b> 'word' | ε`` lines. Nonterminals keep their brackets."""
    rules: dict[str, tuple[tuple[str, ...], ...]] = {}
    for line in text.strip().splitlines():
        head, _, body = line.partition("::=")
        alts = []
        for alt in body.split("|"):
            symbols = re.findall(r"<\w+>|'[^']*'|ε", alt)
            alts.append(tuple(s.strip("'") for s in symbols if s != "ε"))
        rules[head.strip()] = tuple(alts)
    return rules


def _is_nonterminal(symbol: str) -> bool:
    return symbol.startswith("<") and symbol.endswith(">")


class MissingSlot(Exception):
    def __init__(self, form: "SentenceForm", slot: str):
        self.form = form
        self.slot = slot
        super().__init__(f"mechanic cannot fill <{slot}> of a {form.value} sentence")


class SentenceForm(str, enum.Enum):
    CONTROL = "Control"
    MECH = "Mech"
    WIN = "Win"
    LOSE = "Lose"
    POSITIVE = "Positive"
    NEGATIVE = "Negative"

    @property
    def nonterminal(self) -> str:
        return _FORM_NONTERMINALS[self]


_FORM_NONTERMINALS = {
    SentenceForm.CONTROL: "<cont>",
    SentenceForm.MECH: "<mech>",
    SentenceForm.WIN: "<win>",
    SentenceForm.LOSE: "<lose>",
    SentenceForm.POSITIVE: "<positive>",
    SentenceForm.NEGATIVE: "<negative>",
}


@dataclass(frozen=True)
class TutorialGrammar:
    productions: Productions
    sprite_names: Mapping[str, str] = field(default_factory=dict)
    avatar: str | None = None

    @property
    def sprite_terminals(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.sprite_names.values())))

    def terminals(self, nonterminal: str) -> tuple[str, ...]:
        return tuple(alt[0] if alt else "" for alt in self.productions[nonterminal])

    def alternatives(self, symbol: str) -> tuple[tuple[str, ...], ...]:
        if symbol == "<sprite>":
            return tuple((s,) for s in self.sprite_terminals)
        return self.productions[symbol]

    def display(self, sprite: str) -> str:
        if sprite in self.sprite_names:
            return self.sprite_names[sprite]
        if sprite == EOS:
            return EOS_PHRASE
        return display_name(sprite, self.avatar)

    def with_sprites(self, sprites: Sequence[str], avatar: str | None) -> "TutorialGrammar":
        names = {s: (EOS_PHRASE if s == EOS else display_name(s, avatar)) for s in sprites}
        names[EOS] = EOS_PHRASE
        return TutorialGrammar(self.productions, names, avatar)


BASE_GRAMMAR = TutorialGrammar(parse_bnf(GRAMMAR_BNF))


def grammar_for(game: GameDescription, base: TutorialGrammar = BASE_GRAMMAR) -> TutorialGrammar:
    return base.with_sprites([s.name for s in game.sprites], game.avatar_name)


# -- morphology --------------------------------------------------------------

_THIRD_PERSON = {
    "move": "moves", "shoot": "shoots", "dodge": "dodges", "kill": "kills",
    "destroy": "destroys", "collide with": "collides with", "beat": "beats",
    "lose": "loses", "win": "wins",
}
_GERUND = {
    "move": "moving", "shoot": "shooting", "dodge": "dodging", "kill": "killing",
    "destroy": "destroying", "collide with": "colliding with", "beat": "beating",
    "lose": "losing", "win": "winning",
}
_PLURAL_ADJ = ("all", "some")


def pluralize(phrase: str) -> str:
    head, _, last = phrase.rpartition(" ")
    if re.search(r"(s|sh|ch|x|z)$", last):
        last += "es"
    elif re.search(r"[^aeiou]y$", last):
        last = last[:-1] + "ies"
    else:
        last += "s"
    return f"{head} {last}".strip()


# -- form selection and realization -------------------------------------------

def select_form(mechanic: Mechanic, classification: Criticality | None) -> SentenceForm:
    if mechanic.kind is Kind.CONTROL:
        return SentenceForm.CONTROL
    if mechanic.kind is Kind.TERMINATION:
        return SentenceForm.WIN if mechanic.win else SentenceForm.LOSE
    if mechanic.autonomous:
        return SentenceForm.MECH
    if classification is Criticality.POSITIVE:
        return SentenceForm.POSITIVE
    if classification in (Criticality.NEGATIVE, Criticality.LOSS_CRITICAL):
        return SentenceForm.NEGATIVE
    return SentenceForm.MECH


class Slot(NamedTuple):
    name: str
    value: str
    free: bool = False


def _choose(options: Sequence[str], seed: int, mechanic: Mechanic, slot: str) -> str:
    if seed == 0 or len(options) == 1:
        return options[0]
    return random.Random(f"{seed}:{mechanic.id}:{slot}").choice(list(options))


def _player_action(m: Mechanic, avatar: str | None, form: SentenceForm) -> tuple[str, str]:
    """Verb and sprite describing what the player does for a scored rule."""
    if not m.sprites:
        raise MissingSlot(form, "sprite")
    if len(m.sprites) == 1:
        verb = m.action if m.action in ACTION_VERBS else "collide with"
        return verb, m.sprites[0]
    subject, obj = m.sprites[0], m.sprites[1]
    patient = subject if acts_on_subject(m.action) else obj
    active = m.action in ("destroy", "kill", "move", "shoot")
    if avatar in (subject, obj):
        other = obj if subject == avatar else subject
        if patient == avatar or not active:
            return "collide with", other
        return m.action, patient
    if active:
        return m.action, patient
    return "collide with", obj


def derive(mechanic: Mechanic, form: SentenceForm, grammar: TutorialGrammar, seed: int = 0) -> list[Slot]:
    """Expand ``form``'s nonterminal for ``mechanic`` into raw grammar words."""
    m = mechanic
    show = grammar.display
    if form is SentenceForm.CONTROL:
        if not m.buttons:
            raise MissingSlot(form, "button")
        if not m.sprites or m.action not in ACTION_VERBS:
            raise MissingSlot(form, "sprite" if not m.sprites else "actionVerb")
        return [
            Slot("controlVerb", _choose(("press", "hold"), seed, m, "controlVerb"), True),
            Slot("button", m.buttons[0]),
            Slot("to", "to"),
            Slot("actionVerb", m.action),
            Slot("sprite", show(m.sprites[-1])),
        ]
    if form is SentenceForm.MECH:
        if len(m.sprites) < 2:
            raise MissingSlot(form, "sprite")
        subject, obj = m.sprites[0], m.sprites[1]
        if m.action == CANNOT_MOVE_PAST:
            return [
                Slot("sprite", show(subject)),
                Slot("helpingVerb", "can not"),
                Slot("actionVerb", "move"),
                Slot("helpingAdj", ""),
                Slot("sprite", show(obj)),
            ]
        if m.action not in ACTION_VERBS:
            raise MissingSlot(form, "actionVerb")
        agent, patient = (obj, subject) if acts_on_subject(m.action) else (subject, obj)
        adjectives = ("",) if patient in (EOS, grammar.avatar) else ("", "one", "some")
        return [
            Slot("sprite", show(agent)),
            Slot("helpingVerb", _choose(("", "can", "will"), seed, m, "helpingVerb"), True),
            Slot("actionVerb", m.action),
            Slot("helpingAdj", _choose(adjectives, seed, m, "helpingAdj"), True),
            Slot("sprite", show(patient)),
        ]
    if form in (SentenceForm.WIN, SentenceForm.LOSE):
        if not m.sprites:
            raise MissingSlot(form, "sprite")
        counted = m.sprites[0]
        if counted == grammar.avatar:
            verb, adjective = "lose", ""
        else:
            verb, adjective = "destroy", "all" if not m.limit else "some"
        lead = "To win" if form is SentenceForm.WIN else "To lose"
        return [
            Slot(lead, lead),
            Slot("actionVerb", verb),
            Slot("helpingAdj", adjective),
            Slot("sprite", show(counted)),
        ]
    verb, sprite = _player_action(m, grammar.avatar, form)
    slots = [Slot("actionVerb", verb), Slot("sprite", show(sprite))]
    if form is SentenceForm.NEGATIVE:
        slots.insert(0, Slot("Avoid", "Avoid"))
    return slots


def _smooth(form: SentenceForm, slots: Sequence[Slot], cannot_pass: bool) -> str:
    words = [s.value for s in slots]
    names = [s.name for s in slots]
    if form is SentenceForm.MECH:
        verb_at = names.index("actionVerb")
        if cannot_pass:
            words[verb_at] += " past"
        elif words[names.index("helpingVerb")] == "":
            words[verb_at] = _THIRD_PERSON[words[verb_at]]
    if "helpingAdj" in names:
        adj_at = names.index("helpingAdj")
        if words[adj_at] in _PLURAL_ADJ:
            words[adj_at + 1] = pluralize(words[adj_at + 1])
    if form is SentenceForm.NEGATIVE:
        verb_at = names.index("actionVerb")
        words[verb_at] = _GERUND[words[verb_at]]
    text = " ".join(w for w in words if w)
    return text[:1].upper() + text[1:]


def realize(mechanic: Mechanic, form: SentenceForm, grammar: TutorialGrammar, seed: int = 0) -> str:
    slots = derive(mechanic, form, grammar, seed)
    cannot_pass = form is SentenceForm.MECH and mechanic.action == CANNOT_MOVE_PAST
    return _smooth(form, slots, cannot_pass)


# -- membership ----------------------------------------------------------------

def _unsmooth(sentence: str, grammar: TutorialGrammar) -> str:
    text = " ".join(sentence.lower().split())
    for base, gerund in _GERUND.items():
        if text.startswith(f"avoid {gerund} "):
            text = f"avoid {base} " + text[len(f"avoid {gerund} "):]
            break
    text = re.sub(r"\bcan not move past\b", "can not move", text)
    for base, conjugated in _THIRD_PERSON.items():
        text = re.sub(rf"\b{conjugated}\b", base, text)
    for name in sorted(grammar.sprite_terminals, key=len, reverse=True):
        plural = re.escape(pluralize(name.lower()))
        text = re.sub(rf"\b(all|every|some) {plural}\b", rf"\1 {name.lower()}", text)
    return text


def derives(grammar: TutorialGrammar, symbol: str, words: Sequence[str]) -> bool:
    """Whether ``symbol`` derives exactly the word sequence ``words``."""
    words = [w.lower() for w in words]
    memo: dict[tuple[str, int], frozenset[int]] = {}

    def ends(sym: str, start: int) -> frozenset[int]:
        key = (sym, start)
        if key in memo:
            return memo[key]
        memo[key] = frozenset()
        found: set[int] = set()
        for alt in grammar.alternatives(sym):
            positions = {start}
            for part in alt:
                nxt: set[int] = set()
                for p in positions:
                    if _is_nonterminal(part):
                        nxt |= ends(part, p)
                    else:
                        toks = part.lower().split()
                        if words[p:p + len(toks)] == toks:
                            nxt.add(p + len(toks))
                positions = nxt
                if not positions:
                    break
            found |= positions
        memo[key] = frozenset(found)
        return memo[key]

    return len(words) in ends(symbol, 0)


def check_membership(sentence: str, form: SentenceForm, grammar: TutorialGrammar) -> bool:
    return derives(grammar, form.nonterminal, _unsmooth(sentence, grammar).split())


# -- documents -----------------------------------------------------------------

class Sentence(NamedTuple):
    text: str
    mechanic_id: str


@dataclass(frozen=True)
class TutorialDocument:
    game_name: str
    seed: int
    sections: tuple[tuple[str, tuple[Sentence, ...]], ...]

    def section(self, name: str) -> tuple[Sentence, ...]:
        return dict(self.sections)[name]

    def sentences(self) -> Iterator[Sentence]:
        for _, items in self.sections:
            yield from items

    def to_text(self) -> str:
        blocks = [f"# tutorial: {self.game_name} (seed {self.seed})"]
        for name, items in self.sections:
            blocks.append("\n".join([f"# {name}"] + [s.text for s in items]))
        return "\n\n".join(blocks) + "\n"

    def to_dict(self) -> dict:
        return {
            "game": self.game_name,
            "seed": self.seed,
            "sections": {
                name: [{"text": s.text, "mechanic": s.mechanic_id} for s in items]
                for name, items in self.sections
            },
        }


_FORM_SECTIONS = {
    SentenceForm.LOSE: "lose",
    SentenceForm.NEGATIVE: "negative",
    SentenceForm.POSITIVE: "positive",
    SentenceForm.MECH: "mechanics",
    SentenceForm.CONTROL: "controls",
}


def generate_tutorial(
    graph: MechanicGraph,
    paths: CriticalPathSet,
    grammar: TutorialGrammar,
    seed: int = 0,
    include_optional: bool = False,
    game_name: str = "",
) -> TutorialDocument:
    if not paths.win_path:
        raise NoWinPath()
    picked: dict[str, list[tuple[str, SentenceForm]]] = {name: [] for name in SECTION_ORDER}
    picked["win"].append((paths.win_path[-1], SentenceForm.WIN))
    for node, m in graph.nodes.items():
        cls = graph.classification.get(node, Criticality.OPTIONAL)
        form = select_form(m, cls)
        if form is SentenceForm.WIN:
            continue
        if form is SentenceForm.MECH and cls is Criticality.OPTIONAL and not include_optional:
            continue
        picked[_FORM_SECTIONS[form]].append((node, form))

    def order(item: tuple[str, SentenceForm]) -> tuple[float, str]:
        pos = path_position(paths, item[0])
        return (float("inf") if pos is None else pos, item[0])

    sections = []
    for name in SECTION_ORDER:
        seen: set[str] = set()
        items = []
        for node, form in sorted(picked[name], key=order):
            try:
                text = realize(graph.nodes[node], form, grammar, seed)
            except MissingSlot:
                # Not expressible in the grammar, e.g. a Timeout has no sprite.
                continue
            if text not in seen:
                seen.add(text)
                items.append(Sentence(text, node))
        sections.append((name, tuple(items)))
    return TutorialDocument(game_name, seed, tuple(sections))
