"""
Text format for MECS and SMTS definitions.

    settings { step 1; clock_cap 6; timing urgent; }

    mecs S {
      alphabet get, grant, extra;
      initial 1;
      must 1 -> 2 : get;
      must 2 -> 1 : grant [get<=2];
      may 2 -> 3 : extra;
    }

    smts I {
      initial s;
      may s -> t : delta@[0,2];
      must s -> t : delta@[0,2];
      may s -> s : get;
    }

A must edge of a MECS implies a may edge with the same guard; an SMTS
lists its may transitions explicitly. ``#`` starts a comment.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional

from app.exceptions import ParseError, SemanticError
from app.models.labels import DELTA, Interval, TimedLabel
from app.models.lattice import Extended, format_extended
from app.models.mecs import ClockConstraint, Edge, IntervalValuation, Mecs
from app.models.smts import UNIVERSAL, Smts, State, state_key
from app.models.specfile import FileSettings, SpecFile
from app.services.refinement import check_consistency

_TOKENS = re.compile(r"""
    (?P<COMMENT>\#[^\n]*)
  | (?P<NEWLINE>\n)
  | (?P<SKIP>[ \t\r]+)
  | (?P<ARROW>->)
  | (?P<OP><=|>=|==)
  | (?P<RATIO>\d+/\d+)
  | (?P<WORD>[\w'′.]+)
  | (?P<PUNCT>[{};,:&@\[\]])
  | (?P<MISMATCH>.)
""", re.VERBOSE)

_IDENT = re.compile(r"^[\w'′.]+$")
_NUMBER = re.compile(r"^\d+(\.\d+)?$")


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    line: int
    column: int


def tokenize(text: str) -> Iterator[Token]:
    line, line_start = 1, 0
    for match in _TOKENS.finditer(text):
        kind = match.lastgroup
        column = match.start() - line_start + 1
        if kind == "NEWLINE":
            line += 1
            line_start = match.end()
        elif kind in ("SKIP", "COMMENT"):
            continue
        elif kind == "MISMATCH":
            raise ParseError(f"Unexpected character {match.group()!r}", line, column)
        else:
            yield Token(kind, match.group(), line, column)


class _Parser:
    def __init__(self, text: str) -> None:
        self.tokens = list(tokenize(text))
        self.pos = 0

    # token helpers

    def peek(self) -> Optional[Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self, expected: str) -> Token:
        token = self.peek()
        if token is None:
            last = self.tokens[-1] if self.tokens else Token("EOF", "", 1, 1)
            raise ParseError(f"Unexpected end of input, expected {expected}", last.line, last.column)
        self.pos += 1
        return token

    def expect(self, value: str) -> Token:
        token = self.next(repr(value))
        if token.value != value:
            raise ParseError(f"Expected {value!r}, found {token.value!r}", token.line, token.column)
        return token

    def accept(self, value: str) -> bool:
        token = self.peek()
        if token is not None and token.value == value:
            self.pos += 1
            return True
        return False

    def word(self, what: str) -> Token:
        token = self.next(what)
        if token.kind != "WORD":
            raise ParseError(f"Expected {what}, found {token.value!r}", token.line, token.column)
        return token

    def words(self, what: str) -> List[str]:
        names = [self.word(what).value]
        while self.accept(","):
            names.append(self.word(what).value)
        self.expect(";")
        return names

    def number(self, allow_inf: bool = False) -> Extended:
        token = self.next("a number")
        if allow_inf and token.value == "inf":
            return math.inf
        if token.kind == "RATIO" or (token.kind == "WORD" and _NUMBER.match(token.value)):
            return Fraction(token.value)
        raise ParseError(f"Expected a number, found {token.value!r}", token.line, token.column)

    def integer(self) -> int:
        token = self.peek()
        value = self.number()
        if Fraction(value).denominator != 1:
            raise ParseError(f"Expected an integer, found {value}", token.line, token.column)
        return int(value)

    # grammar

    def parse(self) -> SpecFile:
        spec = SpecFile()
        while self.peek() is not None:
            keyword = self.word("'mecs', 'smts' or 'settings'")
            if keyword.value == "settings":
                self._settings(spec.settings)
                continue
            if keyword.value not in ("mecs", "smts"):
                raise ParseError(f"Expected 'mecs', 'smts' or 'settings', found {keyword.value!r}",
                                 keyword.line, keyword.column)
            name = self.word("a system name")
            system = self._mecs(name) if keyword.value == "mecs" else self._smts(name)
            if name.value in spec.names:
                raise SemanticError(f"Duplicate system name {name.value!r}", name.line)
            spec.add(name.value, system)
        return spec

    def _settings(self, target: FileSettings) -> None:
        self.expect("{")
        while not self.accept("}"):
            key = self.word("a setting")
            if key.value in ("step", "lead_bound", "value_cap"):
                setattr(target, key.value, Fraction(self.number()))
            elif key.value == "clock_cap":
                target.clock_cap = self.integer()
            elif key.value in ("timing", "delay_mode"):
                value = self.word(key.value)
                allowed = ("standard", "urgent") if key.value == "timing" else ("point", "interval")
                if value.value not in allowed:
                    raise ParseError(f"{key.value} must be one of {', '.join(allowed)}",
                                     value.line, value.column)
                setattr(target, key.value, value.value)
            else:
                raise ParseError(f"Unknown setting {key.value!r}", key.line, key.column)
            self.expect(";")

    def _edge_head(self):
        source = self.word("a source").value
        self.expect("->")
        target = self.word("a target").value
        self.expect(":")
        return source, target

    def _mecs(self, name: Token) -> Mecs:
        self.expect("{")
        alphabet: Optional[List[str]] = None
        initial = None
        may, must, bad, universal = [], [], [], []
        while not self.accept("}"):
            keyword = self.word("a statement")
            if keyword.value == "alphabet":
                alphabet = self.words("an action")
            elif keyword.value == "initial":
                initial = self.words("a location")[0]
            elif keyword.value in ("may", "must"):
                source, target = self._edge_head()
                action = self.word("an action")
                guard = self._guard() if self.accept("[") else ClockConstraint.true()
                self.expect(";")
                edges = must if keyword.value == "must" else may
                edges.append((Edge(source, action.value, guard, target), action.line))
            elif keyword.value == "bad":
                bad.extend(self.words("a location"))
            elif keyword.value == "universal":
                universal.extend(self.words("a location"))
            else:
                raise ParseError(f"Unknown statement {keyword.value!r}", keyword.line, keyword.column)

        if initial is None:
            raise SemanticError(f"MECS {name.value} has no initial location", name.line)
        declared = set(alphabet) if alphabet is not None else {e.action for e, _ in may + must}
        if DELTA in declared:
            raise SemanticError(f"{DELTA!r} is reserved for delays", name.line)
        for edge, line in may + must:
            if edge.action not in declared:
                raise SemanticError(f"Action {edge.action!r} is not in the alphabet", line)
            unknown = edge.guard.clocks - declared
            if unknown:
                raise SemanticError(f"Unknown clock {sorted(unknown)[0]!r}", line)
        return Mecs.build(initial, [e for e, _ in may], [e for e, _ in must], declared,
                          bad=bad, universal=universal)

    def _guard(self) -> ClockConstraint:
        token = self.peek()
        if token is not None and token.value == "true":
            self.pos += 1
            self.expect("]")
            return ClockConstraint.true()
        bounds = []
        while True:
            clock = self.word("a clock")
            op = self.next("a comparison")
            if op.kind != "OP":
                raise ParseError(f"Expected <=, >= or ==, found {op.value!r}", op.line, op.column)
            value = self.integer()
            interval = {"<=": Interval(0, value), ">=": Interval(value, math.inf),
                        "==": Interval(value, value)}[op.value]
            bounds.append((clock.value, interval))
            if not self.accept("&"):
                break
        self.expect("]")
        try:
            return ClockConstraint(tuple(bounds))
        except SemanticError as exc:
            raise SemanticError(exc.message, clock.line) from exc

    def _smts(self, name: Token) -> Smts:
        self.expect("{")
        alphabet: Optional[List[str]] = None
        initial = None
        may, must = [], []
        while not self.accept("}"):
            keyword = self.word("a statement")
            if keyword.value == "alphabet":
                alphabet = self.words("an action")
            elif keyword.value == "initial":
                initial = self.words("a state")[0]
            elif keyword.value in ("may", "must"):
                source, target = self._edge_head()
                label = self._label()
                self.expect(";")
                (must if keyword.value == "must" else may).append((source, label, target))
            else:
                raise ParseError(f"Unknown statement {keyword.value!r}", keyword.line, keyword.column)

        if initial is None:
            raise SemanticError(f"SMTS {name.value} has no initial state", name.line)
        if alphabet is not None and DELTA in alphabet:
            raise SemanticError(f"{DELTA!r} is reserved for delays", name.line)
        used = {label.action for _, label, _ in may + must if not label.is_delay}
        if alphabet is not None and used - set(alphabet):
            raise SemanticError(f"SMTS {name.value} uses actions outside its alphabet", name.line)
        system = Smts.build(initial, may, must, alphabet=alphabet)
        violations = check_consistency(system)
        if violations:
            t = violations[0]
            raise SemanticError(f"Must transition {t.source} -> {t.target} : {t.label} "
                                f"has no covering may transition", name.line)
        return system

    def _label(self) -> TimedLabel:
        action = self.word("an action")
        if self.accept("@"):
            self.expect("[")
            lo = self.number()
            self.expect(",")
            hi = self.number(allow_inf=True)
            self.expect("]")
            if lo > hi:
                raise ParseError(f"Empty window [{lo},{hi}]", action.line, action.column)
            window = Interval(lo, hi)
        elif action.value == DELTA:
            raise ParseError("Delays need a window, as in delta@[0,2]", action.line, action.column)
        else:
            window = Interval(0, 0)
        if action.value != DELTA and window != Interval(0, 0):
            raise SemanticError(f"Action {action.value!r} must carry the window [0,0]", action.line)
        return TimedLabel(action.value, window)


def parse_spec(text: str) -> SpecFile:
    """Parse a specification file; raises ParseError or SemanticError."""
    return _Parser(text).parse()


# Printing

def _sanitize(text: str) -> str:
    cleaned = re.sub(r"[^\w'′.]", "_", text)
    return cleaned or "_"


def _ident(state) -> str:
    if state is UNIVERSAL:
        return "univ"
    if isinstance(state, str):
        return _sanitize(state)
    if isinstance(state, tuple):
        return "_".join(_ident(part) for part in state) or "_"
    if isinstance(state, IntervalValuation):
        return _sanitize(str(state)) if state.clocks else "v"
    return _sanitize(str(state))


def state_names(states: Iterable[State]) -> Dict[State, str]:
    """Unique printable identifiers, stable across runs."""
    names: Dict[State, str] = {}
    taken = set()
    for state in sorted(states, key=state_key):
        base = _ident(state)
        name, suffix = base, 2
        while name in taken:
            name = f"{base}__{suffix}"
            suffix += 1
        taken.add(name)
        names[state] = name
    return names


def format_label(label: TimedLabel) -> str:
    if label.action != DELTA and label.window == Interval(0, 0):
        return label.action
    return f"{label.action}@[{format_extended(label.window.lo)},{format_extended(label.window.hi)}]"


def format_guard(guard: ClockConstraint) -> str:
    return "" if guard.is_true else f" [{guard}]"


def format_mecs(name: str, mecs: Mecs) -> str:
    names = state_names(mecs.locations)
    lines = [f"mecs {name} {{"]
    if mecs.alphabet:
        lines.append(f"  alphabet {', '.join(sorted(mecs.alphabet))};")
    lines.append(f"  initial {names[mecs.initial]};")

    def edge_line(kind: str, e: Edge) -> str:
        return f"  {kind} {names[e.source]} -> {names[e.target]} : {e.action}{format_guard(e.guard)};"

    def order(e: Edge):
        return names[e.source], e.action, str(e.guard), names[e.target]

    lines.extend(edge_line("must", e) for e in sorted(mecs.must, key=order))
    lines.extend(edge_line("may", e) for e in sorted(mecs.may - mecs.must, key=order))
    if mecs.bad:
        lines.append(f"  bad {', '.join(sorted(names[q] for q in mecs.bad))};")
    if mecs.universal:
        lines.append(f"  universal {', '.join(sorted(names[q] for q in mecs.universal))};")
    lines.append("}")
    return "\n".join(lines)


def format_smts(name: str, smts: Smts) -> str:
    names = state_names(smts.states)
    lines = [f"smts {name} {{"]
    if smts.alphabet:
        lines.append(f"  alphabet {', '.join(sorted(smts.alphabet))};")
    lines.append(f"  initial {names[smts.initial]};")
    for kind, transitions in (("must", smts.must), ("may", smts.may)):
        for t in sorted(transitions, key=lambda t: (names[t.source], t.label, names[t.target])):
            lines.append(f"  {kind} {names[t.source]} -> {names[t.target]} : {format_label(t.label)};")
    lines.append("}")
    return "\n".join(lines)


def format_settings(settings: FileSettings) -> str:
    lines = ["settings {"]
    for key, value in vars(settings).items():
        if value is None:
            continue
        text = format_extended(value) if isinstance(value, (Fraction, int)) else str(value)
        lines.append(f"  {key} {text};")
    lines.append("}")
    return "\n".join(lines)


def format_spec(spec: SpecFile) -> str:
    blocks = []
    if not spec.settings.is_empty():
        blocks.append(format_settings(spec.settings))
    blocks.extend(format_mecs(name, mecs) for name, mecs in spec.mecs.items())
    blocks.extend(format_smts(name, smts) for name, smts in spec.smts.items())
    return "\n\n".join(blocks) + ("\n" if blocks else "")
