"""
Events, events sequences and the strict-offset containment relation.

An event is one cognitive cycle: the broadcast coalition, up to four signed
emotional valences and optionally the behavior executed in that cycle.
Containment requires item inclusion per event *and* identical timestamp
offsets relative to the first matched event.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple, Optional, Union

from .errors import EmptyDatabase, EmptySequence, InvalidEvent, InvalidSequence


class EmotionKind(IntEnum):
    HIGH_THREAT = 1
    MEDIUM_FEAR = 2
    LOW_THREAT = 3
    COMPASSION = 4

    @property
    def label(self) -> str:
        return f"e{self.value}"

    @classmethod
    def from_label(cls, label: str) -> "EmotionKind":
        m = re.fullmatch(r"e([1-4])", label)
        if m is None:
            raise InvalidEvent(f"unknown emotion key {label!r} (expected e1..e4)")
        return cls(int(m.group(1)))


# Symbol ranks fix the canonical item order inside an event:
# coalition first, then emotions by kind code, then behavior.
_COALITION, _EMOTION, _BEHAVIOR = 0, 1, 2


@dataclass(frozen=True)
class CoalitionItem:
    id: str

    @property
    def symbol(self) -> tuple:
        return (_COALITION, self.id)

    def __str__(self):
        return self.id


@dataclass(frozen=True)
class EmotionItem:
    kind: EmotionKind
    value: float

    def __post_init__(self):
        object.__setattr__(self, "kind", EmotionKind(self.kind))
        if not -1.0 <= self.value <= 1.0:
            raise InvalidEvent(f"emotion value {self.value} outside [-1, 1]")

    @property
    def symbol(self) -> tuple:
        return (_EMOTION, self.kind.label)

    def __str__(self):
        return f"{self.kind.label}{{{self.value:g}}}"


@dataclass(frozen=True)
class BehaviorItem:
    id: str

    @property
    def symbol(self) -> tuple:
        return (_BEHAVIOR, self.id)

    def __str__(self):
        return self.id


Item = Union[CoalitionItem, EmotionItem, BehaviorItem]


def item_matches(a: Item, b: Item) -> bool:
    """Coalitions and behaviors match by id; emotions by kind only."""
    return a.symbol == b.symbol


def item_from_symbol(symbol: tuple, value: float = 0.0) -> Item:
    rank, name = symbol
    if rank == _COALITION:
        return CoalitionItem(name)
    if rank == _BEHAVIOR:
        return BehaviorItem(name)
    return EmotionItem(EmotionKind.from_label(name), value)


@dataclass(frozen=True)
class Event:
    """One cognitive cycle. Items are kept sorted in canonical symbol order."""

    t: int
    items: tuple

    def __post_init__(self):
        if not isinstance(self.t, int) or isinstance(self.t, bool) or self.t < 0:
            raise InvalidEvent(f"timestamp must be a non-negative integer, got {self.t!r}")
        items = tuple(sorted(self.items, key=lambda it: it.symbol))
        if not items:
            raise InvalidEvent("an event needs at least one item")
        symbols = [it.symbol for it in items]
        if len(set(symbols)) != len(symbols):
            raise InvalidEvent(f"duplicate item in event at t={self.t}")
        if sum(1 for s in symbols if s[0] == _COALITION) > 1:
            raise InvalidEvent(f"more than one coalition in event at t={self.t}")
        if sum(1 for s in symbols if s[0] == _BEHAVIOR) > 1:
            raise InvalidEvent(f"more than one behavior in event at t={self.t}")
        object.__setattr__(self, "items", items)

    @classmethod
    def make(cls, t: int, coalition: Optional[str] = None,
             emotions: Optional[dict] = None, behavior: Optional[str] = None) -> "Event":
        items = []
        if coalition is not None:
            items.append(CoalitionItem(coalition))
        for kind, value in (emotions or {}).items():
            if isinstance(kind, str):
                kind = EmotionKind.from_label(kind)
            items.append(EmotionItem(kind, value))
        if behavior is not None:
            items.append(BehaviorItem(behavior))
        return cls(t, tuple(items))

    @property
    def coalition(self) -> Optional[str]:
        for it in self.items:
            if isinstance(it, CoalitionItem):
                return it.id
        return None

    @property
    def behavior(self) -> Optional[str]:
        for it in self.items:
            if isinstance(it, BehaviorItem):
                return it.id
        return None

    @property
    def emotions(self) -> dict:
        return {it.kind: it.value for it in self.items if isinstance(it, EmotionItem)}

    @property
    def symbols(self) -> frozenset:
        return frozenset(it.symbol for it in self.items)

    def shifted(self, dt: int) -> "Event":
        return Event(self.t + dt, self.items)

    def __str__(self):
        return f"({self.t}, {' '.join(str(it) for it in self.items)})"


@dataclass(frozen=True)
class EventsSequence:
    id: str
    events: tuple

    def __post_init__(self):
        events = tuple(self.events)
        for prev, cur in zip(events, events[1:]):
            if cur.t <= prev.t:
                raise InvalidSequence(
                    f"sequence {self.id}: timestamps must strictly increase ({prev.t} -> {cur.t})")
        object.__setattr__(self, "events", events)

    def __len__(self):
        return len(self.events)

    def __iter__(self) -> Iterator[Event]:
        return iter(self.events)

    def __getitem__(self, idx):
        return self.events[idx]

    @property
    def timestamps(self) -> tuple:
        return tuple(e.t for e in self.events)

    @property
    def span(self) -> int:
        if not self.events:
            return 0
        return self.events[-1].t - self.events[0].t

    @property
    def item_count(self) -> int:
        return sum(len(e.items) for e in self.events)

    def skeleton(self) -> tuple:
        """Value-blind canonical key: ((offset, symbols), ...) relative to the first event."""
        if not self.events:
            return ()
        t0 = self.events[0].t
        return tuple((e.t - t0, tuple(it.symbol for it in e.items)) for e in self.events)

    def __str__(self):
        return "<" + ", ".join(str(e) for e in self.events) + ">"


class ContainmentResult(NamedTuple):
    found: bool
    indices: tuple = ()

    def __bool__(self):
        return self.found


def _event_included(a: Event, b: Event) -> bool:
    return all(any(item_matches(x, y) for y in b.items) for x in a.items)


def contains(sa: EventsSequence, sb: EventsSequence) -> ContainmentResult:
    """Is `sa` contained in `sb` with its timestamp offsets preserved?

    Returns the earliest occurrence (smallest matched indices) when found.
    An empty `sa` is trivially contained.
    """
    if len(sa) == 0:
        return ContainmentResult(True, ())
    offsets = [e.t - sa[0].t for e in sa]
    position = {e.t: k for k, e in enumerate(sb)}
    for k1, anchor in enumerate(sb):
        indices = []
        for off, a_event in zip(offsets, sa):
            k = position.get(anchor.t + off)
            if k is None or not _event_included(a_event, sb[k]):
                break
            indices.append(k)
        else:
            assert indices[0] == k1
            return ContainmentResult(True, tuple(indices))
    return ContainmentResult(False, ())


class Support(NamedTuple):
    """Exact relative support; `count` sequences out of `total`."""

    count: int
    total: int

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.count, self.total)

    def __float__(self):
        return self.count / self.total

    def at_least(self, minsup: Fraction) -> bool:
        return self.count * minsup.denominator >= minsup.numerator * self.total

    def percent(self) -> str:
        return f"{100 * self.count // self.total} %"


def support(sa: EventsSequence, db) -> Support:
    sequences = db.sequences if isinstance(db, SequenceDatabase) else tuple(db)
    if not sequences:
        raise EmptyDatabase("empty database")
    count = sum(1 for sb in sequences if contains(sa, sb))
    return Support(count, len(sequences))


def normalize(sa: EventsSequence) -> EventsSequence:
    if len(sa) == 0:
        raise EmptySequence(f"cannot normalize empty sequence {sa.id!r}")
    t0 = sa[0].t
    if t0 == 0:
        return sa
    return EventsSequence(sa.id, tuple(e.shifted(-t0) for e in sa))


class SequenceDatabase:
    """Append-only store of recorded sequences.

    `sequences` returns an immutable snapshot; later appends never alter it.
    """

    def __init__(self, sequences: Iterable[EventsSequence] = ()):
        self._sequences: list = []
        self._ids: set = set()
        self.next_sequence_id = 1
        for s in sequences:
            self.append(s)

    def new_id(self) -> str:
        while f"S{self.next_sequence_id}" in self._ids:
            self.next_sequence_id += 1
        sid = f"S{self.next_sequence_id}"
        self.next_sequence_id += 1
        return sid

    def append(self, seq: EventsSequence) -> None:
        if seq.id in self._ids:
            raise InvalidSequence(f"duplicate sequence id {seq.id!r}")
        self._sequences.append(seq)
        self._ids.add(seq.id)

    @property
    def sequences(self) -> tuple:
        return tuple(self._sequences)

    def __len__(self):
        return len(self._sequences)

    def __iter__(self):
        return iter(self.sequences)


@dataclass(frozen=True)
class TimeConstraints:
    """Bounds on the head-to-tail span and on gaps between adjacent events.

    `None` means unbounded. `min_events` is an optional extra knob on the
    number of events.
    """

    min_span: int = 0
    max_span: Optional[int] = None
    min_gap: int = 1
    max_gap: Optional[int] = None
    min_events: int = 1

    def __post_init__(self):
        if self.min_span < 0:
            raise ValueError("min_span must be >= 0")
        if self.min_gap < 1:
            raise ValueError("min_gap must be >= 1")
        if self.max_span is not None and self.max_span < self.min_span:
            raise ValueError("min_span must not exceed max_span")
        if self.max_gap is not None and self.max_gap < self.min_gap:
            raise ValueError("min_gap must not exceed max_gap")
        if self.min_events < 1:
            raise ValueError("min_events must be >= 1")

    @classmethod
    def benchmark(cls) -> "TimeConstraints":
        """Span in [2, 9] cycles, at most 2 cycles between adjacent events."""
        return cls(min_span=2, max_span=9, min_gap=1, max_gap=2)

    def to_dict(self) -> dict:
        return {"min_span": self.min_span, "max_span": self.max_span,
                "min_gap": self.min_gap, "max_gap": self.max_gap,
                "min_events": self.min_events}


# -- JSON lines ---------------------------------------------------------------

_SEQ_KEYS = {"id", "events"}
_EVENT_KEYS = {"t", "coalition", "emotions", "behavior"}


def event_to_dict(e: Event) -> dict:
    d = {"t": e.t}
    if e.coalition is not None:
        d["coalition"] = e.coalition
    emotions = e.emotions
    if emotions:
        d["emotions"] = {k.label: v for k, v in sorted(emotions.items())}
    if e.behavior is not None:
        d["behavior"] = e.behavior
    return d


def event_from_dict(d: dict, keep_zero: bool = False) -> Event:
    """Parse one event object.

    Zero-valued emotions are dropped unless `keep_zero`, so that a recorded
    zero and an omitted emotion behave the same under matching.
    """
    if not isinstance(d, dict):
        raise InvalidEvent(f"event must be an object, got {type(d).__name__}")
    unknown = set(d) - _EVENT_KEYS
    if unknown:
        raise InvalidEvent(f"unknown event field(s): {sorted(unknown)}")
    if "t" not in d:
        raise InvalidEvent("event is missing 't'")
    emotions = d.get("emotions") or {}
    if not isinstance(emotions, dict):
        raise InvalidEvent("'emotions' must be an object")
    parsed = {}
    for key, value in emotions.items():
        kind = EmotionKind.from_label(key)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise InvalidEvent(f"emotion {key} value must be a number")
        if value == 0 and not keep_zero:
            continue
        parsed[kind] = float(value)
    return Event.make(d["t"], coalition=d.get("coalition"), emotions=parsed,
                      behavior=d.get("behavior"))


def sequence_to_dict(s: EventsSequence) -> dict:
    return {"id": s.id, "events": [event_to_dict(e) for e in s]}


def sequence_from_dict(d: dict) -> EventsSequence:
    if not isinstance(d, dict):
        raise InvalidSequence("sequence line must be a JSON object")
    unknown = set(d) - _SEQ_KEYS
    if unknown:
        raise InvalidSequence(f"unknown sequence field(s): {sorted(unknown)}")
    if "id" not in d or "events" not in d:
        raise InvalidSequence("sequence needs 'id' and 'events'")
    return EventsSequence(str(d["id"]), tuple(event_from_dict(e) for e in d["events"]))


def dumps_sequence(s: EventsSequence) -> str:
    return json.dumps(sequence_to_dict(s), separators=(",", ":"))


def write_sequences(path, sequences: Iterable[EventsSequence]) -> None:
    with open(path, "w") as fh:
        for s in sequences:
            fh.write(dumps_sequence(s) + "\n")


def read_sequences(path) -> list:
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                out.append(sequence_from_dict(json.loads(line)))
            except json.JSONDecodeError as exc:
                raise InvalidSequence(f"line {lineno}: {exc}") from exc
    return out


def load_database(path) -> SequenceDatabase:
    return SequenceDatabase(read_sequences(path))


# -- compact text notation ------------------------------------------------------
# "(0, c1 e1{0.8}), (1, c2 e2{0.3} b1)". Tokens starting with c are coalitions,
# e1..e4 are emotions with an optional {value}, b-tokens are behaviors.

_EVENT_RE = re.compile(r"\(\s*(\d+)\s*,([^()]*)\)")
_EMO_RE = re.compile(r"(e[1-4])(?:\s*\{\s*([-+0-9.eE]+)\s*\})?$")


def parse_sequence(text: str, id: str = "s") -> EventsSequence:
    events = []
    for m in _EVENT_RE.finditer(text):
        t = int(m.group(1))
        items = []
        for token in re.findall(r"e[1-4]\s*\{[^}]*\}|\S+", m.group(2)):
            token = token.replace(" ", "")
            em = _EMO_RE.match(token)
            if em:
                value = float(em.group(2)) if em.group(2) is not None else 0.0
                items.append(EmotionItem(EmotionKind.from_label(em.group(1)), value))
            elif token.startswith("b"):
                items.append(BehaviorItem(token))
            else:
                items.append(CoalitionItem(token))
        events.append(Event(t, tuple(items)))
    return EventsSequence(id, tuple(events))
