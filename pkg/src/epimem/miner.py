"""
Frequent (closed) events-sequence mining under time constraints.

Patterns are grown depth first from single items. A pattern is extended
either by adding an item to its last event or by appending an event at an
admissible gap. Occurrences are tracked as anchors (timestamp of the first
matched event) per sequence; because containment preserves offsets, an
anchor pins the whole occurrence.

In closed mode a pattern is reported only if no single-item superpattern
(satisfying the constraints) has the same support, and a subtree is
abandoned as soon as some item that growth can never add sits at a fixed
offset inside *every* occurrence: all descendants are then absorbed by a
same-support superpattern.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_left, bisect_right
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

from .errors import CandidateLimitExceeded, EmptyDatabase, InvalidMinsup
from .sequence_model import (
    Event,
    EventsSequence,
    SequenceDatabase,
    Support,
    TimeConstraints,
    contains,
    event_from_dict,
    event_to_dict,
    item_from_symbol,
)

_EMOTION_RANK = 1


@dataclass(frozen=True)
class Pattern:
    sequence: EventsSequence
    support: Support
    supporting_ids: frozenset

    @property
    def skeleton(self) -> tuple:
        return self.sequence.skeleton()

    @property
    def length(self) -> int:
        """Number of items over all events."""
        return self.sequence.item_count

    def sort_key(self):
        return (-self.support.count, -self.length, self.skeleton)

    def to_dict(self) -> dict:
        return {
            "seq": [event_to_dict(e) for e in self.sequence],
            "support": {"num": self.support.count, "den": self.support.total},
            "supporting": sorted(self.supporting_ids),
        }

    @classmethod
    def from_dict(cls, d: dict, id: str = "p") -> "Pattern":
        unknown = set(d) - {"seq", "support", "supporting"}
        if unknown:
            raise ValueError(f"unknown pattern field(s): {sorted(unknown)}")
        seq = EventsSequence(id, tuple(event_from_dict(e, keep_zero=True) for e in d["seq"]))
        sup = Support(int(d["support"]["num"]), int(d["support"]["den"]))
        return cls(seq, sup, frozenset(d.get("supporting", ())))

    def __str__(self):
        return f"{self.sequence} @ {self.support.count}/{self.support.total}"


@dataclass(frozen=True)
class PatternSet:
    patterns: tuple
    minsup: Fraction
    constraints: TimeConstraints
    db_size: int
    closed_only: bool = True
    generation: int = 0
    explored: int = 0

    def __len__(self):
        return len(self.patterns)

    def __iter__(self):
        return iter(self.patterns)

    def by_skeleton(self) -> dict:
        return {p.skeleton: p for p in self.patterns}

    def mean_length(self) -> float:
        if not self.patterns:
            return 0.0
        return sum(p.length for p in self.patterns) / len(self.patterns)

    @classmethod
    def empty(cls) -> "PatternSet":
        return cls((), Fraction(1), TimeConstraints(), 0)


def parse_minsup(value: Union[str, float, Fraction, int]) -> Fraction:
    """Accepts 0.32, "0.32", "32%" or a Fraction; all mean the same threshold."""
    if isinstance(value, Fraction):
        ms = value
    elif isinstance(value, str):
        s = value.strip()
        try:
            ms = Fraction(s[:-1].strip()) / 100 if s.endswith("%") else Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidMinsup(f"cannot parse minsup {value!r}") from exc
    else:
        ms = Fraction(value).limit_denominator(10**9) if isinstance(value, float) else Fraction(value)
    if not 0 < ms <= 1:
        raise InvalidMinsup(f"minsup must be in (0, 1], got {value!r}")
    return ms


def satisfies_constraints(p: EventsSequence, c: TimeConstraints) -> bool:
    ts = p.timestamps
    if not ts:
        return False
    span = ts[-1] - ts[0]
    if span < c.min_span or (c.max_span is not None and span > c.max_span):
        return False
    if len(ts) < c.min_events:
        return False
    for a, b in zip(ts, ts[1:]):
        gap = b - a
        if gap < c.min_gap or (c.max_gap is not None and gap > c.max_gap):
            return False
    return True


def average_valences(skeleton: EventsSequence, occurrences: Iterable) -> EventsSequence:
    """Replace each emotion value in `skeleton` by its mean over `occurrences`.

    Each occurrence is the list of matched database events, aligned with the
    skeleton's events (one occurrence per supporting sequence).
    """
    occurrences = list(occurrences)
    events = []
    for j, ev in enumerate(skeleton):
        items = []
        for it in ev.items:
            if it.symbol[0] == _EMOTION_RANK and occurrences:
                values = [occ[j].emotions[it.kind] for occ in occurrences]
                items.append(item_from_symbol(it.symbol, math.fsum(values) / len(values)))
            else:
                items.append(it)
        events.append(Event(ev.t, tuple(items)))
    return EventsSequence(skeleton.id, tuple(events))


def close_filter(patterns: Iterable[Pattern]) -> list:
    """Drop every pattern contained in another one with the same support."""
    patterns = list(patterns)
    out = []
    for p in patterns:
        absorbed = any(
            q is not p
            and q.support.count == p.support.count
            and q.skeleton != p.skeleton
            and len(q.sequence) >= len(p.sequence)
            and contains(p.sequence, q.sequence)
            for q in patterns
        )
        if not absorbed:
            out.append(p)
    return out


# -- mining ---------------------------------------------------------------------


class _Index:
    """Per-sequence lookup tables: time -> symbol set, symbol -> times."""

    def __init__(self, sequences):
        self.ids = [s.id for s in sequences]
        self.at = []
        self.times = []
        self.values = []
        self.where = defaultdict(dict)
        for i, s in enumerate(sequences):
            at = {}
            values = {}
            for e in s:
                syms = []
                for it in e.items:
                    syms.append(it.symbol)
                    if it.symbol[0] == _EMOTION_RANK:
                        values[(e.t, it.symbol)] = it.value
                at[e.t] = syms
                for sym in syms:
                    self.where[sym].setdefault(i, []).append(e.t)
            self.at.append(at)
            self.times.append([e.t for e in s])
            self.values.append(values)


class _Miner:
    def __init__(self, sequences, minsup: Fraction, constraints: TimeConstraints,
                 closed_only: bool, max_candidates: Optional[int]):
        self.idx = _Index(sequences)
        self.n = len(sequences)
        self.need = max(1, math.ceil(minsup * self.n))
        self.c = constraints
        self.closed_only = closed_only
        self.max_candidates = max_candidates
        self.explored = 0
        self.found = []

    # pattern: tuple of (offset, tuple_of_symbols); occ: {seq: [anchors]}

    def run(self):
        for sym in sorted(self.idx.where):
            occ = self.idx.where[sym]
            self._count()
            if len(occ) >= self.need:
                self._grow(((0, (sym,)),), occ)
        return self.found

    def _count(self):
        self.explored += 1
        if self.max_candidates is not None and self.explored > self.max_candidates:
            raise CandidateLimitExceeded(self.explored, self.max_candidates)

    def _grow(self, pattern, occ):
        if self.closed_only and self._absorbed_inside(pattern, occ):
            return
        c = self.c
        last_off, last_syms = pattern[-1]
        top = last_syms[-1]
        item_ext = defaultdict(dict)
        event_ext = defaultdict(dict)
        hi_rel = None if c.max_gap is None else last_off + c.max_gap
        if c.max_span is not None:
            hi_rel = c.max_span if hi_rel is None else min(hi_rel, c.max_span)
        lo_rel = last_off + c.min_gap
        for i, anchors in occ.items():
            at = self.idx.at[i]
            times = self.idx.times[i]
            for a in anchors:
                t_last = a + last_off
                for y in at[t_last]:
                    if y > top:
                        item_ext[y].setdefault(i, []).append(a)
                if hi_rel is not None and hi_rel < lo_rel:
                    continue
                start = bisect_left(times, a + lo_rel)
                stop = len(times) if hi_rel is None else bisect_right(times, a + hi_rel)
                for t in times[start:stop]:
                    rel = t - a
                    for y in at[t]:
                        event_ext[(rel, y)].setdefault(i, []).append(a)

        count = len(occ)
        forward_equal = False
        children = []
        for y in sorted(item_ext):
            o = item_ext[y]
            self._count()
            if len(o) == count:
                forward_equal = True
            if len(o) >= self.need:
                children.append((pattern[:-1] + ((last_off, last_syms + (y,)),), o))
        for rel, y in sorted(event_ext):
            o = event_ext[(rel, y)]
            self._count()
            if len(o) == count:
                forward_equal = True
            if len(o) >= self.need:
                children.append((pattern + ((rel, (y,)),), o))

        if self._outputtable(pattern):
            if not self.closed_only:
                self._emit(pattern, occ)
            elif not forward_equal and not self._absorbed_elsewhere(pattern, occ):
                self._emit(pattern, occ)
        for child, o in children:
            self._grow(child, o)

    def _outputtable(self, pattern) -> bool:
        span = pattern[-1][0]
        c = self.c
        return span >= c.min_span and len(pattern) >= c.min_events

    def _inside_gap_ok(self, pattern, o) -> bool:
        """Could a new event at relative offset `o` (not an existing offset) be inserted?"""
        c = self.c
        offsets = [off for off, _ in pattern]
        k = bisect_left(offsets, o)
        if k == 0:
            gap = offsets[0] - o
            if gap < c.min_gap or (c.max_gap is not None and gap > c.max_gap):
                return False
            return c.max_span is None or offsets[-1] - o <= c.max_span
        if k == len(offsets):
            return False  # forward extensions are handled by growth
        return o - offsets[k - 1] >= c.min_gap and offsets[k] - o >= c.min_gap

    def _window(self, i, a, lo_rel, hi_rel, existing, skip_top=None):
        """(offset, item) pairs of sequence i within [a+lo_rel, a+hi_rel], minus the pattern's own."""
        at = self.idx.at[i]
        times = self.idx.times[i]
        lo = 0 if lo_rel == -math.inf else bisect_left(times, a + lo_rel)
        hi = bisect_right(times, a + hi_rel)
        out = []
        for t in times[lo:hi]:
            o = t - a
            own = existing.get(o)
            for y in at[t]:
                if own is not None and (y in own or (skip_top is not None and o == skip_top[0]
                                                     and y > skip_top[1])):
                    continue
                out.append((o, y))
        return out

    def _absorbed_inside(self, pattern, occ) -> bool:
        """Does some non-growable (offset, item) sit inside every occurrence?"""
        last_off, last_syms = pattern[-1]
        existing = {off: set(syms) for off, syms in pattern}
        at_all = self.idx.at
        common = None
        for i, anchors in occ.items():
            at = at_all[i]
            for a in anchors:
                if common is None:
                    common = self._window(i, a, 0, last_off, existing, (last_off, last_syms[-1]))
                else:
                    common = [(o, y) for o, y in common if y in at.get(a + o, ())]
                if not common:
                    return False
        for o, y in common:
            if o in existing or self._inside_gap_ok(pattern, o):
                return True
        return False

    def _absorbed_elsewhere(self, pattern, occ) -> bool:
        """Is there a backward or inside one-item superpattern with equal support?"""
        c = self.c
        last_off = pattern[-1][0]
        existing = {off: set(syms) for off, syms in pattern}
        lo_rel = -math.inf
        if c.max_gap is not None:
            lo_rel = -c.max_gap
        if c.max_span is not None:
            lo_rel = max(lo_rel, last_off - c.max_span)
        at_all = self.idx.at
        common = None
        for i, anchors in occ.items():
            if common is None:
                seen = set()
                for a in anchors:
                    seen.update(self._window(i, a, lo_rel, last_off, existing))
                common = [(o, y) for o, y in seen
                          if o in existing or self._inside_gap_ok(pattern, o)]
            else:
                at = at_all[i]
                common = [(o, y) for o, y in common
                          if any(y in at.get(a + o, ()) for a in anchors)]
            if not common:
                return False
        return True

    def _emit(self, pattern, occ):
        supporters = sorted(occ)
        events = []
        for off, syms in pattern:
            items = []
            for sym in syms:
                if sym[0] == _EMOTION_RANK:
                    vals = [self.idx.values[i][(occ[i][0] + off, sym)] for i in supporters]
                    items.append(item_from_symbol(sym, math.fsum(vals) / len(vals)))
                else:
                    items.append(item_from_symbol(sym))
            events.append(Event(off, tuple(items)))
        seq = EventsSequence(f"P{len(self.found) + 1}", tuple(events))
        self.found.append(Pattern(seq, Support(len(occ), self.n),
                                  frozenset(self.idx.ids[i] for i in supporters)))


def mine(db, minsup, constraints: Optional[TimeConstraints] = None,
         closed_only: bool = True, max_candidates: Optional[int] = None,
         generation: int = 0) -> PatternSet:
    """Mine all frequent (closed) patterns of `db`.

    Args:
        db: a SequenceDatabase or an iterable of EventsSequence.
        minsup: threshold in (0, 1]; "32%", "0.32", 0.32 or a Fraction.
        constraints: span/gap bounds; unbounded when omitted.
        closed_only: report only closed patterns.
        max_candidates: abort with CandidateLimitExceeded past this many
            candidate evaluations.

    Returns:
        PatternSet ordered by (support desc, length desc, skeleton).
    """
    sequences = db.sequences if isinstance(db, SequenceDatabase) else tuple(db)
    if not sequences:
        raise EmptyDatabase("empty database")
    ms = parse_minsup(minsup)
    constraints = constraints or TimeConstraints()
    miner = _Miner(sequences, ms, constraints, closed_only, max_candidates)
    found = miner.run()
    found.sort(key=Pattern.sort_key)
    patterns = tuple(
        Pattern(EventsSequence(f"P{k}", p.sequence.events), p.support, p.supporting_ids)
        for k, p in enumerate(found, 1)
    )
    return PatternSet(patterns, ms, constraints, len(sequences), closed_only,
                      generation, miner.explored)


def write_patterns(path, ps: PatternSet) -> None:
    with open(path, "w") as fh:
        for p in ps:
            fh.write(json.dumps(p.to_dict(), separators=(",", ":")) + "\n")


def read_patterns(path) -> list:
    out = []
    with open(path) as fh:
        for k, line in enumerate(fh, 1):
            if line.strip():
                out.append(Pattern.from_dict(json.loads(line), id=f"P{k}"))
    return out
