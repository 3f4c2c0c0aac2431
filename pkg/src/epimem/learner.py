"""
Episodic retrieval: score broadcast candidates against consolidated patterns.

A pattern votes for a candidate coalition when the tail of the broadcast
history (at least its last two entries) occurs in the pattern and the
candidate appears in some later event of the pattern. Each candidate scores
max + min strength over the patterns voting for it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .miner import Pattern
from .sequence_model import Event, EventsSequence, contains


class Provenance(str, enum.Enum):
    EPISODIC = "Episodic"
    ATTENTION = "Attention"


@dataclass(frozen=True)
class BroadcastHistory:
    entries: tuple = ()
    capacity: int = 10

    def __post_init__(self):
        entries = tuple((int(c), str(x)) for c, x in self.entries)
        for (c0, _), (c1, _) in zip(entries, entries[1:]):
            if c1 <= c0:
                raise ValueError("history cycles must strictly increase")
        object.__setattr__(self, "entries", entries[-self.capacity:] if self.capacity else ())

    @classmethod
    def of(cls, coalitions: Iterable[str], start: int = 0, capacity: int = 10) -> "BroadcastHistory":
        return cls(tuple((start + k, c) for k, c in enumerate(coalitions)), capacity)

    def push(self, cycle: int, coalition: str) -> "BroadcastHistory":
        return BroadcastHistory(self.entries + ((cycle, coalition),), self.capacity)

    def suffix(self, k: int) -> EventsSequence:
        tail = self.entries[-k:]
        return EventsSequence("Sc", tuple(Event.make(c, coalition=x) for c, x in tail))

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class CandidateScore:
    coalition: str
    best_strength: float
    worst_strength: float
    matched_pattern_ids: frozenset = field(default_factory=frozenset)

    @property
    def total(self) -> float:
        return self.best_strength + self.worst_strength


def sequence_strength(p: Pattern) -> float:
    """Support times the sum of all (averaged) emotion values in the pattern."""
    valence = math.fsum(v for e in p.sequence for v in e.emotions.values())
    return float(p.support) * valence


def _ordered_end(suffix: EventsSequence, seq: EventsSequence) -> Optional[int]:
    """Index of the last matched event of the earliest order-only occurrence."""
    k = 0
    for j, e in enumerate(seq):
        if e.coalition == suffix[k].coalition:
            k += 1
            if k == len(suffix):
                return j
    return None


def _occurrence_end(history: BroadcastHistory, seq: EventsSequence, k: int,
                    relaxed: bool) -> Optional[int]:
    suffix = history.suffix(k)
    if relaxed:
        return _ordered_end(suffix, seq)
    res = contains(suffix, seq)
    return res.indices[-1] if res else None


def match(history: BroadcastHistory, p: Pattern, candidate: str, relaxed: bool = False) -> bool:
    for k in range(2, len(history) + 1):
        end = _occurrence_end(history, p.sequence, k, relaxed)
        if end is not None and any(e.coalition == candidate for e in p.sequence[end + 1:]):
            return True
    return False


def _pair_end(events, x: str, y: str, gap: Optional[int]) -> Optional[int]:
    """Index of y in the earliest occurrence of x then y (`gap` apart unless None)."""
    for i, e in enumerate(events):
        if e.coalition != x:
            continue
        want = None if gap is None else e.t + gap
        for j in range(i + 1, len(events)):
            f = events[j]
            if want is not None and f.t > want:
                break
            if f.coalition == y and (want is None or f.t == want):
                return j
        if gap is None:
            return None  # later anchors only see a subset of what this one saw
    return None


def _following(tail: tuple, p: Pattern, relaxed: bool) -> set:
    """Coalitions that `match` would accept as candidates for `p`.

    `tail` is the last two history entries. Any occurrence of a longer
    history tail also contains these two, ending at the same event, so the
    two-entry tail decides alone.
    """
    (t0, x), (t1, y) = tail
    events = p.sequence.events
    end = _pair_end(events, x, y, None if relaxed else t1 - t0)
    if end is None:
        return set()
    return {e.coalition for e in events[end + 1:] if e.coalition is not None}


class EpisodicIndex:
    """Patterns keyed by every (coalition, later coalition, gap) pair they hold.

    For each pair only the earliest occurrence is kept (smallest first index,
    then smallest second index), with the set of coalitions in the events
    after it, which is exactly what `match` looks at for a two-entry history
    tail. Built once per pattern set.
    """

    def __init__(self, patterns, relaxed: bool = False):
        self.relaxed = relaxed
        self.table: dict = {}
        self.size = 0
        for p in patterns:
            self.size += 1
            strength = sequence_strength(p)
            events = p.sequence.events
            coalitions = [e.coalition for e in events]
            seen = set()
            for i, x in enumerate(coalitions):
                if x is None:
                    continue
                for j in range(i + 1, len(events)):
                    y = coalitions[j]
                    if y is None:
                        continue
                    key = (x, y, None if relaxed else events[j].t - events[i].t)
                    if key in seen:
                        continue
                    seen.add(key)
                    after = frozenset(c for c in coalitions[j + 1:] if c is not None)
                    if after:
                        self.table.setdefault(key, []).append((strength, p.sequence.id, after))

    def __len__(self):
        return self.size

    def lookup(self, history: BroadcastHistory) -> list:
        if len(history) < 2:
            return []
        (t0, x), (t1, y) = history.entries[-2:]
        return self.table.get((x, y, None if self.relaxed else t1 - t0), [])


def score_candidates(history: BroadcastHistory, candidates: Iterable[str], patterns,
                     relaxed: bool = False) -> list:
    """Max + min strength per candidate over matching patterns.

    `patterns` is an iterable of Pattern or a prebuilt EpisodicIndex.
    Candidates no pattern votes for are left out. Result is ordered by total
    descending, then coalition id.
    """
    wanted = set(candidates)
    votes = {}
    if isinstance(patterns, EpisodicIndex):
        for s, pid, after in patterns.lookup(history):
            for c in after & wanted:
                votes.setdefault(c, []).append((s, pid))
    elif len(history) >= 2:
        tail = history.entries[-2:]
        for p in patterns:
            hits = _following(tail, p, relaxed) & wanted
            if not hits:
                continue
            s = sequence_strength(p)
            for c in hits:
                votes.setdefault(c, []).append((s, p.sequence.id))
    scores = [
        CandidateScore(c, max(s for s, _ in v), min(s for s, _ in v),
                       frozenset(pid for _, pid in v))
        for c, v in votes.items()
    ]
    scores.sort(key=lambda cs: (-cs.total, cs.coalition))
    return scores


def select(scores, fallback: str) -> tuple:
    """Pick the best-scoring coalition, or `fallback` when nothing matched."""
    scores = list(scores)
    if not scores:
        return fallback, Provenance.ATTENTION
    best = min(scores, key=lambda cs: (-cs.total, cs.coalition))
    return best.coalition, Provenance.EPISODIC
