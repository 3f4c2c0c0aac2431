"""
A minimal cognitive cycle around the episodic learner.

Each cycle: perceive a stimulus into candidate coalitions, let emotion rules
infuse valence and activation, let attention pick the most energetic
coalition, let the episodic learner override that pick, fire the behavior
whose precondition was broadcast, and record one event.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

from .errors import NoCandidates, NonMonotonicCycle
from .learner import BroadcastHistory, EpisodicIndex, Provenance, score_candidates, select
from .miner import PatternSet, mine, parse_minsup
from .sequence_model import (
    EmotionKind,
    Event,
    EventsSequence,
    SequenceDatabase,
    TimeConstraints,
)

PER_CYCLE = "per_cycle"
PER_EXECUTION = "per_execution"


@dataclass(frozen=True)
class Coalition:
    id: str
    info_codelets: frozenset = frozenset()
    activation: float = 0.0
    valences: tuple = ()  # ((EmotionKind, value), ...)

    def __post_init__(self):
        if self.activation < 0:
            raise ValueError(f"coalition {self.id}: negative activation")
        for _, v in self.valences:
            if not -1.0 <= v <= 1.0:
                raise ValueError(f"coalition {self.id}: valence {v} outside [-1, 1]")

    @property
    def valence_map(self) -> dict:
        return dict(self.valences)


@dataclass
class WorkingMemory:
    coalitions: list = field(default_factory=list)
    residual: tuple = ()

    def __post_init__(self):
        ids = [c.id for c in self.coalitions]
        if len(set(ids)) != len(ids):
            raise ValueError("coalition ids must be unique within a cycle")


@dataclass(frozen=True)
class BehaviorNode:
    id: str
    precondition: str
    action: str
    base_activation: float = 1.0
    threshold: float = 0.5
    successors: tuple = ()


class BehaviorNetwork:
    """Precondition-gated behavior nodes plus named streams (partial plans)."""

    def __init__(self, nodes, streams: Optional[dict] = None):
        self.nodes = {n.id: n for n in nodes}
        self.streams = {k: tuple(v) for k, v in (streams or {}).items()}
        for name, path in self.streams.items():
            if len(set(path)) != len(path):
                raise ValueError(f"stream {name} revisits a node")
            for a, b in zip(path, path[1:]):
                if a not in self.nodes or b not in self.nodes:
                    raise ValueError(f"stream {name} refers to an unknown node")
                if b not in self.nodes[a].successors:
                    raise ValueError(f"stream {name}: {b} is not a successor of {a}")

    def fire(self, broadcast: str) -> Optional[BehaviorNode]:
        for node_id in sorted(self.nodes):
            node = self.nodes[node_id]
            if node.precondition == broadcast and node.base_activation >= node.threshold:
                return node
        return None


@dataclass(frozen=True)
class EmotionRule:
    """Sets `kind` to `value` on coalitions perceived in a matching context."""

    when: tuple  # ((context key, required value), ...)
    kind: EmotionKind
    value: float

    def __post_init__(self):
        if abs(self.value) > 1:
            raise ValueError("emotion rule value must lie in [-1, 1]")
        if isinstance(self.when, dict):
            object.__setattr__(self, "when", tuple(sorted(self.when.items())))

    def matches(self, context: dict) -> bool:
        return all(context.get(k) == v for k, v in self.when)


def infuse_emotion(c: Coalition, rules, context: dict, gain: float = 1.0) -> Coalition:
    valences = dict(c.valences)
    activation = c.activation
    for rule in rules:
        if rule.matches(context):
            valences[rule.kind] = rule.value
            activation += gain * abs(rule.value)
    if activation == c.activation and valences == dict(c.valences):
        return c
    return replace(c, activation=activation, valences=tuple(sorted(valences.items())))


def record_event(trace: tuple, cycle: int, broadcast: str, valences: dict,
                 behavior: Optional[str] = None) -> tuple:
    if trace and cycle <= trace[-1].t:
        raise NonMonotonicCycle(f"cycle {cycle} does not follow {trace[-1].t}")
    emotions = {k: v for k, v in valences.items() if v != 0}
    return tuple(trace) + (Event.make(cycle, coalition=broadcast, emotions=emotions,
                                      behavior=behavior),)


def consolidate(db: SequenceDatabase, minsup, constraints: TimeConstraints,
                pending: Optional[EventsSequence] = None, generation: int = 0,
                closed_only: bool = True) -> PatternSet:
    """Mine a snapshot of `db` (plus an unfinished trace, if given)."""
    snapshot = db.sequences
    if pending is not None and len(pending):
        snapshot = snapshot + (pending,)
    return mine(snapshot, minsup, constraints, closed_only=closed_only, generation=generation)


def _attend(coalitions) -> Coalition:
    """Most active coalition, ties to the smaller id."""
    return min(coalitions, key=lambda c: (-c.activation, c.id))


@dataclass(frozen=True)
class Stimulus:
    name: str
    context: tuple = ()

    @property
    def context_map(self) -> dict:
        return dict(self.context)


@dataclass(frozen=True)
class Percept:
    """Configured coalitions for one stimulus name: ((id, base activation), ...)."""

    coalitions: tuple


@dataclass
class AgentConfig:
    history_capacity: int = 10
    gain: float = 1.0
    habituation: float = 0.0
    relaxed_match: bool = False
    minsup: object = Fraction(1, 4)
    constraints: TimeConstraints = field(default_factory=TimeConstraints.benchmark)
    schedule: str = PER_EXECUTION
    episodic: bool = True
    # when the best episodic total is negative, let attention try candidates with no evidence
    explore_unscored: bool = False


@dataclass(frozen=True)
class CycleOutcome:
    cycle: int
    broadcast: str
    behavior: Optional[str]
    event: Event
    provenance: Provenance
    score: Optional[float]
    fallback: str
    candidates: tuple
    decision_seconds: float

    def log_line(self) -> str:
        return json.dumps({"cycle": self.cycle, "broadcast": self.broadcast,
                           "provenance": self.provenance.value, "score": self.score},
                          separators=(",", ":"))


class Agent:
    """Single-threaded agent; one instance records one trace at a time."""

    def __init__(self, network: BehaviorNetwork, rules, perception: dict,
                 config: Optional[AgentConfig] = None,
                 patterns: Optional[PatternSet] = None,
                 db: Optional[SequenceDatabase] = None):
        self.network = network
        self.rules = tuple(rules)
        self.perception = perception
        self.config = config or AgentConfig()
        self.minsup = parse_minsup(self.config.minsup)
        self.patterns = patterns or PatternSet.empty()
        self.db = db if db is not None else SequenceDatabase()
        self.generation = 0
        self.broadcast_counts: dict = {}
        self.outcomes: list = []
        self.begin_execution()

    def begin_execution(self, start_cycle: int = 0) -> None:
        self.trace: tuple = ()
        self.cycle = start_cycle
        self.history = BroadcastHistory((), self.config.history_capacity)
        self.outcomes = []

    def perceive(self, stimulus: Stimulus) -> list:
        percept = self.perception.get(stimulus.name)
        if percept is None:
            return []
        out = []
        for cid, base in percept.coalitions:
            damp = self.config.habituation * self.broadcast_counts.get(cid, 0)
            out.append(Coalition(cid, frozenset({stimulus.name}), max(0.0, base - damp)))
        return out

    def run_cycle(self, stimulus: Stimulus) -> CycleOutcome:
        candidates = self.perceive(stimulus)
        if not candidates:
            raise NoCandidates(f"stimulus {stimulus.name!r} produced no coalition")
        context = stimulus.context_map
        candidates = [infuse_emotion(c, self.rules, context, self.config.gain) for c in candidates]
        wm = WorkingMemory(candidates, residual=tuple(e.coalition for e in self.trace[-1:]))
        fallback = _attend(wm.coalitions)

        t0 = time.perf_counter()
        scores = []
        if self.config.episodic and len(self.history) >= 2 and len(self._index):
            scores = score_candidates(self.history, [c.id for c in candidates], self._index)
        broadcast, provenance = select(scores, fallback.id)
        if self.config.explore_unscored and scores and scores[0].total < 0:
            scored = {s.coalition for s in scores}
            unknown = [c for c in candidates if c.id not in scored]
            if unknown:
                broadcast, provenance = _attend(unknown).id, Provenance.ATTENTION
        elapsed = time.perf_counter() - t0
        score = next((s.total for s in scores if s.coalition == broadcast), None)

        chosen = next(c for c in candidates if c.id == broadcast)
        node = self.network.fire(broadcast)
        behavior = node.action if node is not None else None
        self.trace = record_event(self.trace, self.cycle, broadcast, chosen.valence_map, behavior)
        self.history = self.history.push(self.cycle, broadcast)
        self.broadcast_counts[broadcast] = self.broadcast_counts.get(broadcast, 0) + 1
        outcome = CycleOutcome(self.cycle, broadcast, behavior, self.trace[-1], provenance,
                               score, fallback.id, tuple(c.id for c in candidates), elapsed)
        self.outcomes.append(outcome)
        self.cycle += 1
        if self.config.schedule == PER_CYCLE:
            self.consolidate(pending=EventsSequence("pending", self.trace))
        return outcome

    def end_execution(self, consolidate: bool = True) -> EventsSequence:
        seq = EventsSequence(self.db.new_id(), self.trace)
        self.db.append(seq)
        self.trace = ()
        if consolidate:
            self.consolidate()
        return seq

    def consolidate(self, pending: Optional[EventsSequence] = None) -> PatternSet:
        if not len(self.db) and (pending is None or not len(pending)):
            return self.patterns
        self.generation += 1
        self.patterns = consolidate(self.db, self.minsup, self.config.constraints,
                                    pending=pending, generation=self.generation)
        return self.patterns

    @property
    def patterns(self) -> PatternSet:
        return self._patterns

    @patterns.setter
    def patterns(self, ps: PatternSet) -> None:
        # swapped in between cycles; the retrieval index travels with it
        self._index = EpisodicIndex(ps, relaxed=self.config.relaxed_match)
        self._patterns = ps
