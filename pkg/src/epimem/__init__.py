"""Episodic memory for a cognitive agent: sequence model, closed-pattern miner, learner."""

from .errors import EpimemError
from .learner import BroadcastHistory, EpisodicIndex, Provenance, score_candidates, select
from .miner import Pattern, PatternSet, mine
from .sequence_model import (
    Event,
    EventsSequence,
    SequenceDatabase,
    Support,
    TimeConstraints,
    contains,
    support,
)

__version__ = "0.1.0"

__all__ = [
    "BroadcastHistory", "EpimemError", "EpisodicIndex", "Event", "EventsSequence", "Pattern",
    "PatternSet", "Provenance", "SequenceDatabase", "Support", "TimeConstraints", "contains",
    "mine", "score_candidates", "select", "support",
]
