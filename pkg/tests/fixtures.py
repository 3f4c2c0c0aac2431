"""Hand-built inputs shared by the CLI and acceptance tests."""

from epimem.miner import Pattern
from epimem.sequence_model import Event, EventsSequence, Support, parse_sequence

# P1 strength 1/2 * 1.0 = 0.5, P2 strength 1/2 * -0.4 = -0.2; both follow cA, cB
SAME_CANDIDATE = [
    Pattern(parse_sequence("(0, cA), (1, cB), (2, cC e4{1.0})", "P1"), Support(1, 2), frozenset({"S1"})),
    Pattern(parse_sequence("(0, cA), (1, cB), (2, cC e2{-0.4})", "P2"), Support(1, 2), frozenset({"S2"})),
]
SPLIT_CANDIDATES = [
    Pattern(parse_sequence("(0, cA), (1, cB), (2, cC e4{1.0})", "P1"), Support(1, 2), frozenset({"S1"})),
    Pattern(parse_sequence("(0, cA), (1, cB), (2, cD e2{-0.4})", "P2"), Support(1, 2), frozenset({"S2"})),
]
# the database the split patterns were mined from
SPLIT_DB = [
    parse_sequence("(0, cA), (1, cB), (2, cC e4{1.0})", "S1"),
    parse_sequence("(0, cA), (1, cB), (2, cD e2{-0.4})", "S2"),
]


def similar_sequences(shared: int = 16, tail: int = 4):
    """Four sequences sharing `shared` broadcasts, each with its own tail."""
    db = []
    for k in range(4):
        events = [Event.make(t, f"c{t + 1}", {"e4": 0.5} if t == 10 else {}) for t in range(shared)]
        events += [Event.make(shared + j, f"x{k}_{j}") for j in range(tail)]
        db.append(EventsSequence(f"S{k + 1}", tuple(events)))
    return db
