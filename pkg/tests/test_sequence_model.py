import json
from fractions import Fraction

import pytest
from hypothesis import given
import hypothesis.strategies as st

from epimem.errors import EmptyDatabase, EmptySequence, InvalidEvent, InvalidSequence
from epimem.sequence_model import (
    BehaviorItem,
    CoalitionItem,
    EmotionItem,
    EmotionKind,
    Event,
    EventsSequence,
    SequenceDatabase,
    Support,
    TimeConstraints,
    contains,
    dumps_sequence,
    event_from_dict,
    item_matches,
    normalize,
    parse_sequence,
    read_sequences,
    sequence_from_dict,
    support,
    write_sequences,
)
from strategies import databases, events_sequences, subsequences


def test_emotion_kind_codes():
    assert [k.value for k in EmotionKind] == [1, 2, 3, 4]
    assert EmotionKind.from_label("e4") is EmotionKind.COMPASSION
    with pytest.raises(InvalidEvent):
        EmotionKind.from_label("e5")


@pytest.mark.parametrize("a, b, expected", [
    (EmotionItem(EmotionKind.HIGH_THREAT, 0.8), EmotionItem(EmotionKind.HIGH_THREAT, 0.6), True),
    (CoalitionItem("c1"), CoalitionItem("c1"), True),
    (EmotionItem(EmotionKind.HIGH_THREAT, 0.8), EmotionItem(EmotionKind.MEDIUM_FEAR, 0.8), False),
    (CoalitionItem("b1"), BehaviorItem("b1"), False),
])
def test_item_matches(a, b, expected):
    assert item_matches(a, b) is expected


def test_event_invariants():
    with pytest.raises(InvalidEvent):
        Event(0, ())
    with pytest.raises(InvalidEvent):
        Event(0, (CoalitionItem("c1"), CoalitionItem("c2")))
    with pytest.raises(InvalidEvent):
        Event(0, (BehaviorItem("b1"), BehaviorItem("b2")))
    with pytest.raises(InvalidEvent):
        Event(0, (EmotionItem(EmotionKind.COMPASSION, 0.1), EmotionItem(EmotionKind.COMPASSION, 0.2)))
    with pytest.raises(InvalidEvent):
        EmotionItem(EmotionKind.COMPASSION, 1.5)
    with pytest.raises(InvalidEvent):
        Event(-1, (CoalitionItem("c1"),))
    e = Event.make(3, "c1", {"e4": 0.8, "e1": -0.2}, "b2")
    assert [str(it) for it in e.items] == ["c1", "e1{-0.2}", "e4{0.8}", "b2"]


def test_sequence_timestamps_strictly_increase():
    with pytest.raises(InvalidSequence):
        parse_sequence("(0, c1), (0, c2)")
    with pytest.raises(InvalidSequence):
        parse_sequence("(3, c1), (1, c2)")


def test_contains_gapped_pattern(six_db):
    by_id = {s.id: s for s in six_db}
    sa = parse_sequence("(0, c3), (2, c5 b3)")
    res = contains(sa, by_id["S2"])
    assert res
    assert [by_id["S2"][k].t for k in res.indices] == [1, 3]
    assert not contains(sa, by_id["S4"])


def test_contains_respects_offsets():
    sb = parse_sequence("(0, a), (1, b), (3, b)")
    assert contains(parse_sequence("(0, a), (3, b)"), sb).indices == (0, 2)
    assert not contains(parse_sequence("(0, a), (2, b)"), sb)


def test_contains_reports_earliest_occurrence():
    sb = parse_sequence("(0, a), (1, b), (2, a), (3, b)")
    assert contains(parse_sequence("(5, a), (6, b)"), sb).indices == (0, 1)


def test_contains_is_value_blind():
    sb = parse_sequence("(0, c1 e1{0.8})")
    assert contains(parse_sequence("(0, e1{-1})"), sb)


@pytest.mark.parametrize("text, expected", [
    ("(0, c4 b4), (1, c5)", (3, 6)),
    ("(0, c1 e1)", (4, 6)),
    ("(0, c99)", (0, 6)),
    ("(0, c3), (2, c5 b3)", (2, 6)),
    ("(0, c3), (1, c4), (2, c5 b3)", (2, 6)),
])
def test_support_six_sequences(six_db, text, expected):
    assert support(parse_sequence(text), six_db) == Support(*expected)


def test_support_empty_database():
    with pytest.raises(EmptyDatabase):
        support(parse_sequence("(0, c1)"), SequenceDatabase())


def test_support_counts_each_sequence_once():
    db = [parse_sequence("(0, a), (1, a), (2, a)", "S1"), parse_sequence("(0, b)", "S2")]
    assert support(parse_sequence("(0, a)"), db) == Support(1, 2)


def test_support_threshold_is_exact():
    s = Support(1, 4)
    assert s.at_least(Fraction(1, 4))
    assert not Support(1, 5).at_least(Fraction(1, 4))
    assert s.percent() == "25 %"


@pytest.mark.parametrize("text, expected", [
    ("(1, c3), (2, c4), (3, c5 b3)", "(0, c3), (1, c4), (2, c5 b3)"),
    ("(0, c1)", "(0, c1)"),
    ("(5, a), (9, b)", "(0, a), (4, b)"),
])
def test_normalize(text, expected):
    assert normalize(parse_sequence(text)) == parse_sequence(expected)


def test_normalize_empty():
    with pytest.raises(EmptySequence):
        normalize(EventsSequence("x", ()))


@given(events_sequences())
def test_containment_reflexive(s):
    assert contains(s, s)


@given(st.data())
def test_containment_transitive(data):
    c = data.draw(events_sequences(max_events=6))
    b = data.draw(subsequences(c))
    a = data.draw(subsequences(b))
    assert contains(a, b) and contains(b, c)
    assert contains(a, c)


@given(events_sequences(), events_sequences(), events_sequences())
def test_containment_transitive_random(a, b, c):
    if contains(a, b) and contains(b, c):
        assert contains(a, c)


@given(st.data())
def test_support_anti_monotone(data):
    db = data.draw(databases())
    b = data.draw(subsequences(data.draw(st.sampled_from(db))))
    a = data.draw(subsequences(b))
    assert support(a, db).count >= support(b, db).count


@given(events_sequences(), events_sequences())
def test_normalize_idempotent_and_containment_invariant(a, b):
    n = normalize(a)
    assert normalize(n) == n
    assert n[0].t == 0
    assert bool(contains(a, b)) == bool(contains(n, b))


def test_database_snapshots_are_stable():
    db = SequenceDatabase()
    db.append(parse_sequence("(0, c1)", db.new_id()))
    snap = db.sequences
    db.append(parse_sequence("(0, c2)", db.new_id()))
    assert len(snap) == 1 and len(db) == 2
    assert [s.id for s in db] == ["S1", "S2"]
    with pytest.raises(InvalidSequence):
        db.append(parse_sequence("(0, c3)", "S1"))


def test_time_constraints_validation():
    with pytest.raises(ValueError):
        TimeConstraints(min_span=5, max_span=2)
    with pytest.raises(ValueError):
        TimeConstraints(min_gap=3, max_gap=2)
    with pytest.raises(ValueError):
        TimeConstraints(min_gap=0)
    c = TimeConstraints.benchmark()
    assert (c.min_span, c.max_span, c.max_gap) == (2, 9, 2)


# -- JSON lines -------------------------------------------------------------------

def test_six_sequences_file_matches_fixture(six_db, six_db_from_file):
    assert six_db_from_file == six_db


def test_jsonl_example_line():
    line = ('{"id":"S1","events":[{"t":0,"coalition":"c1","emotions":{"e1":0.8}},'
            '{"t":1,"coalition":"c2","emotions":{"e2":0.3},"behavior":"b1"}]}')
    s = sequence_from_dict(json.loads(line))
    assert s == parse_sequence("(0, c1 e1{0.8}), (1, c2 e2{0.3} b1)", "S1")
    assert dumps_sequence(s) == line


@pytest.mark.parametrize("bad", [
    {"id": "S", "events": [], "extra": 1},
    {"id": "S", "events": [{"t": 0, "coalition": "c1", "colour": "red"}]},
    {"id": "S", "events": [{"t": 0, "coalition": "c1", "emotions": {"e5": 0.1}}]},
    {"id": "S", "events": [{"t": 0, "coalition": "c1", "emotions": {"e1": 2.0}}]},
    {"id": "S", "events": [{"coalition": "c1"}]},
    {"events": []},
])
def test_jsonl_rejects_malformed(bad):
    with pytest.raises((InvalidEvent, InvalidSequence)):
        sequence_from_dict(bad)


def test_zero_emotion_treated_as_absent():
    with_zero = event_from_dict({"t": 0, "coalition": "c1", "emotions": {"e2": 0.0}})
    without = event_from_dict({"t": 0, "coalition": "c1"})
    assert with_zero == without


@given(databases())
def test_jsonl_round_trip(tmp_path_factory, db):
    path = tmp_path_factory.mktemp("rt") / "db.jsonl"
    write_sequences(path, db)
    assert read_sequences(path) == db
