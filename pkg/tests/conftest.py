import sys
from pathlib import Path

import hypothesis
import pytest

from epimem.sequence_model import parse_sequence, read_sequences

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).parent / "data"

hypothesis.settings.register_profile("fast", max_examples=20)
hypothesis.settings.register_profile("thorough", max_examples=500, deadline=None)
hypothesis.settings.register_profile("default", deadline=None)
hypothesis.settings.load_profile("default")

SIX_SEQUENCES = {
    "S1": "(0, c1 e1{0.8}), (1, c2 e2{0.3} b1)",
    "S2": "(0, c1 e1{0.8}), (1, c3), (2, c4 b4), (3, c5 b3)",
    "S3": "(0, c2 e2{0.3}), (1, c3), (2, c4), (3, c5 b3)",
    "S4": "(0, c3), (1, c1 e1{0.6} b4), (2, c3)",
    "S5": "(0, c4 b4), (1, c5), (2, c6)",
    "S6": "(1, c1 e1{0.6} b4), (2, c4 b4), (3, c5)",
}


@pytest.fixture
def six_db():
    return [parse_sequence(text, sid) for sid, text in SIX_SEQUENCES.items()]


@pytest.fixture
def six_db_path():
    return DATA / "six_sequences.jsonl"


@pytest.fixture
def six_db_from_file(six_db_path):
    return read_sequences(six_db_path)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results.values():
            terminalreporter.write_line(line)
