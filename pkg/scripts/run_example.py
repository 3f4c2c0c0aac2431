"""Mine the six-sequence example database at 32 % with and without closedness."""

import argparse
import time
from pathlib import Path

from epimem.miner import mine
from epimem.sequence_model import TimeConstraints, read_sequences

DATA = Path(__file__).resolve().parent.parent / "tests" / "data" / "six_sequences.jsonl"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--db", type=Path, default=DATA)
    ap.add_argument("--minsup", default="32%")
    args = ap.parse_args()

    db = read_sequences(args.db)
    for closed in (True, False):
        t0 = time.perf_counter()
        ps = mine(db, args.minsup, TimeConstraints(), closed_only=closed)
        ms = (time.perf_counter() - t0) * 1e3
        print(f"{'closed' if closed else 'all frequent'}: {len(ps)} patterns in {ms:.1f} ms")
        for p in ps:
            print(f"  {p.support.count}/{p.support.total}  {p.sequence}")


if __name__ == "__main__":
    main()
