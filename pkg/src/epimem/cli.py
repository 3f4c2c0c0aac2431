"""
Command-line entry point: ``epimem {mine,simulate,bench,learn}``.

Exit codes: 0 success, 2 input error, 3 constraint violation (invalid time
bounds or the candidate cap was hit).
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from pathlib import Path

from .agent import AgentConfig
from .errors import CandidateLimitExceeded, EpimemError
from .learner import BroadcastHistory, score_candidates, select
from .miner import mine, parse_minsup, read_patterns, write_patterns
from .scenario import ScenarioConfig, make_agent, parse_policy, run_batch, run_execution
from .sequence_model import TimeConstraints, read_sequences, support, write_sequences

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONSTRAINT = 3


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _bool(text: str) -> bool:
    v = text.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {text!r}")


def _add_mining_flags(p: argparse.ArgumentParser, minsup: str) -> None:
    p.add_argument("--minsup", default=minsup, help='threshold, e.g. "0.32" or "32%%"')
    p.add_argument("--min-span", type=int, default=None)
    p.add_argument("--max-span", type=int, default=None)
    p.add_argument("--min-gap", type=int, default=None)
    p.add_argument("--max-gap", type=int, default=None)
    p.add_argument("--no-constraints", action="store_true",
                   help="drop the default span [2, 9] / gap <= 2 bounds")
    p.add_argument("--seed", type=int, default=0)


def _constraints(args) -> TimeConstraints:
    base = TimeConstraints() if args.no_constraints else TimeConstraints.benchmark()
    fields = base.to_dict()
    for name in ("min_span", "max_span", "min_gap", "max_gap"):
        v = getattr(args, name)
        if v is not None:
            fields[name] = v
    try:
        return TimeConstraints(**fields)
    except ValueError as exc:
        raise _Fail(EXIT_CONSTRAINT, f"invalid time constraints: {exc}") from exc


def _minsup(args):
    try:
        return parse_minsup(args.minsup)
    except EpimemError as exc:
        raise _Fail(EXIT_INPUT, str(exc)) from exc


def _read_db(path):
    try:
        db = read_sequences(path)
    except OSError as exc:
        raise _Fail(EXIT_INPUT, f"cannot read {path}: {exc.strerror}") from exc
    except (EpimemError, ValueError, KeyError, TypeError) as exc:
        raise _Fail(EXIT_INPUT, f"cannot parse {path}: {exc}") from exc
    if not db:
        raise _Fail(EXIT_INPUT, "empty database")
    return db


def cmd_mine(args, out) -> int:
    db = _read_db(args.db)
    minsup = _minsup(args)
    constraints = _constraints(args)
    t0 = time.perf_counter()
    try:
        ps = mine(db, minsup, constraints, closed_only=args.closed_only,
                  max_candidates=args.max_candidates)
    except CandidateLimitExceeded as exc:
        raise _Fail(EXIT_CONSTRAINT, str(exc)) from exc
    elapsed = time.perf_counter() - t0
    if args.output:
        write_patterns(args.output, ps)
    kind = "closed" if args.closed_only else "frequent"
    print(f"{len(ps)} {kind} patterns from {len(db)} sequences at minsup {minsup}", file=out)
    if len(ps):
        counts = [p.support for p in ps]
        lo = min(counts, key=lambda s: s.count)
        hi = max(counts, key=lambda s: s.count)
        print(f"support min {lo.count}/{lo.total} max {hi.count}/{hi.total}", file=out)
    print(f"elapsed {elapsed:.3f} s, {ps.explored} candidates", file=out)
    for p in ps:
        print(f"{p.sequence.id}\t{p.support.count}/{p.support.total}\t{p.sequence}", file=out)
    return EXIT_OK


def cmd_simulate(args, out) -> int:
    minsup = _minsup(args)
    constraints = _constraints(args)
    policy = _policy(args)
    config = ScenarioConfig()
    agent = make_agent(config, AgentConfig(habituation=config.habituation, minsup=minsup,
                                           constraints=constraints, explore_unscored=True))
    seeds = _seed_stream(args.seed)
    log = open(args.decision_log, "w") if args.decision_log else None
    try:
        for _ in range(args.executions):
            seq = run_execution(config, policy, agent, next(seeds))
            if log is not None:
                for o in agent.outcomes:
                    log.write(o.log_line() + "\n")
            print(f"{seq.id}\t{len(seq)} events\t{len(agent.patterns)} patterns", file=out)
    finally:
        if log is not None:
            log.close()
    if args.output:
        write_sequences(args.output, agent.db.sequences)
    return EXIT_OK


def cmd_bench(args, out) -> int:
    minsup = _minsup(args)
    constraints = _constraints(args)
    policy = _policy(args)

    def progress(row):
        if args.verbose:
            print(f"{row.execution}\t{row.mining_ms:.1f} ms\t{row.pattern_count} patterns",
                  file=sys.stderr)

    report = run_batch(ScenarioConfig(), policy, args.executions, minsup, constraints,
                       seed=args.seed, progress=progress)
    if args.output:
        report.write_csv(args.output)
    else:
        report.write_csv(out)
    return EXIT_OK


def cmd_learn(args, out) -> int:
    try:
        patterns = read_patterns(args.patterns)
    except OSError as exc:
        raise _Fail(EXIT_INPUT, f"cannot read {args.patterns}: {exc.strerror}") from exc
    except (EpimemError, ValueError, KeyError, TypeError) as exc:
        raise _Fail(EXIT_INPUT, f"cannot parse {args.patterns}: {exc}") from exc
    if args.db:
        db = _read_db(args.db)
        for p in patterns:
            if support(p.sequence, db) != p.support:
                raise _Fail(EXIT_INPUT, f"pattern {p.sequence.id} support does not match the database")
    history = BroadcastHistory.of(_names(args.history))
    candidates = _names(args.candidates)
    if not candidates:
        raise _Fail(EXIT_INPUT, "no candidates given")
    scores = score_candidates(history, candidates, patterns, relaxed=args.relaxed)
    fallback = args.fallback or candidates[0]
    chosen, provenance = select(scores, fallback)
    print(f"selected {chosen} ({provenance.value})", file=out)
    for s in scores:
        ids = ",".join(sorted(s.matched_pattern_ids))
        print(f"{s.coalition}\t{s.total:.6g}\tmax {s.best_strength:.6g}\tmin {s.worst_strength:.6g}"
              f"\t{ids}", file=out)
    return EXIT_OK


def _names(text: str) -> list:
    return [x.strip() for x in text.split(",") if x.strip()]


def _policy(args):
    try:
        return parse_policy(args.policy)
    except ValueError as exc:
        raise _Fail(EXIT_INPUT, str(exc)) from exc


def _seed_stream(seed: int):
    rng = random.Random(seed)
    while True:
        yield rng.getrandbits(32)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="epimem", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mine", help="mine closed (or all) frequent patterns of a JSONL database")
    p.add_argument("db", type=Path)
    _add_mining_flags(p, "0.25")
    p.add_argument("--closed-only", type=_bool, default=True, metavar="BOOL")
    p.add_argument("--max-candidates", type=int, default=None)
    p.add_argument("--output", "-o", type=Path, help="pattern JSONL file")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("simulate", help="run tutoring dialogues and store their traces")
    _add_mining_flags(p, "0.25")
    p.add_argument("--executions", type=int, default=1)
    p.add_argument("--policy", default="random", help='"random[:p]" or "profiled:HINT,SOLUTION"')
    p.add_argument("--output", "-o", type=Path, help="trace JSONL file")
    p.add_argument("--decision-log", type=Path, help="per-cycle decision JSONL file")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", help="re-mine after each execution and report timings as CSV")
    _add_mining_flags(p, "0.25")
    p.add_argument("--executions", type=int, default=160)
    p.add_argument("--policy", default="random")
    p.add_argument("--output", "-o", type=Path, help="CSV file (stdout when omitted)")
    p.add_argument("--verbose", "-v", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("learn", help="score candidate coalitions against a pattern file")
    p.add_argument("patterns", type=Path)
    p.add_argument("--history", required=True, help="comma-separated recent broadcasts")
    p.add_argument("--candidates", required=True, help="comma-separated coalitions")
    p.add_argument("--fallback", default=None, help="attention pick when nothing matches")
    p.add_argument("--db", type=Path, default=None, help="re-verify supports against this database")
    p.add_argument("--relaxed", action="store_true", help="match the history by order only")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_learn)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    if getattr(args, "executions", 1) < 1:
        print("epimem: --executions must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args, out)
    except _Fail as exc:
        print(f"epimem: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
