"""
Symbolic re-creation of the arm-manipulation tutoring situation.

One execution is a dialogue: a fixed opening (perception cycles ending with
the danger being detected), 2..9 exchanges and a fixed closing. Each exchange
broadcasts the tutor's question, then one of two interventions (direct
solution, or a hint first), then the evaluation of the learner's answer,
which carries the emotional valence.
"""

from __future__ import annotations

import csv
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .agent import (
    Agent,
    AgentConfig,
    BehaviorNetwork,
    BehaviorNode,
    EmotionRule,
    Percept,
    Stimulus,
)
from .sequence_model import EmotionKind, EventsSequence, SequenceDatabase, TimeConstraints

SCENARIO1 = "scenario1"
SCENARIO2 = "scenario2"


@dataclass(frozen=True)
class ScenarioConfig:
    opening: tuple = ("c1", "c2", "c3", "c4", "c5", "c11")
    question: str = "c14"
    hint: str = "c15"
    solution: str = "c16"
    correct: str = "c19"
    incorrect: str = "c20"
    closing: tuple = ("c21", "c22")
    min_exchanges: int = 2
    max_exchanges: int = 9
    mean_exchanges: float = 6.0
    intervention_activation: float = 1.0
    habituation: float = 0.01
    commit_stream: bool = True  # keep the first intervention for the whole dialogue

    def __post_init__(self):
        if not self.min_exchanges <= self.mean_exchanges <= self.max_exchanges:
            raise ValueError("mean_exchanges must lie within the exchange bounds")

    @property
    def intervention_of(self) -> dict:
        return {self.hint: SCENARIO2, self.solution: SCENARIO1}

    def network(self) -> BehaviorNetwork:
        evaluate = BehaviorNode("n_eval", self.correct, "b_eval", successors=())
        evaluate_bad = BehaviorNode("n_eval_bad", self.incorrect, "b_warn", successors=())
        ends = ("n_eval", "n_eval_bad")
        nodes = [
            BehaviorNode("n_alert", self.opening[-1], "b_alert"),
            BehaviorNode("n_hint", self.hint, "b_hint", successors=ends),
            BehaviorNode("n_solution", self.solution, "b_solution", successors=ends),
            evaluate,
            evaluate_bad,
        ]
        streams = {
            SCENARIO1: ("n_solution", "n_eval"),
            SCENARIO2: ("n_hint", "n_eval"),
        }
        return BehaviorNetwork(nodes, streams)

    def rules(self) -> tuple:
        return (
            EmotionRule({"outcome": "correct"}, EmotionKind.COMPASSION, 0.8),
            EmotionRule({"outcome": "incorrect"}, EmotionKind.MEDIUM_FEAR, -0.4),
        )

    def perception(self) -> dict:
        p = {f"see_{c}": Percept(((c, 1.0),)) for c in self.opening + self.closing}
        p["ask"] = Percept(((self.question, 1.0),))
        a = self.intervention_activation
        p["intervene"] = Percept(((self.hint, a), (self.solution, a)))
        p[f"intervene_{SCENARIO2}"] = Percept(((self.hint, a),))
        p[f"intervene_{SCENARIO1}"] = Percept(((self.solution, a),))
        p["answer_correct"] = Percept(((self.correct, 1.0),))
        p["answer_incorrect"] = Percept(((self.incorrect, 1.0),))
        return p

    def sample_exchanges(self, rng: random.Random) -> int:
        """min + Binomial(max - min, q), with q chosen to hit the mean exactly."""
        n = self.max_exchanges - self.min_exchanges
        q = (self.mean_exchanges - self.min_exchanges) / n
        return self.min_exchanges + sum(rng.random() < q for _ in range(n))


@dataclass(frozen=True)
class RandomPolicy:
    seed: int = 0
    p_correct: float = 0.5

    def answers_correctly(self, rng: random.Random, scenario: str) -> bool:
        return rng.random() < self.p_correct


@dataclass(frozen=True)
class ProfiledPolicy:
    p_correct_after_hint: float
    p_correct_after_solution: float

    def __post_init__(self):
        for p in (self.p_correct_after_hint, self.p_correct_after_solution):
            if not 0.0 <= p <= 1.0:
                raise ValueError("probabilities must lie in [0, 1]")

    def answers_correctly(self, rng: random.Random, scenario: str) -> bool:
        p = self.p_correct_after_hint if scenario == SCENARIO2 else self.p_correct_after_solution
        return rng.random() < p


LearnerPolicy = Union[RandomPolicy, ProfiledPolicy]


def parse_policy(spec: str) -> LearnerPolicy:
    """'random', 'random:0.7' or 'profiled:1.0,0.0' (after hint, after solution)."""
    kind, _, args = spec.partition(":")
    if kind == "random":
        return RandomPolicy(p_correct=float(args) if args else 0.5)
    if kind == "profiled":
        hint, solution = (float(x) for x in args.split(","))
        return ProfiledPolicy(hint, solution)
    raise ValueError(f"unknown policy {spec!r}")


def make_agent(config: ScenarioConfig, agent_config: Optional[AgentConfig] = None,
               db: Optional[SequenceDatabase] = None) -> Agent:
    agent_config = agent_config or AgentConfig(habituation=config.habituation,
                                               explore_unscored=True)
    return Agent(config.network(), config.rules(), config.perception(), agent_config, db=db)


def run_execution(config: ScenarioConfig, policy: LearnerPolicy, agent: Agent, seed: int,
                  consolidate: bool = True) -> EventsSequence:
    """Drive one whole dialogue through the agent and store its trace."""
    rng = random.Random(seed)
    answers = random.Random(f"{seed}:{getattr(policy, 'seed', 0)}")
    agent.begin_execution()
    for c in config.opening:
        agent.run_cycle(Stimulus(f"see_{c}"))
    committed = None
    for _ in range(config.sample_exchanges(rng)):
        agent.run_cycle(Stimulus("ask"))
        stimulus = "intervene" if committed is None else f"intervene_{committed}"
        chosen = agent.run_cycle(Stimulus(stimulus)).broadcast
        scenario = config.intervention_of[chosen]
        if config.commit_stream:
            committed = scenario
        after = "hint" if scenario == SCENARIO2 else "solution"
        if policy.answers_correctly(answers, scenario):
            agent.run_cycle(Stimulus("answer_correct", (("after", after), ("outcome", "correct"))))
        else:
            agent.run_cycle(Stimulus("answer_incorrect", (("after", after), ("outcome", "incorrect"))))
    for c in config.closing:
        agent.run_cycle(Stimulus(f"see_{c}"))
    return agent.end_execution(consolidate=consolidate)


@dataclass(frozen=True)
class BenchRow:
    execution: int
    mining_ms: float
    pattern_count: int
    mean_pattern_len: float
    learner_decision_us: float
    max_decision_us: float
    trace_length: int


@dataclass
class BenchReport:
    rows: list = field(default_factory=list)

    FIELDS = ("execution", "mining_ms", "pattern_count", "mean_pattern_len", "learner_decision_us")

    def write_csv(self, path_or_file) -> None:
        own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.FIELDS)
            for r in self.rows:
                w.writerow([r.execution, f"{r.mining_ms:.3f}", r.pattern_count,
                            f"{r.mean_pattern_len:.3f}", f"{r.learner_decision_us:.1f}"])
        finally:
            if own:
                fh.close()


def run_batch(config: ScenarioConfig, policy: LearnerPolicy, executions: int,
              minsup=Fraction(1, 4), constraints: Optional[TimeConstraints] = None,
              seed: int = 0, agent: Optional[Agent] = None, progress=None) -> BenchReport:
    """Run executions back to back, re-mining the growing database after each."""
    if executions < 1:
        raise ValueError("executions must be >= 1")
    constraints = constraints or TimeConstraints.benchmark()
    if agent is None:
        agent = make_agent(config, AgentConfig(habituation=config.habituation, minsup=minsup,
                                               constraints=constraints, explore_unscored=True))
    seeds = random.Random(seed)
    report = BenchReport()
    for k in range(1, executions + 1):
        seq = run_execution(config, policy, agent, seeds.getrandbits(32), consolidate=False)
        decisions = [o.decision_seconds for o in agent.outcomes]
        t0 = time.perf_counter()
        ps = agent.consolidate()
        mining = time.perf_counter() - t0
        row = BenchRow(k, mining * 1e3, len(ps), ps.mean_length(),
                       1e6 * sum(decisions) / len(decisions), 1e6 * max(decisions), len(seq))
        report.rows.append(row)
        if progress is not None:
            progress(row)
    return report
