"""Show which intervention the agent settles on for two scripted learners."""

import argparse
import random

from epimem.scenario import ProfiledPolicy, ScenarioConfig, make_agent, run_execution


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--executions", type=int, default=8)
    ap.add_argument("--seeds", type=int, default=5)
    args = ap.parse_args()

    config = ScenarioConfig()
    names = {config.hint: "hint", config.solution: "solution"}
    for label, policy in (("learns from hints", ProfiledPolicy(1.0, 0.0)),
                          ("learns from solutions", ProfiledPolicy(0.0, 1.0))):
        print(label)
        for seed in range(args.seeds):
            agent = make_agent(config)
            seeds = random.Random(seed)
            picks = []
            for _ in range(args.executions):
                run_execution(config, policy, agent, seeds.getrandbits(32))
                first = next(o for o in agent.outcomes if len(o.candidates) == 2)
                picks.append(f"{names[first.broadcast]}/{first.provenance.value[0]}")
            print(f"  seed {seed}: " + " ".join(picks))


if __name__ == "__main__":
    main()
