"""Compare the compiled search kernel with the pure-Python one.

Runs unconstrained breadth-first search (the expensive baseline) and
constrained search on generated scenes, checks both kernels agree on plans
and node counts, and prints timings.

    python3 benchmarks/bench_kernel.py --n 20 --min-objects 15 --max-objects 20
"""

from __future__ import annotations

import argparse
import statistics
import time

from planlingua.household import generate_dataset, household_domain
from planlingua.planner import SearchConfig, available_backends, ground, plan
from planlingua.templates import augment_domain, constrain


def _time(task, config, repeat):
    best, result = float("inf"), None
    for _ in range(repeat):
        start = time.perf_counter()
        result = plan(task, config)
        best = min(best, time.perf_counter() - start)
    return best, result


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--n", type=int, default=20)
    ap.add_argument("--min-objects", type=int, default=15)
    ap.add_argument("--max-objects", type=int, default=20)
    ap.add_argument("--budget", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    backends = available_backends()
    if "cython" not in backends:
        print("compiled kernel not available; only the Python kernel is installed")
    domain = household_domain()
    augmented = augment_domain(domain)
    samples = generate_dataset(args.seed, args.n, size=(args.min_objects, args.max_objects))

    rows = []
    for s in samples:
        tasks = {
            "unconstrained": ground(domain, s.problem(), prune_static=True),
            "constrained": ground(augmented.domain, constrain(s.problem(), s.template(), augmented),
                                  prune_static=True),
        }
        for mode, task in tasks.items():
            timings, outcomes = {}, set()
            for b in backends:
                t, r = _time(task, SearchConfig(mode, args.budget, b), args.repeat)
                timings[b] = t
                outcomes.add((r.plan, r.stats.expanded, r.stats.generated, r.stats.status))
            if len(outcomes) != 1:
                raise SystemExit(f"{s.id} {mode}: kernels disagree")
            expanded = next(iter(outcomes))[1]
            rows.append((s.id, mode, expanded, timings))

    print(f"{'sample':<10} {'mode':<14} {'expanded':>9} " + " ".join(f"{b + ' ms':>12}" for b in backends)
          + ("   speedup" if len(backends) > 1 else ""))
    for sid, mode, expanded, timings in rows:
        cells = " ".join(f"{timings[b] * 1000:12.2f}" for b in backends)
        extra = f"   {timings['python'] / timings['cython']:7.1f}x" if len(backends) > 1 else ""
        print(f"{sid:<10} {mode:<14} {expanded:>9} {cells}{extra}")
    if len(backends) > 1:
        for mode in ("unconstrained", "constrained"):
            sel = [r for r in rows if r[1] == mode and r[3]["cython"] > 0]
            total = {b: sum(r[3][b] for r in sel) for b in backends}
            med = statistics.median(r[3]["python"] / r[3]["cython"] for r in sel)
            print(f"{mode}: total python {total['python']:.3f}s, cython {total['cython']:.3f}s, "
                  f"median speedup {med:.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
