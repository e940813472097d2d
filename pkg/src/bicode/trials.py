"""Shared Monte-Carlo harness: per-user outcomes, aggregated reports,
and a thread pool sized by BICODE_THREADS (default: all cores).

Trials draw everything from seeds derived as (base_seed, trial_index),
so reports are bit-identical regardless of scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .geometry import g12

INSUFFICIENT = "insufficient_clean_equations"
RANK_DEFICIENT = "rank_deficient"


@dataclass
class UserOutcome:
    user: int
    ok: bool
    failure: str | None = None
    diagnostics: dict = field(default_factory=dict)


@dataclass
class TrialReport:
    trials: int
    users: tuple
    successes: dict
    fail_insufficient: dict
    fail_rank: dict
    outcomes: list = field(default_factory=list, repr=False)

    def success_rate(self, user: int) -> float:
        return self.successes[user] / self.trials if self.trials else 0.0

    def failure_rate(self, user: int) -> float:
        return 1.0 - self.success_rate(user) if self.trials else 0.0

    def all_success_rate(self) -> float:
        if not self.trials:
            return 0.0
        good = sum(1 for per_trial in self.outcomes
                   if all(per_trial[u].ok for u in self.users))
        return good / self.trials

    def csv_rows(self):
        return [(self.trials, u, self.successes[u],
                 self.fail_insufficient[u], self.fail_rank[u])
                for u in self.users]

    def to_csv(self) -> str:
        lines = ["trial_count,user,successes,fail_insufficient,fail_rank"]
        lines += [",".join(g12(v) if isinstance(v, float) else str(v) for v in row)
                  for row in self.csv_rows()]
        return "\n".join(lines) + "\n"


def thread_count(requested: int | None = None) -> int:
    if requested is not None:
        return max(1, requested)
    env = os.environ.get("BICODE_THREADS", "")
    if env.strip():
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"BICODE_THREADS={env!r} is not an integer") from None
    return os.cpu_count() or 1


def run_trials(users, num_trials: int, one_trial, threads: int | None = None) -> TrialReport:
    """Run `one_trial(t) -> {user: UserOutcome}` for t in range(num_trials)."""
    users = tuple(users)
    if num_trials < 0:
        raise ValueError("trial count must be nonnegative")
    nthreads = min(thread_count(threads), max(num_trials, 1))
    if num_trials == 0:
        per_trial = []
    elif nthreads == 1:
        per_trial = [one_trial(t) for t in range(num_trials)]
    else:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            per_trial = list(pool.map(one_trial, range(num_trials)))

    report = TrialReport(
        trials=num_trials,
        users=users,
        successes={u: 0 for u in users},
        fail_insufficient={u: 0 for u in users},
        fail_rank={u: 0 for u in users},
        outcomes=per_trial,
    )
    for outcomes in per_trial:
        for u in users:
            o = outcomes[u]
            if o.ok:
                report.successes[u] += 1
            elif o.failure == INSUFFICIENT:
                report.fail_insufficient[u] += 1
            else:
                report.fail_rank[u] += 1
    return report
