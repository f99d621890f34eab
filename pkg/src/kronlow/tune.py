"""Interval tuner: one (p_2, ..., p_d) that works across a range of set sizes.

Iterated racing in the spirit of irace.  Each round samples candidate
configurations (uniformly at first, then from truncated normals around
surviving elites with a spread that halves per round), races them across
instance sizes n, and eliminates candidates whose rank distribution is
statistically worse than the current best (Friedman test with a
Conover-style post-hoc at ``elim_alpha``).  Aggregation is by mean rank,
never mean cost: discrepancy spans orders of magnitude across an
interval, and ranks are invariant under per-instance monotone rescaling.

The budget is counted in (configuration, instance) evaluation pairs;
repeated evaluations are served from a cache and cost nothing.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy import stats
from scipy.special import ndtr, ndtri

from kronlow.discrepancy import star_discrepancy_exact
from kronlow.pointset import kronecker_with_unit_first

PARAM_MARGIN = 1e-9
INITIAL_SPREAD = 0.2
SPREAD_FLOOR = 0.01
FALLBACK_LOSS_FRACTION = 0.9


def _default_objective(params: np.ndarray, n: int) -> float:
    return star_discrepancy_exact(kronecker_with_unit_first(n, *params)).value


@dataclass
class TuningScenario:
    """Racing setup for one size interval.

    ``instances`` is either an explicit list of n values reused every
    round, or an int giving how many instances to sample per round from
    [n_lo, n_hi].  ``budget_pairs`` caps the total number of
    (configuration, instance) evaluations.
    """

    n_lo: int
    n_hi: int
    budget_pairs: int
    seed: int = 0
    instances: Sequence[int] | int = 6
    elim_alpha: float = 0.05
    elites: int = 4
    d: int = 3
    min_instances: int = 5

    def __post_init__(self) -> None:
        if not 5 <= self.n_lo <= self.n_hi:
            raise ValueError(f"need 5 <= n_lo <= n_hi, got [{self.n_lo}, {self.n_hi}]")
        if self.budget_pairs < 10 * self.elites:
            raise ValueError(
                f"budget_pairs={self.budget_pairs} below 10 x elites = {10 * self.elites}"
            )
        if self.d not in (2, 3, 4):
            raise ValueError(f"d must be in {{2,3,4}}, got {self.d}")
        if not 0.0 < self.elim_alpha < 1.0:
            raise ValueError("elim_alpha must be in (0, 1)")
        if self.elites < 1:
            raise ValueError("elites must be >= 1")

    def to_dict(self) -> dict:
        inst = self.instances
        return {
            "n_lo": self.n_lo,
            "n_hi": self.n_hi,
            "budget_pairs": self.budget_pairs,
            "seed": self.seed,
            "instances": list(inst) if not isinstance(inst, int) else inst,
            "elim_alpha": self.elim_alpha,
            "elites": self.elites,
            "d": self.d,
            "min_instances": self.min_instances,
        }


@dataclass
class TunedConfig:
    """Winning configuration of a race with its evaluation record."""

    params: np.ndarray
    per_instance_values: dict[int, float]
    mean_rank: float
    scenario: TuningScenario
    evals_used: int = 0
    audit: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.params = np.asarray(self.params, dtype=np.float64).reshape(-1)

    def to_dict(self) -> dict:
        return {
            "params": [float(p) for p in self.params],
            "per_instance_values": {str(k): float(v) for k, v in sorted(self.per_instance_values.items())},
            "mean_rank": float(self.mean_rank),
            "scenario": self.scenario.to_dict(),
            "evals_used": int(self.evals_used),
            "audit": self.audit,
        }


def _truncated_normal(rng: np.random.Generator, center: np.ndarray, spread: float) -> np.ndarray:
    """Sample componentwise from N(center, spread^2) truncated to (0, 1)."""
    a = ndtr((PARAM_MARGIN - center) / spread)
    b = ndtr((1.0 - PARAM_MARGIN - center) / spread)
    u = rng.uniform(a, b)
    return center + spread * ndtri(u)


def _mean_ranks(costs: np.ndarray) -> np.ndarray:
    """Mean rank per candidate over the (instances x candidates) cost matrix."""
    ranks = np.apply_along_axis(stats.rankdata, 1, costs)
    return ranks.mean(axis=0)


def _friedman_eliminate(costs: np.ndarray, alpha: float) -> list[int]:
    """Indices of candidates statistically worse than the current best.

    ``costs`` is (instances x candidates).  Runs the Friedman test and,
    if significant, a Conover-style post-hoc against the best candidate.
    With fewer than 3 candidates or degenerate data, falls back to a
    loss-fraction cutoff (worse on >= 90% of instances).
    """
    m, k = costs.shape
    ranks = np.apply_along_axis(stats.rankdata, 1, costs)
    rank_sums = ranks.sum(axis=0)
    best = int(np.argmin(rank_sums))

    if k >= 3:
        try:
            _, pvalue = stats.friedmanchisquare(*(costs[:, j] for j in range(k)))
        except ValueError:
            pvalue = None
        if pvalue is not None and np.isfinite(pvalue):
            if pvalue >= alpha:
                return []
            # Conover post-hoc: candidates whose rank sum trails the best
            # by more than the critical difference are dropped.
            a2 = float((ranks**2).sum())
            b2 = float((rank_sums**2).sum()) / m
            dfree = (m - 1) * (k - 1)
            spread = a2 - b2
            if spread <= 0.0 or dfree <= 0:
                return []
            crit = stats.t.ppf(1.0 - alpha / 2.0, dfree) * np.sqrt(2.0 * m * spread / dfree)
            return [j for j in range(k) if j != best and rank_sums[j] - rank_sums[best] > crit]

    # fallback: mean-rank (loss fraction) cutoff against the best
    losses = (costs > costs[:, [best]]).sum(axis=0) / m
    return [j for j in range(k) if j != best and losses[j] >= FALLBACK_LOSS_FRACTION]


def race_tune(
    scenario: TuningScenario,
    objective: Callable[[np.ndarray, int], float] = _default_objective,
) -> TunedConfig:
    """Iterated racing over [n_lo, n_hi]; returns the elite with best mean rank.

    Deterministic for a fixed scenario: candidate sampling, instance
    sampling and shuffling all draw from one generator seeded with
    ``scenario.seed``.  No candidate is eliminated before it has been
    scored on ``min_instances`` instances of the current race.
    """
    rng = np.random.default_rng(scenario.seed)
    dim = scenario.d - 1
    pool_size = max(2 * scenario.elites + 4, 8)
    cache: dict[tuple, float] = {}
    evals = 0
    audit: dict = {"rounds": [], "eliminations": []}

    def evaluate(params: np.ndarray, n: int) -> tuple[float, bool]:
        key = (tuple(params), n)
        if key in cache:
            return cache[key], False
        value = float(objective(params, n))
        cache[key] = value
        return value, True

    def round_instances(rnd: int) -> list[int]:
        if isinstance(scenario.instances, int):
            lo, hi = scenario.n_lo, scenario.n_hi
            pool = np.arange(lo, hi + 1)
            count = min(scenario.instances, pool.size)
            return [int(v) for v in rng.choice(pool, size=count, replace=False)]
        return [int(v) for v in rng.permutation(np.asarray(scenario.instances, dtype=int))]

    # one round must at least race the whole pool on min_instances (or the
    # full explicit instance list when it is shorter)
    per_round = (
        scenario.instances if isinstance(scenario.instances, int) else len(list(scenario.instances))
    )
    first_cost = pool_size * min(scenario.min_instances, max(per_round, 1))
    if scenario.budget_pairs < first_cost:
        raise ValueError(
            f"budget_pairs={scenario.budget_pairs} cannot complete one round: "
            f"{pool_size} candidates x {min(scenario.min_instances, max(per_round, 1))} instances "
            f"needs {first_cost}"
        )

    elites: list[np.ndarray] = []
    rnd = 0
    budget_left = scenario.budget_pairs
    results: dict[tuple, dict[int, float]] = {}

    while True:
        # assemble the round's candidate pool
        candidates: list[np.ndarray] = [e.copy() for e in elites]
        spread = max(INITIAL_SPREAD * 0.5 ** max(rnd - 1, 0), SPREAD_FLOOR)
        while len(candidates) < pool_size:
            if not elites:
                candidates.append(rng.uniform(PARAM_MARGIN, 1.0 - PARAM_MARGIN, size=dim))
            else:
                center = elites[int(rng.integers(len(elites)))]
                candidates.append(_truncated_normal(rng, center, spread))
        alive = list(range(len(candidates)))
        instances = round_instances(rnd)
        seen: list[int] = []
        raced_any = False

        for n in instances:
            fresh = sum(
                1 for j in alive if (tuple(candidates[j]), n) not in cache
            )
            if fresh > budget_left:
                break
            for j in alive:
                _, was_fresh = evaluate(candidates[j], n)
                if was_fresh:
                    budget_left -= 1
                    evals += 1
            seen.append(n)
            raced_any = True
            if len(seen) >= scenario.min_instances and len(alive) > 1:
                costs = np.array(
                    [[cache[(tuple(candidates[j]), m)] for j in alive] for m in seen]
                )
                dropped = _friedman_eliminate(costs, scenario.elim_alpha)
                if dropped:
                    audit["eliminations"].append(
                        {"round": rnd, "after_instances": len(seen), "dropped": len(dropped)}
                    )
                    alive = [j for idx, j in enumerate(alive) if idx not in set(dropped)]

        if not raced_any:
            break
        # rank survivors on the round's shared instances, keep the elites
        costs = np.array([[cache[(tuple(candidates[j]), m)] for j in alive] for m in seen])
        order = np.argsort(_mean_ranks(costs), kind="stable")
        elites = [candidates[alive[int(i)]] for i in order[: scenario.elites]]
        for j in alive:
            results.setdefault(tuple(candidates[j]), {}).update(
                {m: cache[(tuple(candidates[j]), m)] for m in seen}
            )
        audit["rounds"].append(
            {"round": rnd, "instances": seen, "survivors": len(alive), "budget_left": budget_left}
        )
        rnd += 1
        if budget_left <= 0:
            break

    if not elites:
        raise ValueError("race produced no elites; budget too small")

    # final ranking of elites over the instances every elite has seen
    shared = sorted(set.intersection(*(set(results[tuple(e)]) for e in elites)))
    if shared:
        costs = np.array([[results[tuple(e)][m] for e in elites] for m in shared])
        mean_ranks = _mean_ranks(costs)
    else:
        mean_ranks = np.ones(len(elites))
    win = int(np.argmin(mean_ranks))
    winner = elites[win]
    return TunedConfig(
        params=winner,
        per_instance_values=dict(sorted(results[tuple(winner)].items())),
        mean_rank=float(mean_ranks[win]),
        scenario=scenario,
        evals_used=evals,
        audit=audit,
    )


def evaluate_config_over_interval(params, ns: Sequence[int]) -> dict[int, float]:
    """Exact discrepancy of the shifted unit-first Kronecker set at each n."""
    params = np.asarray(params, dtype=np.float64).reshape(-1)
    return {int(n): _default_objective(params, int(n)) for n in ns}


@dataclass
class IntervalStudyResult:
    """Per-interval tuned configs plus the cross-evaluation matrix."""

    configs: list[TunedConfig]
    baseline_params: np.ndarray
    matrix: list[dict]

    def matrix_csv_rows(self) -> list[list]:
        rows = [["config", "trained_interval", "probe_interval", "n", "value"]]
        for r in self.matrix:
            rows.append(
                [r["config"], r["trained_interval"], r["probe_interval"], r["n"], repr(r["value"])]
            )
        return rows


def _probe_instances(lo: int, hi: int, count: int = 5) -> list[int]:
    return sorted({int(round(v)) for v in np.linspace(lo, hi, count)})


def interval_study(
    intervals: Sequence[tuple[int, int]],
    template: TuningScenario,
    objective: Callable[[np.ndarray, int], float] = _default_objective,
    probes_per_interval: int = 5,
) -> IntervalStudyResult:
    """Race-tune each interval and cross-evaluate every config everywhere.

    Intervals must be disjoint.  Interval k runs with seed
    ``template.seed + k``.  A uniform random configuration drawn from the
    template seed is evaluated on the same probes as a baseline row.
    """
    ivs = [(int(lo), int(hi)) for lo, hi in intervals]
    for (a1, b1) in ivs:
        if a1 > b1:
            raise ValueError(f"bad interval [{a1}, {b1}]")
    for i, (a1, b1) in enumerate(ivs):
        for a2, b2 in ivs[i + 1 :]:
            if max(a1, a2) <= min(b1, b2):
                raise ValueError(f"intervals [{a1},{b1}] and [{a2},{b2}] overlap")

    configs = []
    for k, (lo, hi) in enumerate(ivs):
        scenario = replace(template, n_lo=lo, n_hi=hi, seed=template.seed + k)
        configs.append(race_tune(scenario, objective=objective))

    baseline_rng = np.random.default_rng([template.seed, 0xBA5E])
    baseline = baseline_rng.uniform(PARAM_MARGIN, 1.0 - PARAM_MARGIN, size=template.d - 1)

    matrix: list[dict] = []
    probe_lists = {iv: _probe_instances(*iv, count=probes_per_interval) for iv in ivs}
    rows: list[tuple[str, str, np.ndarray]] = [
        (f"interval_{lo}_{hi}", f"[{lo},{hi}]", cfg.params)
        for (lo, hi), cfg in zip(ivs, configs)
    ]
    rows.append(("random_baseline", "-", baseline))
    for label, trained, params in rows:
        for iv in ivs:
            for n in probe_lists[iv]:
                matrix.append(
                    {
                        "config": label,
                        "trained_interval": trained,
                        "probe_interval": f"[{iv[0]},{iv[1]}]",
                        "n": n,
                        "value": float(objective(params, n)),
                    }
                )
    return IntervalStudyResult(configs=configs, baseline_params=baseline, matrix=matrix)
