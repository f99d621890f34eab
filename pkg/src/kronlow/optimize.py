"""Per-size parameter search for shifted Kronecker sets.

Minimizes the exact star discrepancy over the free parameters
(p_2, ..., p_d) in (0,1)^(d-1) with p_1 = 1/n fixed, using a standard
(mu/mu_w, lambda)-CMA-ES with rank-1 and rank-mu covariance updates.
Restarts are independent seeded streams; the reported result is the best
point evaluated anywhere.  A plain uniform random search with the same
budget protocol is included as a sanity baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from kronlow.discrepancy import star_discrepancy_exact
from kronlow.pointset import kronecker_with_unit_first

DEFAULT_MARGIN = 1e-9
DEFAULT_BOUND = (DEFAULT_MARGIN, 1.0 - DEFAULT_MARGIN)
WORST_COST = 1.0


@dataclass
class OptimizerConfig:
    """Budget, seeding and search-box settings for one optimization.

    ``budget_evals`` counts objective evaluations per run; ``runs``
    independent restarts are performed.  ``bounds`` holds one (lo, hi)
    pair per search coordinate and so fixes the dimension.  ``population``
    may be an int or "default" (4 + floor(3 ln m), at least 6, for m
    search dimensions).
    """

    budget_evals: int
    runs: int = 1
    seed: int = 0
    population: int | str = "default"
    sigma0: float = 0.3
    bounds: tuple = (DEFAULT_BOUND,)

    def __post_init__(self) -> None:
        self.bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        for lo, hi in self.bounds:
            if not (0.0 <= lo < hi <= 1.0):
                raise ValueError(f"each bound needs 0 <= lo < hi <= 1, got ({lo}, {hi})")
        if self.sigma0 <= 0.0:
            raise ValueError("sigma0 must be positive")
        if self.budget_evals < 1 or self.runs < 1:
            raise ValueError("budget_evals and runs must be >= 1")

    @property
    def dim(self) -> int:
        return len(self.bounds)

    def resolve_population(self) -> int:
        if self.population == "default":
            return max(6, 4 + int(3 * math.log(self.dim)))
        lam = int(self.population)
        if lam < 2:
            raise ValueError("population must be >= 2")
        return lam

    def lo_hi(self) -> tuple[np.ndarray, np.ndarray]:
        arr = np.asarray(self.bounds, dtype=np.float64)
        return arr[:, 0], arr[:, 1]


@dataclass
class OptResult:
    """Best point found plus the non-increasing best-ever trace."""

    best_params: np.ndarray
    best_value: float
    history: list[float] = field(default_factory=list)
    evals_used: int = 0
    seed: int = 0

    def __post_init__(self) -> None:
        self.best_params = np.asarray(self.best_params, dtype=np.float64).reshape(-1)

    def to_dict(self) -> dict:
        return {
            "best_params": [float(p) for p in self.best_params],
            "best_value": float(self.best_value),
            "history": [float(h) for h in self.history],
            "evals_used": int(self.evals_used),
            "seed": int(self.seed),
        }


def _reflect(x: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Fold a point into [lo, hi] by reflection at the bounds."""
    span = hi - lo
    y = np.mod(x - lo, 2.0 * span)
    y = np.where(y > span, 2.0 * span - y, y)
    return lo + y


def _cost(objective: Callable, x: np.ndarray) -> float:
    v = objective(x)
    try:
        v = float(v)
    except (TypeError, ValueError):
        return WORST_COST
    return v if math.isfinite(v) else WORST_COST


def cmaes_minimize(objective: Callable[[np.ndarray], float], config: OptimizerConfig) -> OptResult:
    """Minimize ``objective`` over the config box with (mu/mu_w, lambda)-CMA-ES.

    Deterministic given ``config.seed``: run r draws from the generator
    seeded with (seed, r), with the initial mean uniform in the box.
    Every candidate is reflected into the bounds before evaluation;
    non-finite objective values are charged the worst cost 1.0.
    ``history`` holds the best-ever value after each generation,
    concatenated over runs, hence non-increasing.
    """
    dim = config.dim
    lo, hi = config.lo_hi()
    lam = config.resolve_population()
    if config.budget_evals < lam:
        raise ValueError(f"budget_evals={config.budget_evals} below one population of {lam}")
    mu = lam // 2
    raw = np.log(mu + 0.5) - np.log(np.arange(1, mu + 1))
    weights = raw / raw.sum()
    mueff = 1.0 / np.sum(weights**2)

    # standard cumulation and learning rates for this dimension
    cc = (4.0 + mueff / dim) / (dim + 4.0 + 2.0 * mueff / dim)
    cs = (mueff + 2.0) / (dim + mueff + 5.0)
    c1 = 2.0 / ((dim + 1.3) ** 2 + mueff)
    cmu = min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((dim + 2.0) ** 2 + mueff))
    damps = 1.0 + 2.0 * max(0.0, math.sqrt((mueff - 1.0) / (dim + 1.0)) - 1.0) + cs
    chi_n = math.sqrt(dim) * (1.0 - 1.0 / (4.0 * dim) + 1.0 / (21.0 * dim**2))

    best_val = math.inf
    best_x = (lo + hi) / 2.0
    history: list[float] = []
    evals = 0

    for run in range(config.runs):
        rng = np.random.default_rng([config.seed, run])
        mean = rng.uniform(lo, hi)
        sigma = config.sigma0
        cov = np.eye(dim)
        p_sigma = np.zeros(dim)
        p_c = np.zeros(dim)
        gen = 0
        run_evals = 0
        while run_evals + lam <= config.budget_evals:
            gen += 1
            eigvals, eigvecs = np.linalg.eigh(cov)
            eigvals = np.maximum(eigvals, 1e-20)
            d_diag = np.sqrt(eigvals)
            zs = rng.standard_normal((lam, dim))
            ys = zs @ (eigvecs * d_diag).T
            xs_eval = _reflect(mean + sigma * ys, lo, hi)
            costs = np.array([_cost(objective, x) for x in xs_eval])
            run_evals += lam
            evals += lam
            # stable argsort breaks cost ties by candidate index
            order = np.argsort(costs, kind="stable")
            if costs[order[0]] < best_val:
                best_val = float(costs[order[0]])
                best_x = xs_eval[order[0]].copy()
            history.append(best_val)

            sel = ys[order[:mu]]
            y_w = weights @ sel
            mean = mean + sigma * y_w

            inv_sqrt = (eigvecs / d_diag) @ eigvecs.T
            p_sigma = (1.0 - cs) * p_sigma + math.sqrt(cs * (2.0 - cs) * mueff) * (inv_sqrt @ y_w)
            h_sigma = float(
                np.linalg.norm(p_sigma) / math.sqrt(1.0 - (1.0 - cs) ** (2 * gen))
                < (1.4 + 2.0 / (dim + 1.0)) * chi_n
            )
            p_c = (1.0 - cc) * p_c + h_sigma * math.sqrt(cc * (2.0 - cc) * mueff) * y_w
            rank_mu = (weights[:, None] * sel).T @ sel
            cov = (
                (1.0 - c1 - cmu) * cov
                + c1 * (np.outer(p_c, p_c) + (1.0 - h_sigma) * cc * (2.0 - cc) * cov)
                + cmu * rank_mu
            )
            cov = (cov + cov.T) / 2.0
            sigma *= math.exp((cs / damps) * (np.linalg.norm(p_sigma) / chi_n - 1.0))
            sigma = min(sigma, 10.0)

    return OptResult(
        best_params=best_x,
        best_value=best_val,
        history=history,
        evals_used=evals,
        seed=config.seed,
    )


def random_search_minimize(objective: Callable[[np.ndarray], float], config: OptimizerConfig) -> OptResult:
    """Uniform random search baseline with the same budget/seed protocol."""
    lo, hi = config.lo_hi()
    best_val = math.inf
    best_x = (lo + hi) / 2.0
    history: list[float] = []
    evals = 0
    for run in range(config.runs):
        rng = np.random.default_rng([config.seed, run, 1])
        for _ in range(config.budget_evals):
            x = rng.uniform(lo, hi)
            v = _cost(objective, x)
            evals += 1
            if v < best_val:
                best_val = float(v)
                best_x = x.copy()
            history.append(best_val)
    return OptResult(best_params=best_x, best_value=best_val, history=history, evals_used=evals, seed=config.seed)


def kronecker_objective(n: int) -> Callable[[np.ndarray], float]:
    """Objective p -> exact discrepancy of the shifted unit-first Kronecker set."""

    def objective(p: np.ndarray) -> float:
        return star_discrepancy_exact(kronecker_with_unit_first(n, *p)).value

    return objective


def optimize_kronecker(n: int, d: int, config: OptimizerConfig, method: str = "cmaes") -> OptResult:
    """Search (p_2, ..., p_d) minimizing the discrepancy at one set size.

    d must be 2..4 so the exact evaluator applies.  A config carrying a
    single bound pair is broadcast to the d-1 search coordinates.
    ``method`` is "cmaes" or "random" (the baseline).
    """
    if d not in (2, 3, 4):
        raise ValueError(f"optimize_kronecker supports d in {{2,3,4}}, got d={d}")
    if config.dim == 1 and d - 1 != 1:
        config = replace(config, bounds=config.bounds * (d - 1))
    elif config.dim != d - 1:
        raise ValueError(f"config has {config.dim} bound pairs, need {d - 1}")
    objective = kronecker_objective(n)
    if method == "cmaes":
        return cmaes_minimize(objective, config)
    if method == "random":
        return random_search_minimize(objective, config)
    raise ValueError(f"unknown method {method!r}")
