"""Monte Carlo check of the analytic expected-match formula.

The simulated process is the exact one the closed form approximates:
each of the ``n`` authors of the smaller list is compared in turn with the
authors still unmatched in the larger list, every comparison succeeding
independently with probability ``p``.  The first success counts a match,
removes that author from the larger list and moves on to the next element.

Two samplers are provided.  :func:`simulate_trial` runs one trial
comparison by comparison and is the reference.  The default sampler
advances a whole population of trials at once: after ``i`` elements a
trial is fully described by its match count ``k``, and the next element
matches with probability ``q = 1 - (1 - p)**(m - k)``, so the number of
trials moving from ``k`` to ``k + 1`` is binomial.  The histogram of match
counts it returns has the same distribution as that of independent trials,
at a cost independent of the number of trials.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import CapacityError, DomainError
from .overlap import expected_matches

EXACT_GUARD = 10**7
BLOCK_TRIALS = 1 << 24

GRID_COLUMNS = (
    "n", "m", "p", "trials", "analytic", "mc_mean", "mc_stderr", "exact",
    "rel_err_mc", "rel_err_exact",
)


def _check_p(p):
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"probability out of [0, 1]: {p!r}")


def _element_match_prob(remaining, p):
    """Probability that one small-list element matches some of ``remaining`` authors."""
    remaining = np.asarray(remaining, dtype=float)
    if p == 1.0:
        return (remaining > 0).astype(float)
    return -np.expm1(remaining * math.log1p(-p))


@dataclass(frozen=True)
class McConfig:
    n: int
    m: int
    p: float
    trials: int
    seed: int = 0

    def __post_init__(self):
        _check_p(self.p)
        if self.trials < 1:
            raise DomainError(f"trials must be >= 1, got {self.trials}")
        if self.n < 0 or self.m < 0:
            raise DomainError("list sizes must be non-negative")
        if self.n > self.m:
            n, m = self.n, self.m
            object.__setattr__(self, "n", m)
            object.__setattr__(self, "m", n)


@dataclass(frozen=True)
class McResult:
    config: McConfig
    mean_matches: float
    std_error: float
    trials: int
    analytic_expected: float
    relative_error: float | None
    counts: np.ndarray = field(repr=False, compare=False)

    @property
    def undefined(self) -> bool:
        return self.relative_error is None


def simulate_trial(n: int, m: int, p: float, rng: np.random.Generator, shuffle: bool = False) -> int:
    """One trial of the sequential matching process, comparison by comparison.

    With ``shuffle`` the remaining larger-list authors are scanned in a
    fresh random order for every element instead of list order.
    """
    _check_p(p)
    n, m = min(n, m), max(n, m)
    remaining = list(range(m))
    matches = 0
    for _ in range(n):
        if not remaining:
            break
        order = rng.permutation(len(remaining)) if shuffle else np.arange(len(remaining))
        hits = np.flatnonzero(rng.random(len(remaining)) < p)
        if hits.size:
            remaining.pop(int(order[hits[0]]))
            matches += 1
    return matches


def match_count_histogram(n: int, m: int, p: float, trials: int, rng: np.random.Generator) -> np.ndarray:
    """Counts of trials ending with ``k = 0..n`` matches (population sampler)."""
    _check_p(p)
    n, m = min(n, m), max(n, m)
    q = _element_match_prob(m - np.arange(n + 1), p)
    counts = np.zeros(n + 2, dtype=np.int64)
    counts[0] = trials
    lo = hi = 0
    for _ in range(n):
        moved = rng.binomial(counts[lo:hi + 1], q[lo:hi + 1])
        counts[lo:hi + 1] -= moved
        counts[lo + 1:hi + 2] += moved
        if counts[hi + 1]:
            hi += 1
        while lo < hi and not counts[lo]:
            lo += 1
    return counts[:n + 1]


def _block_streams(seed, trials):
    blocks = []
    start = 0
    index = 0
    while start < trials:
        size = min(BLOCK_TRIALS, trials - start)
        ss = np.random.SeedSequence(seed, spawn_key=(index,))
        blocks.append((size, np.random.default_rng(ss)))
        start += size
        index += 1
    return blocks


def _moments(counts, trials):
    k = np.arange(len(counts), dtype=float)
    c = counts.astype(float)
    mean = float(c @ k) / trials
    if trials < 2:
        return mean, 0.0
    var = float(c @ (k - mean) ** 2) / (trials - 1)
    return mean, math.sqrt(var / trials)


def mc_expected_matches(config: McConfig, method: str = "population", threads: int = 1) -> McResult:
    """Estimate the expected number of matches by simulation.

    ``method="population"`` splits the trials into fixed blocks of
    ``BLOCK_TRIALS``, each with its own stream spawned from the seed.
    ``method="reference"`` runs :func:`simulate_trial` per trial on a stream
    spawned from ``(seed, trial index)``; it is only practical for small
    sizes.  Both are deterministic in the configuration and independent of
    ``threads``.
    """
    n, m, p, trials = config.n, config.m, config.p, config.trials
    if method == "population":
        blocks = _block_streams(config.seed, trials)
        run = lambda block: match_count_histogram(n, m, p, block[0], block[1])
        if threads > 1 and len(blocks) > 1:
            with ThreadPoolExecutor(threads) as pool:
                parts = list(pool.map(run, blocks))
        else:
            parts = [run(b) for b in blocks]
        counts = np.sum(parts, axis=0)
    elif method == "reference":
        counts = np.zeros(n + 1, dtype=np.int64)
        for t in range(trials):
            rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(t,)))
            counts[simulate_trial(n, m, p, rng)] += 1
    else:
        raise ValueError(f"unknown method {method!r}")
    mean, se = _moments(counts, trials)
    analytic = expected_matches(n, m, p)
    rel = abs(mean - analytic) / analytic if analytic > 0 else None
    return McResult(config, mean, se, trials, analytic, rel, counts)


def exact_expected_matches(n: int, m: int, p: float) -> float:
    """Expected matches of the sequential process, by dynamic programming.

    Evaluates ``E(i, j) = q_j * (1 + E(i-1, j-1)) + (1 - q_j) * E(i-1, j)``
    with ``q_j = 1 - (1 - p)**j`` and ``E(0, .) = E(., 0) = 0``.

    Raises:
        CapacityError: when ``n * m`` exceeds ``EXACT_GUARD``.
    """
    _check_p(p)
    n, m = min(n, m), max(n, m)
    if n * m > EXACT_GUARD:
        raise CapacityError(f"n*m = {n * m} exceeds {EXACT_GUARD}; use mc_expected_matches")
    if n == 0:
        return 0.0
    q = _element_match_prob(np.arange(m + 1), p)
    e = np.zeros(m + 1)
    for _ in range(n):
        nxt = np.zeros(m + 1)
        nxt[1:] = q[1:] * (1.0 + e[:-1]) + (1.0 - q[1:]) * e[1:]
        e = nxt
    return float(e[m])


def exact_match_distribution(n: int, m: int, p: float) -> np.ndarray:
    """Probability of ending with ``k = 0..n`` matches under the sequential process."""
    _check_p(p)
    n, m = min(n, m), max(n, m)
    if n * (n + 1) > EXACT_GUARD:
        raise CapacityError(f"n = {n} too large for the exact distribution")
    q = _element_match_prob(m - np.arange(n + 1), p)
    prob = np.zeros(n + 1)
    prob[0] = 1.0
    for _ in range(n):
        moved = prob * q
        prob = prob - moved
        prob[1:] += moved[:-1]
    return prob


@dataclass(frozen=True)
class GridCell:
    n: int
    m: int
    p: float
    trials: int
    analytic: float
    mc_mean: float
    mc_stderr: float
    exact: float | None
    rel_err_mc: float | None
    rel_err_exact: float | None

    @property
    def rel_stderr(self) -> float | None:
        return self.mc_stderr / self.mc_mean if self.mc_mean > 0 else None


@dataclass(frozen=True)
class GridReport:
    cells: tuple[GridCell, ...]

    def summary(self) -> dict:
        def worst(values):
            values = [v for v in values if v is not None]
            return max(values) if values else None

        return {
            "cells": len(self.cells),
            "undefined_cells": sum(c.rel_err_mc is None for c in self.cells),
            "max_rel_err_mc": worst(c.rel_err_mc for c in self.cells),
            "max_rel_err_exact": worst(c.rel_err_exact for c in self.cells),
            "max_rel_stderr": worst(c.rel_stderr for c in self.cells),
        }

    def to_csv(self) -> str:
        buf = io.StringIO(newline="")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(GRID_COLUMNS)
        for c in self.cells:
            row = asdict(c)
            writer.writerow(["" if row[k] is None else repr(row[k]) for k in GRID_COLUMNS])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True) + "\n"


def trials_for_stderr(analytic: float, target: float, min_trials: int = 1000, max_trials: int = 10**13) -> int:
    """Trials needed for a relative standard error of about ``target``.

    The match count is a sum of negatively correlated indicators, so its
    variance is at most its mean; the factor 2 covers the exact mean being
    below the analytic one.
    """
    if analytic <= 0:
        return min_trials
    return int(min(max(math.ceil(2.0 / (target * target * analytic)), min_trials), max_trials))


def validate_grid(
    n_values,
    m_values,
    p_values,
    trials: int | None = None,
    seed: int = 0,
    target_rel_stderr: float | None = None,
    threads: int = 1,
) -> GridReport:
    """Compare simulation, exact recursion and the closed form over a grid.

    Every ``(n, m, p)`` with ``n <= m`` is evaluated.  Either a fixed
    ``trials`` count or a ``target_rel_stderr`` (trials chosen per cell
    with :func:`trials_for_stderr`) must be given.  The exact value is
    ``None`` where the recursion exceeds its size guard.
    """
    if (trials is None) == (target_rel_stderr is None):
        raise ValueError("give exactly one of trials or target_rel_stderr")
    if not (n_values and m_values and p_values):
        raise ValueError("grid axes must be non-empty")
    for p in p_values:
        _check_p(p)
    cells = []
    index = 0
    for n in n_values:
        for m in m_values:
            if n > m:
                continue
            for p in p_values:
                analytic = expected_matches(n, m, p)
                t = trials if trials is not None else trials_for_stderr(analytic, target_rel_stderr)
                cell_seed = int(np.random.SeedSequence(seed, spawn_key=(index,)).generate_state(1, np.uint64)[0])
                index += 1
                res = mc_expected_matches(McConfig(int(n), int(m), float(p), int(t), cell_seed), threads=threads)
                try:
                    exact = exact_expected_matches(int(n), int(m), float(p))
                except CapacityError:
                    exact = None
                rel_exact = abs(exact - analytic) / analytic if exact is not None and analytic > 0 else None
                cells.append(GridCell(
                    int(n), int(m), float(p), int(t), analytic, res.mean_matches, res.std_error,
                    exact, res.relative_error, rel_exact,
                ))
    return GridReport(tuple(cells))
