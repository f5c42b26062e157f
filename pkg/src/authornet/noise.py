"""Name-homonymy noise floor and distribution statistics.

Pairs of areas from unrelated domains should share no real authors, so
the matching probabilities between them measure false matches caused by
distinct people sharing a last name and initials.  The median and mean of
that cross-domain sample form the noise floor against which within-domain
samples are compared.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from itertools import permutations
from typing import Sequence

import numpy as np
from scipy import stats

from .errors import ConfigurationError, DomainError, UndefinedEstimateError
from .ingest import AreaAuthorList
from .overlap import OverlapMatrix, pair_overlap

PROVENANCES = ("within-domain", "cross-domain")


@dataclass(frozen=True)
class ProbabilitySample:
    values: tuple[float, ...]
    provenance: str
    pair_labels: tuple[tuple[str, str], ...]

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if len(self.values) != len(self.pair_labels):
            raise ValueError("values and pair_labels differ in length")
        if any(not 0.0 <= v <= 1.0 for v in self.values):
            raise DomainError("sample values must lie in [0, 1]")
        if any(a == b for a, b in self.pair_labels):
            raise ValueError("self-pairs are not allowed in a sample")

    def __len__(self):
        return len(self.values)

    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


@dataclass(frozen=True)
class DistributionSummary:
    median: float
    mean: float
    count: int
    zero_fraction: float


@dataclass(frozen=True)
class NoiseModel:
    median_p0: float
    mean_p0: float
    sample: ProbabilitySample

    def floor(self, statistic: str = "mean") -> float:
        if statistic == "mean":
            return self.mean_p0
        if statistic == "median":
            return self.median_p0
        raise ValueError(f"unknown noise statistic {statistic!r}")


@dataclass(frozen=True)
class Histogram:
    """Equal-width, left-closed right-open bins plus out-of-range tallies."""

    bin_edges: tuple[float, ...]
    counts: tuple[int, ...]
    total: int
    underflow: int = 0
    overflow: int = 0


def cross_noise_sample(
    domain_a: Sequence[AreaAuthorList], domain_b: Sequence[AreaAuthorList]
) -> ProbabilitySample:
    """Matching probabilities for every pair with one area from each domain.

    Zeros, including those of pairs with an empty list, stay in the sample.
    """
    if not domain_a or not domain_b:
        raise ConfigurationError("both domains need at least one area")
    shared = {a.area_name for a in domain_a} & {b.area_name for b in domain_b}
    if shared:
        raise ConfigurationError(f"areas present in both domains: {', '.join(sorted(shared))}")
    values, labels = [], []
    for a in domain_a:
        for b in domain_b:
            values.append(pair_overlap(a, b).p_hat)
            labels.append((a.area_name, b.area_name))
    return ProbabilitySample(tuple(values), "cross-domain", tuple(labels))


def within_sample(matrix: OverlapMatrix) -> ProbabilitySample:
    """The upper-triangle probabilities of one domain's overlap matrix."""
    return ProbabilitySample(
        tuple(c.p_hat for c in matrix.cells),
        "within-domain",
        tuple(c.pair for c in matrix.cells),
    )


def summarize(sample) -> DistributionSummary:
    """Median (mean of the central pair for even counts), mean and share of exact zeros."""
    values = sample.array() if isinstance(sample, ProbabilitySample) else np.asarray(sample, dtype=float)
    if values.size == 0:
        raise ValueError("cannot summarize an empty sample")
    return DistributionSummary(
        float(np.median(values)),
        float(np.mean(values)),
        int(values.size),
        float(np.count_nonzero(values == 0.0) / values.size),
    )


def noise_model(sample: ProbabilitySample) -> NoiseModel:
    s = summarize(sample)
    return NoiseModel(s.median, s.mean, sample)


def signal_to_noise(signal: DistributionSummary, noise: DistributionSummary) -> float:
    if not noise.median > 0:
        raise UndefinedEstimateError("signal-to-noise undefined: noise median is zero")
    return signal.median / noise.median


def signal_minus_noise(signal: DistributionSummary, noise: DistributionSummary) -> float:
    """Difference of medians; negative when the signal sits below the noise."""
    return signal.median - noise.median


def signal_minus_noise_mean(signal: DistributionSummary, noise: DistributionSummary) -> float:
    """Signal median less the noise mean, i.e. the median link strength."""
    return signal.median - noise.mean


def relatedness_ratio(a_minus_n: float, b_minus_n: float) -> float:
    if b_minus_n == 0:
        raise UndefinedEstimateError("relatedness ratio undefined: zero denominator")
    return a_minus_n / b_minus_n


def histogram(sample, bin_count: int, range: tuple[float, float] | None = None) -> Histogram:
    """Bin a sample into ``bin_count`` equal-width bins.

    Without ``range`` the bins span ``[0, max]`` with the upper edge nudged
    one ulp up so the maximum lands in the last bin (``[0, 1)`` for an
    all-zero sample).  With an explicit range, values ``>= hi`` go to
    ``overflow`` and values ``< lo`` to ``underflow``.
    """
    values = sample.array() if isinstance(sample, ProbabilitySample) else np.asarray(sample, dtype=float)
    if values.size == 0:
        raise ValueError("cannot histogram an empty sample")
    if bin_count < 1:
        raise ValueError("bin_count must be >= 1")
    if range is None:
        top = float(values.max())
        lo, hi = 0.0, (math.nextafter(top, math.inf) if top > 0 else 1.0)
    else:
        lo, hi = map(float, range)
        if not lo < hi:
            raise ValueError(f"empty histogram range [{lo}, {hi})")
    edges = np.linspace(lo, hi, bin_count + 1)
    edges[-1] = hi
    idx = np.searchsorted(edges, values, side="right") - 1
    underflow = int(np.count_nonzero(idx < 0))
    overflow = int(np.count_nonzero(idx >= bin_count))
    inside = idx[(idx >= 0) & (idx < bin_count)]
    counts = np.bincount(inside, minlength=bin_count)
    return Histogram(
        tuple(float(e) for e in edges), tuple(int(c) for c in counts),
        int(values.size), underflow, overflow,
    )


def spotcheck_interval(
    errors_found: int, samples_checked: int, confidence: float = 0.95, sided: str = "two"
) -> tuple[float, float]:
    """Exact (Clopper-Pearson) interval for an error rate seen in a manual check.

    ``sided`` is ``"two"``, ``"upper"`` (one-sided upper bound, lower end 0)
    or ``"lower"``.
    """
    if samples_checked < 1 or not 0 <= errors_found <= samples_checked:
        raise DomainError(f"invalid counts: {errors_found} of {samples_checked}")
    if not 0 < confidence < 1:
        raise DomainError(f"confidence must lie in (0, 1), got {confidence}")
    x, n = errors_found, samples_checked
    alpha = 1 - confidence
    tail = {"two": alpha / 2, "upper": alpha, "lower": alpha}.get(sided)
    if tail is None:
        raise ValueError(f"unknown sided {sided!r}")
    lo = 0.0 if x == 0 or sided == "upper" else float(stats.beta.ppf(tail, x, n - x + 1))
    hi = 1.0 if x == n or sided == "lower" else float(stats.beta.ppf(1 - tail, x + 1, n - x))
    return lo, hi


# -- reports ---------------------------------------------------------------

S_MINUS_N_READINGS = ("difference_of_medians", "median_minus_noise_mean")


def stats_report(domains: dict[str, DistributionSummary], noise: DistributionSummary) -> dict:
    """Signal-versus-noise statistics for one or more domains.

    The difference to the noise is given under two readings: against the
    noise median and against the noise mean.  With two or more domains,
    ratios of these differences are listed for every ordered pair and
    every combination of readings.
    """
    report = {"noise": _summary_dict(noise), "domains": {}, "ratios": []}
    for name, summary in domains.items():
        entry = _summary_dict(summary)
        try:
            entry["s_over_n"] = signal_to_noise(summary, noise)
        except UndefinedEstimateError:
            entry["s_over_n"] = None
        entry["s_minus_n"] = {
            "difference_of_medians": signal_minus_noise(summary, noise),
            "median_minus_noise_mean": signal_minus_noise_mean(summary, noise),
        }
        report["domains"][name] = entry
    for a, b in permutations(domains, 2):
        readings = {}
        for ra in S_MINUS_N_READINGS:
            for rb in S_MINUS_N_READINGS:
                num = report["domains"][a]["s_minus_n"][ra]
                den = report["domains"][b]["s_minus_n"][rb]
                try:
                    readings[f"{ra}/{rb}"] = relatedness_ratio(num, den)
                except UndefinedEstimateError:
                    readings[f"{ra}/{rb}"] = None
        report["ratios"].append({"numerator": a, "denominator": b, "values": readings})
    return report


def _summary_dict(s):
    return {"median": s.median, "mean": s.mean, "count": s.count, "zero_fraction": s.zero_fraction}


def summary_from_dict(d: dict) -> DistributionSummary:
    return DistributionSummary(
        float(d["median"]), float(d["mean"]), int(d.get("count", 0)), float(d.get("zero_fraction", 0.0))
    )


def _g(v):
    return "--" if v is None else f"{v:.4g}"


def _f2(v):
    return "--" if v is None else f"{v:.2f}"


def format_stats_table(report: dict, scale: float = 1e-6) -> str:
    """Aligned plain-text rendering of :func:`stats_report` output.

    Probabilities are shown in units of ``scale``; the ``S-N (mean)`` column
    is the difference to the noise mean.
    """
    header = ["", f"Median (x{scale:g})", f"Mean (x{scale:g})", "S/N", "S-N", "S-N (mean)"]
    rows = [["noise", _g(report["noise"]["median"] / scale), _g(report["noise"]["mean"] / scale), "--", "--", "--"]]
    for name, d in report["domains"].items():
        rows.append([
            name, _g(d["median"] / scale), _g(d["mean"] / scale), _f2(d["s_over_n"]),
            _g(d["s_minus_n"]["difference_of_medians"] / scale),
            _g(d["s_minus_n"]["median_minus_noise_mean"] / scale),
        ])
    widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]
    lines = ["  ".join(cell.rjust(w) if i else cell.ljust(w) for i, (cell, w) in enumerate(zip(r, widths)))
             for r in [header, *rows]]
    for ratio in report["ratios"]:
        lines.append("")
        lines.append(f"ratio {ratio['numerator']}/{ratio['denominator']}:")
        for key, value in ratio["values"].items():
            lines.append(f"  {key:<50} {_g(value)}")
    return "\n".join(lines) + "\n"


# -- serialization ---------------------------------------------------------

def sample_to_csv(sample: ProbabilitySample) -> str:
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["area_a", "area_b", "p_hat"])
    for (a, b), v in zip(sample.pair_labels, sample.values):
        writer.writerow([a, b, repr(v)])
    return buf.getvalue()


def noise_model_to_json(model: NoiseModel) -> str:
    s = summarize(model.sample)
    doc = {
        "median_p0": model.median_p0,
        "mean_p0": model.mean_p0,
        "count": s.count,
        "zero_fraction": s.zero_fraction,
        "provenance": model.sample.provenance,
        "pairs": [list(p) for p in model.sample.pair_labels],
        "values": list(model.sample.values),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def noise_model_from_json(text: str) -> NoiseModel:
    doc = json.loads(text)
    sample = ProbabilitySample(
        tuple(float(v) for v in doc["values"]),
        doc["provenance"],
        tuple(tuple(p) for p in doc["pairs"]),
    )
    return NoiseModel(float(doc["median_p0"]), float(doc["mean_p0"]), sample)


def histogram_to_csv(h: Histogram) -> str:
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["kind", "lo", "hi", "count"])
    writer.writerow(["underflow", "-inf", repr(h.bin_edges[0]), h.underflow])
    for lo, hi, c in zip(h.bin_edges[:-1], h.bin_edges[1:], h.counts):
        writer.writerow(["bin", repr(lo), repr(hi), c])
    writer.writerow(["overflow", repr(h.bin_edges[-1]), "inf", h.overflow])
    return buf.getvalue()


def histogram_to_json(h: Histogram) -> str:
    doc = {
        "bin_edges": list(h.bin_edges), "counts": list(h.counts), "total": h.total,
        "underflow": h.underflow, "overflow": h.overflow,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
