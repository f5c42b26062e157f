"""Common-author counts and size-adjusted matching probabilities.

For two lists of ``n <= m`` unique authors, a per-comparison matching
probability ``p`` gives an expected common count of::

    E(k) = n * (1 - (1 - p)**m)

and an observed count ``k`` is inverted to::

    p_hat = 1 - (1 - k / n)**(1 / m)

Both are asymmetric in ``n`` and ``m``, so sizes are always reordered so
that ``n`` is the smaller.  Powers are evaluated through ``log1p``/``expm1``
because ``p`` is typically ~1e-6 and ``1/m`` ~1e-5, where the naive
expressions cancel catastrophically.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, DomainError, FormatError, UndefinedEstimateError
from .ingest import AreaAuthorList

PAIR_COLUMNS = ("area_a", "area_b", "n", "m", "k", "p_hat", "undefined")


def count_common(a: AreaAuthorList, b: AreaAuthorList) -> int:
    """Number of author keys present in both lists."""
    return len(a.authors & b.authors)


def expected_matches(n: float, m: float, p: float) -> float:
    """Expected number of common authors between lists of sizes ``n`` and ``m``."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"probability out of [0, 1]: {p!r}")
    if n < 0 or m < 0:
        raise DomainError(f"list sizes must be non-negative, got n={n!r}, m={m!r}")
    n, m = min(n, m), max(n, m)
    if n == 0 or p == 0.0:
        return 0.0
    if p == 1.0:
        return float(n)
    return n * -math.expm1(m * math.log1p(-p))


def estimate_p(k: float, n: float, m: float) -> float:
    """Invert an observed common count ``k`` into a matching probability.

    ``k`` may be real-valued; the pipeline passes integers from set
    intersection.

    Raises:
        UndefinedEstimateError: if either list is empty.
        DomainError: if ``k`` is negative or exceeds the smaller size.
    """
    n, m = min(n, m), max(n, m)
    if n <= 0:
        raise UndefinedEstimateError(f"matching probability undefined for empty list (n={n}, m={m})")
    if not 0 <= k <= n:
        raise DomainError(f"common count k={k!r} outside [0, {n}]")
    if k == 0:
        return 0.0
    if k == n:
        return 1.0
    p = -math.expm1(math.log1p(-k / n) / m)
    return min(max(p, 0.0), 1.0)


@dataclass(frozen=True)
class PairOverlap:
    """One pairwise comparison.  Area names are stored in sorted order."""

    area_a: str
    area_b: str
    n: int
    m: int
    k: int
    p_hat: float
    undefined: bool = False

    @property
    def pair(self) -> tuple[str, str]:
        return (self.area_a, self.area_b)


def pair_overlap(a: AreaAuthorList, b: AreaAuthorList) -> PairOverlap:
    """Compare two areas.  Pairs involving an empty list get ``p_hat = 0``, flagged undefined."""
    (name_a, size_a), (name_b, size_b) = sorted([(a.area_name, a.size), (b.area_name, b.size)])
    n, m = min(size_a, size_b), max(size_a, size_b)
    k = count_common(a, b)
    if n == 0:
        return PairOverlap(name_a, name_b, n, m, k, 0.0, True)
    return PairOverlap(name_a, name_b, n, m, k, estimate_p(k, n, m))


@dataclass(frozen=True)
class OverlapMatrix:
    """All unordered pairs of a set of areas, in ``combinations(areas, 2)`` order."""

    areas: tuple[str, ...]
    cells: tuple[PairOverlap, ...]

    def __post_init__(self):
        expected = len(self.areas) * (len(self.areas) - 1) // 2
        if len(self.cells) != expected:
            raise ConfigurationError(
                f"{len(self.areas)} areas need {expected} cells, got {len(self.cells)}"
            )

    def cell(self, a: str, b: str) -> PairOverlap:
        key = tuple(sorted((a, b)))
        for c in self.cells:
            if c.pair == key:
                return c
        raise KeyError((a, b))

    def p_values(self) -> np.ndarray:
        return np.array([c.p_hat for c in self.cells], dtype=float)

    def square(self) -> np.ndarray:
        """Symmetric ``p_hat`` matrix with NaN on the diagonal."""
        index = {name: i for i, name in enumerate(self.areas)}
        out = np.full((len(self.areas), len(self.areas)), np.nan)
        for c in self.cells:
            i, j = index[c.area_a], index[c.area_b]
            out[i, j] = out[j, i] = c.p_hat
        return out


def _check_names(lists):
    names = [a.area_name for a in lists]
    dupes = sorted({x for x in names if names.count(x) > 1})
    if dupes:
        raise ConfigurationError(f"duplicate area names: {', '.join(dupes)}")


def overlap_matrix(lists: Sequence[AreaAuthorList], threads: int = 1) -> OverlapMatrix:
    """Pairwise overlaps of every unordered pair of ``lists``.

    Cells are independent; with ``threads > 1`` they are computed on a
    thread pool and assembled in pair order, so the result does not
    depend on scheduling.
    """
    lists = list(lists)
    if len(lists) < 2:
        raise ConfigurationError("an overlap matrix needs at least two area lists")
    _check_names(lists)
    pairs = list(combinations(lists, 2))
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            cells = list(pool.map(lambda ab: pair_overlap(*ab), pairs))
    else:
        cells = [pair_overlap(a, b) for a, b in pairs]
    return OverlapMatrix(tuple(a.area_name for a in lists), tuple(cells))


def format_pairs_csv(matrix: OverlapMatrix) -> str:
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PAIR_COLUMNS)
    for c in matrix.cells:
        writer.writerow([c.area_a, c.area_b, c.n, c.m, c.k, repr(c.p_hat), int(c.undefined)])
    return buf.getvalue()


def parse_pairs_csv(text: str, areas: Sequence[str] | None = None) -> OverlapMatrix:
    """Rebuild an :class:`OverlapMatrix` from :func:`format_pairs_csv` output.

    Without ``areas`` the area order is the order of first appearance.
    """
    reader = csv.DictReader(io.StringIO(text, newline=""))
    missing = set(PAIR_COLUMNS) - set(reader.fieldnames or ())
    if missing:
        raise FormatError(f"pair CSV lacks columns {sorted(missing)}", 1)
    cells = []
    seen = []
    for row in reader:
        try:
            cell = PairOverlap(
                row["area_a"], row["area_b"], int(row["n"]), int(row["m"]), int(row["k"]),
                float(row["p_hat"]), bool(int(row["undefined"])),
            )
        except ValueError as exc:
            raise FormatError(str(exc), reader.line_num) from None
        cells.append(cell)
        for name in cell.pair:
            if name not in seen:
                seen.append(name)
    order = tuple(areas) if areas is not None else tuple(seen)
    index = {name: i for i, name in enumerate(order)}
    cells.sort(key=lambda c: tuple(sorted((index[c.area_a], index[c.area_b]))))
    return OverlapMatrix(order, tuple(cells))


def format_square_csv(matrix: OverlapMatrix) -> str:
    """``p_hat`` as a square table with area names on both axes; blank diagonal."""
    square = matrix.square()
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["", *matrix.areas])
    for name, row in zip(matrix.areas, square):
        writer.writerow([name, *("" if math.isnan(v) else repr(float(v)) for v in row)])
    return buf.getvalue()
