"""Research-area relatedness from shared authors.

Relatedness of research areas measured by the authors they share,
adjusted for area size and corrected for name-homonymy noise.
"""

from .errors import (
    CapacityError,
    ConfigurationError,
    DomainError,
    FormatError,
    NormalizationError,
    ScanError,
    UndefinedEstimateError,
)
from .ingest import (
    AreaAuthorList,
    AuthorKey,
    RawRecord,
    build_area_list,
    normalize_author,
    parse_records,
    read_records,
)
from .montecarlo import (
    McConfig,
    McResult,
    exact_expected_matches,
    exact_match_distribution,
    mc_expected_matches,
    simulate_trial,
    validate_grid,
)
from .network import RelatednessGraph, build_graph, export_graph, graph_from_json, link_strength
from .noise import (
    DistributionSummary,
    Histogram,
    NoiseModel,
    ProbabilitySample,
    cross_noise_sample,
    histogram,
    noise_model,
    relatedness_ratio,
    signal_minus_noise,
    signal_to_noise,
    spotcheck_interval,
    stats_report,
    summarize,
    within_sample,
)
from .overlap import OverlapMatrix, PairOverlap, count_common, estimate_p, expected_matches, overlap_matrix

__version__ = "0.1.0"
