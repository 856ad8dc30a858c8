"""Rank-frequency toolkit: geometric vs. power-law fits, entropy, mixture experiments, Golomb codes."""
from .core import (
    FrequencyTable,
    GroupKey,
    RankedDistribution,
    Schema,
    count_conditioned_tokens,
    filter_min_count,
    load_counts,
    load_tokens,
    pool,
    rank,
)
from .fit import ComparisonReport, FitResult, compare, pearson
from .infometrics import empirical_entropy, perplexity
from .models import GeometricModel, MixtureModel, ZipfModel, model_entropy, solve_geometric_for_entropy

__version__ = "0.1.0"
