"""Entropy, perplexity, and observed-vs-model comparisons on ranked distributions."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import FrequencyTable, RankedDistribution, rank
from .errors import DomainError
from .fit import ComparisonReport, compare
from .models import ParametricModel


def empirical_entropy(dist: RankedDistribution) -> float:
    """Plug-in Shannon entropy in bits."""
    p = dist.probs
    return float(-(p * np.log2(p)).sum())


def perplexity(dist: RankedDistribution) -> float:
    return float(2.0 ** empirical_entropy(dist))


def normalize_for_comparison(a: RankedDistribution, b: RankedDistribution) -> tuple[np.ndarray, np.ndarray]:
    """Both distributions as probabilities over their shared ranks 1..min(N_a, N_b)."""
    n = min(a.N, b.N)
    pa = a.probs[:n] / a.probs[:n].sum()
    pb = b.probs[:n] / b.probs[:n].sum()
    return pa, pb


@dataclass(frozen=True)
class PointwiseComparison:
    ranks: np.ndarray
    observed: np.ndarray
    model: np.ndarray
    observed_bits: float
    model_bits: float

    @property
    def differences(self) -> np.ndarray:
        return self.observed - self.model

    def rows(self):
        return zip(self.ranks.tolist(), self.observed.tolist(), self.model.tolist())


def pointwise_compare(dist: RankedDistribution, model: ParametricModel) -> PointwiseComparison:
    """Per-rank observed vs model probabilities, the model renormalized to ranks 1..N.

    The attached entropies are the observed plug-in entropy and the model's own
    entropy over its full support.
    """
    if model.bounded and model.support_size < dist.N:
        raise DomainError(f"model support {model.support_size} does not cover {dist.N} ranks")
    m = np.asarray(model.pmf(dist.ranks), dtype=float)
    return PointwiseComparison(
        ranks=dist.ranks,
        observed=np.asarray(dist.probs, dtype=float),
        model=m / m.sum(),
        observed_bits=empirical_entropy(dist),
        model_bits=model.entropy(),
    )


@dataclass(frozen=True)
class TrajectoryPoint:
    step: int
    population: float
    perplexity: float
    entropy_bits: float
    report: ComparisonReport | None
    step_perplexity: float
    step_entropy_bits: float


def trajectory(
    tables: Sequence[FrequencyTable],
    sizes: Sequence[float] | None = None,
    mode: str = "regression",
) -> list[TrajectoryPoint]:
    """Cumulative entropy/perplexity/fit after each step of ``tables``.

    ``population`` is ``sizes[i]`` when given, else cumulative token count.
    Steps whose pooled table has fewer than 3 types carry no report.
    """
    if not tables:
        raise ValueError("trajectory needs at least one table")
    if sizes is not None and len(sizes) != len(tables):
        raise ValueError("sizes must match tables in length")
    points = []
    pooled: dict[str, int] = {}
    for i, table in enumerate(tables):
        for label, c in table.entries.items():
            pooled[label] = pooled.get(label, 0) + c
        dist = rank(FrequencyTable(pooled))
        step_dist = rank(table)
        h = empirical_entropy(dist)
        step_h = empirical_entropy(step_dist)
        points.append(
            TrajectoryPoint(
                step=i + 1,
                population=float(sizes[i]) if sizes is not None else float(dist.total_tokens),
                perplexity=float(2.0**h),
                entropy_bits=h,
                report=compare(dist, mode) if dist.N >= 3 else None,
                step_perplexity=float(2.0**step_h),
                step_entropy_bits=step_h,
            )
        )
    return points
