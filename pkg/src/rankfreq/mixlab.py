"""Mixture and aggregation experiments.

Pool many geometric samples and watch which family fits the pooled
rank-frequency curve. Component streams derive from the master seed by
component index, so results do not depend on evaluation order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import FrequencyTable, RankedDistribution, RankLabels, pool, rank
from .fit import ComparisonReport, compare, pearson
from .models import GeometricModel, derive_seed, stream

__all__ = [
    "AggregateStep",
    "ExperimentReport",
    "MixtureExperimentSpec",
    "box_stats",
    "cumulative_aggregate",
    "draw_qs",
    "geometric_steps",
    "pool",
    "run_mixture_experiment",
    "run_size_experiment",
    "size_fit_correlation",
]

LAWS = ("log-uniform", "uniform")


@dataclass(frozen=True)
class MixtureExperimentSpec:
    """K geometric components with q_i drawn from [q_lo, q_hi].

    ``law="log-uniform"`` draws the expected rank 1/(1-q) log-uniformly;
    ``law="uniform"`` draws q uniformly. q_lo == q_hi gives the homogeneous control.
    The default range puts expected ranks between 2 and 10^5, i.e. up to the
    default component size; narrower ranges pool to a near-geometric curve.
    """

    k: int
    q_lo: float = 0.5
    q_hi: float = 0.99999
    tokens: int | tuple[int, ...] = 100_000
    label_sharing: str = "disjoint"
    law: str = "log-uniform"
    seed: int = 0
    mode: str = "regression"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not 0.0 < self.q_lo <= self.q_hi < 1.0:
            raise ValueError(f"need 0 < q_lo <= q_hi < 1, got {self.q_lo}, {self.q_hi}")
        if self.label_sharing not in ("disjoint", "shared"):
            raise ValueError(f"label_sharing must be disjoint or shared, got {self.label_sharing!r}")
        if self.law not in LAWS:
            raise ValueError(f"law must be one of {LAWS}, got {self.law!r}")
        if not isinstance(self.tokens, int):
            object.__setattr__(self, "tokens", tuple(int(t) for t in self.tokens))
            if len(self.tokens) != self.k:
                raise ValueError("per-component token list must have k entries")
        if min(self.sizes) < 1:
            raise ValueError("every component needs at least one token")

    @property
    def sizes(self) -> tuple[int, ...]:
        return (self.tokens,) * self.k if isinstance(self.tokens, int) else self.tokens

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "q_lo": self.q_lo,
            "q_hi": self.q_hi,
            "tokens": self.tokens if isinstance(self.tokens, int) else list(self.tokens),
            "label_sharing": self.label_sharing,
            "law": self.law,
            "seed": self.seed,
            "mode": self.mode,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MixtureExperimentSpec":
        d = dict(d)
        if isinstance(d.get("tokens"), list):
            d["tokens"] = tuple(d["tokens"])
        return cls(**d)


def draw_qs(spec: MixtureExperimentSpec) -> np.ndarray:
    u = stream(spec.seed, 0).random(spec.k)
    if spec.law == "uniform":
        return spec.q_lo + u * (spec.q_hi - spec.q_lo)
    lo, hi = math.log(1.0 / (1.0 - spec.q_lo)), math.log(1.0 / (1.0 - spec.q_hi))
    return 1.0 - np.exp(-(lo + u * (hi - lo)))


def box_stats(values: Sequence[float]) -> dict:
    q1, med, q3 = np.percentile(np.asarray(values, dtype=float), [25, 50, 75])
    return {"q1": float(q1), "median": float(med), "q3": float(q3),
            "min": float(np.min(values)), "max": float(np.max(values))}


@dataclass(frozen=True)
class ExperimentReport:
    spec: MixtureExperimentSpec
    qs: tuple[float, ...]
    sizes: tuple[int, ...]
    components: tuple[ComparisonReport, ...]
    pooled: ComparisonReport
    summary: dict = field(default_factory=dict)

    def component_r2(self, family: str) -> np.ndarray:
        return np.array([getattr(c, family).r2 for c in self.components])

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "qs": list(self.qs),
            "sizes": list(self.sizes),
            "summary": self.summary,
            "pooled": self.pooled.to_dict(),
            "components": [c.to_dict() for c in self.components],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        return cls(
            spec=MixtureExperimentSpec.from_dict(d["spec"]),
            qs=tuple(d["qs"]),
            sizes=tuple(d["sizes"]),
            components=tuple(ComparisonReport.from_dict(c) for c in d["components"]),
            pooled=ComparisonReport.from_dict(d["pooled"]),
            summary=d["summary"],
        )

    def tsv_rows(self):
        """Per-component r2 rows for box plots, pooled row last."""
        yield ("component", "q", "tokens", "geometric_r2", "zipf_r2", "preferred")
        for i, (q, n, c) in enumerate(zip(self.qs, self.sizes, self.components)):
            yield (str(i), repr(q), str(n), repr(c.geometric.r2), repr(c.zipf.r2), c.preferred)
        p = self.pooled
        yield ("pooled", "", str(sum(self.sizes)), repr(p.geometric.r2), repr(p.zipf.r2), p.preferred)


def _ranked(counts: np.ndarray) -> RankedDistribution:
    counts = counts[counts > 0]
    return RankedDistribution(RankLabels(len(counts)), np.sort(counts)[::-1])


def _component_vectors(spec: MixtureExperimentSpec, qs: np.ndarray) -> list[np.ndarray]:
    return [
        GeometricModel(float(q)).rank_counts(n, derive_seed(spec.seed, i))[1:]
        for i, (q, n) in enumerate(zip(qs, spec.sizes))
    ]


def _merge(vectors: list[np.ndarray], shared: bool) -> np.ndarray:
    if not shared:
        return np.concatenate(vectors)
    merged = np.zeros(max(len(v) for v in vectors), dtype=np.int64)
    for v in vectors:
        merged[: len(v)] += v
    return merged


def run_mixture_experiment(spec: MixtureExperimentSpec) -> ExperimentReport:
    """Sample K geometric components, fit each one and their pool.

    Works on rank-indexed count vectors rather than labelled tables; the
    draws are the same ones ``GeometricModel.sample`` would make.
    """
    qs = draw_qs(spec)
    vectors = _component_vectors(spec, qs)
    reports = tuple(compare(_ranked(v), spec.mode) for v in vectors)
    pooled = compare(_ranked(_merge(vectors, spec.label_sharing == "shared")), spec.mode)
    summary = {
        "geometric_r2": box_stats([c.geometric.r2 for c in reports]),
        "zipf_r2": box_stats([c.zipf.r2 for c in reports]),
        "pooled_geometric_r2": pooled.geometric.r2,
        "pooled_zipf_r2": pooled.zipf.r2,
        "pooled_preferred": pooled.preferred,
    }
    return ExperimentReport(spec, tuple(float(q) for q in qs), spec.sizes, reports, pooled, summary)


@dataclass(frozen=True)
class AggregateStep:
    step: int
    step_report: ComparisonReport
    cumulative_report: ComparisonReport


def geometric_steps(
    qs: Sequence[float], tokens: int, seed: int, label_sharing: str = "disjoint"
) -> list[FrequencyTable]:
    """One sampled geometric table per q, e.g. successive decades.

    Disjoint steps get labels prefixed ``s{i}:``; shared steps reuse ``r{rank}``.
    """
    if label_sharing not in ("disjoint", "shared"):
        raise ValueError(f"label_sharing must be disjoint or shared, got {label_sharing!r}")
    return [
        GeometricModel(float(q)).sample(tokens, derive_seed(seed, i), f"s{i}:" if label_sharing == "disjoint" else "")
        for i, q in enumerate(qs)
    ]


def cumulative_aggregate(tables: Sequence[FrequencyTable], mode: str = "regression") -> list[AggregateStep]:
    """Fit each step's own table and the pool of all tables up to that step."""
    if not tables:
        raise ValueError("need at least one table")
    steps = []
    running: FrequencyTable | None = None
    for i, table in enumerate(tables):
        running = table if running is None else pool([running, table])
        own = compare(rank(table), mode)
        cum = own if i == 0 else compare(rank(running), mode)
        steps.append(AggregateStep(i + 1, own, cum))
    return steps


def size_fit_correlation(pairs: Sequence[tuple[float, float]]) -> float:
    """Pearson correlation of (population size, geometric r2) pairs."""
    if len(pairs) < 3:
        raise ValueError("need at least 3 (size, r2) pairs")
    sizes, r2s = zip(*pairs)
    return pearson(sizes, r2s)


def run_size_experiment(
    sizes: Sequence[int],
    seed: int,
    community_tokens: int = 1000,
    q_lo: float = 0.5,
    q_hi: float = 0.999,
    law: str = "log-uniform",
    mode: str = "regression",
) -> list[tuple[int, ComparisonReport]]:
    """Fit populations that grow by adding local communities.

    A population of n tokens is ceil(n / community_tokens) communities, each a
    geometric name stock with its own q drawn from the common law and its own
    labels. Larger populations are therefore wider mixtures.
    """
    out = []
    for i, n in enumerate(sizes):
        n = int(n)
        k = max(1, math.ceil(n / community_tokens))
        base, extra = divmod(n, k)
        spec = MixtureExperimentSpec(
            k, q_lo, q_hi, tuple(base + (j < extra) for j in range(k)),
            law=law, seed=derive_seed(seed, i), mode=mode,
        )
        merged = _merge(_component_vectors(spec, draw_qs(spec)), shared=False)
        out.append((n, compare(_ranked(merged), mode)))
    return out
