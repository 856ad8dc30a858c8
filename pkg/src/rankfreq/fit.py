"""Geometric vs. Zipf fitting on ranked distributions.

Two routes per family:

* regression: OLS of log2(count) on rank (geometric, semilog axes) or on
  log2(rank) (Zipf, log-log axes). R^2 is reported in those coordinates.
  ``transform="raw"`` instead refits the curve by nonlinear least squares on
  raw counts and reports R^2 there.
* mle: discrete maximum likelihood, treating each token as a draw of its
  type's rank.

Log-likelihoods are in nats; everything else uses base 2.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import curve_fit

from .core import RankedDistribution
from .errors import DomainError, InsufficientDataError, UndefinedCorrelationError
from .models import GeometricModel, ParametricModel, ZipfModel, harmonic

GEOMETRIC = "geometric"
ZIPF = "zipf"
MODES = ("regression", "mle")
TRANSFORMS = ("transformed", "raw")

# clamp for the degenerate all-tokens-on-rank-1 MLE
Q_FLOOR = 1e-9


@dataclass(frozen=True)
class FitResult:
    family: str
    params: dict
    r2: float
    loglik: float
    ks: float
    method: str
    degenerate: bool = False

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "FitResult":
        return cls(**d)

    def model(self, N: int) -> ParametricModel:
        """The fitted model restricted to ranks 1..N (unbounded MLE geometric stays unbounded)."""
        if self.family == GEOMETRIC:
            q = self.params["q"]
            if q >= 1.0:
                return ZipfModel(0.0, N)
            return GeometricModel(q, None if self.method == "mle" else N)
        return ZipfModel(self.params["s"], N)


@dataclass(frozen=True)
class ComparisonReport:
    geometric: FitResult
    zipf: FitResult
    preferred: str
    n_types: int
    n_tokens: float
    mode: str = "regression"
    transform: str = "transformed"

    def to_dict(self) -> dict:
        return {
            "preferred": self.preferred,
            "mode": self.mode,
            "transform": self.transform,
            "n_types": self.n_types,
            "n_tokens": self.n_tokens,
            "geometric": self.geometric.to_dict(),
            "zipf": self.zipf.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ComparisonReport":
        return cls(
            geometric=FitResult.from_dict(d["geometric"]),
            zipf=FitResult.from_dict(d["zipf"]),
            preferred=d["preferred"],
            n_types=d["n_types"],
            n_tokens=d["n_tokens"],
            mode=d.get("mode", "regression"),
            transform=d.get("transform", "transformed"),
        )


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float, bool]:
    """Slope, intercept, R^2, and whether y was constant."""
    xm, ym = x.mean(), y.mean()
    sxx = float(((x - xm) ** 2).sum())
    slope = float(((x - xm) * (y - ym)).sum() / sxx)
    intercept = float(ym - slope * xm)
    return slope, intercept, *_r2(y, intercept + slope * x)


def _r2(y: np.ndarray, yhat: np.ndarray) -> tuple[float, bool]:
    ss_res = float(((y - yhat) ** 2).sum())
    if np.ptp(y) == 0.0:
        return (1.0 if ss_res <= 1e-24 * len(y) else 0.0), True
    ss_tot = float(((y - y.mean()) ** 2).sum())
    return 1.0 - ss_res / ss_tot, False


def _require(dist: RankedDistribution, n_types: int, n_tokens: float = 0):
    if dist.N < n_types:
        raise InsufficientDataError(f"need at least {n_types} types, got {dist.N}")
    if dist.total_tokens < n_tokens:
        raise InsufficientDataError(f"need at least {n_tokens} tokens, got {dist.total_tokens}")


def loglik(dist: RankedDistribution, model: ParametricModel) -> float:
    """Total log-likelihood (nats) of the observed tokens under ``model``."""
    p = np.asarray(model.pmf(dist.ranks), dtype=float)
    return float((dist.counts * np.log(p)).sum())


def _model_r2(dist: RankedDistribution, model: ParametricModel) -> float:
    """R^2 of a model's expected counts against the data, in the family's own axes."""
    y = np.log2(dist.counts.astype(float))
    yhat = np.log2(dist.total_tokens * np.asarray(model.pmf(dist.ranks), dtype=float))
    return _r2(y, yhat)[0]


def _finish(dist, family, params, r2, method, degenerate, model) -> FitResult:
    return FitResult(
        family=family,
        params=params,
        r2=float(r2),
        loglik=loglik(dist, model),
        ks=ks_distance(dist, model),
        method=method,
        degenerate=degenerate,
    )


def fit_geometric_semilog(dist: RankedDistribution) -> FitResult:
    """OLS of log2(count) on rank; q = 2^slope."""
    _require(dist, 3)
    x = dist.ranks.astype(float)
    slope, intercept, r2, flat = _ols(x, np.log2(dist.counts.astype(float)))
    q = min(2.0**slope, 1.0)
    degenerate = flat or q >= 1.0
    fitted = ZipfModel(0.0, dist.N) if degenerate else GeometricModel(q, dist.N)
    if degenerate:
        q = 1.0
    return _finish(dist, GEOMETRIC, {"q": q, "intercept": intercept}, r2, "semilog", degenerate, fitted)


def fit_zipf_loglog(dist: RankedDistribution) -> FitResult:
    """OLS of log2(count) on log2(rank); s = -slope."""
    _require(dist, 3)
    x = np.log2(dist.ranks.astype(float))
    slope, intercept, r2, flat = _ols(x, np.log2(dist.counts.astype(float)))
    s = max(-slope, 0.0)
    return _finish(dist, ZIPF, {"s": s, "intercept": intercept}, r2, "loglog", flat, ZipfModel(s, dist.N))


def fit_geometric_raw(dist: RankedDistribution) -> FitResult:
    """Nonlinear least squares of count = A q^(r-1) on raw counts."""
    start = fit_geometric_semilog(dist)
    r = dist.ranks.astype(float)
    y = dist.counts.astype(float)
    q0 = min(start.params["q"], 1.0 - 1e-6)
    (a, q), _ = curve_fit(
        lambda r, a, q: a * np.power(q, r - 1.0), r, y,
        p0=(y[0], q0), bounds=((0.0, Q_FLOOR), (np.inf, 1.0)), maxfev=20000,
    )
    r2, flat = _r2(y, a * np.power(q, r - 1.0))
    degenerate = flat or q >= 1.0 - 1e-12
    fitted = ZipfModel(0.0, dist.N) if degenerate else GeometricModel(float(q), dist.N)
    return _finish(dist, GEOMETRIC, {"q": float(min(q, 1.0)), "scale": float(a)}, r2, "raw", degenerate, fitted)


def fit_zipf_raw(dist: RankedDistribution) -> FitResult:
    """Nonlinear least squares of count = A r^-s on raw counts."""
    start = fit_zipf_loglog(dist)
    r = dist.ranks.astype(float)
    y = dist.counts.astype(float)
    (a, s), _ = curve_fit(
        lambda r, a, s: a * np.power(r, -s), r, y,
        p0=(y[0], start.params["s"]), bounds=((0.0, 0.0), (np.inf, 50.0)), maxfev=20000,
    )
    r2, flat = _r2(y, a * np.power(r, -s))
    return _finish(dist, ZIPF, {"s": float(s), "scale": float(a)}, r2, "raw", flat, ZipfModel(float(s), dist.N))


def fit_geometric_mle(dist: RankedDistribution) -> FitResult:
    """Unbounded geometric MLE on ranks: q = 1 - 1/mean_rank."""
    _require(dist, 1, 2)
    mean_rank = float((dist.ranks * dist.counts).sum() / dist.total_tokens)
    degenerate = mean_rank <= 1.0
    q = Q_FLOOR if degenerate else max(1.0 - 1.0 / mean_rank, Q_FLOOR)
    model = GeometricModel(q)
    return _finish(dist, GEOMETRIC, {"q": q}, _model_r2(dist, model), "mle", degenerate, model)


def golden_section_max(f, lo: float, hi: float, tol: float = 1e-6) -> float:
    """Maximizer of a unimodal ``f`` on [lo, hi], to within ``tol``."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    # the optimum may sit on a boundary of the bracket
    return max((lo, x, hi), key=f)


def fit_zipf_mle(dist: RankedDistribution, s_max: float = 10.0, tol: float = 1e-6) -> FitResult:
    """Zipf exponent maximizing the likelihood, with N fixed to the observed support."""
    _require(dist, 2, 2)
    N = dist.N
    total = float(dist.total_tokens)
    weighted_log_rank = float((dist.counts * np.log(dist.ranks)).sum())

    def ll(s):
        return -s * weighted_log_rank - total * math.log(harmonic(N, s))

    s = golden_section_max(ll, 0.0, s_max, tol)
    model = ZipfModel(s, N)
    return _finish(dist, ZIPF, {"s": s}, _model_r2(dist, model), "mle", False, model)


def ks_distance(dist: RankedDistribution, model: ParametricModel) -> float:
    """Max |empirical CDF - model CDF| over the observed ranks."""
    if model.bounded and model.support_size < dist.N:
        raise DomainError(f"model support {model.support_size} does not cover {dist.N} observed ranks")
    emp = np.cumsum(dist.probs)
    return float(np.max(np.abs(emp - np.asarray(model.cdf(dist.ranks)))))


def compare(dist: RankedDistribution, mode: str = "regression", transform: str = "transformed") -> ComparisonReport:
    """Fit both families and pick the better one (R^2 for regression, loglik for mle).

    Exact ties go to the geometric family.
    """
    _require(dist, 3)
    if mode == "regression":
        if transform == "transformed":
            g, z = fit_geometric_semilog(dist), fit_zipf_loglog(dist)
        elif transform == "raw":
            g, z = fit_geometric_raw(dist), fit_zipf_raw(dist)
        else:
            raise ValueError(f"unknown transform {transform!r}")
        better_zipf = z.r2 > g.r2
    elif mode == "mle":
        g, z = fit_geometric_mle(dist), fit_zipf_mle(dist)
        better_zipf = z.loglik > g.loglik
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return ComparisonReport(
        geometric=g,
        zipf=z,
        preferred=ZIPF if better_zipf else GEOMETRIC,
        n_types=dist.N,
        n_tokens=dist.total_tokens,
        mode=mode,
        transform=transform,
    )


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("series must be one-dimensional and of equal length")
    if len(x) < 3:
        raise InsufficientDataError("pearson needs at least 3 points")
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = float((dx * dx).sum()), float((dy * dy).sum())
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelationError("correlation undefined for a constant series")
    r = float((dx * dy).sum() / math.sqrt(sxx * syy))
    return max(-1.0, min(1.0, r))
