"""Geometric, Zipf and mixture models over ranks 1, 2, ...

Every model exposes ``pmf``, ``cdf``, ``probs``, ``entropy`` and ``sample``.
For a mixture, "rank r" means the r-th most probable label, so all three
model kinds can be compared against a :class:`RankedDistribution` the same way.

Sampling is inverse-CDF on a Philox stream keyed by the seed, so a given
(model, n_tokens, seed) always produces the same table.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .core import FrequencyTable, RankedDistribution, RankLabels
from .errors import DomainError

# unbounded sums stop once the remaining mass drops below this
TAIL_MASS = 1e-12


def stream(seed: int, *path: int) -> np.random.Generator:
    """Counter-based generator for ``seed``; ``path`` derives independent substreams."""
    if seed < 0 or any(p < 0 for p in path):
        raise ValueError("seeds must be non-negative integers")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, path)])))


def _check_ranks(r, upper):
    arr = np.asarray(r)
    if not np.all(np.equal(np.mod(arr, 1), 0)) or np.any(arr < 1) or (upper is not None and np.any(arr > upper)):
        raise DomainError(f"rank(s) outside support 1..{upper if upper is not None else 'inf'}: {r!r}")
    return arr.astype(np.int64)


def _entropy_bits(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def tabulate(rank_counts: np.ndarray, prefix: str = "") -> FrequencyTable:
    """Table from a vector of counts indexed by rank (index 0 unused)."""
    nz = np.flatnonzero(rank_counts)
    return FrequencyTable._trusted(dict(zip([f"{prefix}r{r}" for r in nz.tolist()], rank_counts[nz].tolist())))


@dataclass(frozen=True)
class GeometricModel:
    """pmf(r) = (1-q) q^(r-1) / Z with Z = 1 - q^N when truncated at N."""

    q: float
    N: int | None = None

    def __post_init__(self):
        if not 0.0 < self.q < 1.0:
            raise DomainError(f"geometric q must lie in (0, 1), got {self.q}")
        if self.N is not None and (int(self.N) != self.N or self.N < 1):
            raise DomainError(f"truncation N must be a positive integer, got {self.N}")

    @property
    def p(self) -> float:
        return 1.0 - self.q

    @property
    def bounded(self) -> bool:
        return self.N is not None

    @property
    def support_size(self) -> int:
        """N, or the rank past which less than TAIL_MASS remains."""
        if self.N is not None:
            return int(self.N)
        return int(math.floor(math.log(TAIL_MASS) / math.log(self.q))) + 1

    @property
    def _z(self) -> float:
        return 1.0 if self.N is None else -math.expm1(self.N * math.log(self.q))

    def pmf(self, r):
        r = _check_ranks(r, self.N)
        out = (1.0 - self.q) * np.power(self.q, r - 1.0) / self._z
        return float(out) if out.ndim == 0 else out

    def cdf(self, r):
        r = _check_ranks(r, self.N)
        out = -np.expm1(r * math.log(self.q)) / self._z
        return float(out) if out.ndim == 0 else out

    def probs(self) -> np.ndarray:
        return self.pmf(np.arange(1, self.support_size + 1))

    def entropy(self) -> float:
        if self.N is None:
            q = self.q
            return (-q * math.log2(q) - (1 - q) * math.log2(1 - q)) / (1 - q)
        return _entropy_bits(self.probs())

    def rank_counts(self, n_tokens: int, seed: int) -> np.ndarray:
        """Sampled token counts indexed by rank (index 0 unused)."""
        u = stream(seed).random(_check_n(n_tokens))
        if self.N is None:
            ranks = 1 + np.floor(np.log1p(-u) / math.log(self.q)).astype(np.int64)
        else:
            ranks = _inverse_cdf(self.probs(), u)
        return np.bincount(ranks)

    def sample(self, n_tokens: int, seed: int, prefix: str = "") -> FrequencyTable:
        return tabulate(self.rank_counts(n_tokens, seed), prefix)


@dataclass(frozen=True)
class ZipfModel:
    """pmf(r) = r^-s / H(N, s) on ranks 1..N; s = 0 is the uniform case."""

    s: float
    N: int

    def __post_init__(self):
        if self.s < 0:
            raise DomainError(f"zipf exponent must be >= 0, got {self.s}")
        if int(self.N) != self.N or self.N < 1:
            raise DomainError(f"zipf support N must be a positive integer, got {self.N}")

    bounded = True

    @property
    def support_size(self) -> int:
        return int(self.N)

    @property
    def normalizer(self) -> float:
        return harmonic(self.N, self.s)

    def pmf(self, r):
        r = _check_ranks(r, self.N)
        out = np.power(r.astype(float), -self.s) / self.normalizer
        return float(out) if out.ndim == 0 else out

    def cdf(self, r):
        r = _check_ranks(r, self.N)
        c = np.cumsum(self.probs())
        out = c[r - 1]
        return float(out) if out.ndim == 0 else out

    def probs(self) -> np.ndarray:
        return self.pmf(np.arange(1, self.N + 1))

    def entropy(self) -> float:
        return _entropy_bits(self.probs())

    def rank_counts(self, n_tokens: int, seed: int) -> np.ndarray:
        u = stream(seed).random(_check_n(n_tokens))
        return np.bincount(_inverse_cdf(self.probs(), u))

    def sample(self, n_tokens: int, seed: int, prefix: str = "") -> FrequencyTable:
        return tabulate(self.rank_counts(n_tokens, seed), prefix)


@dataclass(frozen=True)
class MixtureModel:
    """Weighted mixture of geometric/Zipf components.

    With ``shared_labels`` False (the default) component i owns labels
    ``c{i}:r{rank}``; with True every component emits plain ``r{rank}`` and
    probabilities of equal labels add.
    """

    components: tuple
    weights: tuple[float, ...]
    shared_labels: bool = False

    def __post_init__(self):
        comps = tuple(self.components)
        w = tuple(float(x) for x in self.weights)
        if not comps or len(comps) != len(w):
            raise DomainError("mixture needs one weight per component and at least one component")
        if any(isinstance(c, MixtureModel) for c in comps):
            raise DomainError("nested mixtures are not supported")
        if any(x < 0 for x in w) or abs(sum(w) - 1.0) > 1e-12:
            raise DomainError(f"mixture weights must be >= 0 and sum to 1, got {w}")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "weights", w)

    bounded = True

    def _label(self, i: int) -> str:
        return "" if self.shared_labels else f"c{i}:"

    def label_probs(self) -> dict[str, float]:
        out: dict[str, float] = {}
        for i, (comp, w) in enumerate(zip(self.components, self.weights)):
            if w == 0:
                continue
            prefix = self._label(i)
            for r, p in enumerate(comp.probs(), start=1):
                key = f"{prefix}r{r}"
                out[key] = out.get(key, 0.0) + w * float(p)
        return out

    def probs(self) -> np.ndarray:
        p = np.array(sorted(self.label_probs().values(), reverse=True))
        return p / p.sum()

    @property
    def support_size(self) -> int:
        return len(self.label_probs())

    def pmf(self, r):
        p = self.probs()
        r = _check_ranks(r, len(p))
        out = p[r - 1]
        return float(out) if out.ndim == 0 else out

    def cdf(self, r):
        c = np.cumsum(self.probs())
        r = _check_ranks(r, len(c))
        out = c[r - 1]
        return float(out) if out.ndim == 0 else out

    def entropy(self) -> float:
        if not self.shared_labels:
            # disjoint supports: H = H(weights) + sum w_i H_i
            w = np.array(self.weights)
            return _entropy_bits(w) + float(sum(wi * c.entropy() for wi, c in zip(w, self.components)))
        return _entropy_bits(self.probs())

    def sample(self, n_tokens: int, seed: int, prefix: str = "") -> FrequencyTable:
        n = _check_n(n_tokens)
        sizes = stream(seed).multinomial(n, self.weights)
        entries: dict[str, int] = {}
        for i, (comp, k) in enumerate(zip(self.components, sizes)):
            if k == 0:
                continue
            sub = comp.sample(int(k), derive_seed(seed, i), prefix + self._label(i))
            for label, c in sub.entries.items():
                entries[label] = entries.get(label, 0) + c
        return FrequencyTable._trusted(entries)


ParametricModel = Union[GeometricModel, ZipfModel, MixtureModel]


def _check_n(n_tokens) -> int:
    if int(n_tokens) != n_tokens or n_tokens < 1:
        raise ValueError(f"n_tokens must be a positive integer, got {n_tokens}")
    return int(n_tokens)


def derive_seed(seed: int, i: int) -> int:
    """Independent integer seed for substream ``i`` of ``seed``."""
    return int(np.random.SeedSequence([int(seed), i + 1]).generate_state(1, np.uint64)[0] >> 1)


def _inverse_cdf(probs: np.ndarray, u: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(probs)
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, len(probs) - 1) + 1


def harmonic(N: int, s: float) -> float:
    """Generalized harmonic number sum_{r=1..N} r^-s."""
    r = np.arange(1, int(N) + 1, dtype=float)
    # smallest terms first keeps the float sum tight
    return float(np.sum(np.power(r, -s)[::-1]))


def pmf(model: ParametricModel, r):
    return model.pmf(r)


def model_entropy(model: ParametricModel) -> float:
    """Shannon entropy in bits."""
    return model.entropy()


def sample(model: ParametricModel, n_tokens: int, seed: int) -> FrequencyTable:
    return model.sample(n_tokens, seed)


def solve_geometric_for_entropy(target_bits: float, tol: float = 1e-10) -> GeometricModel:
    """Unbounded geometric model whose entropy is ``target_bits`` (bisection on q)."""
    if not target_bits > 0:
        raise DomainError("target entropy must be positive")
    lo, hi = 0.0, 1.0
    q = 0.5
    for _ in range(200):
        q = 0.5 * (lo + hi)
        h = GeometricModel(q).entropy()
        if abs(h - target_bits) <= tol:
            break
        if h < target_bits:
            lo = q
        else:
            hi = q
        if hi - lo < 1e-16:
            break
    return GeometricModel(q)


def expected_distribution(model: ParametricModel, total: float = 1.0) -> RankedDistribution:
    """Exact expected counts ``total * pmf(r)`` as a ranked distribution."""
    p = model.probs()
    if not model.bounded:
        p = p / p.sum()
    return RankedDistribution(RankLabels(len(p)), total * p)


def model_to_dict(model: ParametricModel, seed: int | None = None) -> dict:
    if isinstance(model, GeometricModel):
        d = {"family": "geometric", "q": model.q, "N": model.N}
    elif isinstance(model, ZipfModel):
        d = {"family": "zipf", "s": model.s, "N": model.N}
    elif isinstance(model, MixtureModel):
        d = {
            "family": "mixture",
            "components": [model_to_dict(c) for c in model.components],
            "weights": list(model.weights),
            "shared_labels": model.shared_labels,
        }
    else:
        raise TypeError(f"not a model: {model!r}")
    if seed is not None:
        d["seed"] = seed
    return d


def model_from_dict(d: dict) -> ParametricModel:
    family = d.get("family")
    if family == "geometric":
        return GeometricModel(float(d["q"]), d.get("N"))
    if family == "zipf":
        return ZipfModel(float(d["s"]), int(d["N"]))
    if family == "mixture":
        return MixtureModel(
            tuple(model_from_dict(c) for c in d["components"]),
            tuple(d["weights"]),
            bool(d.get("shared_labels", False)),
        )
    raise DomainError(f"unknown model family {family!r}")


def load_model_spec(text: str) -> tuple[ParametricModel, int | None]:
    """Parse a JSON model document; returns the model and its optional seed."""
    d = json.loads(text)
    return model_from_dict(d), d.get("seed")
