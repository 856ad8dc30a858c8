"""Golomb codes for geometric rank sources.

Rank r is coded as v = r - 1: the quotient v // m in unary (ones closed by a
zero), then the remainder v % m in truncated binary. ``optimal_m`` picks the
parameter from the Gallager-Van Voorhis condition
q^m + q^(m+1) <= 1 < q^m + q^(m-1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DecodeError, DomainError
from .models import GeometricModel, ParametricModel


@dataclass(frozen=True)
class GolombCode:
    m: int

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise DomainError(f"golomb parameter must be a positive integer, got {self.m}")

    @property
    def b(self) -> int:
        return (self.m - 1).bit_length()  # ceil(log2 m)

    @property
    def cutoff(self) -> int:
        """Remainders below this get b-1 bits, the rest b bits."""
        return (1 << self.b) - self.m

    def length(self, r):
        """Codeword length(s) in bits for rank(s) r."""
        v = np.asarray(r, dtype=np.int64) - 1
        if np.any(v < 0):
            raise DomainError("ranks start at 1")
        rem = v % self.m
        out = v // self.m + 1 + np.where(rem < self.cutoff, self.b - 1, self.b)
        return int(out) if out.ndim == 0 else out


def optimal_m(q: float) -> int:
    """Smallest m with q^m + q^(m+1) <= 1."""
    if not 0.0 < q < 1.0:
        raise DomainError(f"q must lie in (0, 1), got {q}")
    m = 1
    while q**m + q ** (m + 1) > 1.0:
        m += 1
    return m


def encode(r: int, code: GolombCode) -> str:
    if r < 1:
        raise DomainError("ranks start at 1")
    quotient, rem = divmod(r - 1, code.m)
    bits = "1" * quotient + "0"
    b, c = code.b, code.cutoff
    if rem < c:
        return bits + (format(rem, f"0{b - 1}b") if b > 1 else "")
    return bits + (format(rem + c, f"0{b}b") if b > 0 else "")


def decode(bits: str, code: GolombCode, start: int = 0) -> tuple[int, int]:
    """Decode one codeword at ``start``; returns (rank, bits consumed)."""
    pos = bits.find("0", start)
    if pos < 0:
        raise DecodeError("unterminated unary prefix")
    if bits[start:pos].strip("1"):
        raise DecodeError("invalid symbol in bit string")
    quotient = pos - start
    pos += 1
    b, c = code.b, code.cutoff
    rem = 0
    if b > 0:
        head = bits[pos:pos + b - 1]
        if len(head) < b - 1:
            raise DecodeError("truncated remainder")
        x = int(head, 2) if head else 0
        pos += b - 1
        if x < c:
            rem = x
        else:
            if pos >= len(bits):
                raise DecodeError("truncated remainder")
            x = 2 * x + int(bits[pos])
            pos += 1
            rem = x - c
    return quotient * code.m + rem + 1, pos - start


def decode_all(bits: str, code: GolombCode) -> list[int]:
    out = []
    pos = 0
    while pos < len(bits):
        r, used = decode(bits, code, pos)
        out.append(r)
        pos += used
    return out


@dataclass(frozen=True)
class CodeStats:
    m: int
    expected_length: float
    entropy: float

    @property
    def efficiency(self) -> float:
        return self.entropy / self.expected_length


def expected_length(model: ParametricModel, code: GolombCode) -> float:
    """Mean codeword length in bits under ``model``.

    Unbounded geometric sources use the exact split into a geometric quotient
    and a truncated-geometric remainder; everything else is summed over ranks.
    """
    if isinstance(model, GeometricModel) and not model.bounded:
        q, m = model.q, code.m
        qm = q**m
        rem = np.arange(m)
        p_rem = (1.0 - q) * np.power(q, rem) / (1.0 - qm)
        rem_bits = np.where(rem < code.cutoff, code.b - 1, code.b)
        return 1.0 + qm / (1.0 - qm) + float((p_rem * rem_bits).sum())
    p = model.probs()
    return float((p * code.length(np.arange(1, len(p) + 1))).sum())


def code_stats(model: ParametricModel, code: GolombCode | None = None) -> CodeStats:
    if code is None:
        if not isinstance(model, GeometricModel):
            raise DomainError("optimal m is only defined for geometric sources; pass a code")
        code = GolombCode(optimal_m(model.q))
    return CodeStats(code.m, expected_length(model, code), model.entropy())


def best_m(model: ParametricModel, m_max: int = 128) -> int:
    """Brute-force m in 1..m_max minimizing expected length (smallest on ties)."""
    lengths = [expected_length(model, GolombCode(m)) for m in range(1, m_max + 1)]
    return int(np.argmin(lengths)) + 1


def golden_ratio_threshold() -> float:
    """Largest q for which m = 1 is optimal."""
    return (math.sqrt(5.0) - 1.0) / 2.0
