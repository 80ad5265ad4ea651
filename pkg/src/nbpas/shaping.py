"""ASK constellations, Maxwell-Boltzmann amplitude shaping and a
constant-composition distribution matcher (CCDM).

The matcher is an exact arithmetic coder over the set of sequences with a
fixed composition: the ``k`` input bits are read as an integer index and the
output is the sequence at that index in lexicographic order (amplitudes
ordered ``1 < 3 < 5 < ...``). Python integers make the interval subdivision
exact, so encoding and decoding are mutually inverse by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np


def entropy(p) -> float:
    """Shannon entropy in bits of a probability vector."""
    p = np.asarray(p, dtype=float)
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)))


def brgc(m: int) -> np.ndarray:
    """Binary reflected Gray code: label of the i-th point (ascending order)."""
    i = np.arange(1 << m)
    return i ^ (i >> 1)


@dataclass(frozen=True)
class AskConstellation:
    """Unscaled ``2^m``-ASK: points ``{+-1, +-3, ..., +-(M-1)}``.

    Points are kept in ascending order ``-(M-1), ..., -1, 1, ..., M-1``; the
    scaling ``delta`` depends on the input distribution and is computed by
    :func:`rescale`.
    """

    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("need at least one bit per symbol")

    @property
    def M(self) -> int:
        return 1 << self.m

    @property
    def amplitudes(self) -> np.ndarray:
        return np.arange(1, self.M, 2, dtype=float)

    @property
    def points(self) -> np.ndarray:
        a = self.amplitudes
        return np.concatenate([-a[::-1], a])

    @property
    def labels(self) -> np.ndarray:
        """BRGC labels of :attr:`points` as integers (MSB is the sign bit)."""
        return brgc(self.m)

    def label_bits(self) -> np.ndarray:
        """``(M, m)`` array of label bits, MSB first."""
        lab = self.labels
        return (lab[:, None] >> np.arange(self.m - 1, -1, -1)[None, :]) & 1

    def point_distribution(self, pA) -> np.ndarray:
        """P_X over :attr:`points` from an amplitude law and uniform signs."""
        pA = np.asarray(pA, dtype=float)
        if pA.shape != (self.M // 2,):
            raise ValueError(f"amplitude distribution must have {self.M // 2} entries")
        return np.concatenate([pA[::-1], pA]) / 2


def rescale(constellation: AskConstellation, pX) -> float:
    """Scaling ``delta`` with ``sum_x P_X(x) (delta x)^2 = 1``."""
    pX = np.asarray(pX, dtype=float)
    return float(1.0 / np.sqrt(np.sum(pX * constellation.points**2)))


@dataclass(frozen=True)
class MbDistribution:
    nu: float
    amplitudes: np.ndarray = field(repr=False)
    pA: np.ndarray

    @property
    def entropy(self) -> float:
        return entropy(self.pA)


def mb_distribution(nu: float, amplitudes: Sequence[float]) -> MbDistribution:
    """Maxwell-Boltzmann law ``P_A(a) ~ exp(-nu a^2)`` on ``amplitudes``."""
    if nu < 0:
        raise ValueError("nu must be nonnegative")
    a = np.asarray(amplitudes, dtype=float)
    # shift the exponent so the largest term is exp(0); keeps huge nu finite
    logits = -nu * (a**2 - a.min() ** 2)
    w = np.exp(logits)
    return MbDistribution(float(nu), a, w / w.sum())


def composition_from(pA, n: int) -> tuple[int, ...]:
    """Integer counts summing to ``n`` closest to ``n * pA``.

    Largest-remainder rounding: floor everything, then hand the leftover
    units to the largest fractional parts, smaller amplitude first on ties.
    """
    if n < 1:
        raise ValueError("n must be positive")
    pA = np.asarray(pA, dtype=float)
    raw = n * pA
    counts = np.floor(raw).astype(int)
    left = n - int(counts.sum())
    rem = raw - counts
    order = sorted(range(len(pA)), key=lambda i: (-rem[i], i))
    for i in order[:left]:
        counts[i] += 1
    return tuple(int(c) for c in counts)


def multinomial(counts: Sequence[int]) -> int:
    """Exact multinomial coefficient ``n! / prod(c!)``."""
    total, out = 0, 1
    for c in counts:
        total += c
        out *= math.comb(total, c)
    return out


@dataclass(frozen=True)
class DmCodebook:
    """Fixed-to-fixed CCDM mapping ``k`` bits to ``n`` amplitudes.

    ``composition[j]`` is the number of occurrences of ``amplitudes[j]``.
    ``k`` may be smaller than ``floor(log2(multinomial))`` when a codebook
    is truncated to hit a target rate exactly.
    """

    amplitudes: tuple[int, ...]
    composition: tuple[int, ...]
    k: int

    def __post_init__(self):
        if len(self.amplitudes) != len(self.composition):
            raise ValueError("one count per amplitude required")
        if any(c < 0 for c in self.composition) or self.n < 1:
            raise ValueError("invalid composition")
        if self.k < 0 or self.k > self.k_max:
            raise ValueError(f"k={self.k} exceeds floor(log2 multinomial)={self.k_max}")

    @property
    def n(self) -> int:
        return sum(self.composition)

    @property
    def size(self) -> int:
        return multinomial(self.composition)

    @property
    def k_max(self) -> int:
        return self.size.bit_length() - 1

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def distribution(self) -> np.ndarray:
        """Empirical amplitude distribution of every output sequence."""
        return np.asarray(self.composition, dtype=float) / self.n

    @classmethod
    def from_composition(cls, amplitudes, composition, k: int | None = None) -> "DmCodebook":
        amplitudes = tuple(int(a) for a in amplitudes)
        composition = tuple(int(c) for c in composition)
        if k is None:
            k = multinomial(composition).bit_length() - 1
        return cls(amplitudes, composition, k)


def _index_to_sequence(index: int, composition: Sequence[int]) -> list[int]:
    counts = list(composition)
    r = sum(counts)
    total = multinomial(counts)
    out = []
    while r:
        for j, c in enumerate(counts):
            if c == 0:
                continue
            # sequences starting with symbol j
            sub = total * c // r
            if index < sub:
                out.append(j)
                counts[j] -= 1
                total = sub
                r -= 1
                break
            index -= sub
    return out


def _sequence_to_index(seq: Sequence[int], composition: Sequence[int]) -> int:
    counts = list(composition)
    r = sum(counts)
    total = multinomial(counts)
    index = 0
    for s in seq:
        for j in range(s):
            if counts[j]:
                index += total * counts[j] // r
        total = total * counts[s] // r
        counts[s] -= 1
        r -= 1
    return index


def dm_encode(bits: Sequence[int], codebook: DmCodebook) -> np.ndarray:
    """Map ``k`` bits (MSB first) to ``n`` amplitudes of the fixed composition."""
    if len(bits) != codebook.k:
        raise ValueError(f"expected {codebook.k} bits, got {len(bits)}")
    index = int("".join("1" if b else "0" for b in bits) or "0", 2)
    seq = _index_to_sequence(index, codebook.composition)
    return np.asarray(codebook.amplitudes, dtype=np.int64)[seq]


def dm_decode(amplitudes: Sequence[int], codebook: DmCodebook) -> np.ndarray:
    """Inverse of :func:`dm_encode`; rejects sequences outside the codebook."""
    pos = {a: j for j, a in enumerate(codebook.amplitudes)}
    try:
        seq = [pos[int(a)] for a in amplitudes]
    except KeyError as exc:
        raise ValueError(f"amplitude {exc.args[0]} not in the codebook alphabet") from None
    if len(seq) != codebook.n:
        raise ValueError(f"expected {codebook.n} amplitudes, got {len(seq)}")
    counts = np.bincount(seq, minlength=len(codebook.amplitudes))
    if tuple(counts) != codebook.composition:
        raise ValueError("sequence composition differs from the codebook")
    index = _sequence_to_index(seq, codebook.composition)
    if index >> codebook.k:
        raise ValueError("sequence lies outside the 2^k encoded sequences")
    k = codebook.k
    return np.array([(index >> (k - 1 - i)) & 1 for i in range(k)], dtype=np.int8)


def rate_loss(pA, k: int, n: int) -> float:
    """Finite-length matcher loss ``H(P_A) - k/n``."""
    return entropy(pA) - k / n


def _as_fraction(target, n: int) -> Fraction:
    if isinstance(target, Fraction):
        return target
    # printed rates such as 2.4167 resolve to the nearest fraction with
    # denominator <= n (29/12 here)
    return Fraction(target).limit_denominator(n)


def tune_nu(target_rdm, n: int, amplitudes, iterations: int = 60) -> tuple[float, DmCodebook]:
    """Largest ``nu`` whose quantized MB composition still carries the target rate.

    Returns ``(nu, codebook)`` with ``codebook.k = ceil(n * target_rdm)``.
    Bisection on ``nu`` over ``[0, 10]``.
    """
    amplitudes = np.asarray(amplitudes, dtype=float)
    target = _as_fraction(target_rdm, n)
    if not 0 < target < math.log2(len(amplitudes)):
        raise ValueError(f"target rate {float(target)} outside (0, log2 |A|)")
    k_target = math.ceil(n * target)

    def k_of(nu):
        comp = composition_from(mb_distribution(nu, amplitudes).pA, n)
        return multinomial(comp).bit_length() - 1, comp

    if k_of(0.0)[0] < k_target:
        raise ValueError(f"rate {float(target)} infeasible at n={n}")
    lo, hi = 0.0, 10.0
    if k_of(hi)[0] >= k_target:
        lo = hi
    else:
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            if k_of(mid)[0] >= k_target:
                lo = mid
            else:
                hi = mid
    comp = k_of(lo)[1]
    return lo, DmCodebook.from_composition(amplitudes.astype(int), comp, k_target)
