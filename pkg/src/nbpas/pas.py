"""Probabilistic amplitude shaping over a non-binary systematic code.

Frame layout (codeword symbol order equals transmission order):

* symbols ``0 .. n/l - 1`` carry ``l`` consecutive amplitudes each;
* symbols ``n/l .. n_c - 1`` carry ``p`` consecutive signs each. The first
  ``gamma n / p`` of them are information (data bits used as signs), the
  rest are parity.

The code must be systematic with the identity column permutation, i.e.
the information symbols occupy the first ``k`` positions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction

import numpy as np
from scipy.special import logsumexp

from .code import SystematicEncoder, encode
from .gf import Field, field_new
from .shaping import AskConstellation, DmCodebook, brgc, dm_decode, dm_encode, tune_nu


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


@dataclass(frozen=True)
class PasConfig:
    """Bookkeeping of one shaped mode.

    Attributes
    ----------
    m : int
        Bits per ASK symbol (``2^m`` points).
    p : int
        Field degree, ``q = 2^p``.
    ell : int
        Amplitudes per field symbol, ``p = ell (m - 1)``.
    R_c, gamma, R_t, R_dm : Fraction
        Code rate, sign-information fraction, transmission and matcher rate.
    n : int
        Channel uses per frame.
    codebook : DmCodebook
        Matcher with ``k_dm`` input bits and ``n`` output amplitudes.
    """

    m: int
    p: int
    ell: int
    R_c: Fraction
    n: int
    R_t: Fraction
    gamma: Fraction
    codebook: DmCodebook
    nu: float

    @property
    def q(self) -> int:
        return 1 << self.p

    @property
    def field(self) -> Field:
        return field_new(self.p)

    @cached_property
    def constellation(self) -> AskConstellation:
        return AskConstellation(self.m)

    @property
    def n_c(self) -> int:
        return self.n * self.m // self.p

    @property
    def n_c_bin(self) -> int:
        return self.n_c * self.p

    @property
    def n_amp_syms(self) -> int:
        return self.n // self.ell

    @property
    def n_sign_syms(self) -> int:
        return self.n // self.p

    @cached_property
    def n_info_sign_syms(self) -> int:
        return int(self.gamma * self.n / self.p)

    @property
    def k_c(self) -> int:
        """Information symbols of the code."""
        return self.n_amp_syms + self.n_info_sign_syms

    @property
    def k_dm(self) -> int:
        return self.codebook.k

    @property
    def R_dm(self) -> Fraction:
        return self.R_t - self.gamma

    @cached_property
    def n_data_bits(self) -> int:
        return self.k_dm + self.n_info_sign_syms * self.p

    @cached_property
    def pA(self) -> np.ndarray:
        """Amplitude law seen on the channel (the matcher's composition)."""
        return self.codebook.distribution

    @cached_property
    def delta(self) -> float:
        """Scaling that gives every frame unit average power."""
        a = self.constellation.amplitudes
        return float(1.0 / np.sqrt(np.sum(self.pA * a**2)))


def make_config(m: int, q: int, n: int, R_t, R_c=None, d_c: int | None = None) -> PasConfig:
    """Derive a :class:`PasConfig`, checking every divisibility relation.

    Exactly one of ``R_c`` and ``d_c`` must be given; a ``(2, d_c)`` code
    has rate ``1 - 2/d_c``.
    """
    if (R_c is None) == (d_c is None):
        raise ValueError("give exactly one of R_c and d_c")
    if R_c is None:
        R_c = 1 - Fraction(2, d_c)
    R_c, R_t = _frac(R_c), _frac(R_t)
    if m < 2:
        raise ValueError("PAS needs m >= 2 (one sign bit plus amplitude bits)")
    if q < 2 or q & (q - 1):
        raise ValueError(f"field order {q} is not a power of two")
    p = q.bit_length() - 1
    if p % (m - 1):
        raise ValueError(f"p = ell (m-1) violated: p={p} not divisible by m-1={m - 1}")
    ell = p // (m - 1)
    if n % ell:
        raise ValueError(f"n/ell not an integer: n={n}, ell={ell}")
    if n % p:
        raise ValueError(f"n/p not an integer: n={n}, p={p}")
    gamma = 1 - (1 - R_c) * m
    if not 0 <= gamma < 1:
        raise ValueError(f"gamma = 1 - (1-R_c) m = {gamma} outside [0, 1)")
    if (gamma * n / p).denominator != 1:
        raise ValueError(f"gamma n / p = {gamma * n / p} is not an integer")
    n_c = n * m // p
    if (R_c * n_c).denominator != 1:
        raise ValueError(f"R_c n_c = {R_c * n_c} is not an integer")
    R_dm = R_t - gamma
    if R_dm <= 0:
        raise ValueError(f"R_dm = R_t - gamma = {R_dm} must be positive")
    if (R_dm * n).denominator != 1:
        raise ValueError(f"R_dm n = {R_dm * n} is not an integer")
    amplitudes = AskConstellation(m).amplitudes
    nu, cb = tune_nu(R_dm, n, amplitudes)
    return PasConfig(m, p, ell, R_c, n, R_t, gamma, cb, nu)


# --- symbol mappings -----------------------------------------------------


def beta_a(amplitudes, m: int) -> int:
    """Pack an amplitude tuple into a field element.

    Amplitude ``a`` has index ``(a-1)/2`` written with ``m-1`` bits; the
    indices are concatenated MSB first.
    """
    e = 0
    top = (1 << m) - 1
    for a in amplitudes:
        a = int(a)
        if a < 1 or a > top or a % 2 == 0:
            raise ValueError(f"amplitude {a} not in {{1, 3, ..., {top}}}")
        e = (e << (m - 1)) | ((a - 1) >> 1)
    return e


def beta_a_inv(e: int, m: int, ell: int) -> tuple[int, ...]:
    mask = (1 << (m - 1)) - 1
    out = []
    for j in range(ell - 1, -1, -1):
        out.append(2 * ((e >> (j * (m - 1))) & mask) + 1)
    return tuple(out)


def beta_s(signs) -> int:
    """Pack signs into a field element; ``-1`` is bit 1, MSB first."""
    e = 0
    for s in signs:
        e = (e << 1) | (1 if s < 0 else 0)
    return e


def beta_s_inv(e: int, p: int) -> tuple[int, ...]:
    return tuple(-1 if (e >> (p - 1 - j)) & 1 else 1 for j in range(p))


def _amp_symbols(a: np.ndarray, m: int, ell: int) -> np.ndarray:
    idx = (np.asarray(a, dtype=np.int64) - 1) >> 1
    w = (1 << ((m - 1) * np.arange(ell - 1, -1, -1))).astype(np.int64)
    return idx.reshape(-1, ell) @ w


def _amp_from_symbols(c: np.ndarray, m: int, ell: int) -> np.ndarray:
    sh = (m - 1) * np.arange(ell - 1, -1, -1)
    idx = (np.asarray(c, dtype=np.int64)[:, None] >> sh[None, :]) & ((1 << (m - 1)) - 1)
    return (2 * idx + 1).reshape(-1)


def _bits_to_symbols(bits: np.ndarray, p: int) -> np.ndarray:
    w = (1 << np.arange(p - 1, -1, -1)).astype(np.int64)
    return np.asarray(bits, dtype=np.int64).reshape(-1, p) @ w


def _symbols_to_bits(c: np.ndarray, p: int) -> np.ndarray:
    sh = np.arange(p - 1, -1, -1)
    return ((np.asarray(c, dtype=np.int64)[:, None] >> sh[None, :]) & 1).reshape(-1)


# --- transmitter ---------------------------------------------------------


@dataclass
class TxFrame:
    data_bits: np.ndarray
    amplitudes: np.ndarray
    signs: np.ndarray
    info: np.ndarray
    codeword: np.ndarray
    x: np.ndarray


def _check_encoder(config, enc: SystematicEncoder) -> None:
    if enc.field.q != config.q:
        raise ValueError(f"code is over GF({enc.field.q}), config needs GF({config.q})")
    if enc.n_c != config.n_c or enc.k != config.k_c:
        raise ValueError(
            f"code (n_c={enc.n_c}, k={enc.k}) does not match config (n_c={config.n_c}, k={config.k_c})"
        )
    if not np.array_equal(enc.perm, np.arange(enc.n_c)):
        raise ValueError("code must be systematic on its first k columns")


def pas_transmit(data_bits, config: PasConfig, enc: SystematicEncoder) -> TxFrame:
    """Map ``k_dm + gamma n`` data bits to one channel word."""
    _check_encoder(config, enc)
    bits = np.asarray(data_bits, dtype=np.int64)
    if bits.shape != (config.n_data_bits,):
        raise ValueError(f"expected {config.n_data_bits} data bits, got {bits.shape}")
    a = dm_encode(bits[: config.k_dm], config.codebook)
    u_amp = _amp_symbols(a, config.m, config.ell)
    u_sign = _bits_to_symbols(bits[config.k_dm :], config.p)
    u = np.concatenate([u_amp, u_sign])
    c = encode(u, enc)
    sign_bits = _symbols_to_bits(c[config.n_amp_syms :], config.p)
    s = 1 - 2 * sign_bits
    x = config.delta * a * s
    return TxFrame(bits, a, s, u, c, x)


def awgn(x, snr: float, rng: np.random.Generator) -> np.ndarray:
    """``y = x + z`` with ``z ~ N(0, 1/snr)``."""
    if snr <= 0:
        raise ValueError("snr must be positive")
    x = np.asarray(x, dtype=float)
    return x + rng.standard_normal(x.shape) / math.sqrt(snr)


# --- demapper --------------------------------------------------------------


def _outer(f: np.ndarray) -> np.ndarray:
    W, L, K = f.shape
    if L == 1:
        return f[:, 0, :]
    h = L // 2
    left, right = _outer(f[:, :h]), _outer(f[:, h:])
    return (left[:, :, None] * right[:, None, :]).reshape(W, -1)


def _joint(lf: np.ndarray) -> np.ndarray:
    """(W, L, K) per-position log factors -> normalized (W, K^L) joint with
    the first position most significant.

    Each position is normalized before the product, so the joint sums to
    one by construction.
    """
    f = np.exp(lf - lf.max(axis=-1, keepdims=True))
    f /= f.sum(axis=-1, keepdims=True)
    return _outer(f)


def _gauss_log(y, points, snr):
    return -0.5 * snr * (np.asarray(y)[..., None] - points) ** 2


def _prep(y, pA, m, delta):
    pA = np.asarray(pA, dtype=float)
    amps = AskConstellation(m).amplitudes
    if delta is None:
        delta = 1.0 / np.sqrt(np.sum(pA * amps**2))
    with np.errstate(divide="ignore"):
        lpa = np.log(pA)
    return np.asarray(y, dtype=float), lpa, delta * amps


def amplitude_factors(y, pA, m: int, snr: float, delta: float | None = None) -> np.ndarray:
    """Per-channel-use log factors ``log P_A(a) + log sum_s p(y | delta a s)``,
    shape ``y.shape + (2^(m-1),)``."""
    y, lpa, pts = _prep(y, pA, m, delta)
    return np.logaddexp(_gauss_log(y, pts, snr), _gauss_log(y, -pts, snr)) + lpa


def sign_factors(y, pA, m: int, snr: float, delta: float | None = None) -> np.ndarray:
    """Per-channel-use log factors ``log sum_a P_A(a) p(y | delta a s)`` for
    ``s = +1`` (index 0) and ``s = -1`` (index 1)."""
    y, lpa, pts = _prep(y, pA, m, delta)
    plus = logsumexp(_gauss_log(y, pts, snr) + lpa, axis=-1)
    minus = logsumexp(_gauss_log(y, -pts, snr) + lpa, axis=-1)
    return np.stack([plus, minus], axis=-1)


def demap_amplitude(y, pA, m: int, snr: float, delta: float | None = None) -> np.ndarray:
    """Symbol priors for amplitude-mapped symbols, assuming uniform signs.

    ``y`` has shape ``(..., ell)``; the result has shape ``(..., 2^((m-1) ell))``
    with entry ``c`` proportional to
    ``prod_j P_A(a_j) sum_{s=+-1} p(y_j | delta a_j s)`` for
    ``(a_1..a_ell) = beta_a_inv(c)``. ``delta`` defaults to the unit-power
    scaling under ``pA``.
    """
    lf = amplitude_factors(y, pA, m, snr, delta)
    lead = lf.shape[:-2]
    return _joint(lf.reshape((-1,) + lf.shape[-2:])).reshape(lead + (-1,))


def demap_sign(y, pA, m: int, snr: float, delta: float | None = None) -> np.ndarray:
    """Symbol priors for sign-mapped symbols.

    ``y`` has shape ``(..., p)``; entry ``c`` is proportional to
    ``prod_j sum_a P_A(a) p(y_j | delta a s_j)`` for ``(s_1..s_p) = beta_s_inv(c)``.
    """
    lf = sign_factors(y, pA, m, snr, delta)
    lead = lf.shape[:-2]
    return _joint(lf.reshape((-1,) + lf.shape[-2:])).reshape(lead + (-1,))


def build_priors(y, config: PasConfig, snr: float) -> np.ndarray:
    """Decoder priors ``(n_c, q)`` for one received frame."""
    y = np.asarray(y, dtype=float)
    if y.shape != (config.n,):
        raise ValueError(f"expected {config.n} channel outputs, got {y.shape}")
    amp = demap_amplitude(y.reshape(-1, config.ell), config.pA, config.m, snr, config.delta)
    sgn = demap_sign(y.reshape(-1, config.p), config.pA, config.m, snr, config.delta)
    return np.concatenate([amp, sgn])


def recover_bits(codeword, config: PasConfig) -> np.ndarray | None:
    """Data bits from a decoded codeword; ``None`` if the amplitudes do not
    form a valid matcher output."""
    c = np.asarray(codeword, dtype=np.int64)
    a = _amp_from_symbols(c[: config.n_amp_syms], config.m, config.ell)
    try:
        dm_bits = dm_decode(a, config.codebook)
    except ValueError:
        return None
    info_s = c[config.n_amp_syms : config.k_c]
    return np.concatenate([dm_bits.astype(np.int64), _symbols_to_bits(info_s, config.p)])


# --- uniform reference -------------------------------------------------------


@dataclass(frozen=True)
class UniformConfig:
    """Uniform ``2^m``-ASK with BRGC labels; each field symbol spans ``p/m``
    channel uses (label bits MSB first)."""

    m: int
    p: int
    n: int
    R_c: Fraction

    def __post_init__(self):
        if self.p % self.m:
            raise ValueError(f"p={self.p} not divisible by m={self.m}")
        if self.n % (self.p // self.m):
            raise ValueError("n must be a multiple of p/m")
        if (self.R_c * self.n_c).denominator != 1:
            raise ValueError("R_c n_c is not an integer")

    @property
    def q(self) -> int:
        return 1 << self.p

    @property
    def uses_per_symbol(self) -> int:
        return self.p // self.m

    @property
    def n_c(self) -> int:
        return self.n * self.m // self.p

    @property
    def k_c(self) -> int:
        return int(self.R_c * self.n_c)

    @property
    def n_data_bits(self) -> int:
        return self.k_c * self.p

    @property
    def R_t(self) -> Fraction:
        return Fraction(self.n_data_bits, self.n)

    @property
    def points(self) -> np.ndarray:
        """Unit-power points indexed by label."""
        c = AskConstellation(self.m)
        pts = c.points / np.sqrt(np.mean(c.points**2))
        out = np.empty_like(pts)
        out[brgc(self.m)] = pts
        return out


def make_uniform_config(m: int, q: int, n: int, R_c=None, d_c: int | None = None) -> UniformConfig:
    if (R_c is None) == (d_c is None):
        raise ValueError("give exactly one of R_c and d_c")
    if R_c is None:
        R_c = 1 - Fraction(2, d_c)
    return UniformConfig(m, q.bit_length() - 1, n, _frac(R_c))


def uniform_transmit(data_bits, config: UniformConfig, enc: SystematicEncoder) -> TxFrame:
    if enc.n_c != config.n_c or enc.k != config.k_c or enc.field.q != config.q:
        raise ValueError("code does not match the uniform configuration")
    if not np.array_equal(enc.perm, np.arange(enc.n_c)):
        raise ValueError("code must be systematic on its first k columns")
    bits = np.asarray(data_bits, dtype=np.int64)
    if bits.shape != (config.n_data_bits,):
        raise ValueError(f"expected {config.n_data_bits} data bits, got {bits.shape}")
    u = _bits_to_symbols(bits, config.p)
    c = encode(u, enc)
    labels = _bits_to_symbols(_symbols_to_bits(c, config.p), config.m)
    x = config.points[labels]
    return TxFrame(bits, np.abs(x), np.sign(x).astype(np.int64), u, c, x)


def uniform_priors(y, config: UniformConfig, snr: float) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.shape != (config.n,):
        raise ValueError(f"expected {config.n} channel outputs, got {y.shape}")
    lf = _gauss_log(y.reshape(config.n_c, config.uses_per_symbol), config.points, snr)
    return _joint(lf)


def uniform_recover_bits(codeword, config: UniformConfig) -> np.ndarray:
    return _symbols_to_bits(np.asarray(codeword)[: config.k_c], config.p)
