"""GF(2) kernels and the null distributions of the linearity tests.

Bit sequences and matrix rows are packed into uint64 words and processed by
compiled kernels; probabilities that underflow double precision are carried
as logarithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numba
import numpy as np

LN2 = math.log(2.0)
LN10 = math.log(10.0)

# Bucket edges for the standardized complexity deviation.
BUCKET_EDGES = np.array([-2.5, -1.5, -0.5, 0.5, 1.5, 2.5])
# Asymptotic bucket probabilities as published for the classical test.
PUBLISHED_BUCKET_PROBS = (0.010417, 0.03125, 0.125, 0.5, 0.25, 0.0625, 0.020833)


class DomainError(ValueError):
    pass


# -- Berlekamp-Massey ----------------------------------------------------------

_U1 = np.uint64(1)
_U63 = np.uint64(63)


@numba.njit(cache=True)
def _parity(x):
    x ^= x >> np.uint64(32)
    x ^= x >> np.uint64(16)
    x ^= x >> np.uint64(8)
    x ^= x >> np.uint64(4)
    x ^= x >> np.uint64(2)
    x ^= x >> np.uint64(1)
    return x & np.uint64(1)


@numba.njit(cache=True)
def _xor_shifted(dst, src, shift, src_words):
    # dst ^= src << shift, src occupying words [0, src_words)
    q = shift >> 6
    r = np.uint64(shift & 63)
    hi = min(dst.shape[0] - 1, q + src_words)
    for k in range(hi, q - 1, -1):
        j = k - q
        v = np.uint64(0)
        if j < src_words:
            v = src[j] << r
        if r != 0 and 1 <= j <= src_words:
            v |= src[j - 1] >> (np.uint64(64) - r)
        dst[k] ^= v


@numba.njit(cache=True)
def _bm_kernel(bits):
    n = bits.shape[0]
    nw = (n >> 6) + 2
    c = np.zeros(nw, dtype=np.uint64)
    b = np.zeros(nw, dtype=np.uint64)
    t = np.zeros(nw, dtype=np.uint64)
    # s holds the sequence reversed: bit j of s is bit (i - j) of the input
    s = np.zeros(nw, dtype=np.uint64)
    c[0] = _U1
    b[0] = _U1
    lin = 0
    lin_b = 0
    m = 1
    for i in range(n):
        for k in range(i >> 6, 0, -1):
            s[k] = (s[k] << _U1) | (s[k - 1] >> _U63)
        s[0] = (s[0] << _U1) | np.uint64(bits[i] & 1)
        acc = np.uint64(0)
        for k in range((lin >> 6) + 1):
            acc ^= c[k] & s[k]
        if _parity(acc) == 0:
            m += 1
        elif 2 * lin <= i:
            cw = (lin >> 6) + 1
            for k in range(cw):
                t[k] = c[k]
            _xor_shifted(c, b, m, (lin_b >> 6) + 1)
            for k in range(cw):
                b[k] = t[k]
            for k in range(cw, nw):
                b[k] = 0
            lin_b = lin
            lin = i + 1 - lin
            m = 1
        else:
            _xor_shifted(c, b, m, (lin_b >> 6) + 1)
            m += 1
    return lin


@numba.njit(cache=True)
def _bm_rows(blocks):
    out = np.empty(blocks.shape[0], dtype=np.int64)
    for i in range(blocks.shape[0]):
        out[i] = _bm_kernel(blocks[i])
    return out


def berlekamp_massey(bits, n: int | None = None) -> int:
    """Linear complexity of a GF(2) sequence.

    Returns the length of the shortest LFSR generating the first ``n`` bits
    (all of them by default). The all-zero sequence has complexity 0.
    """
    arr = np.asarray(bits, dtype=np.uint8)
    if n is not None:
        if n < 1 or n > len(arr):
            raise DomainError(f"n={n} outside [1, {len(arr)}]")
        arr = arr[:n]
    return int(_bm_kernel(np.ascontiguousarray(arr)))


def block_complexities(blocks: np.ndarray) -> np.ndarray:
    """Linear complexity of every row of a 2-D 0/1 array."""
    return _bm_rows(np.ascontiguousarray(blocks, dtype=np.uint8))


# -- GF(2) rank ----------------------------------------------------------------


@numba.njit(cache=True)
def _rank_kernel(rows):
    # scans every bit position; padding columns are zero and never pivot
    nrows, nw = rows.shape
    rank = 0
    for col in range(nw * 64):
        w = col >> 6
        bit = _U1 << np.uint64(col & 63)
        piv = -1
        for r in range(rank, nrows):
            if rows[r, w] & bit:
                piv = r
                break
        if piv < 0:
            continue
        if piv != rank:
            for k in range(w, nw):
                tmp = rows[rank, k]
                rows[rank, k] = rows[piv, k]
                rows[piv, k] = tmp
        for r in range(piv + 1, nrows):
            if rows[r, w] & bit:
                for k in range(w, nw):
                    rows[r, k] ^= rows[rank, k]
        rank += 1
        if rank == nrows:
            break
    return rank


@numba.njit(cache=True)
def _rank_many(mats):
    out = np.empty(mats.shape[0], dtype=np.int64)
    for i in range(mats.shape[0]):
        out[i] = _rank_kernel(mats[i])
    return out


def pack_rows(bits: np.ndarray) -> np.ndarray:
    """Pack the last axis of a 0/1 array into uint64 words.

    Column order inside the words is an internal detail; it is the same for
    every row, which is all rank computations need.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    packed = np.packbits(bits, axis=-1)
    pad = (-packed.shape[-1]) % 8
    if pad:
        widths = [(0, 0)] * (packed.ndim - 1) + [(0, pad)]
        packed = np.pad(packed, widths)
    return np.ascontiguousarray(packed).view(np.uint64)


@dataclass
class BitMatrix:
    """Square L x L matrix over GF(2), rows packed into uint64 words."""

    L: int
    rows: np.ndarray

    def __post_init__(self):
        if self.L < 1:
            raise DomainError("matrix dimension must be >= 1")
        if self.rows.shape != (self.L, (self.L + 63) // 64):
            raise DomainError(f"packed rows have shape {self.rows.shape} for L={self.L}")

    @classmethod
    def from_bits(cls, bits) -> BitMatrix:
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.ndim != 2 or bits.shape[0] != bits.shape[1]:
            raise DomainError(f"expected a square 0/1 array, got shape {bits.shape}")
        return cls(bits.shape[0], pack_rows(bits))

    @classmethod
    def identity(cls, L: int) -> BitMatrix:
        return cls.from_bits(np.eye(L, dtype=np.uint8))

    @classmethod
    def zeros(cls, L: int) -> BitMatrix:
        return cls(L, np.zeros((L, (L + 63) // 64), dtype=np.uint64))

    def to_bits(self) -> np.ndarray:
        raw = np.ascontiguousarray(self.rows).view(np.uint8)
        return np.unpackbits(raw, axis=-1)[:, : self.L]

    def copy(self) -> BitMatrix:
        return BitMatrix(self.L, self.rows.copy())


def gf2_rank(m: BitMatrix) -> int:
    """Rank over GF(2). Eliminates in place: ``m`` is destroyed."""
    return int(_rank_kernel(m.rows))


def gf2_ranks(packed: np.ndarray) -> np.ndarray:
    """Ranks of a stack of packed matrices, shape (N, rows, words). Destroys input."""
    return _rank_many(packed)


# -- rank distribution ---------------------------------------------------------


def log_rank_probability(L: int, r: int) -> float:
    """Natural log of P(rank = r) for a uniform random L x L GF(2) matrix."""
    if L < 1:
        raise DomainError("L must be >= 1")
    if not 0 <= r <= L:
        raise DomainError(f"rank {r} outside [0, {L}]")
    logp = (r * (2 * L - r) - L * L) * LN2
    for i in range(r):
        logp += 2.0 * math.log1p(-math.ldexp(1.0, i - L)) - math.log1p(-math.ldexp(1.0, i - r))
    return logp


def rank_probability(L: int, r: int) -> float:
    """P(rank = r) for a uniform random L x L matrix over GF(2)."""
    if L > 64:
        return math.exp(log_rank_probability(L, r))
    if L < 1:
        raise DomainError("L must be >= 1")
    if not 0 <= r <= L:
        raise DomainError(f"rank {r} outside [0, {L}]")
    p = math.ldexp(1.0, r * (2 * L - r) - L * L)
    for i in range(r):
        p *= (1.0 - math.ldexp(1.0, i - L)) ** 2 / (1.0 - math.ldexp(1.0, i - r))
    return p


@lru_cache(maxsize=64)
def rank_category_probs(L: int) -> tuple[float, float, float]:
    """Probabilities of the categories rank <= L-2, rank = L-1, rank = L."""
    full = rank_probability(L, L)
    one_short = rank_probability(L, L - 1) if L >= 1 else 0.0
    logs = [log_rank_probability(L, r) for r in range(L - 1)]
    tail = math.exp(_logsumexp(logs)) if logs else 0.0
    return tail, one_short, full


def _logsumexp(xs) -> float:
    xs = list(xs)
    if not xs:
        return -math.inf
    top = max(xs)
    if top == -math.inf:
        return top
    return top + math.log(math.fsum(math.exp(x - top) for x in xs))


# -- linear complexity distribution --------------------------------------------


def _check_complexity(M: int, c: int):
    if M < 1:
        raise DomainError("block length must be >= 1")
    if not 0 <= c <= M:
        raise DomainError(f"complexity {c} outside [0, {M}]")


def log2_complexity_pmf(M: int, c: int) -> int:
    """Exact base-2 log of P(complexity = c) for a uniform M-bit sequence."""
    _check_complexity(M, c)
    if c == 0:
        return -M
    return min(2 * M - 2 * c, 2 * c - 1) - M


def complexity_pmf(M: int, c: int) -> float:
    return math.ldexp(1.0, log2_complexity_pmf(M, c))


def complexity_mean(M: int) -> float:
    """Asymptotic-form mean of the linear complexity of a random M-bit block."""
    return M / 2 + (9 + (-1) ** (M + 1)) / 36 - math.ldexp(M / 3 + 2 / 9, -M)


def complexity_deviation(M: int, c) -> np.ndarray:
    """Standardized deviation used to bucket complexities."""
    sign = 1 if M % 2 == 0 else -1
    return sign * (np.asarray(c, dtype=np.float64) - complexity_mean(M)) + 2 / 9


def complexity_bucket(M: int, c) -> np.ndarray:
    """Bucket index in 0..6 for one or more complexities."""
    return np.searchsorted(BUCKET_EDGES, complexity_deviation(M, c), side="left")


def complexity_bucket_probs(M: int) -> np.ndarray:
    """Exact probabilities of the seven complexity buckets for block length M."""
    if M < 100:
        raise DomainError(f"block length {M} < 100")
    return _bucket_probs(M).copy()


@lru_cache(maxsize=64)
def _bucket_probs(M: int) -> np.ndarray:
    cs = np.arange(M + 1)
    pmf = np.array([complexity_pmf(M, int(c)) for c in cs])
    probs = np.zeros(7)
    np.add.at(probs, complexity_bucket(M, cs), pmf)
    return probs


def complexity_log_cdf(M: int) -> np.ndarray:
    """Natural log of P(complexity <= c) for c = 0..M."""
    if M < 1:
        raise DomainError("block length must be >= 1")
    return _log_cdf(M).copy()


@lru_cache(maxsize=64)
def _log_cdf(M: int) -> np.ndarray:
    log2 = np.array([log2_complexity_pmf(M, c) for c in range(M + 1)], dtype=np.float64)
    return np.logaddexp.accumulate(log2 * LN2)


# -- chi-square tails ----------------------------------------------------------

_EPS = 1e-16
_FPMIN = 1e-300
_MAX_ITER = 100_000


def _log_gamma_prefactor(a: float, x: float) -> float:
    return -x + a * math.log(x) - math.lgamma(a)


def _log_lower_series(a: float, x: float) -> float:
    ap = a
    term = total = 1.0 / a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return math.log(total) + _log_gamma_prefactor(a, x)


def _log_upper_cf(a: float, x: float) -> float:
    # modified Lentz evaluation of the continued fraction for Q(a, x)
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.log(h) + _log_gamma_prefactor(a, x)


def _log1mexp(logp: float) -> float:
    """log(1 - exp(logp)) for logp <= 0."""
    if logp == -math.inf:
        return 0.0
    if logp > -LN2:
        return math.log(-math.expm1(logp))
    return math.log1p(-math.exp(logp))


def gamma_log_tails(a: float, x: float) -> tuple[float, float]:
    """Natural logs of the regularized lower and upper incomplete gamma, (log P, log Q)."""
    if a <= 0:
        raise DomainError("shape must be positive")
    if x < 0:
        raise DomainError("x must be non-negative")
    if x == 0:
        return -math.inf, 0.0
    if x < a + 1.0:
        log_p = min(_log_lower_series(a, x), 0.0)
        return log_p, _log1mexp(log_p)
    log_q = min(_log_upper_cf(a, x), 0.0)
    return _log1mexp(log_q), log_q


def chisq_log10_tails(x: float, k: int) -> tuple[float, float]:
    """(log10 p, log10 (1 - p)) for the upper tail p = P(chi2_k >= x)."""
    if k < 1:
        raise DomainError("degrees of freedom must be >= 1")
    if x < 0:
        raise DomainError("chi-square statistic must be non-negative")
    log_p_lower, log_q = gamma_log_tails(k / 2.0, x / 2.0)
    return log_q / LN10, log_p_lower / LN10


def chisq_pvalue(x: float, k: int) -> float:
    """Upper-tail probability P(chi2_k >= x)."""
    log10_p, _ = chisq_log10_tails(x, k)
    return 10.0**log10_p
