"""Scrambled Xorshift generators and SplitMix64.

Each generator is available twice:

* a pure-Python step function ``<name>_next(state) -> (state, word)`` operating
  on an immutable :class:`GeneratorState`; these are the readable reference
  transitions.
* a compiled bulk kernel used by :class:`Generator` to produce millions of
  words per second for the statistical tests.

The test-suite checks both paths against each other and against vectors
recorded from the C reference listings.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numba
import numpy as np

MASK64 = (1 << 64) - 1

SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
SPLITMIX_MUL1 = 0xBF58476D1CE4E5B9
SPLITMIX_MUL2 = 0x94D049BB133111EB
XORSHIFT1024STAR_MUL = 1181783497276652981


class AllZeroState(ValueError):
    """An Xorshift-family state of all zero words (a fixed point)."""


class GeneratorKind(enum.Enum):
    XORSHIFT1024STAR = "xorshift1024star"
    XORSHIFT1024PLUS = "xorshift1024plus"
    XORSHIFT128PLUS = "xorshift128plus"
    XORSHIFT128PLUS_V8 = "xorshift128plus-v8"
    XOROSHIRO128PLUS = "xoroshiro128plus"
    SPLITMIX64 = "splitmix64"

    @property
    def n_words(self) -> int:
        return _N_WORDS[self]

    @property
    def state_bits(self) -> int:
        return 64 * self.n_words

    @property
    def label(self) -> str:
        """Display name as used in published result tables."""
        return _LABELS[self]

    @property
    def scrambled(self) -> bool:
        return self is not GeneratorKind.SPLITMIX64

    @classmethod
    def parse(cls, name: str) -> GeneratorKind:
        key = name.strip().lower()
        for kind in cls:
            if key in (kind.value, kind.label.lower(), kind.name.lower()):
                return kind
        raise ValueError(f"unknown generator {name!r}")


_N_WORDS = {
    GeneratorKind.XORSHIFT1024STAR: 16,
    GeneratorKind.XORSHIFT1024PLUS: 16,
    GeneratorKind.XORSHIFT128PLUS: 2,
    GeneratorKind.XORSHIFT128PLUS_V8: 2,
    GeneratorKind.XOROSHIRO128PLUS: 2,
    GeneratorKind.SPLITMIX64: 1,
}

_LABELS = {
    GeneratorKind.XORSHIFT1024STAR: "xorshift1024*",
    GeneratorKind.XORSHIFT1024PLUS: "xorshift1024+",
    GeneratorKind.XORSHIFT128PLUS: "xorshift128+",
    GeneratorKind.XORSHIFT128PLUS_V8: "xorshift128+ (v8)",
    GeneratorKind.XOROSHIRO128PLUS: "xoroshiro128+",
    GeneratorKind.SPLITMIX64: "splitmix64",
}

SCRAMBLED_KINDS = tuple(k for k in GeneratorKind if k.scrambled)


@dataclass(frozen=True)
class GeneratorState:
    kind: GeneratorKind
    words: tuple[int, ...]
    index: int = 0

    def __post_init__(self):
        if len(self.words) != self.kind.n_words:
            raise ValueError(
                f"{self.kind.value} needs {self.kind.n_words} state words, got {len(self.words)}"
            )
        if any(not 0 <= w <= MASK64 for w in self.words):
            raise ValueError("state words must be unsigned 64-bit integers")
        if self.kind.scrambled and not any(self.words):
            raise AllZeroState(f"all-zero state for {self.kind.value}")
        limit = 16 if self.kind.n_words == 16 else 1
        if not 0 <= self.index < limit:
            raise ValueError(f"index {self.index} out of range for {self.kind.value}")


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


# -- reference step functions ------------------------------------------------


def splitmix_next(state: GeneratorState) -> tuple[GeneratorState, int]:
    x = (state.words[0] + SPLITMIX_GAMMA) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * SPLITMIX_MUL1) & MASK64
    z = ((z ^ (z >> 27)) * SPLITMIX_MUL2) & MASK64
    return GeneratorState(state.kind, (x,)), z ^ (z >> 31)


def _xorshift128plus(state, a, b, c):
    s1, s0 = state.words
    s1 ^= (s1 << a) & MASK64
    t = s1 ^ s0 ^ (s1 >> b) ^ (s0 >> c)
    return GeneratorState(state.kind, (s0, t)), (t + s0) & MASK64


def xorshift128plus_next(state: GeneratorState) -> tuple[GeneratorState, int]:
    return _xorshift128plus(state, 23, 18, 5)


def xorshift128plus_v8_next(state: GeneratorState) -> tuple[GeneratorState, int]:
    return _xorshift128plus(state, 23, 17, 26)


def xoroshiro128plus_next(state: GeneratorState) -> tuple[GeneratorState, int]:
    s0, s1 = state.words
    result = (s0 + s1) & MASK64
    s1 ^= s0
    w0 = _rotl(s0, 55) ^ s1 ^ ((s1 << 14) & MASK64)
    w1 = _rotl(s1, 36)
    return GeneratorState(state.kind, (w0, w1)), result


def _xorshift1024_step(state):
    words = list(state.words)
    s0 = words[state.index]
    p = (state.index + 1) & 15
    s1 = words[p]
    s1 ^= (s1 << 31) & MASK64
    words[p] = s1 ^ s0 ^ (s1 >> 11) ^ (s0 >> 30)
    return GeneratorState(state.kind, tuple(words), p), s0


def xorshift1024star_next(state: GeneratorState) -> tuple[GeneratorState, int]:
    new, _ = _xorshift1024_step(state)
    return new, (new.words[new.index] * XORSHIFT1024STAR_MUL) & MASK64


def xorshift1024plus_next(state: GeneratorState) -> tuple[GeneratorState, int]:
    new, s0 = _xorshift1024_step(state)
    return new, (new.words[new.index] + s0) & MASK64


STEP = {
    GeneratorKind.XORSHIFT1024STAR: xorshift1024star_next,
    GeneratorKind.XORSHIFT1024PLUS: xorshift1024plus_next,
    GeneratorKind.XORSHIFT128PLUS: xorshift128plus_next,
    GeneratorKind.XORSHIFT128PLUS_V8: xorshift128plus_v8_next,
    GeneratorKind.XOROSHIRO128PLUS: xoroshiro128plus_next,
    GeneratorKind.SPLITMIX64: splitmix_next,
}


def next_word(state: GeneratorState) -> tuple[GeneratorState, int]:
    return STEP[state.kind](state)


def seed_generator(kind: GeneratorKind, seed: int) -> GeneratorState:
    """Expand a 64-bit seed into a full state with SplitMix64.

    SplitMix64 itself is seeded directly. The other generators take their
    state words, in order, from consecutive SplitMix64 outputs.
    """
    seed &= MASK64
    if kind is GeneratorKind.SPLITMIX64:
        return GeneratorState(kind, (seed,))
    sm = GeneratorState(GeneratorKind.SPLITMIX64, (seed,))
    words = []
    for _ in range(kind.n_words):
        sm, w = splitmix_next(sm)
        words.append(w)
    return GeneratorState(kind, tuple(words))


# -- compiled bulk kernels ---------------------------------------------------
#
# Every constant is cast to uint64: numba promotes mixed uint64/int64
# arithmetic to float64.

_U = np.uint64


@numba.njit(cache=True)
def _fill_splitmix(s, out):
    x = s[0]
    for i in range(out.shape[0]):
        x += _U(SPLITMIX_GAMMA)
        z = x
        z = (z ^ (z >> _U(30))) * _U(SPLITMIX_MUL1)
        z = (z ^ (z >> _U(27))) * _U(SPLITMIX_MUL2)
        out[i] = z ^ (z >> _U(31))
    s[0] = x


@numba.njit(cache=True)
def _fill_xorshift128plus(s, out, a, b, c):
    ua, ub, uc = _U(a), _U(b), _U(c)
    w0 = s[0]
    w1 = s[1]
    for i in range(out.shape[0]):
        s1 = w0
        s0 = w1
        s1 ^= s1 << ua
        w0 = s0
        w1 = s1 ^ s0 ^ (s1 >> ub) ^ (s0 >> uc)
        out[i] = w1 + s0
    s[0] = w0
    s[1] = w1


@numba.njit(cache=True)
def _fill_xoroshiro128plus(s, out):
    w0 = s[0]
    w1 = s[1]
    for i in range(out.shape[0]):
        s0 = w0
        s1 = w1
        out[i] = s0 + s1
        s1 ^= s0
        w0 = ((s0 << _U(55)) | (s0 >> _U(9))) ^ s1 ^ (s1 << _U(14))
        w1 = (s1 << _U(36)) | (s1 >> _U(28))
    s[0] = w0
    s[1] = w1


@numba.njit(cache=True)
def _fill_xorshift1024(s, p, out, star):
    mul = _U(XORSHIFT1024STAR_MUL)
    for i in range(out.shape[0]):
        s0 = s[p]
        p = (p + 1) & 15
        s1 = s[p]
        s1 ^= s1 << _U(31)
        t = s1 ^ s0 ^ (s1 >> _U(11)) ^ (s0 >> _U(30))
        s[p] = t
        if star:
            out[i] = t * mul
        else:
            out[i] = t + s0
    return p


class Generator:
    """Mutable generator instance backed by the compiled kernels."""

    def __init__(self, state: GeneratorState):
        self.kind = state.kind
        self._s = np.array(state.words, dtype=np.uint64)
        self._p = state.index

    @classmethod
    def from_seed(cls, kind: GeneratorKind, seed: int) -> Generator:
        return cls(seed_generator(kind, seed))

    @property
    def state(self) -> GeneratorState:
        return GeneratorState(self.kind, tuple(int(w) for w in self._s), self._p)

    def fill(self, n: int) -> np.ndarray:
        """Return the next ``n`` outputs as a uint64 array."""
        out = np.empty(n, dtype=np.uint64)
        if n == 0:
            return out
        k = self.kind
        if k is GeneratorKind.SPLITMIX64:
            _fill_splitmix(self._s, out)
        elif k is GeneratorKind.XORSHIFT128PLUS:
            _fill_xorshift128plus(self._s, out, 23, 18, 5)
        elif k is GeneratorKind.XORSHIFT128PLUS_V8:
            _fill_xorshift128plus(self._s, out, 23, 17, 26)
        elif k is GeneratorKind.XOROSHIRO128PLUS:
            _fill_xoroshiro128plus(self._s, out)
        else:
            star = k is GeneratorKind.XORSHIFT1024STAR
            self._p = int(_fill_xorshift1024(self._s, self._p, out, star))
        return out

    def next(self) -> int:
        return int(self.fill(1)[0])
