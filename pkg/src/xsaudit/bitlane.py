"""Turning 64-bit generator output into 32-bit test streams.

A lane picks the high half, the low half, or both halves (high first) of
every 64-bit output, optionally reversing the bit order of each 32-bit word.
Bit-granular consumers read words most-significant bit first, so reversing
the low lane puts bit 0 of the generator output at the front.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numba
import numpy as np

from .prng import Generator, GeneratorKind, GeneratorState, seed_generator


class InsufficientStream(RuntimeError):
    """A finite source ran out of words."""


class Selector(enum.Enum):
    INTERLEAVE = "interleave"
    LOW32 = "low32"
    HIGH32 = "high32"


@dataclass(frozen=True)
class LaneSpec:
    selector: Selector
    reversed: bool = False

    @property
    def name(self) -> str:
        return self.selector.value + ("-rev" if self.reversed else "")

    @classmethod
    def parse(cls, name: str) -> LaneSpec:
        key = name.strip().lower()
        rev = False
        for suffix in ("-rev", "-reversed", "+rev", "r"):
            if key.endswith(suffix) and key[: -len(suffix)] in {s.value for s in Selector}:
                key, rev = key[: -len(suffix)], True
                break
        try:
            return cls(Selector(key), rev)
        except ValueError:
            raise ValueError(f"unknown lane {name!r}") from None

    def __str__(self) -> str:
        return self.name


ALL_LANES = tuple(LaneSpec(sel, rev) for sel in Selector for rev in (False, True))
LOW32_REVERSED = LaneSpec(Selector.LOW32, True)


def reverse32(w: int) -> int:
    """Mirror the bits of a 32-bit word: bit i moves to bit 31 - i."""
    return int(f"{w & 0xFFFFFFFF:032b}"[::-1], 2)


@numba.njit(cache=True)
def _reverse32_kernel(words, out):
    for i in range(words.shape[0]):
        v = words[i]
        v = ((v >> np.uint32(1)) & np.uint32(0x55555555)) | ((v & np.uint32(0x55555555)) << np.uint32(1))
        v = ((v >> np.uint32(2)) & np.uint32(0x33333333)) | ((v & np.uint32(0x33333333)) << np.uint32(2))
        v = ((v >> np.uint32(4)) & np.uint32(0x0F0F0F0F)) | ((v & np.uint32(0x0F0F0F0F)) << np.uint32(4))
        v = ((v >> np.uint32(8)) & np.uint32(0x00FF00FF)) | ((v & np.uint32(0x00FF00FF)) << np.uint32(8))
        out[i] = (v >> np.uint32(16)) | (v << np.uint32(16))


def reverse32_array(words: np.ndarray) -> np.ndarray:
    """Vectorised :func:`reverse32` over a uint32 array."""
    w = np.ascontiguousarray(words, dtype=np.uint32)
    out = np.empty_like(w)
    _reverse32_kernel(w, out)
    return out


def split_lane(outputs: np.ndarray, lane: LaneSpec) -> np.ndarray:
    """Map 64-bit outputs to the uint32 lane words they produce."""
    outputs = np.asarray(outputs, dtype=np.uint64)
    high = (outputs >> np.uint64(32)).astype(np.uint32)
    low = (outputs & np.uint64(0xFFFFFFFF)).astype(np.uint32)
    if lane.selector is Selector.HIGH32:
        words = high
    elif lane.selector is Selector.LOW32:
        words = low
    else:
        words = np.empty(2 * len(outputs), dtype=np.uint32)
        words[0::2] = high
        words[1::2] = low
    if lane.reversed:
        words = reverse32_array(words)
    return words


def top_bits(words: np.ndarray, s: int) -> np.ndarray:
    if not 1 <= s <= 32:
        raise ValueError(f"bits per word must be in [1, 32], got {s}")
    return (np.asarray(words, dtype=np.uint32) >> np.uint32(32 - s)).astype(np.uint32)


def unpack_msb_first(values: np.ndarray, s: int) -> np.ndarray:
    """Expand s-bit values into a flat 0/1 uint8 array, MSB of each value first."""
    values = np.asarray(values, dtype=np.uint32)
    if s == 1:
        return values.astype(np.uint8)
    shifts = np.arange(s - 1, -1, -1, dtype=np.uint32)
    return ((values[:, None] >> shifts) & np.uint32(1)).astype(np.uint8).ravel()


class BitSource:
    """Pull-based supplier of 32-bit lane words.

    Subclasses implement :meth:`words`; the single-word and bit-level
    accessors are built on top of it.
    """

    def words(self, n: int) -> np.ndarray:
        raise NotImplementedError

    def lane_next(self) -> int:
        return int(self.words(1)[0])

    def take_bits(self, s: int) -> int:
        """Top ``s`` bits of the next lane word."""
        if not 1 <= s <= 32:
            raise ValueError(f"bits per word must be in [1, 32], got {s}")
        return self.lane_next() >> (32 - s)

    def take_bits_array(self, n: int, s: int) -> np.ndarray:
        """``n`` consecutive :meth:`take_bits` results."""
        return top_bits(self.words(n), s)

    def bits(self, n_words: int, s: int) -> np.ndarray:
        """Flat 0/1 stream from ``n_words`` lane words, ``s`` bits each."""
        return unpack_msb_first(self.take_bits_array(n_words, s), s)


class GeneratorSource(BitSource):
    def __init__(self, state: GeneratorState, lane: LaneSpec):
        self.generator = Generator(state)
        self.lane = lane
        self._pending = np.empty(0, dtype=np.uint32)

    @classmethod
    def from_seed(cls, kind: GeneratorKind, seed: int, lane: LaneSpec) -> GeneratorSource:
        return cls(seed_generator(kind, seed), lane)

    def words(self, n: int) -> np.ndarray:
        if n < 0:
            raise ValueError("negative word count")
        have = len(self._pending)
        if n <= have:
            out, self._pending = self._pending[:n], self._pending[n:]
            return out
        per_output = 2 if self.lane.selector is Selector.INTERLEAVE else 1
        n_out = -(-(n - have) // per_output)
        fresh = split_lane(self.generator.fill(n_out), self.lane)
        merged = np.concatenate([self._pending, fresh]) if have else fresh
        out, self._pending = merged[:n], merged[n:]
        return out


class ArraySource(BitSource):
    """Finite source over a fixed array of 32-bit words."""

    def __init__(self, words):
        self._words = np.asarray(words, dtype=np.uint32)
        self._pos = 0

    def words(self, n: int) -> np.ndarray:
        if self._pos + n > len(self._words):
            raise InsufficientStream(
                f"requested {n} words, {len(self._words) - self._pos} remain"
            )
        out = self._words[self._pos : self._pos + n]
        self._pos += n
        return out


class NumpySource(BitSource):
    """Lane words drawn from a numpy ``Generator``; handy as an independent reference stream."""

    def __init__(self, rng: np.random.Generator):
        self.rng = rng

    def words(self, n: int) -> np.ndarray:
        return self.rng.integers(0, 1 << 32, size=n, dtype=np.uint32)
