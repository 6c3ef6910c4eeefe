"""MAP (Multiply-Add-Permute) algebra over bipolar hypervectors.

Hypervectors are immutable int8 arrays of +1/-1. Accumulators keep the
lossless int32 component sums of a bundle and are normalized lazily.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
import numpy.typing as npt

from hdc.schemas import (
    MAX_SEED,
    AccumulatorOverflowError,
    DimensionMismatchError,
    EmptyAccumulatorError,
    InvalidDimensionError,
    InvalidSeedError,
    InvalidSymbolError,
)

DEFAULT_DIMENSION = 10_000
DEFAULT_SEED = 0x5EED_5EED_5EED_5EED
DEFAULT_WINDOW = 3  # n-gram order of sequence models
TIEBREAK_NAME = "__tiebreak__"
ACCUMULATOR_LIMIT = int(np.iinfo(np.int32).max)

_MASK64 = 0xFFFF_FFFF_FFFF_FFFF
_FNV_OFFSET = 0xCBF2_9CE4_8422_2325
_FNV_PRIME = 0x0000_0100_0000_01B3
_GOLDEN_GAMMA = np.uint64(0x9E37_79B9_7F4A_7C15)
_MIX_1 = np.uint64(0xBF58_476D_1CE4_E5B9)
_MIX_2 = np.uint64(0x94D0_49BB_1331_11EB)


def parse_seed(value: str | int) -> int:
    """Accept decimal or 0x-prefixed seeds and check the unsigned 64-bit range."""
    try:
        seed = int(value, 0) if isinstance(value, str) else int(value)
    except ValueError as e:
        raise InvalidSeedError(f"Invalid seed: {value!r}") from e
    if not 0 <= seed <= MAX_SEED:
        raise InvalidSeedError(f"Seed out of unsigned 64-bit range: {seed}")
    return seed


def check_dimension(dimension: int) -> int:
    if dimension < 2:
        raise InvalidDimensionError(f"Dimension must be at least 2, got {dimension}")
    return dimension


def default_tau(dimension: int) -> float:
    """Confidence threshold at four standard deviations of the null similarity."""
    return 4.0 / math.sqrt(dimension)


@dataclass(frozen=True, eq=False, slots=True)
class Hypervector:
    components: npt.NDArray[np.int8]

    def __post_init__(self) -> None:
        arr = np.array(self.components, dtype=np.int8)
        if arr.ndim != 1 or arr.size < 2:
            raise InvalidDimensionError("Hypervector must be one-dimensional with D >= 2")
        if not np.all(np.abs(arr) == 1):
            raise ValueError("Hypervector components must be -1 or +1")
        arr.setflags(write=False)
        object.__setattr__(self, "components", arr)

    @classmethod
    def of(cls, values: Iterable[int]) -> Hypervector:
        return cls(np.fromiter(values, dtype=np.int8))

    @classmethod
    def _trusted(cls, arr: npt.NDArray[np.int8]) -> Hypervector:
        # internal constructor for arrays already known to be bipolar int8
        arr.setflags(write=False)
        vector = object.__new__(cls)
        object.__setattr__(vector, "components", arr)
        return vector

    @property
    def dimension(self) -> int:
        return int(self.components.size)

    def __len__(self) -> int:
        return self.dimension

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Hypervector):
            return NotImplemented
        return bool(np.array_equal(self.components, other.components))

    __hash__ = None  # type: ignore[assignment]

    def __neg__(self) -> Hypervector:
        return Hypervector._trusted(-self.components)

    def __repr__(self) -> str:
        head = ",".join(f"{int(c):+d}" for c in self.components[:8])
        return f"Hypervector(D={self.dimension}, [{head}{',...' if self.dimension > 8 else ''}])"

    def to_list(self) -> list[int]:
        return [int(c) for c in self.components]


@dataclass(eq=False, slots=True)
class Accumulator:
    """Integer component sums of a bundle; single-writer."""

    sums: npt.NDArray[np.int32]
    count: int = 0

    @classmethod
    def zeros(cls, dimension: int) -> Accumulator:
        check_dimension(dimension)
        return cls(np.zeros(dimension, dtype=np.int32), 0)

    @property
    def dimension(self) -> int:
        return int(self.sums.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Accumulator):
            return NotImplemented
        return self.count == other.count and bool(np.array_equal(self.sums, other.sums))

    __hash__ = None  # type: ignore[assignment]

    def add(self, vector: Hypervector) -> Accumulator:
        _check_same_dimension(self.dimension, vector.dimension)
        if self.count + 1 > ACCUMULATOR_LIMIT:
            raise AccumulatorOverflowError(
                f"Accumulator already holds {self.count} vectors"
            )
        self.sums += vector.components
        self.count += 1
        return self

    def merge(self, other: Accumulator) -> Accumulator:
        """Sum two accumulators into a new one; associative and commutative."""
        _check_same_dimension(self.dimension, other.dimension)
        if self.count + other.count > ACCUMULATOR_LIMIT:
            raise AccumulatorOverflowError("Merged accumulator would overflow")
        return Accumulator(self.sums + other.sums, self.count + other.count)

    def bind(self, vector: Hypervector) -> Accumulator:
        """Bind every bundled vector with `vector`, applied directly to the sums."""
        _check_same_dimension(self.dimension, vector.dimension)
        return Accumulator(self.sums * vector.components.astype(np.int32), self.count)

    def copy(self) -> Accumulator:
        return Accumulator(self.sums.copy(), self.count)

    def check_invariants(self) -> None:
        if self.count < 0:
            raise ValueError("Accumulator count must be non-negative")
        if np.any(np.abs(self.sums) > self.count):
            raise ValueError("Accumulator sum exceeds its count")
        if np.any((self.sums - self.count) % 2 != 0):
            raise ValueError("Accumulator sums must share the parity of the count")


def _check_same_dimension(a: int, b: int) -> None:
    if a != b:
        raise DimensionMismatchError(f"Dimension mismatch: {a} != {b}")


def fnv1a_64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


def splitmix64_words(state: int, count: int) -> npt.NDArray[np.uint64]:
    """First `count` outputs of SplitMix64 seeded with `state`."""
    steps = np.arange(1, count + 1, dtype=np.uint64)
    z = np.uint64(state) + steps * _GOLDEN_GAMMA
    z = (z ^ (z >> np.uint64(30))) * _MIX_1
    z = (z ^ (z >> np.uint64(27))) * _MIX_2
    return z ^ (z >> np.uint64(31))


@lru_cache(maxsize=4096)
def _generate_components(name: str, seed: int, dimension: int) -> npt.NDArray[np.int8]:
    state = fnv1a_64(name.encode("utf-8")) ^ seed
    words = splitmix64_words(state, -(-dimension // 64))
    bits = np.unpackbits(words.astype(">u8").view(np.uint8))[:dimension]
    components = bits.astype(np.int8) * 2 - 1
    components.setflags(write=False)
    return components


def generate(name: str, seed: int, dimension: int = DEFAULT_DIMENSION) -> Hypervector:
    """Deterministic atomic hypervector for `name`.

    FNV-1a-64 of the UTF-8 name XOR the seed initializes SplitMix64; the
    output words are consumed most-significant bit first, bit 1 -> +1.
    """
    if not name:
        raise InvalidSymbolError("Symbol name must be non-empty")
    check_dimension(dimension)
    return Hypervector._trusted(_generate_components(name, parse_seed(seed), dimension))


def identity(dimension: int) -> Hypervector:
    """The all +1 vector, neutral element of binding."""
    return Hypervector._trusted(np.ones(check_dimension(dimension), dtype=np.int8))


def bind(a: Hypervector, b: Hypervector) -> Hypervector:
    _check_same_dimension(a.dimension, b.dimension)
    return Hypervector._trusted(a.components * b.components)


def permute(a: Hypervector, k: int) -> Hypervector:
    """Rotate right by k: result[(i + k) mod D] = a[i]."""
    return Hypervector._trusted(np.roll(a.components, k % a.dimension))


def similarity(a: Hypervector, b: Hypervector) -> float:
    _check_same_dimension(a.dimension, b.dimension)
    agree = int(np.count_nonzero(a.components == b.components))
    return (2 * agree - a.dimension) / a.dimension


def accumulate(acc: Accumulator, v: Hypervector) -> Accumulator:
    """Add `v` to `acc` in place and return it."""
    return acc.add(v)


def normalize(acc: Accumulator, seed: int) -> Hypervector:
    """Sign of the sums; zero sums take the reserved tie-break vector's component."""
    if acc.count < 1:
        raise EmptyAccumulatorError("Cannot normalize an empty accumulator")
    result = np.sign(acc.sums).astype(np.int8)
    ties = result == 0
    if ties.any():
        tiebreak = generate(TIEBREAK_NAME, seed, acc.dimension)
        result[ties] = tiebreak.components[ties]
    return Hypervector._trusted(result)


def bundle(vectors: Sequence[Hypervector], seed: int) -> Hypervector:
    if not vectors:
        raise EmptyAccumulatorError("Cannot bundle an empty sequence")
    acc = Accumulator.zeros(vectors[0].dimension)
    for v in vectors:
        acc.add(v)
    return normalize(acc, seed)


def flip_components(
    v: Hypervector, fraction: float, rng: np.random.Generator
) -> Hypervector:
    """Negate exactly round(fraction * D) distinct components."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must lie in [0, 1]")
    flips = round(fraction * v.dimension)
    arr = v.components.copy()
    if flips:
        arr[rng.choice(v.dimension, size=flips, replace=False)] *= -1
    return Hypervector._trusted(arr)
