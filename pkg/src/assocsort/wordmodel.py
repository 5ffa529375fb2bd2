"""Simulated machine words, tagging and the interval hash.

A word is ``w`` bits wide.  The top bit (bit ``w - 1``) tags the word as a
node; the remaining ``w - 1`` bits are either a plain value or a node record.
All arithmetic happens on ordinary Python ints (or int64 inside the kernels),
so any width from 4 to 64 can be simulated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


class ModelError(ValueError):
    """Invalid word width, region size or value for the chosen model."""


class CorruptionError(RuntimeError):
    """A structural guarantee of the sort was violated.

    Raised instead of silently repairing the buffer.  Seeing one means the
    caller broke a precondition (tagged input, value out of range, ...) or
    there is a bug.
    """


def ceil_log2(n: int) -> int:
    """Number of bits needed to write any position below ``n``."""
    if n < 1:
        raise ModelError(f"ceil_log2 needs n >= 1, got {n}")
    return (n - 1).bit_length()


@dataclass(frozen=True)
class WordModel:
    w: int = 64

    def __post_init__(self):
        if not 4 <= self.w <= 64:
            raise ModelError(f"word width must be in [4, 64], got {self.w}")

    @property
    def tag_mask(self) -> int:
        return 1 << (self.w - 1)

    @property
    def value_limit(self) -> int:
        """Exclusive upper bound on values the phases can sort."""
        return 1 << (self.w - 1)

    @property
    def payload_mask(self) -> int:
        return self.tag_mask - 1

    @property
    def word_mask(self) -> int:
        return (1 << self.w) - 1

    @property
    def max_region(self) -> int:
        return 1 << (self.w - 1)

    # int64 images of the masks, as handed to the compiled kernels
    @property
    def tag_i64(self) -> int:
        return self.tag_mask - (1 << 64) if self.w == 64 else self.tag_mask

    def is_tagged(self, word: int) -> bool:
        return bool(word & self.tag_mask)

    def tag(self, payload: int) -> int:
        if not 0 <= payload <= self.payload_mask:
            raise ModelError(f"payload {payload} does not fit {self.w - 1} bits")
        return self.tag_mask | payload

    def untag(self, word: int) -> int:
        return word & self.payload_mask

    def threshold(self, n: int) -> int:
        """Largest occurrence count a packed (position, count) record can hold."""
        self.check_region(n)
        return 1 << (self.w - 1 - ceil_log2(n))

    def check_region(self, n: int) -> None:
        if n < 1 or n > self.max_region:
            raise ModelError(f"region length {n} outside [1, 2^{self.w - 1}]")


def compute_epsilon(n: int, model: WordModel) -> int:
    """Size of the recovery area reserved at the front of a region of ``n``.

    ``ceil((n / 2) / T)`` with ``T = 2 ** (w - 1 - ceil(log2 n))``, done in
    integers: ``ceil(n / (2 T))``.
    """
    if n < 2 or n > model.max_region:
        raise ModelError(f"epsilon is defined for 2 <= n <= 2^{model.w - 1}, got {n}")
    t = model.threshold(n)
    return -(-n // (2 * t))


@dataclass
class IntervalParams:
    """Hash parameters of one pass over a region of length ``n``.

    Values ``[delta, delta + n - epsilon - 1]`` map onto positions
    ``[epsilon, n - 1]``.
    """

    delta: int
    epsilon: int
    n: int
    model: WordModel

    @classmethod
    def for_region(cls, delta: int, n: int, model: WordModel, epsilon: Optional[int] = None):
        if epsilon is None:
            epsilon = compute_epsilon(n, model)
        model.check_region(n)
        if not 0 <= epsilon <= n:
            raise ModelError(f"epsilon {epsilon} outside [0, {n}]")
        return cls(delta, epsilon, n, model)

    @property
    def logn_bits(self) -> int:
        return ceil_log2(self.n)

    @property
    def count_bits(self) -> int:
        return self.model.w - 1 - self.logn_bits

    @property
    def threshold(self) -> int:
        return 1 << self.count_bits

    @property
    def interval(self) -> tuple[int, int]:
        """Inclusive bounds of the practiced value interval."""
        return self.delta, self.delta + self.n - self.epsilon - 1

    def in_interval(self, value: int) -> bool:
        return value >= self.delta and value - self.delta + self.epsilon < self.n


def hash_value(value: int, params: IntervalParams) -> Optional[int]:
    """Position of ``value`` in the subspace, or None when it is past the interval."""
    if value < params.delta:
        raise ModelError(f"value {value} is below the interval base {params.delta}")
    j = value - params.delta + params.epsilon
    return j if j < params.n else None


def inverse_hash(position: int, params: IntervalParams) -> int:
    if not params.epsilon <= position < params.n:
        raise ModelError(f"position {position} outside [{params.epsilon}, {params.n})")
    return position - params.epsilon + params.delta


def pack_record(position: int, count: int, params: IntervalParams) -> int:
    """Tagged word holding ``position`` in the high payload bits, ``count`` in the low."""
    if count + 1 > params.threshold:
        raise ModelError(
            f"count {count} needs a companion word (threshold {params.threshold})"
        )
    if not 0 <= position < params.n:
        raise ModelError(f"position {position} outside [0, {params.n})")
    return params.model.tag_mask | (position << params.count_bits) | count


def unpack_record(word: int, params: IntervalParams) -> tuple[int, int]:
    if not params.model.is_tagged(word):
        raise ModelError(f"word {word:#x} is not a node")
    payload = word & params.model.payload_mask
    return payload >> params.count_bits, payload & (params.threshold - 1)
