"""Fixed-width mantissa/exponent numbers for shortest-path counts and dependency ratios.

Both types truncate toward zero, so an encoded value never exceeds the exact
one. Arithmetic is done exactly and renormalized afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .graph import ceil_log2


class ExponentOverflow(OverflowError):
    pass


def mantissa_bits(n: int, c: int = 1) -> int:
    return (3 + c) * ceil_log2(n)


@dataclass(frozen=True)
class ApproxCount:
    """Non-negative integer ``b * 2**E`` with ``b < 2**M`` and ``0 <= E < 2**E_bits``."""

    b: int
    E: int
    M: int
    E_bits: int

    @classmethod
    def encode(cls, x: int, M: int, E_bits: int) -> "ApproxCount":
        if x < 0:
            raise ValueError("counts are non-negative")
        shift = max(0, x.bit_length() - M)
        if shift >= 1 << E_bits:
            raise ExponentOverflow(f"{x} needs exponent {shift} beyond {E_bits} bits")
        return cls(x >> shift, shift, M, E_bits)

    @classmethod
    def for_graph(cls, x: int, n: int, c: int = 1) -> "ApproxCount":
        return cls.encode(x, mantissa_bits(n, c), ceil_log2(n))

    @property
    def value(self) -> int:
        return self.b << self.E

    @property
    def width(self) -> int:
        return self.M + self.E_bits

    def __add__(self, other: "ApproxCount") -> "ApproxCount":
        return approx_add(self, other)


def approx_add(a: ApproxCount, b: ApproxCount) -> ApproxCount:
    """Exact sum of two encoded counts, truncated back to M mantissa bits."""
    return ApproxCount.encode(a.value + b.value, a.M, a.E_bits)


def ratio_exponent_bits(n: int, M: int) -> int:
    """Signed exponent width for values in [2**-n, n+1] with M mantissa bits."""
    return 1 + ceil_log2(n + M + 1)


@dataclass(frozen=True)
class ApproxRatio:
    """Positive rational ``b * 2**E`` with M-bit mantissa and a signed exponent."""

    b: int
    E: int
    M: int
    E_bits: int

    @classmethod
    def encode(cls, x: Fraction, M: int, E_bits: int) -> "ApproxRatio":
        if x < 0:
            raise ValueError("ratios are non-negative")
        if x == 0:
            return cls(0, 0, M, E_bits)
        num, den = x.numerator, x.denominator
        # floor(log2 x) from bit lengths, corrected by one comparison
        e = num.bit_length() - den.bit_length()
        if (num << max(0, -e)) < (den << max(0, e)):
            e -= 1
        E = e - (M - 1)
        b = (num << -E) // den if E < 0 else num // (den << E)
        lim = 1 << (E_bits - 1)
        if not -lim <= E < lim:
            raise ExponentOverflow(f"exponent {E} outside signed {E_bits} bits")
        return cls(b, E, M, E_bits)

    @property
    def value(self) -> Fraction:
        return Fraction(self.b) * (Fraction(2) ** self.E)

    @property
    def width(self) -> int:
        return self.M + self.E_bits
