"""Exact angular arithmetic on the unit circle.

Angles are rational fractions of one full turn, held as ``fractions.Fraction``
and normalised into [0, 1).  Working in turns instead of radians keeps every
comparison exact, which the decision rule depends on: lexicographic ties and
open-interval membership must never be corrupted by rounding.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import DegenerateInputError, StructuralError

Turn = Fraction

FULL_TURN = Fraction(1)


def mod1(x: Fraction) -> Fraction:
    """Reduce an angle to the canonical representative in [0, 1)."""
    return x % 1


def parse_turn(text: str) -> Fraction:
    """Parse a 'p/q' string into a Fraction.  Plain integers are accepted too."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise StructuralError(f"not a rational angle: {text!r}") from exc


def format_turn(x: Fraction) -> str:
    """Serialise a Fraction as 'p/q'.  Integers keep an explicit denominator ('0/1')."""
    return f"{x.numerator}/{x.denominator}"


class Direction(Enum):
    """One of the two ways around the circle, relative to the presentation order.

    The tag is presentation-relative on purpose: robots share no global
    orientation, so nothing downstream may attach meaning to which physical
    sense 'forward' is.
    """

    FORWARD = 1
    REVERSE = -1

    @property
    def opposite(self) -> "Direction":
        return Direction.REVERSE if self is Direction.FORWARD else Direction.FORWARD

    @property
    def sign(self) -> int:
        """+1 for FORWARD, -1 for REVERSE, as a multiplier on position offsets."""
        return self.value


def angle_between(a: Fraction, b: Fraction, d: Direction) -> Fraction:
    """Angular distance from point a to point b walking in direction d."""
    if d is Direction.FORWARD:
        return mod1(b - a)
    return mod1(a - b)


def lex_compare(s1: Sequence[Fraction], s2: Sequence[Fraction]) -> int:
    """Exact lexicographic comparison of two equal-length gap sequences.

    Returns -1, 0 or 1.  Sequences of different lengths are a structural error,
    not a comparison result.
    """
    if len(s1) != len(s2):
        raise StructuralError(f"sequence length mismatch: {len(s1)} vs {len(s2)}")
    for x, y in zip(s1, s2):
        if x < y:
            return -1
        if x > y:
            return 1
    return 0


def rotate(seq: Sequence[Fraction], j: int) -> tuple[Fraction, ...]:
    """Cyclic left rotation by j places."""
    n = len(seq)
    if n == 0:
        return ()
    j %= n
    return tuple(seq[j:]) + tuple(seq[:j])


def min_rotation(seq: Sequence[Fraction]) -> tuple[tuple[Fraction, ...], int]:
    """Lexicographically least cyclic rotation of seq, with its offset.

    Ties between equal rotations are broken toward the smallest offset.  Direct
    O(n^2) comparison; n stays small at the scales this package is used at.
    """
    n = len(seq)
    if n == 0:
        return (), 0
    best = tuple(seq)
    best_j = 0
    for j in range(1, n):
        cand = rotate(seq, j)
        if cand < best:
            best = cand
            best_j = j
    return best, best_j


def canonical_cycle(seq: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Least rotation of the cycle read in either of its two directions.

    This is the natural canonical form for an unoriented circle: two gap
    cycles describe the same arrangement exactly when they agree under some
    rotation possibly combined with a reversal.
    """
    return _canonical_cached(tuple(seq))


@lru_cache(maxsize=1 << 16)
def _canonical_cached(seq: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    fwd, _ = min_rotation(seq)
    rev, _ = min_rotation(tuple(reversed(seq)))
    return min(fwd, rev)


def gaps_of(sorted_positions: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Cyclic gap sequence of positions sorted ascending.  A single robot owns
    the whole turn, so n=1 yields (1,)."""
    n = len(sorted_positions)
    if n == 0:
        raise StructuralError("no positions")
    if n == 1:
        return (FULL_TURN,)
    return tuple(
        mod1(sorted_positions[(i + 1) % n] - sorted_positions[i]) for i in range(n)
    )


def _divisors_desc(n: int) -> list[int]:
    out = [d for d in range(1, n + 1) if n % d == 0]
    out.reverse()
    return out


def rotational_fold(positions: Iterable[Fraction]) -> int:
    """Largest k such that rotating every position by 1/k maps the set onto itself.

    k = 1 means rotationally asymmetric.  Only divisors of n can work: a k-fold
    symmetric set of n distinct points splits into orbits of size k.
    """
    pts = {mod1(p) for p in positions}
    n = len(pts)
    if n == 0:
        raise StructuralError("no positions")
    for k in _divisors_desc(n):
        if k == 1:
            return 1
        step = Fraction(1, k)
        if all(mod1(p + step) in pts for p in pts):
            return k
    return 1


def bisector_points(a: Fraction, b: Fraction) -> tuple[Fraction, Fraction]:
    """The two antipodal circle points of the perpendicular bisector of chord ab.

    Returned as ((a+b)/2 mod 1, (a+b)/2 + 1/2 mod 1); symmetric in a and b.
    """
    if mod1(a) == mod1(b):
        raise DegenerateInputError("bisector of a point with itself is undefined")
    mid = mod1((a + b) / 2)
    return mid, mod1(mid + Fraction(1, 2))


def prefix_sums(seq: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """(0, seq[0], seq[0]+seq[1], ...): offsets of cycle members from the root."""
    acc = Fraction(0)
    out = [acc]
    for g in seq[:-1]:
        acc += g
        out.append(acc)
    return tuple(out)
