"""Global configurations and the classification operations built on them.

A configuration is the sorted tuple of distinct robot positions.  Everything a
robot is allowed to act on is delivered through :class:`Snapshot`, which holds
only relative gap structure: anonymity and the missing sense of orientation
are enforced by the type, not by convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Union

from .angles import (
    Direction,
    bisector_points,
    gaps_of,
    lex_compare,
    mod1,
    prefix_sums,
    rotational_fold,
)
from .errors import ClassificationError, PreconditionError, StructuralError

_CACHE = 1 << 16


@dataclass(frozen=True)
class Configuration:
    """n distinct robot positions, sorted ascending in the presentation frame."""

    positions: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.positions:
            raise StructuralError("a configuration needs at least one robot")
        if any(not (0 <= p < 1) for p in self.positions):
            raise StructuralError("positions must be normalised into [0, 1)")
        if list(self.positions) != sorted(self.positions):
            raise StructuralError("positions must be sorted ascending")
        if len(set(self.positions)) != len(self.positions):
            raise StructuralError("positions must be distinct")

    @classmethod
    def from_positions(cls, positions: Iterable[Fraction]) -> "Configuration":
        """Build from positions in any order; values are reduced mod 1."""
        return cls(tuple(sorted(mod1(Fraction(p)) for p in positions)))

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def gaps(self) -> tuple[Fraction, ...]:
        """Cyclic gaps, gaps[i] from robot i to robot i+1 in presentation order."""
        return gaps_of(self.positions)

    def fold(self) -> int:
        return rotational_fold(self.positions)


@dataclass(frozen=True)
class Snapshot:
    """What one robot sees: its two rooted gap sequences.

    ``forward_gaps`` and ``reverse_gaps`` are labelled in the robot's own
    frame; when ``flipped`` is set the labels are swapped relative to the
    presentation frame.  ``observer_position`` and ``flipped`` exist so the
    motion layer can place a computed move back on the shared circle; the
    choice logic itself only ever reads the gap sequences.
    """

    forward_gaps: tuple[Fraction, ...]
    reverse_gaps: tuple[Fraction, ...]
    observer_index: int
    observer_position: Fraction
    flipped: bool

    @property
    def n(self) -> int:
        return len(self.forward_gaps)

    def physical_direction(self, label: Direction) -> Direction:
        """Map a direction label from this snapshot's frame to the presentation frame."""
        return label.opposite if self.flipped else label


def snapshot_of(c: Configuration, i: int, flip: bool) -> Snapshot:
    """The two gap sequences rooted at robot i, with adversary-chosen labelling."""
    n = c.n
    if not (0 <= i < n):
        raise StructuralError(f"robot index {i} out of range for n={n}")
    gaps = c.gaps
    fwd = tuple(gaps[(i + j) % n] for j in range(n))
    rev = tuple(reversed(fwd))
    if flip:
        fwd, rev = rev, fwd
    return Snapshot(fwd, rev, i, c.positions[i], flip)


@dataclass(frozen=True)
class Symmetric:
    fold: int


@dataclass(frozen=True)
class LeaderConfig:
    leader: int
    pivotal: Direction


@dataclass(frozen=True)
class DoubleNomineeTied:
    nominee_a: int
    nominee_b: int
    # index of the robot sitting on a bisector point, or None (even n only)
    bisector_robot: Optional[int]


ConfigClass = Union[Symmetric, LeaderConfig, DoubleNomineeTied]


def _rooted(gaps: tuple[Fraction, ...], i: int, d: Direction) -> tuple[Fraction, ...]:
    """Gap sequence read from robot i in presentation direction d."""
    n = len(gaps)
    if d is Direction.FORWARD:
        return tuple(gaps[(i + j) % n] for j in range(n))
    return tuple(gaps[(i - 1 - j) % n] for j in range(n))


@lru_cache(maxsize=_CACHE)
def _nominees_cycle(gaps: tuple[Fraction, ...]) -> tuple[tuple[int, Direction], ...]:
    """Owners of the globally minimal rooted sequence, as (index, direction).

    Only robots adjacent to a minimal gap can own the minimum, so the scan is
    restricted to those candidates.
    """
    n = len(gaps)
    g_min = min(gaps)
    cands: list[tuple[int, Direction]] = []
    for j, g in enumerate(gaps):
        if g == g_min:
            cands.append((j, Direction.FORWARD))          # reads gaps[j] first
            cands.append(((j + 1) % n, Direction.REVERSE))  # reads gaps[j] first
    best: Optional[tuple[Fraction, ...]] = None
    winners: list[tuple[int, Direction]] = []
    for i, d in cands:
        seq = _rooted(gaps, i, d)
        if best is None or lex_compare(seq, best) < 0:
            best = seq
            winners = [(i, d)]
        elif lex_compare(seq, best) == 0:
            winners.append((i, d))
    # One robot can in principle own the minimum in both directions; that
    # would be a reflection through it, which still counts once.
    seen: dict[int, Direction] = {}
    for i, d in winners:
        if i not in seen:
            seen[i] = d
    return tuple(sorted(seen.items()))


def nominees(c: Configuration) -> list[tuple[int, Direction]]:
    """Robots owning the global minimum angle sequence, with the realising direction.

    Defined only for rotationally asymmetric configurations; the caller must
    screen symmetry first.
    """
    if rotational_fold(c.positions) != 1:
        raise ClassificationError("nominees are undefined for symmetric configurations")
    found = list(_nominees_cycle(c.gaps))
    if not 1 <= len(found) <= 2:
        raise ClassificationError(
            f"{len(found)} nominees in an asymmetric configuration; expected 1 or 2"
        )
    return found


def arc_population(
    c: Configuration, nominee_a: int, nominee_b: int
) -> tuple[int, int, list[int]]:
    """Partition robots between the two bisector-bounded arcs of the nominees.

    Returns (count_a, count_b, on_bisector).  The counts include the nominees
    themselves and exclude exactly the robots sitting on the two bisector
    points, so count_a + count_b + len(on_bisector) == n.
    """
    if nominee_a == nominee_b:
        raise PreconditionError("arc_population needs two distinct nominees")
    pa = c.positions[nominee_a]
    pb = c.positions[nominee_b]
    p, q = bisector_points(pa, pb)
    # walk from bisector point p to q: robots strictly inside belong to one
    # arc, the rest to the other
    lo, hi = (p, q) if p < q else (q, p)
    side_a_is_inner = lo < pa < hi
    count_a = count_b = 0
    on_bisector: list[int] = []
    for idx, pos in enumerate(c.positions):
        if pos == p or pos == q:
            on_bisector.append(idx)
        elif (lo < pos < hi) == side_a_is_inner:
            count_a += 1
        else:
            count_b += 1
    return count_a, count_b, on_bisector


@lru_cache(maxsize=_CACHE)
def _classify_cycle(gaps: tuple[Fraction, ...]) -> ConfigClass:
    """Classification in the index space of a rooted gap cycle.

    The result only depends on the cycle, so it is shared by every
    configuration that differs by a global rotation.
    """
    n = len(gaps)
    offsets = prefix_sums(gaps)
    fold = rotational_fold(offsets)
    if fold > 1:
        return Symmetric(fold)
    noms = _nominees_cycle(gaps)
    if len(noms) > 2:
        raise ClassificationError(
            f"{len(noms)} owners of the minimal sequence in an asymmetric configuration"
        )
    if len(noms) == 1:
        (i, d), = noms
        return LeaderConfig(i, d)
    (ia, da), (ib, db) = noms
    ref = Configuration(tuple(offsets))
    count_a, count_b, on_bis = arc_population(ref, ia, ib)
    if count_a > count_b:
        return LeaderConfig(ia, da)
    if count_b > count_a:
        return LeaderConfig(ib, db)
    bis = on_bis[0] if len(on_bis) == 1 else None
    return DoubleNomineeTied(ia, ib, bis)


def classify(c: Configuration) -> ConfigClass:
    """Full classification of a configuration with n >= 3 robots.

    Symmetric(k) when a nontrivial rotation fixes the set; otherwise a leader
    configuration whenever one exists (single nominee, or two nominees with
    unequal arcs); otherwise the tied two-nominee case, carrying the unique
    bisector robot when n is odd and None when n is even and the bisector is
    empty or doubly occupied.
    """
    if c.n < 3:
        raise PreconditionError("classification needs n >= 3")
    result = _classify_cycle(c.gaps)
    return result


def pivotal_direction(c: Configuration, leader: int) -> Direction:
    """The unique direction in which the leader reads its minimal sequence."""
    cls = classify(c)
    if not isinstance(cls, LeaderConfig) or cls.leader != leader:
        raise PreconditionError("pivotal_direction needs the leader of a leader configuration")
    gaps = c.gaps
    fwd = _rooted(gaps, leader, Direction.FORWARD)
    rev = _rooted(gaps, leader, Direction.REVERSE)
    cmp = lex_compare(fwd, rev)
    if cmp == 0:
        # a leader reading equal sequences both ways would contradict its own
        # leadership; see the classification invariants
        raise ClassificationError("leader has equal sequences in both directions")
    return Direction.FORWARD if cmp < 0 else Direction.REVERSE
