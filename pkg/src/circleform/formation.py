"""The formation rule: from one robot's snapshot to its next move.

The decision logic runs entirely in the snapshot's label space (the observer
is cycle index 0) and is cached per rooted gap cycle; a thin wrapper maps the
result back onto the shared circle.  All interval choices are made
deterministically by midpoint subdivision so runs are exactly replayable.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from random import Random
from typing import Iterable, Optional

from .angles import (
    FULL_TURN,
    Direction,
    canonical_cycle,
    lex_compare,
    mod1,
    prefix_sums,
)
from .configuration import (
    Configuration,
    DoubleNomineeTied,
    LeaderConfig,
    Snapshot,
    Symmetric,
    _classify_cycle,
    classify,
)
from .errors import (
    EmptyIntervalError,
    InvariantViolationError,
    PatternError,
    PreconditionError,
    StructuralError,
    SymmetricConfigurationError,
)

ZERO = Fraction(0)
_CACHE = 1 << 16
# denominator of randomized tie-break draws; two independent draws collide
# with probability 1/_RAND_DENOM
_RAND_DENOM = 1 << 61


@dataclass(frozen=True)
class TargetPattern:
    """A formable pattern, held as its canonical gap cycle.

    ``angles`` is the lexicographically least reading of the requested cycle
    over all rotations of both orientations, so angles[0] is a smallest gap
    and angles[1] <= angles[-1].  Rotated or mirrored inputs collapse to the
    same value; the mirror image is recovered, when a run needs it, by the
    embedding direction.
    """

    angles: tuple[Fraction, ...]
    original: tuple[Fraction, ...]

    @classmethod
    def from_angles(cls, angles: Iterable[Fraction]) -> "TargetPattern":
        orig = tuple(Fraction(a) for a in angles)
        if len(orig) < 3:
            raise PatternError("a pattern needs at least 3 gaps")
        if any(a <= 0 for a in orig):
            raise PatternError("pattern gaps must all be positive")
        if sum(orig) != FULL_TURN:
            raise PatternError("pattern gaps must sum to one full turn")
        canon = canonical_cycle(orig)
        if canon[1] == canon[-1]:
            # the endgame releases the leader's two neighbours through a gate
            # that only opens when these two gaps differ; regular polygons are
            # the simplest pattern this excludes
            raise PatternError(
                "unsupported pattern: the gaps flanking its smallest gap are equal"
            )
        return cls(canon, orig)

    @property
    def n(self) -> int:
        return len(self.angles)

    @property
    def min_gap_floor(self) -> Fraction:
        """Every gap the rule manufactures stays strictly above this bound.

        Keeping gaps above it guarantees the endgame's parking interval is
        never empty.  Initial configurations must respect it too; the
        instance generator enforces that.
        """
        return max(ZERO, 2 * self.angles[0] - self.angles[-1])


@dataclass(frozen=True)
class Embedding:
    """Concrete target points: the pattern anchored at the leader."""

    targets: tuple[Fraction, ...]
    anchor: Fraction
    direction: Direction


class DecisionKind(Enum):
    STAY = "stay"
    MOVE = "move"
    TERMINATE = "terminate"


@dataclass(frozen=True)
class Decision:
    """One robot's computed action.

    ``branch`` names the rule branch that produced the action; traces carry
    it so replays can be checked branch by branch.
    """

    kind: DecisionKind
    destination: Optional[Fraction] = None
    path_direction: Optional[Direction] = None
    branch: str = ""

    @property
    def is_move(self) -> bool:
        return self.kind is DecisionKind.MOVE


@dataclass(frozen=True)
class IntervalChoice:
    lo: Fraction
    hi: Fraction
    forbidden: frozenset
    chosen: Fraction


def select_in_interval(lo: Fraction, hi: Fraction, forbidden: Iterable[Fraction] = ()) -> IntervalChoice:
    """Deterministic pick from the open interval (lo, hi) avoiding a finite set.

    Takes the midpoint; if that is forbidden, tries the midpoints of the two
    halves (left first), then quarters, and so on level by level.  A finite
    forbidden set cannot cover a whole level, so this terminates.
    """
    if lo >= hi:
        raise EmptyIntervalError(f"empty open interval ({lo}, {hi})")
    bad = frozenset(forbidden)
    queue = deque([(lo, hi)])
    while True:
        a, b = queue.popleft()
        mid = (a + b) / 2
        if mid not in bad:
            return IntervalChoice(lo, hi, bad, mid)
        queue.append((a, mid))
        queue.append((mid, b))


def forbidden_epsilons_bisector(
    c: Configuration, mover: Fraction, neighbor: Fraction, path_direction: Direction
) -> frozenset:
    """Move amounts that would leave some robot on a bisector point.

    The mover travels from ``mover`` toward ``neighbor`` along
    ``path_direction``.  A robot at x sits on a bisector point of the moved
    pair exactly when 2x = mover' + neighbor (mod 1); the two antipodal
    bisector points give the same congruence, so each robot contributes one
    solution in [0, 1).
    """
    if mover == neighbor:
        raise PreconditionError("mover and neighbor must be distinct points")
    s = path_direction.sign
    out = set()
    for x in c.positions:
        if x == mover or x == neighbor:
            continue
        out.add(mod1(s * (2 * x - mover - neighbor)))
    return frozenset(out)


def _bisector_blocked(nb: Fraction, sign: int, others: Iterable[Fraction]) -> set:
    # label-space twin of forbidden_epsilons_bisector with the mover at offset 0
    return {mod1(sign * (2 * x - nb)) for x in others}


@dataclass(frozen=True)
class RoleFrame:
    """Leader-rooted reading of a configuration.

    Role k is the k-th robot from the leader along the pivotal direction;
    ``gaps[k]`` separates roles k and k+1, ``at[k]`` is role k's offset from
    the leader, and ``order[k]`` is its index in the configuration.
    """

    leader: int
    pivotal: Direction
    order: tuple[int, ...]
    gaps: tuple[Fraction, ...]
    at: tuple[Fraction, ...]

    @classmethod
    def from_configuration(cls, c: Configuration) -> "RoleFrame":
        found = classify(c)
        if not isinstance(found, LeaderConfig):
            raise PreconditionError("role structure needs a leader configuration")
        n = c.n
        lead, piv = found.leader, found.pivotal
        q = piv.sign
        raw = c.gaps
        if q > 0:
            gaps = tuple(raw[(lead + k) % n] for k in range(n))
        else:
            gaps = tuple(raw[(lead - 1 - k) % n] for k in range(n))
        order = tuple((lead + q * k) % n for k in range(n))
        return cls(lead, piv, order, gaps, prefix_sums(gaps))


def embed_targets(
    c: Configuration, leader: int, pivotal: Direction, pattern: TargetPattern
) -> Embedding:
    """Anchor the pattern at the leader, reading gaps along pivotal."""
    if pattern.n != c.n:
        raise StructuralError(f"pattern has {pattern.n} gaps for {c.n} robots")
    found = classify(c)
    if not (isinstance(found, LeaderConfig) and found.leader == leader and found.pivotal == pivotal):
        raise PreconditionError("embedding needs the leader of a leader configuration")
    anchor = c.positions[leader]
    s = pivotal.sign
    return Embedding(
        tuple(mod1(anchor + s * t) for t in prefix_sums(pattern.angles)),
        anchor,
        pivotal,
    )


def pattern_formed(c: Configuration, pattern: TargetPattern) -> bool:
    """True when the configuration realises the pattern in either direction."""
    if pattern.n != c.n:
        raise StructuralError(f"pattern has {pattern.n} gaps for {c.n} robots")
    return canonical_cycle(c.gaps) == pattern.angles


def _goal_offsets(emb: Embedding) -> tuple[Fraction, ...]:
    s = emb.direction.sign
    return tuple(mod1(s * (t - emb.anchor)) for t in emb.targets)


def _rfc_on(gaps: tuple[Fraction, ...], beta0: Fraction) -> bool:
    lead_margin = min(min(gaps[1:]), beta0)
    second_margin = min(min(gaps[2:]), beta0)
    return gaps[0] < lead_margin and gaps[1] < second_margin


def is_rfc(c: Configuration, pattern: TargetPattern) -> bool:
    """Leader's gap strictly least, its successor's gap strictly second least,
    both under the pattern's smallest gap."""
    frame = RoleFrame.from_configuration(c)
    return _rfc_on(frame.gaps, pattern.angles[0])


def is_pfc(c: Configuration, emb: Embedding) -> bool:
    """An RFC in which every role past the leader's two neighbours is on target."""
    frame = RoleFrame.from_configuration(c)
    if frame.pivotal != emb.direction or c.positions[frame.leader] != emb.anchor:
        raise PreconditionError("embedding does not match the configuration's leader")
    goal = _goal_offsets(emb)
    if not _rfc_on(frame.gaps, goal[1]):
        return False
    return all(frame.at[k] == goal[k] for k in range(3, c.n))


def _move_ready_role(gaps: tuple[Fraction, ...], goal: tuple[Fraction, ...]) -> Optional[int]:
    """First role >= 3 that is off target with clearance to reach it.

    Clearance: the gap to the next robot on the destination side must exceed
    the travel distance by more than gaps[1], so the landed robot still
    leaves a wider gap than the second-smallest one.
    """
    n = len(gaps)
    at = prefix_sums(gaps)
    for k in range(3, n):
        if at[k] == goal[k]:
            continue
        if goal[k] > at[k]:
            room = (at[k + 1] if k + 1 < n else FULL_TURN) - at[k]
            dist = goal[k] - at[k]
        else:
            room = at[k] - at[k - 1]
            dist = at[k] - goal[k]
        if room - dist > gaps[1]:
            return k
    return None


def move_ready(c: Configuration, emb: Embedding) -> Optional[int]:
    """Index of the robot cleared to settle onto its target, or None if all
    roles >= 3 already sit on theirs."""
    frame = RoleFrame.from_configuration(c)
    goal = _goal_offsets(emb)
    if not _rfc_on(frame.gaps, goal[1]):
        raise PreconditionError("Move-Ready detection needs a releasable configuration")
    k = _move_ready_role(frame.gaps, goal)
    return None if k is None else frame.order[k]


@lru_cache(maxsize=_CACHE)
def _decide(cycle: tuple[Fraction, ...], pat: tuple[Fraction, ...], mutant: Optional[str]):
    """Label-space core of the rule; the observer is cycle index 0.

    Returns ("terminate",), ("stay", why), ("unsolvable", fold),
    ("invariant", message), or ("move", dist, sign, branch) with sign +1 for
    label-forward, -1 for label-reverse, 0 when the caller may pick either
    (the two readings tie, so both neighbours are equivalent).
    """
    n = len(cycle)
    if canonical_cycle(cycle) == pat:
        return ("terminate",)
    found = _classify_cycle(cycle)
    if isinstance(found, Symmetric):
        return ("unsolvable", found.fold)
    floor = max(ZERO, 2 * pat[0] - pat[-1])
    off = prefix_sums(cycle)

    if isinstance(found, DoubleNomineeTied):
        if found.bisector_robot != 0:
            return ("stay", "wait_tie")
        cmp = lex_compare(cycle, tuple(reversed(cycle)))
        if cmp <= 0:
            sign, near, nb, others = (1 if cmp else 0), cycle[0], off[1], off[2:]
        else:
            sign, near, nb, others = -1, cycle[-1], off[-1], off[1:-1]
        g_min = min(cycle)
        lo, hi = near - g_min, near - floor
        if hi <= lo:
            hi = near
        bad = _bisector_blocked(nb, sign or 1, others)
        eps = select_in_interval(lo, hi, bad).chosen
        return ("move", eps, sign, "break_tie")

    lead, q = found.leader, found.pivotal.sign
    role = (q * (0 - lead)) % n
    if q > 0:
        gaps = tuple(cycle[(lead + k) % n] for k in range(n))
    else:
        gaps = tuple(cycle[(lead - 1 - k) % n] for k in range(n))
    at = prefix_sums(gaps)
    goal = prefix_sums(pat)
    settled = all(at[k] == goal[k] for k in range(3, n))
    lead_margin = min(min(gaps[1:]), pat[0])
    r1_home = gaps[0] == pat[0]

    if role == 0:
        # the leader only moves while its gap is not yet the strict minimum;
        # once the two stragglers are finishing it must hold still even
        # though its gap has grown back to pat[0]
        if gaps[0] >= lead_margin and not (r1_home and settled):
            lo, hi = gaps[0] - lead_margin, gaps[0] - floor
            if hi <= lo:
                hi = gaps[0]
            nb = off[1] if q > 0 else off[-1]
            others = off[2:] if q > 0 else off[1:-1]
            bad = _bisector_blocked(nb, q, others)
            # a landing that makes the follower's far reading match the
            # leader's near one would manufacture a two-nominee tie
            blocker = gaps[1] - gaps[n - 1]
            if blocker > 0:
                bad.add(blocker)
            eps = select_in_interval(lo, hi, bad).chosen
            return ("move", eps, q, "shrink_lead_gap")
        return ("stay", "wait_lead")

    if role == 2:
        second_margin = min(min(gaps[2:]), pat[0])
        if not settled and gaps[0] < lead_margin and gaps[1] >= second_margin:
            if mutant == "eps1-lower":
                lo, hi = ZERO, gaps[1] - gaps[0]
            else:
                lo, hi = gaps[1] - second_margin, gaps[1] - gaps[0]
            eps = select_in_interval(lo, hi).chosen
            return ("move", eps, -q, "shrink_second_gap")
        if settled and gaps[0] <= pat[0] and (gaps[0] < lead_margin or r1_home):
            if pat[0] + pat[1] - gaps[0] < pat[-1]:
                v, tag = goal[2], "finish_direct"
            else:
                # going straight to target would hand the smallest readings
                # to the far side; park short of it until role 1 passes
                lo = max(pat[1], 2 * pat[0] - gaps[0])
                hi = pat[-1]
                if hi <= lo:
                    lo = pat[0] - gaps[0]
                v = gaps[0] + select_in_interval(lo, hi).chosen
                tag = "finish_detour"
            if v == at[2]:
                return ("stay", "parked")
            sd = 1 if v > at[2] else -1
            return ("move", abs(v - at[2]), sd * q, tag)
        return ("stay", "wait_second")

    if role == 1:
        if settled and gaps[0] < lead_margin and gaps[1] > pat[1]:
            sd = 1 if goal[1] > at[1] else -1
            return ("move", abs(goal[1] - at[1]), sd * q, "finish_near")
        return ("stay", "wait_near")

    if _rfc_on(gaps, pat[0]) and not settled:
        k = _move_ready_role(gaps, goal)
        if k is None:
            return ("invariant", "no robot is cleared to move in a releasable configuration")
        if k != role:
            return ("stay", "wait_settle")
        sd = 1 if goal[k] > at[k] else -1
        return ("move", abs(goal[k] - at[k]), sd * q, "settle_target")
    return ("stay", "hold")


def _to_decision(instr: tuple, s: Snapshot) -> Decision:
    head = instr[0]
    if head == "terminate":
        return Decision(DecisionKind.TERMINATE, branch="formed")
    if head == "stay":
        return Decision(DecisionKind.STAY, branch=instr[1])
    if head == "unsolvable":
        raise SymmetricConfigurationError(instr[1])
    if head == "invariant":
        raise InvariantViolationError(instr[1])
    _, dist, sign, branch = instr
    if dist == 0:
        return Decision(DecisionKind.STAY, branch=branch)
    if sign == 0:
        pdir = Direction.FORWARD
    else:
        label = Direction.FORWARD if sign > 0 else Direction.REVERSE
        pdir = s.physical_direction(label)
    dest = mod1(s.observer_position + pdir.sign * dist)
    return Decision(DecisionKind.MOVE, dest, pdir, branch)


def _random_step(s: Snapshot, rng: Random, floor: Fraction = ZERO) -> Decision:
    cycle = s.forward_gaps
    cmp = lex_compare(cycle, tuple(reversed(cycle)))
    if cmp == 0:
        # a nominee reading the same both ways would own the minimum twice,
        # which forces a rotation symmetry; cannot happen here
        raise InvariantViolationError("nominee with a palindromic view")
    sign = 1 if cmp < 0 else -1
    g_min = min(cycle)
    k = rng.randrange(1, _RAND_DENOM)
    eps = Fraction(k, _RAND_DENOM) * (g_min - floor) / 2
    label = Direction.FORWARD if sign > 0 else Direction.REVERSE
    pdir = s.physical_direction(label)
    dest = mod1(s.observer_position + pdir.sign * eps)
    return Decision(DecisionKind.MOVE, dest, pdir, "random_tiebreak")


def randomized_nominee_move(s: Snapshot, rng: Random) -> Decision:
    """Tie-break for even robot counts: an activated nominee moves a random
    amount below half the minimum gap toward its smaller-reading neighbour."""
    if s.n % 2:
        raise PreconditionError("randomized tie-break applies to even robot counts")
    found = _classify_cycle(s.forward_gaps)
    if not isinstance(found, DoubleNomineeTied) or 0 not in (found.nominee_a, found.nominee_b):
        raise PreconditionError("randomized tie-break needs an observing nominee in a tied configuration")
    return _random_step(s, rng)


def compute(
    s: Snapshot,
    pattern: TargetPattern,
    rng: Optional[Random] = None,
    mutant: Optional[str] = None,
) -> Decision:
    """One robot's full look-compute step.

    Deterministic unless ``rng`` is given; then even-count tied
    configurations take the randomized tie-break (with the pattern's gap
    floor respected) instead of waiting for a bisector robot.  ``mutant``
    selects a deliberately weakened variant for the schedule explorer.
    """
    if pattern.n != s.n:
        raise StructuralError(f"pattern has {pattern.n} gaps for {s.n} robots")
    cycle = s.forward_gaps
    if rng is not None and s.n % 2 == 0 and canonical_cycle(cycle) != pattern.angles:
        found = _classify_cycle(cycle)
        if isinstance(found, DoubleNomineeTied) and 0 in (found.nominee_a, found.nominee_b):
            return _random_step(s, rng, pattern.min_gap_floor)
    return _to_decision(_decide(cycle, pattern.angles, mutant), s)
