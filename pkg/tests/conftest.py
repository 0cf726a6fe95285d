"""Shared fixtures: small hand-built configurations with known classifications."""

from fractions import Fraction
from random import Random

import pytest

from circleform import Configuration, TargetPattern, classify, gen_instance
from circleform.configuration import DoubleNomineeTied

F = Fraction


def config(*positions) -> Configuration:
    return Configuration.from_positions([F(p) for p in positions])


@pytest.fixture
def single_nominee5() -> Configuration:
    """Five robots, one nominee (robot 0 reading forward), leader config."""
    return config(0, F(1, 12), F(1, 3), F(1, 2), F(17, 24))


@pytest.fixture
def pattern5() -> TargetPattern:
    """Five-gap pattern, already in canonical reading; floor 0."""
    return TargetPattern.from_angles(
        [F(1, 18), F(1, 9), F(2, 9), F(5, 18), F(1, 3)]
    )


@pytest.fixture
def tied5() -> Configuration:
    """Odd tied case: two nominees with equal arcs, robot 0 on the bisector."""
    return config(0, F(1, 12), F(1, 3), F(2, 3), F(11, 12))


@pytest.fixture
def mirror_tied4() -> Configuration:
    """Even tied case: mirror-symmetric, nobody on the bisector."""
    return config(F(1, 12), F(1, 3), F(2, 3), F(11, 12))


def random_positions(n: int, rng: Random, den_max: int = 720) -> list[F]:
    """n distinct exact points; denominators vary so ties stay possible."""
    den = rng.randrange(4 * n, den_max)
    nums = rng.sample(range(den), n)
    return sorted(F(k, den) for k in nums)


def tied_even_instance(n: int, seed: int) -> tuple[Configuration, TargetPattern]:
    """Even-count instance that starts in the tied two-nominee class.

    Mirrors half the points through a diameter, then retries until the result
    is asymmetric, genuinely tied, and leaves room under the pattern floor.
    Used to force the randomized tie-break path in tests.
    """
    assert n % 2 == 0
    rng = Random(seed)
    for _ in range(1000):
        half = sorted(rng.sample(range(1, 500), n // 2))
        pts = {F(k, 1000) for k in half} | {1 - F(k, 1000) for k in half}
        if len(pts) != n:
            continue
        c = Configuration.from_positions(pts)
        if c.fold() != 1 or not isinstance(classify(c), DoubleNomineeTied):
            continue
        _, pattern = gen_instance(n, rng.randrange(1 << 30))
        if min(c.gaps) > pattern.min_gap_floor:
            return c, pattern
    raise AssertionError(f"no tied instance found for n={n}, seed={seed}")
