"""Per-agent move generation under the two movement laws.

A move from v toward the winner w with step size epsilon must

* land exactly epsilon closer to w (or on w when already within reach), and
* displace the agent by exactly epsilon (any smaller displacement is fine
  once the agent reaches w).

``check_constraints`` verifies both laws for a proposed move.  Under the
deepest-disagreement metric only a relaxed first law is checkable: suffix
copying can overshoot the target distance (rankings have no point at
distance 1 from w, for instance), so runs over that metric use
``ConstraintMode.APPROACH_ONLY``, which accepts any sufficient approach.

Each space has a deterministic default policy; binary and ranking spaces
also offer seeded-random variants that pick uniformly among the eligible
minimal edits.  A scripted policy replays an explicit profile sequence and
is how the known divergence scenarios are driven.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .errors import (
    ConfigurationError,
    ConstraintViolationError,
    InfeasibleStepError,
)
from .spaces import (
    EUCLIDEAN_EQ_TOL,
    Family,
    Metric,
    Point,
    SpaceSpec,
    dist,
    dist_first_changed,
    dist_hamming,
    dist_swap,
)


class PolicyKind(str, Enum):
    DEFAULT = "default"
    SEEDED_RANDOM = "seeded_random"
    SCRIPTED = "scripted"


class L1Mode(str, Enum):
    COORD_ORDER = "coord_order"
    PROPORTIONAL = "proportional"


class ConstraintMode(str, Enum):
    STRICT = "strict"
    APPROACH_ONLY = "approach_only"


@dataclass(frozen=True)
class PolicySpec:
    """How agents move: default, seeded-random, or scripted replay."""

    kind: PolicyKind = PolicyKind.DEFAULT
    seed: Optional[int] = None
    script: Optional[tuple[tuple[Point, ...], ...]] = None
    l1_mode: L1Mode = L1Mode.COORD_ORDER
    constraint_mode: ConstraintMode = ConstraintMode.STRICT

    def __post_init__(self) -> None:
        if self.kind is PolicyKind.SEEDED_RANDOM and self.seed is None:
            raise ConfigurationError("seeded_random policy needs a seed")
        if self.kind is PolicyKind.SCRIPTED:
            if not self.script:
                raise ConfigurationError("scripted policy needs a script")
            object.__setattr__(
                self, "script", tuple(tuple(profile) for profile in self.script)
            )


def _as_step_count(epsilon: float) -> int:
    step = int(epsilon)
    if step != epsilon or step <= 0:
        raise ConfigurationError(f"discrete moves need a positive integer step, got {epsilon}")
    return step


def move_l2(space: SpaceSpec, v: Point, w: Point, epsilon: float) -> Point:
    """Straight-line move; the unique point satisfying both laws."""
    gaps = [b - a for a, b in zip(v.real_vector, w.real_vector)]
    d = sum(g * g for g in gaps) ** 0.5
    if d <= epsilon:
        return w
    f = epsilon / d
    return Point.reals(a + f * g for a, g in zip(v.real_vector, gaps))


def move_l1(
    space: SpaceSpec, v: Point, w: Point, epsilon: float, mode: L1Mode = L1Mode.COORD_ORDER
) -> Point:
    """Taxicab move: spend the step budget coordinate by coordinate, or
    spread it proportionally to each coordinate's gap."""
    gaps = [b - a for a, b in zip(v.real_vector, w.real_vector)]
    d = sum(abs(g) for g in gaps)
    if d <= epsilon:
        return w
    if mode is L1Mode.PROPORTIONAL:
        f = epsilon / d
        return Point.reals(a + f * g for a, g in zip(v.real_vector, gaps))
    out = list(v.real_vector)
    budget = epsilon
    for i, g in enumerate(gaps):
        if budget <= 0:
            break
        step = min(abs(g), budget)
        out[i] += step if g > 0 else -step
        budget -= step
    return Point.reals(out)


def move_linf(space: SpaceSpec, v: Point, w: Point, epsilon: float) -> Point:
    """Straight-line move scaled so the largest coordinate change is epsilon."""
    gaps = [b - a for a, b in zip(v.real_vector, w.real_vector)]
    d = max(abs(g) for g in gaps)
    if d <= epsilon:
        return w
    f = epsilon / d
    return Point.reals(a + f * g for a, g in zip(v.real_vector, gaps))


def move_hamming(
    space: SpaceSpec,
    v: Point,
    w: Point,
    epsilon: float,
    rng: Optional[random.Random] = None,
) -> Point:
    """Flip epsilon disagreeing entries toward w.

    Committee ballots must keep their size, so they move by paired
    exchanges (one approval dropped, one gained); an odd step size is
    infeasible there.  The default picks the lowest-index candidates; a
    seeded rng picks uniformly instead.
    """
    step = _as_step_count(epsilon)
    committee = space.committee_size is not None
    if committee and step % 2 != 0:
        raise InfeasibleStepError(
            f"committee ballots change an even number of entries per move; step {step} is odd"
        )
    d = dist_hamming(space, v, w)
    if d <= step:
        return w
    bits = list(v.bits)
    if not committee:
        disagree = [i for i, (a, b) in enumerate(zip(v.bits, w.bits)) if a != b]
        chosen = sorted(rng.sample(disagree, step)) if rng else disagree[:step]
        for i in chosen:
            bits[i] = 1 - bits[i]
        return Point.of_bits(bits)
    drops = [i for i, (a, b) in enumerate(zip(v.bits, w.bits)) if a == 1 and b == 0]
    adds = [i for i, (a, b) in enumerate(zip(v.bits, w.bits)) if a == 0 and b == 1]
    pairs = step // 2
    chosen_drops = sorted(rng.sample(drops, pairs)) if rng else drops[:pairs]
    chosen_adds = sorted(rng.sample(adds, pairs)) if rng else adds[:pairs]
    for i in chosen_drops:
        bits[i] = 0
    for i in chosen_adds:
        bits[i] = 1
    return Point.of_bits(bits)


def move_swap(
    space: SpaceSpec,
    v: Point,
    w: Point,
    epsilon: float,
    rng: Optional[random.Random] = None,
) -> Point:
    """Perform epsilon adjacent transpositions toward w.

    Each transposition swaps an adjacent pair the agent orders oppositely
    to w, so each reduces the swap distance by exactly one.  The default
    always takes the leftmost eligible pair; a seeded rng picks uniformly.
    """
    step = _as_step_count(epsilon)
    d = dist_swap(space, v, w)
    if d <= step:
        return w
    wpos = {c: i for i, c in enumerate(w.ranking)}
    seq = list(v.ranking)
    for _ in range(step):
        eligible = [i for i in range(len(seq) - 1) if wpos[seq[i]] > wpos[seq[i + 1]]]
        i = rng.choice(eligible) if rng else eligible[0]
        seq[i], seq[i + 1] = seq[i + 1], seq[i]
    return Point.of_ranking(seq)


def move_first_changed(space: SpaceSpec, v: Point, w: Point, epsilon: float) -> Point:
    """Adopt w's entries on the window just below the current agreement suffix.

    Under the deepest-disagreement metric the only way to approach w is to
    extend the shared suffix, so the agent copies w's entries at positions
    [d - epsilon, d).  Rankings keep the displaced candidates in the agent's
    own relative order in the prefix; committee ballots repair their size by
    flipping the lowest-index prefix entries that help.
    """
    step = _as_step_count(epsilon)
    d = dist_first_changed(space, v, w)
    if d <= step:
        return w
    start = d - step
    if space.family is Family.BINARY:
        bits = list(v.bits[:start]) + list(w.bits[start:])
        if space.committee_size is not None:
            k = space.committee_size
            excess = sum(bits) - k
            for i in range(start):
                if excess == 0:
                    break
                if excess > 0 and bits[i] == 1:
                    bits[i] = 0
                    excess -= 1
                elif excess < 0 and bits[i] == 0:
                    bits[i] = 1
                    excess += 1
            if excess != 0:
                raise InfeasibleStepError(
                    f"cannot restore committee size {k} by adjusting the first {start} entries"
                )
        return Point.of_bits(bits)
    suffix = w.ranking[start:]
    taken = set(suffix)
    prefix = [c for c in v.ranking if c not in taken]
    return Point.of_ranking(prefix + list(suffix))


def check_constraints(
    space: SpaceSpec,
    before: Point,
    after: Point,
    winner: Point,
    epsilon: float,
    mode: ConstraintMode = ConstraintMode.STRICT,
) -> Optional[str]:
    """Return None if the move obeys the active laws, else a description.

    Never raises for a bad move; the description carries the numbers.
    Real-vector comparisons use EUCLIDEAN_EQ_TOL; discrete ones are exact.
    """
    tol = EUCLIDEAN_EQ_TOL if space.family is Family.EUCLIDEAN else 0
    d_before = dist(space, before, winner)
    d_after = dist(space, after, winner)
    target = max(0.0, d_before - epsilon)
    if mode is ConstraintMode.APPROACH_ONLY:
        if d_after > target + tol:
            return (
                f"approach law violated: distance to winner is {d_after}, "
                f"needed at most {target} (excess {d_after - target})"
            )
        return None
    if abs(d_after - target) > tol:
        return (
            f"approach law violated: distance to winner is {d_after}, "
            f"expected exactly {target} (off by {abs(d_after - target)})"
        )
    moved = dist(space, before, after)
    if d_after <= tol:
        if moved > epsilon + tol:
            return (
                f"displacement law violated: moved {moved}, "
                f"allowed at most {epsilon} when landing on the winner"
            )
    elif abs(moved - epsilon) > tol:
        return f"displacement law violated: moved {moved}, expected exactly {epsilon}"
    return None


class MovePolicy:
    """Bound policy for one run: produces every agent's move, deterministically.

    Seeded-random choices derive an rng per (iteration, agent), so moves
    within an iteration are order-independent.
    """

    def __init__(self, space: SpaceSpec, spec: PolicySpec):
        self.space = space
        self.spec = spec

    def _rng(self, iteration: int, agent: int) -> Optional[random.Random]:
        if self.spec.kind is not PolicyKind.SEEDED_RANDOM:
            return None
        mix = (self.spec.seed * 1_000_003 + iteration) * 1_000_003 + agent
        return random.Random(mix)

    def move(self, v: Point, w: Point, epsilon: float, iteration: int, agent: int) -> Point:
        if self.spec.kind is PolicyKind.SCRIPTED:
            return self._scripted(v, w, epsilon, iteration, agent)
        space = self.space
        rng = self._rng(iteration, agent)
        if space.distance is Metric.FIRST_CHANGED:
            return move_first_changed(space, v, w, epsilon)
        if space.family is Family.EUCLIDEAN:
            if space.distance is Metric.L1:
                return move_l1(space, v, w, epsilon, self.spec.l1_mode)
            if space.distance is Metric.L2:
                return move_l2(space, v, w, epsilon)
            return move_linf(space, v, w, epsilon)
        if space.family is Family.BINARY:
            return move_hamming(space, v, w, epsilon, rng)
        return move_swap(space, v, w, epsilon, rng)

    def _scripted(self, v: Point, w: Point, epsilon: float, iteration: int, agent: int) -> Point:
        script = self.spec.script
        if iteration + 1 >= len(script):
            raise ConfigurationError(
                f"script provides {len(script)} profiles, iteration {iteration} needs one more"
            )
        target = script[iteration + 1][agent]
        violation = check_constraints(
            self.space, v, target, w, epsilon, self.spec.constraint_mode
        )
        if violation is not None:
            raise ConstraintViolationError(
                f"scripted move for agent {agent} at iteration {iteration}: {violation}",
                agent=agent,
                iteration=iteration,
            )
        return target
