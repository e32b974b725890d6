"""Synchronized deliberation loop.

Each iteration computes the current winner, then moves every agent against
that same winner (moves never see each other's updates within an
iteration).  A run ends in one of three ways:

* CONVERGED  - an iteration moved nobody, which means every agent sits on
  the winner, i.e. the profile is a consensus;
* CYCLE      - a discrete profile reappeared (period and first index are
  reported);
* CAP_REACHED - the iteration budget ran out; a growth flag reports whether
  the winner was still drifting monotonically away from where it started.

The full per-iteration trace is kept: profile, winner, distances, and the
constraint-check result for every agent's move.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from . import rules as rules_mod
from .errors import ConfigurationError, ConstraintViolationError
from .policies import ConstraintMode, L1Mode, MovePolicy, PolicyKind, PolicySpec
from .rules import Profile, RuleSpec, VotingRule
from .spaces import EUCLIDEAN_EQ_TOL, Family, Metric, Point, SpaceSpec, dist, points_equal

#: fallback iteration budget when no initial distance is available
DEFAULT_MAX_ITERS = 10_000
#: budget multiplier applied to the farthest agent's step count
CAP_MULTIPLIER = 10
DEFAULT_GROWTH_WINDOW = 50

_LATTICE_RULES = frozenset({VotingRule.FLOOR_MEAN, VotingRule.MEDIAN})


class Outcome(str, Enum):
    CONVERGED = "converged"
    CYCLE = "cycle"
    CAP_REACHED = "cap_reached"


@dataclass(frozen=True)
class EngineConfig:
    """Everything a run needs besides the initial profile."""

    space: SpaceSpec
    rule: RuleSpec
    policy: PolicySpec = field(default_factory=PolicySpec)
    epsilon: float = 1.0
    max_iters: Optional[int] = None
    cycle_detection: Optional[bool] = None
    growth_window: int = DEFAULT_GROWTH_WINDOW

    def __post_init__(self) -> None:
        space, rule, policy = self.space, self.rule, self.policy
        if self.epsilon <= 0:
            raise ConfigurationError("step size must be positive")
        discrete = space.family is not Family.EUCLIDEAN
        if discrete and self.epsilon != int(self.epsilon):
            raise ConfigurationError("discrete spaces need an integer step size")
        expected = rules_mod._RULE_FAMILY[rule.rule]
        if space.family is not expected:
            raise ConfigurationError(
                f"rule {rule.rule.value} needs a {expected.value} space, "
                f"got {space.family.value}"
            )
        if rule.tiebreak_order is not None and space.num_candidates is not None:
            if len(rule.tiebreak_order) != space.num_candidates:
                raise ConfigurationError(
                    "tiebreak order length does not match the candidate count"
                )
        if rule.rule is VotingRule.MAJORITY and space.committee_size is not None:
            raise ConfigurationError("bitwise majority applies to unconstrained ballots")
        if rule.rule is VotingRule.TOPK_MAJORITY and space.committee_size is None:
            raise ConfigurationError("topk_majority needs a space with a committee size")
        if (
            space.distance is Metric.HAMMING
            and space.committee_size is not None
            and int(self.epsilon) % 2 != 0
        ):
            raise ConfigurationError(
                "committee ballots move by paired exchanges; the step size must be even"
            )
        if space.distance is Metric.FIRST_CHANGED:
            if policy.constraint_mode is not ConstraintMode.APPROACH_ONLY:
                raise ConfigurationError(
                    "the deepest-disagreement metric supports only approach_only checking"
                )
        if space.integer_lattice:
            if rule.rule not in _LATTICE_RULES:
                raise ConfigurationError(
                    "integer lattices support only floor_mean and median rules"
                )
            if self.epsilon != int(self.epsilon):
                raise ConfigurationError("integer lattices need an integer step size")
            lattice_safe_metric = space.distance is Metric.L1 and (
                policy.l1_mode is L1Mode.COORD_ORDER or space.dimension == 1
            )
            if not (lattice_safe_metric or space.dimension == 1):
                raise ConfigurationError(
                    "integer lattices need the taxicab metric with coordinate-order "
                    "moves (any metric works in one dimension)"
                )
        if self.cycle_detection and not discrete:
            raise ConfigurationError("cycle detection applies only to discrete spaces")
        if self.cycle_detection is None:
            object.__setattr__(self, "cycle_detection", discrete)
        if self.max_iters is not None and self.max_iters < 1:
            raise ConfigurationError("the iteration budget must be at least 1")
        if self.growth_window < 1:
            raise ConfigurationError("the growth window must be at least 1")


@dataclass(frozen=True)
class IterationRecord:
    """State at one iteration plus, when a step ran from it, the move data."""

    index: int
    points: tuple[Point, ...]
    winner: Point
    distances: tuple[float, ...]
    moved: Optional[tuple[bool, ...]] = None
    checks: Optional[tuple[Optional[str], ...]] = None


@dataclass(frozen=True)
class RunReport:
    outcome: Outcome
    #: consensus point for CONVERGED runs
    point: Optional[Point]
    #: iterations in which at least one agent moved
    moving_iterations: int
    #: profiles observed, initial state included
    states: int
    trace: tuple[IterationRecord, ...]
    cycle_period: Optional[int] = None
    cycle_first_index: Optional[int] = None
    growth_detected: Optional[bool] = None
    elapsed_seconds: float = 0.0


def is_consensus(profile: Profile) -> bool:
    """All agents on one point (within tolerance for real vectors)."""
    first = profile.points[0]
    return all(points_equal(profile.spec, first, p) for p in profile.points[1:])


def _profile_key(profile: Profile) -> tuple:
    return tuple(p.values for p in profile.points)


def step(
    profile: Profile,
    config: EngineConfig,
    *,
    policy: Optional[MovePolicy] = None,
    iteration: int = 0,
) -> tuple[Profile, IterationRecord]:
    """One synchronized iteration; returns the next profile and this state's record."""
    from .policies import check_constraints

    space = config.space
    mover = policy if policy is not None else MovePolicy(space, config.policy)
    w = rules_mod.winner(config.rule, profile)
    distances = tuple(dist(space, p, w) for p in profile.points)
    next_points = []
    checks = []
    moved = []
    for i, p in enumerate(profile.points):
        p_next = mover.move(p, w, config.epsilon, iteration, i)
        violation = check_constraints(
            space, p, p_next, w, config.epsilon, config.policy.constraint_mode
        )
        if violation is not None:
            raise ConstraintViolationError(
                f"agent {i} at iteration {iteration}: {violation}",
                agent=i,
                iteration=iteration,
            )
        next_points.append(p_next)
        checks.append(violation)
        moved.append(not points_equal(space, p, p_next))
    record = IterationRecord(
        index=iteration,
        points=profile.points,
        winner=w,
        distances=distances,
        moved=tuple(moved),
        checks=tuple(checks),
    )
    return Profile(space, tuple(next_points)), record


def _terminal_record(profile: Profile, config: EngineConfig, index: int) -> IterationRecord:
    w = rules_mod.winner(config.rule, profile)
    distances = tuple(dist(config.space, p, w) for p in profile.points)
    return IterationRecord(index=index, points=profile.points, winner=w, distances=distances)


def _default_max_iters(profile: Profile, config: EngineConfig) -> int:
    w0 = rules_mod.winner(config.rule, profile)
    far = max(dist(config.space, p, w0) for p in profile.points)
    if far <= EUCLIDEAN_EQ_TOL:
        return DEFAULT_MAX_ITERS
    return max(1, CAP_MULTIPLIER * math.ceil(far / config.epsilon))


def _growth_detected(trace: list[IterationRecord], config: EngineConfig) -> bool:
    """True when the winner kept drifting away from the initial winner over
    the whole final window."""
    window = config.growth_window
    if len(trace) < window + 1:
        return False
    w0 = trace[0].winner
    drift = [dist(config.space, r.winner, w0) for r in trace[-(window + 1):]]
    return all(a < b for a, b in zip(drift, drift[1:]))


def run(initial: Profile, config: EngineConfig) -> RunReport:
    """Iterate from ``initial`` until consensus, a cycle, or the budget cap."""
    if initial.spec != config.space:
        raise ConfigurationError("the profile's space differs from the configured space")
    started = time.perf_counter()
    max_iters = config.max_iters or _default_max_iters(initial, config)
    mover = MovePolicy(config.space, config.policy)
    trace: list[IterationRecord] = []
    seen = {_profile_key(initial): 0} if config.cycle_detection else None
    profile = initial
    outcome = Outcome.CAP_REACHED
    point = None
    cycle_period = None
    cycle_first = None
    for j in range(max_iters):
        next_profile, record = step(profile, config, policy=mover, iteration=j)
        trace.append(record)
        if not any(record.moved):
            outcome = Outcome.CONVERGED
            point = record.winner
            break
        profile = next_profile
        if seen is not None:
            key = _profile_key(profile)
            if key in seen:
                outcome = Outcome.CYCLE
                cycle_first = seen[key]
                cycle_period = (j + 1) - cycle_first
                trace.append(_terminal_record(profile, config, j + 1))
                break
            seen[key] = j + 1
    else:
        terminal = _terminal_record(profile, config, max_iters)
        trace.append(terminal)
        # consensus reached on the budget's last step still counts
        if is_consensus(profile):
            outcome = Outcome.CONVERGED
            point = terminal.winner
    growth = _growth_detected(trace, config) if outcome is Outcome.CAP_REACHED else None
    moving = sum(1 for r in trace if r.moved and any(r.moved))
    return RunReport(
        outcome=outcome,
        point=point,
        moving_iterations=moving,
        states=len(trace),
        trace=tuple(trace),
        cycle_period=cycle_period,
        cycle_first_index=cycle_first,
        growth_detected=growth,
        elapsed_seconds=time.perf_counter() - started,
    )
