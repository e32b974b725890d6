"""Voting rules: profile in, winning position out.

Real-vector spaces aggregate element-wise (mean, floored mean, median).
Binary spaces use approval counting (bitwise majority, top-k committees).
Ranking spaces offer the exhaustive swap-distance minimizer plus the
classic positional/pairwise rules (Plurality, Borda, Copeland, STV), all
returning complete rankings.

Rules that order candidates by score take a tiebreak order: a fixed
permutation of the candidate indices, earlier meaning preferred.  Ties in
scores are broken toward the earlier candidate; ties when picking an
elimination loser are broken against the later candidate.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence

from .errors import ConfigurationError, InvalidPointError, UnsupportedSizeError
from .spaces import Family, Point, SpaceSpec, validate_point

#: hard ceiling for the exhaustive swap-distance minimizer (m! candidate rankings)
KEMENY_MAX_CANDIDATES = 8


class VotingRule(str, Enum):
    MEAN = "mean"
    FLOOR_MEAN = "floor_mean"
    MEDIAN = "median"
    MAJORITY = "majority"
    TOPK_MAJORITY = "topk_majority"
    KEMENY = "kemeny"
    PLURALITY = "plurality"
    BORDA = "borda"
    COPELAND = "copeland"
    STV = "stv"


#: rules whose scores feed candidate_scores / scoring_ranking
SCORING_RULES = frozenset({VotingRule.PLURALITY, VotingRule.BORDA, VotingRule.COPELAND})

_RULE_FAMILY = {
    VotingRule.MEAN: Family.EUCLIDEAN,
    VotingRule.FLOOR_MEAN: Family.EUCLIDEAN,
    VotingRule.MEDIAN: Family.EUCLIDEAN,
    VotingRule.MAJORITY: Family.BINARY,
    VotingRule.TOPK_MAJORITY: Family.BINARY,
    VotingRule.KEMENY: Family.RANKING,
    VotingRule.PLURALITY: Family.RANKING,
    VotingRule.BORDA: Family.RANKING,
    VotingRule.COPELAND: Family.RANKING,
    VotingRule.STV: Family.RANKING,
}

_NEEDS_TIEBREAK = frozenset(
    {
        VotingRule.TOPK_MAJORITY,
        VotingRule.PLURALITY,
        VotingRule.BORDA,
        VotingRule.COPELAND,
        VotingRule.STV,
    }
)


@dataclass(frozen=True)
class Profile:
    """An ordered collection of agent positions in one space."""

    spec: SpaceSpec
    points: tuple[Point, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(self.points))
        if len(self.points) == 0:
            raise ConfigurationError("a profile needs at least one agent")
        for i, p in enumerate(self.points):
            violation = validate_point(self.spec, p)
            if violation is not None:
                raise InvalidPointError(f"agent {i}: {violation}")

    @property
    def n(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class RuleSpec:
    """A rule choice plus the tiebreak order it may need."""

    rule: VotingRule
    tiebreak_order: Optional[tuple[int, ...]] = None

    def __post_init__(self) -> None:
        if self.tiebreak_order is not None:
            order = tuple(int(c) for c in self.tiebreak_order)
            object.__setattr__(self, "tiebreak_order", order)
            if sorted(order) != list(range(len(order))):
                raise ConfigurationError("tiebreak order must be a permutation of 0..m-1")


def _tiebreak_positions(m: int, tiebreak: Optional[Sequence[int]]) -> list[int]:
    """Map candidate -> position in the tiebreak order (identity if none given)."""
    if tiebreak is None:
        return list(range(m))
    if len(tiebreak) != m:
        raise ConfigurationError(
            f"tiebreak order lists {len(tiebreak)} candidates, space has {m}"
        )
    pos = [0] * m
    for i, c in enumerate(tiebreak):
        pos[c] = i
    return pos


def mean_elementwise(profile: Profile) -> Point:
    """Coordinate-wise arithmetic mean."""
    vectors = [p.real_vector for p in profile.points]
    n = profile.n
    return Point.reals(sum(col) / n for col in zip(*vectors))


def floor_mean_elementwise(profile: Profile) -> Point:
    """Coordinate-wise mean rounded down, staying on the integer lattice."""
    mean = mean_elementwise(profile)
    return Point.reals(float(math.floor(x)) for x in mean.real_vector)


def median_elementwise(profile: Profile) -> Point:
    """Coordinate-wise median; with an even number of agents the larger of
    the two middle values is used."""
    vectors = [p.real_vector for p in profile.points]
    n = profile.n
    return Point.reals(sorted(col)[n // 2] for col in zip(*vectors))


def bitwise_majority(profile: Profile) -> Point:
    """Entry-wise majority ballot; an exact tie resolves to 1."""
    if profile.spec.committee_size is not None:
        raise ConfigurationError("bitwise majority applies to unconstrained ballots")
    n = profile.n
    ballots = [p.bits for p in profile.points]
    return Point.of_bits(1 if 2 * sum(col) >= n else 0 for col in zip(*ballots))


def topk_majority(profile: Profile, k: int, tiebreak: Optional[Sequence[int]] = None) -> Point:
    """Committee of the k most-approved candidates.

    Equal approval counts are resolved toward the candidate earlier in the
    tiebreak order, which is required.
    """
    if tiebreak is None:
        raise ConfigurationError("topk_majority needs a tiebreak order")
    m = len(profile.points[0].bits)
    if not 1 <= k <= m:
        raise ConfigurationError(f"committee size {k} out of range for {m} candidates")
    tpos = _tiebreak_positions(m, tiebreak)
    approvals = [0] * m
    for p in profile.points:
        for c, b in enumerate(p.bits):
            approvals[c] += b
    chosen = sorted(range(m), key=lambda c: (-approvals[c], tpos[c]))[:k]
    committee = set(chosen)
    return Point.of_bits(1 if c in committee else 0 for c in range(m))


def _pairwise_preference(profile: Profile) -> list[list[int]]:
    """prefers[a][b] = number of agents ranking a before b."""
    m = profile.spec.num_candidates
    prefers = [[0] * m for _ in range(m)]
    for p in profile.points:
        r = p.ranking
        for i in range(m):
            for j in range(i + 1, m):
                prefers[r[i]][r[j]] += 1
    return prefers


def kemeny_ranking(profile: Profile, tiebreak: Optional[Sequence[int]] = None) -> Point:
    """The ranking with minimal total swap distance to the profile.

    Exhaustive over all m! rankings; refuses m > KEMENY_MAX_CANDIDATES.
    Cost ties are broken toward the ranking that is lexicographically
    smallest when candidates are read in tiebreak order (index order if no
    tiebreak is given).
    """
    m = profile.spec.num_candidates
    if m > KEMENY_MAX_CANDIDATES:
        raise UnsupportedSizeError(
            f"exhaustive search over {m}! rankings refused (limit {KEMENY_MAX_CANDIDATES})"
        )
    tpos = _tiebreak_positions(m, tiebreak)
    prefers = _pairwise_preference(profile)
    best: Optional[tuple[int, tuple[int, ...], tuple[int, ...]]] = None
    for perm in itertools.permutations(range(m)):
        cost = 0
        for i in range(m):
            for j in range(i + 1, m):
                cost += prefers[perm[j]][perm[i]]
        key = (cost, tuple(tpos[c] for c in perm))
        if best is None or key < (best[0], best[1]):
            best = (key[0], key[1], perm)
    return Point.of_ranking(best[2])


def candidate_scores(profile: Profile, kind: VotingRule) -> list[int]:
    """Per-candidate scores for a scoring rule.

    Plurality counts first places.  Borda awards m - place with places
    counted from 1, so a first place is worth m - 1.  Copeland counts
    strictly won pairwise matches; pairwise ties contribute nothing.
    """
    if kind not in SCORING_RULES:
        raise ConfigurationError(f"{kind.value} is not a scoring rule")
    m = profile.spec.num_candidates
    if kind is VotingRule.PLURALITY:
        scores = [0] * m
        for p in profile.points:
            scores[p.ranking[0]] += 1
        return scores
    if kind is VotingRule.BORDA:
        scores = [0] * m
        for p in profile.points:
            for place, c in enumerate(p.ranking):
                scores[c] += m - 1 - place
        return scores
    prefers = _pairwise_preference(profile)
    scores = [0] * m
    for a in range(m):
        for b in range(m):
            if a != b and prefers[a][b] > prefers[b][a]:
                scores[a] += 1
    return scores


def scoring_ranking(profile: Profile, kind: VotingRule, tiebreak: Sequence[int]) -> Point:
    """Rank candidates by descending score, tiebreak order deciding equal scores."""
    if tiebreak is None:
        raise ConfigurationError("scoring rules need a tiebreak order")
    m = profile.spec.num_candidates
    tpos = _tiebreak_positions(m, tiebreak)
    scores = candidate_scores(profile, kind)
    order = sorted(range(m), key=lambda c: (-scores[c], tpos[c]))
    return Point.of_ranking(order)


def stv_rounds(profile: Profile, tiebreak: Sequence[int]) -> list[tuple[int, int]]:
    """Elimination rounds of single transferable vote.

    Each round removes the Plurality loser of the profile restricted to the
    remaining candidates; the returned list holds (candidate, first-place
    count at elimination time) in elimination order.  A count tie eliminates
    the candidate later in the tiebreak order.
    """
    if tiebreak is None:
        raise ConfigurationError("stv needs a tiebreak order")
    m = profile.spec.num_candidates
    tpos = _tiebreak_positions(m, tiebreak)
    ballots = [list(p.ranking) for p in profile.points]
    remaining = set(range(m))
    rounds: list[tuple[int, int]] = []
    while remaining:
        counts = {c: 0 for c in remaining}
        for ballot in ballots:
            counts[ballot[0]] += 1
        loser = min(remaining, key=lambda c: (counts[c], -tpos[c]))
        rounds.append((loser, counts[loser]))
        remaining.discard(loser)
        for ballot in ballots:
            ballot.remove(loser)
    return rounds


def stv_ranking(profile: Profile, tiebreak: Sequence[int]) -> Point:
    """Full ranking induced by STV: candidates in reverse elimination order."""
    rounds = stv_rounds(profile, tiebreak)
    ranking = [c for c, _ in reversed(rounds)]
    return Point.of_ranking(ranking)


# Test hook: replaces the dispatcher below when set.  Used to prove that the
# downstream verification harness notices a broken rule.
_winner_override: Optional[Callable[[RuleSpec, Profile], Point]] = None


def set_winner_override(fn: Optional[Callable[[RuleSpec, Profile], Point]]) -> None:
    global _winner_override
    _winner_override = fn


def winner(rule: RuleSpec, profile: Profile) -> Point:
    """Apply a rule to a profile after checking the pairing makes sense."""
    if _winner_override is not None:
        return _winner_override(rule, profile)
    expected = _RULE_FAMILY[rule.rule]
    if profile.spec.family is not expected:
        raise ConfigurationError(
            f"rule {rule.rule.value} needs a {expected.value} space, "
            f"got {profile.spec.family.value}"
        )
    if rule.rule in _NEEDS_TIEBREAK and rule.tiebreak_order is None:
        raise ConfigurationError(f"rule {rule.rule.value} needs a tiebreak order")
    if rule.rule is VotingRule.MEAN:
        return mean_elementwise(profile)
    if rule.rule is VotingRule.FLOOR_MEAN:
        return floor_mean_elementwise(profile)
    if rule.rule is VotingRule.MEDIAN:
        return median_elementwise(profile)
    if rule.rule is VotingRule.MAJORITY:
        return bitwise_majority(profile)
    if rule.rule is VotingRule.TOPK_MAJORITY:
        if profile.spec.committee_size is None:
            raise ConfigurationError("topk_majority needs a space with a committee size")
        return topk_majority(profile, profile.spec.committee_size, rule.tiebreak_order)
    if rule.rule is VotingRule.KEMENY:
        return kemeny_ranking(profile, rule.tiebreak_order)
    if rule.rule in SCORING_RULES:
        return scoring_ranking(profile, rule.rule, rule.tiebreak_order)
    return stv_ranking(profile, rule.tiebreak_order)
