"""Independent reference implementations used as oracles by the tests.

Everything here is deliberately written against the definitions, not the
package internals: graph search instead of pair counting, determinant
geometry instead of least squares, and so on.  Values frozen from these
functions guard the real implementations against drift.
"""

import itertools
import math
from collections import deque

from delibsim import Family, Metric, Point, SpaceSpec


def euclidean(metric: Metric, dim: int, lattice: bool = False) -> SpaceSpec:
    return SpaceSpec(Family.EUCLIDEAN, metric, dimension=dim, integer_lattice=lattice)


def binary(metric: Metric, m: int, k=None) -> SpaceSpec:
    return SpaceSpec(Family.BINARY, metric, num_candidates=m, committee_size=k)


def ranking_space(metric: Metric, m: int) -> SpaceSpec:
    return SpaceSpec(Family.RANKING, metric, num_candidates=m)


def bfs_swap_distance(a, b) -> int:
    """Shortest path between two rankings in the adjacent-transposition graph."""
    a, b = tuple(a), tuple(b)
    if a == b:
        return 0
    seen = {a: 0}
    queue = deque([a])
    while queue:
        cur = queue.popleft()
        steps = seen[cur]
        for i in range(len(cur) - 1):
            nxt = list(cur)
            nxt[i], nxt[i + 1] = nxt[i + 1], nxt[i]
            nxt = tuple(nxt)
            if nxt == b:
                return steps + 1
            if nxt not in seen:
                seen[nxt] = steps + 1
                queue.append(nxt)
    raise AssertionError("permutation graph is connected; unreachable")


def suffix_disagreement(a, b) -> int:
    """Length minus the longest common suffix of two equal-length sequences."""
    m = len(a)
    shared = 0
    while shared < m and a[m - 1 - shared] == b[m - 1 - shared]:
        shared += 1
    return m - shared


def _circumcircle_2d(p1, p2, p3):
    """Circumcenter by perpendicular-bisector determinants; None if collinear."""
    (x1, y1), (x2, y2), (x3, y3) = p1, p2, p3
    d = 2.0 * (x1 * (y2 - y3) + x2 * (y3 - y1) + x3 * (y1 - y2))
    if abs(d) < 1e-12:
        return None
    s1, s2, s3 = x1 * x1 + y1 * y1, x2 * x2 + y2 * y2, x3 * x3 + y3 * y3
    ux = (s1 * (y2 - y3) + s2 * (y3 - y1) + s3 * (y1 - y2)) / d
    uy = (s1 * (x3 - x2) + s2 * (x1 - x3) + s3 * (x2 - x1)) / d
    return (ux, uy)


def brute_min_ball_2d(points):
    """Exact minimum enclosing circle of 2D points, by exhaustive boundary subsets.

    The optimum is determined by two diametral points or three concyclic
    ones, so trying every pair and triple and keeping the smallest circle
    that still covers everything is exact (if slow).  Returns (center, diameter).
    """
    pts = [tuple(map(float, p)) for p in points]
    if len(pts) == 1:
        return pts[0], 0.0
    best = None
    candidates = []
    for p, q in itertools.combinations(pts, 2):
        center = ((p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0)
        candidates.append((center, math.dist(center, p)))
    for p, q, r in itertools.combinations(pts, 3):
        center = _circumcircle_2d(p, q, r)
        if center is not None:
            candidates.append((center, math.dist(center, p)))
    for center, radius in candidates:
        if all(math.dist(center, p) <= radius + 1e-9 for p in pts):
            if best is None or radius < best[1]:
                best = (center, radius)
    assert best is not None
    return best[0], 2.0 * best[1]


def all_rankings(m: int):
    return [Point.of_ranking(p) for p in itertools.permutations(range(m))]


def kendall_tau(a, b) -> int:
    """Discordant-pair count, summed the slow explicit way."""
    m = len(a)
    pos_a = {c: i for i, c in enumerate(a)}
    pos_b = {c: i for i, c in enumerate(b)}
    count = 0
    for x in range(m):
        for y in range(x + 1, m):
            if (pos_a[x] - pos_a[y]) * (pos_b[x] - pos_b[y]) < 0:
                count += 1
    return count
