"""Exhaustive Cayley-ball indexing and depth measurement.

The ball oracle is the ground truth for every distance claim in this
package: it enumerates all elements within a given word-metric radius by
breadth-first (or, for weighted alphabets, uniform-cost) search, storing
exact distances.  Depth of an element g is the distance from g to the
complement of the closed ball of radius d(1,g); it is measured by a second
outward search over the index and is never silently truncated: if the cap
is hit, the report carries a flagged lower bound instead.
"""

from __future__ import annotations

import heapq
import os
from collections import deque
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Optional

from .core import DeadendError, MarkedGroup

DEFAULT_BUDGET = 5_000_000


class ResourceCap(DeadendError):
    """Element budget exceeded while building a ball index."""


class NotInBall(DeadendError):
    """Queried element lies outside the indexed radius."""


class InsufficientRadius(DeadendError):
    """Index radius too small to certify the requested quantity."""


class HypothesisViolated(DeadendError):
    """A stated precondition fails on the supplied data."""


class BoundViolated(DeadendError):
    """Two tables differ by more than the promised bound."""


class ClaimViolation(DeadendError):
    """An asserted distance or depth claim failed against the oracle."""


def default_budget() -> int:
    """Element budget; override with the DEADEND_BUDGET environment variable."""
    raw = os.environ.get("DEADEND_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise ResourceCap("DEADEND_BUDGET must be an integer, got %r" % raw) from None
    if value <= 0:
        raise ResourceCap("DEADEND_BUDGET must be positive, got %d" % value)
    return value


@dataclass
class BallIndex:
    """Exact distance table for the closed ball of the given radius."""

    group: MarkedGroup
    radius: int
    table: dict  # key -> (element, distance)
    spheres: dict  # distance -> element count

    def __len__(self) -> int:
        return len(self.table)

    def __contains__(self, element) -> bool:
        return self.group.key(element) in self.table

    def distance(self, element) -> int:
        entry = self.table.get(self.group.key(element))
        if entry is None:
            raise NotInBall("element %s not within radius %d" % (self.group.render(element), self.radius))
        return entry[1]

    def elements(self) -> Iterable:
        for element, _dist in self.table.values():
            yield element

    def items_sorted(self) -> list:
        """(element, distance) pairs ordered by (distance, key); deterministic."""
        return sorted(((e, d) for (e, d) in self.table.values()),
                      key=lambda pair: (pair[1], self.group.key(pair[0])))

    def neighbors_in_ball(self, element):
        """(neighbor, letter weight) for neighbors that stayed inside the index."""
        g = self.group
        for lt in g.alphabet.signed_letters():
            n = g.apply_letter(element, lt)
            if g.key(n) in self.table:
                yield n, g.letter_weight(lt)

    def sphere_rows(self) -> list[tuple[int, int]]:
        return sorted(self.spheres.items())

    def to_json_obj(self, include_elements: bool = False) -> dict:
        obj = {
            "radius": self.radius,
            "size": len(self.table),
            "spheres": {str(d): c for d, c in self.sphere_rows()},
        }
        if include_elements:
            obj["elements"] = [
                {"element": self.group.render(e), "distance": d}
                for e, d in self.items_sorted()
            ]
        return obj


def ball(group: MarkedGroup, radius: int, budget: Optional[int] = None) -> BallIndex:
    """Index the closed ball of the given radius around the identity.

    Deterministic: unweighted alphabets use plain BFS in letter order;
    weighted ones use uniform-cost search with (distance, key) tie-breaks,
    so the table insertion order never depends on hash seeds or threads.
    """
    if radius < 0:
        raise DeadendError("radius must be nonnegative")
    if budget is None:
        budget = default_budget()
    ident = group.identity
    table: dict = {group.key(ident): (ident, 0)}
    spheres: dict = {0: 1}
    letters = group.alphabet.signed_letters()

    if not group.is_weighted:
        frontier = deque([ident])
        dist = 0
        while frontier and dist < radius:
            dist += 1
            next_frontier: deque = deque()
            for e in frontier:
                for lt in letters:
                    n = group.apply_letter(e, lt)
                    k = group.key(n)
                    if k not in table:
                        if len(table) >= budget:
                            raise ResourceCap(
                                "ball(radius=%d) exceeds element budget %d" % (radius, budget))
                        table[k] = (n, dist)
                        next_frontier.append(n)
            if next_frontier:
                spheres[dist] = len(next_frontier)
            frontier = next_frontier
        return BallIndex(group, radius, table, spheres)

    # Weighted uniform-cost search.  Entries ordered by (distance, key).
    table = {}
    spheres = {}
    heap: list = [(0, group.key(ident), ident)]
    while heap:
        d, k, e = heapq.heappop(heap)
        if k in table:
            continue
        if len(table) >= budget:
            raise ResourceCap("ball(radius=%d) exceeds element budget %d" % (radius, budget))
        table[k] = (e, d)
        spheres[d] = spheres.get(d, 0) + 1
        for lt in letters:
            nd = d + group.letter_weight(lt)
            if nd > radius:
                continue
            n = group.apply_letter(e, lt)
            nk = group.key(n)
            if nk not in table:
                heapq.heappush(heap, (nd, nk, n))
    return BallIndex(group, radius, table, spheres)


def distance(group: MarkedGroup, element, index: BallIndex) -> int:
    """Exact word-metric distance from the identity, read off the index."""
    return index.distance(element)


@dataclass(frozen=True)
class DepthReport:
    """Depth of one element.  When exceeds_cap is set, depth is a lower
    bound (the search found nothing farther within the cap) and witness
    is absent."""

    element: Any
    distance_from_identity: int
    depth: int
    witness: Any
    exceeds_cap: bool = False

    def to_json_obj(self, group: MarkedGroup) -> dict:
        return {
            "element": group.render(self.element),
            "distance_from_identity": self.distance_from_identity,
            "depth": self.depth,
            "witness": None if self.witness is None else group.render(self.witness),
            "exceeds_cap": self.exceeds_cap,
        }


def _outward_search(index: BallIndex, start, cap: int,
                    predicate: Callable[[Any, Any], bool]):
    """Nearest element (by word metric from start, within the index) where
    predicate(key, element) holds.  Returns (element, dist) or None.

    Uniform-cost over index adjacency with (distance, key) pops, so the
    returned witness is the deterministic lexicographic-least nearest one.
    """
    group = index.group
    start_key = group.key(start)
    heap = [(0, start_key, start)]
    seen = {start_key: 0}
    while heap:
        d, k, e = heapq.heappop(heap)
        if d > seen.get(k, d):
            continue
        if d > 0 and predicate(k, e):
            return e, d
        if d >= cap:
            continue
        for n, w in index.neighbors_in_ball(e):
            nd = d + w
            if nd > cap:
                continue
            nk = group.key(n)
            if nd < seen.get(nk, nd + 1):
                seen[nk] = nd
                heapq.heappush(heap, (nd, nk, n))
    return None


def depth(group: MarkedGroup, element, index: BallIndex, cap: int) -> DepthReport:
    """Distance from element to the nearest strictly-farther element.

    Requires index.radius >= d(1,element) + cap so that the outward search
    cannot run off the edge of the table.
    """
    if cap < 1:
        raise DeadendError("cap must be >= 1")
    d0 = index.distance(element)
    if index.radius < d0 + cap:
        raise InsufficientRadius(
            "need radius >= %d to measure depth with cap %d" % (d0 + cap, cap))
    table = index.table
    hit = _outward_search(index, element, cap,
                          lambda k, e: table[k][1] > d0)
    if hit is None:
        return DepthReport(element, d0, cap + 1, None, exceeds_cap=True)
    witness, d = hit
    return DepthReport(element, d0, d, witness)


def deadend_scan(group: MarkedGroup, index: BallIndex, min_depth: int,
                 cap: Optional[int] = None) -> list[DepthReport]:
    """All certifiable elements of depth >= min_depth, ordered by (distance, key).

    Only elements with distance + cap <= radius are scanned; reports flagged
    exceeds_cap carry depth lower bounds >= cap+1 > min_depth.
    """
    if cap is None:
        cap = min_depth
    if cap < min_depth:
        raise DeadendError("cap %d below min_depth %d" % (cap, min_depth))
    out = []
    for e, d0 in index.items_sorted():
        if d0 + cap > index.radius:
            continue
        report = depth(group, e, index, cap)
        if report.depth >= min_depth:
            out.append(report)
    return out


def _distance_layers(index: BallIndex, a, r: int) -> dict:
    """key -> word-metric distance from a, for everything within r of a."""
    group = index.group
    ak = group.key(a)
    heap = [(0, ak, a)]
    dists = {ak: 0}
    done: dict = {}
    while heap:
        d, k, e = heapq.heappop(heap)
        if k in done:
            continue
        done[k] = d
        if d >= r:
            continue
        for n, w in index.neighbors_in_ball(e):
            nd = d + w
            if nd > r:
                continue
            nk = group.key(n)
            if nd < dists.get(nk, nd + 1):
                dists[nk] = nd
                heapq.heappush(heap, (nd, nk, n))
    return done


def local_max_from_slack(index: BallIndex, f: dict, a, r: int, n: int):
    """From bounded slack to a local maximum.

    Given a table f (key -> int) with f <= f(a) + n throughout the closed
    r-ball around a, return (a', s) such that f attains a maximum over the
    closed s-ball around a' at a', with s as large as the monotone-envelope
    construction certifies (at most r // n).

    The envelope g(x) = max f over the x-ball around a is nondecreasing
    with total rise <= n inside radius r, so some window of width r // n
    is usually flat.  The window hunt extends past r (up to r + r // n)
    whenever the index has the room, which lets a maximum sitting exactly
    on the boundary sphere certify its full window; with n rises packed
    into n windows the flat window can still come up one short, in which
    case the certified smaller s is returned rather than an unsound r // n.
    """
    group = index.group
    a_key = group.key(a)
    d0 = index.table[a_key][1]
    if index.radius < d0 + r:
        raise InsufficientRadius("need radius >= %d for slack window r=%d" % (d0 + r, r))
    width = r // max(n, 1)
    probe = min(r + width, index.radius - d0)
    layers = _distance_layers(index, a, probe)
    fa = f[a_key]
    worst = max(f[k] - fa for k, d in layers.items() if d <= r)
    if worst > n:
        raise HypothesisViolated(
            "f exceeds f(a)+%d within radius %d (max slack %d)" % (n, r, worst))
    if worst <= 0:
        return a, r  # a already dominates the whole r-ball
    # envelope over integer radii 0..probe
    g = [fa] * (probe + 1)
    for k, d in layers.items():
        if f[k] > g[d]:
            g[d] = f[k]
    for x in range(1, probe + 1):
        if g[x] < g[x - 1]:
            g[x] = g[x - 1]
    for s in range(width, -1, -1):
        for x in range(0, min(r, probe - s) + 1):
            if g[x] == g[x + s]:
                best = min(k for k, d in layers.items() if d <= x and f[k] == g[x])
                return index.table[best][0], s
    raise DeadendError("unreachable: zero-width window always exists")


@dataclass(frozen=True)
class TransferRow:
    source: Any
    source_depth: int
    source_exceeds_cap: bool
    fuzz_radius: int
    slack: int
    target: Any
    target_depth_lb: int


@dataclass
class TransferReport:
    bound: int
    rows: list
    sources_scanned: int


def function_depth(index: BallIndex, f: dict, element, cap: int):
    """Depth of element with respect to an arbitrary distance-like table f:
    word-metric distance to the nearest element with a strictly larger f
    value.  Returns (depth, exceeded) where exceeded means nothing larger
    was found within cap (depth is then the lower bound cap+1)."""
    k0 = index.group.key(element)
    f0 = f[k0]
    hit = _outward_search(index, element, cap, lambda k, e: f[k] > f0)
    if hit is None:
        return cap + 1, True
    return hit[1], False


def depth_transfer_check(index: BallIndex, d1: dict, d2: dict, C: int,
                         min_source_depth: Optional[int] = None) -> TransferReport:
    """Transfer deep local maxima of d1 to certified local maxima of d2.

    Requires |d1 - d2| < C pointwise.  Every element whose d1-depth D is at
    least max(C+1, min_source_depth) yields a d2 local maximum via the slack
    construction on the (D - C)-ball; the report row records the certified
    d2-depth lower bound.
    """
    if C < 1:
        raise DeadendError("C must be >= 1")
    for k in index.table:
        if abs(d1[k] - d2[k]) >= C:
            raise BoundViolated(
                "|d1 - d2| >= %d at %s" % (C, index.group.render(index.table[k][0])))
    threshold = max(C + 1, min_source_depth or 0)
    group = index.group
    rows = []
    scanned = 0
    for e, d0 in index.items_sorted():
        cap = index.radius - d0
        if cap < 1:
            continue
        k = group.key(e)
        f1 = d1[k]
        # cheap prefilter: all letter-neighbors must stay <= f1 under d1
        if any(d1[group.key(nb)] > f1 for nb, _w in index.neighbors_in_ball(e)):
            continue
        scanned += 1
        D, exceeded = function_depth(index, d1, e, cap)
        if D < threshold:
            continue
        r = D - C
        if r < 1:
            continue
        layers = _distance_layers(index, e, r)
        slack = max(d2[kk] - d2[k] for kk in layers)
        if slack <= 0:
            target, s = e, r
        else:
            target, s = local_max_from_slack(index, d2, e, r, slack)
        rows.append(TransferRow(e, D, exceeded, r, max(slack, 0), target, s + 1))
    return TransferReport(C, rows, scanned)
