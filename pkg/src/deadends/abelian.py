"""Weighted abelian lattices and crystallographic reduction.

A weighted generating set on Z^n makes ordinary words cost the sum of
their letters' weights.  Scaling each generator to a common weight M (the
lcm) and taking the symmetric convex hull gives a polytope whose facets
organize the geodesics: words walking along one facet are geodesic rays,
and the polytope caps dead-end depth at 2D + M + 1 where D bounds the
weighted distance of lattice points in any facet's unit parallelepiped.

Finite extensions of Z^n (point group acting on the lattice) reduce to
this picture: minimal coset-trivial words become weighted generators, and
the reduced pseudo-norm sandwiches the true word length.
"""

from __future__ import annotations

import functools
import heapq
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .core import DeadendError, GenAlphabet, Letter, MarkedGroup, Word
from .search import (BallIndex, BoundViolated, InsufficientRadius, ResourceCap,
                     default_budget, depth)

Vec = tuple[int, ...]


class NotGenerating(DeadendError):
    """Generators fail to span the full integer lattice."""


class DegenerateHull(DeadendError):
    """Scaled generators do not span dimension n."""


class UnsupportedRank(DeadendError):
    """Exact hull construction implemented for n <= 3 only."""


class NotAFacet(DeadendError):
    """Facet argument does not belong to the polytope."""


class NotEuclidean(DeadendError):
    """Point-group data is not a finite lattice-preserving group."""


def _vec_add(u: Vec, v: Vec) -> Vec:
    return tuple(a + b for a, b in zip(u, v))


def _vec_scale(c: int, v: Vec) -> Vec:
    return tuple(c * a for a in v)


def _vec_neg(v: Vec) -> Vec:
    return tuple(-a for a in v)


def _det(rows: Sequence[Sequence[int]]) -> int:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    if n == 3:
        a, b, c = rows
        return (a[0] * (b[1] * c[2] - b[2] * c[1])
                - a[1] * (b[0] * c[2] - b[2] * c[0])
                + a[2] * (b[0] * c[1] - b[1] * c[0]))
    raise UnsupportedRank("determinant only for n <= 3")


@dataclass(frozen=True)
class WeightedGenSet:
    """Generators of Z^n with positive integer weights."""

    n: int
    gens: tuple[tuple[Vec, int], ...]  # (vector, weight)

    def __post_init__(self):
        if self.n < 1:
            raise DeadendError("n must be >= 1")
        for v, w in self.gens:
            if len(v) != self.n:
                raise DeadendError("generator %r has wrong dimension" % (v,))
            if w < 1:
                raise DeadendError("weight of %r must be >= 1" % (v,))
        vecs = [v for v, _w in self.gens]
        if len(vecs) < self.n or _lattice_index(vecs, self.n) != 1:
            raise NotGenerating("generators %r do not span Z^%d" % (vecs, self.n))

    @property
    def weights(self) -> tuple[int, ...]:
        return tuple(w for _v, w in self.gens)

    def to_json_obj(self) -> dict:
        return {"n": self.n,
                "gens": [{"v": list(v), "w": w} for v, w in self.gens]}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "WeightedGenSet":
        return cls(int(obj["n"]),
                   tuple((tuple(int(c) for c in g["v"]), int(g["w"]))
                         for g in obj["gens"]))


def _lattice_index(vecs: list[Vec], n: int) -> int:
    """gcd of all n x n minors; 1 iff the vectors generate Z^n."""
    g = 0
    for combo in itertools.combinations(vecs, n):
        g = math.gcd(g, abs(_det(combo)))
        if g == 1:
            return 1
    return g


class WeightedZnGroup(MarkedGroup):
    """Z^n marked with a weighted alphabet; elements are coordinate tuples."""

    def __init__(self, ws: WeightedGenSet, names: Optional[Sequence[str]] = None):
        self.ws = ws
        if names is None:
            names = tuple("g%d" % i for i in range(len(ws.gens)))
        self.alphabet = GenAlphabet(tuple(names))
        self._zero = (0,) * ws.n

    @property
    def identity(self) -> Vec:
        return self._zero

    def apply_letter(self, element: Vec, letter: Letter) -> Vec:
        idx, s = letter
        v, _w = self.ws.gens[idx]
        return _vec_add(element, v if s == 1 else _vec_neg(v))

    def letter_weight(self, letter: Letter) -> int:
        return self.ws.gens[letter[0]][1]

    def render(self, element: Vec) -> str:
        return "(" + ",".join(str(c) for c in element) + ")"


def standard_zn(n: int) -> WeightedZnGroup:
    """Z^n with the usual basis, all weights 1."""
    gens = tuple(((0,) * i + (1,) + (0,) * (n - i - 1), 1) for i in range(n))
    return WeightedZnGroup(WeightedGenSet(n, gens),
                           names=tuple("abcdefgh"[i] for i in range(n)))


def weighted_distance(ws: WeightedGenSet, v: Vec, budget: Optional[int] = None) -> int:
    """Weighted word length of v: uniform-cost search from the origin."""
    d = weighted_distances(ws, [tuple(v)], budget)[tuple(v)]
    if d is None:
        raise NotGenerating("target %r not reached within budget" % (v,))
    return d


def weighted_distances(ws: WeightedGenSet, targets: Iterable[Vec],
                       budget: Optional[int] = None) -> dict:
    """Weighted distances for many targets with a single search.

    Unreached targets map to None (only possible when the budget trips;
    generation is checked at construction time).
    """
    if budget is None:
        budget = default_budget()
    remaining = set()
    for t in targets:
        if len(t) != ws.n:
            raise DeadendError("target %r has wrong dimension" % (t,))
        remaining.add(tuple(t))
    out: dict = {t: None for t in remaining}
    zero = (0,) * ws.n
    heap = [(0, zero)]
    dist = {zero: 0}
    done = set()
    moves = []
    for v, w in ws.gens:
        moves.append((v, w))
        moves.append((_vec_neg(v), w))
    while heap and remaining:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if len(done) > budget:
            raise ResourceCap("weighted distance search exceeded budget %d" % budget)
        if u in remaining:
            out[u] = d
            remaining.discard(u)
            if not remaining:
                break
        for mv, w in moves:
            nu = _vec_add(u, mv)
            nd = d + w
            if nd < dist.get(nu, nd + 1):
                dist[nu] = nd
                heapq.heappush(heap, (nd, nu))
    return out


@dataclass(frozen=True)
class Facet:
    """One facet of the scaled polytope: its lattice points among the scaled
    generators, and the rational functional equal to 1 exactly there."""

    vertices: tuple[Vec, ...]
    functional: tuple[Fraction, ...]

    def pairing(self, x: Sequence[int]) -> Fraction:
        return sum(a * c for a, c in zip(self.functional, x))


@dataclass(frozen=True)
class ScaledPolytope:
    M: int
    scaled: tuple[Vec, ...]            # one scaled vector per generator, in order
    points: tuple[Vec, ...]            # scaled vectors and their negatives, deduped
    facets: tuple[Facet, ...]

    def facet_of(self, functional: tuple[Fraction, ...]) -> Facet:
        for f in self.facets:
            if f.functional == functional:
                return f
        raise NotAFacet("no facet with functional %r" % (functional,))


def _solve_functional(points: list[Vec]) -> Optional[tuple[Fraction, ...]]:
    """Rational a with a . p = 1 for each p, or None if the system is singular."""
    n = len(points)
    m = [[Fraction(points[r][c]) for c in range(n)] + [Fraction(1)] for r in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return tuple(m[r][n] for r in range(n))


def build_polytope(ws: WeightedGenSet) -> ScaledPolytope:
    """Scale generators to common weight M = lcm(weights); hull of the
    symmetrized scaled set, with exact rational facet functionals."""
    if ws.n > 3:
        raise UnsupportedRank("exact hull implemented for n <= 3")
    M = math.lcm(*ws.weights)
    scaled = tuple(_vec_scale(M // w, v) for v, w in ws.gens)
    points = []
    for p in scaled:
        for q in (p, _vec_neg(p)):
            if q not in points:
                points.append(q)
    rank_vecs = list(points)
    if len(rank_vecs) < ws.n or _rank(rank_vecs, ws.n) < ws.n:
        raise DegenerateHull("scaled generators span rank < %d" % ws.n)

    facets: dict = {}
    if ws.n == 1:
        ext = max(p[0] for p in points)
        for sgn in (1, -1):
            a = (Fraction(sgn, ext),)
            verts = tuple(sorted(p for p in points if a[0] * p[0] == 1))
            facets[a] = Facet(verts, a)
    else:
        for combo in itertools.combinations(points, ws.n):
            a = _solve_functional(list(combo))
            if a is None:
                continue
            vals = [sum(ai * ci for ai, ci in zip(a, p)) for p in points]
            if all(v <= 1 for v in vals):
                verts = tuple(sorted(p for p, v in zip(points, vals) if v == 1))
                facets.setdefault(a, Facet(verts, a))
    out = sorted(facets.values(), key=lambda f: f.functional)
    return ScaledPolytope(M, scaled, tuple(points), tuple(out))


def _rank(vecs: list[Vec], n: int) -> int:
    for r in range(n, 0, -1):
        for combo in itertools.combinations(vecs, r):
            sub = [list(v) for v in combo]
            # rank r iff some r x r minor is nonzero
            for cols in itertools.combinations(range(n), r):
                minor = [[row[c] for c in cols] for row in sub]
                if _det(minor) != 0:
                    return r
    return 0


def _letter_for_scaled(ws: WeightedGenSet, poly: ScaledPolytope, p: Vec):
    """(letter, copies): which original generator run spells scaled point p."""
    for idx, sp in enumerate(poly.scaled):
        if sp == p:
            return (idx, 1), poly.M // ws.gens[idx][1]
        if _vec_neg(sp) == p:
            return (idx, -1), poly.M // ws.gens[idx][1]
    raise NotAFacet("point %r is not a scaled generator" % (p,))


def facet_ray_word(ws: WeightedGenSet, facet: Facet, exponents: Sequence[int],
                   poly: Optional[ScaledPolytope] = None) -> Word:
    """Geodesic word along one facet: vertex i repeated exponents[i] times,
    each vertex expanded into copies of its underlying generator."""
    if poly is None:
        poly = build_polytope(ws)
    if facet not in poly.facets:
        raise NotAFacet("facet %r not from this polytope" % (facet,))
    if len(exponents) != len(facet.vertices):
        raise DeadendError("need %d exponents, got %d"
                           % (len(facet.vertices), len(exponents)))
    if any(e < 0 for e in exponents):
        raise DeadendError("exponents must be nonnegative")
    runs = []
    for p, e in zip(facet.vertices, exponents):
        letter, copies = _letter_for_scaled(ws, poly, p)
        runs.append((letter, copies * e))
    return Word.from_runs(*runs)


def _fan_triangulate(facet: Facet, n: int) -> list[tuple[Vec, ...]]:
    """Split a facet with more than n vertices into simplices: fan from the
    lexicographically least vertex, other vertices in boundary order."""
    verts = sorted(facet.vertices)
    if len(verts) <= n:
        return [tuple(verts)]
    if n == 2:
        v0 = verts[0]
        return [(v0, v) for v in verts[1:]]
    # n == 3: order the remaining vertices around v0 inside the facet plane.
    v0 = verts[0]
    rest = verts[1:]
    # project out the coordinate where the functional is largest
    drop = max(range(3), key=lambda c: abs(facet.functional[c]))
    keep = [c for c in range(3) if c != drop]

    def proj(v):
        return (v[keep[0]] - v0[keep[0]], v[keep[1]] - v0[keep[1]])

    def cross(u, w):
        return u[0] * w[1] - u[1] * w[0]

    def cmp(p, q):
        c = cross(proj(p), proj(q))
        return -1 if c > 0 else (1 if c < 0 else 0)

    ordered = sorted(rest, key=functools.cmp_to_key(cmp))
    tris = []
    for i in range(len(ordered) - 1):
        tri = (v0, ordered[i], ordered[i + 1])
        if _det([list(t) for t in tri]) != 0:
            tris.append(tri)
    return tris


def _parallelepiped_points(basis: Sequence[Vec], n: int) -> list[Vec]:
    """Integer points x = sum t_i b_i with all t_i in [0, 1], exactly."""
    if n == 1:
        b = basis[0][0]
        lo, hi = min(0, b), max(0, b)
        return [(x,) for x in range(lo, hi + 1)]
    cols = [[Fraction(basis[j][i]) for j in range(n)] for i in range(n)]
    # invert the basis matrix (columns are the generators)
    mat = [[cols[r][c] for c in range(n)] + [Fraction(int(r == c)) for c in range(n)]
           for r in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if mat[r][col] != 0), None)
        if piv is None:
            return []  # degenerate simplex contributes nothing
        mat[col], mat[piv] = mat[piv], mat[col]
        inv = 1 / mat[col][col]
        mat[col] = [x * inv for x in mat[col]]
        for r in range(n):
            if r != col and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [x - f * y for x, y in zip(mat[r], mat[col])]
    inv_rows = [row[n:] for row in mat]
    ranges = []
    for c in range(n):
        lo = sum(min(0, basis[j][c]) for j in range(n))
        hi = sum(max(0, basis[j][c]) for j in range(n))
        ranges.append(range(lo, hi + 1))
    pts = []
    for x in itertools.product(*ranges):
        ok = True
        for r in range(n):
            t = sum(inv_rows[r][c] * x[c] for c in range(n))
            if t < 0 or t > 1:
                ok = False
                break
        if ok:
            pts.append(tuple(x))
    return pts


@dataclass(frozen=True)
class DepthBoundReport:
    bound: int
    cell_distance: int        # D: max weighted distance over facet cells
    max_depth_seen: int
    elements_checked: int


def depth_bound(ws: WeightedGenSet, index: BallIndex) -> DepthBoundReport:
    """Uniform depth bound 2D + M + 1 from the facet geometry, then verify
    it against oracle depths for every element the index can certify."""
    poly = build_polytope(ws)
    cell_pts = set()
    for facet in poly.facets:
        for simplex in _fan_triangulate(facet, ws.n):
            if len(simplex) == ws.n:
                cell_pts.update(_parallelepiped_points(simplex, ws.n))
    dists = weighted_distances(ws, cell_pts)
    if any(d is None for d in dists.values()):
        raise NotGenerating("cell point unreachable")  # pragma: no cover
    D = max(dists.values()) if dists else 0
    bound = 2 * D + poly.M + 1

    group = index.group
    max_seen = 0
    checked = 0
    for e, d0 in index.items_sorted():
        cap = index.radius - d0
        if cap < 1:
            continue
        cap_used = min(cap, bound)
        report = depth(group, e, index, cap_used)
        if report.exceeds_cap:
            if cap_used == bound:
                raise BoundViolated("depth > %d at %s" % (bound, group.render(e)))
            continue  # too close to the ball boundary to certify
        checked += 1
        max_seen = max(max_seen, report.depth)
    if checked == 0:
        raise InsufficientRadius("index radius %d certifies no depths" % index.radius)
    return DepthBoundReport(bound, D, max_seen, checked)


# ---------------------------------------------------------------------------
# Finite extensions of Z^n.

Mat = tuple[tuple[int, ...], ...]


def _mat_mul(a: Mat, b: Mat) -> Mat:
    n = len(a)
    return tuple(tuple(sum(a[r][k] * b[k][c] for k in range(n)) for c in range(n))
                 for r in range(n))


def _mat_vec(a: Mat, v: Vec) -> Vec:
    return tuple(sum(a[r][k] * v[k] for k in range(len(v))) for r in range(len(a)))


def _identity_mat(n: int) -> Mat:
    return tuple(tuple(int(r == c) for c in range(n)) for r in range(n))


@dataclass(frozen=True)
class EuclideanSpec:
    """Split extension of Z^n by a finite integer point group.

    Elements are (vector, matrix); (u, P)(v, Q) = (u + P v, P Q).
    Generators may mix translation and point parts.
    """

    n: int
    point_group: tuple[Mat, ...]
    gens: tuple[tuple[Vec, Mat], ...]
    gen_names: tuple[str, ...] = ()

    def __post_init__(self):
        ident = _identity_mat(self.n)
        pg = set(self.point_group)
        if ident not in pg:
            raise NotEuclidean("point group must contain the identity")
        for p in pg:
            if abs(round(_det([list(r) for r in p]))) != 1:
                raise NotEuclidean("matrix %r does not preserve the lattice" % (p,))
            if not any(_mat_mul(p, q) == ident for q in pg):
                raise NotEuclidean("matrix %r has no inverse in the set" % (p,))
            for q in pg:
                if _mat_mul(p, q) not in pg:
                    raise NotEuclidean("point group not closed under products")
        for _v, m in self.gens:
            if m not in pg:
                raise NotEuclidean("generator matrix %r outside the point group" % (m,))
        if not self.gen_names:
            object.__setattr__(self, "gen_names",
                               tuple("g%d" % i for i in range(len(self.gens))))

    def to_json_obj(self) -> dict:
        return {
            "n": self.n,
            "point_group": [[list(r) for r in m] for m in self.point_group],
            "gens": [{"v": list(v), "mat": [list(r) for r in m]} for v, m in self.gens],
            "names": list(self.gen_names),
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "EuclideanSpec":
        return cls(
            int(obj["n"]),
            tuple(tuple(tuple(int(x) for x in r) for r in m) for m in obj["point_group"]),
            tuple((tuple(int(x) for x in g["v"]),
                   tuple(tuple(int(x) for x in r) for r in g["mat"]))
                  for g in obj["gens"]),
            tuple(obj.get("names", ())),
        )


class EuclideanGroup(MarkedGroup):
    """Marked group for a EuclideanSpec; elements are (vector, matrix)."""

    def __init__(self, spec: EuclideanSpec):
        self.spec = spec
        self.alphabet = GenAlphabet(spec.gen_names)
        self._inv = {}
        for v, m in spec.gens:
            minv = next(q for q in spec.point_group
                        if _mat_mul(m, q) == _identity_mat(spec.n))
            self._inv[(v, m)] = (_mat_vec(minv, _vec_neg(v)), minv)

    @property
    def identity(self):
        return ((0,) * self.spec.n, _identity_mat(self.spec.n))

    def apply_letter(self, element, letter):
        u, p = element
        idx, s = letter
        v, m = self.spec.gens[idx] if s == 1 else self._inv[self.spec.gens[idx]]
        return (_vec_add(u, _mat_vec(p, v)), _mat_mul(p, m))

    def _letter_mat(self, letter: Letter) -> Mat:
        idx, s = letter
        pair = self.spec.gens[idx] if s == 1 else self._inv[self.spec.gens[idx]]
        return pair[1]

    def render(self, element) -> str:
        u, p = element
        return "(%s;%s)" % (",".join(map(str, u)),
                            "I" if p == _identity_mat(self.spec.n) else str(p))


def euclidean_reduce(spec: EuclideanSpec) -> WeightedGenSet:
    """Collapse a finite extension of Z^n to a weighted generating set.

    Enumerates the words whose image is a lattice translation while every
    proper contiguous subword's image is not (equivalently: the point
    parts of the proper prefixes are pairwise distinct and nontrivial, so
    pigeonhole caps the length at the point-group order).  Each word's
    vector is closed under conjugation, which acts on translations through
    the point group; the weight of a conjugate is the originating word's
    length.  Zero vectors are dropped; v and -v merge at the smaller
    weight since either generator reaches both.
    """
    group = EuclideanGroup(spec)
    ident_mat = _identity_mat(spec.n)
    letters = group.alphabet.signed_letters()

    # cosets reachable from the generators; must be all of them, else the
    # supplied point group overstates the extension actually generated
    seen = {ident_mat}
    frontier = [ident_mat]
    while frontier:
        nxt = []
        for p in frontier:
            for lt in letters:
                q = _mat_mul(p, group._letter_mat(lt))
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    if seen != set(spec.point_group):
        raise NotGenerating("generators reach %d of %d point-group cosets"
                            % (len(seen), len(spec.point_group)))

    weights: dict = {}

    def consider(vec: Vec, weight: int):
        if all(c == 0 for c in vec):
            return
        canon = max(vec, _vec_neg(vec))
        if canon not in weights or weight < weights[canon]:
            weights[canon] = weight

    def extend(element, word_len, parts):
        for lt in letters:
            nxt = group.apply_letter(element, lt)
            part = nxt[1]
            if part == ident_mat:
                for p in spec.point_group:
                    consider(_mat_vec(p, nxt[0]), word_len + 1)
            elif part not in parts:
                extend(nxt, word_len + 1, parts | {part})

    extend(group.identity, 0, frozenset({ident_mat}))
    if not weights:
        raise NotEuclidean("no nonzero lattice translations reachable")
    gens = tuple(sorted(((v, w) for v, w in weights.items()),
                        key=lambda gw: (gw[1], gw[0])))
    try:
        return WeightedGenSet(spec.n, gens)
    except NotGenerating as exc:
        # e.g. glide squares landing in 2Z x Z: translations exist but
        # form a proper sublattice of the declared Z^n
        raise NotEuclidean("translation words generate a proper sublattice") from exc


def coset_representatives(spec: EuclideanSpec) -> dict:
    """Shortest word (as a Word) reaching each point-group coset."""
    group = EuclideanGroup(spec)
    ident = group.identity
    reps = {ident[1]: Word()}
    frontier = [(ident, Word())]
    while frontier:
        nxt = []
        for e, w in frontier:
            for lt in group.alphabet.signed_letters():
                ne = group.apply_letter(e, lt)
                if ne[1] not in reps:
                    nw = w + Word((lt,))
                    reps[ne[1]] = nw
                    nxt.append((ne, nw))
        frontier = nxt
    return reps


@dataclass(frozen=True)
class SandwichReport:
    observed_gap: int
    gap_bound: int
    elements_checked: int


def sandwich_check(spec: EuclideanSpec, radius: int) -> SandwichReport:
    """Compare true word length with the reduced weighted norm on lattice
    elements of the extension: the norm never exceeds the length, and the
    length exceeds the norm by at most twice the total coset-word length."""
    from .search import ball
    group = EuclideanGroup(spec)
    index = ball(group, radius)
    ws = euclidean_reduce(spec)
    ident_mat = _identity_mat(spec.n)
    targets = [e[0] for e, _d in index.items_sorted() if e[1] == ident_mat]
    norms = weighted_distances(ws, targets)
    reps = coset_representatives(spec)
    gap_bound = 2 * sum(len(w) for w in reps.values())
    worst = 0
    checked = 0
    for e, d in index.items_sorted():
        if e[1] != ident_mat:
            continue
        norm = norms[e[0]]
        if norm is None or norm > d:
            raise DeadendError("reduced norm %r exceeds word length %d at %r"
                               % (norm, d, e))
        gap = d - norm
        if gap > gap_bound:
            raise DeadendError("gap %d exceeds bound %d at %r" % (gap, gap_bound, e))
        worst = max(worst, gap)
        checked += 1
    return SandwichReport(worst, gap_bound, checked)
