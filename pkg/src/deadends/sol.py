"""Sol lattices Z^2 x|_R Z for a hyperbolic integer matrix R.

Elements are triples (i, j, z) standing for (u, z) with u = (i, j) in Z^2;
the group law twists the plane part by powers of R:

    (u1, z1) (u2, z2) = (u1 + R^-z1 u2, z1 + z2).

Word combinatorics is driven by the horocyclic product picture: a word in
the generators a = ((1,0); 0), b = ((0,1); 0), c = (0; 1) is a lamplighter
walk that deposits Z^2-valued lamps along the c-axis, and the element it
evaluates to is read off from the pair of Laurent polynomials collecting
the deposits degree by degree.  Everything metric here (minimal supports,
the linear-time length formula, the wreath oracle, flat candidates) goes
through that picture.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .core import (
    DeadendError,
    GenAlphabet,
    Letter,
    MarkedGroup,
    OutOfBox,
    Word,
)
from .search import BallIndex, ClaimViolation

Mat2 = tuple[tuple[int, int], tuple[int, int]]
Vec2 = tuple[int, int]
# (i, j, z): plane part (i, j) and axis coordinate z.
SolElement = tuple[int, int, int]

_EPS = 1e-9


class NotHyperbolic(DeadendError):
    """Matrix is not an Anosov integer matrix (wrong det or trace too small)."""


class CapExceeded(DeadendError):
    """Search exhausted its length or radius cap without an answer."""


class NoFeasibleK(DeadendError):
    """Flat-candidate window is empty at the requested scale."""


def _mat_mul2(a: Mat2, b: Mat2) -> Mat2:
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


def _mat_vec2(a: Mat2, v: Vec2) -> Vec2:
    return (a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1])


_ID2: Mat2 = ((1, 0), (0, 1))


class HypMatrix:
    """Integer 2x2 matrix with |det| = 1 whose eigenvalues avoid the unit circle.

    Admissible: det = 1 with |trace| >= 3, or det = -1 with |trace| >= 1.
    Caches exact integer powers, negative ones via the adjugate inverse.
    """

    def __init__(self, rows: Sequence[Sequence[int]]):
        if len(rows) != 2 or any(len(r) != 2 for r in rows):
            raise NotHyperbolic("expected a 2x2 matrix, got %r" % (rows,))
        m: Mat2 = tuple(tuple(int(x) for x in r) for r in rows)  # type: ignore[assignment]
        if any(x != y for r, rr in zip(rows, m) for x, y in zip(r, rr)):
            raise NotHyperbolic("matrix entries must be integers: %r" % (rows,))
        p, r = m[0]
        q, s = m[1]
        det = p * s - q * r
        tr = p + s
        if not ((det == 1 and abs(tr) >= 3) or (det == -1 and abs(tr) >= 1)):
            raise NotHyperbolic(
                "need det=1 with |tr|>=3 or det=-1 with |tr|>=1; got det=%d tr=%d"
                % (det, tr)
            )
        self.rows: Mat2 = m
        self.det = det
        self.trace = tr
        inv: Mat2 = ((det * s, -det * r), (-det * q, det * p))
        self._pow: dict[int, Mat2] = {0: _ID2, 1: m, -1: inv}

    def power(self, k: int) -> Mat2:
        cached = self._pow.get(k)
        if cached is not None:
            return cached
        step = 1 if k > 0 else -1
        base = self._pow[step]
        # Fill the cache walking from the nearest computed power.
        j = k - step
        while j not in self._pow:
            j -= step
        acc = self._pow[j]
        while j != k:
            acc = _mat_mul2(acc, base)
            j += step
            self._pow[j] = acc
        return acc

    def apply(self, k: int, v: Vec2) -> Vec2:
        return _mat_vec2(self.power(k), v)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, HypMatrix) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return "HypMatrix(%r)" % (list(list(r) for r in self.rows),)

    def to_json_obj(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    @classmethod
    def from_json_obj(cls, obj: Sequence[Sequence[int]]) -> "HypMatrix":
        return cls(obj)


def char_poly(R: HypMatrix) -> "LaurentPoly":
    """t^2 - (tr R) t + det R, the relation every power of R satisfies."""
    return LaurentPoly.from_terms([(2, 1), (1, -R.trace), (0, R.det)])


@dataclass(frozen=True)
class EigenGeometry:
    """Expanding/contracting eigenframe of R with distance helpers.

    tau is the eigenvalue of larger modulus (|tau| > 1); v_e and v_c are
    unit eigenvectors for tau and for det/tau.  d_c measures Euclidean
    distance to the contracting line, d_e to the expanding line; R scales
    them by |tau| and 1/|tau| respectively.
    """

    tau: float
    v_e: tuple[float, float]
    v_c: tuple[float, float]

    def d_c(self, v: Sequence[float]) -> float:
        return abs(self.v_c[0] * v[1] - self.v_c[1] * v[0])

    def d_e(self, v: Sequence[float]) -> float:
        return abs(self.v_e[0] * v[1] - self.v_e[1] * v[0])

    def split(self, v: Sequence[float]) -> tuple[float, float]:
        """Coefficients (z_e, z_c) with v = z_e v_e + z_c v_c."""
        det = self.v_e[0] * self.v_c[1] - self.v_e[1] * self.v_c[0]
        z_e = (v[0] * self.v_c[1] - v[1] * self.v_c[0]) / det
        z_c = (self.v_e[0] * v[1] - self.v_e[1] * v[0]) / det
        return (z_e, z_c)


def _unit(v: tuple[float, float]) -> tuple[float, float]:
    n = math.hypot(v[0], v[1])
    return (v[0] / n, v[1] / n)


def eigen_geometry(R: HypMatrix | Sequence[Sequence[int]]) -> EigenGeometry:
    if not isinstance(R, HypMatrix):
        R = HypMatrix(R)
    return _eigen_cached(R)


@lru_cache(maxsize=None)
def _eigen_cached(R: HypMatrix) -> EigenGeometry:
    tr, det = R.trace, R.det
    disc = math.sqrt(tr * tr - 4 * det)
    # Pick the root of larger modulus; signs agree with tr for det=1.
    tau = (tr + disc) / 2.0 if tr >= 0 else (tr - disc) / 2.0
    lam_c = det / tau

    def eigvec(lam: float) -> tuple[float, float]:
        p, r = R.rows[0]
        q, s = R.rows[1]
        if abs(r) > _EPS:
            return _unit((float(r), lam - p))
        if abs(q) > _EPS:
            return _unit((lam - s, float(q)))
        # Diagonal hyperbolic integer matrix: axes are the eigenlines.
        return (1.0, 0.0) if abs(p - lam) < abs(s - lam) else (0.0, 1.0)

    return EigenGeometry(tau=tau, v_e=eigvec(tau), v_c=eigvec(lam_c))


@dataclass(frozen=True)
class LaurentPoly:
    """Integer Laurent polynomial, stored as sorted (degree, coeff) pairs."""

    terms: tuple[tuple[int, int], ...] = ()

    @classmethod
    def from_terms(cls, items: Iterable[tuple[int, int]]) -> "LaurentPoly":
        acc: dict[int, int] = {}
        for d, c in items:
            acc[d] = acc.get(d, 0) + c
        return cls(tuple(sorted((d, c) for d, c in acc.items() if c != 0)))

    @classmethod
    def monomial(cls, deg: int, coeff: int = 1) -> "LaurentPoly":
        return cls.from_terms([(deg, coeff)])

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def top(self) -> Optional[int]:
        return self.terms[-1][0] if self.terms else None

    @property
    def bot(self) -> Optional[int]:
        return self.terms[0][0] if self.terms else None

    @property
    def norm(self) -> int:
        """Sum of absolute coefficient values (letter count it accounts for)."""
        return sum(abs(c) for _, c in self.terms)

    def coeff(self, d: int) -> int:
        for dd, c in self.terms:
            if dd == d:
                return c
        return 0

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        return LaurentPoly.from_terms(list(self.terms) + list(other.terms))

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(tuple((d, -c) for d, c in self.terms))

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        return LaurentPoly.from_terms(
            (d1 + d2, c1 * c2) for d1, c1 in self.terms for d2, c2 in other.terms
        )

    def shift(self, s: int) -> "LaurentPoly":
        return LaurentPoly(tuple((d + s, c) for d, c in self.terms))

    def scale(self, k: int) -> "LaurentPoly":
        if k == 0:
            return LaurentPoly()
        return LaurentPoly(tuple((d, k * c) for d, c in self.terms))

    def involution(self, det: int) -> "LaurentPoly":
        """The ring involution t -> det * t^-1 (det is +-1)."""
        sgn = lambda d: 1 if (det == 1 or d % 2 == 0) else -1
        return LaurentPoly.from_terms((-d, c * sgn(d)) for d, c in self.terms)

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for d, c in self.terms:
            if d == 0:
                parts.append("%d" % c)
            else:
                mono = "t" if d == 1 else "t^%d" % d
                if c == 1:
                    parts.append(mono)
                elif c == -1:
                    parts.append("-" + mono)
                else:
                    parts.append("%d%s" % (c, mono))
        return "+".join(parts).replace("+-", "-")

    def to_json_obj(self) -> list[list[int]]:
        return [list(t) for t in self.terms]

    @classmethod
    def from_json_obj(cls, obj: Iterable[Sequence[int]]) -> "LaurentPoly":
        return cls.from_terms((int(d), int(c)) for d, c in obj)


_ZERO = LaurentPoly()


@dataclass(frozen=True)
class SupportVector:
    """Pair of Laurent polynomials recording a- and b-deposits per degree."""

    p1: LaurentPoly
    p2: LaurentPoly

    @property
    def length(self) -> int:
        """Total a/b letter count the support accounts for."""
        return self.p1.norm + self.p2.norm

    @property
    def top(self) -> Optional[int]:
        tops = [t for t in (self.p1.top, self.p2.top) if t is not None]
        return max(tops) if tops else None

    @property
    def bot(self) -> Optional[int]:
        bots = [b for b in (self.p1.bot, self.p2.bot) if b is not None]
        return min(bots) if bots else None

    def degrees(self) -> tuple[int, ...]:
        return tuple(sorted({d for d, _ in self.p1.terms} | {d for d, _ in self.p2.terms}))

    def lamp(self, d: int) -> Vec2:
        return (self.p1.coeff(d), self.p2.coeff(d))

    def value(self, R: HypMatrix) -> Vec2:
        return apply_poly(self.p1, self.p2, R)

    def to_json_obj(self) -> dict:
        return {"p1": self.p1.to_json_obj(), "p2": self.p2.to_json_obj()}


def apply_poly(p1: LaurentPoly, p2: LaurentPoly, R: HypMatrix) -> Vec2:
    """Evaluate p1(R) e1 + p2(R) e2 exactly."""
    x = y = 0
    for d, c in p1.terms:
        col = R.power(d)
        x += c * col[0][0]
        y += c * col[1][0]
    for d, c in p2.terms:
        col = R.power(d)
        x += c * col[0][1]
        y += c * col[1][1]
    return (x, y)


def sol_mul(e1: SolElement, e2: SolElement, R: HypMatrix) -> SolElement:
    u = _mat_vec2(R.power(-e1[2]), (e2[0], e2[1]))
    return (e1[0] + u[0], e1[1] + u[1], e1[2] + e2[2])


def sol_inverse(e: SolElement, R: HypMatrix) -> SolElement:
    u = _mat_vec2(R.power(e[2]), (e[0], e[1]))
    return (-u[0], -u[1], -e[2])


class SolGroup(MarkedGroup):
    """Marked Sol lattice on generators a = x-step, b = y-step, c = axis step."""

    def __init__(self, R: HypMatrix | Sequence[Sequence[int]]):
        if not isinstance(R, HypMatrix):
            R = HypMatrix(R)
        self.R = R
        self.alphabet = GenAlphabet(("a", "b", "c"))

    @property
    def identity(self) -> SolElement:
        return (0, 0, 0)

    def apply_letter(self, e: SolElement, letter: Letter) -> SolElement:
        idx, s = letter
        if idx == 2:
            return (e[0], e[1], e[2] + s)
        if idx == 0:
            step: Vec2 = (s, 0)
        elif idx == 1:
            step = (0, s)
        else:
            raise DeadendError("letter %r not a Sol generator" % (letter,))
        u = _mat_vec2(self.R.power(-e[2]), step)
        return (e[0] + u[0], e[1] + u[1], e[2])

    def render(self, e: SolElement) -> str:
        return "(%d,%d;%d)" % e


# ---------------------------------------------------------------------------
# Minimal supports.


def _contracting_gap(zvec: Vec2, eg: EigenGeometry) -> float:
    """Distance from the contracting component z_c v_c to the integer lattice.

    Positive whenever zvec != 0: the component is a lattice point only if it
    is 0, which forces zvec onto the expanding line, irrational for these R.
    """
    _, z_c = eg.split(zvec)
    px, py = z_c * eg.v_c[0], z_c * eg.v_c[1]
    best = None
    for ix in range(round(px) - 2, round(px) + 3):
        for iy in range(round(py) - 2, round(py) + 3):
            d = math.hypot(px - ix, py - iy)
            if d < 1e-12:
                continue
            if best is None or d < best:
                best = d
    assert best is not None
    return best


def gaps_window(zvec: Vec2, l: int, R: HypMatrix) -> int:
    """Degree window N such that every support of zvec with length exactly l
    has at least one term strictly inside (-N, N).

    If all terms sat at degrees |d| >= N, the high-degree half would land
    within l/|tau|^N of the contracting line and the low-degree half within
    l/|tau|^N of the expanding line, putting a lattice point within 2l/|tau|^N
    of z_c v_c, below its distance D to the rest of the lattice.  For the
    zero vector D is read as 1 (distance to the nearest other lattice point).
    """
    if l <= 0:
        raise CapExceeded("no support of nonzero %r at length %d" % (zvec, l))
    eg = eigen_geometry(R)
    D = 1.0 if zvec == (0, 0) else _contracting_gap(zvec, eg)
    ratio = 2.0 * l / D
    at = abs(eg.tau)
    n = max(1, int(math.floor(math.log(max(ratio, 1.0)) / math.log(at))) + 1)
    while at ** n <= ratio:
        n += 1
    return n


def _unit_strips(zvec: Vec2, l: int, R: HypMatrix):
    """Single-unit removals allowed at this level: (degree, component, sign,
    remaining vector) for every in-window signed unit coefficient."""
    N = gaps_window(zvec, l, R)
    for k in range(-N + 1, N):
        col = R.power(k)
        for comp in (0, 1):
            step = (col[0][comp], col[1][comp])
            for s in (1, -1):
                yield k, comp, s, (zvec[0] - s * step[0], zvec[1] - s * step[1])


def _reach(zvec: Vec2, l: int, R: HypMatrix, memo: dict) -> bool:
    """Whether zvec has a support of total length at most l.

    Recursive form of the finiteness argument: a support of exact length
    l' <= l owns a term inside the (monotone in l) gaps window; stripping
    one unit of it leaves a support of length l' - 1 for the adjusted
    vector, so searching in-window unit strips is complete.
    """
    if zvec == (0, 0):
        return True
    if l <= 0:
        return False
    key = (zvec, l)
    hit = memo.get(key)
    if hit is not None:
        return hit
    found = any(_reach(rest, l - 1, R, memo) for _, _, _, rest in _unit_strips(zvec, l, R))
    memo[key] = found
    return found


def _exact_reps(zvec: Vec2, l: int, R: HypMatrix, memo: dict,
                reach_memo: dict) -> tuple[SupportVector, ...]:
    """All supports of zvec with total length exactly l.

    Builds each support out of an in-window unit plus an exact-length-(l-1)
    support of the remainder; the no-cancellation filter keeps the length
    honest, and every target support is found because the gaps lemma
    guarantees it owns an in-window term to strip.
    """
    if zvec == (0, 0) and l == 0:
        return (SupportVector(_ZERO, _ZERO),)
    if l <= 0:
        return ()
    key = (zvec, l)
    hit = memo.get(key)
    if hit is not None:
        return hit
    out: set[tuple] = set()
    for k, comp, s, rest in _unit_strips(zvec, l, R):
        if not _reach(rest, l - 1, R, reach_memo):
            continue
        for v in _exact_reps(rest, l - 1, R, memo, reach_memo):
            p = v.p1 if comp == 0 else v.p2
            if p.coeff(k) * s < 0:
                continue  # unit would cancel: total length stays below l
            q = p + LaurentPoly.monomial(k, s)
            pair = (q, v.p2) if comp == 0 else (v.p1, q)
            out.add((pair[0].terms, pair[1].terms))
    result = tuple(
        SupportVector(LaurentPoly(t1), LaurentPoly(t2))
        for t1, t2 in sorted(out)
    )
    memo[key] = result
    return result


# Per-matrix memo tables shared across calls (keyed by the matrix rows).
_REPS_MEMO: dict[Mat2, tuple[dict, dict]] = {}


def _memo_tables(R: HypMatrix) -> tuple[dict, dict]:
    tables = _REPS_MEMO.get(R.rows)
    if tables is None:
        tables = ({}, {})
        _REPS_MEMO[R.rows] = tables
    return tables


def _reps_at_length(zvec: Vec2, R: HypMatrix, l: int) -> list[SupportVector]:
    """All supports of zvec with total length exactly l."""
    reps_memo, reach_memo = _memo_tables(R)
    return list(_exact_reps(zvec, l, R, reps_memo, reach_memo))


def minimal_reps(zvec: Vec2, R: HypMatrix, l_cap: int = 24) -> list[SupportVector]:
    """All minimal-length supports of zvec, by iterative deepening on length."""
    if not isinstance(R, HypMatrix):
        R = HypMatrix(R)
    if zvec == (0, 0):
        return [SupportVector(_ZERO, _ZERO)]
    reps_memo, reach_memo = _memo_tables(R)
    for l in range(1, l_cap + 1):
        found = _exact_reps(zvec, l, R, reps_memo, reach_memo)
        if found:
            return list(found)
    raise CapExceeded(
        "no support of %r within length cap %d" % (zvec, l_cap)
    )


# ---------------------------------------------------------------------------
# Word length: closed formula and wreath-product oracle.


def ll_length(v: SupportVector, z: int) -> int:
    """Length of the shortest word depositing v and ending at axis position z.

    Two-sweep lamplighter distance: visit the occupied degrees on both sides
    of 0, ending at z, plus one letter per unit of deposit.
    """
    top = v.top
    bot = v.bot
    mx = max(0, z, top if top is not None else 0)
    mn = min(0, z, bot if bot is not None else 0)
    return 2 * (mx - mn) + min(abs(z - mx) - mx, abs(z - mn) + mn) + v.length


class WreathZ2Z(MarkedGroup):
    """Z^2 wr Z with cursor moves c and lamp increments a, b at the cursor.

    Elements are (lamps, cursor) with lamps a sorted tuple of
    (position, (va, vb)) holding nonzero lamp values.
    """

    def __init__(self) -> None:
        self.alphabet = GenAlphabet(("a", "b", "c"))

    @property
    def identity(self):
        return ((), 0)

    def apply_letter(self, e, letter: Letter):
        lamps, cur = e
        idx, s = letter
        if idx == 2:
            return (lamps, cur + s)
        d = dict(lamps)
        va, vb = d.get(cur, (0, 0))
        if idx == 0:
            va += s
        elif idx == 1:
            vb += s
        else:
            raise DeadendError("letter %r not a wreath generator" % (letter,))
        if (va, vb) == (0, 0):
            d.pop(cur, None)
        else:
            d[cur] = (va, vb)
        return (tuple(sorted(d.items())), cur)

    def render(self, e) -> str:
        lamps, cur = e
        body = ",".join("%d:(%d,%d)" % (p, v[0], v[1]) for p, v in lamps)
        return "[%s|%d]" % (body, cur)


def wreath_oracle(v: SupportVector, z: int, r_cap: int = 64) -> int:
    """Exact wreath distance to (v, z) by pruned breadth-first search.

    Prunes keep every geodesic: lamp values move monotonically toward their
    targets and the cursor stays in the hull of {0, z} and the support.
    """
    targets = {d: v.lamp(d) for d in v.degrees()}
    goal_lamps = tuple(sorted(targets.items()))
    top = v.top
    bot = v.bot
    hi = max(0, z, top if top is not None else 0)
    lo = min(0, z, bot if bot is not None else 0)
    goal = (goal_lamps, z)
    start = ((), 0)
    if start == goal:
        return 0
    seen = {start}
    frontier = deque([start])
    dist = 0
    while frontier:
        dist += 1
        if dist > r_cap:
            raise CapExceeded("wreath target beyond radius cap %d" % r_cap)
        nxt: deque = deque()
        while frontier:
            lamps, cur = frontier.popleft()
            moves = []
            if cur < hi:
                moves.append((lamps, cur + 1))
            if cur > lo:
                moves.append((lamps, cur - 1))
            tgt = targets.get(cur, (0, 0))
            have = dict(lamps).get(cur, (0, 0))
            for comp in (0, 1):
                want = tgt[comp]
                cv = have[comp]
                step = 0
                if cv < want:
                    step = 1
                elif cv > want:
                    step = -1
                if step:
                    d = dict(lamps)
                    nv = (have[0] + step, have[1]) if comp == 0 else (have[0], have[1] + step)
                    if nv == (0, 0):
                        d.pop(cur, None)
                    else:
                        d[cur] = nv
                    moves.append((tuple(sorted(d.items())), cur))
            for m in moves:
                if m in seen:
                    continue
                if m == goal:
                    return dist
                seen.add(m)
                nxt.append(m)
        frontier = nxt
    raise CapExceeded("wreath search exhausted without reaching target")


def abs_norm(g: SolElement, R: HypMatrix, l_cap: int = 24) -> int:
    """Pseudo-norm of g: shortest word whose deposits form a minimal support.

    A letter dropped at cursor position k contributes R^-k to the plane
    part, so a support term of degree d sits at cursor -d; flipping the
    axis target instead of the support gives the same traversal cost.
    Dominates the word norm |g| because geodesics may use non-minimal
    supports with a cheaper cursor sweep.
    """
    reps = minimal_reps((g[0], g[1]), R, l_cap)
    return min(ll_length(v, -g[2]) for v in reps)


# ---------------------------------------------------------------------------
# Gap between the Sol metric and the wreath metric.


@dataclass(frozen=True)
class BdiffReport:
    """Per-element comparison of the Sol word norm with the wreath norm."""

    rows: tuple[tuple[SolElement, int, int, int], ...]
    max_gap: int
    elements_checked: int
    skipped: int


def bdiff_gap(R: HypMatrix, index: BallIndex, l_cap: Optional[int] = None) -> BdiffReport:
    """Compare |g| (from the ball) with ||g|| (minimal-support norm).

    Every minimal-support traversal is an honest word for g, so the norm
    can only overshoot: gap = ||g|| - |g| >= 0, and its maximum over the
    ball is an empirical bound on the defect.  A negative gap means the
    support bookkeeping lost a shorter word and raises ClaimViolation.
    """
    if l_cap is None:
        l_cap = index.radius
    reps_cache: dict[Vec2, list[SupportVector] | None] = {}
    rows: list[tuple[SolElement, int, int, int]] = []
    skipped = 0
    max_gap = 0
    for e, d in index.items_sorted():
        u = (e[0], e[1])
        if u not in reps_cache:
            try:
                reps_cache[u] = minimal_reps(u, R, l_cap)
            except CapExceeded:
                reps_cache[u] = None
        reps = reps_cache[u]
        if reps is None:
            skipped += 1
            continue
        norm = min(ll_length(v, -e[2]) for v in reps)
        gap = norm - d
        if gap < 0:
            raise ClaimViolation(
                "norm %d undercuts word distance %d at %r" % (norm, d, e)
            )
        if gap > max_gap:
            max_gap = gap
        rows.append((e, d, norm, gap))
    return BdiffReport(
        rows=tuple(rows),
        max_gap=max_gap,
        elements_checked=len(rows),
        skipped=skipped,
    )


@dataclass(frozen=True)
class TaubdReport:
    """Fitted constants for the eigendistance growth of longer supports.

    For each sampled alternative support v' of the same vector, with
    l(v') >= l(v) for a minimal v, the top-degree spread obeys

        |tau|^(2 M(v)) < |tau|^(2 M(v')) * (D1 (l(v') - l(v)) + D2)

    with D2 > 1 and D1 > D2 ln|tau| / 4.
    """

    d1: float
    d2: float
    baseline_length: int
    samples: tuple[tuple[int, int, int], ...]  # (l(v'), M(v'), M(v))
    vacuous: bool


def _unclamped_top(v: SupportVector) -> int:
    t = v.top
    return t if t is not None else 0


def taubd_check(
    u: Vec2, R: HypMatrix, l_cap: int = 24, alt_count: int = 64
) -> TaubdReport:
    """Sample supports of u longer than minimal and fit (D1, D2) above.

    Vacuous (no constraint) when u = 0 or no longer support shows up in the
    sampled window; the returned constants still satisfy the shape bounds.
    """
    if not isinstance(R, HypMatrix):
        R = HypMatrix(R)
    eg = eigen_geometry(R)
    at = abs(eg.tau)
    floor_d2 = 1.0 + 1e-6
    if u == (0, 0):
        return TaubdReport(
            d1=floor_d2 * math.log(at) / 4.0 + 1e-6,
            d2=floor_d2,
            baseline_length=0,
            samples=(),
            vacuous=True,
        )
    base = minimal_reps(u, R, l_cap)
    l_star = base[0].length
    m_base = min(_unclamped_top(v) for v in base)
    samples: list[tuple[int, int, int]] = []
    for v in base:
        samples.append((v.length, _unclamped_top(v), m_base))
    for extra in range(1, 5):
        if len(samples) >= alt_count:
            break
        for v in _reps_at_length(u, R, l_star + extra):
            samples.append((v.length, _unclamped_top(v), m_base))
            if len(samples) >= alt_count:
                break
    # Fit: required(sample) = |tau|^(2 m_base - 2 M(v')) must be < D1 dl + D2.
    d2 = floor_d2
    for l_alt, m_alt, m_b in samples:
        if l_alt == l_star:
            need = at ** (2 * m_b - 2 * m_alt)
            d2 = max(d2, need * (1.0 + 1e-6))
    d1 = d2 * math.log(at) / 4.0 + 1e-6
    for l_alt, m_alt, m_b in samples:
        dl = l_alt - l_star
        if dl <= 0:
            continue
        need = at ** (2 * m_b - 2 * m_alt)
        if need >= d1 * dl + d2:
            d1 = max(d1, (need - d2) / dl * (1.0 + 1e-6))
    return TaubdReport(
        d1=d1,
        d2=d2,
        baseline_length=l_star,
        samples=tuple(samples),
        vacuous=not samples,
    )


# ---------------------------------------------------------------------------
# Logarithmic integer expansions along powers of R.


@dataclass(frozen=True)
class ExpansionReport:
    """Greedy expansion of an integer over the set {(R^m)_{11} : m >= 0}.

    digits holds (power, entry_value, multiplicity) with multiplicities
    bounded by floor(|tau|); the total length is logarithmic in |n|.
    """

    n: int
    digits: tuple[tuple[int, int, int], ...]
    length: int
    c1: float
    c2: float
    c3: float

    @property
    def bound(self) -> float:
        return self.c1 + max(0.0, self.c2 * math.log(self.c3 * abs(self.n))) if self.n else self.c1


def integer_expansion(n: int, R: HypMatrix) -> ExpansionReport:
    """Write n as a short signed combination of upper-left entries of R^m.

    Greedy: while n != 0, take the largest m with |p_m| <= ~|n| and subtract
    the best multiple k p_m with |k| <= floor(|tau|).  The remainder shrinks
    by a fixed factor because p_m tracks P_e tau^m up to the decaying
    contracting part, so the digit count is logarithmic.
    """
    if not isinstance(R, HypMatrix):
        R = HypMatrix(R)
    eg = eigen_geometry(R)
    at = abs(eg.tau)
    # e1 = alpha v_e + beta v_c gives p_m = P_e tau^m + P_c lam_c^m exactly.
    det = eg.v_e[0] * eg.v_c[1] - eg.v_e[1] * eg.v_c[0]
    alpha = eg.v_c[1] / det
    beta = -eg.v_e[1] / det
    p_e = alpha * eg.v_e[0]
    p_c = beta * eg.v_c[0]
    kmax = max(1, int(math.floor(at)))
    digits: dict[int, tuple[int, int]] = {}
    rem = int(n)
    guard = 0
    while rem != 0:
        guard += 1
        if guard > 4096:
            raise CapExceeded("expansion failed to terminate for n=%d" % n)
        # Largest usable power: |p_m| <= |rem| keeps the correction a strict
        # shrink; skip the occasional interior zero entry.
        m_hi = int(math.log((abs(rem) + abs(p_c)) / abs(p_e)) / math.log(at)) + 2
        m = 0
        for j in range(m_hi + 1):
            pj = R.power(j)[0][0]
            if pj != 0 and abs(pj) <= abs(rem):
                m = j
        p_m = R.power(m)[0][0]
        k = -round(rem / p_m)
        k = max(-kmax, min(kmax, k))
        if k == 0:
            k = -1 if rem * p_m > 0 else 1
        rem += k * p_m
        digits[m] = (p_m, digits.get(m, (p_m, 0))[1] - k)
    rows = tuple(
        (m, pv, mult) for m, (pv, mult) in sorted(digits.items()) if mult != 0
    )
    total = sum(abs(mult) for _, _, mult in rows)
    # Conservative constants: every digit contributes at most floor(|tau|)
    # letters and the power index is at most log_tau(2|n|/|P_e|) + 1.
    c2 = at * (1.0 + abs(p_c)) / math.log(at)
    c3 = max(1.0, 2.0 / abs(p_e))
    c1 = kmax * 2.0 + at
    report = ExpansionReport(n=int(n), digits=rows, length=total, c1=c1, c2=c2, c3=c3)
    # The expansion must be exact.
    acc = sum(pv * mult for _, pv, mult in rows)
    if acc != int(n):
        raise ClaimViolation("expansion sums to %d, wanted %d" % (acc, n))
    return report


# ---------------------------------------------------------------------------
# Distorted witnesses: short words for far-out plane vectors.


def _base_relation(R: HypMatrix) -> tuple[int, LaurentPoly]:
    """Base B and a Laurent polynomial E with E(R) = B * I.

    |tr| >= 3: B = |tr| and E = sign(tr) (t + det t^-1).
    |tr| = 1: B = 3 and E = t^2 + t^-2 (then tau^2 + tau^-2 = tr^2 - 2 det = 3).
    |tr| = 2: B = 6 and E = t^2 + t^-2 likewise.
    """
    tr, det = R.trace, R.det
    if abs(tr) >= 3:
        eps = 1 if tr > 0 else -1
        return abs(tr), LaurentPoly.from_terms([(1, eps), (-1, eps * det)])
    B = tr * tr - 2 * det
    return B, LaurentPoly.from_terms([(2, 1), (-2, 1)])


def _balanced_digits(n: int, B: int) -> list[int]:
    """Digits d_i with n = sum d_i B^i and |d_i| <= B/2 (B even keeps +B/2)."""
    half = B // 2
    out: list[int] = []
    while n != 0:
        r = n % B
        if r > half:
            r -= B
        out.append(r)
        n = (n - r) // B
    return out


def _reduce_support(p1: LaurentPoly, p2: LaurentPoly, R: HypMatrix) -> tuple[LaurentPoly, LaurentPoly]:
    """Shorten a support by adding multiples of the characteristic relation.

    First-improvement hill climb on the closed word length; deterministic
    scan order, strictly decreasing cost, so it terminates.
    """
    C = char_poly(R)

    def cost(q1: LaurentPoly, q2: LaurentPoly) -> int:
        return ll_length(SupportVector(q1, q2), 0)

    improved = True
    while improved:
        improved = False
        cur = cost(p1, p2)
        for which in (0, 1):
            p = p1 if which == 0 else p2
            if p.is_zero:
                continue
            lo = (p.bot or 0) - 2
            hi = p.top or 0
            for s in range(lo, hi + 1):
                for sgn in (1, -1):
                    q = p + C.scale(sgn).shift(s)
                    cand = cost(q, p2) if which == 0 else cost(p1, q)
                    if cand < cur:
                        if which == 0:
                            p1 = q
                        else:
                            p2 = q
                        improved = True
                        break
                if improved:
                    break
            if improved:
                break
    return p1, p2


def _flip(v: SupportVector) -> SupportVector:
    """Negate all degrees: converts between R-power degrees and cursor
    positions (a deposit at cursor k twists by R^-k)."""
    neg = lambda p: LaurentPoly(tuple(sorted((-d, c) for d, c in p.terms)))
    return SupportVector(neg(v.p1), neg(v.p2))


def _closed_traversal(v: SupportVector, alphabet: GenAlphabet) -> Word:
    """Word visiting 0 -> bot -> top -> 0, reading degrees as cursor
    positions and depositing v's lamps along the way."""
    letters: list[Letter] = []
    top = max(0, v.top if v.top is not None else 0)
    bot = min(0, v.bot if v.bot is not None else 0)

    def deposit(d: int) -> None:
        c1, c2 = v.lamp(d)
        letters.extend([(0, 1 if c1 > 0 else -1)] * abs(c1))
        letters.extend([(1, 1 if c2 > 0 else -1)] * abs(c2))

    deposit(0)
    for d in range(-1, bot - 1, -1):
        letters.append((2, -1))
        deposit(d)
    for d in range(bot + 1, top + 1):
        letters.append((2, 1))
        if d > 0:
            deposit(d)
    letters.extend([(2, -1)] * top)
    return Word(tuple(letters))


def distort_witness(zvec: Vec2, m: int, R: HypMatrix) -> Word:
    """Short closed-axis word evaluating to (zvec; 0), for |zvec| < B^m boxes.

    Writes both coordinates in balanced base-B digits, lifts B^i through the
    relation E(R) = B, reduces the resulting support, and walks it.  The
    length is at most 2^(m+1) + 4m - 1 for |tr R| >= 3 and 2^(m+1) + 8m - 1
    otherwise, exponentially shorter than the flat distance to zvec.
    """
    if not isinstance(R, HypMatrix):
        R = HypMatrix(R)
    B, E = _base_relation(R)
    box = B ** m
    if abs(zvec[0]) >= box or abs(zvec[1]) >= box:
        raise OutOfBox(
            "coordinates %r not inside the open box of size %d^%d" % (zvec, B, m)
        )
    group = SolGroup(R)
    if zvec == (0, 0):
        return Word(())
    # Check the base relation once per call: E(R) must act as B.
    if apply_poly(E, _ZERO, R) != (B, 0) or apply_poly(_ZERO, E, R) != (0, B):
        raise ClaimViolation("base relation failed for %r" % (R,))
    powers = [LaurentPoly.monomial(0)]
    for _ in range(m):
        powers.append(powers[-1] * E)
    d1 = _balanced_digits(zvec[0], B)
    d2 = _balanced_digits(zvec[1], B)
    p1 = _ZERO
    for i, d in enumerate(d1):
        p1 = p1 + powers[i].scale(d)
    p2 = _ZERO
    for i, d in enumerate(d2):
        p2 = p2 + powers[i].scale(d)
    if apply_poly(p1, p2, R) != zvec:
        raise ClaimViolation("digit lift missed %r" % (zvec,))
    p1, p2 = _reduce_support(p1, p2, R)
    if apply_poly(p1, p2, R) != zvec:
        raise ClaimViolation("support reduction changed the value at %r" % (zvec,))
    best = SupportVector(p1, p2)
    per_level = 4 if abs(R.trace) >= 3 else 8
    bound = 2 ** (m + 1) + per_level * m - 1
    if ll_length(best, 0) > bound:
        # The digit lift can overshoot for wide digit alphabets; a traversal
        # of a shortest support still witnesses the claimed length.
        for v in minimal_reps(zvec, R, l_cap=bound):
            if ll_length(v, 0) < ll_length(best, 0):
                best = v
    word = _closed_traversal(_flip(best), group.alphabet)
    got = group.evaluate(word)
    if got != (zvec[0], zvec[1], 0):
        raise ClaimViolation("witness evaluates to %r, wanted %r" % (got, zvec))
    if len(word) > bound:
        raise ClaimViolation(
            "witness length %d exceeds bound %d for %r" % (len(word), bound, zvec)
        )
    return word


# ---------------------------------------------------------------------------
# Flat candidates: elements whose short representatives are forced flat.


@dataclass(frozen=True)
class FlatParams:
    """Tunable constants for the flat-candidate window; c2 as in the
    eigendistance comparison bound."""

    c2: float = 1.0


@dataclass(frozen=True)
class FlatReport:
    """Window of x-axis integers K whose elements (K, 0; 0) defeat every
    distorted shortcut at scale (m, n).

    Membership predicate for the box: |i|, |j| < B^m with both eigendistances
    of the deposit exceeding 2 c2 |tau|^n times the per-letter maxima.
    """

    base: int
    m: int
    n: int
    l_max: int
    k_lo: int
    k_hi: int
    candidates: tuple[SolElement, ...]
    c2: float
    dc_threshold: float
    de_threshold: float

    def in_deep_box(self, u: Vec2, R: HypMatrix) -> bool:
        box = self.base ** self.m
        if abs(u[0]) >= box or abs(u[1]) >= box:
            return False
        eg = eigen_geometry(R)
        return (
            eg.d_c(u) > self.dc_threshold and eg.d_e(u) > self.de_threshold
        )


def flat_candidates(
    R: HypMatrix,
    m: int,
    n: int,
    params: Optional[FlatParams] = None,
) -> FlatReport:
    """Integers K with L < K < B^m - L for L = ceil((2 c2 |tau|^n) * r + ...),
    so that (K, 0; 0) sits deep inside the box at eigendistance > thresholds.

    Raises NoFeasibleK when the window closes (m too small for n).
    """
    if not isinstance(R, HypMatrix):
        R = HypMatrix(R)
    if params is None:
        params = FlatParams()
    eg = eigen_geometry(R)
    at = abs(eg.tau)
    B, _ = _base_relation(R)
    dcmax = max(eg.d_c((1, 0)), eg.d_c((0, 1)))
    demax = max(eg.d_e((1, 0)), eg.d_e((0, 1)))
    maxd = max(dcmax, demax)
    dc_unit = max(eg.d_c((1, 0)), 1e-12)
    de_unit = max(eg.d_e((1, 0)), 1e-12)
    mind = min(dc_unit, de_unit)
    grow = 2.0 * params.c2 * (at ** n)
    # (K, 0) has eigendistances K * d_c(e1) and K * d_e(e1); we need both
    # above grow * maxd, plus an L-margin on each side of the box.
    ratio = maxd / mind
    l_need = grow * ratio
    L = max(1, int(math.floor(l_need)) + 1)
    box = B ** m
    k_lo = L + 1
    k_hi = box - L - 1
    if k_lo > k_hi:
        raise NoFeasibleK(
            "window empty: need L=%d margins inside a box of %d" % (L, box)
        )
    dc_threshold = grow * dcmax
    de_threshold = grow * demax
    cands: list[SolElement] = []
    for K in range(k_lo, k_hi + 1):
        if K * dc_unit > dc_threshold and K * de_unit > de_threshold:
            cands.append((K, 0, 0))
    if not cands:
        raise NoFeasibleK("no K in [%d, %d] clears the thresholds" % (k_lo, k_hi))
    return FlatReport(
        base=B,
        m=m,
        n=n,
        l_max=L,
        k_lo=k_lo,
        k_hi=k_hi,
        candidates=tuple(cands),
        c2=params.c2,
        dc_threshold=dc_threshold,
        de_threshold=de_threshold,
    )
