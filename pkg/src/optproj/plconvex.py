"""Exact piecewise-linear convex functions on the real line.

A :class:`PLConvex` is either empty (identically ``+inf``) or given by
breakpoints ``x_1 < ... < x_k`` with finite values and two tail slopes.
A tail slope of ``-inf`` on the left (``+inf`` on the right) is a vertical
wall: the domain ends at the extreme breakpoint.  Every instance is kept in
canonical form, so ``==`` is exact functional equality:

* a breakpoint is kept only where the slope strictly increases,
* an affine function on the whole line is stored with the single
  breakpoint ``x = 0``.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from .extreal import INF, NEG_INF, ZERO, ExtReal, Infinity, format_ext, is_finite, parse_ext, rational, scale

__all__ = [
    "PLConvex",
    "Interval",
    "EMPTY",
    "EMPTY_INTERVAL",
    "ImproperError",
    "NotConvexError",
    "affine",
    "abs_value",
    "indicator",
    "support",
    "interval_of_support",
    "conjugate",
    "linear_combination",
    "average",
    "add",
    "restrict",
    "pasch_hausdorff",
    "recession",
    "affine_precompose",
    "max2",
    "leq",
    "equals",
    "minimum_on",
]


class ImproperError(ValueError):
    """The operation would produce a function taking the value ``-inf``."""


class NotConvexError(ValueError):
    pass


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]`` of the line; endpoints may be infinite."""

    lo: ExtReal
    hi: ExtReal

    def __post_init__(self):
        if self.lo is INF and self.hi is NEG_INF:
            return  # the empty interval
        lo = self.lo if isinstance(self.lo, Infinity) else rational(self.lo)
        hi = self.hi if isinstance(self.hi, Infinity) else rational(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if lo is INF or hi is NEG_INF or lo > hi:
            raise ValueError(f"invalid interval [{lo}, {hi}]")

    @classmethod
    def empty(cls) -> Interval:
        return cls(INF, NEG_INF)

    @classmethod
    def whole(cls) -> Interval:
        return cls(NEG_INF, INF)

    @property
    def is_empty(self) -> bool:
        return self.lo is INF

    @property
    def is_bounded(self) -> bool:
        return self.is_empty or (is_finite(self.lo) and is_finite(self.hi))

    def __contains__(self, x) -> bool:
        return not self.is_empty and self.lo <= x <= self.hi

    def issubset(self, other: Interval) -> bool:
        if self.is_empty:
            return True
        if other.is_empty:
            return False
        return other.lo <= self.lo and self.hi <= other.hi

    def intersect(self, other: Interval) -> Interval:
        if self.is_empty or other.is_empty:
            return EMPTY_INTERVAL
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo is INF or hi is NEG_INF or lo > hi:
            return EMPTY_INTERVAL
        return Interval(lo, hi)

    def smallest_point(self) -> Fraction:
        """Point of minimal absolute value (ties cannot occur on an interval)."""
        if self.is_empty:
            raise ValueError("empty interval has no points")
        if self.lo <= 0 <= self.hi:
            return ZERO
        return self.lo if self.lo > 0 else self.hi

    def __str__(self):
        if self.is_empty:
            return "empty"
        return f"[{format_ext(self.lo)}, {format_ext(self.hi)}]"


EMPTY_INTERVAL = Interval.empty()


@dataclass(frozen=True)
class PLConvex:
    """Canonical proper lsc convex piecewise-linear function (or empty).

    Build instances with :meth:`from_points` (or the helpers in this module);
    the raw constructor does not canonicalize.
    """

    xs: Tuple[Fraction, ...]
    vs: Tuple[Fraction, ...]
    left: ExtReal
    right: ExtReal

    @classmethod
    def from_points(cls, points: Iterable[Tuple[object, object]], left, right) -> PLConvex:
        pts = [(rational(x), rational(v)) for x, v in points]
        return _canonical([p[0] for p in pts], [p[1] for p in pts], _slope(left), _slope(right))

    @classmethod
    def empty(cls) -> PLConvex:
        return EMPTY

    @property
    def is_empty(self) -> bool:
        return not self.xs

    @property
    def points(self) -> List[Tuple[Fraction, Fraction]]:
        return list(zip(self.xs, self.vs))

    def slopes(self) -> List[ExtReal]:
        """``[left, s_1, ..., s_{k-1}, right]``."""
        inner = [(self.vs[i + 1] - self.vs[i]) / (self.xs[i + 1] - self.xs[i]) for i in range(len(self.xs) - 1)]
        return [self.left, *inner, self.right]

    def domain(self) -> Interval:
        if self.is_empty:
            return EMPTY_INTERVAL
        lo = self.xs[0] if self.left is NEG_INF else NEG_INF
        hi = self.xs[-1] if self.right is INF else INF
        return Interval(lo, hi)

    def __call__(self, x) -> ExtReal:
        return evaluate(self, x)

    def is_positively_homogeneous(self) -> bool:
        return not self.is_empty and self.xs == (ZERO,) and self.vs == (ZERO,)

    def __str__(self):
        if self.is_empty:
            return "empty"
        pts = ", ".join(f"({format_ext(x)}, {format_ext(v)})" for x, v in self.points)
        return f"PL[{pts}; left={format_ext(self.left)}, right={format_ext(self.right)}]"

    def to_json(self):
        if self.is_empty:
            return "empty"
        return {
            "points": [[format_ext(x), format_ext(v)] for x, v in self.points],
            "left_slope": format_ext(self.left),
            "right_slope": format_ext(self.right),
        }

    @classmethod
    def from_json(cls, data) -> PLConvex:
        if data == "empty":
            return EMPTY
        return cls.from_points(
            [(parse_ext(x), parse_ext(v)) for x, v in data["points"]],
            parse_ext(data["left_slope"]),
            parse_ext(data["right_slope"]),
        )


EMPTY = PLConvex((), (), INF, NEG_INF)


def _slope(s) -> ExtReal:
    return s if isinstance(s, Infinity) else rational(s)


def _canonical(xs: Sequence[Fraction], vs: Sequence[Fraction], left: ExtReal, right: ExtReal) -> PLConvex:
    if not xs:
        raise ValueError("at least one breakpoint is required")
    if len(xs) != len(vs):
        raise ValueError("breakpoints and values differ in length")
    if any(xs[i] >= xs[i + 1] for i in range(len(xs) - 1)):
        raise ValueError("breakpoints must be strictly increasing")
    if left is INF or right is NEG_INF:
        raise ValueError("tail slopes must be -inf/finite on the left and finite/+inf on the right")
    slopes: List[ExtReal] = [left]
    slopes += [(vs[i + 1] - vs[i]) / (xs[i + 1] - xs[i]) for i in range(len(xs) - 1)]
    slopes.append(right)
    if any(slopes[i] > slopes[i + 1] for i in range(len(slopes) - 1)):
        raise NotConvexError("slopes must be nondecreasing")
    keep = [i for i in range(len(xs)) if slopes[i] < slopes[i + 1]]
    if not keep:
        # affine on the whole line; slopes are all equal and finite
        a = left
        return PLConvex((ZERO,), (vs[0] - a * xs[0],), a, a)
    return PLConvex(tuple(xs[i] for i in keep), tuple(vs[i] for i in keep), left, right)


# ---------------------------------------------------------------------------
# constructors


def affine(slope, intercept=0) -> PLConvex:
    a = rational(slope)
    return PLConvex((ZERO,), (rational(intercept),), a, a)


def abs_value(center=0, weight=1) -> PLConvex:
    """``weight * |x - center|``."""
    w = rational(weight)
    return PLConvex.from_points([(center, 0)], -w, w)


def indicator(s: Interval) -> PLConvex:
    if s.is_empty:
        return EMPTY
    if is_finite(s.lo) and is_finite(s.hi):
        return PLConvex.from_points([(s.lo, 0), (s.hi, 0)] if s.lo != s.hi else [(s.lo, 0)], NEG_INF, INF)
    if is_finite(s.lo):
        return PLConvex.from_points([(s.lo, 0)], NEG_INF, 0)
    if is_finite(s.hi):
        return PLConvex.from_points([(s.hi, 0)], 0, INF)
    return affine(0, 0)


def support(s: Interval) -> PLConvex:
    """``y -> sup_{x in s} x*y``; the empty set maps to :data:`EMPTY`."""
    if s.is_empty:
        return EMPTY
    return PLConvex.from_points([(0, 0)], s.lo, s.hi)


def interval_of_support(f: PLConvex) -> Interval:
    """Inverse of :func:`support` on positively homogeneous functions."""
    if not f.is_positively_homogeneous():
        raise ValueError("interval_of_support needs a positively homogeneous function")
    return Interval(f.left, f.right)


# ---------------------------------------------------------------------------
# evaluation


def evaluate(f: PLConvex, x) -> ExtReal:
    if f.is_empty:
        return INF
    x = rational(x)
    xs, vs = f.xs, f.vs
    if x < xs[0]:
        return INF if f.left is NEG_INF else vs[0] + f.left * (x - xs[0])
    if x > xs[-1]:
        return INF if f.right is INF else vs[-1] + f.right * (x - xs[-1])
    i = bisect.bisect_left(xs, x)
    if xs[i] == x:
        return vs[i]
    x0, x1, v0, v1 = xs[i - 1], xs[i], vs[i - 1], vs[i]
    return v0 + (v1 - v0) * (x - x0) / (x1 - x0)


def minimum_on(f: PLConvex, box: Interval) -> ExtReal:
    """Minimum of ``f`` over a bounded interval (``+inf`` if disjoint from dom f)."""
    if box.is_empty or f.is_empty:
        return INF
    if not box.is_bounded:
        raise ValueError("minimum_on requires a bounded interval")
    cands = [box.lo, box.hi] + [x for x in f.xs if box.lo <= x <= box.hi]
    dom = f.domain().intersect(box)
    if dom.is_empty:
        return INF
    cands += [dom.lo, dom.hi]
    return min(evaluate(f, x) for x in cands)


# ---------------------------------------------------------------------------
# conjugacy


def conjugate(f: PLConvex) -> PLConvex:
    """Exact Legendre-Fenchel transform: slopes become breakpoints and vice versa."""
    if f.is_empty:
        raise ImproperError("conjugate of the empty function is identically -inf")
    xs, vs = f.xs, f.vs
    k = len(xs)
    slopes = f.slopes()
    ys: List[Fraction] = []
    ws: List[Fraction] = []
    for j, s in enumerate(slopes):
        if isinstance(s, Infinity):
            continue
        i = max(j, 1) - 1  # breakpoint adjacent to slope j
        if ys and ys[-1] == s:
            continue
        ys.append(s)
        ws.append(xs[i] * s - vs[i])
    left = xs[0] if slopes[0] is NEG_INF else NEG_INF
    right = xs[k - 1] if slopes[-1] is INF else INF
    if not ys:
        return affine(xs[0], -vs[0])
    return _canonical(ys, ws, left, right)


# ---------------------------------------------------------------------------
# combination


def linear_combination(weights: Sequence, fs: Sequence[PLConvex]) -> PLConvex:
    """``x -> sum w_i f_i(x)`` for positive weights; domain is the intersection."""
    if len(weights) != len(fs) or not fs:
        raise ValueError("need one positive weight per function")
    ws = [rational(w) for w in weights]
    if any(w <= 0 for w in ws):
        raise ValueError("weights must be positive")
    if any(f.is_empty for f in fs):
        return EMPTY
    dom = fs[0].domain()
    for f in fs[1:]:
        dom = dom.intersect(f.domain())
    if dom.is_empty:
        return EMPTY
    cands = {x for f in fs for x in f.xs if dom.lo <= x <= dom.hi}
    cands.update(e for e in (dom.lo, dom.hi) if is_finite(e))
    xs = sorted(cands)
    vs = [sum((w * evaluate(f, x) for w, f in zip(ws, fs)), Fraction(0)) for x in xs]
    left = NEG_INF if is_finite(dom.lo) else sum((w * f.left for w, f in zip(ws, fs)), Fraction(0))
    right = INF if is_finite(dom.hi) else sum((w * f.right for w, f in zip(ws, fs)), Fraction(0))
    return _canonical(xs, vs, left, right)


def average(weights: Sequence, fs: Sequence[PLConvex]) -> PLConvex:
    ws = [rational(w) for w in weights]
    if sum(ws) != 1:
        raise ValueError("average weights must sum to 1")
    return linear_combination(ws, fs)


def add(f: PLConvex, g: PLConvex) -> PLConvex:
    return linear_combination([1, 1], [f, g])


def restrict(f: PLConvex, box: Interval) -> PLConvex:
    """``f + indicator(box)``."""
    return add(f, indicator(box))


def shift(f: PLConvex, c) -> PLConvex:
    """``f + c`` for a rational constant."""
    if f.is_empty:
        return EMPTY
    c = rational(c)
    return PLConvex(f.xs, tuple(v + c for v in f.vs), f.left, f.right)


# ---------------------------------------------------------------------------
# envelopes, recession, reparametrization


def pasch_hausdorff(f: PLConvex, nu, box: Interval) -> PLConvex:
    """Inf-convolution of ``f + indicator(box)`` with ``nu * |.|``.

    The box is bounded, so the result is finite everywhere and
    ``nu``-Lipschitz: the restricted function is kept where its slopes lie in
    ``[-nu, nu]`` and continued with slopes ``-nu`` / ``nu`` outside.
    Returns :data:`EMPTY` when ``f`` is ``+inf`` on the whole box.
    """
    nu = rational(nu)
    if nu <= 0:
        raise ValueError("nu must be positive")
    if box.is_empty or not box.is_bounded:
        raise ValueError("pasch_hausdorff needs a nonempty bounded box")
    g = restrict(f, box)
    if g.is_empty:
        return EMPTY
    slopes = g.slopes()  # slopes[i] precedes xs[i], slopes[i+1] follows it
    k = len(g.xs)
    p = next(i for i in range(k) if slopes[i + 1] >= -nu)
    q = max(i for i in range(k) if slopes[i] <= nu)
    return _canonical(list(g.xs[p:q + 1]), list(g.vs[p:q + 1]), -nu, nu)


def recession(f: PLConvex) -> PLConvex:
    if f.is_empty:
        raise ImproperError("recession function of the empty function is undefined")
    return PLConvex.from_points([(0, 0)], f.left, f.right)


def affine_precompose(f: PLConvex, b_mul, b_add) -> PLConvex:
    """``x -> f(b_mul * x + b_add)`` for ``b_mul != 0``."""
    B, b = rational(b_mul), rational(b_add)
    if B == 0:
        raise ValueError("affine_precompose needs a nonzero multiplier")
    if f.is_empty:
        return EMPTY
    xs = [(x - b) / B for x in f.xs]
    vs = list(f.vs)
    left, right = scale(B, f.left), scale(B, f.right)
    if B < 0:
        xs.reverse()
        vs.reverse()
        left, right = right, left
    return _canonical(xs, vs, left, right)


# ---------------------------------------------------------------------------
# order


def _tail_crossing(x0, d0, slope_f, slope_g, direction: int) -> Optional[Fraction]:
    """Where ``f - g`` (equal to ``d0`` at ``x0``) changes sign along a tail."""
    ds = slope_f - slope_g
    if ds == 0:
        return None
    x = x0 - d0 / ds
    if (x - x0) * direction > 0:
        return x
    return None


def max2(f: PLConvex, g: PLConvex) -> PLConvex:
    """Exact pointwise maximum."""
    if f.is_empty or g.is_empty:
        return EMPTY
    dom = f.domain().intersect(g.domain())
    if dom.is_empty:
        return EMPTY
    cands = {x for h in (f, g) for x in h.xs if dom.lo <= x <= dom.hi}
    cands.update(e for e in (dom.lo, dom.hi) if is_finite(e))
    xs = sorted(cands)
    extra = set()
    for a, b in zip(xs, xs[1:]):
        da = evaluate(f, a) - evaluate(g, a)
        db = evaluate(f, b) - evaluate(g, b)
        if da * db < 0:
            extra.add(a + (b - a) * da / (da - db))
    if dom.lo is NEG_INF:
        x0 = xs[0]
        c = _tail_crossing(x0, evaluate(f, x0) - evaluate(g, x0), f.left, g.left, -1)
        if c is not None:
            extra.add(c)
    if dom.hi is INF:
        x0 = xs[-1]
        c = _tail_crossing(x0, evaluate(f, x0) - evaluate(g, x0), f.right, g.right, 1)
        if c is not None:
            extra.add(c)
    xs = sorted(cands | extra)
    vs = [max(evaluate(f, x), evaluate(g, x)) for x in xs]
    left = NEG_INF if is_finite(dom.lo) else min(f.left, g.left)
    right = INF if is_finite(dom.hi) else max(f.right, g.right)
    return _canonical(xs, vs, left, right)


def leq(f: PLConvex, g: PLConvex) -> bool:
    """Exact pointwise ``f <= g``."""
    if g.is_empty:
        return True
    if f.is_empty:
        return False
    dg = g.domain()
    if not dg.issubset(f.domain()):
        return False
    cands = {x for h in (f, g) for x in h.xs if dg.lo <= x <= dg.hi}
    cands.update(e for e in (dg.lo, dg.hi) if is_finite(e))
    if any(evaluate(f, x) > evaluate(g, x) for x in cands):
        return False
    if dg.lo is NEG_INF and g.left > f.left:
        return False
    if dg.hi is INF and g.right < f.right:
        return False
    return True


def equals(f: PLConvex, g: PLConvex) -> bool:
    return f == g
