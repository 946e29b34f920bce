"""Brute-force references built from definitions only.

Nothing here calls the conjugacy, envelope or projection routines it is
meant to check.  Values come from sups over finite grids, enumeration of
selections and plain weighted sums.  Where a grid could miss a supremum
the routines either include every breakpoint (making them exact for
piecewise linear data) or flag unbounded growth on far points.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .extreal import INF, NEG_INF, ExtReal, Infinity
from .filtration import (
    DEFAULT_CAP,
    Atom,
    FilteredSpace,
    InstanceTooLarge,
    check_mode,
    stopping_time_probes,
    verify_projection_property,
)
from .integrand import ConvexIntegrand, GridIntegrand
from .plconvex import Interval, PLConvex

__all__ = [
    "ORACLE_DIRECTIONS",
    "brute_value",
    "brute_conjugate",
    "brute_set_projection",
    "brute_epi_projection",
    "brute_epi_support",
    "brute_projection_defn",
]


def _directions(n: int = 32, seed: int = 20240607) -> Tuple[Fraction, ...]:
    fixed = [Fraction(v) for v in ("0", "1", "-1", "2", "-2", "1/2", "-1/2", "3", "-3", "1/3", "-1/3", "5/2")]
    rng = random.Random(seed)
    seen = set(fixed)
    while len(fixed) < n:
        y = Fraction(rng.randint(-40, 40), rng.randint(1, 8))
        if y not in seen:
            seen.add(y)
            fixed.append(y)
    return tuple(fixed)


ORACLE_DIRECTIONS = _directions()


def brute_value(f: PLConvex, x) -> ExtReal:
    """``f(x)`` read off the stored breakpoints and tail slopes."""
    x = Fraction(x)
    if f.is_empty:
        return INF
    xs, vs = f.xs, f.vs
    if x < xs[0]:
        return INF if f.left is NEG_INF else vs[0] + f.left * (x - xs[0])
    if x > xs[-1]:
        return INF if f.right is INF else vs[-1] + f.right * (x - xs[-1])
    for (x0, v0), (x1, v1) in zip(zip(xs, vs), zip(xs[1:], vs[1:])):
        if x0 <= x <= x1:
            return v0 + (v1 - v0) * (x - x0) / (x1 - x0)
    return vs[0]


def _gain(f: PLConvex, x: Fraction, y: Fraction) -> ExtReal:
    v = brute_value(f, x)
    return NEG_INF if v is INF else x * y - v


def brute_conjugate(f: PLConvex, grid: Iterable, directions: Iterable = ORACLE_DIRECTIONS,
                    growth: bool = True) -> Dict[Fraction, ExtReal]:
    """``sup_x x*y - f(x)`` over the grid for every direction ``y``.

    With ``growth`` the gain is also probed on points far outside the grid;
    strictly increasing gains there mean the supremum is ``+inf``.
    """
    grid = sorted({Fraction(x) for x in grid} | set(f.xs))
    out = {}
    if f.is_empty:
        return {Fraction(y): NEG_INF for y in directions}
    span = 1 + max(abs(x) for x in grid)
    for y in directions:
        y = Fraction(y)
        best: ExtReal = NEG_INF
        for x in grid:
            g = _gain(f, x, y)
            if g is not NEG_INF and (best is NEG_INF or g > best):
                best = g
        if growth:
            for sign in (1, -1):
                far = [_gain(f, sign * k * span, y) for k in (1, 2, 4)]
                if all(v is not NEG_INF for v in far) and far[0] < far[1] < far[2]:
                    best = INF
        out[y] = best
    return out


# ---------------------------------------------------------------------------
# interval processes


def _candidates(s: Interval, grid: Sequence[Fraction], far: Fraction) -> List[Fraction]:
    pts = {x for x in grid if x in s}
    for e in (s.lo, s.hi):
        if not isinstance(e, Infinity):
            pts.add(e)
    if s.lo is NEG_INF:
        pts.add(-far if s.hi is INF or s.hi > -far else s.hi - far)
    if s.hi is INF:
        pts.add(far if s.lo is NEG_INF or s.lo < far else s.lo + far)
    return sorted(pts)


def _hull_on_cell(space: FilteredSpace, cell, fibers: Mapping[Atom, Interval], grid, far, cap) -> Tuple:
    pos = [a for a in cell if space.p[a] > 0]
    mass = sum(space.p[a] for a in pos)
    choices = [_candidates(fibers[a], grid, far) for a in pos]
    count = 1
    for c in choices:
        count *= len(c)
    if count > cap:
        raise InstanceTooLarge(f"{count} selections exceed the cap {cap}")
    lo = hi = None
    for sel in itertools.product(*choices):
        m = sum(space.p[a] * x for a, x in zip(pos, sel)) / mass
        lo = m if lo is None or m < lo else lo
        hi = m if hi is None or m > hi else hi
    return lo, hi


def brute_set_projection(space: FilteredSpace, gamma: Mapping, mode: str = "optional",
                         selection_grid: Iterable = (), cap: int = DEFAULT_CAP) -> Dict:
    """Hull of cell averages over all selections through grid points and endpoints.

    Unbounded fibers contribute far points; a side of the hull that moves
    when the far points move is reported as infinite.  Null cells get ``[0, 0]``.
    """
    check_mode(mode)
    grid = sorted(Fraction(x) for x in selection_grid)
    finite = [abs(e) for s in gamma.values() if not s.is_empty for e in (s.lo, s.hi) if not isinstance(e, Infinity)]
    far = 1 + max(finite + [abs(x) for x in grid] + [Fraction(0)])
    out = {}
    for t in sorted({t for t, _ in gamma}):
        part = space.partition_for(mode, t)
        fibers = {a: gamma[t, a] for a in space.atoms}
        for cell in part:
            if all(space.p[a] == 0 for a in cell):
                res = Interval(0, 0)
            elif any(fibers[a].is_empty for a in cell if space.p[a] > 0):
                res = Interval.empty()
            else:
                lo1, hi1 = _hull_on_cell(space, cell, fibers, grid, far, cap)
                lo2, hi2 = _hull_on_cell(space, cell, fibers, grid, 2 * far, cap)
                res = Interval(NEG_INF if lo2 < lo1 else lo1, INF if hi2 > hi1 else hi1)
            for a in cell:
                out[t, a] = res
    return out


# ---------------------------------------------------------------------------
# epigraph averages


def brute_epi_projection(space: FilteredSpace, h: ConvexIntegrand, mode: str = "optional",
                         directions: Iterable = ORACLE_DIRECTIONS) -> Dict[Tuple[int, Atom], Dict]:
    """Support function of the weighted Minkowski average of epigraphs per cell.

    Keys of each inner dict are plane directions: ``(y, -1)`` for every
    ``y`` in ``directions`` plus the horizontal ``(1, 0)`` and ``(-1, 0)``.
    Only cells of positive mass are reported.
    """
    check_mode(mode)
    directions = [Fraction(y) for y in directions]
    out = {}
    for t in sorted({t for t, _ in h.fibers}):
        for cell in space.partition_for(mode, t):
            pos = [a for a in cell if space.p[a] > 0]
            if not pos:
                continue
            mass = sum(space.p[a] for a in pos)
            table = {}
            for a in pos:
                f = h[t, a]
                sup = dict(((y, -1), v) for y, v in brute_conjugate(f, f.xs, directions).items())
                sup[(1, 0)] = f.domain().hi if not f.is_empty else NEG_INF
                sup[(-1, 0)] = -f.domain().lo if not f.is_empty else NEG_INF
                for d, v in sup.items():
                    table.setdefault(d, []).append((space.p[a] / mass, v))
            summed = {d: _weighted(terms) for d, terms in table.items()}
            for a in cell:
                out[t, a] = summed
    return out


def _weighted(terms) -> ExtReal:
    vals = [v for _, v in terms]
    if NEG_INF in vals:
        return NEG_INF
    if INF in vals:
        return INF
    return sum(w * v for w, v in terms)


def brute_epi_support(f: PLConvex, directions: Iterable = ORACLE_DIRECTIONS) -> Dict:
    """Support function of ``epi f`` in the directions used by :func:`brute_epi_projection`."""
    directions = [Fraction(y) for y in directions]
    sup = {(y, -1): v for y, v in brute_conjugate(f, f.xs, directions).items()}
    sup[(1, 0)] = f.domain().hi if not f.is_empty else NEG_INF
    sup[(-1, 0)] = -f.domain().lo if not f.is_empty else NEG_INF
    return sup


# ---------------------------------------------------------------------------
# defining property


def _as_grid(h, grid: Optional[Sequence]) -> GridIntegrand:
    if isinstance(h, GridIntegrand):
        return h
    if grid is None:
        raise ValueError("a grid is required for convex integrands")
    grid = tuple(sorted({Fraction(x) for x in grid}))
    return GridIntegrand(grid, {k: tuple(brute_value(f, x) for x in grid) for k, f in h.fibers.items()})


def _adapted_processes(space: FilteredSpace, mode: str, n: int, times: Sequence[int], cap: int):
    slots = [(t, cell) for t in times for cell in space.partition_for(mode, t)]
    total = n ** len(slots)
    if total > cap:
        raise InstanceTooLarge(f"{total} grid-valued processes exceed the cap {cap}")
    for choice in itertools.product(range(n), repeat=len(slots)):
        w = {}
        for (t, cell), j in zip(slots, choice):
            for a in cell:
                w[t, a] = j
        yield w


def brute_projection_defn(space: FilteredSpace, h, candidate, mode: str = "optional",
                          cap: int = DEFAULT_CAP, grid: Optional[Sequence] = None) -> bool:
    """Check the defining identity of the projection for every grid-valued adapted process.

    For each such ``w`` whose composition ``h(w)`` does not take both
    infinite values on positive atoms, ``candidate(w)`` must satisfy the
    stopping-time identity against ``h(w)``.
    """
    check_mode(mode)
    hg = _as_grid(h, grid)
    cg = _as_grid(candidate, grid if grid is not None else hg.xgrid)
    if cg.xgrid != hg.xgrid:
        raise ValueError("integrand and candidate live on different grids")
    times = sorted({t for t, _ in hg.values})
    probes = stopping_time_probes(space, mode, cap)
    for idx in _adapted_processes(space, mode, len(hg.xgrid), times, cap):
        hw = {k: hg[k][j] for k, j in idx.items()}
        vals = [hw[k] for k in hw if space.p[k[1]] > 0]
        if INF in vals and NEG_INF in vals:
            continue
        cw = {k: cg[k][j] for k, j in idx.items()}
        if not verify_projection_property(space, hw, cw, mode, cap, probes):
            return False
    return True
