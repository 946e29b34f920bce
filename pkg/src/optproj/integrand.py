"""Integrands ``h_t(x, omega)`` on a finite filtered space and their projections.

Two representations are supported:

* :class:`GridIntegrand` stores extended-real values on a finite x-grid and
  may be nonconvex or take ``+-inf``;
* :class:`ConvexIntegrand` stores one :class:`~optproj.plconvex.PLConvex`
  fiber per ``(t, atom)``.

Projections are computed cell by cell.  For convex fibers this is the
probability-weighted average of the fibers over the positive-probability
atoms of a cell; null cells receive the zero function, matching the zero
returned by :func:`~optproj.filtration.cond_exp`.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from . import plconvex as plc
from .extreal import INF, NEG_INF, ZERO, ExtReal, Infinity, is_finite, neg, rational
from .filtration import (
    Atom,
    FilteredSpace,
    Partition,
    Process,
    StructureError,
    check_mode,
    cond_exp,
    is_adapted,
)
from .plconvex import EMPTY, Interval, PLConvex

ZERO_FN = plc.affine(0, 0)
DEFAULT_LADDER = tuple(Interval(-(2 ** j), 2 ** j) for j in range(4))


class PreconditionError(ValueError):
    """A hypothesis required by an operation does not hold."""


@dataclass(frozen=True)
class GridIntegrand:
    """Values ``h_t(x, omega)`` for ``x`` on a strictly increasing grid."""

    xgrid: Tuple[Fraction, ...]
    values: Dict[Tuple[int, Atom], Tuple[ExtReal, ...]]

    def __post_init__(self):
        grid = tuple(rational(x) for x in self.xgrid)
        if not grid or any(a >= b for a, b in zip(grid, grid[1:])):
            raise StructureError("grid must be nonempty and strictly increasing")
        object.__setattr__(self, "xgrid", grid)
        for key, row in self.values.items():
            if len(row) != len(grid):
                raise StructureError(f"row {key} has {len(row)} values for {len(grid)} grid points")

    def index(self, x) -> Optional[int]:
        i = bisect.bisect_left(self.xgrid, x)
        if i < len(self.xgrid) and self.xgrid[i] == x:
            return i
        return None

    def __getitem__(self, key):
        return self.values[key]

    def column(self, t: int, j: int, atoms) -> Dict[Atom, ExtReal]:
        return {a: self.values[t, a][j] for a in atoms}

    def negated(self) -> GridIntegrand:
        return GridIntegrand(self.xgrid, {k: tuple(neg(v) for v in row) for k, row in self.values.items()})


@dataclass(frozen=True)
class ConvexIntegrand:
    """One PLConvex fiber per ``(t, atom)``; empty fibers are allowed but flagged."""

    fibers: Dict[Tuple[int, Atom], PLConvex]

    def __getitem__(self, key) -> PLConvex:
        return self.fibers[key]

    @property
    def empty_fibers(self) -> List[Tuple[int, Atom]]:
        return sorted((k for k, f in self.fibers.items() if f.is_empty), key=repr)

    def map(self, fn: Callable[[PLConvex], PLConvex]) -> ConvexIntegrand:
        return ConvexIntegrand({k: fn(f) for k, f in self.fibers.items()})

    def equal_off_null(self, space: FilteredSpace, other: ConvexIntegrand) -> bool:
        return all(self[t, a] == other[t, a] for t in space.times for a in space.positive_atoms)


@dataclass
class ClassWitness:
    """Bounded boxes with finite minorant processes, or the violations found."""

    boxes: List[Interval] = field(default_factory=list)
    minorants: List[Process] = field(default_factory=list)
    violations: List[Tuple[int, Atom]] = field(default_factory=list)

    def __bool__(self):
        return not self.violations


# ---------------------------------------------------------------------------
# grid integrands


def _project_grid(space: FilteredSpace, h: GridIntegrand, partition_at: Callable[[int], Partition]) -> GridIntegrand:
    out = {}
    times = sorted({t for t, _ in h.values})
    for t in times:
        part = partition_at(t)
        cols = [cond_exp(space, part, h.column(t, j, space.atoms)) for j in range(len(h.xgrid))]
        for a in space.atoms:
            out[t, a] = tuple(col[a] for col in cols)
    return GridIntegrand(h.xgrid, out)


def optional_projection_grid(space: FilteredSpace, h: GridIntegrand) -> GridIntegrand:
    """Pointwise optional projection on the grid (``^o[h+] - ^o[h-]`` per point)."""
    return _project_grid(space, h, space.partition)


def predictable_projection_grid(space: FilteredSpace, h: GridIntegrand) -> GridIntegrand:
    return _project_grid(space, h, space.predictable_partition)


# ---------------------------------------------------------------------------
# convex integrands


def _average_cell(space: FilteredSpace, fibers: Sequence[Tuple[Atom, PLConvex]]) -> PLConvex:
    pos = [(a, f) for a, f in fibers if space.p[a] > 0]
    if not pos:
        return ZERO_FN
    mass = space.mass(a for a, _ in pos)
    return plc.linear_combination([space.p[a] / mass for a, _ in pos], [f for _, f in pos])


def _project_convex(space: FilteredSpace, h: ConvexIntegrand,
                    partition_at: Callable[[int], Partition]) -> ConvexIntegrand:
    out = {}
    times = sorted({t for t, _ in h.fibers})
    for t in times:
        for cell in partition_at(t):
            g = _average_cell(space, [(a, h[t, a]) for a in cell])
            for a in cell:
                out[t, a] = g
    return ConvexIntegrand(out)


def project_convex(space: FilteredSpace, h: ConvexIntegrand, mode: str = "optional",
                   method: str = "direct", ladder: Sequence[Interval] = DEFAULT_LADDER) -> ConvexIntegrand:
    """Optional or predictable projection of a convex integrand.

    ``method="direct"`` averages fibers per cell.  ``method="ladder"`` runs the
    box / Lipschitz-envelope construction and returns the projection
    restricted to the largest box of ``ladder``.
    """
    check_mode(mode)
    witness = check_class_D(space, h, ladder) if mode == "optional" else check_class_P(space, h, ladder)
    if not witness:
        raise PreconditionError(f"class {'D' if mode == 'optional' else 'P'} fails at {witness.violations}")
    partition_at = lambda t: space.partition_for(mode, t)  # noqa: E731
    if method == "direct":
        return _project_convex(space, h, partition_at)
    if method == "ladder":
        return ladder_projection(space, h, mode, ladder)[-1]
    raise ValueError(f"unknown method {method!r}")


def optional_projection_convex(space: FilteredSpace, h: ConvexIntegrand, method: str = "direct") -> ConvexIntegrand:
    return project_convex(space, h, "optional", method)


def predictable_projection_convex(space: FilteredSpace, h: ConvexIntegrand, method: str = "direct") -> ConvexIntegrand:
    return project_convex(space, h, "predictable", method)


def _lipschitz_bound(fs: Sequence[PLConvex]) -> Fraction:
    """Largest finite slope magnitude among the fibers (at least 1)."""
    best = Fraction(1)
    for f in fs:
        if f.is_empty:
            continue
        for s in f.slopes():
            if is_finite(s):
                best = max(best, abs(s))
    return best


def _ladder_limit(lo_fn: PLConvex, hi_fn: PLConvex) -> PLConvex:
    """Pointwise limit of an envelope family that is affine in ``nu`` beyond its threshold.

    ``lo_fn``/``hi_fn`` are the family at two Lipschitz levels past the
    threshold; the limit equals them where they agree and is ``+inf`` elsewhere.
    """
    if lo_fn.is_empty or hi_fn.is_empty:
        return EMPTY
    cands = sorted(set(lo_fn.xs) | set(hi_fn.xs))
    agree = [x for x in cands if plc.evaluate(lo_fn, x) == plc.evaluate(hi_fn, x)]
    if not agree:
        return EMPTY
    return plc.restrict(lo_fn, Interval(agree[0], agree[-1]))


def ladder_projection(space: FilteredSpace, h: ConvexIntegrand, mode: str = "optional",
                      ladder: Sequence[Interval] = DEFAULT_LADDER) -> List[ConvexIntegrand]:
    """Projections through boxes and Lipschitz envelopes, one result per box.

    For every box ``B`` the fibers of ``h + indicator(B)`` are replaced by
    their ``nu``-Lipschitz envelopes and projected; the limit in ``nu`` of
    that increasing family is taken exactly.  Entry ``i`` of the result is
    that limit for ``ladder[i]``; the running infimum over boxes is the last
    entry because the boxes increase.
    """
    check_mode(mode)
    times = sorted({t for t, _ in h.fibers})
    results = []
    for box in ladder:
        restricted = [plc.restrict(f, box) for f in h.fibers.values()]
        nu1 = _lipschitz_bound(restricted) + 1
        levels = (nu1, 2 * nu1, 3 * nu1)
        projected = []
        for nu in levels:
            env = h.map(lambda f: plc.pasch_hausdorff(f, nu, box))
            projected.append(_project_convex(space, env, lambda t: space.partition_for(mode, t)))
        out = {}
        for t in times:
            for a in space.atoms:
                if space.p[a] == 0:
                    out[t, a] = plc.restrict(ZERO_FN, box)
                    continue
                f1, f2, f3 = (p[t, a] for p in projected)
                lim = _ladder_limit(f1, f2)
                # beyond the threshold the family is affine in nu
                if not f3.is_empty and not f1.is_empty:
                    for x in set(f1.xs) | set(f2.xs) | set(f3.xs):
                        v1, v2, v3 = (plc.evaluate(g, x) for g in (f1, f2, f3))
                        assert v3 - v2 == v2 - v1, "envelope family is not affine in nu"
                out[t, a] = lim
        results.append(ConvexIntegrand(out))
    # k = inf over boxes; the boxes increase, so each entry already is the running infimum
    running = []
    for i, r in enumerate(results):
        if i == 0:
            running.append(r)
            continue
        prev = running[-1]
        running.append(ConvexIntegrand({k: _pointwise_min_nested(prev[k], f) for k, f in r.fibers.items()}))
    return running


def _pointwise_min_nested(f: PLConvex, g: PLConvex) -> PLConvex:
    """``min(f, g)`` when ``g`` extends ``f`` (``g <= f`` and they agree on dom f)."""
    if not plc.leq(g, f):
        raise AssertionError("box ladder is not nonincreasing")
    return g


# ---------------------------------------------------------------------------
# class D / class P


def _class_check(space: FilteredSpace, h, ladder: Sequence[Interval]) -> ClassWitness:
    if isinstance(h, GridIntegrand):
        box = Interval(h.xgrid[0], h.xgrid[-1])
        minorant = {}
        violations = []
        for (t, a), row in h.values.items():
            m = min(row)
            if space.p[a] == 0:
                minorant[t, a] = ZERO
                continue
            if m is NEG_INF:
                violations.append((t, a))
                continue
            minorant[t, a] = m if is_finite(m) else ZERO
        if violations:
            return ClassWitness(violations=sorted(violations, key=repr))
        return ClassWitness([box], [minorant])
    witness = ClassWitness()
    for box in ladder:
        minorant = {}
        for key, f in h.fibers.items():
            m = plc.minimum_on(f, box)
            minorant[key] = m if is_finite(m) else ZERO
        witness.boxes.append(box)
        witness.minorants.append(minorant)
    return witness


def check_class_D(space: FilteredSpace, h, ladder: Sequence[Interval] = DEFAULT_LADDER) -> ClassWitness:
    """Witness of class D: finite minorants on a covering family of boxes."""
    return _class_check(space, h, ladder)


def check_class_P(space: FilteredSpace, h, ladder: Sequence[Interval] = DEFAULT_LADDER) -> ClassWitness:
    """Class P; on a finite space it coincides with class D."""
    return _class_check(space, h, ladder)


# ---------------------------------------------------------------------------
# evaluation along processes


def evaluate_along(space: FilteredSpace, h, w: Mapping) -> Process:
    """The process ``(t, omega) -> h_t(w_t(omega), omega)``."""
    out = {}
    if isinstance(h, GridIntegrand):
        for (t, a), row in h.values.items():
            x = w[t, a]
            j = h.index(x) if is_finite(x) else None
            if j is None:
                if space.p[a] > 0:
                    raise StructureError(f"w at {(t, a)} = {x} is not a grid point")
                out[t, a] = ZERO
            else:
                out[t, a] = row[j]
        return out
    for (t, a), f in h.fibers.items():
        x = w[t, a]
        if not is_finite(x):
            if space.p[a] > 0:
                raise StructureError(f"w at {(t, a)} is infinite")
            out[t, a] = ZERO
        else:
            out[t, a] = plc.evaluate(f, x)
    return out


def is_projectable(space: FilteredSpace, h, w: Mapping, mode: str = "optional") -> bool:
    """Whether ``h(w)+`` or ``h(w)-`` is integrable over all stopping times."""
    if not is_adapted(space, w, mode):
        raise PreconditionError(f"w is not {mode}ly adapted")
    hw = evaluate_along(space, h, w)
    vals = [hw[t, a] for t in space.times for a in space.positive_atoms if (t, a) in hw]
    return not (INF in vals and NEG_INF in vals)


# ---------------------------------------------------------------------------
# monotone limits, Lipschitz constants


def _grid_leq(g1: GridIntegrand, g2: GridIntegrand, space: FilteredSpace) -> bool:
    return all(
        all(u <= v for u, v in zip(g1[t, a], g2[t, a]))
        for (t, a) in g1.values if space.p[a] > 0
    )


def _grid_max(g1: GridIntegrand, g2: GridIntegrand) -> GridIntegrand:
    return GridIntegrand(g1.xgrid, {k: tuple(max(u, v) for u, v in zip(r, g2[k])) for k, r in g1.values.items()})


def monotone_sup_projection(space: FilteredSpace, hs: Sequence, mode: str = "optional"):
    """``(sup_n proj(h_n), proj(sup_n h_n))`` for a nondecreasing chain."""
    check_mode(mode)
    if not hs:
        raise ValueError("empty chain")
    grid = isinstance(hs[0], GridIntegrand)
    for h1, h2 in zip(hs, hs[1:]):
        ok = _grid_leq(h1, h2, space) if grid else all(
            plc.leq(h1[k], h2[k]) for k in h1.fibers if space.p[k[1]] > 0)
        if not ok:
            raise PreconditionError("chain is not nondecreasing")
    if grid:
        if not check_class_D(space, hs[0]):
            raise PreconditionError("first element takes -inf on a positive-probability atom")
        proj = lambda g: _project_grid(space, g, lambda t: space.partition_for(mode, t))  # noqa: E731
        projs = [proj(g) for g in hs]
        sup_proj = projs[0]
        for p in projs[1:]:
            sup_proj = _grid_max(sup_proj, p)
        sup_h = hs[0]
        for g in hs[1:]:
            sup_h = _grid_max(sup_h, g)
        return sup_proj, proj(sup_h)
    projs = [project_convex(space, g, mode) for g in hs]
    sup_proj = ConvexIntegrand({k: _fold_max([p[k] for p in projs]) for k in projs[0].fibers})
    sup_h = ConvexIntegrand({k: _fold_max([g[k] for g in hs]) for k in hs[0].fibers})
    return sup_proj, project_convex(space, sup_h, mode)


def _fold_max(fs: Sequence[PLConvex]) -> PLConvex:
    out = fs[0]
    for f in fs[1:]:
        out = plc.max2(out, f)
    return out


def lipschitz_constant(space: FilteredSpace, h: ConvexIntegrand) -> ExtReal:
    """Largest slope magnitude over non-null, nonempty fibers; ``+inf`` for walls."""
    best: ExtReal = ZERO
    for (t, a), f in h.fibers.items():
        if space.p[a] == 0 or f.is_empty:
            continue
        for s in (f.left, f.right, *f.slopes()[1:-1]):
            if isinstance(s, Infinity):
                return INF
            best = max(best, abs(s))
    return best


# ---------------------------------------------------------------------------
# conditional expectation (constant filtration) and affine reparametrization


def conditional_expectation_integrand(space: FilteredSpace, f, partition: Partition):
    """Single-time specialization: project with the same partition at every time."""
    partition = space.check_partition(partition)
    if isinstance(f, GridIntegrand):
        return _project_grid(space, f, lambda t: partition)
    witness = check_class_D(space, f)
    if not witness:
        raise PreconditionError(f"class D fails at {witness.violations}")
    return _project_convex(space, f, lambda t: partition)


def affine_reparam_projection(space: FilteredSpace, h: ConvexIntegrand, B: Mapping, b: Mapping,
                              mode: str = "optional") -> Tuple[ConvexIntegrand, ConvexIntegrand]:
    """Both sides of ``proj(h(Bx + b)) = proj(h)(Bx + b)`` for adapted ``B``, ``b``."""
    check_mode(mode)
    if not (is_adapted(space, B, mode) and is_adapted(space, b, mode)):
        raise PreconditionError(f"B and b must be {mode}ly adapted")
    for (t, a), v in B.items():
        if space.p[a] > 0 and (not is_finite(v) or v == 0):
            raise PreconditionError(f"B must be finite and nonzero; got {v} at {(t, a)}")

    def reparam(g: ConvexIntegrand) -> ConvexIntegrand:
        out = {}
        for (t, a), f in g.fibers.items():
            if space.p[a] == 0:
                out[t, a] = f
            else:
                out[t, a] = plc.affine_precompose(f, B[t, a], b[t, a])
        return out

    hbar = ConvexIntegrand(reparam(h))
    lhs = project_convex(space, hbar, mode)
    rhs = ConvexIntegrand(reparam(project_convex(space, h, mode)))
    return lhs, rhs


def sample_on_grid(h: ConvexIntegrand, grid: Sequence) -> GridIntegrand:
    grid = tuple(rational(x) for x in grid)
    return GridIntegrand(grid, {k: tuple(plc.evaluate(f, x) for x in grid) for k, f in h.fibers.items()})
