"""Random instance generators shared by the test modules."""

from __future__ import annotations

import random
from fractions import Fraction as F
from typing import List

from optproj import plconvex as plc
from optproj.extreal import INF, NEG_INF
from optproj.filtration import FilteredSpace
from optproj.integrand import ConvexIntegrand
from optproj.plconvex import Interval, PLConvex


def rand_frac(rng: random.Random, lo: int = -6, hi: int = 6, dens=(1, 2, 3)) -> F:
    return F(rng.randint(lo, hi), rng.choice(dens))


def rand_probs(rng: random.Random, n: int, allow_null: bool = False) -> List[F]:
    weights = [rng.randint(1, 5) for _ in range(n)]
    if allow_null and n > 1 and rng.random() < 0.3:
        weights[rng.randrange(n)] = 0
    total = sum(weights)
    return [F(w, total) for w in weights]


def _split(rng: random.Random, cell):
    cell = list(cell)
    if len(cell) == 1 or rng.random() < 0.4:
        return [tuple(cell)]
    rng.shuffle(cell)
    k = rng.randint(1, len(cell) - 1)
    return _split(rng, cell[:k]) + _split(rng, cell[k:])


def rand_space(rng: random.Random, max_atoms: int = 4, max_horizon: int = 3, allow_null: bool = True,
               n_atoms: int = None, horizon: int = None) -> FilteredSpace:
    n = n_atoms or rng.randint(1, max_atoms)
    T = rng.randint(0, max_horizon) if horizon is None else horizon
    atoms = tuple(f"a{i}" for i in range(n))
    probs = rand_probs(rng, n, allow_null)
    null = [a for a, p in zip(atoms, probs) if p == 0]
    live = [a for a in atoms if a not in null]
    first = [tuple(live)] if rng.random() < 0.6 else _split(rng, live)
    parts = [first + [(a,) for a in null]]
    for _ in range(T):
        nxt = []
        for cell in parts[-1]:
            nxt.extend(_split(rng, cell))
        parts.append(nxt)
    return FilteredSpace(atoms, tuple(probs), tuple(tuple(tuple(c) for c in p) for p in parts))


def rand_plconvex(rng: random.Random, walls: bool = True, max_points: int = 4, lipschitz=None) -> PLConvex:
    """A proper piecewise linear convex function.

    With ``lipschitz`` all slopes lie in ``[-K, K]`` and there are no walls.
    """
    k = rng.randint(1, max_points)
    xs = sorted({rand_frac(rng) for _ in range(k)})
    k = len(xs)
    if lipschitz is not None:
        K = F(lipschitz)
        slopes = sorted(F(rng.randint(-int(4 * K), int(4 * K)), 4) for _ in range(k + 1))
        left, inner, right = slopes[0], slopes[1:-1], slopes[-1]
    else:
        slopes = sorted(rand_frac(rng, -4, 4) for _ in range(k + 1))
        left, inner, right = slopes[0], slopes[1:-1], slopes[-1]
        if walls and rng.random() < 0.3:
            left = NEG_INF
        if walls and rng.random() < 0.3:
            right = INF
    vs = [rand_frac(rng)]
    for i, s in enumerate(inner):
        vs.append(vs[-1] + s * (xs[i + 1] - xs[i]))
    return PLConvex.from_points(list(zip(xs, vs)), left, right)


def rand_full_domain(rng: random.Random, max_points: int = 4) -> PLConvex:
    return rand_plconvex(rng, walls=False, max_points=max_points)


def rand_integrand(rng: random.Random, space: FilteredSpace, kind: str = "any") -> ConvexIntegrand:
    """Fibers for every ``(t, atom)``.

    ``kind``: ``"full"`` (finite everywhere), ``"any"`` (walls allowed, but
    domains share the point 0 so cell averages stay proper), ``"affine"``.
    """
    fibers = {}
    for t in space.times:
        for a in space.atoms:
            if kind == "affine":
                f = plc.affine(rand_frac(rng, -3, 3), rand_frac(rng))
            elif kind == "full":
                f = rand_full_domain(rng)
            else:
                f = rand_plconvex(rng)
                while 0 not in f.domain():
                    f = rand_plconvex(rng)
            fibers[t, a] = f
    return ConvexIntegrand(fibers)


def rand_interval(rng: random.Random, empty_ok: bool = False, unbounded: bool = True) -> Interval:
    if empty_ok and rng.random() < 0.25:
        return Interval.empty()
    lo, hi = sorted((rand_frac(rng), rand_frac(rng)))
    if unbounded and rng.random() < 0.15:
        lo = NEG_INF
    if unbounded and rng.random() < 0.15:
        hi = INF
    return Interval(lo, hi)


def rand_interval_process(rng: random.Random, space: FilteredSpace, empty_ok: bool = False,
                          adapted: str = None, unbounded: bool = True):
    """Random interval process; with ``adapted`` fibers are constant on that mode's cells."""
    out = {}
    for t in space.times:
        cells = space.partition_for(adapted, t) if adapted else space.discrete
        for cell in cells:
            s = rand_interval(rng, empty_ok, unbounded)
            for a in cell:
                out[t, a] = s
    return out


def rand_process(rng: random.Random, space: FilteredSpace, adapted: str = None, values=None):
    out = {}
    for t in space.times:
        cells = space.partition_for(adapted, t) if adapted else space.discrete
        for cell in cells:
            v = rng.choice(values) if values else rand_frac(rng)
            for a in cell:
                out[t, a] = v
    return out


def small_spaces():
    """Deterministic small spaces used by the exhaustive checks."""
    two = FilteredSpace(("w1", "w2"), (F(1, 2), F(1, 2)), ((("w1", "w2"),), (("w1",), ("w2",))))
    three = FilteredSpace(("u", "m", "d"), (F(1, 4), F(1, 4), F(1, 2)),
                          ((("u", "m", "d"),), (("u", "m"), ("d",)), (("u",), ("m",), ("d",))))
    nulls = FilteredSpace(("x", "y", "z"), (F(1, 3), F(2, 3), F(0)),
                          ((("x", "y"), ("z",)), (("x",), ("y",), ("z",))))
    return [two, three, nulls]


def bounded_interval(lo, hi) -> Interval:
    return Interval(F(lo), F(hi))


__all__ = [
    "rand_frac", "rand_probs", "rand_space", "rand_plconvex", "rand_full_domain", "rand_integrand",
    "rand_interval", "rand_interval_process", "rand_process", "small_spaces", "bounded_interval",
    "INF", "NEG_INF",
]
