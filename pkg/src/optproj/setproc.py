"""Interval-valued processes and their projections.

An interval process maps ``(t, atom)`` to an :class:`~optproj.plconvex.Interval`.
Projections are computed two ways: by conditional expectations of the
endpoints, and through support functions (project the support integrand,
read the interval back).  Both must agree.
"""

from __future__ import annotations

from typing import Dict, Mapping, Optional, Tuple

from . import plconvex as plc
from .extreal import INF, NEG_INF, ZERO, is_finite
from .filtration import (
    DEFAULT_CAP,
    Atom,
    FilteredSpace,
    Partition,
    Process,
    check_mode,
    cond_exp,
    is_constant_on_cells,
    project_process,
    stopping_time_probes,
)
from .integrand import ConvexIntegrand, PreconditionError, project_convex
from .plconvex import EMPTY_INTERVAL, Interval

IntervalProcess = Dict[Tuple[int, Atom], Interval]

__all__ = [
    "IntervalProcess",
    "support_integrand",
    "project_set",
    "optional_projection_set",
    "predictable_projection_set",
    "has_T_integrable_selection",
    "conditional_expectation_set",
    "verify_via_bst",
    "is_subset",
    "subset_via_stopping_times",
    "find_subset_violation",
    "selection_membership",
    "is_adapted_set_process",
]


def is_adapted_set_process(space: FilteredSpace, gamma: Mapping, mode: str = "optional") -> bool:
    return all(
        is_constant_on_cells(space.partition_for(mode, t), {a: gamma[t, a] for a in space.atoms})
        for t in space.times
    )


def support_integrand(gamma: Mapping) -> ConvexIntegrand:
    """Fiber-wise support functions; empty fibers stay empty."""
    return ConvexIntegrand({k: plc.support(s) for k, s in gamma.items()})


def has_T_integrable_selection(space: FilteredSpace, gamma: Mapping,
                               mode: str = "optional") -> Tuple[bool, Optional[Process]]:
    """Nonempty fibers off null atoms; the witness picks the point of least ``|x|``."""
    check_mode(mode)
    witness: Process = {}
    for (t, a), s in gamma.items():
        if s.is_empty:
            if space.p[a] > 0:
                return False, None
            witness[t, a] = ZERO
        else:
            witness[t, a] = s.smallest_point()
    return True, witness


def _endpoint_projection(space: FilteredSpace, gamma: Mapping, partition_at) -> IntervalProcess:
    out = {}
    times = sorted({t for t, _ in gamma})
    for t in times:
        part = partition_at(t)
        los = cond_exp(space, part, {a: gamma[t, a].lo for a in space.atoms})
        his = cond_exp(space, part, {a: gamma[t, a].hi for a in space.atoms})
        for a in space.atoms:
            lo, hi = los[a], his[a]
            out[t, a] = EMPTY_INTERVAL if (lo is INF or hi is NEG_INF) else Interval(lo, hi)
    return out


def _support_projection(space: FilteredSpace, gamma: Mapping, mode: str) -> IntervalProcess:
    projected = project_convex(space, support_integrand(gamma), mode)
    return {k: plc.interval_of_support(f) for k, f in projected.fibers.items()}


def project_set(space: FilteredSpace, gamma: Mapping, mode: str = "optional",
                method: str = "endpoint") -> IntervalProcess:
    """Optional/predictable projection of an interval process.

    ``method`` is ``"endpoint"`` (conditional expectations of the endpoints)
    or ``"support"`` (through the projected support integrand).
    """
    check_mode(mode)
    ok, _ = has_T_integrable_selection(space, gamma, mode)
    if not ok:
        raise PreconditionError("the interval process has no integrable selection")
    gamma = _fill_null(space, gamma)
    if method == "endpoint":
        return _endpoint_projection(space, gamma, lambda t: space.partition_for(mode, t))
    if method == "support":
        return _support_projection(space, gamma, mode)
    raise ValueError(f"unknown method {method!r}")


def _fill_null(space: FilteredSpace, gamma: Mapping) -> IntervalProcess:
    # empty fibers on null atoms are irrelevant; a point keeps the arithmetic total
    return {k: (Interval(0, 0) if s.is_empty and space.p[k[1]] == 0 else s) for k, s in gamma.items()}


def optional_projection_set(space: FilteredSpace, gamma: Mapping, method: str = "endpoint") -> IntervalProcess:
    return project_set(space, gamma, "optional", method)


def predictable_projection_set(space: FilteredSpace, gamma: Mapping, method: str = "endpoint") -> IntervalProcess:
    return project_set(space, gamma, "predictable", method)


def conditional_expectation_set(space: FilteredSpace, sets: Mapping[Atom, Interval],
                                partition: Partition) -> Dict[Atom, Interval]:
    """Conditional expectation of a random interval given a partition (per atom)."""
    for a, s in sets.items():
        if s.is_empty and space.p[a] > 0:
            raise PreconditionError(f"random interval is empty at {a!r}")
    filled = {a: (Interval(0, 0) if s.is_empty else s) for a, s in sets.items()}
    los = cond_exp(space, partition, {a: filled[a].lo for a in space.atoms})
    his = cond_exp(space, partition, {a: filled[a].hi for a in space.atoms})
    return {a: Interval(los[a], his[a]) for a in space.atoms}


def _equal_pos(space: FilteredSpace, x: Mapping[Atom, object], y: Mapping[Atom, object]) -> bool:
    return all(x[a] == y[a] for a in space.positive_atoms)


def verify_via_bst(space: FilteredSpace, gamma: Mapping, candidate: Mapping, mode: str = "optional",
                   cap: int = DEFAULT_CAP) -> bool:
    """Candidate sampled at every bounded (predictable) time equals the
    conditional expectation of the sampled process.
    """
    check_mode(mode)
    if not is_adapted_set_process(space, candidate, mode):
        return False
    for tau, sig in stopping_time_probes(space, mode, cap, bounded=True):
        stopped = {a: tau[a] if tau[a] is not INF else 0 for a in space.atoms}
        g_tau = {a: gamma[stopped[a], a] for a in space.atoms}
        c_tau = {a: candidate[stopped[a], a] for a in space.atoms}
        if not _equal_pos(space, c_tau, conditional_expectation_set(space, g_tau, sig)):
            return False
    return True


def is_subset(space: FilteredSpace, inner: Mapping, outer: Mapping) -> bool:
    """Fiber inclusion off null atoms."""
    return all(inner[t, a].issubset(outer[t, a]) for (t, a) in inner if space.p[a] > 0)


def find_subset_violation(space: FilteredSpace, inner: Mapping, outer: Mapping, mode: str = "optional",
                          cap: int = DEFAULT_CAP) -> Optional[Dict[Atom, object]]:
    """A bounded (predictable) stopping time at which inclusion fails with positive probability."""
    check_mode(mode)
    for tau, _ in stopping_time_probes(space, mode, cap, bounded=True):
        for a in space.positive_atoms:
            t = tau[a]
            if not inner[t, a].issubset(outer[t, a]):
                return tau
    return None


def subset_via_stopping_times(space: FilteredSpace, inner: Mapping, outer: Mapping, mode: str = "optional",
                              cap: int = DEFAULT_CAP) -> bool:
    for m, g in (("inner", inner), ("outer", outer)):
        if not is_adapted_set_process(space, g, mode):
            raise PreconditionError(f"{m} process is not {mode}ly adapted")
    return find_subset_violation(space, inner, outer, mode, cap) is None


def selection_membership(space: FilteredSpace, gamma: Mapping, w: Mapping, mode: str = "optional") -> bool:
    """Whether the projection of a selection ``w`` of an adapted ``gamma`` is again a selection."""
    check_mode(mode)
    if not is_adapted_set_process(space, gamma, mode):
        raise PreconditionError(f"gamma is not {mode}ly adapted")
    for (t, a), x in w.items():
        if space.p[a] > 0 and (not is_finite(x) or x not in gamma[t, a]):
            raise PreconditionError(f"w is not a selection of gamma at {(t, a)}")
    pw = project_process(space, w, mode)
    return all(pw[t, a] in gamma[t, a] for (t, a) in gamma if space.p[a] > 0)


def sampled(gamma: Mapping, tau: Mapping[Atom, object]) -> Dict[Atom, Interval]:
    return {a: gamma[t, a] for a, t in tau.items() if t is not INF}
