"""Exact optional and predictable sections of interval-valued processes."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import AbstractSet, Dict, Iterator, Mapping, Optional, Union

from .extreal import INF, ZERO
from .filtration import (
    Atom,
    FilteredSpace,
    Process,
    StoppingTime,
    StructureError,
    check_mode,
    debut,
    is_adapted,
    is_predictable_time,
    is_stopping_time,
    projection_to_omega,
)
from .plconvex import Interval
from .setproc import is_adapted_set_process

__all__ = ["Section", "optional_section", "predictable_section", "find_section", "verify_section", "domain_events"]

SetLike = Union[Mapping, AbstractSet]


@dataclass(frozen=True)
class Section:
    tau: StoppingTime
    w: Process
    eps: Fraction = ZERO

    def __iter__(self) -> Iterator:
        yield self.tau
        yield self.w


def _as_intervals(space: FilteredSpace, gamma: SetLike) -> Dict:
    if isinstance(gamma, Mapping):
        return dict(gamma)
    events = set(gamma)
    whole, empty = Interval.whole(), Interval.empty()
    return {(t, a): (whole if (t, a) in events else empty) for t in space.times for a in space.atoms}


def domain_events(gamma: Mapping) -> frozenset:
    return frozenset(k for k, s in gamma.items() if not s.is_empty)


def find_section(space: FilteredSpace, gamma: SetLike, mode: str = "optional", eps=0) -> Section:
    """Debut of the domain together with the least-``|x|`` selection.

    ``eps`` is accepted and stored; on a finite space the debut already
    reaches the full mass of the domain's projection.
    """
    check_mode(mode)
    gamma = _as_intervals(space, gamma)
    if not is_adapted_set_process(space, gamma, mode):
        raise StructureError(f"set-valued process is not {mode}ly adapted")
    tau = debut(space, domain_events(gamma), mode)
    w = {k: (ZERO if s.is_empty else s.smallest_point()) for k, s in gamma.items()}
    return Section(tau, w, Fraction(eps))


def optional_section(space: FilteredSpace, gamma: SetLike, eps=0) -> Section:
    return find_section(space, gamma, "optional", eps)


def predictable_section(space: FilteredSpace, gamma: SetLike, eps=0) -> Section:
    return find_section(space, gamma, "predictable", eps)


def verify_section(space: FilteredSpace, gamma: SetLike, tau: Mapping[Atom, object], w: Mapping,
                   mode: Optional[str] = None) -> bool:
    """Graph inside the domain, ``w_tau`` in ``gamma_tau``, and full mass of the projected domain.

    With ``mode`` the measurability of ``tau`` and ``w`` is checked as well.
    """
    gamma = _as_intervals(space, gamma)
    pos = space.positive_atoms
    for a in pos:
        t = tau[a]
        if t is INF:
            continue
        if gamma[t, a].is_empty or w[t, a] not in gamma[t, a]:
            return False
    hit = space.mass(a for a in pos if tau[a] is not INF)
    if hit != space.mass(projection_to_omega(domain_events(gamma)) & set(pos)):
        return False
    if mode is not None:
        check_mode(mode)
        timed = is_predictable_time if mode == "predictable" else is_stopping_time
        if not timed(space, tau) or not is_adapted(space, w, mode):
            return False
    return True
