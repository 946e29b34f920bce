"""Epi-projections of convex integrands by conjugate duality.

The optional epi-projection is computed as ``conj(proj(conj h))`` fiber by
fiber.  It is only returned when the integrability witnesses exist; otherwise
:class:`~optproj.integrand.PreconditionError` is raised with the diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

from . import plconvex as plc
from .extreal import INF, NEG_INF, ZERO, ExtReal, add, is_finite, neg
from .filtration import Atom, FilteredSpace, Process, check_mode, project_process
from .integrand import ZERO_FN, ConvexIntegrand, PreconditionError, evaluate_along, project_convex
from .plconvex import Interval

__all__ = [
    "EpiDiagnostic",
    "conjugate_integrand",
    "preconditions_epip",
    "epi_projection",
    "epi_projection_optional",
    "epi_projection_predictable",
    "recession_commutes",
    "jensen_gap",
]


@dataclass
class EpiDiagnostic:
    """Witness processes ``w`` (for h) and ``v`` (for the conjugate), or what is missing."""

    w: Optional[Process] = None
    v: Optional[Process] = None
    missing: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.missing

    def __bool__(self):
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "witnesses found for w and v"
        return "; ".join(self.missing)


def conjugate_integrand(h: ConvexIntegrand) -> ConvexIntegrand:
    empty = h.empty_fibers
    if empty:
        raise PreconditionError(f"conjugate of empty fibers at {empty[:5]} is improper")
    return h.map(plc.conjugate)


def _domain_witness(space: FilteredSpace, g: ConvexIntegrand, mode: Optional[str], label: str,
                    diag: EpiDiagnostic) -> Optional[Process]:
    """A finite process in ``dom g`` off null atoms; adapted in ``mode`` if given.

    Per fiber (or per cell when adapted) the point of minimal absolute value
    in the intersected domains is used.
    """
    out: Process = {}
    times = sorted({t for t, _ in g.fibers})
    ok = True
    for t in times:
        groups = space.partition_for(mode, t) if mode else space.discrete
        for cell in groups:
            dom: Interval = Interval(NEG_INF, INF)
            for a in cell:
                if space.p[a] > 0:
                    dom = dom.intersect(g[t, a].domain())
            if dom.is_empty:
                ok = False
                what = "no common domain point on cell" if mode else "empty fiber at"
                diag.missing.append(f"{label}: {what} {cell} at t={t}")
                continue
            x = dom.smallest_point()
            for a in cell:
                out[t, a] = x
    return out if ok else None


def preconditions_epip(space: FilteredSpace, h: ConvexIntegrand, mode: str = "optional",
                       adapted_w: bool = False, adapted_v: bool = True) -> EpiDiagnostic:
    """Look for ``w`` with ``h(w)+`` finite and ``v`` with ``h*(v)+`` finite.

    For the duality formula ``w`` only needs to be integrable while ``v``
    must be adapted; recession swaps the roles, which the flags
    ``adapted_w`` / ``adapted_v`` select.
    """
    check_mode(mode)
    diag = EpiDiagnostic()
    if h.empty_fibers:
        bad = [k for k in h.empty_fibers if space.p[k[1]] > 0]
        if bad:
            diag.missing.append(f"w: h is identically +inf at {bad[:5]}")
            diag.missing.append("v: conjugate is improper where h is empty")
            return diag
    diag.w = _domain_witness(space, h, mode if adapted_w else None, "w", diag)
    hstar = ConvexIntegrand({k: (plc.conjugate(f) if not f.is_empty else plc.affine(0)) for k, f in h.fibers.items()})
    diag.v = _domain_witness(space, hstar, mode if adapted_v else None, "v", diag)
    return diag


def epi_projection(space: FilteredSpace, h: ConvexIntegrand, mode: str = "optional",
                   check: bool = True) -> ConvexIntegrand:
    """``conj(proj(conj h))`` once the witnesses are confirmed."""
    check_mode(mode)
    if check:
        diag = preconditions_epip(space, h, mode)
        if not diag:
            raise PreconditionError(f"epi-projection hypotheses fail: {diag.describe()}")
    # empty fibers on null atoms are indistinguishable from the zero function
    h = ConvexIntegrand({k: (ZERO_FN if f.is_empty and space.p[k[1]] == 0 else f) for k, f in h.fibers.items()})
    projected = project_convex(space, conjugate_integrand(h), mode)
    empty = projected.empty_fibers
    if empty:
        raise PreconditionError(f"projected conjugate is +inf everywhere at {empty[:5]}")
    return projected.map(plc.conjugate)


def epi_projection_optional(space: FilteredSpace, h: ConvexIntegrand) -> ConvexIntegrand:
    return epi_projection(space, h, "optional")


def epi_projection_predictable(space: FilteredSpace, h: ConvexIntegrand) -> ConvexIntegrand:
    return epi_projection(space, h, "predictable")


def recession_commutes(space: FilteredSpace, h: ConvexIntegrand,
                       mode: str = "optional") -> Tuple[ConvexIntegrand, ConvexIntegrand]:
    """``(proj(h^inf), proj(h)^inf)``; the caller compares them."""
    diag = preconditions_epip(space, h, mode, adapted_w=True, adapted_v=False)
    if not diag:
        raise PreconditionError(f"recession hypotheses fail: {diag.describe()}")
    lhs = project_convex(space, h.map(plc.recession), mode)
    proj = project_convex(space, h, mode)
    if proj.empty_fibers:
        raise PreconditionError(f"projection has empty fibers at {proj.empty_fibers[:5]}")
    return lhs, proj.map(plc.recession)


def jensen_gap(space: FilteredSpace, h: ConvexIntegrand, w: Mapping, mode: str = "optional") -> Dict[Tuple[int, Atom], ExtReal]:
    """``proj[h(w)] - epi_proj(h)(proj w)``, nonnegative off null atoms.

    Requires a finite ``w``, a witness ``w_bar`` with ``h(w_bar)+`` finite and
    an adapted bounded ``v_bar`` with ``h*(v_bar)`` finite.
    """
    check_mode(mode)
    for (t, a), x in w.items():
        if space.p[a] > 0 and not is_finite(x):
            raise PreconditionError(f"w must be finite; got {x} at {(t, a)}")
    diag = preconditions_epip(space, h, mode)
    if not diag:
        raise PreconditionError(f"Jensen hypotheses fail: {diag.describe()}")
    epi = epi_projection(space, h, mode, check=False)
    pw = project_process(space, w, mode)
    phw = project_process(space, evaluate_along(space, h, w), mode)
    gap = {}
    for key, val in phw.items():
        if space.p[key[1]] == 0:
            gap[key] = ZERO
            continue
        gap[key] = add(val, neg(plc.evaluate(epi[key], pw[key])))
    return gap
