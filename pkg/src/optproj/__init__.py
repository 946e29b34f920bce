"""Exact optional and predictable projections on finite filtered spaces.

Processes and integrands with piecewise linear convex fibers are projected
with rational arithmetic, interval-valued processes included.  Every
constructive routine has a brute-force counterpart in :mod:`optproj.oracle`.
"""

from .extreal import INF, NEG_INF, ZERO, Infinity, format_ext, parse_ext, rational
from .filtration import (
    FilteredSpace,
    InstanceTooLarge,
    StructureError,
    debut,
    enumerate_stopping_times,
    optional_projection_process,
    predictable_projection_process,
    project_process,
    verify_projection_property,
)
from .plconvex import EMPTY, Interval, PLConvex, conjugate, pasch_hausdorff, recession
from .integrand import (
    ConvexIntegrand,
    GridIntegrand,
    PreconditionError,
    optional_projection_convex,
    optional_projection_grid,
    predictable_projection_convex,
    predictable_projection_grid,
    project_convex,
)
from .epiproj import epi_projection, epi_projection_optional, epi_projection_predictable, jensen_gap
from .setproc import optional_projection_set, predictable_projection_set, project_set
from .sections import optional_section, predictable_section, verify_section

__version__ = "0.1.0"

__all__ = [
    "INF", "NEG_INF", "ZERO", "Infinity", "format_ext", "parse_ext", "rational",
    "FilteredSpace", "InstanceTooLarge", "StructureError", "debut", "enumerate_stopping_times",
    "optional_projection_process", "predictable_projection_process", "project_process",
    "verify_projection_property",
    "EMPTY", "Interval", "PLConvex", "conjugate", "pasch_hausdorff", "recession",
    "ConvexIntegrand", "GridIntegrand", "PreconditionError",
    "optional_projection_convex", "optional_projection_grid",
    "predictable_projection_convex", "predictable_projection_grid", "project_convex",
    "epi_projection", "epi_projection_optional", "epi_projection_predictable", "jensen_gap",
    "optional_projection_set", "predictable_projection_set", "project_set",
    "optional_section", "predictable_section", "verify_section",
]
