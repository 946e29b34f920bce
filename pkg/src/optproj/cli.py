"""Command-line front end driven by scenario files.

Exit status: 0 when every check passes, 1 on a verification failure and 2
on a schema or precondition error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from typing import Callable, List, Optional, Sequence

from . import plconvex as plc
from . import oracle
from .epiproj import epi_projection, preconditions_epip, recession_commutes
from .extreal import format_ext, parse_ext, parse_rational
from .filtration import (
    InstanceTooLarge,
    StructureError,
    is_adapted,
    project_process,
    verify_projection_property,
)
from .integrand import (
    DEFAULT_LADDER,
    ConvexIntegrand,
    GridIntegrand,
    PreconditionError,
    optional_projection_grid,
    predictable_projection_grid,
    project_convex,
)
from .plconvex import Interval, PLConvex
from .scenario import Scenario, SchemaError, _decode_object, load
from .sections import find_section, verify_section
from .setproc import is_adapted_set_process, project_set, verify_via_bst

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


# ---------------------------------------------------------------------------
# output


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (Interval, PLConvex)):
        return str(value)
    if isinstance(value, tuple):
        return " ".join(format_ext(v) for v in value)
    return format_ext(value)


def _is_interval_process(obj) -> bool:
    return isinstance(obj, dict) and bool(obj) and isinstance(next(iter(obj.values())), Interval)


def _interval_process(sc: Scenario, name: str) -> dict:
    obj = sc.get(name, dict)
    if not _is_interval_process(obj):
        raise SchemaError(f"objects.{name}", "expected interval_process")
    return obj


def _value_at(obj, key):
    return obj[key]


class Table:
    """Rows of ``(time, cell, object-id, value, [oracle, match])``."""

    def __init__(self, with_oracle: bool = False):
        self.rows: List[List[str]] = []
        self.with_oracle = with_oracle
        self.mismatches = 0

    def add(self, t, cell, name, value, reference=None, match: Optional[bool] = None):
        row = [str(t), ",".join(str(a) for a in cell), name, _fmt(value)]
        if self.with_oracle:
            row += [_fmt(reference) if reference is not None else "", "" if match is None else ("ok" if match else "MISMATCH")]
            if match is False:
                self.mismatches += 1
        self.rows.append(row)

    def emit(self, out, fmt: str):
        if fmt == "csv":
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            head = ["time", "cell", "object", "value"] + (["oracle", "match"] if self.with_oracle else [])
            writer.writerow(head)
            writer.writerows(self.rows)
            out.write(buf.getvalue())
            return
        for row in self.rows:
            line = f"t={row[0]} cell={{{row[1]}}} {row[2]}: {row[3]}"
            if self.with_oracle:
                line += f" | oracle: {row[4]} {row[5]}"
            out.write(line.rstrip() + "\n")


def _cells(space, t, mode):
    if mode is None:
        return space.discrete
    return space.partition_for(mode, t)


def _times(obj) -> List[int]:
    keys = obj.fibers if isinstance(obj, ConvexIntegrand) else obj.values if isinstance(obj, GridIntegrand) else obj
    return sorted({t for t, _ in keys})


def _tabulate(table: Table, space, name: str, obj, mode, reference=None, same: Callable = None):
    same = same or (lambda x, y: x == y)
    for t in _times(obj):
        for cell in _cells(space, t, mode):
            key = (t, cell[0])
            val = _value_at(obj, key)
            if reference is None:
                table.add(t, cell, name, val)
                continue
            ref = _value_at(reference, key)
            null = all(space.p[a] == 0 for a in cell)
            table.add(t, cell, name, val, ref, None if null else same(val, ref))


# ---------------------------------------------------------------------------
# commands


def _oracle_grid(h: ConvexIntegrand) -> List:
    pts = set()
    for f in h.fibers.values():
        pts.update(f.xs)
    pts = sorted(pts) or [0]
    lo, hi = pts[0] - 1, pts[-1] + 1
    return sorted(set(pts) | {lo, hi})


def cmd_project(sc: Scenario, args, out) -> int:
    obj = sc.get(args.object)
    space, mode = sc.space, args.mode
    table = Table(with_oracle=args.oracle)
    if isinstance(obj, GridIntegrand):
        res = optional_projection_grid(space, obj) if mode == "optional" else predictable_projection_grid(space, obj)
        ok = oracle.brute_projection_defn(space, obj, res, mode, args.cap) if args.oracle else None
        _tabulate(table, space, args.object, res, mode)
    elif isinstance(obj, ConvexIntegrand):
        res = project_convex(space, obj, mode, method=args.method)
        ok = None
        if args.oracle:
            ok = oracle.brute_projection_defn(space, obj, res, mode, args.cap, grid=_oracle_grid(obj))
        _tabulate(table, space, args.object, res, mode)
    elif _is_interval_process(obj):
        return cmd_project_set(sc, args, out)
    else:
        res = project_process(space, obj, mode)
        ok = verify_projection_property(space, obj, res, mode, args.cap) if args.oracle else None
        _tabulate(table, space, args.object, res, mode)
    table.emit(out, args.out)
    if ok is not None:
        out.write(f"defining property: {'pass' if ok else 'FAIL'}\n")
    return EXIT_OK if ok in (None, True) else EXIT_FAIL


def cmd_project_set(sc: Scenario, args, out) -> int:
    gamma = _interval_process(sc, args.object)
    space, mode = sc.space, args.mode
    res = project_set(space, gamma, mode)
    table = Table(with_oracle=args.oracle)
    ref = oracle.brute_set_projection(space, gamma, mode, cap=args.cap) if args.oracle else None
    _tabulate(table, space, args.object, res, mode, ref)
    table.emit(out, args.out)
    return EXIT_FAIL if table.mismatches else EXIT_OK


def _supports_match(f: PLConvex, ref: dict) -> bool:
    return oracle.brute_epi_support(f) == ref


def cmd_epi_project(sc: Scenario, args, out) -> int:
    h = sc.get(args.object, ConvexIntegrand)
    space, mode = sc.space, args.mode
    if args.check_preconditions:
        diag = preconditions_epip(space, h, mode)
        out.write(f"preconditions: {diag.describe()}\n")
        if not diag:
            return EXIT_ERROR
    res = epi_projection(space, h, mode)
    table = Table(with_oracle=args.oracle)
    if args.oracle:
        ref = oracle.brute_epi_projection(space, h, mode)
        for t in _times(res):
            for cell in space.partition_for(mode, t):
                f = res[t, cell[0]]
                if all(space.p[a] == 0 for a in cell):
                    table.add(t, cell, args.object, f)
                else:
                    r = ref[t, cell[0]]
                    table.add(t, cell, args.object, f, "support samples", _supports_match(f, r))
    else:
        _tabulate(table, space, args.object, res, mode)
    table.emit(out, args.out)
    return EXIT_FAIL if table.mismatches else EXIT_OK


def cmd_section(sc: Scenario, args, out) -> int:
    gamma = _interval_process(sc, args.object)
    space = sc.space
    sec = find_section(space, gamma, args.mode)
    table = Table()
    for a in space.atoms:
        table.add("-", (a,), "tau", sec.tau[a])
    _tabulate(table, space, "w", sec.w, args.mode)
    table.emit(out, args.out)
    ok = verify_section(space, gamma, sec.tau, sec.w, args.mode)
    out.write(f"section guarantees: {'pass' if ok else 'FAIL'}\n")
    return EXIT_OK if ok else EXIT_FAIL


def _fiberwise(sc: Scenario, args, out, fn: Callable[[PLConvex], PLConvex], check=None) -> int:
    obj = sc.get(args.object)
    table = Table(with_oracle=check is not None)
    if isinstance(obj, PLConvex):
        items = [("-", ("-",), obj)]
    elif isinstance(obj, ConvexIntegrand):
        items = [(t, (a,), obj[t, a]) for t in _times(obj) for a in sc.space.atoms]
    else:
        raise SchemaError(f"objects.{args.object}", "expected plconvex or convex_integrand")
    for t, cell, f in items:
        g = fn(f)
        if check is None:
            table.add(t, cell, args.object, g)
        else:
            table.add(t, cell, args.object, g, "sampled", check(f, g))
    table.emit(out, args.out)
    return EXIT_FAIL if table.mismatches else EXIT_OK


def _conjugate_matches(f: PLConvex, g: PLConvex) -> bool:
    ref = oracle.brute_conjugate(f, f.xs)
    return all(oracle.brute_value(g, y) == v for y, v in ref.items())


def cmd_conjugate(sc, args, out) -> int:
    return _fiberwise(sc, args, out, plc.conjugate, _conjugate_matches if args.oracle else None)


def cmd_envelope(sc, args, out) -> int:
    nu = parse_rational(args.nu)
    lo, hi = (parse_ext(s) for s in args.box.split(","))
    box = Interval(lo, hi)
    return _fiberwise(sc, args, out, lambda f: plc.pasch_hausdorff(f, nu, box))


def cmd_recession(sc, args, out) -> int:
    return _fiberwise(sc, args, out, plc.recession)


# ---------------------------------------------------------------------------
# verify


class Report:
    def __init__(self, out):
        self.out = out
        self.failed = 0

    def check(self, label: str, ok: bool, detail: str = ""):
        self.failed += not ok
        self.out.write(f"{'PASS' if ok else 'FAIL'} {label}{': ' + detail if detail else ''}\n")

    def skip(self, label: str, why: str):
        self.out.write(f"SKIP {label}: {why}\n")


def _same_off_null(space, a, b) -> bool:
    keys = a.fibers if isinstance(a, ConvexIntegrand) else a.values if isinstance(a, GridIntegrand) else a
    return all(_value_at(a, k) == _value_at(b, k) for k in keys if space.p[k[1]] > 0)


def _verify_object(space, name, obj, rep: Report, cap: int):
    for mode in ("optional", "predictable"):
        label = f"{name} [{mode}]"
        try:
            if isinstance(obj, PLConvex):
                if mode == "predictable":
                    continue
                if not obj.is_empty:
                    rep.check(f"{name}: conjugate involution", plc.conjugate(plc.conjugate(obj)) == obj)
                    rep.check(f"{name}: conjugate vs brute sup", _conjugate_matches(obj, plc.conjugate(obj)))
            elif isinstance(obj, GridIntegrand):
                proj = (optional_projection_grid if mode == "optional" else predictable_projection_grid)(space, obj)
                rep.check(f"{label}: defining property", oracle.brute_projection_defn(space, obj, proj, mode, cap))
            elif isinstance(obj, ConvexIntegrand):
                direct = project_convex(space, obj, mode)
                ladder = project_convex(space, obj, mode, method="ladder")
                lim = direct.map(lambda f: plc.restrict(f, DEFAULT_LADDER[-1]))
                rep.check(f"{label}: direct vs envelope ladder", _same_off_null(space, lim, ladder))
                diag = preconditions_epip(space, obj, mode)
                if diag:
                    epi = epi_projection(space, obj, mode)
                    ref = oracle.brute_epi_projection(space, obj, mode)
                    ok = all(_supports_match(epi[k], r) for k, r in ref.items())
                    rep.check(f"{label}: epi-projection vs epigraph averages", ok)
                else:
                    rep.skip(f"{label}: epi-projection", diag.describe())
                try:
                    lhs, rhs = recession_commutes(space, obj, mode)
                    rep.check(f"{label}: recession commutes", _same_off_null(space, lhs, rhs))
                except PreconditionError as exc:
                    rep.skip(f"{label}: recession", str(exc))
            elif obj and isinstance(next(iter(obj.values())), Interval):
                if is_adapted_set_process(space, obj, mode):
                    sec = find_section(space, obj, mode)
                    rep.check(f"{label}: section", verify_section(space, obj, sec.tau, sec.w, mode))
                endpoint = project_set(space, obj, mode)
                support = project_set(space, obj, mode, method="support")
                brute = oracle.brute_set_projection(space, obj, mode, cap=cap)
                rep.check(f"{label}: endpoint = support route", _same_off_null(space, endpoint, support))
                rep.check(f"{label}: endpoint = selection hull", _same_off_null(space, endpoint, brute))
                rep.check(f"{label}: stopping-time characterization", verify_via_bst(space, obj, endpoint, mode, cap))
            else:
                proj = project_process(space, obj, mode)
                rep.check(f"{label}: defining property", verify_projection_property(space, obj, proj, mode, cap))
                if is_adapted(space, obj, mode):
                    rep.check(f"{label}: idempotent on adapted input", _same_off_null(space, proj, obj))
        except InstanceTooLarge as exc:
            rep.skip(label, str(exc))
        except PreconditionError as exc:
            rep.skip(label, str(exc))


_OPS = {
    "project": lambda space, obj, mode: (
        project_convex(space, obj, mode) if isinstance(obj, ConvexIntegrand)
        else (optional_projection_grid if mode == "optional" else predictable_projection_grid)(space, obj)
        if isinstance(obj, GridIntegrand)
        else project_set(space, obj, mode) if obj and isinstance(next(iter(obj.values())), Interval)
        else project_process(space, obj, mode)
    ),
    "epi-project": lambda space, obj, mode: epi_projection(space, obj, mode),
    "project-set": lambda space, obj, mode: project_set(space, obj, mode),
}


def _verify_expected(sc: Scenario, rep: Report):
    for label, entry in sc.expected.items():
        path = f"expected.{label}"
        for fld in ("op", "object", "result"):
            if fld not in entry:
                raise SchemaError(f"{path}.{fld}", "missing")
        if entry["op"] not in _OPS:
            raise SchemaError(f"{path}.op", f"unknown operation {entry['op']!r}")
        mode = entry.get("mode", "optional")
        got = _OPS[entry["op"]](sc.space, sc.get(entry["object"]), mode)
        want = _decode_object(f"{path}.result", sc.space, entry["result"])
        ok = _same_off_null(sc.space, got, want)
        table = Table()
        _tabulate(table, sc.space, entry["object"], got, mode)
        table.emit(rep.out, "exact")
        rep.check(f"{label}: {entry['op']} {entry['object']} [{mode}] matches expected", ok)


def cmd_verify(sc: Scenario, args, out) -> int:
    rep = Report(out)
    for name, obj in sc.objects.items():
        _verify_object(sc.space, name, obj, rep, args.cap)
    _verify_expected(sc, rep)
    out.write(f"{'all checks passed' if not rep.failed else f'{rep.failed} check(s) failed'}\n")
    return EXIT_FAIL if rep.failed else EXIT_OK


# objects a command can work on, used to pick a default when --object is absent
ACCEPTS = {
    "project": lambda o: not isinstance(o, PLConvex),
    "epi-project": lambda o: isinstance(o, ConvexIntegrand),
    "project-set": _is_interval_process,
    "section": _is_interval_process,
    "conjugate": lambda o: isinstance(o, (PLConvex, ConvexIntegrand)),
    "envelope": lambda o: isinstance(o, (PLConvex, ConvexIntegrand)),
    "recession": lambda o: isinstance(o, (PLConvex, ConvexIntegrand)),
}

COMMANDS = {
    "project": cmd_project,
    "epi-project": cmd_epi_project,
    "project-set": cmd_project_set,
    "section": cmd_section,
    "conjugate": cmd_conjugate,
    "envelope": cmd_envelope,
    "recession": cmd_recession,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="optproj", description="Exact projections on finite filtered spaces.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("scenario", help="path to a scenario JSON file")
        p.add_argument("--object", "-o", help="object name (defaults to the first object the command accepts)")
        p.add_argument("--mode", choices=("optional", "predictable"), default="optional")
        p.add_argument("--oracle", action="store_true", help="compare with the brute-force reference")
        p.add_argument("--out", choices=("exact", "csv"), default="exact")
        p.add_argument("--cap", type=int, default=100_000, help="enumeration cap")
        if name == "project":
            p.add_argument("--method", choices=("direct", "ladder"), default="direct")
        if name == "epi-project":
            p.add_argument("--check-preconditions", action="store_true")
        if name == "envelope":
            p.add_argument("--nu", required=True, help="Lipschitz level, e.g. 2 or 3/2")
            p.add_argument("--box", required=True, help="lo,hi of a bounded box, e.g. --box=-4,4")
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        sc = load(args.scenario)
        if args.object is None and args.command != "verify":
            if not sc.objects:
                raise SchemaError("objects", "scenario has no objects")
            fits = [n for n, o in sc.objects.items() if ACCEPTS[args.command](o)]
            args.object = fits[0] if fits else next(iter(sc.objects))
        return COMMANDS[args.command](sc, args, out)
    except (SchemaError, StructureError, PreconditionError, InstanceTooLarge, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
