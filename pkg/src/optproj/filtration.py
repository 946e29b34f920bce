"""Finite filtered probability spaces.

Processes, stopping times and event sets are plain dictionaries:

* a scalar process maps ``(t, atom)`` to an extended real,
* a stopping time maps ``atom`` to an integer time or :data:`INF`,
* an event set is a set of ``(t, atom)`` pairs.

The predictable "information before t" is realized as the partition at
``t - 1`` (and the time-0 partition at ``t = 0``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Dict, FrozenSet, Hashable, Iterable, List, Mapping, Sequence, Tuple

from .extreal import INF, NEG_INF, ZERO, ExtReal, Infinity, ext_sum, rational

Atom = Hashable
Cell = Tuple[Atom, ...]
Partition = Tuple[Cell, ...]
Process = Dict[Tuple[int, Atom], ExtReal]
StoppingTime = Dict[Atom, object]
EventSet = FrozenSet[Tuple[int, Atom]]

MODES = ("optional", "predictable")
DEFAULT_CAP = 100_000


class StructureError(ValueError):
    """Raised when an object does not fit the filtered space."""


class InstanceTooLarge(RuntimeError):
    """Raised when an exhaustive enumeration would exceed its cap."""


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


@dataclass(frozen=True)
class FilteredSpace:
    """Finite atoms with exact probabilities and one refining partition per time.

    ``partitions[t]`` is the partition generating the information at time
    ``t``; there are ``horizon + 1`` of them.
    """

    atoms: Tuple[Atom, ...]
    prob: Tuple[Fraction, ...]
    partitions: Tuple[Partition, ...]

    def __post_init__(self):
        atoms = tuple(self.atoms)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "prob", tuple(rational(p) for p in self.prob))
        if len(set(atoms)) != len(atoms) or not atoms:
            raise StructureError("atoms must be a nonempty list of distinct ids")
        if len(self.prob) != len(atoms):
            raise StructureError("one probability per atom is required")
        if any(p < 0 for p in self.prob):
            raise StructureError("probabilities must be nonnegative")
        if sum(self.prob) != 1:
            raise StructureError(f"probabilities sum to {sum(self.prob)}, not 1")
        if not self.partitions:
            raise StructureError("at least the time-0 partition is required")
        order = {a: i for i, a in enumerate(atoms)}
        parts = tuple(_normalize_partition(p, order) for p in self.partitions)
        object.__setattr__(self, "partitions", parts)
        for t in range(1, len(parts)):
            coarse = _cell_map(parts[t - 1])
            for cell in parts[t]:
                if len({coarse[a] for a in cell}) != 1:
                    raise StructureError(f"partition at time {t} does not refine time {t - 1}")
        zero_cells = _cell_map(parts[0])
        for a, p in zip(atoms, self.prob):
            if p == 0 and len(zero_cells[a]) != 1:
                raise StructureError(f"null atom {a!r} must be a singleton cell at time 0")

    @classmethod
    def build(cls, prob: Mapping[Atom, object], partitions: Sequence[Iterable[Iterable[Atom]]]):
        atoms = tuple(prob)
        return cls(atoms, tuple(rational(prob[a]) for a in atoms),
                   tuple(tuple(tuple(c) for c in part) for part in partitions))

    @property
    def horizon(self) -> int:
        return len(self.partitions) - 1

    @property
    def times(self) -> range:
        return range(len(self.partitions))

    @cached_property
    def p(self) -> Dict[Atom, Fraction]:
        return dict(zip(self.atoms, self.prob))

    @cached_property
    def null_atoms(self) -> FrozenSet[Atom]:
        return frozenset(a for a in self.atoms if self.p[a] == 0)

    @cached_property
    def positive_atoms(self) -> Tuple[Atom, ...]:
        return tuple(a for a in self.atoms if self.p[a] > 0)

    def partition(self, t: int) -> Partition:
        return self.partitions[t]

    def predictable_partition(self, t: int) -> Partition:
        return self.partitions[max(t - 1, 0)]

    def partition_for(self, mode: str, t: int) -> Partition:
        check_mode(mode)
        return self.partition(t) if mode == "optional" else self.predictable_partition(t)

    @cached_property
    def _cell_maps(self) -> Tuple[Dict[Atom, Cell], ...]:
        return tuple(_cell_map(p) for p in self.partitions)

    def cell_of(self, t: int, atom: Atom) -> Cell:
        return self._cell_maps[t][atom]

    def mass(self, atoms: Iterable[Atom]) -> Fraction:
        return sum((self.p[a] for a in atoms), Fraction(0))

    def check_partition(self, partition: Partition) -> Partition:
        order = {a: i for i, a in enumerate(self.atoms)}
        return _normalize_partition(partition, order)

    @cached_property
    def discrete(self) -> Partition:
        return tuple((a,) for a in self.atoms)

    @cached_property
    def trivial(self) -> Partition:
        return (self.atoms,)

    def __hash__(self):
        return hash((self.atoms, self.prob, self.partitions))


def _normalize_partition(partition, order: Mapping[Atom, int]) -> Partition:
    cells = []
    seen = set()
    for cell in partition:
        cell = tuple(sorted(set(cell), key=lambda a: order.get(a, -1)))
        if not cell:
            raise StructureError("partition cells must be nonempty")
        for a in cell:
            if a not in order:
                raise StructureError(f"unknown atom {a!r} in partition")
            if a in seen:
                raise StructureError(f"atom {a!r} appears in two cells")
            seen.add(a)
        cells.append(cell)
    if len(seen) != len(order):
        missing = [a for a in order if a not in seen]
        raise StructureError(f"partition does not cover atoms {missing}")
    cells.sort(key=lambda c: order[c[0]])
    return tuple(cells)


def _cell_map(partition: Partition) -> Dict[Atom, Cell]:
    return {a: cell for cell in partition for a in cell}


def is_measurable(partition: Partition, atoms: Iterable[Atom]) -> bool:
    """True iff the atom set is a union of cells of ``partition``."""
    s = set(atoms)
    return all(s.issuperset(c) or s.isdisjoint(c) for c in partition)


def is_constant_on_cells(partition: Partition, values: Mapping[Atom, object]) -> bool:
    return all(len({values[a] for a in cell}) == 1 for cell in partition)


# ---------------------------------------------------------------------------
# conditional expectation and projections of scalar processes


def cond_exp(space: FilteredSpace, partition: Partition,
             phi: Mapping[Atom, ExtReal]) -> Dict[Atom, ExtReal]:
    """Conditional expectation given a partition, under the ``+inf`` convention.

    Null cells get the value 0.
    """
    partition = space.check_partition(partition)
    out = {}
    for cell in partition:
        val = _cell_average(space, cell, phi)
        for a in cell:
            out[a] = val
    return out


def _cell_average(space: FilteredSpace, cell: Iterable[Atom], phi: Mapping[Atom, ExtReal]) -> ExtReal:
    pos = [a for a in cell if space.p[a] > 0]
    if not pos:
        return ZERO
    if any(phi[a] is INF for a in pos):
        return INF
    if any(phi[a] is NEG_INF for a in pos):
        return NEG_INF
    mass = space.mass(pos)
    return sum((space.p[a] * phi[a] for a in pos), Fraction(0)) / mass


def _project(space: FilteredSpace, w: Mapping, mode: str) -> Process:
    out = {}
    for t in space.times:
        part = space.partition_for(mode, t)
        out.update(((t, a), v) for a, v in cond_exp(space, part, {a: w[t, a] for a in space.atoms}).items())
    return out


def optional_projection_process(space: FilteredSpace, w: Mapping) -> Process:
    return _project(space, w, "optional")


def predictable_projection_process(space: FilteredSpace, w: Mapping) -> Process:
    return _project(space, w, "predictable")


def project_process(space: FilteredSpace, w: Mapping, mode: str) -> Process:
    return _project(space, w, check_mode(mode))


def is_adapted(space: FilteredSpace, w: Mapping, mode: str = "optional") -> bool:
    """Time-t slice constant on cells (of t, or of t-1 in predictable mode)."""
    return all(
        is_constant_on_cells(space.partition_for(mode, t), {a: w[t, a] for a in space.atoms})
        for t in space.times
    )


def equal_off_null(space: FilteredSpace, a: Mapping, b: Mapping) -> bool:
    """Compare two ``(t, atom)``-keyed tables, ignoring null atoms."""
    return all(a[t, x] == b[t, x] for t in space.times for x in space.positive_atoms)


# ---------------------------------------------------------------------------
# stopping times


def is_stopping_time(space: FilteredSpace, tau: Mapping[Atom, object]) -> bool:
    if not _valid_times(space, tau):
        return False
    return all(
        is_measurable(space.partition(t), [a for a in space.atoms if tau[a] <= t])
        for t in space.times
    )


def is_predictable_time(space: FilteredSpace, tau: Mapping[Atom, object]) -> bool:
    if not is_stopping_time(space, tau):
        return False
    return all(
        is_measurable(space.predictable_partition(t), [a for a in space.atoms if tau[a] == t])
        for t in space.times
    )


def _valid_times(space: FilteredSpace, tau) -> bool:
    for a in space.atoms:
        v = tau.get(a, None)
        if v is INF:
            continue
        if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v <= space.horizon:
            return False
    return True


def count_stopping_times(space: FilteredSpace, predictable_only: bool = False) -> int:
    """Number of (predictable) stopping times, computed on the information tree."""
    T = space.horizon

    if not predictable_only:
        @lru_cache(maxsize=None)
        def n_opt(t: int, cell: Cell) -> int:
            if t == T:
                return 2
            children = [c for c in space.partition(t + 1) if c[0] in cell]
            prod = 1
            for c in children:
                prod *= n_opt(t + 1, c)
            return 1 + prod

        total = 1
        for cell in space.partition(0):
            total *= n_opt(0, cell)
        return total

    # predictable: at time t a cell of the partition at t-1 may stop
    @lru_cache(maxsize=None)
    def n_pred(t: int, cell: Cell) -> int:
        # number of ways to assign {t, ..., T, inf} on ``cell`` (a cell at max(t-1, 0))
        if t > T:
            return 1
        stop_here = 1
        children = [c for c in space.partition(t) if c[0] in cell] if t > 0 else [cell]
        prod = 1
        for c in children:
            prod *= n_pred(t + 1, c)
        return stop_here + prod

    total = 1
    for cell in space.partition(0):
        total *= n_pred(0, cell)
    return total


def enumerate_stopping_times(space: FilteredSpace, predictable_only: bool = False,
                             cap: int = DEFAULT_CAP) -> List[StoppingTime]:
    """Every (predictable) stopping time with values in {0..T, inf}."""
    n = count_stopping_times(space, predictable_only)
    if n > cap:
        raise InstanceTooLarge(f"instance too large: {n} stopping times exceed cap {cap}")
    T = space.horizon
    results: List[StoppingTime] = []

    def rec(t: int, alive: Tuple[Cell, ...], tau: Dict[Atom, object]):
        # ``alive``: cells (of the partition that decides stopping at t) not yet stopped
        if t > T:
            final = dict(tau)
            for cell in alive:
                for a in cell:
                    final[a] = INF
            results.append(final)
            return
        for mask in itertools.product((False, True), repeat=len(alive)):
            nxt = dict(tau)
            rest = []
            for stop, cell in zip(mask, alive):
                if stop:
                    for a in cell:
                        nxt[a] = t
                else:
                    rest.append(cell)
            rest_atoms = {a for c in rest for a in c}
            if predictable_only:
                cells = [c for c in space.partition(t) if c[0] in rest_atoms]
            else:
                cells = [c for c in space.partition(t + 1) if c[0] in rest_atoms] if t < T else rest
            rec(t + 1, tuple(cells), nxt)

    first = space.partition(0)
    rec(0, tuple(first), {})
    return results


# ---------------------------------------------------------------------------
# sigma-algebras at stopping times


def _partition_from_generators(space: FilteredSpace, generators: Iterable[Iterable[Atom]]) -> Partition:
    gens = [frozenset(g) for g in generators]
    sig: Dict[Tuple[bool, ...], List[Atom]] = {}
    for a in space.atoms:
        sig.setdefault(tuple(a in g for g in gens), []).append(a)
    return space.check_partition(sig.values())


def sigma_at(space: FilteredSpace, tau: Mapping[Atom, object]) -> Partition:
    """Atoms of the information at ``tau``: sets ``A`` with ``A & {tau <= t}`` known at t."""
    if not is_stopping_time(space, tau):
        raise StructureError("sigma_at requires a stopping time")
    gens = []
    for t in space.times:
        for cell in space.partition(t):
            gens.append([a for a in cell if tau[a] == t])
    for cell in space.partition(space.horizon):
        gens.append([a for a in cell if tau[a] is INF])
    return _partition_from_generators(space, gens)


def sigma_before(space: FilteredSpace, tau: Mapping[Atom, object]) -> Partition:
    """Information strictly before ``tau``: generated by time 0 and ``A & {t < tau}``."""
    if not is_stopping_time(space, tau):
        raise StructureError("sigma_before requires a stopping time")
    gens = [list(c) for c in space.partition(0)]
    for t in space.times:
        for cell in space.partition(t):
            gens.append([a for a in cell if tau[a] > t])
    return _partition_from_generators(space, gens)


def sample_at(w: Mapping, tau: Mapping[Atom, object]) -> Dict[Atom, ExtReal]:
    """``w_tau`` on ``{tau < inf}``."""
    return {a: w[t, a] for a, t in tau.items() if t is not INF}


def _expect_on(space: FilteredSpace, atoms: Iterable[Atom], values: Mapping[Atom, ExtReal]) -> ExtReal:
    """``E[1_F X]`` under the convention (null atoms contribute 0)."""
    terms = []
    for a in atoms:
        pa = space.p[a]
        if pa == 0:
            continue
        v = values[a]
        terms.append(v if isinstance(v, Infinity) else pa * v)
    return ext_sum(terms)


@lru_cache(maxsize=64)
def stopping_time_probes(space: FilteredSpace, mode: str, cap: int = DEFAULT_CAP,
                         bounded: bool = False):
    """``(tau, partition)`` pairs: every (predictable) time with its sigma-algebra.

    With ``bounded`` only times finite on every positive-probability atom are kept.
    """
    check_mode(mode)
    taus = enumerate_stopping_times(space, predictable_only=(mode == "predictable"), cap=cap)
    probes = []
    for tau in taus:
        if bounded and any(tau[a] is INF for a in space.positive_atoms):
            continue
        sig = sigma_at(space, tau) if mode == "optional" else sigma_before(space, tau)
        probes.append((tau, sig))
    return tuple(probes)


def find_projection_violation(space: FilteredSpace, w: Mapping, candidate: Mapping, mode: str,
                              cap: int = DEFAULT_CAP, probes=None):
    """First ``(tau, cell)`` where the defining identity fails, or ``None``."""
    if probes is None:
        probes = stopping_time_probes(space, mode, cap)
    for tau, sig in probes:
        for cell in sig:
            stopped = [a for a in cell if tau[a] is not INF]
            if not stopped:
                continue
            lhs = _expect_on(space, stopped, {a: candidate[tau[a], a] for a in stopped})
            rhs = _expect_on(space, stopped, {a: w[tau[a], a] for a in stopped})
            if lhs != rhs:
                return tau, cell
    return None


def verify_projection_property(space: FilteredSpace, w: Mapping, candidate: Mapping,
                               mode: str = "optional", cap: int = DEFAULT_CAP, probes=None) -> bool:
    """Check ``E[1_F 1_{tau<inf} candidate_tau] = E[1_F 1_{tau<inf} w_tau]`` for all probes.

    The candidate must also be adapted in the given mode.
    """
    if not is_adapted(space, candidate, mode):
        return False
    return find_projection_violation(space, w, candidate, mode, cap, probes) is None


# ---------------------------------------------------------------------------
# event sets


def is_evanescent(space: FilteredSpace, events: Iterable[Tuple[int, Atom]]) -> bool:
    return all(space.p[a] == 0 for _, a in events)


def projection_to_omega(events: Iterable[Tuple[int, Atom]]) -> FrozenSet[Atom]:
    return frozenset(a for _, a in events)


def is_adapted_set(space: FilteredSpace, events: Iterable[Tuple[int, Atom]], mode: str = "optional") -> bool:
    events = set(events)
    return all(
        is_measurable(space.partition_for(mode, t), [a for a in space.atoms if (t, a) in events])
        for t in space.times
    )


def debut(space: FilteredSpace, events: Iterable[Tuple[int, Atom]], mode: str = "optional") -> StoppingTime:
    """First entry time of an adapted (or predictably adapted) event set."""
    events = set(events)
    if not is_adapted_set(space, events, mode):
        raise StructureError(f"debut requires a {mode}ly adapted set")
    tau = {}
    for a in space.atoms:
        hits = [t for t in space.times if (t, a) in events]
        tau[a] = min(hits) if hits else INF
    return tau

