import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from support import rand_interval_process, rand_space, small_spaces
from optproj.extreal import INF
from optproj.filtration import StructureError, enumerate_stopping_times, is_predictable_time
from optproj.plconvex import Interval
from optproj.sections import find_section, optional_section, predictable_section, verify_section

seeds = st.integers(min_value=0, max_value=10**9)
TWO, THREE, NULLS = small_spaces()


def const(space, s):
    return {(t, a): s for t in space.times for a in space.atoms}


@pytest.mark.parametrize("finder", [optional_section, predictable_section])
def test_nonempty_everywhere_stops_at_once(finder):
    gamma = const(THREE, Interval(2, 5))
    tau, w = finder(THREE, gamma)
    assert set(tau.values()) == {0}
    assert set(w.values()) == {2}
    assert verify_section(THREE, gamma, tau, w)


@pytest.mark.parametrize("finder", [optional_section, predictable_section])
def test_empty_domain_never_stops(finder):
    gamma = const(THREE, Interval.empty())
    tau, w = finder(THREE, gamma)
    assert set(tau.values()) == {INF}
    assert verify_section(THREE, gamma, tau, w)


def test_late_domain_on_one_cell():
    gamma = const(THREE, Interval.empty())
    gamma[2, "d"] = Interval(-4, -1)
    tau, w = optional_section(THREE, gamma)
    assert tau == {"u": INF, "m": INF, "d": 2}
    assert w[2, "d"] == -1
    assert verify_section(THREE, gamma, tau, w, "optional")
    # the event {d} at time 2 is already known at time 1, so it is predictable too
    ptau, pw = predictable_section(THREE, gamma)
    assert ptau == tau and verify_section(THREE, gamma, ptau, pw, "predictable")


def test_event_sets_are_accepted():
    events = {(1, "u"), (1, "m"), (2, "u")}
    sec = optional_section(THREE, events, eps=F(1, 10))
    assert sec.tau == {"u": 1, "m": 1, "d": INF}
    assert sec.eps == F(1, 10)


def test_non_adapted_input_is_rejected():
    gamma = const(THREE, Interval(0, 1))
    gamma[1, "u"] = Interval(0, 2)
    with pytest.raises(StructureError):
        optional_section(THREE, gamma)
    with pytest.raises(StructureError):
        predictable_section(THREE, const(THREE, Interval.empty()) | {(2, "u"): Interval(0, 1)})


def test_verify_section_rejects_bad_candidates():
    gamma = const(THREE, Interval.empty())
    gamma[2, "d"] = Interval(0, 1)
    tau, w = optional_section(THREE, gamma)
    assert not verify_section(THREE, gamma, {**tau, "d": 1}, w)
    assert not verify_section(THREE, gamma, tau, {**w, (2, "d"): F(3)})
    assert not verify_section(THREE, gamma, {**tau, "d": INF}, w)


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_random_sections_have_full_mass(seed):
    rng = random.Random(seed)
    space = rand_space(rng)
    for mode in ("optional", "predictable"):
        gamma = rand_interval_process(rng, space, empty_ok=True, adapted=mode)
        tau, w = find_section(space, gamma, mode)
        assert verify_section(space, gamma, tau, w, mode)
        if mode == "predictable":
            assert is_predictable_time(space, tau)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_no_stopping_time_inside_the_domain_does_better(seed):
    rng = random.Random(seed)
    space = rand_space(rng, max_atoms=3, max_horizon=2)
    gamma = rand_interval_process(rng, space, empty_ok=True, adapted="optional")
    tau, _ = optional_section(space, gamma)
    pos = space.positive_atoms
    best = space.mass(a for a in pos if tau[a] is not INF)
    for other in enumerate_stopping_times(space):
        if all(other[a] is INF or not gamma[other[a], a].is_empty for a in pos):
            assert space.mass(a for a in pos if other[a] is not INF) <= best
