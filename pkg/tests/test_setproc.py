import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from support import rand_interval_process, rand_space, small_spaces
from optproj import oracle
from optproj import plconvex as plc
from optproj.extreal import INF, NEG_INF
from optproj.filtration import project_process
from optproj.integrand import PreconditionError
from optproj.plconvex import Interval
from optproj.setproc import (
    conditional_expectation_set,
    find_subset_violation,
    has_T_integrable_selection,
    is_adapted_set_process,
    is_subset,
    optional_projection_set,
    predictable_projection_set,
    project_set,
    selection_membership,
    subset_via_stopping_times,
    support_integrand,
    verify_via_bst,
)

seeds = st.integers(min_value=0, max_value=10**9)
TWO, THREE, NULLS = small_spaces()
WHOLE_TIME0 = (("w1", "w2"),)


def const(space, s):
    return {(t, a): s for t in space.times for a in space.atoms}


def pair(first, second):
    return {(0, "w1"): first, (0, "w2"): second, (1, "w1"): first, (1, "w2"): second}


def test_support_integrand_examples():
    assert support_integrand(const(TWO, Interval(-1, 1)))[0, "w1"] == plc.abs_value(0)
    assert support_integrand(const(TWO, Interval(0, 0)))[1, "w2"] == plc.affine(0)
    half = support_integrand(const(TWO, Interval(0, INF)))[0, "w1"]
    assert plc.evaluate(half, -1) == 0 and plc.evaluate(half, 1) is INF


@pytest.mark.parametrize("mode", ["optional", "predictable"])
def test_projection_examples(mode):
    out = project_set(TWO, pair(Interval(0, 1), Interval(2, 4)), mode)
    assert out[0, "w1"] == Interval(1, F(5, 2))
    up = project_set(TWO, pair(Interval(0, INF), Interval(-3, INF)), mode)
    assert all(s.hi is INF for s in up.values())
    w = {(0, "w1"): F(1), (0, "w2"): F(3), (1, "w1"): F(1), (1, "w2"): F(3)}
    single = project_set(TWO, {k: Interval(v, v) for k, v in w.items()}, mode)
    pw = project_process(TWO, w, mode)
    assert single == {k: Interval(v, v) for k, v in pw.items()}


def test_projection_needs_a_selection():
    with pytest.raises(PreconditionError):
        optional_projection_set(TWO, pair(Interval(0, 1), Interval.empty()))
    gamma = const(NULLS, Interval(0, 1))
    gamma[1, "z"] = Interval.empty()
    assert optional_projection_set(NULLS, gamma)[1, "z"] == Interval(0, 0)


def test_integrable_selection_witness():
    ok, w = has_T_integrable_selection(TWO, const(TWO, Interval(0, 1)))
    assert ok and set(w.values()) == {0}
    ok, w = has_T_integrable_selection(TWO, const(TWO, Interval(NEG_INF, -3)))
    assert ok and set(w.values()) == {-3}
    ok, w = has_T_integrable_selection(TWO, pair(Interval(0, 1), Interval.empty()))
    assert not ok and w is None


def test_conditional_expectation_set_examples():
    sets = {"w1": Interval(0, 1), "w2": Interval(2, 4)}
    out = conditional_expectation_set(TWO, sets, WHOLE_TIME0)
    assert out == {"w1": Interval(1, F(5, 2)), "w2": Interval(1, F(5, 2))}
    same = conditional_expectation_set(TWO, {"w1": Interval(0, 1), "w2": Interval(0, 1)}, WHOLE_TIME0)
    assert same["w2"] == Interval(0, 1)
    pts = conditional_expectation_set(TWO, {"w1": Interval(1, 1), "w2": Interval(2, 2)}, WHOLE_TIME0)
    assert pts["w1"] == Interval(F(3, 2), F(3, 2))
    with pytest.raises(PreconditionError):
        conditional_expectation_set(TWO, {"w1": Interval.empty(), "w2": Interval(0, 1)}, WHOLE_TIME0)


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_endpoint_support_and_selection_hull_agree(seed):
    rng = random.Random(seed)
    space = rand_space(rng)
    gamma = rand_interval_process(rng, space)
    for mode in ("optional", "predictable"):
        endpoint = project_set(space, gamma, mode)
        assert project_set(space, gamma, mode, method="support") == endpoint
        brute = oracle.brute_set_projection(space, gamma, mode)
        assert all(endpoint[k] == brute[k] for k in endpoint if space.p[k[1]] > 0)
        assert is_adapted_set_process(space, endpoint, mode)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_projection_is_certified_by_bounded_stopping_times(seed):
    rng = random.Random(seed)
    space = rand_space(rng, max_atoms=3, max_horizon=2, allow_null=False)
    gamma = rand_interval_process(rng, space, unbounded=False)
    mode = rng.choice(["optional", "predictable"])
    proj = project_set(space, gamma, mode)
    assert verify_via_bst(space, gamma, proj, mode)
    # widen one fiber on a whole cell so the candidate stays adapted
    t = rng.choice(list(space.times))
    cell = rng.choice(space.partition_for(mode, t))
    widened = dict(proj)
    for a in cell:
        widened[t, a] = Interval(proj[t, a].lo - 1, proj[t, a].hi)
    assert not verify_via_bst(space, gamma, widened, mode)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_projection_is_monotone_and_idempotent(seed):
    rng = random.Random(seed)
    space = rand_space(rng)
    inner = rand_interval_process(rng, space, unbounded=False)
    outer = {k: Interval(s.lo - rng.randint(0, 2), s.hi + rng.randint(0, 2)) for k, s in inner.items()}
    for mode in ("optional", "predictable"):
        p_in, p_out = project_set(space, inner, mode), project_set(space, outer, mode)
        assert is_subset(space, p_in, p_out)
        adapted = rand_interval_process(rng, space, adapted=mode)
        again = project_set(space, adapted, mode)
        assert all(again[k] == adapted[k] for k in adapted if space.p[k[1]] > 0)


def test_subset_examples():
    gamma = const(THREE, Interval(0, 2))
    assert is_subset(THREE, gamma, gamma) and subset_via_stopping_times(THREE, gamma, gamma)
    bigger = dict(gamma)
    for a in THREE.atoms:
        bigger[2, a] = Interval(0, 3)
    assert not is_subset(THREE, bigger, gamma)
    tau = find_subset_violation(THREE, bigger, gamma)
    assert tau is not None and 2 in tau.values()
    on_null = const(NULLS, Interval(0, 1))
    wide = dict(on_null)
    wide[1, "z"] = Interval(-5, 5)
    assert is_subset(NULLS, wide, on_null) and subset_via_stopping_times(NULLS, wide, on_null)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_fiberwise_and_stopping_time_inclusion_agree(seed):
    rng = random.Random(seed)
    space = rand_space(rng, max_atoms=3, max_horizon=2)
    mode = rng.choice(["optional", "predictable"])
    outer = rand_interval_process(rng, space, adapted=mode)
    inner = rand_interval_process(rng, space, adapted=mode)
    if rng.random() < 0.5:
        inner = {k: s.intersect(outer[k]) for k, s in inner.items()}
    assert is_subset(space, inner, outer) == subset_via_stopping_times(space, inner, outer, mode)


def test_subset_via_stopping_times_needs_adapted_inputs():
    gamma = pair(Interval(0, 1), Interval(0, 1))
    gamma[0, "w2"] = Interval(0, 2)
    with pytest.raises(PreconditionError):
        subset_via_stopping_times(TWO, gamma, gamma)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_projected_selections_stay_in_the_set(seed):
    rng = random.Random(seed)
    space = rand_space(rng)
    mode = rng.choice(["optional", "predictable"])
    gamma = rand_interval_process(rng, space, adapted=mode, unbounded=False)
    w = {k: rng.choice([s.lo, s.hi, (s.lo + s.hi) / 2]) for k, s in gamma.items()}
    assert selection_membership(space, gamma, w, mode)


def test_selection_membership_rejects_non_selections():
    gamma = const(TWO, Interval(0, 1))
    assert selection_membership(TWO, gamma, pair(F(0), F(1)))
    with pytest.raises(PreconditionError):
        selection_membership(TWO, gamma, pair(F(0), F(2)))


def test_predictable_wrapper_uses_the_previous_partition():
    out = predictable_projection_set(TWO, pair(Interval(0, 1), Interval(2, 4)))
    assert out[1, "w1"] == Interval(1, F(5, 2))
    assert optional_projection_set(TWO, pair(Interval(0, 1), Interval(2, 4)))[1, "w1"] == Interval(0, 1)
