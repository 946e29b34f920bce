import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from support import rand_integrand, rand_process, rand_space, small_spaces
from optproj import oracle
from optproj import plconvex as plc
from optproj.extreal import INF, NEG_INF
from optproj.filtration import FilteredSpace, StructureError, project_process
from optproj.integrand import (
    DEFAULT_LADDER,
    ZERO_FN,
    ConvexIntegrand,
    GridIntegrand,
    PreconditionError,
    affine_reparam_projection,
    check_class_D,
    check_class_P,
    conditional_expectation_integrand,
    evaluate_along,
    is_projectable,
    ladder_projection,
    lipschitz_constant,
    monotone_sup_projection,
    optional_projection_grid,
    predictable_projection_grid,
    project_convex,
    sample_on_grid,
)
from optproj.plconvex import Interval

seeds = st.integers(min_value=0, max_value=10**9)
TWO, THREE, NULLS = small_spaces()


def mixed_infinity_grid(alpha):
    # one-period space, three equally likely atoms, grid {-1, 0, 1}
    space = FilteredSpace(("a", "b", "c"), (F(1, 3),) * 3, ((("a", "b", "c"),),))
    rows = {
        (0, "a"): (NEG_INF, F(0), INF),
        (0, "b"): (INF, F(3 * alpha), NEG_INF),
        (0, "c"): (F(0), F(0), F(0)),
    }
    return space, GridIntegrand((F(-1), F(0), F(1)), rows)


@pytest.mark.parametrize("alpha", [-1, 0, 1])
def test_grid_projection_with_infinite_values(alpha):
    space, h = mixed_infinity_grid(alpha)
    out = optional_projection_grid(space, h)
    for a in space.atoms:
        assert out[0, a] == (INF, F(alpha), INF)


def test_grid_projection_matches_cell_averages():
    g = GridIntegrand((F(0), F(1)), {
        (0, "w1"): (F(1), F(2)), (0, "w2"): (F(3), F(4)),
        (1, "w1"): (F(1), F(2)), (1, "w2"): (F(3), F(4)),
    })
    opt = optional_projection_grid(TWO, g)
    assert opt[0, "w1"] == (F(2), F(3))
    assert opt[1, "w1"] == (F(1), F(2))
    pred = predictable_projection_grid(TWO, g)
    assert pred[1, "w2"] == (F(2), F(3))
    assert pred[0, "w2"] == (F(2), F(3))


def test_grid_rejects_bad_shapes():
    with pytest.raises(StructureError):
        GridIntegrand((F(1), F(0)), {})
    with pytest.raises(StructureError):
        GridIntegrand((F(0), F(1)), {(0, "w1"): (F(0),)})


def test_convex_projection_averages_fibers():
    h = ConvexIntegrand({
        (0, "w1"): plc.abs_value(0), (0, "w2"): plc.abs_value(2),
        (1, "w1"): plc.affine(1), (1, "w2"): plc.affine(-1),
    })
    out = project_convex(TWO, h)
    assert out[1, "w1"] == plc.affine(1)
    f = out[0, "w2"]
    assert [plc.evaluate(f, x) for x in (0, 1, 2, 3)] == [1, 1, 1, 2]
    pred = project_convex(TWO, h, "predictable")
    assert pred[1, "w1"] == plc.affine(0)


def test_null_atoms_get_the_zero_function():
    h = ConvexIntegrand({(t, a): plc.abs_value(1) for t in NULLS.times for a in NULLS.atoms})
    out = project_convex(NULLS, h)
    assert out[0, "z"] == ZERO_FN
    assert out[1, "z"] == ZERO_FN
    assert out[0, "x"] == plc.abs_value(1)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_convex_projection_matches_grid_projection(seed):
    rng = random.Random(seed)
    space = rand_space(rng)
    h = rand_integrand(rng, space, "full")
    grid = [F(k, 2) for k in range(-8, 9)]
    for mode in ("optional", "predictable"):
        direct = sample_on_grid(project_convex(space, h, mode), grid)
        via_grid = (optional_projection_grid if mode == "optional" else predictable_projection_grid)(
            space, sample_on_grid(h, grid))
        for k, row in direct.values.items():
            if space.p[k[1]] > 0:
                assert row == via_grid[k]


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_ladder_agrees_with_direct_projection_on_the_last_box(seed):
    rng = random.Random(seed)
    space = rand_space(rng, max_atoms=3, max_horizon=2)
    h = rand_integrand(rng, space, "any")
    mode = rng.choice(["optional", "predictable"])
    steps = ladder_projection(space, h, mode)
    direct = project_convex(space, h, mode)
    for box, step in zip(DEFAULT_LADDER, steps):
        for k, f in step.fibers.items():
            assert f == plc.restrict(direct[k] if space.p[k[1]] > 0 else ZERO_FN, box)


def test_class_checks():
    space, h = mixed_infinity_grid(0)
    bad = check_class_D(space, h)
    assert not bad and bad.violations == [(0, "a"), (0, "b")]
    fine = GridIntegrand((F(0),), {(0, a): (F(1),) for a in space.atoms})
    assert check_class_P(space, fine)
    convex = ConvexIntegrand({(t, a): plc.affine(5) for t in TWO.times for a in TWO.atoms})
    wit = check_class_D(TWO, convex)
    assert wit and len(wit.boxes) == len(DEFAULT_LADDER)
    assert wit.minorants[0][0, "w1"] == -5


def test_evaluate_along_and_projectability():
    space, h = mixed_infinity_grid(1)
    w = {(0, a): F(-1) for a in space.atoms}
    assert evaluate_along(space, h, w) == {(0, "a"): NEG_INF, (0, "b"): INF, (0, "c"): 0}
    assert not is_projectable(space, h, w)
    w0 = {(0, a): F(0) for a in space.atoms}
    assert is_projectable(space, h, w0)
    with pytest.raises(StructureError):
        evaluate_along(space, h, {(0, a): F(1, 2) for a in space.atoms})
    with pytest.raises(PreconditionError):
        is_projectable(space, h, {(0, "a"): F(0), (0, "b"): F(1), (0, "c"): F(0)})


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_projection_commutes_with_evaluation_along_adapted_processes(seed):
    rng = random.Random(seed)
    space = rand_space(rng)
    h = rand_integrand(rng, space, "full")
    for mode in ("optional", "predictable"):
        w = rand_process(rng, space, adapted=mode)
        lhs = project_process(space, evaluate_along(space, h, w), mode)
        rhs = evaluate_along(space, project_convex(space, h, mode), w)
        assert all(lhs[k] == rhs[k] for k in lhs if space.p[k[1]] > 0)


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_projection_satisfies_the_defining_identity(seed):
    rng = random.Random(seed)
    space = rand_space(rng, max_atoms=3, max_horizon=1)
    h = rand_integrand(rng, space, "full")
    grid = (F(-1), F(0), F(1))
    assert oracle.brute_projection_defn(space, h, project_convex(space, h), "optional", grid=grid)


def test_affine_reparametrization():
    h = ConvexIntegrand({(t, a): plc.abs_value(t) for t in THREE.times for a in THREE.atoms})
    B = {(t, a): F(2) for t in THREE.times for a in THREE.atoms}
    b = {(t, a): F(-1) for t in THREE.times for a in THREE.atoms}
    lhs, rhs = affine_reparam_projection(THREE, h, B, b)
    assert lhs.fibers == rhs.fibers
    with pytest.raises(PreconditionError):
        affine_reparam_projection(THREE, h, {k: F(0) for k in B}, b)
    nonadapted = dict(B)
    nonadapted[1, "u"] = F(3)
    with pytest.raises(PreconditionError):
        affine_reparam_projection(THREE, h, nonadapted, b)


def test_monotone_chain():
    base = [plc.shift(plc.abs_value(0), -k) for k in (3, 2, 1)]
    chain = [ConvexIntegrand({(t, a): f for t in TWO.times for a in TWO.atoms}) for f in base]
    sup_proj, proj_sup = monotone_sup_projection(TWO, chain)
    assert sup_proj.fibers == proj_sup.fibers
    with pytest.raises(PreconditionError):
        monotone_sup_projection(TWO, chain[::-1])


def test_lipschitz_constant_and_conditional_expectation():
    h = ConvexIntegrand({(0, "w1"): plc.abs_value(0, 3), (0, "w2"): plc.affine(-1),
                         (1, "w1"): plc.affine(0), (1, "w2"): plc.affine(2)})
    assert lipschitz_constant(TWO, h) == 3
    walled = ConvexIntegrand({**h.fibers, (1, "w2"): plc.indicator(Interval(0, 1))})
    assert lipschitz_constant(TWO, walled) is INF
    ce = conditional_expectation_integrand(TWO, h, ((("w1", "w2"),)))
    assert ce[1, "w1"] == plc.affine(1)
