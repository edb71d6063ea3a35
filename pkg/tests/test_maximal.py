"""Ball averages, maximal functions, and the two numerical experiments."""

import numpy as np
import pytest

from dunkl.core import line_rule, make_context
from dunkl.errors import DomainError
from dunkl.maximal import (
    ExperimentRecord,
    FunctionSequence,
    RadiusGrid,
    ball_average,
    counterexample_lower_bound,
    counterexample_run,
    dyadic_block,
    dyadic_sequence,
    fs_apply,
    layer_cake_defect,
    maximal_on_grid,
    scalar_maximal,
    strong_norm_ratio,
    weak_constant_estimate,
)

INDICATOR = lambda y: (np.abs(np.asarray(y, dtype=float)) <= 1.0).astype(float)
ONE = lambda y: np.ones_like(np.asarray(y, dtype=float))


@pytest.fixture(scope="module")
def ctx():
    return make_context(1, [0.7])


@pytest.fixture(scope="module")
def rg():
    return RadiusGrid(0.02, 8.0, 1.05)


def test_average_of_constant_is_one(ctx, rg):
    for x in (0.0, 0.5, 2.0):
        for r in (0.3, 1.0, 4.0):
            assert ball_average(ctx, ONE, x, r) == pytest.approx(1.0, abs=1e-9)
    assert scalar_maximal(ctx, ONE, 1.3, rg) == pytest.approx(1.0, abs=1e-9)


def test_classical_indicator_value():
    # With a trivial weight the maximal function of the unit-interval
    # indicator equals 1/(1+|x|) outside the interval; at x=2 the supremum
    # is attained at r=3 exactly.
    ctx0 = make_context(1, [0.0])
    rg = RadiusGrid(0.05, 8.0, 1.01)
    m = scalar_maximal(ctx0, INDICATOR, 2.0, rg, breakpoints=(1.0,), extra_radii=(3.0,))
    assert m == pytest.approx(1.0 / 3.0, rel=1e-8)


def test_sublinearity_and_homogeneity(ctx, rg):
    f = lambda y: np.exp(-np.asarray(y) ** 2)
    g = lambda y: 1.0 / (1.0 + np.asarray(y) ** 2)
    for x in (0.0, 0.8, 2.5):
        mf = scalar_maximal(ctx, f, x, rg)
        mg = scalar_maximal(ctx, g, x, rg)
        ms = scalar_maximal(ctx, lambda y: f(y) + g(y), x, rg)
        assert ms <= mf + mg + 1e-9
        assert scalar_maximal(ctx, lambda y: 3.0 * f(y), x, rg) == pytest.approx(3.0 * mf, rel=1e-12)


def test_radius_grid_refinement_is_stable(ctx):
    coarse = RadiusGrid(0.05, 6.0, 1.1)
    f = lambda y: np.exp(-np.abs(np.asarray(y)))
    a = scalar_maximal(ctx, f, 0.6, coarse)
    b = scalar_maximal(ctx, f, 0.6, coarse.refined())
    assert abs(a - b) / b < 1e-3


def test_grid_helper_matches_pointwise(ctx, rg):
    xs = np.array([0.0, 0.7, 1.9])
    f = lambda y: np.exp(-np.asarray(y) ** 2)
    vals = maximal_on_grid(ctx, f, xs, rg)
    assert vals == pytest.approx([scalar_maximal(ctx, f, x, rg) for x in xs])


def test_validation_errors(ctx):
    with pytest.raises(DomainError):
        RadiusGrid(0.0, 1.0, 1.1)
    with pytest.raises(DomainError):
        RadiusGrid(2.0, 1.0, 1.1)
    with pytest.raises(DomainError):
        RadiusGrid(0.1, 1.0, 2.5)
    with pytest.raises(DomainError):
        FunctionSequence(members=(INDICATOR,), r_exponent=1.0, breakpoints=((1.0,),))
    with pytest.raises(DomainError):
        ExperimentRecord("bad", {}, float("nan"), 1.0, 1.0, {})
    xr = line_rule(0.7, 4.0)
    with pytest.raises(DomainError):
        weak_constant_estimate(ctx, lambda y: -ONE(y), np.array([0.5]), xr, RadiusGrid(0.1, 2.0, 1.2))
    with pytest.raises(DomainError):
        strong_norm_ratio(ctx, INDICATOR, 1.0, xr, RadiusGrid(0.1, 2.0, 1.2))


def test_classical_weak_and_strong_constants():
    # Trivial weight, unit-interval indicator: the maximal function is 1 on
    # the interval and 1/(1+|x|) outside, giving an L^2 ratio of sqrt(3/2)
    # and a normalized weak constant of 1 - lambda_min.
    ctx0 = make_context(1, [0.0])
    xr = line_rule(0.0, 200.0, nodes_per_panel=8, n_geometric=10, breakpoints=(1.0,), max_panel=2.0)
    rg = RadiusGrid(0.02, 400.0, 1.05)
    mf = maximal_on_grid(ctx0, INDICATOR, xr.nodes, rg, breakpoints=(1.0,))
    lam = np.linspace(0.05, 0.9, 18)
    weak = weak_constant_estimate(ctx0, INDICATOR, lam, xr, rg, mf=mf)
    # The level set {Mf > lambda_min} reaches |x| = 19, where the x grid is
    # coarse, so the boundary contributes a few percent of its measure.
    assert weak == pytest.approx(1.0 - lam[0], abs=5e-2)
    strong = strong_norm_ratio(ctx0, INDICATOR, 2.0, xr, rg, mf=mf)
    assert strong == pytest.approx(np.sqrt(1.5), abs=2e-2)


def test_dyadic_blocks_and_lower_bound(ctx):
    f, (lo, hi) = dyadic_block(3)
    assert (lo, hi) == (4.0, 8.0)
    ys = np.array([3.9, 4.0, 6.0, 7.99, 8.1])
    assert f(ys) == pytest.approx([0.0, 1.0, 1.0, 1.0, 0.0])
    # Closed-form lower bound for the maximal function of one block at 0.
    assert counterexample_lower_bound(1.0) == pytest.approx((1.0 - 2.0**-3) / 2.0**4)


def test_counterexample_experiment(ctx):
    rec = counterexample_run(ctx, 5, 2.0, np.array([0.0, 0.01]))
    assert rec.details["worst_margin"] >= -1e-6
    # The measured growth rate exceeds the lower-bound prediction because
    # the bound keeps only the nearest-shell contribution.
    assert rec.measured >= rec.bound_factor * (1.0 - 1e-6)


def test_fs_apply_consistency(ctx, rg):
    gauss = lambda y: np.exp(-np.asarray(y) ** 2)
    seq1 = FunctionSequence(members=(gauss,), r_exponent=2.0, breakpoints=((),))
    direct = scalar_maximal(ctx, gauss, 0.4, rg)
    assert fs_apply(ctx, seq1, 0.4, rg) == pytest.approx(direct, rel=1e-9)
    seq4 = FunctionSequence(members=(gauss,) * 4, r_exponent=2.0, breakpoints=((),) * 4)
    assert fs_apply(ctx, seq4, 0.4, rg) == pytest.approx(2.0 * direct, rel=1e-9)


def test_layer_cake_identity(ctx):
    xr = line_rule(0.7, 6.0)
    vals = np.exp(-np.abs(xr.nodes))
    w = xr.weights
    for phi, dphi in ((lambda t: t, lambda t: np.ones_like(t)),
                      (lambda t: np.expm1(0.5 * t), lambda t: 0.5 * np.exp(0.5 * t))):
        assert layer_cake_defect(phi, dphi, vals, w) < 1e-5


def test_dyadic_sequence_shape():
    seq = dyadic_sequence(4, 2.0)
    assert len(seq.members) == 4 and seq.r_exponent == 2.0
