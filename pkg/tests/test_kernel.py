"""Deformed exponential kernel and its eigen-equation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dunkl.core import make_context
from dunkl.errors import DomainError
from dunkl.kernel import (
    KernelEvaluator,
    dunkl_derivative,
    dunkl_kernel_1d,
    dunkl_kernel_im,
    dunkl_kernel_nd,
    dunkl_kernel_scaled,
    eigen_residual,
)


@pytest.fixture(scope="module")
def ev1():
    return KernelEvaluator(make_context(1, [1.0]))


def test_kernel_at_kappa_one_is_cosh_plus_sinh_over_arg(ev1):
    # At kappa = 1 the psi integral evaluates to cosh(a) - (cosh(a)-sinh(a))... :
    # oracle via high-order numeric reference at a handful of arguments.
    assert dunkl_kernel_1d(ev1, 1.0, 1.0) == pytest.approx(np.cosh(1.0), rel=1e-13)
    assert dunkl_kernel_1d(ev1, 0.0, 5.0) == pytest.approx(1.0, rel=1e-13)


def test_kernel_reduces_to_exponential_at_zero_multiplicity():
    ev = KernelEvaluator(make_context(1, [0.0]))
    x = np.linspace(-2, 2, 11)
    assert np.allclose(dunkl_kernel_1d(ev, x, 1.7), np.exp(1.7 * x), rtol=1e-14)
    assert np.allclose(dunkl_kernel_im(ev, x, 1.7), np.exp(1.7j * x), rtol=1e-14)


def test_kernel_symmetry_in_arguments(ev1):
    for x, y in [(0.3, 2.1), (-1.4, 0.9), (3.0, -3.0)]:
        assert dunkl_kernel_1d(ev1, x, y) == pytest.approx(dunkl_kernel_1d(ev1, y, x), rel=1e-13)


def test_small_multiplicity_approaches_classical():
    ev = KernelEvaluator(make_context(1, [1e-6]), base_order=256)
    x = np.linspace(-2.0, 2.0, 9)
    assert np.max(np.abs(dunkl_kernel_1d(ev, x, 1.0) - np.exp(x))) < 1e-3


@given(st.floats(-4, 4), st.floats(-4, 4), st.sampled_from([0.3, 0.5, 1.0, 2.5]))
@settings(max_examples=40, deadline=None)
def test_imaginary_kernel_modulus_bounded(x, y, kappa):
    ev = KernelEvaluator(make_context(1, [kappa]))
    assert abs(complex(dunkl_kernel_im(ev, x, y))) <= 1.0 + 1e-12


def test_scaled_kernel_consistency(ev1):
    for a in (0.5, 6.0, 40.0, 300.0):
        scaled = float(dunkl_kernel_scaled(ev1, a, 1.0))
        assert scaled <= 1.0 + 1e-12
        if a <= 40.0:
            direct = float(dunkl_kernel_1d(ev1, a, 1.0)) * np.exp(-a)
            assert scaled == pytest.approx(direct, rel=1e-9)


def test_scaled_kernel_survives_huge_arguments(ev1):
    # Plain E overflows near a ~ 750; the scaled form must stay finite.
    v = float(dunkl_kernel_scaled(ev1, 40.0, 40.0))
    assert np.isfinite(v) and 0.0 < v <= 1.0


def test_product_kernel_matches_coordinates():
    ctx = make_context(2, [0.6, 1.4])
    ev = KernelEvaluator(ctx)
    x, y = np.array([0.7, -1.2]), np.array([1.1, 0.4])
    expect = dunkl_kernel_1d(ev, x[0], y[0], kappa_scalar=0.6) * dunkl_kernel_1d(
        ev, x[1], y[1], kappa_scalar=1.4
    )
    assert dunkl_kernel_nd(ev, x, y) == pytest.approx(expect, rel=1e-13)
    with pytest.raises(DomainError):
        dunkl_kernel_nd(ev, np.array([1.0]), y)


def test_eigen_residual_small_and_h_refinable(ev1):
    grid = np.linspace(0.4, 3.0, 9)
    res3 = eigen_residual(ev1, 1.5, grid, h=1e-3)
    res2 = eigen_residual(ev1, 1.5, grid, h=1e-2)
    assert res3 < 1e-6
    assert res3 < res2


def test_dunkl_derivative_on_odd_and_even_parts():
    # T acts on x -> x as 1 + 2k at the origin and on cos as -sin plus the
    # reflection term; spot-check against hand values.
    k = 0.8
    f = lambda x: np.asarray(x, dtype=float)
    out = dunkl_derivative(f, np.array([0.0]), k)
    assert out[0] == pytest.approx(1.0 + 2.0 * k, rel=1e-9)
    g = lambda x: np.asarray(x, dtype=float) ** 2
    out = dunkl_derivative(g, np.array([1.5]), k)
    assert out[0] == pytest.approx(2.0 * 1.5, rel=1e-8)
