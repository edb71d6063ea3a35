"""Generalized Gaussian, heat kernel and semigroup for the weighted measure,
plus the ergodic (time-averaged) maximal function and the ball-vs-heat
domination constants used in the constant-growth experiments.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .core import DunklContext, LineRule, gamma_fn, line_rule
from .errors import DomainError
from .kernel import KernelEvaluator, dunkl_kernel_scaled


def gaussian_qt(ctx: DunklContext, x, t: float):
    """The generalized Gaussian q_t(x) = c (2t)^(-d/2-gamma) e^(-|x|^2/4t);
    unit mass against the weighted measure."""
    if t <= 0:
        raise DomainError("t must be > 0")
    x = np.asarray(x, dtype=float)
    sq = x * x if ctx.d == 1 else np.sum(np.atleast_1d(x) ** 2, axis=-1)
    a = ctx.d / 2.0 + ctx.gamma
    return ctx.mehta_constant * (2.0 * t) ** (-a) * np.exp(-sq / (4.0 * t))


def sphere_slice_qt(ctx: DunklContext, t) -> float:
    """q_t restricted to the unit sphere: c (2t)^(-d/2-gamma) e^(-1/4t).

    A closed form per the constant-radius slice, not an integral.
    """
    t = np.asarray(t, dtype=float)
    a = ctx.d / 2.0 + ctx.gamma
    out = ctx.mehta_constant * (2.0 * t) ** (-a) * np.exp(-1.0 / (4.0 * t))
    return out if out.ndim else float(out)


def _slice_integral(ctx: DunklContext, t0: float) -> float:
    """int_0^{t0} of the sphere slice of q_t.

    The substitution u = 1/(4t) tames the essential singularity at t = 0:
    the integral becomes (c 2^a / 4) int_{1/(4 t0)}^inf u^(a-2) e^(-u) du.
    """
    a = ctx.d / 2.0 + ctx.gamma
    lo = 1.0 / (4.0 * t0)
    val, _ = integrate.quad(lambda u: u ** (a - 2.0) * np.exp(-u), lo, np.inf, limit=200)
    return ctx.mehta_constant * 2.0**a / 4.0 * val


def slice_integral_full(ctx: DunklContext) -> float:
    """int_0^inf of the sphere slice; finite only for d/2 + gamma > 1."""
    a = ctx.d / 2.0 + ctx.gamma
    if a <= 1.0:
        raise DomainError("full slice integral diverges for d/2 + gamma <= 1")
    return ctx.mehta_constant * 2.0**a / 4.0 * gamma_fn(a - 1.0)


def indicator_domination_ratio(ctx: DunklContext, t0: float) -> float:
    """Smallest C with 1/mu(B_1) <= (C/t0) int_0^{t0} (sphere slice of q_t) dt."""
    if t0 <= 0:
        raise DomainError("t0 must be > 0")
    avg = _slice_integral(ctx, t0) / t0
    return 1.0 / (ctx.unit_ball_measure * avg)


def pointwise_domination_ratio(ctx: DunklContext, t0: float) -> float:
    """Smallest C with 1/mu(B_1) <= C * (sphere slice of q_{t0})."""
    if t0 <= 0:
        raise DomainError("t0 must be > 0")
    return 1.0 / (ctx.unit_ball_measure * sphere_slice_qt(ctx, t0))


def cf1_inequality_check(ctx: DunklContext):
    """Tail bound on int_{1/(d+2g)}^inf of the sphere slice for d+2g >= 8.

    Returns (holds, margin) with margin = bound - integral.
    """
    n = ctx.homogeneity
    if n < 8.0:
        raise DomainError("requires d + 2*gamma >= 8")
    a = ctx.d / 2.0 + ctx.gamma
    tail = slice_integral_full(ctx) - _slice_integral(ctx, 1.0 / n)
    bound = ctx.mehta_constant * 2.0**a / 4.0 * (n / 4.0) ** (a - 1.0) * np.exp(-n / 4.0)
    return bool(tail <= bound), float(bound - tail)


# ---------------------------------------------------------------------------
# Semigroup on a quadrature grid (one-dimensional contexts).


@dataclass(frozen=True)
class HeatConfig:
    """Evaluation grid for the heat operator over the weighted line.

    Immutable; the grid truncation radius must keep the Gaussian mass defect
    negligible at the smallest time used.
    """

    ctx: DunklContext
    evaluator: KernelEvaluator
    rule: LineRule = field(repr=False)


def make_heat_config(
    ctx: DunklContext,
    radius: float = 14.0,
    nodes_per_panel: int = 12,
    n_geometric: int = 26,
    base_order: int = 64,
) -> HeatConfig:
    if ctx.d != 1:
        raise DomainError("heat grid machinery is one-dimensional")
    ev = KernelEvaluator(ctx, base_order=base_order)
    k = ctx.kappa.kappa[0]
    rule = line_rule(k, radius, nodes_per_panel=nodes_per_panel, n_geometric=n_geometric)
    return HeatConfig(ctx=ctx, evaluator=ev, rule=rule)


def heat_kernel(cfg: HeatConfig, x, y, t: float):
    """Q(x, y, t) = c (2t)^(-a) e^(-(x^2+y^2)/4t) E(x/sqrt(2t), y/sqrt(2t));
    positive and symmetric."""
    if t <= 0:
        raise DomainError("t must be > 0")
    ctx = cfg.ctx
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a = ctx.d / 2.0 + ctx.gamma
    s = np.sqrt(2.0 * t)
    # Fold e^(|x y|/2t) of the kernel into the Gaussian prefactor, leaving
    # e^(-(|x|-|y|)^2/4t) per coordinate; avoids overflow at small t.
    if ctx.d == 1:
        ker = dunkl_kernel_scaled(cfg.evaluator, x / s, y / s)
        gauss = np.exp(-((np.abs(x) - np.abs(y)) ** 2) / (4.0 * t))
    else:
        ker = 1.0
        gauss = 1.0
        for j, k in enumerate(ctx.kappa.kappa):
            ker = ker * dunkl_kernel_scaled(cfg.evaluator, x[..., j] / s, y[..., j] / s, kappa_scalar=k)
            gauss = gauss * np.exp(-((np.abs(x[..., j]) - np.abs(y[..., j])) ** 2) / (4.0 * t))
    return ctx.mehta_constant * (2.0 * t) ** (-a) * gauss * ker


def heat_apply(cfg: HeatConfig, f, t: float, x):
    """H_t f(x); the identity at t = 0.  Vectorized over x."""
    if t < 0:
        raise DomainError("t must be >= 0")
    x = np.asarray(x, dtype=float)
    if t == 0:
        out = np.asarray(f(x), dtype=float)
        return out if out.ndim else float(out)
    y = cfg.rule.nodes
    fy = np.asarray(f(y), dtype=float)
    q = heat_kernel(cfg, x[..., None], y, t)
    out = np.sum(q * fy * cfg.rule.weights, axis=-1)
    return out if out.ndim else float(out)


def semigroup_defect(cfg: HeatConfig, f, t: float, s: float, xs=None) -> float:
    """Sup over the probe grid of |H_t(H_s f) - H_{t+s} f|."""
    if xs is None:
        xs = np.linspace(-4.0, 4.0, 17)
    xs = np.asarray(xs, dtype=float)
    if s == 0:
        return 0.0
    inner = lambda y: heat_apply(cfg, f, s, np.asarray(y))
    lhs = heat_apply(cfg, inner, t, xs)
    rhs = heat_apply(cfg, f, t + s, xs)
    return float(np.max(np.abs(lhs - rhs)))


def symmetry_defect(cfg: HeatConfig, f, g, t: float) -> float:
    """|<H_t f, g> - <f, H_t g>| relative to the product of L^2 norms."""
    y, w = cfg.rule.nodes, cfg.rule.weights
    fy = np.asarray(f(y), dtype=float)
    gy = np.asarray(g(y), dtype=float)
    htf = heat_apply(cfg, f, t, y)
    htg = heat_apply(cfg, g, t, y)
    lhs = float(np.sum(w * htf * gy))
    rhs = float(np.sum(w * fy * htg))
    scale = np.sqrt(np.sum(w * fy**2) * np.sum(w * gy**2))
    return abs(lhs - rhs) / scale


def lp_norm(cfg: HeatConfig, values, p: float) -> float:
    values = np.abs(np.asarray(values, dtype=float))
    if np.isinf(p):
        return float(np.max(values))
    return float(np.sum(cfg.rule.weights * values**p) ** (1.0 / p))


def time_average(cfg: HeatConfig, f, t: float, x: float, nodes_per_decade: int = 32) -> float:
    """(1/t) int_0^t H_s f(x) ds by composite Gauss rules on a mesh graded
    toward s = 0, where H_s approaches the identity."""
    if t <= 0:
        raise DomainError("t must be > 0")
    edges = [0.0] + list(t * np.logspace(-3, 0, 3 * max(4, nodes_per_decade // 8) + 1))
    gl_x, gl_w = np.polynomial.legendre.leggauss(8)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        ss = lo + (hi - lo) * (gl_x + 1.0) / 2.0
        vals = np.array([heat_apply(cfg, f, s, np.asarray(x)) for s in ss])
        total += np.sum(gl_w * vals) * (hi - lo) / 2.0
    return total / t


def hds_maximal(cfg: HeatConfig, f, x: float, t_grid) -> float:
    """Sup over the time grid of the absolute time averages of H_s f(x)."""
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size == 0:
        raise DomainError("time grid must be nonempty")
    return float(max(abs(time_average(cfg, f, t, x)) for t in t_grid))


def geometric_time_grid(t_min: float = 1e-3, t_max: float = 1e3, ratio: float = 1.1):
    n = int(np.ceil(np.log(t_max / t_min) / np.log(ratio))) + 1
    return t_min * ratio ** np.arange(n)


def heat_equation_residual(cfg: HeatConfig, f, x: float, t: float, h: float = 1e-3) -> float:
    """|d/dt H_t f - Laplacian_kappa H_t f| at (x, t), 5-point stencils.

    The deformed Laplacian in one dimension is
    f'' + (2k/x) f' - (k/x^2)(f(x) - f(-x)).
    """
    k = cfg.ctx.kappa.kappa[0]
    if abs(x) < 10 * h:
        raise DomainError("stencil too close to the reflection point")
    xs = x + h * np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    ts = t + h * np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    ux = heat_apply(cfg, f, t, xs)
    ut = np.array([heat_apply(cfg, f, ti, np.asarray(x)) for ti in ts])
    u_ref = heat_apply(cfg, f, t, np.asarray(-x))
    d1 = (ux[0] - 8 * ux[1] + 8 * ux[3] - ux[4]) / (12 * h)
    d2 = (-ux[0] + 16 * ux[1] - 30 * ux[2] + 16 * ux[3] - ux[4]) / (12 * h * h)
    dt = (ut[0] - 8 * ut[1] + 8 * ut[3] - ut[4]) / (12 * h)
    lap = d2 + (2.0 * k / x) * d1 - (k / (x * x)) * (ux[2] - u_ref)
    return float(abs(dt - lap))
