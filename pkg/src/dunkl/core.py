"""Weighted measure for the hyperoctahedral weight prod |x_j|^(2 kappa_j),
its closed-form constants, and quadrature rules for the singular Jacobi-type
weights that appear throughout the library.

Every derived constant is computed by a numerical route (tensorized Dirichlet
moments, generalized Laguerre quadrature) and cross-checked against the
gamma-function closed forms, so the two paths validate each other.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import DegenerateWeightError, DomainError

# Closed-form comparisons; quadrature-vs-quadrature comparisons are looser.
REL_TOL_CLOSED_FORM = 1e-10
REL_TOL_QUADRATURE = 1e-6


@dataclass(frozen=True)
class MultiplicityVector:
    """One nonnegative multiplicity per coordinate (sign-change reflections)."""

    kappa: tuple

    def __post_init__(self):
        k = tuple(float(v) for v in self.kappa)
        if len(k) == 0:
            raise DomainError("multiplicity vector must be nonempty")
        if any(v < 0 for v in k):
            raise DomainError("multiplicity entries must be >= 0")
        object.__setattr__(self, "kappa", k)

    def gamma(self) -> float:
        return float(sum(self.kappa))

    def __len__(self):
        return len(self.kappa)


@dataclass(frozen=True)
class DunklContext:
    """Dimension, multiplicities and the derived measure constants.

    sphere_constant is the weighted surface measure of the unit sphere,
    mehta_constant is the reciprocal of the weighted Gaussian integral and
    unit_ball_measure is the weighted volume of the unit ball.  Immutable and
    safe to share across threads.
    """

    d: int
    kappa: MultiplicityVector
    gamma: float
    sphere_constant: float
    mehta_constant: float
    unit_ball_measure: float

    @property
    def homogeneity(self) -> float:
        """Scaling degree of the measure: d + 2*gamma."""
        return self.d + 2.0 * self.gamma


@dataclass(frozen=True)
class JacobiRule:
    """Gauss rule for the weight (1-t^2)^(exponent) on (-1, 1)."""

    order: int
    nodes: np.ndarray
    weights: np.ndarray
    exponent: float

    def __post_init__(self):
        object.__setattr__(self, "nodes", np.asarray(self.nodes, dtype=float))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))


@dataclass(frozen=True)
class SampledFunction:
    """Grid-sampled function with domain metadata (real or complex values)."""

    grid_nodes: np.ndarray
    values: np.ndarray
    domain_bounds: tuple

    def __post_init__(self):
        nodes = np.asarray(self.grid_nodes, dtype=float)
        values = np.asarray(self.values)
        if nodes.ndim != 1 or np.any(np.diff(nodes) <= 0):
            raise DomainError("grid nodes must be strictly increasing")
        if values.shape[0] != nodes.shape[0]:
            raise DomainError("values length must match grid")
        object.__setattr__(self, "grid_nodes", nodes)
        object.__setattr__(self, "values", values)


def gamma_fn(x):
    return special.gamma(x)


def beta_fn(a, b):
    return special.beta(a, b)


def jacobi_rule(kappa_scalar: float, order: int) -> JacobiRule:
    """Gauss-Jacobi rule for the weight (1-t^2)^(kappa-1) on (-1, 1).

    Exact for polynomials of degree <= 2*order - 1 against the weight;
    the endpoint singularity for kappa < 1 is absorbed by the rule.
    """
    if kappa_scalar == 0:
        raise DegenerateWeightError(
            "kappa = 0 degenerates the weight; use the classical-shift branch"
        )
    if kappa_scalar < 0:
        raise DomainError("kappa must be >= 0")
    if order < 1:
        raise DomainError("order must be >= 1")
    nodes, weights = special.roots_jacobi(order, kappa_scalar - 1.0, kappa_scalar - 1.0)
    return JacobiRule(order=order, nodes=nodes, weights=weights, exponent=kappa_scalar - 1.0)


def integrate_psi(rule: JacobiRule, g) -> float:
    """Integrate g against the probability density
    psi(t) = B(kappa, 1/2)^(-1) (1+t) (1-t^2)^(kappa-1) on (-1, 1)."""
    kappa = rule.exponent + 1.0
    vals = np.asarray(g(rule.nodes))
    return np.sum(rule.weights * (1.0 + rule.nodes) * vals) / beta_fn(kappa, 0.5)


def psi_cdf(kappa_scalar: float, t):
    """CDF of the density psi_kappa at t, via the regularized incomplete beta."""
    u = np.clip((np.asarray(t, dtype=float) + 1.0) / 2.0, 0.0, 1.0)
    return special.betainc(kappa_scalar + 1.0, kappa_scalar, u)


def _dirichlet_moment(a: float, b: float, order: int = 96) -> float:
    """Numerical value of int_{-1}^{1} |x|^(2a) (1-x^2)^b dx.

    Substituting u = x^2 turns the integrand into the Jacobi weight
    u^(a-1/2) (1-u)^b on (0,1), so the rule integrates it exactly.
    """
    nodes, weights = special.roots_jacobi(order, b, a - 0.5)
    # Map (-1,1) -> (0,1); the weight transforms with factor (1/2)^(b + a - 1/2 + 1).
    scale = 0.5 ** (a + b + 0.5)
    return float(scale * np.sum(weights))


def _gaussian_moment(kappa_scalar: float, order: int = 96) -> float:
    """Numerical value of int_R |t|^(2 kappa) e^(-t^2/2) dt via Laguerre nodes."""
    nodes, weights = special.roots_genlaguerre(order, kappa_scalar - 0.5)
    return float(2.0**kappa_scalar * np.sqrt(2.0) * np.sum(weights))


def _sphere_constant(kappa: MultiplicityVector) -> float:
    """Weighted surface measure of S^(d-1), by recursive slicing.

    Each slice integral is a Dirichlet moment in the cosine of the polar
    angle; the d = 1 base case is the two-point sphere with unit weight.
    """
    ks = kappa.kappa
    if len(ks) == 1:
        return 2.0
    gamma_rest = sum(ks[1:])
    d = len(ks)
    b = (d - 3) / 2.0 + gamma_rest
    return _sphere_constant(MultiplicityVector(ks[1:])) * _dirichlet_moment(ks[0], b)


def _unit_ball_measure(kappa: MultiplicityVector) -> float:
    """Weighted volume of the unit ball, by recursive slicing.

    The (d-1)-dimensional section at height x is a ball of radius
    sqrt(1-x^2), whose measure scales with exponent (d-1) + 2*gamma_rest.
    """
    ks = kappa.kappa
    if len(ks) == 1:
        return _dirichlet_moment(ks[0], 0.0)
    gamma_rest = sum(ks[1:])
    d = len(ks)
    b = ((d - 1) + 2.0 * gamma_rest) / 2.0
    return _unit_ball_measure(MultiplicityVector(ks[1:])) * _dirichlet_moment(ks[0], b)


def make_context(d: int, kappa) -> DunklContext:
    """Build a context with all derived constants, cross-checked internally.

    The sphere constant, Mehta-type constant and unit-ball measure come from
    three independent quadrature routes; construction fails if they violate
    the closed-form identities tying them together.
    """
    if d < 1:
        raise DomainError("d must be >= 1")
    if not isinstance(kappa, MultiplicityVector):
        kappa = MultiplicityVector(tuple(kappa))
    if len(kappa) != d:
        raise DomainError("kappa must have one entry per coordinate")
    gamma = kappa.gamma()
    sphere = _sphere_constant(kappa)
    ball = _unit_ball_measure(kappa)
    inv_mehta = 1.0
    for k in kappa.kappa:
        inv_mehta *= _gaussian_moment(k)
    mehta = 1.0 / inv_mehta

    a = d / 2.0 + gamma
    # Internal consistency against the closed forms.
    assert abs(ball - sphere / (d + 2.0 * gamma)) <= REL_TOL_CLOSED_FORM * ball
    closed = 2.0 ** (a - 1.0) * gamma_fn(a) * sphere
    assert abs(inv_mehta - closed) <= REL_TOL_CLOSED_FORM * inv_mehta

    return DunklContext(
        d=d,
        kappa=kappa,
        gamma=gamma,
        sphere_constant=sphere,
        mehta_constant=mehta,
        unit_ball_measure=ball,
    )


def weight(ctx: DunklContext, x):
    """The measure density prod_j |x_j|^(2 kappa_j); 0^0 is taken as 1.

    Accepts a single point (scalar for d = 1, length-d vector otherwise) or
    an array of points with trailing axis of length d.
    """
    x = np.asarray(x, dtype=float)
    if ctx.d == 1:
        x = x[..., None]
    single_point = x.ndim == 1
    out = np.ones(x.shape[:-1])
    for j, k in enumerate(ctx.kappa.kappa):
        if k == 0:
            continue
        out = out * np.abs(x[..., j]) ** (2.0 * k)
    if single_point or out.ndim == 0:
        return float(out)
    return out


def ball_measure(ctx: DunklContext, r: float) -> float:
    """Measure of the ball of radius r: r^(d+2*gamma) times the unit value."""
    if r <= 0:
        raise DomainError("r must be > 0")
    return r**ctx.homogeneity * ctx.unit_ball_measure


# ---------------------------------------------------------------------------
# Composite quadrature on the weighted line |y|^(2 kappa) dy.


@dataclass(frozen=True)
class LineRule:
    """Composite rule for int g(y) |y|^(2 kappa) dy over [-R, R].

    Panels touching the origin use Gauss-Jacobi nodes for the weight
    y^(2 kappa); all other panels are Gauss-Legendre with the weight folded
    into the quadrature weights.
    """

    kappa_scalar: float
    radius: float
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)


def _panel_edges(radius: float, breakpoints, n_geometric: int, max_panel=None) -> np.ndarray:
    edges = {0.0, float(radius)}
    for b in breakpoints:
        b = abs(float(b))
        if 0.0 < b < radius:
            edges.add(b)
    # Geometric refinement toward the origin keeps short-scale integrands
    # (narrow heat kernels) resolved without a huge uniform mesh.
    for k in range(1, n_geometric + 1):
        edges.add(radius * 2.0 ** (-k))
    out = sorted(edges)
    if max_panel is not None:
        refined = [out[0]]
        for lo, hi in zip(out[:-1], out[1:]):
            pieces = int(np.ceil((hi - lo) / max_panel))
            refined.extend(lo + (hi - lo) * np.arange(1, pieces + 1) / pieces)
        out = refined
    return np.array(out)


@lru_cache(maxsize=None)
def _panel_nodes(kappa_scalar: float, n: int):
    gl = np.polynomial.legendre.leggauss(n)
    gj = special.roots_jacobi(n, 0.0, 2.0 * kappa_scalar) if kappa_scalar > 0 else None
    return gl, gj


def half_line_rule(kappa_scalar, edges, nodes_per_panel=12):
    """Nodes/weights for int_0^edges[-1] g(y) y^(2k) dy on a fixed partition."""
    edges = np.asarray(edges, dtype=float)
    xs, ws = [], []
    (gl_x, gl_w), gj = _panel_nodes(float(kappa_scalar), nodes_per_panel)
    if gj is not None:
        gj_x, gj_w = gj
    for lo, hi in zip(edges[:-1], edges[1:]):
        h = hi - lo
        if lo == 0.0 and kappa_scalar > 0:
            y = h * (gj_x + 1.0) / 2.0
            w = gj_w * (h / 2.0) ** (2.0 * kappa_scalar + 1.0)
        else:
            y = lo + h * (gl_x + 1.0) / 2.0
            w = gl_w * (h / 2.0) * y ** (2.0 * kappa_scalar)
        xs.append(y)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def line_rule(
    kappa_scalar: float,
    radius: float,
    breakpoints=(),
    nodes_per_panel: int = 12,
    n_geometric: int = 24,
    max_panel=None,
) -> LineRule:
    """Symmetric composite rule on [-R, R] against |y|^(2 kappa) dy."""
    if radius <= 0:
        raise DomainError("radius must be > 0")
    edges = _panel_edges(radius, breakpoints, n_geometric, max_panel=max_panel)
    y, w = half_line_rule(kappa_scalar, edges, nodes_per_panel)
    nodes = np.concatenate([-y[::-1], y])
    weights = np.concatenate([w[::-1], w])
    return LineRule(kappa_scalar=kappa_scalar, radius=radius, nodes=nodes, weights=weights)
