"""Constant-curvature surfaces in a single stereographic chart.

The chart is the complex plane z = x + iy carrying the conformal metric

    ds^2 = |dz|^2 / (1 + R |z|^2)^2

with a single real parameter R: R > 0 is sphere-like, R = 0 Euclidean,
R < 0 hyperbolic (chart restricted to the disk |z|^2 < 1/|R|).  The metric
is normalized to the identity at the origin, and its Gaussian curvature
works out to K = 4R; the package treats R strictly as the metric parameter
and exposes K as a derived quantity.

Isometries are represented exactly as 2x2 complex matrices

    [[alpha, beta], [-R*conj(beta), conj(alpha)]],  |alpha|^2 + R|beta|^2 = 1

acting by the fractional linear map z -> (alpha z + beta)/(-R conj(beta) z
+ conj(alpha)), so composition and inversion are exact group operations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from .errors import ChartDomainError
from .fields import VectorField, as_points, from_complex, to_complex

__all__ = [
    "Surface",
    "Isometry",
    "KillingSet",
    "CurvatureTensor",
    "metric_at",
    "metric_derivative_at",
    "christoffel_at",
    "gaussian_curvature",
    "geodesic_distance",
    "killing_fields",
    "killing_one_form",
    "killing_two_form",
    "killing_two_form_field",
    "numeric_exterior_derivative",
    "sym_covariant_gradient",
    "killing_residual",
    "apply_isometry",
    "compose",
    "exp_rigid",
    "translation_to",
    "rotation_about_origin",
    "translation_killing_approx",
]

# Relative margin kept between points and the hyperbolic chart boundary.
_DOMAIN_MARGIN = 1e-9


@dataclass(frozen=True)
class Surface:
    """Constant-curvature surface, identified by its metric parameter R."""

    R: float = 0.0

    def conformal(self, p) -> np.ndarray:
        """u(z) = 1 + R |z|^2, the reciprocal square root of the metric factor."""
        a = as_points(p)
        return 1.0 + self.R * np.sum(a * a, axis=-1)

    def contains(self, p) -> np.ndarray:
        a = as_points(p)
        if self.R >= 0.0:
            return np.ones(a.shape[:-1], dtype=bool)
        r2 = np.sum(a * a, axis=-1)
        return r2 < (1.0 - _DOMAIN_MARGIN) / (-self.R)

    def require_inside(self, p) -> np.ndarray:
        a = as_points(p)
        ok = self.contains(a)
        if not np.all(ok):
            bad = a[~np.asarray(ok, dtype=bool)]
            raise ChartDomainError(
                f"point(s) outside the chart domain |z|^2 < {1.0 / (-self.R):g} "
                f"for R={self.R:g}: {bad[:3]!r}"
            )
        return a


def metric_at(surface: Surface, p) -> np.ndarray:
    """Metric components g_ij = delta_ij / (1 + R|z|^2)^2 at a chart point."""
    a = surface.require_inside(p)
    u = surface.conformal(a)
    g = np.zeros(a.shape[:-1] + (2, 2))
    g[..., 0, 0] = 1.0 / u**2
    g[..., 1, 1] = 1.0 / u**2
    return g


def metric_derivative_at(surface: Surface, p) -> np.ndarray:
    """Partials dg[j, k, l] = d g_kl / d x^j of the conformal metric."""
    a = surface.require_inside(p)
    u = surface.conformal(a)
    coef = -4.0 * surface.R / u**3  # d(u^-2)/dx^j = -2 u^-3 * 2R x_j
    dg = np.zeros(a.shape[:-1] + (2, 2, 2))
    for j in range(2):
        dg[..., j, 0, 0] = coef * a[..., j]
        dg[..., j, 1, 1] = coef * a[..., j]
    return dg


def christoffel_at(surface: Surface, p) -> np.ndarray:
    """Christoffel symbols Gamma[i, j, k] = Gamma^i_jk of the chart metric.

    For a conformal metric exp(2 phi) delta with phi = -log(1 + R|z|^2) the
    symbols follow the standard 2D pattern built from the partials of phi.
    """
    a = surface.require_inside(p)
    u = surface.conformal(a)
    px = -2.0 * surface.R * a[..., 0] / u
    py = -2.0 * surface.R * a[..., 1] / u
    G = np.zeros(a.shape[:-1] + (2, 2, 2))
    G[..., 0, 0, 0] = px
    G[..., 0, 0, 1] = py
    G[..., 0, 1, 0] = py
    G[..., 0, 1, 1] = -px
    G[..., 1, 0, 0] = -py
    G[..., 1, 0, 1] = px
    G[..., 1, 1, 0] = px
    G[..., 1, 1, 1] = py
    return G


def gaussian_curvature(surface: Surface, at=None) -> float:
    """Gaussian curvature K = -exp(-2 phi) Laplacian(phi), evaluated pointwise.

    The Laplacian of phi = -log(1 + R|z|^2) has the closed form -4R/u^2, so
    the value is independent of the evaluation point and equals 4R.
    """
    p = np.zeros(2) if at is None else as_points(at)
    surface.require_inside(p)
    u = surface.conformal(p)
    lap_phi = -4.0 * surface.R / u**2
    return float(-(u**2) * lap_phi)


def geodesic_distance(surface: Surface, p, q) -> float:
    """Exact geodesic distance between two chart points.

    Uses the Moebius-invariant chordal ratio |z1 - z2| / |1 + R conj(z1) z2|
    composed with arctan (R > 0), identity (R = 0) or artanh (R < 0).
    """
    z1 = to_complex(surface.require_inside(p))
    z2 = to_complex(surface.require_inside(q))
    R = surface.R
    num = np.abs(z1 - z2)
    if R == 0.0:
        return float(num)
    den = np.abs(1.0 + R * np.conj(z1) * z2)
    if R > 0.0:
        s = math.sqrt(R)
        return float(np.arctan2(s * num, den) / s)
    s = math.sqrt(-R)
    ratio = s * num / den
    ratio = np.minimum(ratio, 1.0 - 1e-16)
    return float(np.arctanh(ratio) / s)


# ---------------------------------------------------------------------------
# Isometries


@dataclass(frozen=True)
class Isometry:
    """Exact isometry of a constant-curvature surface in Moebius form."""

    alpha: complex
    beta: complex
    R: float

    @classmethod
    def identity(cls, surface: Surface) -> "Isometry":
        return cls(alpha=1.0 + 0.0j, beta=0.0j, R=surface.R)

    @property
    def det(self) -> float:
        return float(abs(self.alpha) ** 2 + self.R * abs(self.beta) ** 2)

    def normalized(self) -> "Isometry":
        d = self.det
        if d <= 0.0:
            raise ValueError("isometry representation degenerate (non-positive determinant)")
        s = math.sqrt(d)
        return Isometry(self.alpha / s, self.beta / s, self.R)

    def apply_complex(self, z):
        z = np.asarray(z, dtype=complex)
        a, b, R = self.alpha, self.beta, self.R
        return (a * z + b) / (-R * np.conj(b) * z + np.conj(a))

    def __call__(self, p) -> np.ndarray:
        return from_complex(self.apply_complex(to_complex(p)))

    def derivative_complex(self, z):
        """Complex derivative of the chart action; rotates and scales tangents."""
        z = np.asarray(z, dtype=complex)
        a, b, R = self.alpha, self.beta, self.R
        den = -R * np.conj(b) * z + np.conj(a)
        return self.det / den**2

    def push_forward(self, p, v) -> np.ndarray:
        """Tangent vector at p mapped to a tangent vector at self(p)."""
        z = to_complex(p)
        w = to_complex(as_points(v))
        return from_complex(self.derivative_complex(z) * w)

    def inverse(self) -> "Isometry":
        return Isometry(np.conj(self.alpha), -self.beta, self.R)

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return compose(self, other)

    def is_identity(self, tol: float = 1e-12) -> bool:
        return abs(self.alpha - 1.0) < tol and abs(self.beta) < tol


def apply_isometry(g: Isometry, p) -> np.ndarray:
    return g(p)


def compose(g: Isometry, h: Isometry) -> Isometry:
    """Composition g after h (matrix product of the representations)."""
    if g.R != h.R:
        raise ValueError("cannot compose isometries of different surfaces")
    R = g.R
    alpha = g.alpha * h.alpha - R * g.beta * np.conj(h.beta)
    beta = g.alpha * h.beta + g.beta * np.conj(h.alpha)
    return Isometry(complex(alpha), complex(beta), R)


def rigid_generator(surface: Surface, tau) -> np.ndarray:
    """2x2 representation matrix of the Killing combination tau . xi."""
    t = np.asarray(tau, dtype=float)
    q = t[0] + 1j * t[1]
    th = 0.5 * t[2]
    return np.array(
        [[1j * th, q], [-surface.R * np.conj(q), -1j * th]], dtype=complex
    )


def exp_rigid(surface: Surface, tau) -> Isometry:
    """Unit-time flow of tau . xi as an exact group element.

    The generator squares to -(theta^2 + R|q|^2) times the identity, so the
    exponential has the closed form cos(d) I + sinc(d) A with d^2 possibly
    negative (hyperbolic branch).
    """
    t = np.asarray(tau, dtype=float)
    q = t[0] + 1j * t[1]
    th = 0.5 * t[2]
    d2 = th * th + surface.R * (q.real**2 + q.imag**2)
    if d2 > 1e-12:
        d = math.sqrt(d2)
        c, s = math.cos(d), math.sin(d) / d
    elif d2 < -1e-12:
        m = math.sqrt(-d2)
        c, s = math.cosh(m), math.sinh(m) / m
    else:
        c = 1.0 - d2 / 2.0 + d2 * d2 / 24.0
        s = 1.0 - d2 / 6.0 + d2 * d2 / 120.0
    alpha = c + s * 1j * th
    beta = s * q
    return Isometry(complex(alpha), complex(beta), surface.R)


def translation_to(surface: Surface, w) -> Isometry:
    """The origin-to-w transvection (z + w)/(1 - R conj(w) z), alpha real."""
    wz = complex(to_complex(surface.require_inside(as_points(w))))
    a = 1.0 / math.sqrt(1.0 + surface.R * abs(wz) ** 2)
    return Isometry(complex(a), complex(a * wz), surface.R)


def rotation_about_origin(surface: Surface, angle: float) -> Isometry:
    half = 0.5 * float(angle)
    return Isometry(complex(math.cos(half), math.sin(half)), 0.0j, surface.R)


# ---------------------------------------------------------------------------
# Killing fields and their forms


@dataclass(frozen=True)
class KillingSet:
    """The three Killing fields of a constant-curvature surface.

    Ordered as (translation-x, translation-y, rotation about the origin);
    the first two reduce to the Euclidean translations at R = 0.
    """

    fields: Tuple[VectorField, VectorField, VectorField]
    surface: Surface

    @property
    def k(self) -> int:
        return len(self.fields)

    def __iter__(self):
        return iter(self.fields)

    def __getitem__(self, i: int) -> VectorField:
        return self.fields[i]


def killing_fields(surface: Surface) -> KillingSet:
    R = surface.R

    def f1(p):
        a = as_points(p)
        x, y = a[..., 0], a[..., 1]
        return np.stack([1.0 + R * (x * x - y * y), 2.0 * R * x * y], axis=-1)

    def g1(p):
        a = as_points(p)
        x, y = a[..., 0], a[..., 1]
        out = np.empty(a.shape[:-1] + (2, 2))
        out[..., 0, 0] = 2.0 * R * x
        out[..., 0, 1] = 2.0 * R * y
        out[..., 1, 0] = -2.0 * R * y
        out[..., 1, 1] = 2.0 * R * x
        return out

    def f2(p):
        a = as_points(p)
        x, y = a[..., 0], a[..., 1]
        return np.stack([2.0 * R * x * y, 1.0 + R * (y * y - x * x)], axis=-1)

    def g2(p):
        a = as_points(p)
        x, y = a[..., 0], a[..., 1]
        out = np.empty(a.shape[:-1] + (2, 2))
        out[..., 0, 0] = 2.0 * R * y
        out[..., 0, 1] = -2.0 * R * x
        out[..., 1, 0] = 2.0 * R * x
        out[..., 1, 1] = 2.0 * R * y
        return out

    xi1 = VectorField(func=f1, grad=g1, tag="killing-1")
    xi2 = VectorField(func=f2, grad=g2, tag="killing-2")

    def f3(p):
        a = as_points(p)
        return np.stack([-a[..., 1], a[..., 0]], axis=-1)

    def g3(p):
        a = as_points(p)
        out = np.zeros(a.shape[:-1] + (2, 2))
        out[..., 0, 1] = 1.0
        out[..., 1, 0] = -1.0
        return out

    xi3 = VectorField(
        func=f3, grad=g3, tag="killing-3",
        linear_matrix=np.array([[0.0, -1.0], [1.0, 0.0]]),
    )
    return KillingSet(fields=(xi1, xi2, xi3), surface=surface)


def killing_one_form(surface: Surface, index: int, p) -> np.ndarray:
    """Components (f_x, f_y) of the metric-lowered Killing field."""
    if index not in (1, 2, 3):
        raise ValueError(f"Killing index must be 1, 2 or 3, got {index}")
    a = surface.require_inside(p)
    u = surface.conformal(a)
    v = killing_fields(surface)[index - 1](a)
    return v / u[..., None] ** 2


def killing_two_form(surface: Surface, index: int, p) -> np.ndarray:
    """Coefficient of dx ^ dy in the exterior derivative of the lowered field.

    Closed forms over u = 1 + R|z|^2:

        index 1:  8 R y / u^3
        index 2: -8 R x / u^3
        index 3:  2 (1 - R|z|^2) / u^3

    At R = 0 the translation forms vanish identically and the rotation form
    is the constant 2.
    """
    if index not in (1, 2, 3):
        raise ValueError(f"Killing index must be 1, 2 or 3, got {index}")
    a = surface.require_inside(p)
    R = surface.R
    u = surface.conformal(a)
    x, y = a[..., 0], a[..., 1]
    if index == 1:
        return 8.0 * R * y / u**3
    if index == 2:
        return -8.0 * R * x / u**3
    r2 = x * x + y * y
    return 2.0 * (1.0 - R * r2) / u**3


def killing_two_form_field(surface: Surface, index: int) -> Callable[[np.ndarray], np.ndarray]:
    """The two-form coefficient as a reusable callable."""
    return lambda p: killing_two_form(surface, index, p)


def numeric_exterior_derivative(one_form: Callable[[np.ndarray], np.ndarray], p, h: float = 1e-4) -> float:
    """Central-difference curl d_x f_y - d_y f_x of a one-form field."""
    if h <= 0.0:
        raise ValueError("step must be positive")
    a = as_points(p)
    ex = np.array([h, 0.0])
    ey = np.array([0.0, h])
    dfy = (one_form(a + ex)[..., 1] - one_form(a - ex)[..., 1]) / (2.0 * h)
    dfx = (one_form(a + ey)[..., 0] - one_form(a - ey)[..., 0]) / (2.0 * h)
    return float(dfy - dfx)


def lowered_covariant_gradient(surface: Surface, f: VectorField, p) -> np.ndarray:
    """nabla_j w_k for the metric-lowered field w = g . f, shape (..., 2, 2)."""
    a = surface.require_inside(p)
    u = surface.conformal(a)
    v = f(a)
    dv = f.gradient(a)  # dv[..., j, k] = d v^k / d x^j
    w = v / u[..., None] ** 2
    du = 2.0 * surface.R * a  # d u / d x^j = 2 R x_j
    # d_j w_k = (d_j v^k) / u^2 - 2 v^k u^-3 du_j
    dw = dv / u[..., None, None] ** 2 - 2.0 * v[..., None, :] * du[..., :, None] / u[..., None, None] ** 3
    G = christoffel_at(surface, a)
    # nabla_j w_k = d_j w_k - Gamma^l_jk w_l
    correction = np.einsum("...ljk,...l->...jk", G, w)
    return dw - correction


def sym_covariant_gradient(surface: Surface, f: VectorField, p) -> np.ndarray:
    """Symmetrized covariant gradient (nabla_j w_k + nabla_k w_j) / 2."""
    nw = lowered_covariant_gradient(surface, f, p)
    return 0.5 * (nw + np.swapaxes(nw, -1, -2))


def killing_residual(surface: Surface, f: VectorField, p) -> float:
    """Max-norm of the strain tensor; vanishes exactly on Killing fields."""
    return float(np.max(np.abs(sym_covariant_gradient(surface, f, p))))


# ---------------------------------------------------------------------------
# Curvature tensor and translation fields derived from it


@dataclass(frozen=True)
class CurvatureTensor:
    """Riemann components R[j, l, i, k] in a local Euclidean frame.

    Antisymmetric in (j, l) and (i, k), symmetric under pair exchange.  The
    sign convention is fixed by requiring that the associated translation
    field reproduce the exact two-form of the built-in surfaces; for the 2D
    constant-curvature case that gives R_1212 = K = 4R.
    """

    components: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.components, dtype=float)
        if c.ndim != 4 or len(set(c.shape)) != 1:
            raise ValueError("curvature components must form a (d,d,d,d) array")
        object.__setattr__(self, "components", c)

    @property
    def dim(self) -> int:
        return self.components.shape[0]

    @classmethod
    def zero(cls, dim: int = 2) -> "CurvatureTensor":
        return cls(np.zeros((dim,) * 4))

    @classmethod
    def constant_curvature(cls, K: float, dim: int = 2) -> "CurvatureTensor":
        delta = np.eye(dim)
        comps = K * (
            np.einsum("ji,lk->jlik", delta, delta)
            - np.einsum("jk,li->jlik", delta, delta)
        )
        return cls(comps)

    @classmethod
    def from_surface(cls, surface: Surface) -> "CurvatureTensor":
        return cls.constant_curvature(gaussian_curvature(surface), dim=2)

    def symmetry_defect(self) -> float:
        """Largest violation of the index symmetries; zero for valid tensors."""
        c = self.components
        d = max(
            float(np.max(np.abs(c + np.einsum("jlik->ljik", c)))),
            float(np.max(np.abs(c + np.einsum("jlik->jlki", c)))),
            float(np.max(np.abs(c - np.einsum("jlik->ikjl", c)))),
            float(np.max(np.abs(c + np.einsum("jlik->jikl", c) + np.einsum("jlik->jkli", c)))),
        )
        return d


def translation_killing_approx(curv: CurvatureTensor, k: int) -> VectorField:
    """Approximate translation Killing field near the origin of a local frame.

    Returns covariant components: value e_k at the origin, vanishing
    antisymmetric derivative there, and gradient evaluator equal to the
    covariant derivative -x^i R[j, l, i, k] (exact to first order).  The
    value evaluator carries the compatible quadratic profile; its plain
    partial derivatives differ from the gradient evaluator by the O(x)
    Christoffel terms of the local frame, which is intrinsic to normal
    coordinates rather than an implementation gap.
    """
    d = curv.dim
    if not 1 <= k <= d:
        raise ValueError(f"axis index must be in 1..{d}")
    Rt = curv.components
    kk = k - 1
    # symmetrized quadratic coefficient: value path of the one-form
    sym = 0.5 * (Rt[:, :, :, kk] + np.einsum("jli->ilj", Rt[:, :, :, kk]))

    def func(p):
        a = as_points(p)[..., :d]
        out = -0.5 * np.einsum("...j,...i,jli->...l", a, a, sym)
        out[..., kk] += 1.0
        return out

    def grad(p):
        a = as_points(p)[..., :d]
        return -np.einsum("...i,jli->...jl", a, Rt[:, :, :, kk])

    return VectorField(func=func, grad=grad, tag=f"translation-approx-{k}")
