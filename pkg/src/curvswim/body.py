"""Point-mass bodies: scalar product, moments, balancing, principal axes."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BalanceConvergenceError
from .fields import VectorField
from .geometry import (
    Isometry,
    Surface,
    rotation_about_origin,
    translation_to,
)

# |R| L^2 above this is outside the small-body regime the balancing
# convention is designed for; warn but proceed.
CURVATURE_EXTENT_WARN = 0.1


@dataclass(frozen=True)
class Body:
    masses: np.ndarray      # (N,), strictly positive
    positions: np.ndarray   # (N, 2) chart coordinates

    def __post_init__(self):
        m = np.atleast_1d(np.asarray(self.masses, dtype=float)).copy()
        x = np.asarray(self.positions, dtype=float).copy()
        if x.ndim == 1:
            x = x[None, :]
        if m.ndim != 1 or x.shape != (m.shape[0], 2):
            raise ValueError(f"inconsistent body arrays: masses {m.shape}, positions {x.shape}")
        if m.shape[0] < 1:
            raise ValueError("a body needs at least one particle")
        if np.any(m <= 0.0):
            raise ValueError("all masses must be positive")
        m.setflags(write=False)
        x.setflags(write=False)
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "positions", x)

    @classmethod
    def from_particles(cls, particles) -> "Body":
        """Build from an iterable of (mass, x, y) triples."""
        arr = np.asarray(list(particles), dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise ValueError("particles must be (mass, x, y) triples")
        return cls(masses=arr[:, 0], positions=arr[:, 1:])

    @property
    def n(self) -> int:
        return self.masses.shape[0]

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.masses))

    @property
    def extent(self) -> float:
        return float(np.max(np.linalg.norm(self.positions, axis=1)))

    def transformed(self, g: Isometry) -> "Body":
        return Body(masses=self.masses, positions=g(self.positions))

    def scaled(self, factor: float) -> "Body":
        return Body(masses=self.masses, positions=factor * self.positions)

    def merged(self, other: "Body") -> "Body":
        return Body(
            masses=np.concatenate([self.masses, other.masses]),
            positions=np.concatenate([self.positions, other.positions]),
        )


@dataclass(frozen=True)
class Moments:
    """Mass-weighted coordinate sums up to third order."""

    q1: np.ndarray  # (2,)
    q2: np.ndarray  # (2, 2)
    q3: np.ndarray  # (2, 2, 2)
    total_mass: float


def moments(body: Body) -> Moments:
    m, x = body.masses, body.positions
    q1 = np.einsum("n,ni->i", m, x)
    q2 = np.einsum("n,ni,nj->ij", m, x, x)
    q3 = np.einsum("n,ni,nj,nk->ijk", m, x, x, x)
    return Moments(q1=q1, q2=q2, q3=q3, total_mass=body.total_mass)


def scalar_product(body: Body, surface: Surface, u: VectorField, v: VectorField) -> float:
    """Mass-weighted metric pairing (1/M) sum_n m_n g_ij u^i v^j at the particles."""
    x = surface.require_inside(body.positions)
    w = surface.conformal(x) ** 2
    uu = u(x)
    vv = v(x)
    return float(np.sum(body.masses * np.sum(uu * vv, axis=-1) / w) / body.total_mass)


def field_norm(body: Body, surface: Surface, u: VectorField) -> float:
    return float(np.sqrt(max(scalar_product(body, surface, u, u), 0.0)))


def balance(body: Body, surface: Surface, tol: float = 1e-12, max_iter: int = 50) -> Body:
    """Translate the body (by exact isometries) until its first moments vanish.

    Isometries act nonlinearly on the chart for R != 0, so the flat shift by
    the mean is iterated to a fixed point.  Convergence is geometric while
    |R| L^2 stays well below one.
    """
    extent2 = float(np.max(np.sum(body.positions**2, axis=1)))
    if abs(surface.R) * extent2 > CURVATURE_EXTENT_WARN:
        warnings.warn(
            f"body extent is large for this curvature (|R| L^2 = {abs(surface.R) * extent2:.3g}); "
            "chart-coordinate balancing degrades outside the small-body regime",
            stacklevel=2,
        )
    current = body
    scale = max(1.0, np.sqrt(extent2))
    for _ in range(max_iter):
        q1 = np.einsum("n,ni->i", current.masses, current.positions) / current.total_mass
        if np.max(np.abs(q1)) <= tol * scale:
            return current
        shift = translation_to(surface, -q1)
        current = current.transformed(shift)
    raise BalanceConvergenceError(
        f"first-moment balancing did not converge in {max_iter} iterations "
        f"(R={surface.R:g}, extent={np.sqrt(extent2):g})"
    )


def principal_axes(body: Body, tol: float = 1e-14) -> Body:
    """Rotate about the origin so the second moments are diagonal.

    Deterministic convention: if Q is already diagonal the body is returned
    unchanged, axes are ordered so Q_xx >= Q_yy, and the rotation angle is
    taken in (-pi/2, pi/2].
    """
    q2 = moments(body).q2
    qxx, qyy, qxy = q2[0, 0], q2[1, 1], q2[0, 1]
    scale = max(qxx, qyy, 1e-300)
    if abs(qxy) <= tol * scale:
        if qxx >= qyy:
            return body
        g = rotation_about_origin(Surface(0.0), np.pi / 2.0)
        return _rotate_exact(body, g)
    # eigen-rotation of the symmetric 2x2 block
    theta = 0.5 * np.arctan2(2.0 * qxy, qxx - qyy)
    c, s = np.cos(theta), np.sin(theta)
    lam1 = c * c * qxx + 2 * c * s * qxy + s * s * qyy
    lam2 = s * s * qxx - 2 * c * s * qxy + c * c * qyy
    angle = -theta
    if lam1 < lam2:
        angle += np.pi / 2.0
    g = rotation_about_origin(Surface(0.0), float(angle))
    return _rotate_exact(body, g)


def _rotate_exact(body: Body, g: Isometry) -> Body:
    rotated = body.transformed(Isometry(g.alpha, 0.0j, 0.0))
    return rotated
