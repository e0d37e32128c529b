"""The swim equations: net rigid motion produced by an infinitesimal stroke.

For gauge-orthogonal deformation fields u, v driving a small closed loop of
signed area A in control space (counterclockwise positive, u on the first
control axis), the rigid increment dtau solves the linear system

    G . dtau = - <d xi_beta | u, v> A,      beta = 1, 2, 3

where G is the mass-weighted Gram matrix of the Killing fields and the
bracket pairs the exact Killing two-forms with the field pair at every
particle.  Three evaluation paths are provided:

  * holonomy_general        exact two-forms of the built-in surfaces
  * holonomy_small_swimmer  curvature-tensor contraction (leading order)
  * holonomy_linear         same contraction, collapsed onto cubic moments
                            for the closed-form linear deformation family

The latter two agree identically; the first differs from them by terms of
relative order |R| L^2, which is the observable small-body error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .body import Body, moments
from .deformation import gauge_fixed_linear_deformation, gauge_residuals, killing_gram
from .errors import GaugeConditionError, SingularGramError
from .fields import VectorField
from .geometry import (
    CurvatureTensor,
    KillingSet,
    Surface,
    killing_fields,
    killing_two_form,
)

GAUGE_TOLERANCE = 1e-8
RANK_CUTOFF = 1e-10


@dataclass(frozen=True)
class HolonomyResult:
    """Rigid increment for one stroke, with solver diagnostics.

    delta_tau is ordered (translation-x, translation-y, rotation) and
    already includes the stroke area; per_unit_area divides it back out.
    """

    delta_tau: np.ndarray
    area: float
    gram_condition: float
    gauge_residuals: np.ndarray      # (2, 3): residuals of u and v
    rank: int
    null_directions: Optional[np.ndarray] = None  # (3, n_null) when rank < 3

    @property
    def per_unit_area(self) -> np.ndarray:
        if self.area == 0.0:
            return np.zeros_like(self.delta_tau)
        return self.delta_tau / self.area

    @property
    def translation(self) -> np.ndarray:
        return self.delta_tau[:2]

    @property
    def rotation(self) -> float:
        return float(self.delta_tau[2])


def gram_matrix(body: Body, surface: Surface, killing: KillingSet | None = None) -> np.ndarray:
    """Killing Gram matrix G_ba = <xi_b | xi_a>; symmetric PSD."""
    ks = killing if killing is not None else killing_fields(surface)
    return killing_gram(body, surface, ks)


def two_form_bracket(
    body: Body,
    two_form: Callable[[np.ndarray], np.ndarray],
    u: VectorField,
    v: VectorField,
) -> float:
    """(1/M) sum_n m_n c(x_n) (u^1 v^2 - u^2 v^1), c the dx^dy coefficient.

    Antisymmetric under exchanging u and v; this is the pairing of the
    two-form with the oriented field pair at every particle.
    """
    x = body.positions
    c = np.asarray(two_form(x), dtype=float)
    uu = u(x)
    vv = v(x)
    wedge = uu[:, 0] * vv[:, 1] - uu[:, 1] * vv[:, 0]
    return float(np.sum(body.masses * c * wedge) / body.total_mass)


def holonomy_general(
    body: Body,
    surface: Surface,
    u: VectorField,
    v: VectorField,
    area: float,
    killing: KillingSet | None = None,
    gauge_tol: float = GAUGE_TOLERANCE,
    rank_cutoff: float = RANK_CUTOFF,
) -> HolonomyResult:
    """Solve the swim equations with the exact two-forms of the surface.

    u and v must already satisfy the gauge condition against the Killing
    set (project first if unsure); a residual above gauge_tol is an error,
    not a warning, because the leading-order derivation relies on it.
    """
    ks = killing if killing is not None else killing_fields(surface)
    res = np.stack([
        gauge_residuals(body, surface, u, ks),
        gauge_residuals(body, surface, v, ks),
    ])
    if np.max(res) > gauge_tol:
        raise GaugeConditionError(
            f"deformation fields violate the gauge condition "
            f"(max residual {np.max(res):.3e} > {gauge_tol:.1e}); "
            "apply project_gauge first"
        )
    G = gram_matrix(body, surface, ks)
    rhs = -area * np.array(
        [
            two_form_bracket(body, lambda p, i=i: killing_two_form(surface, i, p), u, v)
            for i in (1, 2, 3)
        ]
    )
    return _solve_on_range(G, rhs, area, res, rank_cutoff)


def _solve_on_range(
    G: np.ndarray,
    rhs: np.ndarray,
    area: float,
    res: np.ndarray,
    rank_cutoff: float,
) -> HolonomyResult:
    eigvals, eigvecs = np.linalg.eigh(G)
    top = max(float(eigvals[-1]), 1e-300)
    keep = eigvals > rank_cutoff * top
    rank = int(np.sum(keep))
    if rank == 0:
        raise SingularGramError("Killing Gram matrix vanishes", rank=0, eigenvalues=eigvals)
    V = eigvecs[:, keep]
    inv = (V / eigvals[keep]) @ V.T
    delta = inv @ rhs
    null = None if rank == G.shape[0] else eigvecs[:, ~keep]
    cond = float(eigvals[-1] / eigvals[keep][0])
    return HolonomyResult(
        delta_tau=delta,
        area=float(area),
        gram_condition=cond,
        gauge_residuals=res,
        rank=rank,
        null_directions=null,
    )


def holonomy_small_swimmer(
    body: Body,
    curv: CurvatureTensor,
    u: VectorField,
    v: VectorField,
    area: float,
    balance_tol: float = 1e-9,
) -> np.ndarray:
    """Translation increment of a small balanced swimmer from the curvature.

    Evaluates M dx^k = 2 R[j, l, i, k] (sum_n m_n x_n^i u^j v^l) A, the
    curvature-moment contraction of the stroke, in any dimension matching
    the supplied tensor.  The factor 2 collapses the two orderings of the
    field pair; exchanging u and v negates the result.
    """
    d = curv.dim
    x = body.positions[:, :d]
    q1 = np.einsum("n,ni->i", body.masses, x)
    scale = max(1.0, float(np.max(np.abs(x)))) * body.total_mass
    if np.max(np.abs(q1)) > balance_tol * scale:
        raise ValueError(
            f"body is not balanced (|Q^j| = {np.max(np.abs(q1)):.3e}); balance it first"
        )
    uu = u(body.positions)[:, :d]
    vv = v(body.positions)[:, :d]
    bracket = np.einsum("n,ni,nj,nl,jlik->k", body.masses, x, uu, vv, curv.components)
    return 2.0 * float(area) * bracket / body.total_mass


def holonomy_linear(
    body: Body,
    curv: CurvatureTensor,
    pair_b: Tuple[int, int],
    pair_c: Tuple[int, int],
    area: float,
) -> np.ndarray:
    """Translation increment for a pair of gauge-fixed linear deformations.

    The linear family makes the particle sums collapse onto the cubic
    moments: with eta_b^j(x) = E_b[j, m] x^m,

        M dx^k = 2 R[j, l, i, k] Q^{i m h} E_b[j, m] E_c[l, h] A.

    This disentangles the ambient space (curvature) from the swimmer
    (moments) and agrees with holonomy_small_swimmer applied to the same
    closed-form fields.
    """
    d = curv.dim
    fb = gauge_fixed_linear_deformation(body, *pair_b)
    fc = gauge_fixed_linear_deformation(body, *pair_c)
    Eb = fb.linear_matrix[:d, :d]
    Ec = fc.linear_matrix[:d, :d]
    q3 = moments(body).q3[:d, :d, :d]
    contraction = np.einsum("imh,jm,lh,jlik->k", q3, Eb, Ec, curv.components)
    return 2.0 * float(area) * contraction / body.total_mass
