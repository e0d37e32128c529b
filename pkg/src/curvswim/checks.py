"""Self-contained invariant suite behind the `check` CLI subcommand.

Each check returns (ok, detail).  The suite covers the load-bearing
identities of every module at desk scale; a fault-injection hook perturbs
the first Killing field so the negative path is testable.
"""

from __future__ import annotations

from typing import Callable, List, Tuple

import numpy as np

from .body import Body, balance, principal_axes
from .deformation import (
    gauge_fixed_linear_deformation,
    gauge_residuals,
    linear_deformation,
    project_gauge,
)
from .fields import VectorField, linear_field
from .geometry import (
    CurvatureTensor,
    Surface,
    exp_rigid,
    gaussian_curvature,
    geodesic_distance,
    killing_fields,
    killing_one_form,
    killing_residual,
    killing_two_form,
    numeric_exterior_derivative,
)
from .holonomy import holonomy_general, holonomy_linear, holonomy_small_swimmer
from .integrator import integrate_stroke, rectangle_stroke
from .scenarios import (
    RingSpec,
    TriangleSpec,
    ring_displacement,
    ring_simulate,
    triangle_body,
    triangle_control_fields,
    triangle_swim_coefficient,
)

Check = Tuple[str, Callable[[], Tuple[bool, str]]]

GRID = [(x, y) for x in np.linspace(-0.5, 0.5, 5) for y in np.linspace(-0.5, 0.5, 5)]
R_VALUES = (-1.0, -0.25, 0.25, 1.0)


def _random_balanced_body(rng: np.random.Generator, n: int = 5, extent: float = 0.4) -> Body:
    masses = rng.uniform(0.5, 2.0, size=n)
    positions = rng.uniform(-extent, extent, size=(n, 2))
    body = Body(masses=masses, positions=positions)
    return principal_axes(balance(body, Surface(0.0)))


def _checks(seed: int, inject_killing_fault: bool) -> List[Check]:
    rng = np.random.default_rng(seed)

    def killing_residual_grid():
        worst = 0.0
        for R in R_VALUES:
            s = Surface(R)
            ks = killing_fields(s)
            fields = list(ks)
            if inject_killing_fault:
                fields[0] = fields[0] + 1e-3 * linear_deformation(1, 1)
            for f in fields:
                for p in GRID:
                    worst = max(worst, killing_residual(s, f, p))
        ok = worst < 1e-8
        return ok, f"max residual {worst:.3e} over {len(GRID)} points x {len(R_VALUES)} surfaces"

    def two_form_matches_fd():
        worst = 0.0
        for R in (-0.5, 1.0):
            s = Surface(R)
            for _ in range(20):
                p = rng.uniform(-0.4, 0.4, size=2)
                for idx in (1, 2, 3):
                    fd = numeric_exterior_derivative(lambda q, i=idx: killing_one_form(s, i, q), p)
                    worst = max(worst, abs(fd - float(killing_two_form(s, idx, p))))
        return worst < 1e-6, f"max |fd - closed form| = {worst:.3e}"

    def flat_two_forms():
        s = Surface(0.0)
        pts = rng.uniform(-1.0, 1.0, size=(10, 2))
        tr = max(float(np.max(np.abs(killing_two_form(s, i, pts)))) for i in (1, 2))
        rot = float(np.max(np.abs(killing_two_form(s, 3, pts) - 2.0)))
        return tr == 0.0 and rot == 0.0, f"translations {tr:g}, rotation defect {rot:g}"

    def curvature_is_4r():
        worst = 0.0
        for R in R_VALUES:
            s = Surface(R)
            for p in [(0.0, 0.0), (0.3, -0.2), (0.5, 0.4)]:
                worst = max(worst, abs(gaussian_curvature(s, p) - 4.0 * R) / abs(4.0 * R))
        return worst < 1e-10, f"max relative defect {worst:.3e}"

    def isometries_preserve_distance():
        worst = 0.0
        for R in R_VALUES:
            s = Surface(R)
            for _ in range(10):
                p, q = rng.uniform(-0.4, 0.4, size=(2, 2))
                g = exp_rigid(s, rng.uniform(-0.2, 0.2, size=3))
                d0 = geodesic_distance(s, p, q)
                d1 = geodesic_distance(s, g(p), g(q))
                worst = max(worst, abs(d1 - d0) / max(d0, 1e-30))
        return worst < 1e-12, f"max relative drift {worst:.3e}"

    def exp_rigid_order():
        s = Surface(1.0)
        ks = killing_fields(s)
        p = np.array([0.15, -0.1])
        tau = np.array([0.08, -0.05, 0.11])

        def defect(scale):
            t = scale * tau
            w = VectorField(
                func=lambda q: sum(t[i] * ks[i](q) for i in range(3)),
                grad=lambda q: sum(t[i] * ks[i].gradient(q) for i in range(3)),
            )
            second = 0.5 * np.einsum("j,jk->k", w(p), w.gradient(p))
            return float(np.linalg.norm(exp_rigid(s, t)(p) - (p + w(p) + second)))

        r = defect(0.5) / defect(1.0)
        return r < 0.2, f"halving ratio {r:.3f} (cubic remainder expects 0.125)"

    def gauge_projection():
        worst_res, worst_strain = 0.0, 0.0
        for R in (0.0, 1.0):
            s = Surface(R)
            for _ in range(5):
                b = _random_balanced_body(rng)
                f = linear_field(rng.uniform(-1, 1, size=(2, 2)))
                pf = project_gauge(b, s, f)
                worst_res = max(worst_res, float(np.max(gauge_residuals(b, s, pf))))
                from .deformation import strain_of
                for p in b.positions:
                    worst_strain = max(
                        worst_strain,
                        float(np.max(np.abs(strain_of(s, pf, p) - strain_of(s, f, p)))),
                    )
        ok = worst_res < 1e-12 and worst_strain < 1e-8
        return ok, f"residual {worst_res:.2e}, strain drift {worst_strain:.2e}"

    def baron_translations_vanish():
        s = Surface(0.0)
        worst = 0.0
        for _ in range(20):
            b = _random_balanced_body(rng)
            pairs = [(1, 1), (2, 2), (1, 2)]
            i, j = rng.integers(0, 3), rng.integers(0, 3)
            if i == j:
                j = (i + 1) % 3
            fb = gauge_fixed_linear_deformation(b, *pairs[i])
            fc = gauge_fixed_linear_deformation(b, *pairs[j])
            res = holonomy_general(b, s, fb, fc, 1.0)
            worst = max(worst, float(np.max(np.abs(res.translation))))
        return worst < 1e-12, f"max |translation| = {worst:.3e}"

    def cat_turns():
        body = Body(
            masses=np.array([1.0, 1.0, 2.0]),
            positions=np.array([[1.0, 0.0], [-0.2, 0.8], [-0.4, -0.4]]),
        )
        b = principal_axes(balance(body, Surface(0.0)))
        f1 = gauge_fixed_linear_deformation(b, 1, 1)
        f2 = gauge_fixed_linear_deformation(b, 1, 2)
        rot = holonomy_general(b, Surface(0.0), f1, f2, 1.0).rotation
        return abs(rot) > 1e-6, f"rotation {rot:.3e} per unit control area"

    def triangle_optimum():
        M, h, b = 1.0, 1.0, 1.0
        ms = np.arange(0.05, 0.5, 0.025)
        coefs = [triangle_swim_coefficient(TriangleSpec(M, m, h, b)) for m in ms]
        grid_best = ms[int(np.argmax(coefs))]
        bound = max(coefs) <= 0.5 * h * b * b + 1e-12
        ok = abs(grid_best - 0.25) < 1e-12 and bound
        return ok, f"grid argmax m = {grid_best:g}, peak {max(coefs):.6f} <= 0.5 h b^2"

    def formula_paths_agree():
        worst = 0.0
        curv = CurvatureTensor.constant_curvature(4.0)
        for _ in range(10):
            b = _random_balanced_body(rng, extent=0.2)
            fb = gauge_fixed_linear_deformation(b, 2, 2)
            fc = gauge_fixed_linear_deformation(b, 1, 1)
            direct = holonomy_small_swimmer(b, curv, fb, fc, 1.0)
            viaq = holonomy_linear(b, curv, (2, 2), (1, 1), 1.0)
            worst = max(worst, float(np.max(np.abs(direct - viaq))))
        return worst < 1e-10, f"max path gap {worst:.3e}"

    def cubic_scaling():
        b = _random_balanced_body(rng, extent=0.2)
        curv = CurvatureTensor.constant_curvature(4.0)
        base = holonomy_linear(b, curv, (2, 2), (1, 1), 1.0)
        worst = 0.0
        for lam in (0.5, 2.0):
            scaled = holonomy_linear(b.scaled(lam), curv, (2, 2), (1, 1), 1.0)
            worst = max(worst, float(np.max(np.abs(scaled - lam**3 * base))))
        return worst == 0.0, f"max |dx(lam) - lam^3 dx| = {worst:.3e}"

    def null_bodies():
        curv = CurvatureTensor.constant_curvature(4.0)
        inv = Body(
            masses=np.ones(4),
            positions=0.2 * np.array([[1.0, 0], [-1.0, 0], [0, 1.0], [0, -1.0]]),
        )
        d1 = float(np.max(np.abs(holonomy_linear(inv, curv, (2, 2), (1, 1), 1.0))))
        needle = Body(masses=np.array([1.0, 2.0, 1.0]), positions=np.array([[-0.2, 0], [0.0, 0], [0.2, 0]]))
        needle = balance(needle, Surface(0.0))
        f12 = gauge_fixed_linear_deformation(needle, 1, 2)
        f11 = gauge_fixed_linear_deformation(needle, 1, 1)
        d2 = float(np.max(np.abs(holonomy_small_swimmer(needle, curv, f11, f12, 1.0))))
        ok = d1 < 1e-12 and d2 < 1e-12
        return ok, f"inversion-symmetric {d1:.2e}, needle {d2:.2e}"

    def ring_agreement():
        worst = 0.0
        for _ in range(5):
            spec = RingSpec(length=float(rng.uniform(0.5, 3.0)), m1=float(rng.uniform(0.1, 5)), m2=float(rng.uniform(0.1, 5)))
            worst = max(worst, abs(ring_displacement(spec) - ring_simulate(spec)))
        return worst < 1e-10, f"max |formula - simulation| = {worst:.3e}"

    def r_flip_formula():
        b = _random_balanced_body(rng, extent=0.2)
        plus = holonomy_linear(b, CurvatureTensor.constant_curvature(4.0), (2, 2), (1, 1), 1.0)
        minus = holonomy_linear(b, CurvatureTensor.constant_curvature(-4.0), (2, 2), (1, 1), 1.0)
        gap = float(np.max(np.abs(plus + minus)))
        return gap == 0.0, f"|dx(R) + dx(-R)| = {gap:.3e}"

    def integrator_consistency():
        s = Surface(1.0)
        tri = triangle_body(TriangleSpec(1.0, 0.25, 0.2, 0.2))
        height, base_f = triangle_control_fields()
        u = project_gauge(tri, s, height)
        v = project_gauge(tri, s, base_f)
        stroke = rectangle_stroke(1e-2, 1e-2, steps=512)
        rec = integrate_stroke(tri, s, [height, base_f], stroke, mode="composed")
        hol = holonomy_general(tri, s, u, v, stroke.signed_area)
        ratio = rec.delta_tau[0] / hol.delta_tau[0]
        ok = abs(ratio - 1.0) < 0.02 and rec.max_momentum_residual < rec.residual_bound
        return ok, f"oracle/formula = {ratio:.6f}, residual {rec.max_momentum_residual:.1e}"

    return [
        ("killing-residual-grid", killing_residual_grid),
        ("two-form-closed-vs-fd", two_form_matches_fd),
        ("flat-two-forms-exact", flat_two_forms),
        ("gaussian-curvature-4R", curvature_is_4r),
        ("isometry-distance-invariance", isometries_preserve_distance),
        ("exp-rigid-expansion-order", exp_rigid_order),
        ("gauge-projection", gauge_projection),
        ("baron-translations-vanish", baron_translations_vanish),
        ("cat-rotation-nonzero", cat_turns),
        ("triangle-optimum", triangle_optimum),
        ("formula-paths-agree", formula_paths_agree),
        ("cubic-scaling-exact", cubic_scaling),
        ("null-bodies", null_bodies),
        ("ring-formula-vs-simulation", ring_agreement),
        ("r-flip-formula-exact", r_flip_formula),
        ("integrator-vs-formula", integrator_consistency),
    ]


def run_checks(seed: int = 0, inject_killing_fault: bool = False, stream=None) -> bool:
    """Run the whole suite, printing one PASS/FAIL line per check."""
    import sys

    out = stream if stream is not None else sys.stdout
    all_ok = True
    for name, fn in _checks(seed, inject_killing_fault):
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failure with the exception as detail
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        all_ok &= ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}", file=out)
    return all_ok
