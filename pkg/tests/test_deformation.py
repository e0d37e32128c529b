import numpy as np
import pytest

from curvswim.body import Body, balance, principal_axes
from curvswim.deformation import (
    gauge_fixed_linear_deformation,
    gauge_residuals,
    linear_deformation,
    parse_field_spec,
    project_gauge,
    strain_of,
)
from curvswim.errors import DegenerateMomentsError, SingularGramError
from curvswim.fields import linear_field
from curvswim.geometry import Surface, killing_fields


def random_balanced(rng, n=5, extent=0.4):
    body = Body(masses=rng.uniform(0.5, 2, n), positions=rng.uniform(-extent, extent, (n, 2)))
    return principal_axes(balance(body, Surface(0.0)))


# ------------------------------------------------------------ linear family


def test_linear_deformation_values():
    assert np.allclose(linear_deformation(1, 1)((0.3, 0.5)), [0.3, 0.0])
    assert np.allclose(linear_deformation(1, 2)((1.0, 0.0)), [0.0, 0.5])
    assert np.allclose(linear_deformation(2, 2)((0.0, 0.0)), [0.0, 0.0])
    assert np.allclose(linear_deformation(2, 1)((1.0, 0.0)), linear_deformation(1, 2)((1.0, 0.0)))


def test_field_gradient_consistency():
    rng = np.random.default_rng(2)
    for f in [linear_deformation(1, 1), linear_deformation(1, 2), killing_fields(Surface(0.7))[0]]:
        for _ in range(5):
            p = rng.uniform(-0.4, 0.4, 2)
            fd = f._fd_gradient(p)
            assert np.allclose(fd, f.gradient(p), atol=1e-6)


# ------------------------------------------------------------------- strain


def test_killing_fields_are_strain_free():
    for R in (-1.0, 0.0, 1.0):
        s = Surface(R)
        for xi in killing_fields(s):
            assert np.max(np.abs(strain_of(s, xi, (0.3, -0.2)))) < 1e-8


def test_linear_field_unit_strain_flat():
    s = Surface(0.0)
    got = strain_of(s, linear_deformation(1, 1), (0.7, -0.2))
    assert np.allclose(got, np.diag([1.0, 0.0]), atol=1e-14)


def test_strain_at_origin_matches_flat_case():
    flat = strain_of(Surface(0.0), linear_deformation(1, 1), (0, 0))
    curved = strain_of(Surface(1.0), linear_deformation(1, 1), (0, 0))
    assert np.allclose(flat, curved, atol=1e-15)


# --------------------------------------------------------- gauge projection


def test_project_noop_when_already_orthogonal():
    body = Body.from_particles([[1, 0.3, 0.2], [1, 0.3, -0.2], [2, -0.3, 0.0]])
    s = Surface(0.0)
    f = linear_deformation(1, 1)  # x d/dx pairs to zero on this symmetric body
    pf = project_gauge(body, s, f)
    pts = body.positions
    assert np.allclose(pf(pts), f(pts), atol=1e-14)


def test_projection_kills_residuals_and_is_idempotent():
    rng = np.random.default_rng(4)
    for R in (0.0, 1.0, -0.8):
        s = Surface(R)
        body = random_balanced(rng)
        f = linear_field(rng.uniform(-1, 1, (2, 2)))
        pf = project_gauge(body, s, f)
        assert np.max(gauge_residuals(body, s, pf)) < 1e-12
        ppf = project_gauge(body, s, pf)
        assert np.allclose(ppf(body.positions), pf(body.positions), atol=1e-13)


def test_projection_preserves_strain():
    rng = np.random.default_rng(9)
    s = Surface(1.0)
    body = random_balanced(rng)
    f = linear_field(rng.uniform(-1, 1, (2, 2)))
    pf = project_gauge(body, s, f)
    for p in body.positions:
        assert np.allclose(strain_of(s, pf, p), strain_of(s, f, p), atol=1e-8)


def test_projection_of_xdy_reproduces_closed_form():
    # subtracting the rotation content of x d/dy lands on the tweaked family
    body = Body.from_particles([[1, 0.5, 0.1], [1, -0.3, -0.2], [1, -0.2, 0.1]])
    body = principal_axes(balance(body, Surface(0.0)))
    s = Surface(0.0)
    x_dy = linear_field(np.array([[0.0, 0.0], [1.0, 0.0]]))
    projected = project_gauge(body, s, x_dy)
    closed = gauge_fixed_linear_deformation(body, 1, 2)
    assert np.allclose(projected(body.positions), closed(body.positions), atol=1e-12)


def test_projection_single_particle_raises():
    body = Body.from_particles([[1.0, 0.0, 0.0]])
    with pytest.raises(SingularGramError) as err:
        project_gauge(body, Surface(0.0), linear_deformation(1, 1))
    assert err.value.rank == 2


# -------------------------------------------------- closed-form gauge family


def test_gauge_fixed_diagonal_is_axis_scaling():
    rng = np.random.default_rng(6)
    body = random_balanced(rng)
    f = gauge_fixed_linear_deformation(body, 1, 1)
    assert np.allclose(f.linear_matrix, np.array([[1.0, 0.0], [0.0, 0.0]]))


def test_gauge_fixed_requires_preparation():
    unbalanced = Body.from_particles([[1, 0.5, 0.0], [1, 0.1, 0.0]])
    with pytest.raises(ValueError):
        gauge_fixed_linear_deformation(unbalanced, 1, 1)


def test_needle_admissible_deformations():
    needle = Body.from_particles([[1, -0.2, 0], [2, 0.0, 0], [1, 0.2, 0]])
    needle = balance(needle, Surface(0.0))
    f12 = gauge_fixed_linear_deformation(needle, 1, 2)
    assert np.allclose(f12(needle.positions), 0.0, atol=1e-15)  # y d/dx dies on the axis
    with pytest.raises(DegenerateMomentsError):
        gauge_fixed_linear_deformation(needle, 2, 2)
    f11 = gauge_fixed_linear_deformation(needle, 1, 1)
    assert np.max(np.abs(f11(needle.positions))) > 0.1


def test_gauge_fixed_rotation_orthogonality():
    body = Body.from_particles([[0.25, -0.5, 0.5], [0.25, -0.5, -0.5], [0.5, 0.5, 0.0]])
    s = Surface(0.0)
    f = gauge_fixed_linear_deformation(body, 1, 2)
    res = gauge_residuals(body, s, f)
    assert np.max(res) < 1e-14


def test_closed_form_equals_projection_flat():
    rng = np.random.default_rng(8)
    s = Surface(0.0)
    for _ in range(5):
        body = random_balanced(rng)
        for (j, k) in [(1, 1), (2, 2), (1, 2)]:
            closed = gauge_fixed_linear_deformation(body, j, k)
            projected = project_gauge(body, s, linear_deformation(j, k))
            a = closed(body.positions).ravel()
            bvals = projected(body.positions).ravel()
            scale = a @ bvals / (a @ a)
            assert np.allclose(scale * a, bvals, atol=1e-12)


# ------------------------------------------------------------- field specs


def test_parse_field_specs():
    assert parse_field_spec("linear:12").tag == "linear-12"
    assert np.allclose(parse_field_spec({"y_dy": 1.0})((0.2, 0.3)), [0.0, 0.3])
    assert np.allclose(parse_field_spec({"x_dx": 2.0})((0.2, 0.3)), [0.4, 0.0])
    m = parse_field_spec({"matrix": [[0, 1], [0, 0]]})
    assert np.allclose(m((0.5, 0.25)), [0.25, 0.0])
    with pytest.raises(ValueError):
        parse_field_spec("linear:13")
    with pytest.raises(ValueError):
        parse_field_spec({"bogus": 1})
    with pytest.raises(ValueError):
        parse_field_spec("gauge_linear:11")  # needs a body
