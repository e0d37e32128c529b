import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from curvswim.body import Body, balance, moments, principal_axes, scalar_product
from curvswim.fields import constant_field, linear_field
from curvswim.geometry import Surface, killing_fields


def test_body_validation():
    with pytest.raises(ValueError):
        Body(masses=np.array([1.0, -1.0]), positions=np.zeros((2, 2)))
    with pytest.raises(ValueError):
        Body(masses=np.array([]), positions=np.zeros((0, 2)))


def test_from_particles():
    b = Body.from_particles([[1.0, 0.0, 0.0], [2.0, 0.5, -0.5]])
    assert b.total_mass == 3.0
    assert b.n == 2


# ---------------------------------------------------------- scalar product


def test_unit_field_has_unit_norm():
    b = Body.from_particles([[1, 0.3, 0.1], [2, -0.5, 0.2]])
    s = Surface(0.0)
    xi1 = killing_fields(s)[0]
    assert scalar_product(b, s, xi1, xi1) == pytest.approx(1.0, abs=1e-15)


def test_three_mass_translation_rotation_pairing():
    # unit masses at (1,0), (-1,0), (0,1): <xi1|xi3> = -Q^y / M = -1/3
    b = Body.from_particles([[1, 1, 0], [1, -1, 0], [1, 0, 1]])
    s = Surface(0.0)
    ks = killing_fields(s)
    assert scalar_product(b, s, ks[0], ks[2]) == pytest.approx(-1.0 / 3.0, abs=1e-15)


def test_pointwise_orthogonal_fields():
    b = Body.from_particles([[1, 0.2, 0.4], [3, -0.1, 0.5]])
    s = Surface(1.0)
    assert scalar_product(b, s, constant_field(1, 0), constant_field(0, 1)) == 0.0


@settings(max_examples=30, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2))
def test_scalar_product_bilinear_symmetric(a, c):
    b = Body.from_particles([[1, 0.3, 0.1], [2, -0.2, 0.2], [1.5, 0.1, -0.3]])
    s = Surface(-0.5)
    u = linear_field(np.array([[0.7, 0.1], [0.0, -0.4]]))
    v = linear_field(np.array([[0.2, -0.3], [0.5, 0.1]]))
    w = constant_field(0.4, -0.9)
    left = scalar_product(b, s, a * u + c * w, v)
    right = a * scalar_product(b, s, u, v) + c * scalar_product(b, s, w, v)
    assert left == pytest.approx(right, abs=1e-12)
    assert scalar_product(b, s, u, v) == pytest.approx(scalar_product(b, s, v, u), abs=1e-15)


def test_norm_positive_unless_vanishing_on_particles():
    b = Body.from_particles([[1, 0.5, 0.0], [1, -0.5, 0.0]])
    s = Surface(0.0)
    u = linear_field(np.array([[0.3, 0.0], [0.2, 0.0]]))
    assert scalar_product(b, s, u, u) > 0.0
    # y d/dy vanishes at every particle of this needle
    v = linear_field(np.array([[0.0, 0.0], [0.0, 1.0]]))
    assert scalar_product(b, s, v, v) == 0.0


# ----------------------------------------------------------------- moments


def test_single_mass_moments():
    q = moments(Body.from_particles([[2.5, 0, 0]]))
    assert np.all(q.q1 == 0) and np.all(q.q2 == 0) and np.all(q.q3 == 0)
    assert q.total_mass == 2.5


def test_triangle_cubic_moment():
    M, m, h, b = 1.0, 0.2, 0.7, 0.4
    x_b = -(M - 2 * m) * h / M
    body = Body.from_particles(
        [[m, x_b, b / 2], [m, x_b, -b / 2], [M - 2 * m, x_b + h, 0.0]]
    )
    q = moments(body)
    assert q.q1[0] == pytest.approx(0.0, abs=1e-16)
    expected = -m * (M - 2 * m) * h * b**2 / (2 * M)
    assert q.q3[0, 1, 1] == pytest.approx(expected, rel=1e-14)
    # consistency with the closed-form swim coefficient: |8/M sum x y^2|
    assert 8 * abs(q.q3[0, 1, 1]) / M == pytest.approx(4 * m * (M - 2 * m) * h * b**2 / M**2, rel=1e-14)


def test_inversion_symmetric_body_has_zero_cubics():
    body = Body.from_particles([[1, 0.3, 0], [1, -0.3, 0], [1, 0, 0.3], [1, 0, -0.3]])
    assert np.all(moments(body).q3 == 0.0)


def test_moments_additive_under_merge():
    b1 = Body.from_particles([[1, 0.2, 0.3], [2, -0.1, 0.4]])
    b2 = Body.from_particles([[3, 0.5, -0.2]])
    q = moments(b1.merged(b2))
    assert np.allclose(q.q2, moments(b1).q2 + moments(b2).q2)
    assert np.allclose(q.q3, moments(b1).q3 + moments(b2).q3)


# ----------------------------------------------------------------- balance


def test_balance_noop_when_balanced():
    body = Body.from_particles([[1, 0.1, 0], [1, -0.1, 0]])
    out = balance(body, Surface(1.0))
    assert np.allclose(out.positions, body.positions, atol=1e-14)


def test_balance_flat_two_masses():
    body = Body.from_particles([[1, 0.0, 0.0], [1, 0.2, 0.0]])
    out = balance(body, Surface(0.0))
    assert np.allclose(out.positions, [[-0.1, 0.0], [0.1, 0.0]], atol=1e-15)


def test_balance_curved_reaches_tolerance():
    body = Body.from_particles([[1, 0.0, 0.05], [1, 0.2, -0.1], [2, 0.1, 0.15]])
    for R in (1.0, -1.0):
        out = balance(body, Surface(R))
        q1 = moments(out).q1
        assert np.max(np.abs(q1)) < 1e-12


def test_balance_warns_for_large_bodies():
    body = Body.from_particles([[1, 0.0, 0.0], [1, 0.8, 0.0]])
    with pytest.warns(UserWarning):
        balance(body, Surface(1.0))


# --------------------------------------------------------- principal axes


def test_principal_axes_noop_for_reflection_symmetric():
    body = Body.from_particles([[1, 0.3, 0.2], [1, 0.3, -0.2], [2, -0.3, 0.0]])
    out = principal_axes(body)
    assert out is body


def test_principal_axes_diagonal_rotation():
    r = 1 / np.sqrt(2)
    body = Body.from_particles([[1, r, r], [1, -r, -r]])
    out = principal_axes(body)
    assert np.allclose(np.abs(out.positions), [[1, 0], [1, 0]], atol=1e-14)
    q2 = moments(out).q2
    assert abs(q2[0, 1]) < 1e-14
    assert q2[0, 0] >= q2[1, 1]


def test_principal_axes_random_bodies():
    rng = np.random.default_rng(5)
    for _ in range(10):
        body = Body(masses=rng.uniform(0.5, 2, 6), positions=rng.uniform(-1, 1, (6, 2)))
        out = principal_axes(body)
        q2 = moments(out).q2
        assert abs(q2[0, 1]) <= 1e-12 * max(q2[0, 0], q2[1, 1])
        assert q2[0, 0] >= q2[1, 1]


def test_principal_axes_isotropic_identity():
    body = Body.from_particles([[1, 0.3, 0], [1, -0.3, 0], [1, 0, 0.3], [1, 0, -0.3]])
    assert principal_axes(body) is body
