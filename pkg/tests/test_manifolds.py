import math

import numpy as np
import pytest

from mapenergy import make_rng
from mapenergy.manifolds import (
    CutLocusError,
    complex_projective,
    pluriharmonic_generator,
    product,
    real_projective,
    so_basis,
    sphere,
    sphere_volume,
    su_basis,
)

MODELS = [
    sphere(2),
    sphere(3),
    sphere(2, 0.5),
    real_projective(2),
    real_projective(3),
    complex_projective(1),
    complex_projective(2),
]


def test_sphere_volumes():
    np.testing.assert_allclose(sphere_volume(1), 2 * math.pi, rtol=1e-14)
    np.testing.assert_allclose(sphere_volume(2), 4 * math.pi, rtol=1e-14)
    np.testing.assert_allclose(sphere_volume(3), 2 * math.pi**2, rtol=1e-14)
    np.testing.assert_allclose(sphere_volume(4), 8 * math.pi**2 / 3, rtol=1e-14)
    np.testing.assert_allclose(sphere_volume(2, 2.0), 16 * math.pi, rtol=1e-14)


def test_model_volumes():
    np.testing.assert_allclose(real_projective(2).volume, 2 * math.pi, rtol=1e-14)
    np.testing.assert_allclose(real_projective(3).volume, math.pi**2, rtol=1e-14)
    np.testing.assert_allclose(complex_projective(1).volume, math.pi, rtol=1e-14)
    np.testing.assert_allclose(complex_projective(2).volume, math.pi**2 / 2, rtol=1e-14)
    np.testing.assert_allclose(complex_projective(3).volume, math.pi**3 / 6, rtol=1e-14)


def test_distance_reference_points():
    s2 = sphere(2)
    e = np.eye(3)
    np.testing.assert_allclose(s2.distance(e[0], -e[0]), math.pi, atol=1e-15)
    np.testing.assert_allclose(s2.distance(e[0], e[1]), math.pi / 2, atol=1e-15)

    rp = real_projective(3)
    x = rp.random_point(make_rng(5))
    np.testing.assert_allclose(rp.distance(x, rp.canonicalize(-x)), 0.0, atol=1e-15)

    cp = complex_projective(2)
    z = np.array([1.0, 0, 0], dtype=complex)
    w = np.array([0, 1.0, 0], dtype=complex)
    np.testing.assert_allclose(cp.distance(z, w), math.pi / 2, atol=1e-15)
    # phase changes of the representative do not move the point
    np.testing.assert_allclose(cp.distance(z, np.exp(0.7j) * z), 0.0, atol=1e-7)


@pytest.mark.parametrize("M", MODELS, ids=repr)
def test_unit_norm_and_canonical_form(M):
    rng = make_rng(11)
    x = M.random_point(rng, 200)
    np.testing.assert_allclose(np.linalg.norm(x, axis=-1), 1.0, atol=1e-12)
    xc = M.canonicalize(x)
    np.testing.assert_allclose(xc, M.canonicalize(xc), atol=1e-15)
    if M.kind == "real_projective":
        piv = xc[np.arange(len(xc)), np.argmax(np.abs(xc) > 1e-8, axis=-1)]
        assert np.all(piv > 0)
    if M.kind == "complex_projective":
        piv = xc[np.arange(len(xc)), np.argmax(np.abs(xc) > 1e-8, axis=-1)]
        assert np.all(piv.real > 0)
        np.testing.assert_allclose(piv.imag, 0.0, atol=1e-12)


@pytest.mark.parametrize("M", MODELS, ids=repr)
def test_exp_log_round_trip(M):
    rng = make_rng(23)
    K = 1000
    x = M.random_point(rng, K)
    v = M.random_unit_tangent(rng, x)
    lengths = rng.uniform(1e-3, 0.99 * (M.cut_distance - 1e-5), K)
    w = lengths[:, None] * v
    y = M.exp(x, w)
    np.testing.assert_allclose(np.linalg.norm(y, axis=-1), 1.0, atol=1e-10)
    back = M.log(x, y)
    np.testing.assert_allclose(back, w, atol=1e-9)
    np.testing.assert_allclose(M.distance(x, y), lengths, atol=1e-9)


def _aligned_chord(z, y):
    """Ambient distance after the optimal unit-scalar alignment of representatives."""
    h = np.sum(z.conj() * y, axis=-1)
    a = np.abs(h)
    phase = np.where(a > 1e-300, h / np.where(a > 1e-300, a, 1.0), 1.0)
    return np.linalg.norm(phase[..., None].conj() * y - z, axis=-1)


@pytest.mark.parametrize("M", MODELS, ids=repr)
def test_log_then_exp(M):
    rng = make_rng(31)
    K = 500
    x = M.random_point(rng, K)
    y = M.random_point(rng, K)
    ok = M.distance(x, y) < M.cut_distance - 1e-3
    x, y = x[ok], y[ok]
    z = M.exp(x, M.log(x, y))
    if M.kind == "sphere":
        err = np.linalg.norm(z - y, axis=-1)
    elif M.kind == "product":
        err = sum(
            _aligned_chord(z[..., s], y[..., s]) for s in M.slices
        )
    else:
        err = _aligned_chord(z, y)
    np.testing.assert_allclose(err, 0.0, atol=1e-9)


def test_log_raises_at_cut_locus():
    s2 = sphere(2)
    x = np.array([1.0, 0.0, 0.0])
    with pytest.raises(CutLocusError):
        s2.log(x, -x)
    cp = complex_projective(1)
    z = np.array([1.0, 0.0], dtype=complex)
    w = np.array([0.0, 1.0], dtype=complex)
    with pytest.raises(CutLocusError):
        cp.log(z, w)


def test_exp_at_cut_distance_cp():
    # |v| = pi/2 reaches the point [u], at maximal distance pi/2
    cp = complex_projective(2)
    rng = make_rng(3)
    z = cp.random_point(rng)
    u = cp.random_unit_tangent(rng, z)
    y = cp.exp(z, (math.pi / 2) * u)
    np.testing.assert_allclose(cp.distance(z, y), math.pi / 2, atol=1e-12)
    np.testing.assert_allclose(cp.distance(y, cp.canonicalize(u)), 0.0, atol=1e-7)


@pytest.mark.parametrize("M", MODELS, ids=repr)
def test_distance_isometry_invariance(M):
    if M.kind == "product":
        return
    rng = make_rng(47)
    x = M.random_point(rng, 300)
    y = M.random_point(rng, 300)
    q = M.random_isometry(rng)
    d0 = M.distance(x, y)
    d1 = M.distance(M.apply_isometry(q, x), M.apply_isometry(q, y))
    np.testing.assert_allclose(d1, d0, atol=1e-12)


def test_tangent_projection_orthogonality():
    rng = make_rng(7)
    for M in MODELS:
        x = M.random_point(rng, 50)
        g = rng.standard_normal(x.shape)
        if M.is_complex:
            g = g + 1j * rng.standard_normal(x.shape)
        v = M.project_tangent(x, g)
        if M.kind == "complex_projective":
            # horizontal: complex-orthogonal to the representative
            h = np.sum(x.conj() * v, axis=-1)
            np.testing.assert_allclose(h, 0.0, atol=1e-12)
        else:
            np.testing.assert_allclose(np.sum((x.conj() * v).real, axis=-1), 0.0, atol=1e-12)


def test_geodesic_unit_speed():
    rng = make_rng(13)
    for M in MODELS:
        x = M.random_point(rng)
        v = M.random_unit_tangent(rng, x)
        h = 1e-3
        d = M.distance(M.geodesic(x, v, h), M.geodesic(x, v, 2 * h))
        np.testing.assert_allclose(d, h, rtol=1e-9)


def test_submersion_distance_consistency():
    # horizontal-lift geodesic length equals the arccos distance formula
    cp = complex_projective(2)
    rng = make_rng(19)
    z = cp.random_point(rng, 200)
    w = cp.random_point(rng, 200)
    keep = cp.distance(z, w) < cp.cut_distance - 1e-4
    z, w = z[keep], w[keep]
    v = cp.log(z, w)
    np.testing.assert_allclose(np.linalg.norm(v, axis=-1), cp.distance(z, w), atol=1e-10)


def test_product_metric():
    P = product(complex_projective(1), sphere(2, 0.5))
    rng = make_rng(29)
    x = P.random_point(rng, 100)
    y = P.random_point(rng, 100)
    d = P.distance(x, y)
    d1 = P.factors[0].distance(x[..., :2].astype(complex), y[..., :2].astype(complex))
    d2 = P.factors[1].distance(x[..., 2:].real, y[..., 2:].real)
    np.testing.assert_allclose(d, np.sqrt(d1**2 + d2**2), atol=1e-12)
    np.testing.assert_allclose(P.volume, math.pi * 4 * math.pi * 0.25, rtol=1e-12)

    keep = d < P.cut_distance - 1e-3
    v = P.log(x[keep], y[keep])
    z = P.exp(x[keep], v)
    err = sum(_aligned_chord(z[..., s], y[keep][..., s]) for s in P.slices)
    np.testing.assert_allclose(err, 0.0, atol=1e-9)


def test_lie_algebra_bases():
    for m in (3, 4):
        B = so_basis(m)
        assert len(B) == m * (m - 1) // 2
        for a in B:
            np.testing.assert_allclose(a + a.T, 0.0, atol=1e-15)
        G = np.array([[np.trace(a @ b.T) for b in B] for a in B])
        np.testing.assert_allclose(G, np.eye(len(B)), atol=1e-14)
    for m in (2, 3):
        B = su_basis(m)
        assert len(B) == m * m - 1
        for a in B:
            np.testing.assert_allclose(a + a.conj().T, 0.0, atol=1e-15)
            np.testing.assert_allclose(np.trace(a), 0.0, atol=1e-15)
        G = np.array([[np.trace(a @ b.conj().T).real for b in B] for a in B])
        np.testing.assert_allclose(G, np.eye(len(B)), atol=1e-14)


def test_killing_field_vanishes_on_axis():
    s2 = sphere(2)
    a = np.zeros((3, 3))
    a[0, 1], a[1, 0] = -1.0, 1.0  # rotation about the z-axis? no: about e2? fixes e2
    axis = np.array([0.0, 0.0, 1.0])
    np.testing.assert_allclose(s2.killing_field(a, axis), 0.0, atol=1e-15)
    # generic point moves
    p = np.array([1.0, 0.0, 0.0])
    assert np.linalg.norm(s2.killing_field(a, p)) > 0.5


def _killing_derivative_fd(cp, a, z, w, h=1e-4):
    """Central difference of the Killing field along the horizontal lift through z."""

    def field(c):
        az = a @ c
        return az - np.sum(c.conj() * az) * c

    c_plus = np.cos(h) * z + np.sin(h) * w
    c_minus = np.cos(h) * z - np.sin(h) * w
    diff = (field(c_plus) - field(c_minus)) / (2 * h)
    return cp.project_tangent(z, diff)


def test_killing_derivative_matches_fd_oracle():
    for N in (1, 2):
        cp = complex_projective(N)
        rng = make_rng(61 + N)
        for a in su_basis(N + 1):
            z = cp.random_point(rng)
            w = cp.random_unit_tangent(rng, z)
            analytic = cp.killing_derivative(a, z, w)
            fd = _killing_derivative_fd(cp, a, z, w)
            np.testing.assert_allclose(analytic, fd, atol=1e-6)


def test_pluriharmonic_generator_derivatives():
    # the generated field vanishes at x; its covariant derivative rotates the
    # complex line through e by J and kills the complex-orthogonal directions
    for N in (1, 2):
        cp = complex_projective(N)
        rng = make_rng(71 + N)
        z = cp.random_point(rng)
        e = cp.random_unit_tangent(rng, z)
        a = pluriharmonic_generator(cp, z, e)
        np.testing.assert_allclose(a + a.conj().T, 0.0, atol=1e-15)
        np.testing.assert_allclose(cp.killing_field(a, z), 0.0, atol=1e-13)

        d_e = _killing_derivative_fd(cp, a, z, e)
        np.testing.assert_allclose(d_e, 1j * e, atol=1e-6)
        d_je = _killing_derivative_fd(cp, a, z, 1j * e)
        np.testing.assert_allclose(d_je, -e, atol=1e-6)
        if N > 1:
            g = rng.standard_normal(z.shape) + 1j * rng.standard_normal(z.shape)
            ep = cp.project_tangent(z, g)
            ep = ep - np.sum(e.conj() * ep) * e  # complex-orthogonal to e
            ep = ep / np.linalg.norm(ep)
            np.testing.assert_allclose(_killing_derivative_fd(cp, a, z, ep), 0.0, atol=1e-6)


def test_random_point_determinism():
    for M in MODELS:
        a = M.random_point(make_rng(123), 17)
        b = M.random_point(make_rng(123), 17)
        np.testing.assert_array_equal(a, b)
