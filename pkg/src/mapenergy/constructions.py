"""Explicit map families used as the test corpus for every functional.

Rational curves (holomorphic, with analytic differentials from the
homogeneous polynomial derivatives), projective dilations that squeeze a
complex projective space onto a reference line, conformal dilations of
the 3-sphere and their capped projective quotient variant, a catalog of
standard maps, and reproducible non-holomorphic perturbations of the
identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .intgeo import LineEmbedding
from .manifolds import (
    ComplexProjective,
    GeometryError,
    Product,
    Sphere,
    complex_projective,
    product,
    real_projective,
    sphere,
)
from .maps import (
    MapObject,
    build_grid,
    compose,
    cp1_to_sphere,
    homothety_map,
    identity_map,
    normalized_linear_map,
)
from .energy import p_energy
from .rand import make_rng


# ---------------------------------------------------------------------------
# rational curves


@dataclass
class RationalCurveSpec:
    """Degree-d holomorphic curve given by N+1 homogeneous polynomials.

    ``coefficients[i, k]`` multiplies a^(d-k) b^k inside the i-th
    component; the polynomials must have no common zero, checked at 10^3
    random probe points plus the roots of the best-conditioned component
    (any common zero must be among them) after normalizing coefficients.
    """

    N: int
    degree: int
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex)
        if c.shape != (self.N + 1, self.degree + 1):
            raise GeometryError("curve coefficients must have shape (N+1, degree+1)")
        object.__setattr__(self, "coefficients", c)
        scale = np.max(np.abs(c))
        if scale == 0:
            raise GeometryError("curve coefficients are all zero")
        z = complex_projective(1).random_point(make_rng(0), 1000)
        probes = np.concatenate([z, _candidate_zeros(c)], axis=0)
        vals = _homogeneous_eval(c, self.degree, probes)
        if np.min(np.linalg.norm(vals, axis=-1)) / scale < 1e-8:
            raise GeometryError("curve polynomials share a zero")


def _candidate_zeros(c):
    """Points where the component with the largest coefficient vanishes."""
    row = c[np.argmax(np.max(np.abs(c), axis=1))]
    pts = [np.array([1.0 + 0j, 0.0]), np.array([0.0 + 0j, 1.0])]
    for a in np.roots(row):
        q = np.array([a, 1.0 + 0j])
        pts.append(q / np.linalg.norm(q))
    return np.stack(pts, axis=0)


def _homogeneous_eval(c, d, z):
    a, b = z[..., 0], z[..., 1]
    mono = np.stack([a ** (d - k) * b**k for k in range(d + 1)], axis=-1)
    return np.einsum("nk,...k->...n", c, mono)


def _homogeneous_derivative(c, d, z, v):
    """Directional derivative of the polynomial tuple along (va, vb)."""
    a, b = z[..., 0], z[..., 1]
    va, vb = v[..., 0], v[..., 1]
    zero = np.zeros_like(a)
    mono_a = np.stack(
        [(d - k) * a ** (d - k - 1) * b**k if k < d else zero for k in range(d + 1)],
        axis=-1,
    )
    mono_b = np.stack(
        [k * a ** (d - k) * b ** (k - 1) if k > 0 else zero for k in range(d + 1)],
        axis=-1,
    )
    return np.einsum("nk,...k->...n", c, mono_a * va[..., None] + mono_b * vb[..., None])


def make_rational_curve(spec):
    """MapObject of the holomorphic curve described by a RationalCurveSpec."""
    dom = complex_projective(1)
    cod = complex_projective(spec.N)
    c, d = spec.coefficients, spec.degree

    def ev(z):
        y = _homogeneous_eval(c, d, z)
        n = np.linalg.norm(y, axis=-1, keepdims=True)
        return cod.canonicalize(y / n)

    def diff(z, v):
        y = _homogeneous_eval(c, d, z)
        n = np.linalg.norm(y, axis=-1, keepdims=True)
        yh = y / n
        dy = _homogeneous_derivative(c, d, z, v)
        w = cod.project_tangent(yh, dy / n)
        _, f = cod.canonicalize_with_factor(yh)
        return f[..., None] * w

    return MapObject(dom, cod, ev, differential=diff, name=f"curve-deg{d}")


def line_curve(N=2):
    """The degree-1 curve [a : b] -> [a : b : 0 : ...]."""
    c = np.zeros((N + 1, 2), dtype=complex)
    c[0, 0] = 1.0
    c[1, 1] = 1.0
    return RationalCurveSpec(N, 1, c)


def conic_curve():
    """The plane conic [a : b] -> [a^2 - b^2 : i(a^2 + b^2) : 2ab].

    Its components satisfy p0^2 + p1^2 + p2^2 = 0 identically.
    """
    c = np.array(
        [[1.0, 0.0, -1.0], [1j, 0.0, 1j], [0.0, 2.0, 0.0]], dtype=complex
    )
    return RationalCurveSpec(2, 2, c)


def veronese_curve():
    """The quadric Veronese curve [a^2 : sqrt(2) ab : b^2]."""
    c = np.array(
        [[1.0, 0.0, 0.0], [0.0, np.sqrt(2.0), 0.0], [0.0, 0.0, 1.0]], dtype=complex
    )
    return RationalCurveSpec(2, 2, c)


def random_curve(N, degree, seed=0):
    """A random curve spec with Gaussian coefficients (no common zero a.s.)."""
    rng = make_rng(seed)
    c = rng.standard_normal((N + 1, degree + 1)) + 1j * rng.standard_normal(
        (N + 1, degree + 1)
    )
    return RationalCurveSpec(N, degree, c)


# ---------------------------------------------------------------------------
# projective dilations (squeeze toward the reference line)


def reference_line(N):
    """The line spanned by the first two coordinate axes."""
    e0 = np.zeros(N + 1, dtype=complex)
    e1 = np.zeros(N + 1, dtype=complex)
    e0[0] = 1.0
    e1[1] = 1.0
    return LineEmbedding(e0, e1)


def make_projective_dilation(N, lam):
    """[z0 : z1 : z2 : ...] -> [lam z0 : lam z1 : z2 : ...] on CP^N.

    Holomorphic for every lam > 0, the identity at lam = 1, and fixes
    the reference line pointwise.
    """
    if lam <= 0:
        raise GeometryError("dilation parameter must be positive")
    scale = np.ones(N + 1, dtype=complex)
    scale[0] = scale[1] = lam
    M = complex_projective(N)
    return normalized_linear_map(M, M, np.diag(scale), name=f"dilation-{lam:g}")


def squeeze_limit(F, lambdas=(1.0, 2.0, 4.0, 8.0, 16.0), grid=None, line_resolution=4, seed=101):
    """Energies of F after each dilation, plus the squeeze target.

    Returns (sequence, target) where target = C_N * E2(F restricted to
    the reference line), C_N = pi^(N-1)/(N-1)!.  All sequence entries
    share one quadrature grid so the trend is smooth in lam; no
    convergence assertion is made here.
    """
    M = F.domain
    if not isinstance(M, ComplexProjective):
        raise GeometryError("squeeze limits need a complex projective domain")
    N = M.N
    if grid is None:
        grid = build_grid(M, 20000, "monte_carlo", seed=seed)
    seq = np.array(
        [
            p_energy(compose(F, make_projective_dilation(N, lam)), grid, p=2.0).value
            for lam in lambdas
        ]
    )
    line_grid = build_grid(complex_projective(1), line_resolution, "mesh")
    restricted = p_energy(compose(F, reference_line(N).embedding), line_grid, p=2.0)
    c_n = np.pi ** (N - 1) / math.factorial(N - 1)
    return seq, float(c_n * restricted.value)


# ---------------------------------------------------------------------------
# conformal dilations of the 3-sphere and the capped projective variant


def _theta_eval(t, x):
    xp, xw = x[..., :3], x[..., 3:]
    D = (1.0 + t * t) + (1.0 - t * t) * xw
    return np.concatenate([2.0 * t * xp, (1.0 + xw) - t * t * (1.0 - xw)], axis=-1) / D


def _theta_diff(t, x, v):
    xp, xw = x[..., :3], x[..., 3:]
    vp, vw = v[..., :3], v[..., 3:]
    D = (1.0 + t * t) + (1.0 - t * t) * xw
    dD = (1.0 - t * t) * vw
    num_w = (1.0 + xw) - t * t * (1.0 - xw)
    dnum_w = (1.0 + t * t) * vw
    dy_p = 2.0 * t * vp / D - 2.0 * t * xp * dD / D**2
    dy_w = dnum_w / D - num_w * dD / D**2
    return np.concatenate([dy_p, dy_w], axis=-1)


def make_theta(t):
    """Conformal dilation of the 3-sphere toward the last-coordinate pole.

    The identity at t = 1; as t grows the map concentrates the sphere
    into a shrinking polar cap, with conformal factor 2t / D(x).
    """
    if t < 1:
        raise GeometryError("dilations need t >= 1")
    S3 = sphere(3)

    def ev(x):
        return _theta_eval(t, x)

    def diff(x, v):
        return S3.project_tangent(ev(x), _theta_diff(t, x, v))

    return MapObject(S3, S3, ev, differential=diff, name=f"theta-{t:g}")


def make_capped_theta(t):
    """Piecewise dilation of projective 3-space fixing the equator plane.

    On representatives with nonnegative last coordinate: the polar cap
    that the conformal dilation maps onto the upper hemisphere is
    dilated, and the remaining collar is projected radially onto the
    equator plane (pointwise fixed).  Continuous across both seams, the
    identity at t = 1.
    """
    if t < 1:
        raise GeometryError("dilations need t >= 1")
    M = real_projective(3)
    c = (t * t - 1.0) / (t * t + 1.0)

    def _rep(x):
        s = np.where(x[..., 3:] >= 0.0, 1.0, -1.0)
        return s * x, s

    def _collar_eval(xr):
        xp = xr[..., :3]
        n = np.linalg.norm(xp, axis=-1, keepdims=True)
        n = np.where(n > 0.0, n, 1.0)
        return np.concatenate([xp / n, np.zeros_like(xr[..., 3:])], axis=-1)

    def _raw_eval(xr):
        cap = xr[..., 3:] > c
        return np.where(cap, _theta_eval(t, xr), _collar_eval(xr))

    def ev(x):
        xr, _ = _rep(x)
        return M.canonicalize(_raw_eval(xr))

    def diff(x, v):
        xr, s = _rep(x)
        vr = s * v
        cap = xr[..., 3:] > c
        xp, vp = xr[..., :3], vr[..., :3]
        n = np.linalg.norm(xp, axis=-1, keepdims=True)
        n = np.where(n > 0.0, n, 1.0)
        xh = xp / n
        w_col = (vp - np.sum(xh * vp, axis=-1, keepdims=True) * xh) / n
        w_col = np.concatenate([w_col, np.zeros_like(vr[..., 3:])], axis=-1)
        w = np.where(cap, _theta_diff(t, xr, vr), w_col)
        _, f = M.canonicalize_with_factor(_raw_eval(xr))
        return f[..., None] * w

    return MapObject(M, M, ev, differential=diff, smoothness="lipschitz", name=f"capped-theta-{t:g}")


# ---------------------------------------------------------------------------
# standard catalog


def _inclusion_matrix(rows, cols, dtype):
    A = np.zeros((rows, cols), dtype=dtype)
    A[:cols, :cols] = np.eye(cols)
    return A


def cp1_round_sphere_map(r=1.0):
    """Isometry-up-to-scale from the complex projective line to a round
    2-sphere of radius r (the line itself is the round sphere of radius 1/2)."""
    M = complex_projective(1)
    S = sphere(2, r)

    def ev(z):
        return cp1_to_sphere(z)

    def diff(z, v):
        a, b = z[..., 0], z[..., 1]
        va, vb = v[..., 0], v[..., 1]
        cross = np.conj(va) * b + np.conj(a) * vb
        rep_vel = np.stack(
            [
                2.0 * (np.conj(a) * va - np.conj(b) * vb).real,
                2.0 * cross.real,
                2.0 * cross.imag,
            ],
            axis=-1,
        )
        return r * rep_vel

    return MapObject(M, S, ev, differential=diff, name="round-chart")


def product_lift(f, r):
    """Pair a map from a 2-sphere-like domain with a shrink onto S^2(r).

    The lifted map x -> (f(x), shrink(x)) embeds the domain as a graph;
    its energy splits as E2(f) + E2(shrink) and its pullback area tends
    to the pullback area of f as r -> 0.
    """
    dom = f.domain
    if isinstance(dom, Sphere) and dom.n == 2:
        second = homothety_map(dom, sphere(2, r))
    elif isinstance(dom, ComplexProjective) and dom.N == 1:
        second = cp1_round_sphere_map(r)
    else:
        raise GeometryError("product lifts need a 2-sphere or projective-line domain")
    cod = product(f.codomain, second.codomain)

    def ev(x):
        ya = np.asarray(f(x))
        yb = np.asarray(second(x))
        return cod._assemble([ya, yb], x.shape)

    diff = None
    if f.differential is not None:
        def diff(x, v):
            wa = np.asarray(f.differential(x, v))
            wb = np.asarray(second.differential(x, v))
            return cod._assemble([wa, wb], x.shape)

    return MapObject(dom, cod, ev, differential=diff, name=f"{f.name}-lift-{r:g}")


def conjugation_map(N):
    """The antiholomorphic involution [z] -> [conj(z)]."""
    M = complex_projective(N)

    def ev(z):
        return M.canonicalize(np.conj(z))

    def diff(z, v):
        _, f = M.canonicalize_with_factor(np.conj(z))
        return f[..., None] * np.conj(v)

    return MapObject(M, M, ev, differential=diff, name="conjugation")


def standard_maps(key, **kw):
    """Catalog of reference maps addressed by string keys.

    identity(manifold), inclusion_rp(k, n), inclusion_cp(k, N),
    double_cover(), product_lift(f, r), homothety(n, kappa),
    conjugation(N).
    """
    if key == "identity":
        return identity_map(kw["manifold"])
    if key == "inclusion_rp":
        k, n = int(kw["k"]), int(kw["n"])
        if not 1 <= k < n:
            raise GeometryError("inclusion needs 1 <= k < n")
        A = _inclusion_matrix(n + 1, k + 1, float)
        return normalized_linear_map(
            real_projective(k), real_projective(n), A, name=f"inclusion-rp{k}-{n}"
        )
    if key == "inclusion_cp":
        k, N = int(kw["k"]), int(kw["N"])
        if not 1 <= k < N:
            raise GeometryError("inclusion needs 1 <= k < N")
        A = _inclusion_matrix(N + 1, k + 1, complex)
        return normalized_linear_map(
            complex_projective(k), complex_projective(N), A, name=f"inclusion-cp{k}-{N}"
        )
    if key == "double_cover":
        return normalized_linear_map(
            sphere(2), real_projective(2), np.eye(3), name="double-cover"
        )
    if key == "product_lift":
        return product_lift(kw["f"], float(kw["r"]))
    if key == "homothety":
        n = int(kw.get("n", 2))
        return homothety_map(sphere(n), sphere(n, float(kw["kappa"])))
    if key == "conjugation":
        return conjugation_map(int(kw["N"]))
    raise GeometryError(f"unknown catalog key {key!r}")


# ---------------------------------------------------------------------------
# reproducible perturbations of the identity


def perturbed_identity(M, magnitude=0.2, flavor="generic", seed=0):
    """Exp-push of the identity along a fixed polynomial tangent field.

    flavor "generic": the field is the tangent projection of a fixed
    linear ambient field.  flavor "squeeze": the same field modulated by
    the squared modulus of the last coordinate, so it vanishes on the
    reference line (and on the equator plane in the real case).
    Smooth, deterministic in (seed, magnitude), homotopic to the
    identity by scaling the magnitude.
    """
    amb = M.ambient_dim
    rng = make_rng(seed)
    S = rng.standard_normal((amb, amb))
    if M.dtype == np.complex128:
        S = S + 1j * rng.standard_normal((amb, amb))
    S = S / np.linalg.norm(S, 2)
    S = S.astype(M.dtype)

    def field(x):
        v = M.project_tangent(x, np.einsum("ij,...j->...i", S, x))
        if flavor == "squeeze":
            v = v * (np.abs(x[..., -1]) ** 2)[..., None]
        elif flavor != "generic":
            raise GeometryError(f"unknown perturbation flavor {flavor!r}")
        return v

    def ev(x):
        return M.exp(x, magnitude * field(x))

    return MapObject(M, M, ev, name=f"perturbed-{flavor}-{magnitude:g}")
