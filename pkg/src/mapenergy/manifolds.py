"""Model Riemannian manifolds represented by ambient unit vectors.

Points live on the unit sphere of an ambient real or complex vector space:

* ``Sphere(n, r)`` -- round n-sphere of radius r; points are unit
  representatives in R^{n+1}, tangent vectors carry physical length.
* ``RealProjective(n, r)`` -- quotient of the radius-r sphere by the
  antipodal map; representatives have their first nonzero coordinate
  positive.
* ``ComplexProjective(N)`` -- Fubini-Study metric normalized so the
  sectional curvature lies in [1, 4] (quotient of the unit round
  S^{2N+1}); representatives are unit vectors in C^{N+1} with the first
  nonzero coordinate real and positive, tangent vectors are horizontal
  lifts.
* ``Product`` -- finite products with the Euclidean combination of
  factor distances.

All operations broadcast over leading batch axes; the ambient coordinate
axis is always the last one.
"""

import math

import numpy as np
from scipy.special import gammaln

# Guard band around the cut locus for logarithm computations.
CUT_GUARD = 1e-6

_PIVOT_TOL = 1e-8


class GeometryError(ValueError):
    pass


class CutLocusError(GeometryError):
    """Raised when a logarithm is requested at or beyond the cut locus."""


def sphere_volume(n, r=1.0):
    """Volume of the round n-sphere of radius r (sigma(n) * r^n)."""
    log_sigma = math.log(2.0) + 0.5 * (n + 1) * math.log(math.pi) - gammaln(0.5 * (n + 1))
    return math.exp(log_sigma) * r**n


def _norm(v):
    return np.sqrt(np.sum((v * v.conj()).real, axis=-1))


def _dot(u, v):
    """Hermitian inner product, conjugating the first slot."""
    return np.sum(u.conj() * v, axis=-1)


def real_inner(u, v):
    """Riemannian inner product of tangent vectors (real part of the ambient one)."""
    return np.sum((u.conj() * v).real, axis=-1)


def _pivot_factor(x, tol=_PIVOT_TOL):
    """Unit scalar that makes the first coordinate of magnitude > tol real positive."""
    mag = np.abs(x)
    idx = np.argmax(mag > tol, axis=-1)
    pivot = np.take_along_axis(x, idx[..., None], axis=-1)[..., 0]
    if np.iscomplexobj(x):
        return pivot.conj() / np.abs(pivot)
    return np.sign(pivot)


class ModelManifold:
    """Common surface for the model spaces."""

    kind = "abstract"
    is_complex = False

    def canonicalize(self, x):
        return self.canonicalize_with_factor(x)[0]

    def canonicalize_with_factor(self, x):
        """Canonical representative together with the unit scalar applied to x.

        The same scalar maps tangent representatives at x to tangent
        representatives at the canonical point.
        """
        return x, np.ones(x.shape[:-1], dtype=x.dtype)

    def project_tangent(self, x, u):
        raise NotImplementedError

    def inner(self, u, v):
        return real_inner(u, v)

    def norm(self, v):
        return _norm(v)

    def exp(self, x, v):
        raise NotImplementedError

    def log(self, x, y):
        v, ok = self.log_masked(x, y)
        if not np.all(ok):
            raise CutLocusError("log requested at or beyond the cut locus")
        return v

    def log_masked(self, x, y):
        """Logarithm with a validity mask instead of an exception."""
        raise NotImplementedError

    def distance(self, x, y):
        raise NotImplementedError

    def random_point(self, rng, size=()):
        raise NotImplementedError

    def random_unit_tangent(self, rng, x):
        shape = x.shape
        g = rng.standard_normal(shape)
        if self.is_complex or np.iscomplexobj(x):
            g = g + 1j * rng.standard_normal(shape)
        v = self.project_tangent(x, g)
        return v / _norm(v)[..., None]

    def geodesic(self, x, v, t):
        """Point at parameter t along the unit-speed-free geodesic exp_x(t v)."""
        t = np.asarray(t, dtype=float)
        return self.exp(x, t[..., None] * v)


class Sphere(ModelManifold):
    kind = "sphere"

    def __init__(self, n, r=1.0):
        if n < 1 or r <= 0:
            raise GeometryError("need dimension >= 1 and radius > 0")
        self.n = n
        self.dim = n
        self.ambient_dim = n + 1
        self.radius = float(r)
        self.volume = sphere_volume(n, r)
        self.cut_distance = math.pi * self.radius
        self.dtype = np.float64

    def __repr__(self):
        return f"Sphere(n={self.n}, r={self.radius})"

    def project_tangent(self, x, u):
        u = u.real if np.iscomplexobj(u) else u
        return u - np.sum(x * u, axis=-1)[..., None] * x

    def exp(self, x, v):
        theta = _norm(v) / self.radius
        small = theta < 1e-300
        dirs = np.where(small[..., None], x, v / np.where(small, 1.0, theta * self.radius)[..., None])
        y = np.cos(theta)[..., None] * x + np.sin(theta)[..., None] * dirs
        return y / _norm(y)[..., None]

    def log_masked(self, x, y):
        c = np.clip(np.sum(x * y, axis=-1), -1.0, 1.0)
        raw = y - c[..., None] * x
        rn = _norm(raw)
        # |raw| = sin(theta); atan2 keeps full precision at small angles
        theta = np.arctan2(rn, c)
        ok = self.radius * theta < self.cut_distance - CUT_GUARD
        safe = rn > 1e-300
        v = (self.radius * theta / np.where(safe, rn, 1.0))[..., None] * raw
        v = np.where(safe[..., None], v, 0.0)
        return v, ok

    def distance(self, x, y):
        c = np.clip(np.sum(x * y, axis=-1), -1.0, 1.0)
        return self.radius * np.arccos(c)

    def random_point(self, rng, size=()):
        if isinstance(size, int):
            size = (size,)
        g = rng.standard_normal(size + (self.ambient_dim,))
        return g / _norm(g)[..., None]

    def random_isometry(self, rng):
        q, r = np.linalg.qr(rng.standard_normal((self.ambient_dim, self.ambient_dim)))
        return q * np.sign(np.diag(r))

    def apply_isometry(self, q, x):
        return x @ q.T

    def killing_field(self, a, x):
        """Value at x of the Killing field generated by the skew matrix a."""
        return self.radius * np.einsum("ij,...j->...i", a, x)


class RealProjective(ModelManifold):
    kind = "real_projective"

    def __init__(self, n, r=1.0):
        if n < 1 or r <= 0:
            raise GeometryError("need dimension >= 1 and radius > 0")
        self.n = n
        self.dim = n
        self.ambient_dim = n + 1
        self.radius = float(r)
        self.volume = sphere_volume(n, r) / 2.0
        self.cut_distance = math.pi * self.radius / 2.0
        self.dtype = np.float64

    def __repr__(self):
        if self.radius == 1.0:
            return f"RealProjective(n={self.n})"
        return f"RealProjective(n={self.n}, r={self.radius})"

    def canonicalize_with_factor(self, x):
        f = _pivot_factor(x)
        return x * f[..., None], f

    def project_tangent(self, x, u):
        u = u.real if np.iscomplexobj(u) else u
        return u - np.sum(x * u, axis=-1)[..., None] * x

    def exp(self, x, v):
        theta = _norm(v) / self.radius
        small = theta < 1e-300
        dirs = np.where(small[..., None], x, v / np.where(small, 1.0, theta * self.radius)[..., None])
        y = np.cos(theta)[..., None] * x + np.sin(theta)[..., None] * dirs
        return self.canonicalize(y / _norm(y)[..., None])

    def log_masked(self, x, y):
        c = np.sum(x * y, axis=-1)
        s = np.where(c >= 0, 1.0, -1.0)
        c = np.clip(np.abs(c), 0.0, 1.0)
        raw = s[..., None] * y - c[..., None] * x
        rn = _norm(raw)
        theta = np.arctan2(rn, c)
        ok = self.radius * theta < self.cut_distance - CUT_GUARD
        safe = rn > 1e-300
        v = (self.radius * theta / np.where(safe, rn, 1.0))[..., None] * raw
        v = np.where(safe[..., None], v, 0.0)
        return v, ok

    def distance(self, x, y):
        c = np.clip(np.abs(np.sum(x * y, axis=-1)), 0.0, 1.0)
        return self.radius * np.arccos(c)

    def random_point(self, rng, size=()):
        if isinstance(size, int):
            size = (size,)
        g = rng.standard_normal(size + (self.ambient_dim,))
        return self.canonicalize(g / _norm(g)[..., None])

    def random_isometry(self, rng):
        q, r = np.linalg.qr(rng.standard_normal((self.ambient_dim, self.ambient_dim)))
        return q * np.sign(np.diag(r))

    def apply_isometry(self, q, x):
        return self.canonicalize(x @ q.T)

    def killing_field(self, a, x):
        return self.radius * np.einsum("ij,...j->...i", a, x)


class ComplexProjective(ModelManifold):
    kind = "complex_projective"
    is_complex = True

    def __init__(self, N):
        if N < 1:
            raise GeometryError("need complex dimension >= 1")
        self.N = N
        self.dim = 2 * N
        self.ambient_dim = N + 1
        self.volume = math.pi**N / math.factorial(N)
        self.cut_distance = math.pi / 2.0
        self.dtype = np.complex128

    def __repr__(self):
        return f"ComplexProjective(N={self.N})"

    def canonicalize_with_factor(self, x):
        f = _pivot_factor(x)
        return x * f[..., None], f

    def project_tangent(self, x, u):
        """Horizontal projection: remove the complex span of the representative."""
        u = u.astype(np.complex128, copy=False)
        return u - _dot(x, u)[..., None] * x

    def exp(self, x, v):
        theta = _norm(v)
        small = theta < 1e-300
        dirs = np.where(small[..., None], x, v / np.where(small, 1.0, theta)[..., None])
        y = np.cos(theta)[..., None] * x + np.sin(theta)[..., None] * dirs
        return self.canonicalize(y / _norm(y)[..., None])

    def log_masked(self, x, y):
        h = _dot(x, y)
        r = np.abs(h)
        phase = np.where(r > 1e-300, h.conj() / np.where(r > 1e-300, r, 1.0), 1.0 + 0j)
        c = np.clip(r, 0.0, 1.0)
        raw = phase[..., None] * y - c[..., None] * x
        rn = _norm(raw)
        theta = np.arctan2(rn, c)
        ok = theta < self.cut_distance - CUT_GUARD
        safe = rn > 1e-300
        v = (theta / np.where(safe, rn, 1.0))[..., None] * raw
        v = np.where(safe[..., None], v, 0.0)
        return v, ok

    def distance(self, x, y):
        c = np.clip(np.abs(_dot(x, y)), 0.0, 1.0)
        return np.arccos(c)

    def complex_structure(self, x, v):
        """Multiplication by i on horizontal lifts (the Kaehler J)."""
        return 1j * v

    def random_point(self, rng, size=()):
        if isinstance(size, int):
            size = (size,)
        shape = size + (self.ambient_dim,)
        g = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        return self.canonicalize(g / _norm(g)[..., None])

    def random_isometry(self, rng):
        shape = (self.ambient_dim, self.ambient_dim)
        g = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        q, r = np.linalg.qr(g)
        d = np.diag(r)
        return q * (d.conj() / np.abs(d))

    def apply_isometry(self, u, x):
        return self.canonicalize(x @ u.T)

    def killing_field(self, a, x):
        """Horizontal value at x of the field generated by skew-Hermitian a."""
        return self.project_tangent(x, np.einsum("ij,...j->...i", a, x))

    def killing_derivative(self, a, x, w):
        """Covariant derivative of the Killing field of a along horizontal w at x."""
        aw = np.einsum("ij,...j->...i", a, w)
        return self.project_tangent(x, aw) - _dot(x, np.einsum("ij,...j->...i", a, x))[..., None] * w


class Product(ModelManifold):
    kind = "product"

    def __init__(self, factors):
        if not factors:
            raise GeometryError("need at least one factor")
        self.factors = tuple(factors)
        self.dim = sum(f.dim for f in self.factors)
        self.ambient_dim = sum(f.ambient_dim for f in self.factors)
        self.volume = math.prod(f.volume for f in self.factors)
        self.cut_distance = min(f.cut_distance for f in self.factors)
        self.is_complex = any(f.is_complex for f in self.factors)
        self.dtype = np.complex128 if self.is_complex else np.float64
        self.slices = []
        lo = 0
        for f in self.factors:
            self.slices.append(slice(lo, lo + f.ambient_dim))
            lo += f.ambient_dim

    def __repr__(self):
        return "Product(" + ", ".join(repr(f) for f in self.factors) + ")"

    def _blocks(self, x):
        return [self._cast(x[..., s], f) for f, s in zip(self.factors, self.slices)]

    @staticmethod
    def _cast(block, factor):
        if factor.is_complex:
            return block.astype(np.complex128, copy=False)
        return block.real if np.iscomplexobj(block) else block

    def _assemble(self, blocks, shape=None):
        lead = np.broadcast_shapes(*[b.shape[:-1] for b in blocks])
        out = np.zeros(lead + (self.ambient_dim,), dtype=self.dtype)
        for b, s in zip(blocks, self.slices):
            out[..., s] = b
        return out

    def canonicalize_with_factor(self, x):
        blocks = []
        for f, b in zip(self.factors, self._blocks(x)):
            blocks.append(f.canonicalize(b))
        return self._assemble(blocks, x.shape), np.ones(x.shape[:-1], dtype=self.dtype)

    def project_tangent(self, x, u):
        xb = self._blocks(x)
        ub = self._blocks(u)
        return self._assemble([f.project_tangent(a, b) for f, a, b in zip(self.factors, xb, ub)], x.shape)

    def exp(self, x, v):
        xb = self._blocks(x)
        vb = self._blocks(v)
        return self._assemble([f.exp(a, b) for f, a, b in zip(self.factors, xb, vb)], x.shape)

    def log_masked(self, x, y):
        xb = self._blocks(x)
        yb = self._blocks(y)
        vs, ok = [], True
        for f, a, b in zip(self.factors, xb, yb):
            v, m = f.log_masked(a, b)
            vs.append(v)
            ok = np.logical_and(ok, m)
        return self._assemble(vs, x.shape), ok

    def distance(self, x, y):
        xb = self._blocks(x)
        yb = self._blocks(y)
        d2 = 0.0
        for f, a, b in zip(self.factors, xb, yb):
            d2 = d2 + f.distance(a, b) ** 2
        return np.sqrt(d2)

    def random_point(self, rng, size=()):
        if isinstance(size, int):
            size = (size,)
        blocks = [f.random_point(rng, size) for f in self.factors]
        return self._assemble(blocks, size + (self.ambient_dim,))


def sphere(n, r=1.0):
    return Sphere(n, r)


def real_projective(n, r=1.0):
    return RealProjective(n, r)


def complex_projective(N):
    return ComplexProjective(N)


def product(*factors):
    return Product(factors)


# ---------------------------------------------------------------------------
# Lie algebra helpers for isometry groups.

def so_basis(m):
    """Basis of so(m), orthonormal for the Frobenius inner product -tr(XY)."""
    out = []
    for i in range(m):
        for j in range(i + 1, m):
            a = np.zeros((m, m))
            a[i, j] = 1.0 / math.sqrt(2.0)
            a[j, i] = -1.0 / math.sqrt(2.0)
            out.append(a)
    return out


def su_basis(m):
    """Basis of su(m) (skew-Hermitian traceless), Frobenius-orthonormal.

    The Frobenius pairing -tr(XY) is a fixed positive multiple of the
    negative Killing form on su(m), so traces of bilinear forms over this
    basis vanish exactly when they vanish over a Killing-orthonormal one.
    """
    out = []
    s = 1.0 / math.sqrt(2.0)
    for i in range(m):
        for j in range(i + 1, m):
            a = np.zeros((m, m), dtype=complex)
            a[i, j] = s
            a[j, i] = -s
            out.append(a)
            b = np.zeros((m, m), dtype=complex)
            b[i, j] = 1j * s
            b[j, i] = 1j * s
            out.append(b)
    for k in range(1, m):
        d = np.zeros(m)
        d[:k] = 1.0
        d[k] = -k
        a = np.diag(1j * d / math.sqrt(k * (k + 1.0)))
        out.append(a)
    return out


def u_basis(m):
    """su(m) plus the central direction i*Id (Frobenius-normalized)."""
    return su_basis(m) + [1j * np.eye(m) / math.sqrt(m)]


def pluriharmonic_generator(M, x, e):
    """Element of u(N+1) whose Killing field vanishes at x with derivative J on C e.

    For a unit horizontal e at x the generated field V satisfies
    V(x) = 0, grad_e V = J e, grad_{J e} V = -e, and grad_{e'} V = 0 for
    horizontal e' complex-orthogonal to e.
    """
    if not isinstance(M, ComplexProjective):
        raise GeometryError("defined for complex projective targets only")
    return 1j * np.outer(e, e.conj())
