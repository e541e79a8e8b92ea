"""Triangle meshes on the unit 2-sphere.

Meshes are subdivided icosahedra.  Subdivision normalizes edge midpoints,
so every level keeps the exact antipodal symmetry of the icosahedron;
vertex quadrature weights come from spherical triangle areas and sum to
4*pi up to roundoff.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass
class SphereMesh:
    vertices: np.ndarray  # (V, 3) unit
    triangles: np.ndarray  # (T, 3) int
    level: int

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def edges(self):
        return mesh_edges(self.triangles)


def icosahedron():
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    v = []
    for a, b in [(1.0, phi), (-1.0, phi), (1.0, -phi), (-1.0, -phi)]:
        v.append((a, b, 0.0))
        v.append((0.0, a, b))
        v.append((b, 0.0, a))
    v = np.array(v)
    v = v / np.linalg.norm(v, axis=-1, keepdims=True)
    # faces by nearest-neighbor adjacency of the 12 vertices
    d = v @ v.T
    adj = d > 0.3
    np.fill_diagonal(adj, False)
    faces = set()
    for i in range(12):
        for j in range(i + 1, 12):
            if not adj[i, j]:
                continue
            for k in range(j + 1, 12):
                if adj[i, k] and adj[j, k]:
                    faces.add((i, j, k))
    faces = np.array(sorted(faces))
    # orient faces outward
    for f in faces:
        a, b, c = v[f]
        if np.dot(np.cross(b - a, c - a), a + b + c) < 0:
            f[1], f[2] = f[2], f[1]
    return v, faces


def _subdivide(vertices, faces):
    verts = [tuple(p) for p in vertices]
    cache = {}

    def midpoint(i, j):
        key = (i, j) if i < j else (j, i)
        if key in cache:
            return cache[key]
        p = vertices[i] + vertices[j]
        p = p / np.linalg.norm(p)
        verts.append(tuple(p))
        cache[key] = len(verts) - 1
        return cache[key]

    out = []
    for a, b, c in faces:
        ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
        out.extend([(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)])
    return np.array(verts), np.array(out)


@lru_cache(maxsize=None)
def icosphere(level):
    """Icosahedral mesh after `level` rounds of midpoint subdivision."""
    v, f = icosahedron()
    for _ in range(level):
        v, f = _subdivide(v, f)
    return SphereMesh(vertices=v, triangles=f, level=level)


def spherical_triangle_areas(vertices, triangles):
    """Areas of the geodesic triangles (Oosterom-Strackee solid angle)."""
    a = vertices[triangles[:, 0]]
    b = vertices[triangles[:, 1]]
    c = vertices[triangles[:, 2]]
    num = np.abs(np.einsum("ij,ij->i", a, np.cross(b, c)))
    den = 1.0 + np.einsum("ij,ij->i", a, b) + np.einsum("ij,ij->i", b, c) + np.einsum("ij,ij->i", a, c)
    return 2.0 * np.arctan2(num, den)


def vertex_areas(mesh):
    """Lumped vertex weights: one third of each incident spherical triangle."""
    areas = spherical_triangle_areas(mesh.vertices, mesh.triangles)
    w = np.zeros(len(mesh.vertices))
    for k in range(3):
        np.add.at(w, mesh.triangles[:, k], areas / 3.0)
    return w


def mesh_edges(triangles):
    e = np.vstack([triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]])
    e = np.sort(e, axis=1)
    return np.unique(e, axis=0)


def geodesic_edge_lengths(vertices, pairs):
    c = np.clip(np.einsum("ij,ij->i", vertices[pairs[:, 0]], vertices[pairs[:, 1]]), -1.0, 1.0)
    return np.arccos(c)


def cotangent_weights(mesh):
    """Per-edge cotangent weights from intrinsic (geodesic) edge lengths.

    Each triangle is flattened to the Euclidean triangle with the same
    geodesic side lengths; every edge receives half the cotangent of the
    opposite angle from each adjacent triangle.
    """
    tri = mesh.triangles
    v = mesh.vertices

    def side(i, j):
        c = np.clip(np.einsum("ij,ij->i", v[tri[:, i]], v[tri[:, j]]), -1.0, 1.0)
        return np.arccos(c)

    a = side(1, 2)  # opposite vertex 0
    b = side(2, 0)
    c = side(0, 1)

    def cot_opposite(opp, s1, s2):
        cos_a = (s1**2 + s2**2 - opp**2) / (2.0 * s1 * s2)
        cos_a = np.clip(cos_a, -1.0, 1.0)
        return cos_a / np.sqrt(np.maximum(1.0 - cos_a**2, 1e-300))

    cots = [cot_opposite(a, b, c), cot_opposite(b, c, a), cot_opposite(c, a, b)]
    weights = {}
    for k, (i, j) in enumerate([(1, 2), (2, 0), (0, 1)]):
        p = np.sort(np.stack([tri[:, i], tri[:, j]], axis=1), axis=1)
        for (pi, pj), ct in zip(p, cots[k]):
            weights[(pi, pj)] = weights.get((pi, pj), 0.0) + 0.5 * ct
    pairs = np.array(sorted(weights))
    w = np.array([weights[tuple(p)] for p in pairs])
    return pairs, w


def antipodal_permutation(mesh):
    """Index permutation sending each vertex to its exact antipode."""
    # adding 0.0 collapses signed zeros so byte-level lookup is reliable
    lookup = {(v + 0.0).tobytes(): i for i, v in enumerate(mesh.vertices)}
    perm = np.empty(len(mesh.vertices), dtype=int)
    for i, v in enumerate(mesh.vertices):
        j = lookup.get((-v + 0.0).tobytes())
        if j is None:
            raise ValueError("mesh is not antipodally symmetric")
        perm[i] = j
    return perm


def mesh_to_csv(mesh, path):
    with open(path, "w") as fh:
        fh.write("# vertices %d triangles %d level %d\n" % (len(mesh.vertices), len(mesh.triangles), mesh.level))
        fh.write("vx,vy,vz\n")
        for p in mesh.vertices:
            fh.write(",".join("%.17g" % c for c in p) + "\n")
        fh.write("i,j,k\n")
        for t in mesh.triangles:
            fh.write(",".join(str(int(c)) for c in t) + "\n")


def mesh_from_csv(path):
    with open(path) as fh:
        header = fh.readline().split()
        nv, nt, level = int(header[2]), int(header[4]), int(header[6])
        fh.readline()
        verts = np.array([[float(c) for c in fh.readline().split(",")] for _ in range(nv)])
        fh.readline()
        tris = np.array([[int(c) for c in fh.readline().split(",")] for _ in range(nt)])
    return SphereMesh(vertices=verts, triangles=tris, level=level)
