"""Triangle meshes: construction, validation, serialization, P1 gradients.

Two generators cover the package's needs.  make_disk builds a deterministic
concentric-ring triangulation of a disk (ring k carries 6k evenly spaced
vertices, so the mesh is six-fold symmetric and nearly radial, which the
radial-symmetry diagnostics rely on).  make_polygon triangulates a simple
counterclockwise polygon by subdividing its outline, seeding interior
Steiner points on a hexagonal lattice kept clear of the boundary, and
taking the Delaunay triangulation restricted to the polygon.  The clearance
guarantees every boundary sub-segment has an empty diametral circle and is
therefore recovered as a triangulation edge, so the triangles tile the
polygon exactly.

Meshes are stored as vertex coordinates, counterclockwise vertex triples,
and boundary edges oriented with the domain on the left.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import Delaunay, cKDTree
from shapely import contains_xy, prepare
from shapely.geometry import Polygon

from .core import MeshError

__all__ = [
    "TriMesh",
    "DiscreteField",
    "make_disk",
    "make_polygon",
    "load_mesh",
    "save_mesh",
    "p1_gradient",
]

# Interior Steiner points stay at least this many target spacings away from
# the outline; anything above 0.5 keeps boundary sub-segments' diametral
# circles empty, which forces them into the Delaunay triangulation.
_BOUNDARY_CLEARANCE = 0.55
# Hexagonal lattice pitch as a fraction of the target spacing.
_LATTICE_PITCH = 0.95
_MIN_ANGLE_DEG = 20.0
_MAX_BUILD_ATTEMPTS = 10


@dataclass
class TriMesh:
    """Conforming triangle mesh with an oriented boundary."""

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    _areas: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.vertices = np.ascontiguousarray(self.vertices, dtype=float)
        self.triangles = np.ascontiguousarray(self.triangles, dtype=np.int64)
        self.boundary_edges = np.ascontiguousarray(self.boundary_edges, dtype=np.int64)

    # -- derived quantities ------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def triangle_areas(self) -> np.ndarray:
        if self._areas is None:
            p0 = self.vertices[self.triangles[:, 0]]
            p1 = self.vertices[self.triangles[:, 1]]
            p2 = self.vertices[self.triangles[:, 2]]
            u, v = p1 - p0, p2 - p0
            self._areas = 0.5 * (u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])
        return self._areas

    def area(self) -> float:
        return float(np.sum(self.triangle_areas()))

    def boundary_lengths(self) -> np.ndarray:
        a = self.vertices[self.boundary_edges[:, 0]]
        b = self.vertices[self.boundary_edges[:, 1]]
        return np.linalg.norm(b - a, axis=1)

    def boundary_length(self) -> float:
        return float(np.sum(self.boundary_lengths()))

    def boundary_normals(self) -> np.ndarray:
        """Outward unit normal per boundary edge (domain lies on the left)."""
        a = self.vertices[self.boundary_edges[:, 0]]
        b = self.vertices[self.boundary_edges[:, 1]]
        t = b - a
        t /= np.linalg.norm(t, axis=1)[:, None]
        return np.column_stack([t[:, 1], -t[:, 0]])

    def boundary_vertex_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_vertices, dtype=bool)
        mask[self.boundary_edges.ravel()] = True
        return mask

    def min_angle(self) -> float:
        """Smallest interior angle over all triangles, in degrees."""
        p = self.vertices[self.triangles]
        angles = np.empty((self.n_triangles, 3))
        for i in range(3):
            u = p[:, (i + 1) % 3] - p[:, i]
            v = p[:, (i + 2) % 3] - p[:, i]
            cosang = np.einsum("ij,ij->i", u, v) / (
                np.linalg.norm(u, axis=1) * np.linalg.norm(v, axis=1)
            )
            angles[:, i] = np.degrees(np.arccos(np.clip(cosang, -1.0, 1.0)))
        return float(np.min(angles))

    def max_edge_length(self) -> float:
        p = self.vertices[self.triangles]
        worst = 0.0
        for i in range(3):
            d = np.linalg.norm(p[:, (i + 1) % 3] - p[:, i], axis=1)
            worst = max(worst, float(np.max(d)))
        return worst

    # -- validation ---------------------------------------------------------

    def validate(self) -> None:
        """Check structural invariants; raise MeshError naming the offender."""
        v, t, be = self.vertices, self.triangles, self.boundary_edges
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise MeshError(f"vertices must be an (n, 2) array with n >= 3, got {v.shape}")
        if not np.all(np.isfinite(v)):
            idx = int(np.argwhere(~np.isfinite(v))[0][0])
            raise MeshError(f"non-finite vertex coordinate at index {idx}")
        if t.ndim != 2 or t.shape[1] != 3 or len(t) < 1:
            raise MeshError(f"triangles must be an (m, 3) array with m >= 1, got {t.shape}")
        if t.min() < 0 or t.max() >= len(v):
            idx = int(np.argwhere((t < 0) | (t >= len(v)))[0][0])
            raise MeshError(f"triangle {idx} references a vertex out of range")
        areas = self.triangle_areas()
        if np.any(areas <= 0.0):
            idx = int(np.argmin(areas))
            raise MeshError(
                f"triangle {idx} is clockwise or degenerate (signed area {areas[idx]:.3e})"
            )
        tree = cKDTree(v)
        pairs = tree.query_pairs(1.0e-12)
        if pairs:
            i, j = sorted(next(iter(pairs)))
            raise MeshError(f"vertices {i} and {j} coincide within 1e-12")

        # every directed triangle edge, with its reverse, classifies interior
        # versus boundary: interior edges appear in both directions exactly
        # once, boundary edges in one direction only
        directed = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        und = np.sort(directed, axis=1)
        _, inverse, counts = np.unique(und, axis=0, return_inverse=True, return_counts=True)
        if counts.max() > 2:
            bad = directed[np.argwhere(counts[inverse] > 2)[0][0]]
            raise MeshError(f"edge ({bad[0]}, {bad[1]}) is shared by more than two triangles")
        topo_boundary = directed[counts[inverse] == 1]
        if be.ndim != 2 or be.shape[1] != 2:
            raise MeshError(f"boundary_edges must be an (k, 2) array, got {be.shape}")
        declared = {(int(a), int(b)) for a, b in be}
        if len(declared) != len(be):
            raise MeshError("duplicate boundary edge declared")
        actual = {(int(a), int(b)) for a, b in topo_boundary}
        if declared != actual:
            missing = actual - declared
            extra = declared - actual
            if missing:
                a, b = next(iter(missing))
                raise MeshError(
                    f"boundary edge ({a}, {b}) of the triangulation is missing from the "
                    f"declared boundary (or declared with the domain on the wrong side)"
                )
            a, b = next(iter(extra))
            raise MeshError(f"declared boundary edge ({a}, {b}) is not on the boundary")
        # closed loops: every boundary vertex has exactly one incoming and
        # one outgoing declared edge
        heads = np.sort(be[:, 1])
        tails = np.sort(be[:, 0])
        if not np.array_equal(heads, tails):
            open_v = int(np.setdiff1d(be[:, 0], be[:, 1])[0]) if len(
                np.setdiff1d(be[:, 0], be[:, 1])
            ) else int(be[0, 0])
            raise MeshError(f"boundary is not a closed loop near vertex {open_v}")
        if len(np.unique(tails)) != len(tails):
            dup = int(tails[np.argwhere(np.diff(tails) == 0)[0][0]])
            raise MeshError(f"boundary forks at vertex {dup}")


@dataclass
class DiscreteField:
    """P1 field: one value per mesh vertex."""

    mesh: TriMesh
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.mesh.n_vertices,):
            raise ValueError(
                f"field has {self.values.shape} values for {self.mesh.n_vertices} vertices"
            )


def make_disk(radius: float, target_h: float) -> TriMesh:
    """Concentric-ring triangulation of the disk of the given radius.

    Ring k (k = 1..n, n = ceil(radius / target_h)) carries 6k vertices at
    radius k * radius / n, giving near-equilateral triangles of size about
    radius / n <= target_h and exactly six-fold symmetry.  Boundary vertices
    lie exactly on the circle.
    """
    if radius <= 0.0 or not math.isfinite(radius):
        raise MeshError(f"radius must be positive, got {radius}")
    if target_h <= 0.0 or not math.isfinite(target_h):
        raise MeshError(f"target_h must be positive, got {target_h}")
    n = max(1, math.ceil(radius / target_h))
    verts = [(0.0, 0.0)]
    ring_start = [0]  # index of the first vertex of ring k
    for k in range(1, n + 1):
        ring_start.append(len(verts))
        rk = radius * k / n
        ang = 2.0 * math.pi * np.arange(6 * k) / (6 * k)
        verts.extend(zip(rk * np.cos(ang), rk * np.sin(ang)))
    vertices = np.array(verts)

    tris = []
    # center fan
    first = ring_start[1]
    for j in range(6):
        tris.append((0, first + j, first + (j + 1) % 6))
    # annulus zipper between ring k and ring k+1; angle comparisons are done
    # with integer cross-multiplication so ties at shared sector boundaries
    # resolve identically on every run
    for k in range(1, n):
        m_in, m_out = 6 * k, 6 * (k + 1)
        inner, outer = ring_start[k], ring_start[k + 1]
        i = j = 0
        while i < m_in or j < m_out:
            advance_outer = j < m_out and (i >= m_in or (j + 1) * m_in < (i + 1) * m_out)
            if advance_outer:
                tris.append((inner + i % m_in, outer + j % m_out, outer + (j + 1) % m_out))
                j += 1
            else:
                tris.append((inner + i % m_in, outer + j % m_out, inner + (i + 1) % m_in))
                i += 1
    triangles = np.array(tris, dtype=np.int64)

    last = ring_start[n]
    mb = 6 * n
    boundary = np.column_stack([last + np.arange(mb), last + (np.arange(mb) + 1) % mb])
    mesh = TriMesh(vertices, triangles, boundary)
    mesh.validate()
    return mesh


def _subdivide_outline(outline: np.ndarray, target_h: float):
    """Outline points plus evenly spaced subdivision points, in boundary order."""
    pts = []
    nv = len(outline)
    for i in range(nv):
        a, b = outline[i], outline[(i + 1) % nv]
        length = float(np.linalg.norm(b - a))
        k = max(1, math.ceil(length / target_h))
        for s in range(k):
            pts.append(a + (b - a) * (s / k))
    return np.array(pts)


def _hex_lattice(bbox, pitch: float, rng: np.random.Generator | None):
    (xmin, ymin), (xmax, ymax) = bbox
    dy = pitch * math.sqrt(3.0) / 2.0
    # center the lattice in the box so clipping against the outline is as
    # symmetric as the outline itself
    nx = int(math.floor((xmax - xmin) / pitch))
    ny = int(math.floor((ymax - ymin) / dy))
    x0 = xmin + 0.5 * ((xmax - xmin) - nx * pitch)
    y0 = ymin + 0.5 * ((ymax - ymin) - ny * dy)
    rows = []
    for row in range(ny + 1):
        xs = x0 + pitch * np.arange(nx + 1) + (0.5 * pitch if row % 2 else 0.0)
        xs = xs[xs <= xmax + 1.0e-12]
        y = y0 + row * dy
        rows.append(np.column_stack([xs, np.full_like(xs, y)]))
    pts = np.concatenate(rows) if rows else np.empty((0, 2))
    if rng is not None and len(pts):
        pts = pts + rng.uniform(-0.12 * pitch, 0.12 * pitch, pts.shape)
    return pts


def _distance_to_segments(points: np.ndarray, seg_a: np.ndarray, seg_b: np.ndarray):
    """Min distance from each point to a set of segments, chunked."""
    out = np.full(len(points), np.inf)
    d = seg_b - seg_a
    seg_len2 = np.maximum(np.einsum("ij,ij->i", d, d), 1.0e-300)
    chunk = max(1, int(4.0e6 / max(1, len(seg_a))))
    for s in range(0, len(points), chunk):
        p = points[s : s + chunk]
        w = p[:, None, :] - seg_a[None, :, :]
        t = np.clip(np.einsum("ijk,jk->ij", w, d) / seg_len2[None, :], 0.0, 1.0)
        closest = seg_a[None, :, :] + t[:, :, None] * d[None, :, :]
        dist = np.linalg.norm(p[:, None, :] - closest, axis=2)
        out[s : s + chunk] = dist.min(axis=1)
    return out


def make_polygon(outline, target_h: float) -> TriMesh:
    """Triangulate a simple counterclockwise polygon at the target spacing.

    The outline is subdivided to spacing <= target_h, interior Steiner
    points are laid on a hexagonal lattice kept _BOUNDARY_CLEARANCE *
    target_h away from the outline, and the Delaunay triangulation of all
    points is restricted to the polygon.  If the boundary fails to be
    recovered or the minimum angle dips below 20 degrees the lattice is
    jittered and the build retried.
    """
    outline = np.asarray(outline, dtype=float)
    if outline.ndim != 2 or outline.shape[1] != 2 or len(outline) < 3:
        raise MeshError(f"outline must be an (n, 2) array with n >= 3, got {outline.shape}")
    if target_h <= 0.0 or not math.isfinite(target_h):
        raise MeshError(f"target_h must be positive, got {target_h}")
    poly = Polygon(outline)
    if not poly.is_valid or poly.area <= 0.0:
        raise MeshError("outline is self-intersecting or degenerate")
    nxt = np.roll(outline, -1, axis=0)
    signed2 = float(np.sum(outline[:, 0] * nxt[:, 1] - outline[:, 1] * nxt[:, 0]))
    if signed2 <= 0.0:
        raise MeshError("outline must be counterclockwise")
    prepare(poly)

    boundary_pts = _subdivide_outline(outline, target_h)
    nb = len(boundary_pts)
    seg_a = boundary_pts
    seg_b = np.roll(boundary_pts, -1, axis=0)
    bbox = (outline.min(axis=0), outline.max(axis=0))
    clearance = _BOUNDARY_CLEARANCE * target_h

    last_err = "unknown"
    for attempt in range(_MAX_BUILD_ATTEMPTS):
        rng = None if attempt == 0 else np.random.default_rng(attempt)
        lattice = _hex_lattice(bbox, _LATTICE_PITCH * target_h, rng)
        if len(lattice):
            inside = contains_xy(poly, lattice[:, 0], lattice[:, 1])
            lattice = lattice[inside]
        if len(lattice):
            far = _distance_to_segments(lattice, seg_a, seg_b) >= clearance
            lattice = lattice[far]
        points = np.concatenate([boundary_pts, lattice]) if len(lattice) else boundary_pts

        mesh = _triangulate_culled(points, nb, poly)
        if mesh is None:
            last_err = "boundary not recovered by the triangulation"
            continue
        if mesh.min_angle() < _MIN_ANGLE_DEG:
            last_err = f"minimum angle {mesh.min_angle():.2f} deg below {_MIN_ANGLE_DEG}"
            continue
        mesh.validate()
        return mesh
    raise MeshError(
        f"could not mesh the polygon at target_h={target_h} after "
        f"{_MAX_BUILD_ATTEMPTS} attempts: {last_err}"
    )


def _triangulate_culled(points: np.ndarray, nb: int, poly) -> TriMesh | None:
    """Delaunay of the point set restricted to the polygon.

    Returns None if the subdivided outline is not exactly the boundary of
    the restricted triangulation (the retry loop handles that).
    """
    tri = Delaunay(points)
    simplices = tri.simplices
    p0 = points[simplices[:, 0]]
    p1 = points[simplices[:, 1]]
    p2 = points[simplices[:, 2]]
    u, v = p1 - p0, p2 - p0
    signed = 0.5 * (u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])
    flip = signed < 0.0
    simplices[flip] = simplices[flip][:, [0, 2, 1]]
    signed = np.abs(signed)
    scale2 = poly.area
    keep = signed > 1.0e-14 * scale2
    simplices = simplices[keep]
    cent = points[simplices].mean(axis=1)
    inside = contains_xy(poly, cent[:, 0], cent[:, 1])
    simplices = simplices[inside]
    if len(simplices) == 0:
        return None

    directed = np.concatenate(
        [simplices[:, [0, 1]], simplices[:, [1, 2]], simplices[:, [2, 0]]]
    )
    und = np.sort(directed, axis=1)
    _, inverse, counts = np.unique(und, axis=0, return_inverse=True, return_counts=True)
    boundary = directed[counts[inverse] == 1]
    expected = set(zip(range(nb), list(range(1, nb)) + [0]))
    actual = {(int(a), int(b)) for a, b in boundary}
    if actual != expected:
        return None

    used = np.unique(simplices)
    if len(used) != len(points):
        # orphaned Steiner points (culled with their triangles); compact them
        remap = -np.ones(len(points), dtype=np.int64)
        remap[used] = np.arange(len(used))
        points = points[used]
        simplices = remap[simplices]
        boundary = remap[boundary]
    return TriMesh(points, simplices, boundary)


def save_mesh(mesh: TriMesh, path) -> None:
    doc = {
        "vertices": mesh.vertices.tolist(),
        "triangles": mesh.triangles.tolist(),
        "boundary_edges": mesh.boundary_edges.tolist(),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_mesh(path) -> TriMesh:
    with open(path) as fh:
        doc = json.load(fh)
    for key in ("vertices", "triangles", "boundary_edges"):
        if key not in doc:
            raise MeshError(f"mesh file is missing the '{key}' field")
    mesh = TriMesh(
        np.asarray(doc["vertices"], dtype=float),
        np.asarray(doc["triangles"], dtype=np.int64),
        np.asarray(doc["boundary_edges"], dtype=np.int64),
    )
    mesh.validate()
    return mesh


def p1_gradient(mesh: TriMesh, values) -> np.ndarray:
    """Per-triangle constant gradient of the P1 interpolant of vertex values."""
    v = np.asarray(values, dtype=float)
    if v.shape != (mesh.n_vertices,):
        raise ValueError(f"expected {mesh.n_vertices} vertex values, got shape {v.shape}")
    t = mesh.triangles
    p0 = mesh.vertices[t[:, 0]]
    e1 = mesh.vertices[t[:, 1]] - p0
    e2 = mesh.vertices[t[:, 2]] - p0
    d1 = v[t[:, 1]] - v[t[:, 0]]
    d2 = v[t[:, 2]] - v[t[:, 0]]
    det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    gx = (d1 * e2[:, 1] - d2 * e1[:, 1]) / det
    gy = (d2 * e1[:, 0] - d1 * e2[:, 0]) / det
    return np.column_stack([gx, gy])
