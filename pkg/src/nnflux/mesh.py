"""Cell-centered finite-volume meshes in 1D and 2D.

Faces are stored once. Each face has an owner cell, a unit normal pointing
out of the owner, and either a neighbor cell or a boundary tag.
"""

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import FormatError

NO_NEIGHBOR = -1


@dataclass
class Mesh:
    dim: int
    cell_centroids: np.ndarray
    cell_measures: np.ndarray
    face_centroids: np.ndarray
    face_measures: np.ndarray
    face_normals: np.ndarray
    face_owner: np.ndarray
    face_neighbor: np.ndarray
    face_tags: np.ndarray
    # owner-to-neighbor centroid distance along the normal (interior faces)
    face_distance: np.ndarray = None
    nodes: np.ndarray = None
    elements: list = None
    boundary_edges: list = None

    def __post_init__(self):
        if self.face_distance is None:
            d = np.full(self.n_faces, np.nan)
            inner = self.interior
            delta = self.cell_centroids[self.face_neighbor[inner]] - self.cell_centroids[self.face_owner[inner]]
            d[inner] = np.einsum("fd,fd->f", delta, self.face_normals[inner])
            self.face_distance = d

    @property
    def n_cells(self):
        return self.cell_measures.shape[0]

    @property
    def n_faces(self):
        return self.face_measures.shape[0]

    @property
    def interior(self):
        return self.face_neighbor != NO_NEIGHBOR

    @property
    def boundary(self):
        return ~self.interior

    def boundary_tags(self):
        return sorted(set(self.face_tags[self.boundary].tolist()))

    def closure_residual(self):
        """Per-cell ``sum_j |dK_j| N_j`` over outward normals; zero for closed cells."""
        out = np.zeros((self.n_cells, self.dim))
        w = self.face_measures[:, None] * self.face_normals
        np.add.at(out, self.face_owner, w)
        inner = self.interior
        np.add.at(out, self.face_neighbor[inner], -w[inner])
        return out

    def total_measure(self):
        return float(self.cell_measures.sum())

    def size_proxy(self):
        """``|K| / max face measure`` per cell."""
        fmax = np.zeros(self.n_cells)
        np.maximum.at(fmax, self.face_owner, self.face_measures)
        inner = self.interior
        np.maximum.at(fmax, self.face_neighbor[inner], self.face_measures[inner])
        return self.cell_measures / fmax

    def check(self, tol=1e-10):
        if np.any(self.cell_measures <= 0):
            raise ValueError("non-positive cell measure")
        if not np.allclose(np.linalg.norm(self.face_normals, axis=1), 1.0, atol=1e-12):
            raise ValueError("face normals are not unit")
        inner = self.interior
        if np.any(self.face_owner[inner] == self.face_neighbor[inner]):
            raise ValueError("interior face with identical cells")
        scale = max(1.0, float(self.face_measures.max()))
        if np.abs(self.closure_residual()).max() > tol * scale:
            raise ValueError("mesh cells are not closed")

    def with_periodic(self, tag_a, tag_b):
        """Merge boundary faces tagged ``tag_a`` with their translates in ``tag_b``.

        Each matched pair becomes one interior face owned by the ``tag_a``
        side, so periodic fluxes are evaluated once and conserve exactly.
        """
        fa = np.flatnonzero(self.face_tags == tag_a)
        fb = np.flatnonzero(self.face_tags == tag_b)
        if fa.size != fb.size or fa.size == 0:
            raise ValueError(f"periodic tags {tag_a!r}/{tag_b!r} do not pair up")
        shift = self.face_centroids[fb].mean(axis=0) - self.face_centroids[fa].mean(axis=0)
        target = self.face_centroids[fa] + shift
        match = np.empty(fa.size, dtype=int)
        for i, x in enumerate(target):
            match[i] = fb[np.argmin(np.linalg.norm(self.face_centroids[fb] - x, axis=1))]
        if len(set(match.tolist())) != fa.size:
            raise ValueError("periodic faces do not match one-to-one")
        if not np.allclose(self.face_measures[fa], self.face_measures[match], atol=1e-12):
            raise ValueError("periodic faces differ in measure")
        keep = np.ones(self.n_faces, dtype=bool)
        keep[match] = False
        neighbor = self.face_neighbor.copy()
        neighbor[fa] = self.face_owner[match]
        tags = self.face_tags.copy()
        tags[fa] = ""
        dist = self.face_distance.copy()
        n = self.face_normals[fa]
        da = np.einsum("fd,fd->f", self.face_centroids[fa] - self.cell_centroids[self.face_owner[fa]], n)
        db = np.einsum("fd,fd->f", self.cell_centroids[self.face_owner[match]] - self.face_centroids[match], n)
        dist[fa] = da + db
        return replace(
            self,
            face_centroids=self.face_centroids[keep],
            face_measures=self.face_measures[keep],
            face_normals=self.face_normals[keep],
            face_owner=self.face_owner[keep],
            face_neighbor=neighbor[keep],
            face_tags=tags[keep],
            face_distance=dist[keep],
        )


def make_uniform_grid_1d(x_lo, x_hi, n_cells):
    if n_cells < 2:
        raise ValueError("need at least two cells")
    x = np.linspace(x_lo, x_hi, n_cells + 1)
    nodes = x[:, None]
    elements = [(i, i + 1) for i in range(n_cells)]
    boundary = [((0,), "left"), ((n_cells,), "right")]
    return mesh_from_elements(nodes, elements, boundary)


def _polygon_area_centroid(P):
    x, y = P[:, 0], P[:, 1]
    xs, ys = np.roll(x, -1), np.roll(y, -1)
    cross = x * ys - xs * y
    area = 0.5 * cross.sum()
    cx = ((x + xs) * cross).sum() / (6.0 * area)
    cy = ((y + ys) * cross).sum() / (6.0 * area)
    return area, np.array([cx, cy])


def mesh_from_elements(nodes, elements, boundary):
    """Build a mesh from node coordinates and element connectivity.

    ``elements`` are node-index tuples (segments in 1D, polygons in 2D;
    clockwise polygons are reoriented). ``boundary`` lists
    ``(node_tuple, tag)`` for every boundary face (a node in 1D, an edge in
    2D); untagged boundary faces get the tag ``"boundary"``.
    """
    nodes = np.asarray(nodes, dtype=float)
    if nodes.ndim == 1:
        nodes = nodes[:, None]
    dim = nodes.shape[1]
    tag_of = {tuple(sorted(k)): t for k, t in boundary}
    faces = {}
    order = []
    centroids, measures = [], []
    elements = [tuple(int(i) for i in e) for e in elements]
    for c, el in enumerate(elements):
        P = nodes[list(el)]
        if dim == 1:
            a, b = el if P[0, 0] < P[1, 0] else el[::-1]
            el = (a, b)
            measures.append(nodes[b, 0] - nodes[a, 0])
            centroids.append(0.5 * (nodes[a] + nodes[b]))
            local = [((a,), np.array([-1.0]), nodes[a], 1.0), ((b,), np.array([1.0]), nodes[b], 1.0)]
        else:
            area, cen = _polygon_area_centroid(P)
            if area < 0:
                el = el[::-1]
                P = P[::-1]
                area = -area
            elements[c] = el
            measures.append(area)
            centroids.append(cen)
            local = []
            for k in range(len(el)):
                i, j = el[k], el[(k + 1) % len(el)]
                e = nodes[j] - nodes[i]
                length = float(np.hypot(e[0], e[1]))
                local.append(((i, j), np.array([e[1], -e[0]]) / length, 0.5 * (nodes[i] + nodes[j]), length))
        for key, normal, fc, meas in local:
            k = tuple(sorted(key))
            if k in faces:
                rec = faces[k]
                if rec["neighbor"] != NO_NEIGHBOR:
                    raise ValueError(f"face {k} shared by more than two cells")
                rec["neighbor"] = c
            else:
                faces[k] = {"owner": c, "neighbor": NO_NEIGHBOR, "normal": normal, "centroid": fc, "measure": meas}
                order.append(k)
    owner = np.array([faces[k]["owner"] for k in order])
    neighbor = np.array([faces[k]["neighbor"] for k in order])
    tags = np.array(
        ["" if faces[k]["neighbor"] != NO_NEIGHBOR else tag_of.get(k, "boundary") for k in order],
        dtype=object,
    )
    mesh = Mesh(
        dim=dim,
        cell_centroids=np.array(centroids),
        cell_measures=np.array(measures, dtype=float),
        face_centroids=np.array([faces[k]["centroid"] for k in order]),
        face_measures=np.array([faces[k]["measure"] for k in order], dtype=float),
        face_normals=np.array([faces[k]["normal"] for k in order]),
        face_owner=owner,
        face_neighbor=neighbor,
        face_tags=tags,
        nodes=nodes,
        elements=elements,
        boundary_edges=[(k, t) for k, t in zip(order, tags) if t],
    )
    mesh.check()
    return mesh


def make_quad_mesh_rect(x_lo, x_hi, y_lo, y_hi, nx, ny):
    if nx < 1 or ny < 1:
        raise ValueError("nx and ny must be >= 1")
    xs = np.linspace(x_lo, x_hi, nx + 1)
    ys = np.linspace(y_lo, y_hi, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    nodes = np.column_stack([X.ravel(), Y.ravel()])

    def nid(i, j):
        return j * (nx + 1) + i

    elements = [
        (nid(i, j), nid(i + 1, j), nid(i + 1, j + 1), nid(i, j + 1))
        for j in range(ny)
        for i in range(nx)
    ]
    boundary = []
    for i in range(nx):
        boundary.append(((nid(i, 0), nid(i + 1, 0)), "bottom"))
        boundary.append(((nid(i, ny), nid(i + 1, ny)), "top"))
    for j in range(ny):
        boundary.append(((nid(0, j), nid(0, j + 1)), "left"))
        boundary.append(((nid(nx, j), nid(nx, j + 1)), "right"))
    return mesh_from_elements(nodes, elements, boundary)


def pentagon_vertices(circumradius):
    ang = np.pi / 2 + 2 * np.pi * np.arange(5) / 5
    return circumradius * np.column_stack([np.cos(ang), np.sin(ang)])


def make_pentagon_tri_mesh(circumradius, n_rings):
    """Regular pentagon split into ``5 n_rings^2`` triangles.

    Ring ``k`` is the pentagon scaled by ``k / n_rings`` with every side cut
    into ``k`` segments; neighbouring rings are joined by triangle strips.
    """
    if n_rings < 1:
        raise ValueError("n_rings must be >= 1")
    V = pentagon_vertices(circumradius)
    nodes = [np.zeros(2)]
    start = [0]
    for k in range(1, n_rings + 1):
        start.append(len(nodes))
        s = k / n_rings
        for side in range(5):
            a, b = V[side] * s, V[(side + 1) % 5] * s
            for i in range(k):
                nodes.append(a + (b - a) * i / k)

    def ring(k, side, i):
        # i-th point (0..k) along ``side`` of ring ``k``; i == k wraps to the next side
        if k == 0:
            return 0
        return start[k] + (side * k + i) % (5 * k)

    elements = []
    for k in range(1, n_rings + 1):
        for side in range(5):
            for j in range(k):
                elements.append((ring(k, side, j), ring(k, side, j + 1), ring(k - 1, side, j)))
            for j in range(k - 1):
                elements.append((ring(k - 1, side, j), ring(k, side, j + 1), ring(k - 1, side, j + 1)))
    n = n_rings
    boundary = [((ring(n, s, i), ring(n, s, i + 1)), "boundary") for s in range(5) for i in range(n)]
    return mesh_from_elements(np.array(nodes), elements, boundary)


def pentagon_area(circumradius):
    return 2.5 * circumradius**2 * np.sin(2 * np.pi / 5)


def write_mesh(path, mesh):
    """ASCII mesh: nodes, element connectivity, tagged boundary faces."""
    if mesh.nodes is None or mesh.elements is None:
        raise ValueError("mesh was not built from nodes and elements")
    out = ["nnflux-mesh 1", f"dimension {mesh.dim}", f"nodes {len(mesh.nodes)}"]
    out += [" ".join(repr(float(v)) for v in p) for p in mesh.nodes]
    out.append(f"elements {len(mesh.elements)}")
    out += [" ".join(str(i) for i in (len(e), *e)) for e in mesh.elements]
    out.append(f"boundary {len(mesh.boundary_edges)}")
    out += [" ".join(str(i) for i in k) + f" {t}" for k, t in mesh.boundary_edges]
    Path(path).write_text("\n".join(out) + "\n")


def read_mesh(path):
    lines = Path(path).read_text().splitlines()
    pos = 0

    def take(keyword):
        nonlocal pos
        if pos >= len(lines):
            raise FormatError(f"missing {keyword!r} section", line=pos + 1)
        parts = lines[pos].split()
        if len(parts) != 2 or parts[0] != keyword:
            raise FormatError(f"expected '{keyword} <n>'", line=pos + 1)
        pos += 1
        try:
            return int(parts[1])
        except ValueError as exc:
            raise FormatError(f"bad count in {keyword!r} section", line=pos) from exc

    def body(n):
        nonlocal pos
        if pos + n > len(lines):
            raise FormatError("unexpected end of file", line=len(lines) + 1)
        rows = [(pos + 1 + i, lines[pos + i].split()) for i in range(n)]
        pos += n
        return rows

    if not lines or lines[0].split()[:1] != ["nnflux-mesh"]:
        raise FormatError("not an nnflux mesh file", line=1)
    pos = 1
    dim = take("dimension")

    def parse(rows, convert):
        out = []
        for line, r in rows:
            try:
                out.append(convert(r))
            except (ValueError, IndexError) as exc:
                raise FormatError(f"malformed mesh entry: {exc}", line=line) from exc
        return out

    nodes = np.array(parse(body(take("nodes")), lambda r: [float(v) for v in r]))
    elements = parse(body(take("elements")), lambda r: tuple(int(v) for v in r[1:]))
    bnd = parse(body(take("boundary")), lambda r: (tuple(int(v) for v in r[:-1]), r[-1]))
    if nodes.ndim != 2 or nodes.shape[1] != dim:
        raise FormatError("node coordinates do not match the dimension", line=3)
    return mesh_from_elements(nodes, elements, bnd)
