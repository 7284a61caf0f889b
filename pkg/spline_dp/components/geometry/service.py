import json
from pathlib import Path

import numpy as np

from spline_dp.components.geometry.schema import (
    BARYCENTRIC_TOL,
    DEGENERACY_TOL,
    FacetNeighbors,
    Simplex,
    Triangulation,
    TriangulationStyle,
)
from spline_dp.config.logger_config import logger
from spline_dp.utils.exceptions import InvalidGrid, InvalidTriangulation, OutOfDomain
from spline_dp.utils.utility import save_json


class GeometryService:
    @staticmethod
    def build_simplex(
        vertex_ids: tuple[int, ...], vertices: np.ndarray, scale: float = 1.0
    ) -> Simplex:
        """Create a simplex and cache its Cartesian -> barycentric map.

        Raises:
            InvalidTriangulation: the vertices are (numerically) degenerate.
        """
        vertices = np.asarray(vertices, dtype=np.float64)
        n = vertices.shape[1]
        if vertices.shape[0] != n + 1:
            raise InvalidTriangulation(
                f"simplex {vertex_ids} needs {n + 1} vertices, got {vertices.shape[0]}"
            )
        edges = vertices[1:] - vertices[0]
        if abs(np.linalg.det(edges)) <= DEGENERACY_TOL * scale**n:
            raise InvalidTriangulation(f"simplex {vertex_ids} is degenerate")

        homogeneous = np.vstack([vertices.T, np.ones(n + 1)])
        transform = np.linalg.inv(homogeneous)
        return Simplex(
            vertex_ids=tuple(int(v) for v in vertex_ids),
            vertices=vertices,
            bary_transform=transform,
        )

    @staticmethod
    def cartesian_to_barycentric(s: Simplex, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return s.bary_transform[:, :-1] @ x + s.bary_transform[:, -1]

    @staticmethod
    def barycentric_to_cartesian(s: Simplex, b) -> np.ndarray:
        return np.asarray(b, dtype=np.float64) @ s.vertices

    @staticmethod
    def directional_coordinates(s: Simplex, u) -> np.ndarray:
        """Barycentric direction a of a Cartesian vector u: u = sum a_i v_i, sum a_i = 0."""
        return s.bary_transform[:, :-1] @ np.asarray(u, dtype=np.float64)

    @staticmethod
    def locate(t: Triangulation, x) -> tuple[int, np.ndarray]:
        """Return (simplex index, barycentric coordinates) of the simplex holding x.

        On shared facets the simplex with the smallest index wins.
        """
        x = np.asarray(x, dtype=np.float64)
        if not np.all(np.isfinite(x)):
            raise OutOfDomain(f"non-finite state {x}")
        margin = BARYCENTRIC_TOL * max(t.scale, 1.0)
        if np.any(x < t.bounds[0] - margin) or np.any(x > t.bounds[1] + margin):
            raise OutOfDomain(f"state {x} outside bounds {t.bounds.tolist()}")

        coords = t.transforms[:, :, :-1] @ x + t.transforms[:, :, -1]
        inside = np.flatnonzero(coords.min(axis=1) >= -BARYCENTRIC_TOL)
        if inside.size == 0:
            raise OutOfDomain(f"state {x} not covered by any simplex")
        index = int(inside[0])
        return index, coords[index]

    @staticmethod
    def _side(vertices: np.ndarray, facet: tuple[int, ...], point) -> float:
        """Signed volume spanned by a facet and a point; its sign tells the side."""
        corners = vertices[list(facet)]
        target = vertices[point] if np.ndim(point) == 0 else np.asarray(point, dtype=np.float64)
        return float(np.linalg.det(corners - target))

    @staticmethod
    def _enclosed_volume(
        vertices: np.ndarray, facets: dict[tuple[int, ...], list[tuple[int, int]]]
    ) -> float:
        """Volume enclosed by the facets owned by a single simplex.

        Sums the cones from the vertex centroid to every boundary facet, counted
        positive when the centroid sits on the inner side of the facet.
        """
        n = vertices.shape[1]
        center = vertices.mean(axis=0)
        total = 0.0
        for facet, owners in facets.items():
            if len(owners) != 1:
                continue
            inner = np.sign(GeometryService._side(vertices, facet, owners[0][1]))
            total += inner * GeometryService._side(vertices, facet, center)
        return total / float(np.prod(np.arange(1, n + 1)))

    @staticmethod
    def from_simplices(vertices, simplices) -> Triangulation:
        """Assemble and validate a triangulation from vertex coordinates and index triples."""
        vertices = np.asarray(vertices, dtype=np.float64)
        if vertices.ndim != 2 or vertices.shape[0] == 0:
            raise InvalidTriangulation("vertices must be a non-empty (V, n) array")
        if not np.all(np.isfinite(vertices)):
            raise InvalidTriangulation("vertices must be finite")
        n = vertices.shape[1]
        bounds = np.vstack([vertices.min(axis=0), vertices.max(axis=0)])
        scale = float(np.max(bounds[1] - bounds[0]))
        if scale <= 0:
            raise InvalidTriangulation("vertices span an empty box")

        built: list[Simplex] = []
        for ids in simplices:
            ids = tuple(int(i) for i in ids)
            if len(ids) != n + 1 or len(set(ids)) != n + 1:
                raise InvalidTriangulation(f"simplex {ids} must list {n + 1} distinct vertices")
            if min(ids) < 0 or max(ids) >= len(vertices):
                raise InvalidTriangulation(f"simplex {ids} references a missing vertex")
            built.append(GeometryService.build_simplex(ids, vertices[list(ids)], scale))
        if not built:
            raise InvalidTriangulation("triangulation has no simplices")

        facets: dict[tuple[int, ...], list[tuple[int, int]]] = {}
        for index, simplex in enumerate(built):
            for local, out_vertex in enumerate(simplex.vertex_ids):
                facet = tuple(sorted(v for k, v in enumerate(simplex.vertex_ids) if k != local))
                facets.setdefault(facet, []).append((index, out_vertex))

        adjacency: dict[tuple[int, ...], FacetNeighbors] = {}
        for facet, owners in facets.items():
            if len(owners) > 2:
                raise InvalidTriangulation(f"facet {facet} is shared by {len(owners)} simplices")
            if len(owners) == 2:
                (i, out_i), (j, out_j) = sorted(owners)
                if GeometryService._side(vertices, facet, out_i) * GeometryService._side(
                    vertices, facet, out_j
                ) >= 0:
                    raise InvalidTriangulation(
                        f"simplices {i} and {j} lie on the same side of facet {facet}"
                    )
                adjacency[facet] = FacetNeighbors(simplices=(i, j), out_vertices=(out_i, out_j))

        transforms = np.stack([s.bary_transform for s in built])
        centroids = np.stack([s.vertices.mean(axis=0) for s in built])
        coords = np.einsum("jkl,il->ijk", transforms[:, :, :-1], centroids) + transforms[:, :, -1]
        holders = (coords.min(axis=2) > BARYCENTRIC_TOL).sum(axis=1)
        if np.any(holders > 1):
            index = int(np.flatnonzero(holders > 1)[0])
            raise InvalidTriangulation(f"simplex {index} overlaps another simplex")

        covered = sum(s.volume for s in built)
        enclosed = GeometryService._enclosed_volume(vertices, facets)
        if abs(covered - enclosed) > 1e-8 * covered:
            raise InvalidTriangulation(
                f"simplices cover volume {covered:.12g}, boundary encloses {enclosed:.12g}"
            )

        return Triangulation(
            vertices=vertices,
            simplices=built,
            facet_adjacency=adjacency,
            bounds=bounds,
            transforms=transforms,
        )

    @staticmethod
    def build_grid_triangulation(
        theta_breaks,
        thetadot_breaks,
        style: TriangulationStyle = TriangulationStyle.TYPE_III,
    ) -> Triangulation:
        """Split every grid cell into two triangles with alternating diagonals.

        Cell (i, j) takes the lower-left/upper-right diagonal when i + j is even
        and the upper-left/lower-right one otherwise, so that four cells meet in
        a star at every second node. Vertices are numbered theta-major.
        """
        if TriangulationStyle(style) is not TriangulationStyle.TYPE_III:
            raise InvalidGrid(f"unsupported triangulation style {style}")
        xs = np.asarray(theta_breaks, dtype=np.float64)
        ys = np.asarray(thetadot_breaks, dtype=np.float64)
        for name, breaks in (("theta", xs), ("thetadot", ys)):
            if breaks.ndim != 1 or breaks.size < 2:
                raise InvalidGrid(f"{name} needs at least 2 breaks")
            if not np.all(np.isfinite(breaks)) or np.any(np.diff(breaks) <= 0):
                raise InvalidGrid(f"{name} breaks must be finite and strictly increasing")

        ny = ys.size
        vertices = np.array([[x, y] for x in xs for y in ys])

        def vid(i: int, j: int) -> int:
            return i * ny + j

        simplices = []
        for i in range(xs.size - 1):
            for j in range(ny - 1):
                ll, lr = vid(i, j), vid(i + 1, j)
                ul, ur = vid(i, j + 1), vid(i + 1, j + 1)
                if (i + j) % 2 == 0:
                    simplices += [(ll, lr, ur), (ll, ur, ul)]
                else:
                    simplices += [(ll, lr, ul), (lr, ur, ul)]

        triangulation = GeometryService.from_simplices(vertices, simplices)
        logger.info(
            f"Built {style} grid triangulation: {len(vertices)} vertices, "
            f"{triangulation.n_simplices} simplices"
        )
        return triangulation

    @staticmethod
    def load_triangulation(path: str | Path) -> Triangulation:
        try:
            payload = json.loads(Path(path).read_text())
            vertices, simplices = payload["vertices"], payload["simplices"]
        except (OSError, ValueError, KeyError, TypeError) as e:
            logger.error(f"Unable to read triangulation file {path}: {e}")
            raise InvalidTriangulation(f"unreadable triangulation file {path}: {e}") from e
        triangulation = GeometryService.from_simplices(vertices, simplices)
        logger.info(f"Loaded triangulation {path}: {triangulation.n_simplices} simplices")
        return triangulation

    @staticmethod
    def save_triangulation(t: Triangulation, path: str | Path) -> Path:
        payload = {
            "vertices": t.vertices.tolist(),
            "simplices": [list(s.vertex_ids) for s in t.simplices],
        }
        return save_json(path, payload)

    @staticmethod
    def triangulation_area(t: Triangulation) -> float:
        return float(sum(s.volume for s in t.simplices))
