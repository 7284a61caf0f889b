from pathlib import Path

import numpy as np
from scipy import linalg

from spline_dp.components.continuity.schema import (
    ConstraintRow,
    NullSpaceProjector,
    SmoothnessMatrix,
)
from spline_dp.components.geometry.service import GeometryService
from spline_dp.components.spline.schema import SplineSpace
from spline_dp.components.spline.service import SplineService
from spline_dp.config.logger_config import logger
from spline_dp.utils.exceptions import InvalidTriangulation, NumericalFailure
from spline_dp.utils.utility import ensure_directory


class ContinuityService:
    @staticmethod
    def build_smoothness_matrix(space: SplineSpace) -> SmoothnessMatrix:
        """C^r conditions across every interior facet, orders 0..r.

        For a facet shared by t_i and t_j (i < j) both simplices are re-indexed
        as (shared vertices in facet order, out-of-facet vertex); then for each
        facet multi-index kappa with |kappa| = d - m:

            c^{t_i}_{(kappa, m)} - sum_{|g| = m} c^{t_j}_{(kappa, 0) + g} B^m_g(w) = 0

        where w are the re-indexed barycentric coordinates of t_i's out-of-facet
        vertex with respect to t_j.
        """
        t = space.triangulation
        n, d = space.dim, space.degree
        position = {tuple(k): p for p, k in enumerate(space.multi_indices.tolist())}

        def local_order(simplex_index: int, facet: tuple[int, ...], out_vertex: int) -> list[int]:
            ids = t.simplices[simplex_index].vertex_ids
            try:
                return [ids.index(v) for v in facet] + [ids.index(out_vertex)]
            except ValueError as e:
                raise InvalidTriangulation(
                    f"simplex {simplex_index} does not own facet {facet}"
                ) from e

        def column(simplex_index: int, order: list[int], reindexed: tuple[int, ...]) -> int:
            kappa = [0] * (n + 1)
            for k, local in enumerate(order):
                kappa[local] = reindexed[k]
            return simplex_index * space.dhat + position[tuple(kappa)]

        entries: list[dict[int, float]] = []
        metadata: list[ConstraintRow] = []
        for facet, neighbors in sorted(t.facet_adjacency.items(), key=lambda kv: kv[1].simplices):
            (i, j), (out_i, out_j) = neighbors.simplices, neighbors.out_vertices
            order_i = local_order(i, facet, out_i)
            order_j = local_order(j, facet, out_j)
            w_local = GeometryService.cartesian_to_barycentric(t.simplices[j], t.vertices[out_i])
            w = w_local[order_j]

            for m in range(space.continuity + 1):
                gammas = SplineService.enumerate_multi_indices(m, n)
                weights = [SplineService.bernstein(g, w) for g in gammas]
                facet_indices = (
                    SplineService.enumerate_multi_indices(d - m, n - 1) if n > 1 else [(d - m,)]
                )
                for kappa in facet_indices:
                    row: dict[int, float] = {column(i, order_i, kappa + (m,)): 1.0}
                    for g, weight in zip(gammas, weights):
                        shifted = tuple(a + b for a, b in zip(kappa + (0,), g))
                        col = column(j, order_j, shifted)
                        row[col] = row.get(col, 0.0) - weight
                    entries.append(row)
                    metadata.append(ConstraintRow(simplex_pair=(i, j), order=m, facet_index=kappa))

        H = np.zeros((len(entries), space.ahat))
        for r, row in enumerate(entries):
            for col, value in row.items():
                H[r, col] = value
        logger.info(f"Smoothness matrix: {H.shape[0]} constraints over {space.ahat} coefficients")
        return SmoothnessMatrix(H=H, rows=metadata)

    @staticmethod
    def null_space_projector(H: np.ndarray) -> NullSpaceProjector:
        """Z = I - H^+ H through the singular value decomposition of H."""
        H = np.asarray(H, dtype=np.float64)
        ahat = H.shape[1]
        if H.shape[0] == 0:
            return NullSpaceProjector(Z=np.eye(ahat), rank_H=0, svd_tolerance=0.0)
        if not np.all(np.isfinite(H)):
            raise NumericalFailure("smoothness matrix has non-finite entries")

        try:
            _, s, vh = linalg.svd(H, full_matrices=False)
        except (linalg.LinAlgError, ValueError) as e:
            logger.error(f"SVD of the smoothness matrix failed: {e}")
            raise NumericalFailure(f"SVD did not converge: {e}") from e

        tol = max(H.shape) * np.finfo(np.float64).eps * (s[0] if s.size else 0.0)
        rank = int(np.sum(s > tol))
        row_space = vh[:rank]
        Z = np.eye(ahat) - row_space.T @ row_space
        Z = 0.5 * (Z + Z.T)
        logger.info(f"Null-space projector: rank(H)={rank}, free parameters={ahat - rank}")
        return NullSpaceProjector(Z=Z, rank_H=rank, svd_tolerance=float(tol))

    @staticmethod
    def build_projector(space: SplineSpace) -> tuple[SmoothnessMatrix, NullSpaceProjector]:
        smoothness = ContinuityService.build_smoothness_matrix(space)
        return smoothness, ContinuityService.null_space_projector(smoothness.H)

    @staticmethod
    def continuity_residual(H: np.ndarray, c: np.ndarray) -> float:
        if H.shape[0] == 0:
            return 0.0
        return float(np.max(np.abs(H @ c)))

    @staticmethod
    def dump_matrices(
        smoothness: SmoothnessMatrix, projector: NullSpaceProjector, directory: str | Path
    ) -> list[Path]:
        directory = ensure_directory(directory)
        paths = [directory / "H.csv", directory / "Z.csv"]
        np.savetxt(paths[0], smoothness.H, delimiter=",", fmt="%.17g")
        np.savetxt(paths[1], projector.Z, delimiter=",", fmt="%.17g")
        logger.info(f"Smoothness matrix and projector dumped to {directory}")
        return paths
