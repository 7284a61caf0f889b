from pathlib import Path

import numpy as np
from scipy.special import factorial

from spline_dp.components.geometry.schema import Simplex, Triangulation
from spline_dp.components.geometry.service import GeometryService
from spline_dp.components.spline.schema import BasisRow, MultiIndex, SplineFunction, SplineSpace
from spline_dp.config.logger_config import logger
from spline_dp.utils.exceptions import InvalidParam
from spline_dp.utils.utility import save_csv


def _multinomials(indices: np.ndarray) -> np.ndarray:
    degree = int(indices[0].sum())
    return factorial(degree, exact=False) / np.prod(factorial(indices, exact=False), axis=1)


def _bernstein_vector(indices: np.ndarray, multinomials: np.ndarray, b: np.ndarray) -> np.ndarray:
    return multinomials * np.prod(np.power(b, indices), axis=1)


class SplineService:
    @staticmethod
    def enumerate_multi_indices(d: int, n: int) -> list[MultiIndex]:
        """All (n+1)-tuples with |kappa| = d, larger leading entries first."""
        if d < 0 or n < 1:
            raise InvalidParam(f"need d >= 0 and n >= 1, got d={d}, n={n}")

        def compositions(total: int, parts: int):
            if parts == 1:
                yield (total,)
                return
            for head in range(total, -1, -1):
                for tail in compositions(total - head, parts - 1):
                    yield (head,) + tail

        return list(compositions(d, n + 1))

    @staticmethod
    def bernstein(kappa: MultiIndex, b) -> float:
        indices = np.asarray([kappa])
        return float(_bernstein_vector(indices, _multinomials(indices), np.asarray(b, dtype=np.float64))[0])

    @staticmethod
    def build_space(triangulation: Triangulation, degree: int, continuity: int) -> SplineSpace:
        if degree < 1:
            raise InvalidParam(f"degree must be >= 1, got {degree}")
        if not 0 <= continuity < degree:
            raise InvalidParam(f"continuity must satisfy 0 <= r < d, got r={continuity}, d={degree}")

        n = triangulation.dim
        indices = np.asarray(SplineService.enumerate_multi_indices(degree, n))
        lower = np.asarray(SplineService.enumerate_multi_indices(degree - 1, n))
        position = {tuple(k): p for p, k in enumerate(indices.tolist())}
        raise_table = np.empty((len(lower), n + 1), dtype=np.int64)
        for row, kappa in enumerate(lower.tolist()):
            for i in range(n + 1):
                raised = list(kappa)
                raised[i] += 1
                raise_table[row, i] = position[tuple(raised)]

        dhat = len(indices)
        space = SplineSpace(
            degree=degree,
            continuity=continuity,
            triangulation=triangulation,
            dhat=dhat,
            ahat=triangulation.n_simplices * dhat,
            multi_indices=indices,
            multinomials=_multinomials(indices),
            lower_indices=lower,
            lower_multinomials=_multinomials(lower),
            raise_table=raise_table,
        )
        logger.info(
            f"Spline space S_{degree}^{continuity}: J={space.n_simplices} "
            f"dhat={space.dhat} ahat={space.ahat}"
        )
        return space

    @staticmethod
    def basis_row(space: SplineSpace, x) -> BasisRow:
        index, b = GeometryService.locate(space.triangulation, x)
        return BasisRow(
            simplex_index=index,
            barycentric=b,
            values=_bernstein_vector(space.multi_indices, space.multinomials, b),
            dhat=space.dhat,
            ahat=space.ahat,
        )

    @staticmethod
    def evaluate(f: SplineFunction, x) -> float:
        row = SplineService.basis_row(f.space, x)
        return float(row.values @ f.c[row.columns])

    @staticmethod
    def _derivative_terms(f: SplineFunction, x) -> tuple[Simplex, np.ndarray, np.ndarray]:
        """Lower-degree basis at x and the block coefficients indexed by kappa + e_i."""
        space = f.space
        index, b = GeometryService.locate(space.triangulation, x)
        lower_basis = _bernstein_vector(space.lower_indices, space.lower_multinomials, b)
        block = f.c[space.block(index)]
        return space.triangulation.simplices[index], lower_basis, block[space.raise_table]

    @staticmethod
    def directional_derivative(f: SplineFunction, x, u) -> float:
        simplex, lower_basis, raised = SplineService._derivative_terms(f, x)
        a = GeometryService.directional_coordinates(simplex, u)
        return float(f.space.degree * lower_basis @ (raised @ a))

    @staticmethod
    def gradient(f: SplineFunction, x) -> np.ndarray:
        simplex, lower_basis, raised = SplineService._derivative_terms(f, x)
        # columns of the linear part are the directional coordinates of e_1..e_n
        axes = simplex.bary_transform[:, :-1]
        return f.space.degree * lower_basis @ (raised @ axes)

    @staticmethod
    def bnet_points(s: Simplex, d: int) -> list[tuple[MultiIndex, np.ndarray]]:
        return [
            (kappa, np.asarray(kappa, dtype=np.float64) @ s.vertices / d)
            for kappa in SplineService.enumerate_multi_indices(d, s.dim)
        ]

    @staticmethod
    def bnet_coefficients(space: SplineSpace, target) -> np.ndarray:
        """Coefficients c^kappa = target(B-net point); exact for affine targets."""
        c = np.empty(space.ahat)
        for j, simplex in enumerate(space.triangulation.simplices):
            points = SplineService.bnet_points(simplex, space.degree)
            c[space.block(j)] = [target(point) for _, point in points]
        return c

    @staticmethod
    def export_bnet_csv(f: SplineFunction, path: str | Path) -> Path:
        space = f.space
        n = space.dim
        header = ["simplex"] + [f"kappa{i}" for i in range(n + 1)]
        header += [f"x{i + 1}" for i in range(n)] + ["coefficient"]

        def rows():
            for j, simplex in enumerate(space.triangulation.simplices):
                block = f.c[space.block(j)]
                for k, (kappa, point) in enumerate(SplineService.bnet_points(simplex, space.degree)):
                    yield [j, *kappa, *point, block[k]]

        path = save_csv(path, header, rows())
        logger.info(f"B-net written to {path}")
        return path
