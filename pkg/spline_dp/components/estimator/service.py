import json
from pathlib import Path

import numpy as np

from spline_dp.components.continuity.schema import NullSpaceProjector
from spline_dp.components.estimator.schema import (
    DENOMINATOR_TOL,
    EstimatorState,
    EstimatorVariant,
)
from spline_dp.config.logger_config import logger
from spline_dp.utils.exceptions import CheckpointMismatch, InvalidParam, NumericalFailure
from spline_dp.utils.utility import ensure_directory

CHECKPOINT_FORMAT = 1


def _check_finite(step: int, *values) -> None:
    for value in values:
        if not np.all(np.isfinite(value)):
            raise NumericalFailure("non-finite estimator input", step=step)


def _times(matrix: np.ndarray, vector: np.ndarray) -> np.ndarray:
    """matrix @ vector using only the non-zero entries of a sparse regressor."""
    nz = np.flatnonzero(vector)
    return matrix[:, nz] @ vector[nz]


def _finish(st: EstimatorState, c: np.ndarray, P: np.ndarray) -> EstimatorState:
    if st.symmetrize:
        P = 0.5 * (P + P.T)
    return st.model_copy(update={"c": c, "P": P, "step_count": st.step_count + 1})


class EstimatorService:
    @staticmethod
    def init(
        projector: NullSpaceProjector,
        beta1: float = 10.0,
        gamma: float = 0.98,
        beta2: float = 0.0,
        symmetrize: bool = True,
        forget_projected: bool = True,
    ) -> EstimatorState:
        """c_1 = 0 and P_1 = beta1 * Z."""
        if beta1 <= 0:
            raise InvalidParam(f"beta1 must be positive, got {beta1}")
        if not 0 <= gamma < 1:
            raise InvalidParam(f"gamma must lie in [0, 1), got {gamma}")
        if beta2 < 0:
            raise InvalidParam(f"beta2 must be non-negative, got {beta2}")
        return EstimatorState(
            c=np.zeros(projector.ahat),
            P=beta1 * projector.Z,
            projector=projector,
            gamma=gamma,
            beta1=beta1,
            beta2=beta2,
            symmetrize=symmetrize,
            forget_projected=forget_projected,
        )

    @staticmethod
    def rls_update(st: EstimatorState, x_bar: np.ndarray, y: float) -> EstimatorState:
        _check_finite(st.step_count, x_bar, y)
        e = y - x_bar @ st.c
        Px = _times(st.P, x_bar)
        P_next = st.P - np.outer(Px, Px) / (1.0 + x_bar @ Px)
        c_next = st.c + _times(P_next, x_bar) * e
        return _finish(st, c_next, P_next)

    @staticmethod
    def _td_terms(st: EstimatorState, x_t: np.ndarray, x_next: np.ndarray, r: float):
        _check_finite(st.step_count, x_t, x_next, r)
        delta = x_t - st.gamma * x_next
        e = r - delta @ st.c
        Px = _times(st.P, x_t)
        deltaP = _times(st.P.T, delta)
        q = 1.0 + delta @ Px
        if abs(q) < DENOMINATOR_TOL:
            raise NumericalFailure(f"RLSTD denominator vanished (q={q:.3e})", step=st.step_count)
        return e, Px, deltaP, q

    @staticmethod
    def rlstd_update(
        st: EstimatorState, x_t: np.ndarray, x_next: np.ndarray, r: float
    ) -> EstimatorState:
        """Recursive least-squares TD step; the coefficient step uses the pre-update P."""
        e, Px, deltaP, q = EstimatorService._td_terms(st, x_t, x_next, r)
        P_next = st.P - np.outer(Px, deltaP) / q
        c_next = st.c + Px * (e / q)
        return _finish(st, c_next, P_next)

    @staticmethod
    def rlstd_forget_update(
        st: EstimatorState, x_t: np.ndarray, x_next: np.ndarray, r: float
    ) -> EstimatorState:
        """RLSTD with directional forgetting kept inside the null space of H.

        P_{t+1} = P_t - P x delta' P / q + beta2 Z x x' Z, and the coefficient
        step uses P_{t+1}.
        """
        e, Px, deltaP, q = EstimatorService._td_terms(st, x_t, x_next, r)
        P_next = st.P - np.outer(Px, deltaP) / q
        if st.beta2 > 0:
            excited = _times(st.Z, x_t) if st.forget_projected else x_t
            P_next += st.beta2 * np.outer(excited, excited)
        c_next = st.c + _times(P_next, x_t) * e
        return _finish(st, c_next, P_next)

    @staticmethod
    def update(
        st: EstimatorState,
        variant: EstimatorVariant | str,
        x_t: np.ndarray,
        x_next: np.ndarray,
        r: float,
    ) -> EstimatorState:
        variant = EstimatorVariant(variant)
        if variant is EstimatorVariant.RLSTD:
            return EstimatorService.rlstd_update(st, x_t, x_next, r)
        if variant is EstimatorVariant.RLSTD_FORGET:
            return EstimatorService.rlstd_forget_update(st, x_t, x_next, r)
        raise InvalidParam(f"{variant.value} is not a temporal-difference variant")

    @staticmethod
    def is_diverged(st: EstimatorState, limit: float = 1e9) -> bool:
        return not np.all(np.isfinite(st.c)) or float(np.max(np.abs(st.c), initial=0.0)) > limit

    @staticmethod
    def save_checkpoint(st: EstimatorState, space_hash: str, path: str | Path) -> Path:
        path = Path(path)
        ensure_directory(path.parent)
        meta = {
            "format": CHECKPOINT_FORMAT,
            "space_hash": space_hash,
            "gamma": st.gamma,
            "beta1": st.beta1,
            "beta2": st.beta2,
            "step_count": st.step_count,
            "symmetrize": st.symmetrize,
            "forget_projected": st.forget_projected,
        }
        with path.open("wb") as handle:
            np.savez_compressed(handle, c=st.c, P=st.P, meta=np.array(json.dumps(meta)))
        logger.info(f"Checkpoint written to {path} after {st.step_count} updates")
        return path

    @staticmethod
    def load_checkpoint(
        path: str | Path, projector: NullSpaceProjector, space_hash: str | None = None
    ) -> tuple[EstimatorState, dict]:
        try:
            with np.load(Path(path), allow_pickle=False) as archive:
                c, P = archive["c"], archive["P"]
                meta = json.loads(str(archive["meta"]))
        except (OSError, KeyError, ValueError) as e:
            logger.error(f"Unable to read checkpoint {path}: {e}")
            raise CheckpointMismatch(f"unreadable checkpoint {path}: {e}") from e

        if space_hash is not None and meta.get("space_hash") != space_hash:
            raise CheckpointMismatch(
                f"checkpoint {path} was written for another spline space"
            )
        if c.shape != (projector.ahat,) or P.shape != (projector.ahat, projector.ahat):
            raise CheckpointMismatch(f"checkpoint {path} has {c.shape[0]} coefficients")

        state = EstimatorState(
            c=c,
            P=P,
            projector=projector,
            gamma=meta["gamma"],
            beta1=meta["beta1"],
            beta2=meta["beta2"],
            step_count=meta["step_count"],
            symmetrize=meta.get("symmetrize", True),
            forget_projected=meta.get("forget_projected", True),
        )
        logger.info(f"Checkpoint {path} loaded ({state.step_count} updates)")
        return state, meta
