from typing import Annotated

import numpy as np
from pydantic import BaseModel, BeforeValidator, ConfigDict


def _as_float_array(value) -> np.ndarray:
    return np.asarray(value, dtype=np.float64)


def _as_int_array(value) -> np.ndarray:
    return np.asarray(value, dtype=np.int64)


# numpy payloads inside pydantic models
FloatArray = Annotated[np.ndarray, BeforeValidator(_as_float_array)]
IntArray = Annotated[np.ndarray, BeforeValidator(_as_int_array)]


class BaseSchema(BaseModel):
    model_config = ConfigDict(
        arbitrary_types_allowed=True,
        validate_assignment=True,
        use_enum_values=True,
        str_strip_whitespace=True,
    )


class FrozenSchema(BaseModel):
    """Immutable value objects (geometry, spline spaces, projectors)."""

    model_config = ConfigDict(
        arbitrary_types_allowed=True,
        frozen=True,
        use_enum_values=True,
    )
