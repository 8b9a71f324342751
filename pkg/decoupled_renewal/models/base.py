from typing import Any

import numpy as np
from pydantic import BaseModel, Extra


def frozen_array(value: Any) -> np.ndarray:
    """A float copy of `value` that cannot be written to."""
    array = np.array(value, dtype=float)
    array.setflags(write=False)
    return array


class RenewalBaseModel(BaseModel):
    """
    Value objects shared between services. They are immutable after
    construction, so they can be handed to worker threads freely.
    Use `.copy(update=...)` to derive a changed instance.
    """

    class Config:  # See https://pydantic-docs.helpmanual.io/usage/model_config/
        extra = Extra.forbid
        allow_mutation = False


class ArrayBaseModel(RenewalBaseModel):
    """
    A RenewalBaseModel with numpy array fields. Subclasses pass their array
    fields through `frozen_array` in a pre-validator.
    """

    class Config:
        arbitrary_types_allowed = True
