import numpy as np
import pytest

from decoupled_renewal.models.base import ArrayBaseModel, RenewalBaseModel, frozen_array


class _FrozenModel(RenewalBaseModel):
    value: float


class _ArrayModel(ArrayBaseModel):
    values: np.ndarray


def test_renewal_model_is_immutable():
    with pytest.raises(TypeError):
        _FrozenModel(value=1.0).value = 2.0


def test_renewal_model_forbids_extra():
    with pytest.raises(ValueError):
        _FrozenModel(value=1.0, other=2)


def test_copy_with_update():
    model = _FrozenModel(value=1.0)
    assert model.copy(update={"value": 2.0}).value == 2.0
    assert model.value == 1.0


@pytest.mark.parametrize("value", [[1, 2, 3], (0.5,), np.arange(4)])
def test_frozen_array(value):
    array = frozen_array(value)
    assert array.dtype == float
    with pytest.raises(ValueError):
        array[0] = 7.0


def test_frozen_array_copies():
    source = np.zeros(3)
    array = frozen_array(source)
    source[0] = 1.0
    assert array[0] == 0.0


def test_array_model_accepts_arrays():
    model = _ArrayModel(values=np.ones(2))
    assert model.values.tolist() == [1.0, 1.0]
