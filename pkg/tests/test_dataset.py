import numpy as np
import pytest

from app.core.exceptions import DomainError
from app.models.dataset import Dataset, Sample


def test_one_dimensional_features_become_a_column():
    data = Dataset(x=[0.1, 0.2, 0.3], y=[1, 2, 1])
    assert data.x.shape == (3, 1)
    assert data.labels == (1, 2)
    assert data.n == 3 and data.dim == 1


def test_declared_labels_are_kept():
    data = Dataset(x=[0.1, 0.2], y=[1, 1], labels=(2, 1))
    assert data.labels == (1, 2)


def test_invalid_inputs():
    with pytest.raises(DomainError):
        Dataset(x=[0.1, 0.2], y=[1.5, 1])
    with pytest.raises(DomainError):
        Dataset(x=[0.1, np.nan], y=[1, 2])
    with pytest.raises(DomainError):
        Dataset(x=[0.1, 0.2], y=[1, 3], labels=(1, 2))
    with pytest.raises(DomainError):
        Dataset(x=[0.1, 0.2, 0.3], y=[1, 2])


def test_regression_labels_are_real():
    data = Dataset(x=[0.0, 1.0], y=[0.25, -1.5], task="regression")
    assert data.y.dtype == float
    assert data.labels == ()


def test_subset_keeps_label_set():
    data = Dataset(x=[0.1, 0.2, 0.3, 0.4], y=[1, 1, 2, 2])
    subset = data.subset([1, 1, 0, 0])
    assert subset.n == 2
    assert subset.labels == (1, 2)
    with pytest.raises(DomainError):
        data.subset([0, 0, 0, 0])
    with pytest.raises(DomainError):
        data.subset([1, 0])


def test_arrays_are_read_only():
    data = Dataset(x=[0.1, 0.2], y=[1, 2])
    with pytest.raises(ValueError):
        data.x[0, 0] = 5.0


def test_from_samples():
    samples = [Sample(x=(0.1, 1.0), y=1), Sample(x=(0.2, 2.0), y=2)]
    data = Dataset.from_samples(samples)
    assert data.dim == 2
    assert data.samples == tuple(samples)
    with pytest.raises(DomainError):
        Dataset.from_samples([Sample(x=(0.1,), y=1), Sample(x=(0.1, 0.2), y=1)])


def test_learning_set_needs_two_samples():
    with pytest.raises(DomainError):
        Dataset(x=[0.1], y=[1]).require_learning_set()
