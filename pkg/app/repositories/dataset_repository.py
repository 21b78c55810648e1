"""CSV dataset repository."""
import logging
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd

from app.core.exceptions import ConfigurationError, DomainError
from app.models.dataset import Dataset, Task

logger = logging.getLogger(__name__)


class DatasetRepository:
    """Datasets stored as CSV with columns x0..x{d-1}, y."""

    def read(self, path: Union[str, Path], task: Task = "classification",
             labels: Optional[Sequence[int]] = None) -> Dataset:
        """
        Load a dataset.

        Args:
            path: CSV file with a header row
            task: classification (integer labels) or regression
            labels: Declared label set; inferred from the data when omitted

        Returns:
            Validated dataset
        """
        try:
            frame = pd.read_csv(path, comment="#")
        except FileNotFoundError:
            raise ConfigurationError(f"dataset file not found: {path}")
        except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise DomainError(f"unreadable dataset {path}: {e}")

        features = sorted((c for c in frame.columns if str(c).startswith("x")),
                          key=lambda c: int(str(c)[1:]) if str(c)[1:].isdigit() else -1)
        expected = [f"x{j}" for j in range(len(features))]
        if "y" not in frame.columns or not features or features != expected:
            raise ConfigurationError(f"{path}: expected columns x0..x{{d-1}} and y, "
                                     f"got {list(frame.columns)}")
        try:
            x = frame[features].to_numpy(dtype=float)
            y = frame["y"].to_numpy(dtype=float)
        except ValueError as e:
            raise DomainError(f"{path}: non-numeric values ({e})")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise DomainError(f"{path}: NaN or Inf values")

        data = Dataset(x=x, y=y, task=task, labels=tuple(labels or ()))
        logger.info(f"Loaded {data.n} samples with {data.dim} features from {path}")
        return data

    def read_features(self, path: Union[str, Path]) -> np.ndarray:
        """
        Load query features; a y column, if present, is ignored.

        Args:
            path: CSV file with columns x0..x{d-1}

        Returns:
            Array of shape (rows, d)
        """
        try:
            frame = pd.read_csv(path, comment="#")
        except FileNotFoundError:
            raise ConfigurationError(f"query file not found: {path}")
        width = sum(1 for c in frame.columns if str(c).startswith("x"))
        features = [f"x{j}" for j in range(width)]
        if not features or any(c not in frame.columns for c in features):
            raise ConfigurationError(f"{path}: expected columns x0..x{{d-1}}, "
                                     f"got {list(frame.columns)}")
        x = frame[features].to_numpy(dtype=float)
        if not np.all(np.isfinite(x)):
            raise DomainError(f"{path}: NaN or Inf values")
        return x

    @staticmethod
    def render(data: Dataset) -> str:
        columns = {f"x{j}": data.x[:, j] for j in range(data.dim)}
        columns["y"] = data.y
        return pd.DataFrame(columns).to_csv(index=False, lineterminator="\n")

    def write(self, data: Dataset, path: Union[str, Path]) -> Path:
        """
        Write a dataset in the layout ``read`` expects.

        Args:
            data: Dataset to store
            path: Destination file

        Returns:
            The written path
        """
        path = Path(path)
        path.write_text(self.render(data), encoding="utf-8")
        logger.info(f"Wrote {data.n} samples to {path}")
        return path
