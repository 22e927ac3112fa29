# engine/minibatch.py
from collections.abc import Sequence

import numpy as np

from core.models import Task
from .errors import DatasetError


def sample_minibatch(dataset: Sequence[Task], batch_size: int, rng: np.random.Generator) -> list[Task]:
    """Draw ``batch_size`` tasks uniformly with replacement, in draw order."""
    if not dataset:
        raise DatasetError("cannot sample from an empty dataset")
    if batch_size < 1:
        raise DatasetError(f"batch_size must be positive, got {batch_size}")
    return [dataset[int(i)] for i in rng.integers(0, len(dataset), size=batch_size)]
