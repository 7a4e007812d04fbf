"""Input checks shared by the functional API and the estimator layer."""
from __future__ import annotations

import numpy as np
from sklearn.utils import check_array


def check_grid(grid, name="grid", min_points=2):
    """Return ``grid`` as a finite, strictly increasing 1-D float array."""
    arr = check_array(np.atleast_1d(np.asarray(grid, dtype=float)), ensure_2d=False,
                      dtype=float, ensure_min_samples=1, input_name=name)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if arr.size < min_points:
        raise ValueError(f"{name} needs at least {min_points} points, got {arr.size}")
    if np.any(np.diff(arr) <= 0):
        raise ValueError(f"{name} must be strictly increasing")
    return arr


def check_frequencies(omega, name="omega"):
    """Probe frequencies given as a 1-D array or a single column."""
    arr = np.asarray(omega, dtype=float)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ValueError(f"{name} must have a single column, got shape {arr.shape}")
        arr = arr[:, 0]
    return check_array(np.atleast_1d(arr), ensure_2d=False, dtype=float, input_name=name)
