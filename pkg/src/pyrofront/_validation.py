"""Small input-validation helpers shared by the public entry points."""

import numbers

import numpy as np
from sklearn.utils.validation import check_array


def check_positive(value, name, strict=True):
    if not isinstance(value, numbers.Real) or not np.isfinite(value):
        raise ValueError(f"{name} must be a finite real number, got {value!r}")
    if strict and value <= 0:
        raise ValueError(f"{name} must be > 0, got {value!r}")
    if not strict and value < 0:
        raise ValueError(f"{name} must be >= 0, got {value!r}")
    return float(value)


def check_samples(values, name="values", n_expected=None):
    """Return `values` as a finite 1-D float64 array.

    Parameters
    ----------
    values : array-like
        Samples of a function on a grid.
    name : str
        Used in error messages.
    n_expected : int, optional
        Required length.
    """
    arr = check_array(
        np.asarray(values, dtype=np.float64).reshape(1, -1),
        ensure_all_finite=True,
        input_name=name,
    ).ravel()
    if n_expected is not None and arr.size != n_expected:
        raise ValueError(f"{name} has {arr.size} samples, expected {n_expected}")
    return arr


def check_positions(x, name="X"):
    """Accept scalars, 1-D arrays or single-column 2-D arrays of positions."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim > 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if np.isnan(arr).any():
        raise ValueError(f"{name} contains NaN")
    return arr
