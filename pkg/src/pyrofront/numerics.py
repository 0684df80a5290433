"""Quadrature and convolution primitives on uniform one-dimensional grids.

Every routine here is a pure function of its inputs.  Sums run in a fixed
order (sequential cumulative sums, direct convolution) so repeated calls give
bit-identical results.
"""

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from ._validation import check_samples
from .exceptions import ConfigurationError

__all__ = [
    "Grid1D",
    "Field",
    "trapezoid",
    "cumulative_from_anchor",
    "convolve",
    "convolve_plus",
    "convolution_stencil",
]


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid ``x_min + i*h`` for ``i = 0..n_points-1``."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max)):
            raise ValueError("grid bounds must be finite")
        if not self.x_min < self.x_max:
            raise ValueError(f"x_min={self.x_min} must be < x_max={self.x_max}")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ValueError(f"n_points must be an integer >= 2, got {self.n_points}")
        object.__setattr__(self, "x_min", float(self.x_min))
        object.__setattr__(self, "x_max", float(self.x_max))
        object.__setattr__(self, "n_points", int(self.n_points))

    @property
    def h(self):
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def nodes(self):
        return self.x_min + np.arange(self.n_points) * self.h

    def index_of(self, x, atol=1e-9):
        """Index of the node at position `x`; raises if `x` is not a node."""
        pos = (x - self.x_min) / self.h
        i = int(round(pos))
        if not 0 <= i < self.n_points or abs(pos - i) > atol:
            raise ValueError(f"x={x} is not a node of {self}")
        return i

    def has_node(self, x, atol=1e-9):
        try:
            self.index_of(x, atol)
        except ValueError:
            return False
        return True


@dataclass(frozen=True, eq=False)
class Field:
    """Samples of a function on a :class:`Grid1D`."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        values = check_samples(self.values, "field values", self.grid.n_points)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, grid, func):
        return cls(grid, func(grid.nodes))

    @property
    def x(self):
        return self.grid.nodes

    def __len__(self):
        return self.grid.n_points


def _cell_integrals(values, h):
    return 0.5 * h * (values[:-1] + values[1:])


def _check_index(i, n, name):
    if int(i) != i or not 0 <= i < n:
        raise IndexError(f"{name}={i} out of range for {n} points")
    return int(i)


def trapezoid(field, from_index, to_index):
    """Composite trapezoid integral of `field` between two node indices."""
    n = field.grid.n_points
    i = _check_index(from_index, n, "from_index")
    j = _check_index(to_index, n, "to_index")
    if i > j:
        raise IndexError(f"from_index={i} exceeds to_index={j}")
    if i == j:
        return 0.0
    cells = _cell_integrals(field.values[i : j + 1], field.grid.h)
    return float(np.cumsum(cells)[-1])


def _cumulative(values, h, anchor):
    cells = _cell_integrals(values, h)
    out = np.zeros_like(values)
    out[anchor + 1 :] = np.cumsum(cells[anchor:])
    if anchor > 0:
        out[:anchor] = -np.cumsum(cells[:anchor][::-1])[::-1]
    return out


def cumulative_from_anchor(field, anchor_index):
    """Signed running integral ``F(x_i) = int_{x_anchor}^{x_i} f``.

    Accumulation runs outward from the anchor in both directions, so
    ``F(anchor) == 0`` exactly and ``F(x_b) == trapezoid(f, anchor, b)`` bit
    for bit.
    """
    a = _check_index(anchor_index, field.grid.n_points, "anchor_index")
    return Field(field.grid, _cumulative(field.values, field.grid.h, a))


@lru_cache(maxsize=64)
def _stencil(kernel, h):
    radius = kernel.radius
    if radius < h * (1 - 1e-12):
        raise ConfigurationError(
            f"kernel radius R={radius:g} is not resolved by grid spacing h={h:g}; "
            "refine the grid so that h <= R"
        )
    m = max(1, int(math.floor(radius / h * (1 + 1e-12))))
    frac = radius - m * h
    if frac <= 1e-12 * h:
        frac = 0.0
    half = m + 1 if frac > 0 else m
    offsets = np.arange(-half, half + 1)
    coeffs = np.zeros(offsets.size)
    # window nodes y = j*h strictly inside (-R, R), plus the fractional ends
    inner = kernel.profile(np.arange(-m, m + 1) * h) * h
    inner[0] *= 0.5
    inner[-1] *= 0.5
    coeffs[half - m : half + m + 1] = inner
    if frac > 0:
        theta = frac / h
        for sign in (-1, 1):
            k_edge = float(kernel.profile(np.array([sign * radius]))[0])
            k_last = float(kernel.profile(np.array([sign * m * h]))[0])
            # last partial cell [m*h, R]: trapezoid with the end value
            # interpolated between nodes m and m+1
            coeffs[half + sign * m] += 0.5 * frac * k_last
            coeffs[half + sign * m] += 0.5 * frac * k_edge * (1 - theta)
            coeffs[half + sign * (m + 1)] += 0.5 * frac * k_edge * theta
    coeffs.setflags(write=False)
    return coeffs


def convolution_stencil(kernel, h):
    """Weights ``c_j`` with ``(f*K)(x_i) ~= sum_j c_j f(x_i - j h)``.

    The window ``[-R, R]`` is integrated with the trapezoid rule on the nodes
    ``j*h`` plus the two fractional endpoints, where the integrand is linearly
    interpolated between the neighbouring nodes.  The returned array is
    centred: entry ``len//2`` is ``j = 0``.
    """
    return _stencil(kernel, float(h))


def _apply_stencil(values, coeffs, left, right):
    half = coeffs.size // 2
    padded = np.concatenate([np.full(half, left), values, np.full(half, right)])
    return np.convolve(padded, coeffs, mode="valid")


def convolve(field, kernel, extension="constant"):
    """Linear convolution ``(f*K)(x_i)`` of a sampled field.

    Parameters
    ----------
    field : Field
    kernel : Kernel
    extension : {"constant", "zero"}
        How samples beyond the grid ends are filled.  ``"constant"`` repeats
        the boundary values; ``"zero"`` restricts the integral to the grid
        interval (used by the bounded-domain solver).
    """
    values = field.values
    if kernel.shape == "dirac_idealized":
        return Field(field.grid, values.copy())
    if kernel.intensity == 0:
        return Field(field.grid, np.zeros_like(values))
    coeffs = convolution_stencil(kernel, field.grid.h)
    if extension == "constant":
        left, right = values[0], values[-1]
    elif extension == "zero":
        left = right = 0.0
    else:
        raise ValueError(f"unknown extension {extension!r}")
    return Field(field.grid, _apply_stencil(values, coeffs, left, right))


def convolve_plus(field, kernel):
    """``(v_+ * K)(x_i)`` with constant extension of `v` beyond the grid."""
    positive = Field(field.grid, np.maximum(field.values, 0.0))
    return convolve(positive, kernel, extension="constant")
