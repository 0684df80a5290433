"""Interaction kernels and certification of their envelope bounds.

A kernel ``K(r)`` is even, nonnegative and supported in ``(-R, R)``.  Besides
its shape it carries an upper envelope ``K <= intensity * 1_(-R,R)`` and an
optional lower envelope ``K >= lower_intensity * 1_(-lower_radius,
lower_radius)``; the traveling-wave existence and (in)stability results are
stated in terms of these four numbers.
"""

from dataclasses import dataclass, field, replace
import math

import numpy as np

from ._validation import check_positive

__all__ = [
    "Kernel",
    "EnvelopeReport",
    "make_step",
    "make_gaussian",
    "make_dirac_idealized",
    "make_tabulated",
    "load_tabulated",
    "zero_kernel",
    "certify",
]

SHAPES = ("step", "gaussian", "dirac_idealized", "tabulated")


@dataclass(frozen=True, eq=False)
class Kernel:
    shape: str
    intensity: float
    radius: float
    lower_intensity: float = 0.0
    lower_radius: float = 0.0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError(f"unknown kernel shape {self.shape!r}")
        if self.intensity < 0 or self.lower_intensity < 0 or self.lower_radius < 0:
            raise ValueError("kernel envelope parameters must be nonnegative")
        if not self.radius > 0:
            raise ValueError(f"kernel radius must be > 0, got {self.radius}")

    def profile(self, r):
        """Shape of K ignoring the support cut-off (limits from inside at +-R)."""
        r = np.abs(np.asarray(r, dtype=float))
        if self.shape == "step":
            return np.full(r.shape, self.params.get("height", self.intensity))
        if self.shape == "gaussian":
            width = self.params["width"]
            return self.params["peak"] * np.exp(-0.5 * (r / width) ** 2)
        if self.shape == "tabulated":
            return np.interp(r, self.params["r"], self.params["values"])
        raise TypeError("the idealized Dirac kernel has no pointwise profile")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.shape == "dirac_idealized":
            return np.where(r == 0, np.inf, 0.0)
        return np.where(np.abs(r) < self.radius, self.profile(r), 0.0)

    def mass(self):
        """Integral of K over the real line."""
        if self.shape == "dirac_idealized":
            return 1.0
        if self.shape == "step":
            return 2.0 * self.params.get("height", self.intensity) * self.radius
        if self.shape == "gaussian":
            w = self.params["width"]
            return (
                self.params["peak"] * w * math.sqrt(2 * math.pi)
                * math.erf(self.radius / (w * math.sqrt(2)))
            )
        r, k = self.params["r"], self.params["values"]
        return float(np.sum((k[1:] + k[:-1]) * np.diff(r)))

    def scaled(self, factor):
        """Kernel multiplied by a positive constant (envelopes scale too)."""
        factor = check_positive(factor, "factor")
        params = dict(self.params)
        for key in ("height", "peak"):
            if key in params:
                params[key] = params[key] * factor
        if "values" in params:
            params["values"] = params["values"] * factor
        return replace(
            self,
            intensity=self.intensity * factor,
            lower_intensity=self.lower_intensity * factor,
            params=params,
        )

    def with_lower_envelope(self, lower_intensity, lower_radius):
        return replace(
            self, lower_intensity=float(lower_intensity), lower_radius=float(lower_radius)
        )

    def describe(self):
        return (
            f"{self.shape}(Lambda={self.intensity:g}, R={self.radius:g}, "
            f"lambda={self.lower_intensity:g}, rho={self.lower_radius:g})"
        )


def make_step(intensity, radius):
    """``K = intensity`` on ``(-radius, radius)``; mass ``2*intensity*radius``."""
    intensity = check_positive(intensity, "intensity")
    radius = check_positive(radius, "radius")
    return Kernel("step", intensity, radius, intensity, radius, {"height": intensity})


def zero_kernel(radius=1.0):
    """The vanishing kernel, for heat-equation controls."""
    return Kernel("step", 0.0, check_positive(radius, "radius"), 0.0, 0.0, {"height": 0.0})


def make_gaussian(peak, width, radius):
    """Gaussian ``peak*exp(-r^2/(2 width^2))`` truncated at ``|r| = radius``.

    The lower envelope is taken on half the support radius.
    """
    peak = check_positive(peak, "peak")
    width = check_positive(width, "width")
    radius = check_positive(radius, "radius")
    lower_radius = 0.5 * radius
    lower = peak * math.exp(-0.5 * (lower_radius / width) ** 2)
    return Kernel("gaussian", peak, radius, lower, lower_radius, {"peak": peak, "width": width})


def make_dirac_idealized():
    """Sentinel kernel: convolution returns its argument unchanged."""
    return Kernel("dirac_idealized", math.inf, 1e-300, 0.0, 0.0, {})


def make_tabulated(r, values):
    """Even kernel interpolated linearly from samples at ascending ``r >= 0``."""
    r = np.asarray(r, dtype=float)
    values = np.asarray(values, dtype=float)
    if r.ndim != 1 or r.shape != values.shape or r.size < 2:
        raise ValueError("tabulated kernel needs matching 1-D arrays with >= 2 entries")
    if r[0] != 0 or np.any(np.diff(r) <= 0):
        raise ValueError("tabulated r must start at 0 and be strictly ascending")
    if np.any(values < 0) or not np.all(np.isfinite(values)):
        raise ValueError("tabulated kernel values must be finite and nonnegative")
    r.setflags(write=False)
    values.setflags(write=False)
    peak = float(values.max())
    return Kernel("tabulated", peak, float(r[-1]), 0.0, 0.0, {"r": r, "values": values})


def load_tabulated(path):
    """Read a two-column whitespace-separated ``r value`` file."""
    data = np.loadtxt(path, ndmin=2)
    if data.shape[1] != 2:
        raise ValueError(f"{path}: expected two columns, found {data.shape[1]}")
    return make_tabulated(data[:, 0], data[:, 1])


@dataclass(frozen=True)
class EnvelopeReport:
    upper_violation: float
    lower_violation: float
    lower_slack: float
    truncation_loss: float
    max_asymmetry: float
    passed: bool


def certify(kernel, samples=2001, *, intensity=None, radius=None,
            lower_intensity=None, lower_radius=None):
    """Check the declared envelopes of `kernel` on a dense sample of r.

    Declared values default to the ones stored on the kernel.  The check
    passes when both envelope violations are at most 1e-12.
    """
    if samples < 100:
        raise ValueError("certify needs at least 100 samples")
    if kernel.shape == "dirac_idealized":
        return EnvelopeReport(0.0, 0.0, 0.0, 0.0, 0.0, True)
    upper = kernel.intensity if intensity is None else intensity
    support = kernel.radius if radius is None else radius
    lower = kernel.lower_intensity if lower_intensity is None else lower_intensity
    lower_r = kernel.lower_radius if lower_radius is None else lower_radius

    reach = 1.5 * max(kernel.radius, support)
    r = np.linspace(-reach, reach, samples)
    k = kernel(r)
    envelope = np.where(np.abs(r) < support, upper, 0.0)
    upper_violation = max(0.0, float(np.max(k - envelope)))

    lower_violation = 0.0
    slack = math.inf
    if lower > 0:
        if lower_r > support:
            lower_violation = math.inf
        inside = np.abs(r) < lower_r
        if inside.any():
            slack = float(np.min(k[inside] - lower))
            lower_violation = max(lower_violation, -slack, 0.0)

    loss = 0.0
    if kernel.shape == "gaussian":
        loss = kernel.params["peak"] * kernel.params["width"] * math.sqrt(2 * math.pi) - kernel.mass()

    asym = float(np.max(np.abs(k - kernel(-r))))
    passed = upper_violation <= 1e-12 and lower_violation <= 1e-12
    return EnvelopeReport(upper_violation, lower_violation, slack, loss, asym, passed)
