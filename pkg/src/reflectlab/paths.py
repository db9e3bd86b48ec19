"""
Skorohod reflection of sampled real paths
=========================================

Paths live on a uniform time grid ``t0 + i*dt``; between grid points they are
understood as linearly interpolated.  :func:`push_up` keeps a path above a
barrier by the minimal non-decreasing correction, :func:`push_down` is its
mirror image.

The closed form used is

.. math:: x_{b\\uparrow}(t_i) = x(t_i) + \\max_{j \\le i} (b(t_j) - x(t_j))_+

so the push is a running maximum, computed with ``np.maximum.accumulate``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["SampledPath", "push_up", "push_down", "push_amount"]


@dataclass(frozen=True, eq=False)
class SampledPath:
    """A real path sampled on the grid ``t0, t0 + dt, ...``.

    Parameters
    ----------
    values : array_like
        Path values at the grid points.  Stored as a read-only float array.
    dt : float
        Grid step, strictly positive.
    t0 : float
        Start time.
    """

    values: np.ndarray
    dt: float = 1.0
    t0: float = 0.0

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("path values must be a nonempty 1d sequence")
        if not np.all(np.isfinite(values)):
            raise ValueError("path values must be finite")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "t0", float(self.t0))

    def __len__(self):
        return self.values.size

    def __neg__(self):
        return SampledPath(-self.values, self.dt, self.t0)

    def __eq__(self, other):
        if not isinstance(other, SampledPath):
            return NotImplemented
        return self.same_grid(other) and np.array_equal(self.values, other.values)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.values.size)

    @property
    def horizon(self) -> float:
        return self.t0 + (self.values.size - 1) * self.dt

    def same_grid(self, other: "SampledPath") -> bool:
        return (self.t0 == other.t0 and self.dt == other.dt
                and self.values.size == other.values.size)

    def __call__(self, t):
        """Evaluate the linearly interpolated path at time(s) ``t``."""
        return np.interp(t, self.times, self.values)


def _check_pair(x: SampledPath, b: SampledPath):
    if not x.same_grid(b):
        raise ValueError("incompatible grids")


def push_amount(x: SampledPath, b: SampledPath) -> np.ndarray:
    """Running push ``max_{j<=i} (b[j] - x[j])_+`` applied by :func:`push_up`."""
    _check_pair(x, b)
    return np.maximum.accumulate(np.maximum(b.values - x.values, 0.0))


def push_up(x: SampledPath, b: SampledPath) -> SampledPath:
    """Upwards Skorohod reflection of ``x`` on the barrier ``b``.

    Returns the unique path ``r`` with ``r >= b``, ``r - x`` non-decreasing and
    increasing only at contact with ``b``.

    Raises
    ------
    ValueError
        If the grids differ ("incompatible grids") or ``x`` starts below ``b``
        ("initial order violated").
    """
    _check_pair(x, b)
    if x.values[0] < b.values[0]:
        raise ValueError("initial order violated")
    push = push_amount(x, b)
    rises = np.empty(push.size, dtype=bool)
    rises[0] = False
    rises[1:] = push[1:] > push[:-1]
    # at a rise the output is the barrier itself, bit for bit
    r = np.where(rises, b.values, np.maximum(x.values + push, b.values))
    return SampledPath(r, x.dt, x.t0)


def push_down(y: SampledPath, b: SampledPath) -> SampledPath:
    """Downwards reflection, ``-push_up(-y, -b)``."""
    _check_pair(y, b)
    if y.values[0] > b.values[0]:
        raise ValueError("initial order violated")
    return -push_up(-y, -b)
