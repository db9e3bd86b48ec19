"""
Discrete Skorohod reflection on the dual lattices
=================================================

A walk ``w`` with ``|w(t+1) - w(t)| = 1`` lives on the even lattice ``L``
(``t + w(t)`` even) or the odd lattice ``L*`` (``t + w(t)`` odd).  A walk on
one lattice is reflected on a barrier walk from the other, so the two never
meet: the reflected walk stays at distance at least one from the barrier.

Closed form for the upwards reflection of ``x`` on ``b``::

    push(t) = max(0, max_{s <= t} (b(s) + 1 - x(s)))
    x_up(t) = x(t) + push(t)

and the same map in one-step form, ``u(t+1) = max(u(t) + dx, b(t+1) + 1)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "LatticeWalk",
    "discrete_push_up",
    "discrete_push_down",
    "discrete_push_amount",
    "push_up_values",
    "push_down_values",
    "online_push_up_step",
    "online_push_down_step",
]


@dataclass(frozen=True, eq=False)
class LatticeWalk:
    """Integer walk given by its start value and a sequence of +-1 steps."""

    start: int
    steps: np.ndarray

    def __post_init__(self):
        steps = np.array(self.steps, dtype=np.int64).reshape(-1)
        if not np.all(np.abs(steps) == 1):
            raise ValueError("steps must be +1 or -1")
        steps.flags.writeable = False
        object.__setattr__(self, "steps", steps.astype(np.int8))
        object.__setattr__(self, "start", int(self.start))

    @classmethod
    def from_values(cls, values) -> "LatticeWalk":
        values = np.asarray(values)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("walk values must be a nonempty 1d sequence")
        if not np.all(values == np.round(values)):
            raise ValueError("walk values must be integers")
        values = values.astype(np.int64)
        steps = np.diff(values)
        if not np.all(np.abs(steps) == 1):
            raise ValueError("consecutive walk values must differ by exactly 1")
        return cls(int(values[0]), steps)

    @cached_property
    def values(self) -> np.ndarray:
        v = np.empty(self.steps.size + 1, dtype=np.int64)
        v[0] = self.start
        np.cumsum(self.steps, out=v[1:])
        v[1:] += self.start
        v.flags.writeable = False
        return v

    @property
    def parity(self) -> int:
        """0 for a walk on ``L``, 1 for a walk on ``L*``."""
        return self.start % 2

    @property
    def lattice(self) -> str:
        return "L" if self.parity == 0 else "L*"

    def __len__(self):
        return self.steps.size + 1

    def __neg__(self):
        return LatticeWalk(-self.start, -self.steps.astype(np.int64))

    def __eq__(self, other):
        if not isinstance(other, LatticeWalk):
            return NotImplemented
        return self.start == other.start and np.array_equal(self.steps, other.steps)


def _check_pair(x: LatticeWalk, b: LatticeWalk):
    if len(x) != len(b):
        raise ValueError("walk lengths differ")
    if x.parity == b.parity:
        raise ValueError("parity violation: walk and barrier must lie on dual lattices")


def push_up_values(x, b) -> np.ndarray:
    """Closed-form upwards reflection on integer arrays, along the last axis.

    No validation; batches of walks broadcast against each other.
    """
    x = np.asarray(x)
    return x + np.maximum.accumulate(np.maximum(np.asarray(b) + 1 - x, 0), axis=-1)


def push_down_values(y, b) -> np.ndarray:
    y = np.asarray(y)
    return y - np.maximum.accumulate(np.maximum(y - np.asarray(b) + 1, 0), axis=-1)


def discrete_push_amount(x: LatticeWalk, b: LatticeWalk) -> np.ndarray:
    """Running push ``max(0, max_{s<=t} (b[s] + 1 - x[s]))``; always even."""
    _check_pair(x, b)
    return push_up_values(x.values, b.values) - x.values


def discrete_push_up(x: LatticeWalk, b: LatticeWalk) -> LatticeWalk:
    """Upwards reflection of ``x`` on the dual-lattice barrier ``b``.

    The result lies on the lattice of ``x``, stays strictly above ``b``, and
    its push increases only at times where it equals ``b + 1``.
    """
    _check_pair(x, b)
    if x.start < b.start:
        raise ValueError("initial order violated")
    return LatticeWalk.from_values(push_up_values(x.values, b.values))


def discrete_push_down(y: LatticeWalk, b: LatticeWalk) -> LatticeWalk:
    _check_pair(y, b)
    if y.start > b.start:
        raise ValueError("initial order violated")
    return -discrete_push_up(-y, -b)


def online_push_up_step(u_t, dx, b_next):
    """One step of the upwards reflection; broadcasts over arrays."""
    r = np.maximum(u_t + dx, b_next + 1)
    return r if np.ndim(r) else int(r)


def online_push_down_step(l_t, dy, b_next):
    r = np.minimum(l_t + dy, b_next - 1)
    return r if np.ndim(r) else int(r)
