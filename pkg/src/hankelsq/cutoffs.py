"""Smooth compactly supported cutoff functions built from the exp(-1/x) mollifier.

All cutoffs used by the operator modules are instances of :class:`SmoothBump`
(or simple algebraic combinations of them), so their supports and plateaus are
inspectable.  The canonical choices:

* ``chi``     -- equal to 1 on [3/4, 3/2], supported in [1/2, 2]
* ``phi``     -- supported in [1, 2], normalised so that int phi^2 dt/t = 1
* ``eta``     -- equal to 1 on [1/4, 4], supported in (1/8, 8)
* ``lp_chi``  -- dyadic partition bump: sum_{l>=0} lp_chi(2^l x) = 1 on (0, 1]
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad


def _mollifier(x):
    """exp(-1/x) for x > 0, 0 otherwise; smooth on all of R."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def smooth_step(x):
    """Smooth monotone step: 0 for x <= 0, 1 for x >= 1."""
    a = _mollifier(np.asarray(x, dtype=float))
    b = _mollifier(1.0 - np.asarray(x, dtype=float))
    return a / (a + b)


@dataclass(frozen=True)
class SmoothBump:
    """C^infinity bump equal to 1 on [lo1, hi1] and supported in [lo0, hi0]."""

    lo0: float
    lo1: float
    hi1: float
    hi0: float

    def __post_init__(self):
        if not (self.lo0 <= self.lo1 <= self.hi1 <= self.hi0):
            raise ValueError("bump breakpoints must be ordered")

    @property
    def support(self) -> tuple[float, float]:
        return (self.lo0, self.hi0)

    @property
    def plateau(self) -> tuple[float, float]:
        return (self.lo1, self.hi1)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.lo1 > self.lo0:
            up = smooth_step((x - self.lo0) / (self.lo1 - self.lo0))
        else:
            up = (x >= self.lo0).astype(float)
        if self.hi0 > self.hi1:
            down = smooth_step((self.hi0 - x) / (self.hi0 - self.hi1))
        else:
            down = (x <= self.hi0).astype(float)
        return up * down


def chi_canonical() -> SmoothBump:
    """The fixed cutoff chi: 1 on [3/4, 3/2], supported in [1/2, 2]."""
    return SmoothBump(0.5, 0.75, 1.5, 2.0)


def eta_canonical() -> SmoothBump:
    """Littlewood-Paley projection cutoff: 1 on [1/4, 4], supported in (1/8, 8)."""
    return SmoothBump(0.125, 0.25, 4.0, 8.0)


def lp_partition_bump() -> "DyadicPartitionBump":
    """chi with sum_{l>=0} chi(2^l x) = 1 for 0 < x <= 1, supported in [1/2, 2]."""
    return DyadicPartitionBump()


class DyadicPartitionBump:
    """theta(x) - theta(2x) for a smooth theta equal to 1 on [0,1], 0 beyond 2.

    Supported in [1/2, 2]; partial sums telescope: sum_{l=0}^{L} b(2^l x)
    equals 1 exactly for x in [2^-L, 1].
    """

    support = (0.5, 2.0)

    @staticmethod
    def theta(x):
        return smooth_step(2.0 - np.asarray(x, dtype=float))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.theta(x) - self.theta(2.0 * x)


class NormalizedPhi:
    """Smooth bump supported in [1, 2], scaled so that int phi(t)^2 dt/t = 1."""

    support = (1.0, 2.0)

    def __init__(self):
        self._bump = SmoothBump(1.0, 1.25, 1.75, 2.0)
        val, _ = quad(lambda t: self._bump(t) ** 2 / t, 1.0, 2.0, limit=200)
        self._scale = 1.0 / np.sqrt(val)

    def __call__(self, t):
        return self._scale * self._bump(np.asarray(t, dtype=float))


def phi_canonical() -> NormalizedPhi:
    return NormalizedPhi()
