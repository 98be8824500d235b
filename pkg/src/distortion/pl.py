"""Piecewise-linear scalar profiles with breakpoint-level composition and powers.

Profiles are the 1-D backbone of the invertible map primitives: radial
scalings, axis pushes and the swindle contraction all evaluate through a
strictly increasing piecewise-linear function that agrees with the identity
outside a bounded breakpoint hull.  Doing composition, inversion and k-th
powers on the breakpoints themselves (instead of chaining k float
evaluations) is what keeps deep powers of contracting maps exactly
invertible.
"""

from __future__ import annotations

import numpy as np


class ProfileError(ValueError):
    """Raised when breakpoint data does not describe a valid profile."""


def interp_clamped(t, xs, ys, slopes):
    """Piecewise-linear interpolation clamped to the end values.

    Unlike np.interp this preserves the input floating dtype, so evaluation
    pipelines can run in extended precision end to end.
    """
    t = np.asarray(t)
    idx = np.clip(np.searchsorted(xs, t, side="right") - 1, 0, len(xs) - 2)
    vals = ys[idx] + (t - xs[idx]) * slopes[idx]
    vals = np.where(t <= xs[0], ys[0], vals)
    return np.where(t >= xs[-1], ys[-1], vals)


class PLProfile:
    """Strictly increasing piecewise-linear map, identity outside its hull.

    The hull endpoints must be fixed points (``ys[0] == xs[0]`` and
    ``ys[-1] == xs[-1]``) so that the linear pieces glue continuously to the
    identity outside ``[xs[0], xs[-1]]``.
    """

    __slots__ = ("xs", "ys", "slopes")

    def __init__(self, xs, ys):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
            raise ProfileError("need matching 1-D breakpoint arrays of length >= 2")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise ProfileError("non-finite breakpoint")
        if np.any(np.diff(xs) <= 0):
            raise ProfileError("breakpoint abscissae must increase strictly")
        if np.any(np.diff(ys) <= 0):
            raise ProfileError("profile must be strictly increasing")
        if xs[0] != ys[0] or xs[-1] != ys[-1]:
            raise ProfileError("hull endpoints must be fixed points")
        self.xs = xs
        self.ys = ys
        self.slopes = np.diff(ys) / np.diff(xs)
        for a in (self.xs, self.ys, self.slopes):
            a.setflags(write=False)

    @classmethod
    def identity(cls) -> "PLProfile":
        return cls((0.0, 1.0), (0.0, 1.0))

    @property
    def hull(self) -> tuple[float, float]:
        return float(self.xs[0]), float(self.xs[-1])

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.xs, self.ys))

    def __call__(self, t):
        t = np.asarray(t)
        inside = (t > self.xs[0]) & (t < self.xs[-1])
        return np.where(inside, interp_clamped(t, self.xs, self.ys, self.slopes), t)

    def min_slope(self) -> float:
        return float(np.min(self.slopes))

    def max_slope(self) -> float:
        return float(np.max(self.slopes))

    def inverse(self) -> "PLProfile":
        return PLProfile(self.ys, self.xs)

    def compose(self, inner: "PLProfile") -> "PLProfile":
        """Return self o inner, with breakpoints merged exactly."""
        pulled = inner.inverse()(self.xs)
        xs = np.unique(np.concatenate([inner.xs, pulled]))
        ys = self(inner(xs))
        keep = np.ones(xs.size, dtype=bool)
        keep[1:] = np.diff(xs) > 0
        return PLProfile(xs[keep], ys[keep])

    def power(self, k: int) -> "PLProfile":
        """k-fold composite computed on breakpoints; k may be negative."""
        if k == 0:
            return PLProfile.identity()
        if k < 0:
            return self.inverse().power(-k)
        out = self
        for _ in range(k - 1):
            out = out.compose(self)
        return out

    def __repr__(self):
        return f"PLProfile(xs={self.xs.tolist()}, ys={self.ys.tolist()})"


class CutoffProfile:
    """Piecewise-linear cutoff in [0, 1], constant outside its breakpoint hull.

    Used for localized-translation bumps and transverse attenuation of axis
    pushes; unlike :class:`PLProfile` it need not be monotone or fix its hull.
    """

    __slots__ = ("xs", "ys", "slopes")

    def __init__(self, xs, ys):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
            raise ProfileError("need matching 1-D breakpoint arrays of length >= 2")
        if np.any(np.diff(xs) <= 0):
            raise ProfileError("breakpoint abscissae must increase strictly")
        if np.any((ys < 0.0) | (ys > 1.0)):
            raise ProfileError("cutoff values must lie in [0, 1]")
        self.xs = xs
        self.ys = ys
        self.slopes = np.diff(ys) / np.diff(xs)
        for a in (self.xs, self.ys, self.slopes):
            a.setflags(write=False)

    def __call__(self, t):
        return interp_clamped(t, self.xs, self.ys, self.slopes)

    def max_abs_slope(self) -> float:
        return float(np.max(np.abs(self.slopes)))

    def zero_start(self) -> float:
        """Smallest breakpoint beyond which the cutoff stays zero."""
        if self.ys[-1] != 0.0:
            return float("inf")
        idx = len(self.ys) - 1
        while idx > 0 and self.ys[idx - 1] == 0.0:
            idx -= 1
        return float(self.xs[idx])

    def __repr__(self):
        return f"CutoffProfile(xs={self.xs.tolist()}, ys={self.ys.tolist()})"
