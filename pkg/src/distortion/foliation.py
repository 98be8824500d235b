"""Coordinate-line foliation factors of a near-identity map of a cube.

A map f close enough to the identity factors as phi_n o ... o phi_1 where
phi_k changes only the k-th coordinate, hence preserves the foliation by
lines parallel to axis k.  The factors come from a recursion on partial
projections: after peeling off the first k factors, the first k coordinates
of the remainder are already restored, and the (k+1)-st factor copies the
(k+1)-st component of that remainder.  Factor inverses are monotone 1-D
solves; everything is verified on a grid against direct evaluation of f.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geomaps import MapExpr, float_array


class MonotonicityError(RuntimeError):
    """A coordinate slice of the map is not increasing: input too far from identity."""

    def __init__(self, axis, point, slope, floor):
        super().__init__(
            f"axis-{axis} slice slope {slope:.4f} below floor {floor} near {point}"
        )
        self.axis = axis
        self.point = point
        self.slope = slope


class FoliationVerificationError(RuntimeError):
    """Reconstruction from the factors missed the map by more than the tolerance."""


class FragmentationError(RuntimeError):
    """Cover too fine: a displacement exceeds the slab-overlap budget."""


def cube_grid(dim: int, per_axis: int, half: float = 1.0) -> np.ndarray:
    """Regular grid of the closed cube [-half, half]^dim, flattened to points."""
    axis = np.linspace(-half, half, per_axis)
    mesh = np.meshgrid(*([axis] * dim), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def solve_increasing(fiber, target, lo: float, hi: float, tol: float = 1e-12,
                     bisect_iters: int = 24, secant_iters: int = 8) -> np.ndarray:
    """Vectorized root solve of fiber(t) = target for increasing fiber maps.

    Bisection brackets to ~hi-lo * 2^-24, then secant polishes; residuals are
    verified by the callers' tolerance checks rather than trusted blindly.
    """
    target = np.asarray(target)
    lo = np.full(target.shape, lo, dtype=float)
    hi = np.full(target.shape, hi, dtype=float)
    flo = fiber(lo) - target
    fhi = fiber(hi) - target
    for _ in range(bisect_iters):
        mid = 0.5 * (lo + hi)
        neg = (fiber(mid) - target) < 0.0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    a, b = lo, hi
    fa = fiber(a) - target
    fb = fiber(b) - target
    x = 0.5 * (a + b)
    for _ in range(secant_iters):
        denom = fb - fa
        safe = np.where(np.abs(denom) > 0.0, denom, 1.0)
        x = np.clip(b - fb * (b - a) / safe, lo, hi)
        fx = fiber(x) - target
        if float(np.max(np.abs(fx))) < tol:
            break
        neg = fx < 0.0
        a, fa = np.where(neg, x, a), np.where(neg, fx, fa)
        b, fb = np.where(neg, b, x), np.where(neg, fb, fx)
    return x


class AxisFactor:
    """Invertible map changing only one coordinate (a foliation-preserving factor)."""

    def __init__(self, axis: int, dim: int, value_fn, lo: float, hi: float,
                 solver_tol: float = 1e-12):
        self.axis = axis
        self.dim = dim
        self.value_fn = value_fn
        self.lo = lo
        self.hi = hi
        self.solver_tol = solver_tol

    def apply(self, pts):
        pts = float_array(pts)
        out = np.array(pts, copy=True)
        out[..., self.axis] = self.value_fn(pts)
        return out

    def apply_inverse(self, pts):
        pts = float_array(pts)
        target = pts[..., self.axis]

        def fiber(t):
            probe = np.array(pts, copy=True)
            probe[..., self.axis] = t
            return self.value_fn(probe)

        out = np.array(pts, copy=True)
        out[..., self.axis] = solve_increasing(fiber, target, self.lo, self.hi,
                                               tol=self.solver_tol)
        return out

    def inverse(self):
        return _FactorInverse(self)

    def is_identity(self):
        return False

    def __repr__(self):
        return f"AxisFactor(axis={self.axis}, dim={self.dim})"


class _FactorInverse:
    def __init__(self, child):
        self.child = child
        self.dim = child.dim

    def apply(self, pts):
        return self.child.apply_inverse(pts)

    def apply_inverse(self, pts):
        return self.child.apply(pts)

    def inverse(self):
        return self.child


@dataclass
class MarginReport:
    axis: int
    min_slope: float
    off_axis_drift: float

    @property
    def leaves_preserved(self) -> bool:
        return self.off_axis_drift == 0.0 and self.min_slope > 0.0


@dataclass
class DecompositionReport:
    factors: list
    sup_error: float
    margins: list           # per-factor MarginReport
    projection_errors: list  # per-k sup of the partial-projection identity
    grid: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.sup_error < self.tolerance


def _remainder_chain(f: MapExpr, factors):
    """f o phi_1^-1 o ... o phi_k^-1 as a point function (rightmost first)."""

    def chain(pts):
        for factor in reversed(factors):
            pts = factor.apply_inverse(pts)
        return f.apply(pts)

    return chain


def _axis_margin(values: np.ndarray, grid: int, dim: int, axis: int, half: float):
    """Min finite-difference slope of a per-point value array along one axis."""
    cube = values.reshape((grid,) * dim)
    h = 2.0 * half / (grid - 1)
    slopes = np.diff(cube, axis=axis) / h
    idx = np.unravel_index(np.argmin(slopes), slopes.shape)
    return float(slopes[idx]), idx


def foliation_decompose(f: MapExpr, grid: int = 17, tol: float = 1e-6,
                        slope_floor: float = 0.2, solver_tol: float = 1e-12,
                        cube_half: float = 1.0) -> DecompositionReport:
    """Factor f into per-axis maps by the partial-projection recursion.

    Factor k+1 copies component k+1 of f o phi_1^-1 o ... o phi_k^-1, which
    by induction already restores the first k coordinates.  Monotonicity of
    each factor's axis slices is checked on the grid (margin >= slope_floor)
    before its inverse is ever solved; the reconstruction is verified against
    direct evaluation of f on the same grid.
    """
    dim = f.dim
    if f.support_radius > cube_half:
        raise ValueError(
            f"map support radius {f.support_radius} escapes the cube of half-width {cube_half}"
        )
    pts = cube_grid(dim, grid, cube_half)
    margin_bound = cube_half * 1.5

    factors: list[AxisFactor] = []
    margins: list[MarginReport] = []
    for k in range(dim):
        chain = _remainder_chain(f, tuple(factors))

        def value_fn(x, _chain=chain, _k=k):
            return _chain(x)[..., _k]

        values = value_fn(pts)
        slope, idx = _axis_margin(values, grid, dim, k, cube_half)
        if slope < slope_floor:
            bad = pts.reshape((grid,) * dim + (dim,))[idx]
            raise MonotonicityError(k, bad.tolist(), slope, slope_floor)
        factor = AxisFactor(k, dim, value_fn, -margin_bound, margin_bound, solver_tol)
        factors.append(factor)
        margins.append(leaf_preservation_check(factor, pts))

    recon = pts
    for factor in factors:
        recon = factor.apply(recon)
    sup = float(np.max(np.linalg.norm(recon - f.apply(pts), axis=-1)))

    proj_errors = []
    probe = pts[:: max(1, len(pts) // 400)]
    for k in range(1, dim + 1):
        rem = _remainder_chain(f, factors[:k])(probe)
        proj_errors.append(float(np.max(np.abs(rem[..., :k] - probe[..., :k]))))

    report = DecompositionReport(factors, sup, margins, proj_errors, grid, tol)
    if not report.passed:
        raise FoliationVerificationError(
            f"reconstruction misses the map by {sup:.3e} (tolerance {tol:.1e})"
        )
    return report


def leaf_preservation_check(factor: AxisFactor, pts) -> MarginReport:
    """Verify the factor moves only its own coordinate and does so monotonically.

    Off-axis drift is required to vanish exactly (the factor copies the other
    coordinates bit for bit); the on-axis slope is probed by symmetric
    differences at the sample points.
    """
    pts = float_array(pts)
    out = factor.apply(pts)
    others = [j for j in range(factor.dim) if j != factor.axis]
    drift = float(np.max(np.abs(out[..., others] - pts[..., others]))) if others else 0.0

    h = 1e-4
    hi = np.array(pts, copy=True)
    hi[..., factor.axis] += h
    lo = np.array(pts, copy=True)
    lo[..., factor.axis] -= h
    slopes = (factor.value_fn(hi) - factor.value_fn(lo)) / (2 * h)
    return MarginReport(factor.axis, float(np.min(slopes)), drift)


# --- C0 fragmentation over axis-aligned slabs --------------------------------


@dataclass(frozen=True)
class Slab:
    """Open axis-aligned slab {lo < x_axis < hi} of the cube."""

    axis: int
    lo: float
    hi: float


class TruncatedFactor:
    """Follow an axis factor below a cut, bridge affinely to the identity above.

    With v = factor value at the cut level (a function of the transverse
    coordinates only), the fiber map is factor below alpha, the segment from
    (alpha, v) to (beta, beta) in between, and the identity above beta;
    increasing as long as v < beta, i.e. the displacement clears the gap.
    """

    def __init__(self, factor: AxisFactor, alpha: float, beta: float):
        self.factor = factor
        self.axis = factor.axis
        self.dim = factor.dim
        self.alpha = float(alpha)
        self.beta = float(beta)

    def _cut_value(self, pts):
        probe = np.array(pts, copy=True)
        probe[..., self.axis] = self.alpha
        return self.factor.value_fn(probe)

    def apply(self, pts):
        pts = float_array(pts)
        t = pts[..., self.axis]
        v = self._cut_value(pts)
        low = t <= self.alpha
        high = t >= self.beta
        bridge = v + (t - self.alpha) * (self.beta - v) / (self.beta - self.alpha)
        val = np.where(low, self.factor.value_fn(pts), np.where(high, t, bridge))
        out = np.array(pts, copy=True)
        out[..., self.axis] = val
        return out

    def apply_inverse(self, pts):
        pts = float_array(pts)
        y = pts[..., self.axis]
        v = self._cut_value(pts)
        out = np.array(pts, copy=True)
        low = y <= v
        high = y >= self.beta
        mid = ~low & ~high
        t = np.array(y, copy=True)
        if np.any(low):
            sub = self.factor.apply_inverse(pts[low])
            t[low] = sub[..., self.axis]
        t[mid] = self.alpha + (y[mid] - v[mid]) * (
            (self.beta - self.alpha) / (self.beta - v[mid])
        )
        out[..., self.axis] = t
        return out

    def inverse(self):
        return _FactorInverse(self)


class SlabPiece:
    """Difference of two truncations: supported in a single cover slab."""

    def __init__(self, upper, lower, slab: Slab):
        self.upper = upper
        self.lower = lower
        self.slab = slab
        self.dim = slab and upper.dim

    def apply(self, pts):
        return self.upper.apply(self.lower.apply_inverse(pts))

    def apply_inverse(self, pts):
        return self.lower.apply(self.upper.apply_inverse(pts))

    def inverse(self):
        return _FactorInverse(self)


class _IdentityCut:
    """Stand-in truncation for the ends of the telescoping product."""

    def __init__(self, factor, full: bool):
        self.factor = factor
        self.full = full
        self.dim = factor.dim

    def apply(self, pts):
        return self.factor.apply(pts) if self.full else float_array(pts)

    def apply_inverse(self, pts):
        return self.factor.apply_inverse(pts) if self.full else float_array(pts)


def fragmentation_c0(h: MapExpr, cover, grid: int = 9, tol: float = 1e-6,
                     cube_half: float = 1.0, decomposition: DecompositionReport | None = None):
    """Split a near-identity map into pieces supported in single cover slabs.

    The map is first factored along coordinate axes; each factor is then cut
    at the overlaps of its axis's slabs by telescoping truncations.  The
    returned pieces multiply back to h (rightmost applied first), each
    supported in one slab of the cover.
    """
    if decomposition is None:
        decomposition = foliation_decompose(h, grid=max(grid, 9), tol=tol,
                                            cube_half=cube_half)
    by_axis: dict[int, list[Slab]] = {}
    for slab in cover:
        by_axis.setdefault(slab.axis, []).append(slab)

    pieces = []
    pts = cube_grid(h.dim, grid, cube_half)
    for factor in decomposition.factors:
        slabs = sorted(by_axis.get(factor.axis, []), key=lambda s: s.lo)
        if not slabs:
            raise FragmentationError(f"cover has no slab for axis {factor.axis}")
        values = factor.value_fn(pts)
        disp = float(np.max(np.abs(values - pts[..., factor.axis])))
        cuts = []
        for left, right in zip(slabs, slabs[1:]):
            lo, hi = right.lo, left.hi
            if not lo < hi:
                raise FragmentationError(
                    f"slabs on axis {factor.axis} do not overlap at {lo}"
                )
            width = hi - lo
            alpha, beta = lo + width / 3.0, hi - width / 3.0
            if disp >= width / 3.0:
                raise FragmentationError(
                    f"axis-{factor.axis} displacement {disp:.3g} exceeds the "
                    f"slab-overlap budget {width / 3.0:.3g}"
                )
            cuts.append((alpha, beta))
        stages = [_IdentityCut(factor, full=False)]
        stages += [TruncatedFactor(factor, a, b) for a, b in cuts]
        stages.append(_IdentityCut(factor, full=True))
        for i in range(1, len(stages)):
            pieces.append(SlabPiece(stages[i], stages[i - 1], slabs[i - 1]))

    recon = pts
    for piece in pieces:
        recon = piece.apply(recon)
    sup = float(np.max(np.linalg.norm(recon - h.apply(pts), axis=-1)))
    if sup >= tol:
        raise FoliationVerificationError(
            f"fragmented product misses the map by {sup:.3e}"
        )
    return pieces
