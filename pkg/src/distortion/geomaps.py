"""Expression trees of exactly invertible maps of R^N.

Every node evaluates forward and backward on batches of points, is the
identity (bitwise, not merely approximately) outside a declared support
radius, and composes freely with the other nodes.  Piecewise-linear
breakpoint algebra gives closed-form inverses for the radial and axis-push
primitives; localized translations invert by contraction fixed-point
iteration.
"""

from __future__ import annotations

import json

import numpy as np

from .pl import CutoffProfile, PLProfile

FIXED_POINT_TOL = 1e-14
FIXED_POINT_MAX_ITER = 400


class DimensionMismatchError(ValueError):
    """Point dimension does not match the map's dimension."""


class NonFinitePointError(ValueError):
    """Input contains NaN or infinity."""


class InversionError(RuntimeError):
    """Fixed-point inversion failed to converge (non-contractive cutoff)."""


class RegionOverlapError(RuntimeError):
    """A point was claimed by two regions of a piecewise union."""


class UnsupportedNodeError(TypeError):
    """Operation not defined for this node kind."""


def float_array(x) -> np.ndarray:
    """View as a floating array, preserving extended precision if present."""
    a = np.asarray(x)
    return a if a.dtype.kind == "f" else a.astype(float)


def as_points(x, dim: int) -> np.ndarray:
    pts = float_array(x)
    if pts.ndim == 0 or pts.shape[-1] != dim:
        raise DimensionMismatchError(f"expected trailing axis {dim}, got shape {pts.shape}")
    return pts


def _norms(pts: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(pts * pts, axis=-1))


class MapExpr:
    """Base node: an invertible map of R^dim, identity outside support_radius."""

    dim: int
    support_radius: float

    def apply(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def apply_inverse(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def inverse(self) -> "MapExpr":
        return Inverse(self)

    def is_identity(self) -> bool:
        return False

    def __call__(self, pts):
        return self.apply(float_array(pts))


def evaluate(m: MapExpr, x) -> np.ndarray:
    """Validated forward evaluation (accepts a single point or a batch)."""
    pts = as_points(x, m.dim)
    if not np.all(np.isfinite(pts)):
        raise NonFinitePointError("non-finite input point")
    return m.apply(pts)


def evaluate_inverse(m: MapExpr, y) -> np.ndarray:
    """Validated backward evaluation."""
    pts = as_points(y, m.dim)
    if not np.all(np.isfinite(pts)):
        raise NonFinitePointError("non-finite input point")
    return m.apply_inverse(pts)


class Identity(MapExpr):
    def __init__(self, dim: int):
        self.dim = dim
        self.support_radius = 0.0

    def apply(self, pts):
        return pts

    def apply_inverse(self, pts):
        return pts

    def inverse(self):
        return self

    def is_identity(self):
        return True

    def __repr__(self):
        return f"Identity(dim={self.dim})"


class RadialMap(MapExpr):
    """x -> profile(|x|) * x/|x|, with a strictly increasing radial profile fixing 0."""

    def __init__(self, dim: int, profile: PLProfile):
        if profile.xs[0] != 0.0 or profile.ys[0] != 0.0:
            raise ValueError("radial profile must fix 0")
        self.dim = dim
        self.profile = profile
        self.support_radius = profile.hull[1]

    def apply(self, pts):
        return self._radial(pts, self.profile)

    def apply_inverse(self, pts):
        return self._radial(pts, self.profile.inverse())

    def _radial(self, pts, profile):
        r = _norms(pts)
        moved = (r > 0.0) & (r < profile.hull[1])
        safe = np.where(moved, r, 1.0)
        scale = np.where(moved, profile(safe) / safe, 1.0)
        return np.where(moved[..., None], pts * scale[..., None], pts)

    def __repr__(self):
        return f"RadialMap(dim={self.dim}, profile={self.profile!r})"


class LocalTranslation(MapExpr):
    """x -> x + cutoff(|x|) * a; invertible because the displacement is a contraction."""

    def __init__(self, dim: int, a, cutoff: CutoffProfile):
        a = np.asarray(a, dtype=float)
        if a.shape != (dim,):
            raise DimensionMismatchError(f"translation vector must have shape ({dim},)")
        lip = float(np.linalg.norm(a)) * cutoff.max_abs_slope()
        if lip >= 1.0:
            raise ValueError(f"displacement Lipschitz constant {lip:.3f} >= 1, not invertible")
        self.dim = dim
        self.a = a
        self.cutoff = cutoff
        self.lipschitz = lip
        self.support_radius = cutoff.zero_start()

    def apply(self, pts):
        c = self.cutoff(_norms(pts))
        moved = c > 0.0
        return np.where(moved[..., None], pts + c[..., None] * self.a, pts)

    def apply_inverse(self, pts):
        x = pts
        for _ in range(FIXED_POINT_MAX_ITER):
            c = self.cutoff(_norms(x))
            x_next = np.where((c > 0.0)[..., None], pts - c[..., None] * self.a, pts)
            delta = float(np.max(np.abs(x_next - x))) if x.size else 0.0
            x = x_next
            if delta < FIXED_POINT_TOL:
                return x
        raise InversionError(
            "fixed-point inversion did not converge; cutoff makes displacement non-contractive"
        )

    def __repr__(self):
        return f"LocalTranslation(dim={self.dim}, a={self.a.tolist()})"


class AxisPush(MapExpr):
    """x -> x + (u(x1) - x1) * cutoff(|x_perp|) e1, to the k-th power.

    The first coordinate moves along a strictly increasing 1-D profile,
    attenuated by a transverse cutoff.  Where the cutoff equals 1 the k-th
    power evaluates through the breakpoint-composed profile u^k in a single
    interpolation, avoiding k-deep float chains on the contracted axis zone.
    """

    def __init__(self, dim: int, profile: PLProfile, cutoff: CutoffProfile, power: int = 1):
        if power < 1:
            raise ValueError("power must be >= 1; negative powers via inverse()")
        self.dim = dim
        self.profile = profile
        self.cutoff = cutoff
        self.power = power
        self._pow_profile = profile.power(power)
        self._pow_inverse = self._pow_profile.inverse()
        x0, x1 = profile.hull
        trans = cutoff.zero_start()
        if not np.isfinite(trans):
            raise ValueError("axis-push cutoff must vanish at large transverse radius")
        self.support_radius = float(np.hypot(max(abs(x0), abs(x1)), trans))

    def _transverse(self, pts):
        if self.dim == 1:
            return np.zeros(pts.shape[:-1])
        return _norms(pts[..., 1:])

    def _fiber_forward(self, t, c):
        out = t
        for _ in range(self.power):
            out = (1.0 - c) * out + c * self.profile(out)
        return out

    def _fiber_backward(self, t, c):
        xs, ys = self.profile.xs, self.profile.ys
        out = t
        for _ in range(self.power):
            vs = (1.0 - c)[..., None] * xs + c[..., None] * ys
            s = out
            for j in range(len(xs) - 1):
                lo, hi = vs[..., j], vs[..., j + 1]
                seg = (out >= lo) & (out < hi)
                s = np.where(seg, xs[j] + (out - lo) * ((xs[j + 1] - xs[j]) / (hi - lo)), s)
            s = np.where(out == vs[..., -1], xs[-1], s)
            out = s
        return out

    def _push(self, pts, full_profile, backward: bool):
        t = pts[..., 0]
        c = self.cutoff(self._transverse(pts))
        x0, x1 = self.profile.hull
        idle = (c <= 0.0) | (t <= x0) | (t >= x1)
        full = (c >= 1.0) & ~idle
        partial = ~idle & ~full
        t_new = np.where(full, full_profile(t), t)
        if np.any(partial):
            fiber = self._fiber_backward if backward else self._fiber_forward
            t_new = np.where(partial, fiber(t, c), t_new)
        out = np.array(pts, copy=True)
        out[..., 0] = np.where(idle, t, t_new)
        return np.where(idle[..., None], pts, out)

    def apply(self, pts):
        return self._push(pts, self._pow_profile, backward=False)

    def apply_inverse(self, pts):
        return self._push(pts, self._pow_inverse, backward=True)

    def __repr__(self):
        return f"AxisPush(dim={self.dim}, power={self.power})"


class Affine(MapExpr):
    """x -> scale * x + offset with scale > 0; support is global unless trivial."""

    def __init__(self, dim: int, scale: float = 1.0, offset=None):
        if not scale > 0.0:
            raise ValueError("affine scale must be positive")
        offset = np.zeros(dim) if offset is None else np.asarray(offset, dtype=float)
        if offset.shape != (dim,):
            raise DimensionMismatchError(f"offset must have shape ({dim},)")
        self.dim = dim
        self.scale = float(scale)
        self.offset = offset
        trivial = scale == 1.0 and not offset.any()
        self.support_radius = 0.0 if trivial else float("inf")

    def apply(self, pts):
        if self.support_radius == 0.0:
            return pts
        return pts * self.scale + self.offset

    def apply_inverse(self, pts):
        if self.support_radius == 0.0:
            return pts
        return (pts - self.offset) / self.scale

    def inverse(self):
        return Affine(self.dim, 1.0 / self.scale, -self.offset / self.scale)

    def __repr__(self):
        return f"Affine(dim={self.dim}, scale={self.scale}, offset={self.offset.tolist()})"


class Compose(MapExpr):
    """Composition maps[0] o maps[1] o ... (rightmost child applied first)."""

    def __init__(self, maps):
        maps = list(maps)
        if not maps:
            raise ValueError("use compose([]) / Identity for the empty composition")
        dims = {m.dim for m in maps}
        if len(dims) != 1:
            raise DimensionMismatchError(f"mixed dimensions {sorted(dims)}")
        self.dim = maps[0].dim
        self.maps = tuple(maps)
        self.support_radius = max(m.support_radius for m in maps)

    def apply(self, pts):
        for m in reversed(self.maps):
            pts = m.apply(pts)
        return pts

    def apply_inverse(self, pts):
        for m in self.maps:
            pts = m.apply_inverse(pts)
        return pts

    def inverse(self):
        return Compose([m.inverse() for m in reversed(self.maps)])

    def __repr__(self):
        return f"Compose({list(self.maps)!r})"


class Inverse(MapExpr):
    def __init__(self, child: MapExpr):
        self.child = child
        self.dim = child.dim
        self.support_radius = child.support_radius

    def apply(self, pts):
        return self.child.apply_inverse(pts)

    def apply_inverse(self, pts):
        return self.child.apply(pts)

    def inverse(self):
        return self.child

    def __repr__(self):
        return f"Inverse({self.child!r})"


class DeclaredSupport(MapExpr):
    """Override a composite's conservative support bound with a certified one.

    Conjugating through a global affine frame makes the composed bound
    infinite even when the conjugate is compactly supported; the caller
    certifies the true radius (spot-verified wherever targets are ingested).
    """

    def __init__(self, child: MapExpr, support_radius: float):
        self.child = child
        self.dim = child.dim
        self.support_radius = float(support_radius)

    def apply(self, pts):
        return self.child.apply(pts)

    def apply_inverse(self, pts):
        return self.child.apply_inverse(pts)

    def inverse(self):
        return DeclaredSupport(self.child.inverse(), self.support_radius)

    def is_identity(self):
        return self.child.is_identity()

    def __repr__(self):
        return f"DeclaredSupport({self.child!r}, {self.support_radius})"


class Region:
    """The open set transform(B(0, radius)), or an annular image if inner > 0.

    Membership is decided exactly through the inverse transform:
    x is inside iff inner < |transform^-1(x)| < radius.
    """

    def __init__(self, transform: MapExpr, radius: float, inner: float = 0.0):
        if not 0.0 <= inner < radius:
            raise ValueError("need 0 <= inner < radius")
        self.transform = transform
        self.radius = float(radius)
        self.inner = float(inner)

    @property
    def dim(self) -> int:
        return self.transform.dim

    def contains(self, pts) -> np.ndarray:
        local = self.transform.apply_inverse(as_points(pts, self.dim))
        r = _norms(local)
        mask = r < self.radius
        if self.inner > 0.0:
            mask &= r > self.inner
        return mask

    def sample(self, rng, count: int, shrink: float = 1.0) -> np.ndarray:
        inner = self.inner / shrink if self.inner > 0.0 else 0.0
        local = ball_points(rng, self.dim, count, self.radius * shrink, inner=inner)
        return self.transform.apply(local)

    def boundary_sample(self, rng, count: int) -> np.ndarray:
        local = sphere_points(rng, self.dim, count) * self.radius
        return self.transform.apply(local)

    def __repr__(self):
        return f"Region(radius={self.radius}, inner={self.inner}, transform={self.transform!r})"


class PiecewiseUnion(MapExpr):
    """Dispatch to per-region maps over pairwise disjoint regions; identity elsewhere.

    Each part map must be supported inside (and therefore preserve) its own
    region, so the inverse dispatches through the same membership test.
    """

    def __init__(self, parts, support_radius: float | None = None):
        parts = list(parts)
        if not parts:
            raise ValueError("use piecewise_union([]) / Identity for the empty union")
        dims = {m.dim for _, m in parts} | {r.dim for r, _ in parts}
        if len(dims) != 1:
            raise DimensionMismatchError(f"mixed dimensions {sorted(dims)}")
        self.dim = parts[0][1].dim
        self.parts = tuple(parts)
        if support_radius is None:
            support_radius = max(
                (r.transform.support_radius for r, _ in parts), default=0.0
            )
        self.support_radius = float(support_radius)

    def _dispatch(self, pts, backward: bool):
        flat = pts.reshape(-1, self.dim)
        claimed = np.zeros(flat.shape[0], dtype=int)
        masks = []
        for region, _ in self.parts:
            mask = region.contains(flat)
            claimed += mask
            masks.append(mask)
        if np.any(claimed > 1):
            bad = flat[np.argmax(claimed > 1)]
            raise RegionOverlapError(f"point {bad.tolist()} claimed by two regions")
        out = np.array(flat, copy=True)
        for (_, part), mask in zip(self.parts, masks):
            if np.any(mask):
                sub = flat[mask]
                out[mask] = part.apply_inverse(sub) if backward else part.apply(sub)
        return out.reshape(pts.shape)

    def apply(self, pts):
        return self._dispatch(pts, backward=False)

    def apply_inverse(self, pts):
        return self._dispatch(pts, backward=True)

    def __repr__(self):
        return f"PiecewiseUnion({len(self.parts)} parts, dim={self.dim})"


def compose(maps, dim: int | None = None) -> MapExpr:
    """Composition of a list of maps; empty list gives the identity."""
    maps = [m for m in maps if not m.is_identity()]
    if not maps:
        if dim is None:
            raise ValueError("empty composition needs an explicit dimension")
        return Identity(dim)
    if len(maps) == 1:
        return maps[0]
    return Compose(maps)


def power_exact(m: MapExpr, k: int) -> MapExpr:
    """k-th power with the profile algebra done analytically on breakpoints."""
    if k == 0 or m.is_identity():
        return Identity(m.dim)
    if isinstance(m, RadialMap):
        return RadialMap(m.dim, m.profile.power(k))
    if isinstance(m, AxisPush):
        node = AxisPush(m.dim, m.profile, m.cutoff, power=m.power * abs(k))
        return node if k > 0 else Inverse(node)
    if isinstance(m, Affine):
        scale, offset = 1.0, np.zeros(m.dim)
        base = m if k > 0 else m.inverse()
        for _ in range(abs(k)):
            scale, offset = base.scale * scale, base.scale * offset + base.offset
        return Affine(m.dim, scale, offset)
    raise UnsupportedNodeError(f"power_exact not defined for {type(m).__name__}")


def piecewise_union(parts, support_radius=None, validate=False, rng=None, samples=64) -> MapExpr:
    """Build a piecewise union, optionally spot-checking the disjointness plan."""
    parts = list(parts)
    if not parts:
        raise ValueError("empty union needs a dimension; use Identity(dim)")
    union = PiecewiseUnion(parts, support_radius=support_radius)
    if validate:
        rng = np.random.default_rng(0) if rng is None else rng
        for idx, (region, part) in enumerate(parts):
            pts = region.sample(rng, samples, shrink=0.95)
            for jdx, (other, _) in enumerate(parts):
                if jdx != idx and np.any(other.contains(pts)):
                    raise RegionOverlapError(f"regions {idx} and {jdx} overlap on samples")
            if not np.all(region.contains(part.apply(pts))):
                raise ValueError(f"part {idx} does not preserve its region")
    return union


class Sampler:
    """Deterministic point source: a cube grid or seeded uniform ball samples."""

    def __init__(self, kind: str = "random", count: int = 256, radius: float = 3.0,
                 seed: int = 0, grid: int = 5):
        if kind not in ("random", "grid"):
            raise ValueError(f"unknown sampler kind {kind!r}")
        self.kind = kind
        self.count = int(count)
        self.radius = float(radius)
        self.seed = int(seed)
        self.grid = int(grid)

    def points(self, dim: int) -> np.ndarray:
        if self.kind == "grid":
            axes = [np.linspace(-self.radius, self.radius, self.grid)] * dim
            mesh = np.meshgrid(*axes, indexing="ij")
            return np.stack([m.ravel() for m in mesh], axis=-1)
        rng = np.random.default_rng(self.seed)
        return ball_points(rng, dim, self.count, self.radius)


def ball_points(rng, dim: int, count: int, radius: float, inner: float = 0.0) -> np.ndarray:
    """Uniform samples of the ball (or annulus when inner > 0)."""
    direction = sphere_points(rng, dim, count)
    u = rng.random(count)
    r = (inner**dim + u * (radius**dim - inner**dim)) ** (1.0 / dim)
    return direction * r[:, None]


def sphere_points(rng, dim: int, count: int) -> np.ndarray:
    """Uniform samples of the unit sphere in R^dim."""
    v = rng.standard_normal((count, dim))
    return v / _norms(v)[:, None]


def c0_distance(f: MapExpr, g: MapExpr, sampler: Sampler) -> float:
    """Sampled lower bound of the C0 distance: sup|f-g| plus sup|f^-1-g^-1|."""
    if f.dim != g.dim:
        raise DimensionMismatchError("maps live in different dimensions")
    pts = sampler.points(f.dim)
    if pts.size == 0:
        raise ValueError("empty sampler")
    forward = float(np.max(_norms(f.apply(pts) - g.apply(pts))))
    backward = float(np.max(_norms(f.apply_inverse(pts) - g.apply_inverse(pts))))
    return forward + backward


# --- JSON schema -----------------------------------------------------------
#
# {"dim": N, "map": node} with node one of
#   {"kind": "identity"}
#   {"kind": "radial", "xs": [...], "ys": [...]}
#   {"kind": "translation", "a": [...], "cut_xs": [...], "cut_ys": [...]}
#   {"kind": "push", "xs": [...], "ys": [...], "cut_xs": [...], "cut_ys": [...], "power": k}
#   {"kind": "affine", "scale": s, "offset": [...]}
#   {"kind": "compose", "maps": [node, ...]}
#   {"kind": "inverse", "map": node}
#   {"kind": "union", "support_radius": r, "parts":
#       [{"region": {"transform": node, "radius": r, "inner": i}, "map": node}, ...]}


def _node_to_obj(m: MapExpr) -> dict:
    if isinstance(m, Identity):
        return {"kind": "identity"}
    if isinstance(m, RadialMap):
        return {"kind": "radial", "xs": m.profile.xs.tolist(), "ys": m.profile.ys.tolist()}
    if isinstance(m, LocalTranslation):
        return {
            "kind": "translation",
            "a": m.a.tolist(),
            "cut_xs": m.cutoff.xs.tolist(),
            "cut_ys": m.cutoff.ys.tolist(),
        }
    if isinstance(m, AxisPush):
        return {
            "kind": "push",
            "xs": m.profile.xs.tolist(),
            "ys": m.profile.ys.tolist(),
            "cut_xs": m.cutoff.xs.tolist(),
            "cut_ys": m.cutoff.ys.tolist(),
            "power": m.power,
        }
    if isinstance(m, Affine):
        return {"kind": "affine", "scale": m.scale, "offset": m.offset.tolist()}
    if isinstance(m, Compose):
        return {"kind": "compose", "maps": [_node_to_obj(c) for c in m.maps]}
    if isinstance(m, Inverse):
        return {"kind": "inverse", "map": _node_to_obj(m.child)}
    if isinstance(m, PiecewiseUnion):
        return {
            "kind": "union",
            "support_radius": m.support_radius,
            "parts": [
                {
                    "region": {
                        "transform": _node_to_obj(r.transform),
                        "radius": r.radius,
                        "inner": r.inner,
                    },
                    "map": _node_to_obj(part),
                }
                for r, part in m.parts
            ],
        }
    raise UnsupportedNodeError(f"cannot serialize {type(m).__name__}")


def _node_from_obj(obj: dict, dim: int) -> MapExpr:
    kind = obj.get("kind")
    if kind == "identity":
        return Identity(dim)
    if kind == "radial":
        return RadialMap(dim, PLProfile(obj["xs"], obj["ys"]))
    if kind == "translation":
        return LocalTranslation(dim, obj["a"], CutoffProfile(obj["cut_xs"], obj["cut_ys"]))
    if kind == "push":
        return AxisPush(
            dim,
            PLProfile(obj["xs"], obj["ys"]),
            CutoffProfile(obj["cut_xs"], obj["cut_ys"]),
            power=int(obj.get("power", 1)),
        )
    if kind == "affine":
        return Affine(dim, obj["scale"], obj.get("offset"))
    if kind == "compose":
        return Compose([_node_from_obj(o, dim) for o in obj["maps"]])
    if kind == "inverse":
        return Inverse(_node_from_obj(obj["map"], dim))
    if kind == "union":
        parts = [
            (
                Region(
                    _node_from_obj(p["region"]["transform"], dim),
                    p["region"]["radius"],
                    p["region"].get("inner", 0.0),
                ),
                _node_from_obj(p["map"], dim),
            )
            for p in obj["parts"]
        ]
        return PiecewiseUnion(parts, support_radius=obj.get("support_radius"))
    raise UnsupportedNodeError(f"unknown node kind {kind!r}")


def to_obj(m: MapExpr) -> dict:
    return {"dim": m.dim, "map": _node_to_obj(m)}


def from_obj(obj: dict) -> MapExpr:
    return _node_from_obj(obj["map"], int(obj["dim"]))


def to_json(m: MapExpr) -> str:
    return json.dumps(to_obj(m))


def from_json(text: str) -> MapExpr:
    return from_obj(json.loads(text))
