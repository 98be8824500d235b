"""Circle and sphere machinery: charts, disk decompositions, distortion demos.

Circle maps act on angle parameters measured in turns (points of [0, 1));
sphere maps act on unit vectors in R^3.  Stereographic charts conjugate
compactly supported plane maps to sphere maps supported in a disk, which is
how the plane witness machinery is transported: one namespaced generator
alphabet per chart, plus a fixed power-of-two affine frame normalizing each
transported piece into the working ball B(0, 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geomaps import Affine, DeclaredSupport, Identity, MapExpr, compose, float_array
from .pl import interp_clamped
from .witness import (
    GeneratorParams,
    PlainHomeo,
    WitnessPlan,
    build_plan,
    homeo_witness,
    k_bound_conjugated,
    schedule_powers,
)
from .words import Assignment, Word, evaluate_word

MAX_GENERAL_POWER = 10_000


class DecompositionError(RuntimeError):
    """No admissible anchor arc: the input escapes the working arc everywhere."""


class TransportError(ValueError):
    """Map support does not fit inside the chart's covered disk."""


class VerificationFailure(RuntimeError):
    """A demo word failed its sup-error verification."""


def wrap_turns(t):
    return np.mod(t, 1.0)


def wrap_signed(t):
    """Reduce turn differences into [-1/2, 1/2]."""
    t = float_array(t)
    return t - np.round(t)


def circle_embed(t) -> np.ndarray:
    t = float_array(t)
    ang = 2.0 * np.pi * t
    return np.stack([np.cos(ang), np.sin(ang)], axis=-1)


def circle_samples(rng, count: int) -> np.ndarray:
    return rng.random(count)


def sphere_samples(rng, count: int) -> np.ndarray:
    v = rng.standard_normal((count, 3))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def normalize_sphere(v, tol: float = 1e-12) -> np.ndarray:
    v = float_array(v)
    norms = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(np.abs(norms - 1.0) > tol):
        raise ValueError("points are not on the unit sphere")
    return v / norms


# --- continued fractions -----------------------------------------------------


def convergent_denominators(alpha: float, q_limit: int = 10**9):
    """Best-approximation denominators of alpha with signed errors.

    Returns (q, theta) pairs with theta = q*alpha - p for the convergent
    p/q; |theta| shrinks along the list and the sign alternates.  Rational
    inputs terminate at the exact denominator (theta == 0).
    """
    x = alpha - math.floor(alpha)
    out = [(1, x if x <= 0.5 else x - 1.0)]
    if x == 0.0:
        return out
    q_prev, q_cur = 0, 1
    th_prev, th_cur = -1.0, x
    while x > 0.0:
        a = int(math.floor(1.0 / x))
        x = 1.0 / x - a
        q_prev, q_cur = q_cur, a * q_cur + q_prev
        th_prev, th_cur = th_cur, a * th_cur + th_prev
        if q_cur > q_limit:
            break
        if out and q_cur == out[-1][0]:
            out[-1] = (q_cur, th_cur)
        else:
            out.append((q_cur, th_cur))
        if th_cur == 0.0:
            break
    return out


def rotation_number(h, steps: int = 4096) -> float:
    """Orbit-average estimate of the rotation number (per-step jumps < 1/2)."""
    t = 0.0
    total = 0.0
    for _ in range(steps):
        t_next = float(h.apply(np.array([t]))[0])
        total += float(wrap_signed(t_next - t))
        t = t_next
    return total / steps


# --- circle maps -------------------------------------------------------------


class CircleMap:
    """Base: orientation-preserving homeomorphism acting on turn parameters."""

    def apply(self, t):
        raise NotImplementedError

    def apply_inverse(self, t):
        raise NotImplementedError

    def inverse(self) -> "CircleMap":
        return _CircleInverse(self)

    def is_identity(self) -> bool:
        return False


class _CircleInverse(CircleMap):
    def __init__(self, child):
        self.child = child

    def apply(self, t):
        return self.child.apply_inverse(t)

    def apply_inverse(self, t):
        return self.child.apply(t)

    def inverse(self):
        return self.child


class CircleRotation(CircleMap):
    def __init__(self, angle: float):
        self.angle = float(angle)

    def apply(self, t):
        return wrap_turns(float_array(t) + self.angle)

    def apply_inverse(self, t):
        return wrap_turns(float_array(t) - self.angle)

    def inverse(self):
        return CircleRotation(-self.angle)

    def power(self, k: int) -> "CircleRotation":
        return CircleRotation(math.fmod(self.angle * k, 1.0))

    def is_identity(self):
        return self.angle == 0.0

    def __repr__(self):
        return f"CircleRotation({self.angle})"


class CircleCompose(CircleMap):
    def __init__(self, maps):
        self.maps = tuple(maps)

    def apply(self, t):
        for m in reversed(self.maps):
            t = m.apply(t)
        return t

    def apply_inverse(self, t):
        for m in self.maps:
            t = m.apply_inverse(t)
        return t

    def inverse(self):
        return CircleCompose([m.inverse() for m in reversed(self.maps)])


class CirclePower(CircleMap):
    """k-fold iterate of a general circle map (orbit loops, capped power)."""

    def __init__(self, base: CircleMap, power: int):
        if not 0 <= power <= MAX_GENERAL_POWER:
            raise ValueError(f"general powers are capped at {MAX_GENERAL_POWER}")
        self.base = base
        self.power = power

    def apply(self, t):
        for _ in range(self.power):
            t = self.base.apply(t)
        return t

    def apply_inverse(self, t):
        for _ in range(self.power):
            t = self.base.apply_inverse(t)
        return t


class ArcCorrector(CircleMap):
    """Increasing map supported in a working arc undoing h on a small arc J.

    On h(J) it is the exact functional inverse of h, so corrector o h fixes
    J pointwise; the two gaps to the arc ends are bridged affinely.  The
    arcs must sit inside (0, 1) without wrapping.
    """

    def __init__(self, h: CircleMap, work_arc, j_arc):
        lo, hi = work_arc
        jlo, jhi = j_arc
        ilo = float(h.apply(np.array([jlo]))[0])
        ihi = float(h.apply(np.array([jhi]))[0])
        if not (lo < jlo < jhi < hi and lo < ilo < ihi < hi):
            raise DecompositionError("anchor arc or its image escapes the working arc")
        self.h = h
        self.work_arc = (float(lo), float(hi))
        self.j_arc = (float(jlo), float(jhi))
        self.image = (ilo, ihi)

    def apply(self, t):
        t = float_array(t)
        out = np.array(t, copy=True)
        lo, hi = self.work_arc
        jlo, jhi = self.j_arc
        ilo, ihi = self.image
        mid = (t >= ilo) & (t <= ihi)
        if np.any(mid):
            out[mid] = self.h.apply_inverse(t[mid])
        left = (t > lo) & (t < ilo)
        out[left] = lo + (t[left] - lo) * ((jlo - lo) / (ilo - lo))
        right = (t > ihi) & (t < hi)
        out[right] = jhi + (t[right] - ihi) * ((hi - jhi) / (hi - ihi))
        return out

    def apply_inverse(self, t):
        t = float_array(t)
        out = np.array(t, copy=True)
        lo, hi = self.work_arc
        jlo, jhi = self.j_arc
        ilo, ihi = self.image
        mid = (t >= jlo) & (t <= jhi)
        if np.any(mid):
            out[mid] = self.h.apply(t[mid])
        left = (t > lo) & (t < jlo)
        out[left] = lo + (t[left] - lo) * ((ilo - lo) / (jlo - lo))
        right = (t > jhi) & (t < hi)
        out[right] = ihi + (t[right] - jhi) * ((hi - ihi) / (hi - jhi))
        return out


def decompose_circle(h: CircleMap, work_arc=(0.125, 0.875), j_len: float = 0.05,
                     anchors: int = 20, anchor_window=None, margin: float = 0.01):
    """Split h into (corrector^-1, corrector o h), supported off complementary arcs.

    The first factor is supported in the working arc; the second fixes the
    chosen anchor arc J pointwise, so it is supported in the complementary
    arc.  Anchors are searched over a grid; an input throwing every anchor
    image out of the working arc is reported, not forced.
    """
    lo, hi = work_arc
    if anchor_window is None:
        anchor_window = (lo + margin + j_len / 2.0, hi - margin - j_len / 2.0)
    centers = np.linspace(anchor_window[0], anchor_window[1], anchors)
    for c in centers:
        jlo, jhi = float(c - j_len / 2.0), float(c + j_len / 2.0)
        ends = h.apply(np.array([jlo, 0.5 * (jlo + jhi), jhi]))
        ilo, imid, ihi = (float(v) for v in ends)
        if not (lo + margin < ilo < imid < ihi < hi - margin):
            continue
        corrector = ArcCorrector(h, work_arc, (jlo, jhi))
        first = corrector.inverse()
        second = CircleCompose([corrector, h])
        return first, second, {"j_arc": (jlo, jhi), "work_arc": work_arc}
    raise DecompositionError(
        "no anchor arc J with J and h(J) inside the working arc; widen the arcs"
    )


# --- sphere maps -------------------------------------------------------------


class SphereMap:
    def apply(self, v):
        raise NotImplementedError

    def apply_inverse(self, v):
        raise NotImplementedError

    def inverse(self) -> "SphereMap":
        return _SphereInverse(self)

    def is_identity(self) -> bool:
        return False


class _SphereInverse(SphereMap):
    def __init__(self, child):
        self.child = child

    def apply(self, v):
        return self.child.apply_inverse(v)

    def apply_inverse(self, v):
        return self.child.apply(v)

    def inverse(self):
        return self.child


def _rotate_xy(v, angle):
    """Rotate the first two coordinates; angle may be scalar or per-point."""
    out = np.array(v, copy=True)
    c, s = np.cos(angle), np.sin(angle)
    x, y = v[..., 0], v[..., 1]
    out[..., 0] = c * x - s * y
    out[..., 1] = s * x + c * y
    return out


class SphereRotation(SphereMap):
    """Rotation about the z-axis by an angle in radians; exact powers."""

    def __init__(self, angle: float):
        self.angle = float(angle)

    def apply(self, v):
        return _rotate_xy(float_array(v), self.angle)

    def apply_inverse(self, v):
        return _rotate_xy(float_array(v), -self.angle)

    def inverse(self):
        return SphereRotation(-self.angle)

    def power(self, k: int) -> "SphereRotation":
        return SphereRotation(math.fmod(self.angle * k, 2.0 * math.pi))

    def is_identity(self):
        return self.angle == 0.0


class ZTwist(SphereMap):
    """Twist preserving every latitude: rotate by a PL angle profile of z."""

    def __init__(self, zs, angles):
        self.zs = np.asarray(zs, dtype=float)
        self.angles = np.asarray(angles, dtype=float)
        if np.any(np.diff(self.zs) <= 0):
            raise ValueError("z breakpoints must increase")
        self._slopes = np.diff(self.angles) / np.diff(self.zs)

    def _angle(self, v):
        return interp_clamped(v[..., 2], self.zs, self.angles, self._slopes)

    def apply(self, v):
        v = float_array(v)
        ang = self._angle(v)
        moved = ang != 0.0
        return np.where(moved[..., None], _rotate_xy(v, ang), v)

    def apply_inverse(self, v):
        v = float_array(v)
        ang = self._angle(v)
        moved = ang != 0.0
        return np.where(moved[..., None], _rotate_xy(v, -ang), v)

    def inverse(self):
        return ZTwist(self.zs, -self.angles)


class SphereCompose(SphereMap):
    def __init__(self, maps):
        self.maps = tuple(maps)

    def apply(self, v):
        for m in reversed(self.maps):
            v = m.apply(v)
        return v

    def apply_inverse(self, v):
        for m in self.maps:
            v = m.apply_inverse(v)
        return v

    def inverse(self):
        return SphereCompose([m.inverse() for m in reversed(self.maps)])


def decompose_sphere_rotation(theta: float, band=(-0.5, 0.5)):
    """Two z-preserving twists multiplying exactly to the z-rotation by theta.

    The blend rises from 0 to 1 across the band, so the first factor fixes
    the south cap pointwise and the second the north cap; the blend weights
    sum to 1, making the product the full rotation at every latitude.
    """
    lo, hi = band
    t1 = ZTwist((lo, hi), (0.0, theta))
    t2 = ZTwist((lo, hi), (theta, 0.0))
    return t1, t2


# --- stereographic charts ----------------------------------------------------


class CircleChart:
    """Stereographic line chart of the circle from a pole given in turns."""

    def __init__(self, pole: float, cap_halfwidth: float):
        if not 0.0 < cap_halfwidth < 0.5:
            raise ValueError("cap halfwidth must lie in (0, 1/2)")
        self.pole = float(pole)
        self.cap_halfwidth = float(cap_halfwidth)
        self.plane_radius = math.tan(math.pi * (0.5 - cap_halfwidth))
        self.dim = 1

    def to_plane(self, t) -> np.ndarray:
        s = wrap_signed(float_array(t) - self.pole - 0.5)
        return np.tan(np.pi * s)[..., None]

    def to_sphere(self, u) -> np.ndarray:
        return wrap_turns(self.pole + 0.5 + np.arctan(u[..., 0]) / np.pi)

    def covered_mask(self, t, plane_radius: float) -> np.ndarray:
        if not np.isfinite(plane_radius):
            return np.ones(np.shape(np.asarray(t)), dtype=bool)
        s_max = math.atan(plane_radius) / math.pi
        return np.abs(wrap_signed(float_array(t) - self.pole - 0.5)) < s_max


class SphereChart:
    """Stereographic plane chart of S^2 from the north or south pole."""

    def __init__(self, pole: str, cap_z: float):
        if pole not in ("north", "south"):
            raise ValueError("pole must be 'north' or 'south'")
        self.pole = pole
        # cap_z: |z| latitude bounding the excluded polar cap
        self.cap_z = float(cap_z)
        ratio = (1.0 + cap_z) / (1.0 - cap_z)
        self.plane_radius = math.sqrt(ratio)
        self.dim = 2

    def to_plane(self, v) -> np.ndarray:
        v = float_array(v)
        z = v[..., 2]
        denom = (1.0 - z) if self.pole == "north" else (1.0 + z)
        return v[..., :2] / denom[..., None]

    def to_sphere(self, u) -> np.ndarray:
        u = float_array(u)
        q = np.sum(u * u, axis=-1)
        xy = 2.0 * u / (1.0 + q)[..., None]
        z = (q - 1.0) / (q + 1.0) if self.pole == "north" else (1.0 - q) / (q + 1.0)
        return np.concatenate([xy, z[..., None]], axis=-1)

    def covered_mask(self, v, plane_radius: float) -> np.ndarray:
        v = float_array(v)
        if not np.isfinite(plane_radius):
            return np.ones(v.shape[:-1], dtype=bool)
        r2 = plane_radius * plane_radius
        z_cut = (r2 - 1.0) / (r2 + 1.0)
        z = v[..., 2]
        return z < z_cut if self.pole == "north" else z > -z_cut


class ChartTransport(SphereMap, CircleMap):
    """Sphere-side conjugate of a plane map: chart^-1 o m o chart.

    Identity (bitwise) outside the chart disk that carries the plane map's
    support; in particular the projecting pole stays fixed.
    """

    def __init__(self, plane_map: MapExpr, chart):
        if plane_map.dim != chart.dim:
            raise TransportError("plane map dimension does not match the chart")
        self.plane_map = plane_map
        self.chart = chart

    def _run(self, x, backward: bool):
        x = float_array(x)
        mask = self.chart.covered_mask(x, self.plane_map.support_radius)
        out = np.array(x, copy=True)
        if np.any(mask):
            u = self.chart.to_plane(x[mask])
            u = self.plane_map.apply_inverse(u) if backward else self.plane_map.apply(u)
            out[mask] = self.chart.to_sphere(u)
        return out

    def apply(self, x):
        return self._run(x, backward=False)

    def apply_inverse(self, x):
        return self._run(x, backward=True)

    def inverse(self):
        return ChartTransport(self.plane_map.inverse(), self.chart)


def transport(m: MapExpr, chart) -> ChartTransport:
    """Lift a compactly supported plane map to the sphere through a chart."""
    if m.support_radius > chart.plane_radius:
        raise TransportError(
            f"support radius {m.support_radius:.3g} exceeds chart disk {chart.plane_radius:.3g}"
        )
    return ChartTransport(m, chart)


class PlanePullback(MapExpr):
    """Plane-side conjugate of a circle/sphere map supported in the chart disk."""

    def __init__(self, sphere_map, chart, support_radius: float):
        self.sphere_map = sphere_map
        self.chart = chart
        self.dim = chart.dim
        self.support_radius = float(support_radius)

    def _run(self, pts, backward: bool):
        flat = float_array(pts).reshape(-1, self.dim)
        r = np.linalg.norm(flat, axis=-1)
        mask = r < self.support_radius
        out = np.array(flat, copy=True)
        if np.any(mask):
            x = self.chart.to_sphere(flat[mask])
            x = self.sphere_map.apply_inverse(x) if backward else self.sphere_map.apply(x)
            out[mask] = self.chart.to_plane(x)
        return out.reshape(np.shape(pts))

    def apply(self, pts):
        return self._run(pts, backward=False)

    def apply_inverse(self, pts):
        return self._run(pts, backward=True)

    def inverse(self):
        return PlanePullback(self.sphere_map.inverse(), self.chart, self.support_radius)


# --- the distortion demo -----------------------------------------------------


@dataclass
class ChartStation:
    """One chart's copy of the witness machinery."""

    name: str
    chart: object
    piece_radius: float           # plane radius bounding transported supports
    frame_scale: float = field(init=False)

    def __post_init__(self):
        # power-of-two frame keeps ring identity checks bitwise exact
        self.frame_scale = 2.0 ** max(0, math.ceil(math.log2(self.piece_radius / 1.8)))

    def frame(self) -> Affine:
        return Affine(self.chart.dim, self.frame_scale)

    def normalized_target(self, piece) -> MapExpr:
        """frame^-1 o pullback(piece) o frame, supported inside B(0, 2)."""
        pulled = PlanePullback(piece, self.chart, self.piece_radius)
        inner = compose([self.frame().inverse(), pulled, self.frame()], dim=self.chart.dim)
        return DeclaredSupport(inner, self.piece_radius / self.frame_scale)


@dataclass
class DemoRow:
    n: int
    p_n: int
    k_n: int
    reduced_len: int
    ratio: float
    sup_err: float


@dataclass
class DemoResult:
    kind: str
    rows: list
    words: list
    assignment: Assignment
    meta: dict


def _station_words(plan: WitnessPlan, station: ChartStation, pieces, samples, seed):
    """Run one chart's witness session and wrap each word in its frame letters."""
    targets = [PlainHomeo(station.normalized_target(p) if p is not None else Identity(plan.dim))
               for p in pieces]
    session = homeo_witness(plan, targets, samples=samples, seed=seed)
    plane_asg = Assignment({**session.assignment.maps, "frame": station.frame()})
    words = []
    for w in session.witnesses:
        if len(w.word) == 0:
            words.append(Word())
        else:
            words.append(Word.gen("frame") * w.word * Word.gen("frame", -1))
    return plane_asg, words


def evaluate_blocked(blocks, pts):
    """Evaluate chart-transported word blocks with one chart round trip each.

    ``blocks`` is a list of (station, plane word, plane assignment) in product
    order; the rightmost block applies first.  Because conjugation by a chart
    is a homomorphism, this computes exactly the same composition as the
    letter-by-letter sphere evaluation, but injects chart rounding noise only
    once per block instead of once per letter, keeping it out of the deeply
    contracted zones where inverse letters would amplify it.
    """
    for station, word, asg in reversed(blocks):
        if len(word) == 0:
            continue
        u = station.chart.to_plane(pts)
        u = evaluate_word(word, asg, u)
        pts = station.chart.to_sphere(u)
    return pts


def _verification_dtype(extended: bool):
    """Extended-precision scalars for long-word verification, when available.

    Hundreds of letters each round at one ulp while the point crosses the
    contracted zones, and the exit through the inverse contraction letters
    multiplies the accumulated noise by 2^(n + depth); 80-bit scalars push
    that amplified noise floor three orders of magnitude below the
    verification tolerance.
    """
    if extended and np.finfo(np.longdouble).eps < np.finfo(np.float64).eps:
        return np.longdouble
    return np.float64


def _demo_k_bounds(plan: WitnessPlan):
    """Total certified bound per step: two chart pieces, drop and frame letters."""
    return [2 * (k_bound_conjugated(plan, n) + 2) for n in range(plan.n_max)]


def _ratio_targets(n_max: int, final: float = 0.008):
    """Geometric ladder of per-slot ratio ceilings ending below 1e-2.

    Consecutive targets shrink by final^(1/n_max) < 1/2, while the scheduled
    power overshoots its bound by less than a factor 2, so the realized
    ratio column is strictly decreasing whatever the denominators do.
    """
    return [final ** ((n + 1) / n_max) for n in range(n_max)]


def circle_rotation_demo(alpha: float, n_max: int, seed: int = 0, samples: int = 500,
                         tolerance: float = 1e-6, extended: bool = True) -> DemoResult:
    """End-to-end distortion demo for the circle rotation by alpha turns.

    Bounds k_n come from the plan alone; powers p(n) are multiples of
    best-approximation denominators, so every scheduled power is both long
    enough for the ratio target and returns the rotation near the identity,
    keeping its two-arc decomposition inside the fixed working arcs.
    """
    params = GeneratorParams(dim=1)
    plan = build_plan(params, n_max, seed=seed)
    k_totals = _demo_k_bounds(plan)
    ratio_targets = _ratio_targets(n_max)
    need = max((k / r for k, r in zip(k_totals, ratio_targets)), default=1.0)
    cf = convergent_denominators(alpha, q_limit=int(4 * need) + 16)
    denominators = [q for q, _ in cf]
    powers = schedule_powers(k_totals, ratio_targets, denominators=denominators)

    # signed angle of the scheduled power, exact through the convergent errors
    angles = []
    for p in powers:
        q, theta = max(((q, th) for q, th in cf if p % q == 0), key=lambda item: item[0])
        angles.append((p // q) * theta)

    # fixed stations: 'front' covers the working arc, 'back' everything but
    # a small cap that every admissible anchor arc contains
    front = ChartStation("front", CircleChart(pole=0.0, cap_halfwidth=0.11),
                         piece_radius=math.tan(math.pi * 0.375))
    back = ChartStation("back", CircleChart(pole=0.5, cap_halfwidth=0.010),
                        piece_radius=math.tan(math.pi * (0.5 - 0.0125)))
    anchor_window = (0.5 - 0.0125, 0.5 + 0.0125)

    pieces_front, pieces_back, targets_rot = [], [], []
    for p, beta in zip(powers, angles):
        rot = CircleRotation(beta)
        targets_rot.append(rot)
        if beta == 0.0:
            pieces_front.append(None)
            pieces_back.append(None)
            continue
        first, second, _ = decompose_circle(rot, anchor_window=anchor_window)
        pieces_front.append(first)
        pieces_back.append(second)

    asg_front, words_front = _station_words(plan, front, pieces_front, samples, seed + 1)
    asg_back, words_back = _station_words(plan, back, pieces_back, samples, seed + 2)
    sphere_asg = (
        asg_front.namespaced(front.name, wrap=lambda m: ChartTransport(m, front.chart))
        .merged(asg_back.namespaced(back.name, wrap=lambda m: ChartTransport(m, back.chart)))
    )

    rng = np.random.default_rng(seed)
    pts = circle_samples(rng, samples).astype(_verification_dtype(extended))
    rows, full_words = [], []
    for n, (p, rot) in enumerate(zip(powers, targets_rot)):
        word = words_front[n].namespaced(front.name) * words_back[n].namespaced(back.name)
        blocks = [(front, words_front[n], asg_front), (back, words_back[n], asg_back)]
        got = evaluate_blocked(blocks, pts)
        want = rot.apply(pts)
        sup = float(np.max(np.linalg.norm(circle_embed(got) - circle_embed(want), axis=-1)))
        if sup >= tolerance:
            raise VerificationFailure(f"demo word {n} off by {sup:.3e}")
        reduced = len(word.reduce())
        rows.append(DemoRow(n, p, k_totals[n], reduced, reduced / p, sup))
        full_words.append(word)
    meta = {"alpha": alpha, "seed": seed, "samples": samples,
            "denominators": denominators[: len(powers) + 4]}
    return DemoResult("circle_rotation", rows, full_words, sphere_asg, meta)


def sphere_rotation_demo(theta: float, n_max: int, seed: int = 0, samples: int = 500,
                         tolerance: float = 1e-6, extended: bool = True) -> DemoResult:
    """Distortion demo for the sphere rotation by theta radians about z.

    The two-twist decomposition is exact at every angle, so the schedule
    needs no recurrence: powers simply clear the ratio targets.
    """
    params = GeneratorParams(dim=2)
    plan = build_plan(params, n_max, seed=seed)
    k_totals = _demo_k_bounds(plan)
    ratio_targets = _ratio_targets(n_max)
    powers = schedule_powers(k_totals, ratio_targets)

    band_radius = math.sqrt(3.0)  # plane radius of the ±0.5 latitude band edge
    south = ChartStation("south", SphereChart("south", cap_z=0.97), piece_radius=band_radius)
    north = ChartStation("north", SphereChart("north", cap_z=0.97), piece_radius=band_radius)

    pieces_south, pieces_north, targets_rot = [], [], []
    for p in powers:
        angle = math.fmod(p * theta, 2.0 * math.pi)
        targets_rot.append(SphereRotation(angle))
        if angle == 0.0:
            pieces_south.append(None)
            pieces_north.append(None)
            continue
        t1, t2 = decompose_sphere_rotation(angle)
        pieces_south.append(t1)
        pieces_north.append(t2)

    asg_south, words_south = _station_words(plan, south, pieces_south, samples, seed + 1)
    asg_north, words_north = _station_words(plan, north, pieces_north, samples, seed + 2)
    sphere_asg = (
        asg_south.namespaced(south.name, wrap=lambda m: ChartTransport(m, south.chart))
        .merged(asg_north.namespaced(north.name, wrap=lambda m: ChartTransport(m, north.chart)))
    )

    rng = np.random.default_rng(seed)
    pts = sphere_samples(rng, samples).astype(_verification_dtype(extended))
    rows, full_words = [], []
    for n, (p, rot) in enumerate(zip(powers, targets_rot)):
        word = words_south[n].namespaced(south.name) * words_north[n].namespaced(north.name)
        blocks = [(south, words_south[n], asg_south), (north, words_north[n], asg_north)]
        got = evaluate_blocked(blocks, pts)
        want = rot.apply(pts)
        sup = float(np.max(np.linalg.norm(got - want, axis=-1)))
        if sup >= tolerance:
            raise VerificationFailure(f"demo word {n} off by {sup:.3e}")
        reduced = len(word.reduce())
        rows.append(DemoRow(n, p, k_totals[n], reduced, reduced / p, sup))
        full_words.append(word)
    meta = {"theta": theta, "seed": seed, "samples": samples}
    return DemoResult("sphere_rotation", rows, full_words, sphere_asg, meta)


def sphere_distortion_demo(spec: dict, n_max: int, seed: int = 0, samples: int = 500,
                           tolerance: float = 1e-6) -> DemoResult:
    """Dispatch on the demo-input schema: circle_rotation | sphere_rotation."""
    kind = spec.get("kind")
    if kind == "circle_rotation":
        return circle_rotation_demo(float(spec["alpha"]), n_max, seed, samples, tolerance)
    if kind == "sphere_rotation":
        return sphere_rotation_demo(float(spec["theta"]), n_max, seed, samples, tolerance)
    raise ValueError(f"unknown demo kind {kind!r}")
