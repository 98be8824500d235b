"""Witness plans, generator sets, and certified word-length bounds.

The pipeline realizes the central construction: an input-independent
geometric schedule (contraction depths, disjoint image regions around the
push orbit) fixes integer length bounds k_n *before* any target maps
arrive.  Arbitrary compactly supported targets are then folded into two
slot-carrier generators, and each target is spelled as an explicit word
over the finite alphabet, verified numerically against the target map.

Generator roles:

* ``contract`` -- radial scaling by lam on the unit-scale ball,
* ``shift``    -- localized translation by a vector a,
* ``push``     -- axis push whose orbit of 0 marches to (1, 0, ..., 0),
* ``fslot`` / ``gslot`` -- piecewise carriers holding the registered
  targets, conjugated into pairwise disjoint pockets,
* ``drop``     -- fixed conjugator compressing the working ball into the
  base annulus of the swindle (plain-target pipeline only).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geomaps import (
    Affine,
    AxisPush,
    Compose,
    Identity,
    Inverse,
    LocalTranslation,
    MapExpr,
    PiecewiseUnion,
    RadialMap,
    Region,
    ball_points,
    compose,
    piecewise_union,
    power_exact,
    sphere_points,
)
from .pl import CutoffProfile, PLProfile
from .words import Assignment, Word

# Certified Lipschitz bound of the default push map on the orbit tube
# {|x_perp| <= 1/2}: the transverse cutoff is identically 1 there and the
# transverse coordinates never move, so the push acts purely along the first
# axis with profile slope at most 4/3.  Every slot zone starts inside
# B(0, 1/4) and stays in the tube, so this is the constant that governs the
# zone diameters.  (The global constant, with the cutoff's transverse
# coupling, is <= 7/3; plan verification re-samples the geometry anyway.)
PUSH_LIPSCHITZ = 4.0 / 3.0

IDENTITY_TOL = 1e-6
CONTRACT, SHIFT, PUSH, FSLOT, GSLOT, DROP = "contract", "shift", "push", "fslot", "gslot", "drop"


class PlanSoundnessError(RuntimeError):
    """Sampling contradicted a certified plan bound (wrong Lipschitz budget)."""


class SupportError(ValueError):
    """A target map is not supported in the working ball B(0, 2)."""


class SlotOverflowError(ValueError):
    """More targets than materialized plan slots."""


class VerificationError(RuntimeError):
    """An emitted word failed to reproduce its target within tolerance."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class GeneratorParams:
    """Geometry knobs for the generating set; defaults match the working scale."""

    dim: int = 2
    contraction: float = 0.5
    shift: tuple = ()
    support_radius: float = 4.0

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")
        if not 0.0 < self.contraction < 1.0:
            raise ValueError("contraction factor must lie in (0, 1)")
        shift = self.shift or (0.5,) + (0.0,) * (self.dim - 1)
        shift = tuple(float(v) for v in shift)
        if len(shift) != self.dim:
            raise ValueError("shift vector dimension mismatch")
        norm = math.hypot(*shift)
        if not 0.0 < norm < 1.0:
            raise ValueError("shift vector must have norm in (0, 1)")
        object.__setattr__(self, "shift", shift)

    @property
    def shift_norm(self) -> float:
        return math.hypot(*self.shift)

    @property
    def axis_target(self) -> np.ndarray:
        e1 = np.zeros(self.dim)
        e1[0] = 1.0
        return e1


def contract_map(params: GeneratorParams) -> RadialMap:
    """Radial scaling by lam inside B(0, 2), identity beyond B(0, 4)."""
    lam = params.contraction
    return RadialMap(params.dim, PLProfile((0.0, 2.0, 4.0), (0.0, 2.0 * lam, 4.0)))


def shift_map(params: GeneratorParams) -> LocalTranslation:
    """x + a on B(0, 1), damped to identity on B(0, 2)."""
    cutoff = CutoffProfile((1.0, 2.0), (1.0, 0.0))
    return LocalTranslation(params.dim, params.shift, cutoff)


def push_map(params: GeneratorParams, power: int = 1) -> AxisPush:
    """Push along the first axis: orbit of 0 is (1 - 2^-n) e1, injective.

    Profile: identity left of -3/2 and right of 1, t -> (t+1)/2 on [0, 1],
    linear in between; transverse cutoff 1 within radius 1/2, 0 beyond 1.
    """
    profile = PLProfile((-1.5, 0.0, 1.0), (-1.5, 0.5, 1.0))
    cutoff = CutoffProfile((0.5, 1.0), (1.0, 0.0))
    return AxisPush(params.dim, profile, cutoff, power=power)


@dataclass(frozen=True)
class WitnessPlan:
    """Input-independent schedule: depths, pockets and length bounds per slot."""

    params: GeneratorParams
    n_max: int
    depths: tuple            # contraction depth l_n per slot
    core_depths: tuple       # deeper depth for the pocket-core conjugator
    pocket_radius: float     # rho, with 2*rho < |shift|
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.params.dim

    def _memo(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def slot_map(self, n: int) -> MapExpr:
        """Map carrying B(0, 2) onto the slot-n zone: push^n o contract^l_n."""
        return self._memo(("slot", n), lambda: compose(
            [power_exact(push_map(self.params), n),
             power_exact(contract_map(self.params), self.depths[n])],
            dim=self.dim,
        ))

    def core_map(self, n: int) -> MapExpr:
        """Deeper copy of slot_map whose image of B(0, 2) sits inside the pocket."""
        return self._memo(("core", n), lambda: compose(
            [power_exact(push_map(self.params), n),
             power_exact(contract_map(self.params), self.core_depths[n])],
            dim=self.dim,
        ))

    def zone(self, n: int) -> Region:
        """Slot zone: image of B(0, 2); pairwise disjoint across slots."""
        return self._memo(("zone", n), lambda: Region(self.slot_map(n), 2.0))

    def pocket(self, n: int) -> Region:
        """Pocket inside the zone that the shifted copy misses entirely."""
        return self._memo(("pocket", n), lambda: Region(self.slot_map(n), self.pocket_radius))

    def shifted_pocket(self, n: int) -> Region:
        """Image of the pocket under the conjugated shift."""
        return self._memo(("shifted", n), lambda: Region(
            compose([self.slot_map(n), shift_map(self.params)], dim=self.dim),
            self.pocket_radius,
        ))

    def conjugated_shift(self, n: int) -> MapExpr:
        """slot_map o shift o slot_map^-1, the displacement acting on the zone."""
        sm = self.slot_map(n)
        return compose([sm, shift_map(self.params), Inverse(sm)], dim=self.dim)


def k_bound(plan: WitnessPlan, n: int) -> int:
    """Letter count of the slot-n witness word; reads the plan only, never targets."""
    if not 0 <= n < plan.n_max:
        raise IndexError(f"slot {n} outside plan range {plan.n_max}")
    return 14 * n + 12 * plan.depths[n] + 2 * plan.core_depths[n] + 14


def k_bound_conjugated(plan: WitnessPlan, n: int) -> int:
    """Bound for plain targets routed through the swindle (two drop letters more)."""
    return k_bound(plan, n) + 2


def build_plan(params: GeneratorParams, n_max: int, verify: bool = True,
               samples: int = 200, seed: int = 0) -> WitnessPlan:
    """Choose contraction depths from the certified Lipschitz budget.

    Depth l_n is the least integer with 2 lam^l L^n <= 2^-(n+3), which keeps
    the slot-n zone inside a ball of radius 2^-(n+3) around the push orbit
    point (1 - 2^-n) e1; consecutive orbit gaps are 2^-(n+1), so the zones
    are pairwise disjoint with diameters shrinking to 0.  The pocket radius
    is |shift|/3 and core depths add just enough contraction to land the
    core image inside the pocket.  All three facts are re-verified by
    sampling before the plan is returned.
    """
    log_inv = math.log(1.0 / params.contraction)
    depths = []
    for n in range(n_max):
        need = ((n + 4) * math.log(2.0) + n * math.log(PUSH_LIPSCHITZ)) / log_inv
        l_n = max(int(math.ceil(need)), depths[-1] + 1 if depths else 0)
        depths.append(l_n)
    rho = params.shift_norm / 3.0
    gap = int(math.ceil(math.log(2.0 / rho) / log_inv))
    plan = WitnessPlan(
        params=params,
        n_max=n_max,
        depths=tuple(depths),
        core_depths=tuple(l + gap for l in depths),
        pocket_radius=rho,
    )
    if verify and n_max > 0:
        verify_plan(plan, samples=samples, seed=seed)
    return plan


@dataclass
class PlanReport:
    zone_diameters: list
    pair_checks: int
    displaced_checks: int
    core_containment_checks: int


def verify_plan(plan: WitnessPlan, samples: int = 200, seed: int = 0) -> PlanReport:
    """Sample the three geometric plan invariants; raise on any violation."""
    rng = np.random.default_rng(seed)
    n_max = plan.n_max
    zone_pts = [plan.zone(n).sample(rng, samples) for n in range(n_max)]

    pair_checks = 0
    for n in range(n_max):
        for m in range(n_max):
            if n == m:
                continue
            if np.any(plan.zone(m).contains(zone_pts[n])):
                raise PlanSoundnessError(f"zones {n} and {m} overlap on samples")
            pair_checks += samples

    diameters = []
    for n in range(n_max):
        pts = zone_pts[n]
        diam = float(np.max(np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)))
        diameters.append(diam)
    for n in range(1, n_max):
        if not diameters[n] < diameters[n - 1]:
            raise PlanSoundnessError(f"zone diameter not decreasing at slot {n}")

    displaced = 0
    for n in range(n_max):
        local = ball_points(rng, plan.dim, samples, plan.pocket_radius)
        moved = plan.slot_map(n).apply(shift_map(plan.params).apply(local))
        if np.any(plan.pocket(n).contains(moved)):
            raise PlanSoundnessError(f"shifted pocket {n} meets the pocket")
        displaced += samples

    core_checks = 0
    for n in range(n_max):
        boundary = sphere_points(rng, plan.dim, samples) * 2.0
        img = plan.core_map(n).apply(boundary)
        if not np.all(plan.pocket(n).contains(img)):
            raise PlanSoundnessError(f"core image of slot {n} escapes its pocket")
        core_checks += samples

    return PlanReport(diameters, pair_checks, displaced, core_checks)


@dataclass(frozen=True)
class CommutatorPair:
    f: MapExpr
    g: MapExpr


@dataclass(frozen=True)
class PlainHomeo:
    h: MapExpr


def _check_supported(m: MapExpr, rng, samples: int = 64, radius: float = 2.0, label: str = "target"):
    if m.support_radius > radius:
        raise SupportError(f"{label} declares support radius {m.support_radius} > {radius}")
    if m.is_identity():
        return
    shell = sphere_points(rng, m.dim, samples) * (radius + rng.random(samples)[:, None])
    if not np.array_equal(m.apply(shell), shell):
        raise SupportError(f"{label} moves sampled points outside B(0, {radius})")


def build_generators(plan: WitnessPlan, pairs) -> Assignment:
    """Assemble the five-generator alphabet with targets folded into the carriers.

    Each pair (f_n, g_n) must be supported in B(0, 2); the carriers act as
    core_map(n) o f_n o core_map(n)^-1 on pocket n and as the identity
    elsewhere, so they are supported in the disjoint pocket union.
    """
    pairs = list(pairs)
    if len(pairs) > plan.n_max:
        raise SlotOverflowError(f"{len(pairs)} pairs for {plan.n_max} slots")
    rng = np.random.default_rng(7)
    parts_f, parts_g = [], []
    for n, pair in enumerate(pairs):
        _check_supported(pair.f, rng, label=f"pair {n} first map")
        _check_supported(pair.g, rng, label=f"pair {n} second map")
        core = plan.core_map(n)
        for target, parts in ((pair.f, parts_f), (pair.g, parts_g)):
            if target.is_identity():
                continue
            parts.append((plan.pocket(n), compose([core, target, Inverse(core)], dim=plan.dim)))
    dim = plan.dim
    carriers = {
        FSLOT: piecewise_union(parts_f, support_radius=2.0) if parts_f else Identity(dim),
        GSLOT: piecewise_union(parts_g, support_radius=2.0) if parts_g else Identity(dim),
    }
    return Assignment({
        CONTRACT: contract_map(plan.params),
        SHIFT: shift_map(plan.params),
        PUSH: push_map(plan.params),
        **carriers,
    })


def witness_word(plan: WitnessPlan, n: int) -> Word:
    """Spell the slot-n word over the five generators; letter count == k_bound.

    With S = slot word push^n contract^l and H = S shift S^-1, the word is
    core^-1 * A * B * C * core for the three conjugated commutator blocks
    A = [fslot, H], B = [gslot, H], C = fslot^-1 gslot^-1 H gslot fslot H^-1;
    its evaluation equals the plain commutator of the slot's target pair.
    """
    slot = Word.run(PUSH, n) * Word.run(CONTRACT, plan.depths[n])
    hat = slot * Word.gen(SHIFT) * slot.inverse()
    a_blk = Word.gen(FSLOT) * hat * Word.gen(FSLOT, -1) * hat.inverse()
    b_blk = Word.gen(GSLOT) * hat * Word.gen(GSLOT, -1) * hat.inverse()
    c_blk = (Word.gen(FSLOT, -1) * Word.gen(GSLOT, -1) * hat
             * Word.gen(GSLOT) * Word.gen(FSLOT) * hat.inverse())
    core = Word.run(PUSH, n) * Word.run(CONTRACT, plan.core_depths[n])
    word = core.inverse() * a_blk * b_blk * c_blk * core
    assert len(word) == k_bound(plan, n)
    return word


@dataclass
class VerificationReport:
    samples: int
    sup_error: float
    reduced_length: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.sup_error < self.tolerance


@dataclass
class Witness:
    slot: int
    word: Word
    k_bound: int
    report: VerificationReport


def _witness_samples(plan: WitnessPlan, n: int, rng, count: int) -> np.ndarray:
    """Sample mix: ambient ball plus the zone/pocket geometry the word exercises."""
    quarter = count // 4
    chunks = [
        ball_points(rng, plan.dim, count - 3 * quarter, 3.0),
        plan.pocket(n).sample(rng, quarter, shrink=0.95),
        plan.shifted_pocket(n).sample(rng, quarter, shrink=0.95),
        plan.zone(n).sample(rng, quarter, shrink=0.95),
    ]
    return np.concatenate(chunks, axis=0)


def _verify_word(word: Word, assignment: Assignment, target: MapExpr, pts,
                 tolerance: float) -> VerificationReport:
    from .words import evaluate_word

    got = evaluate_word(word, assignment, pts)
    want = target.apply(pts)
    sup = float(np.max(np.linalg.norm(got - want, axis=-1))) if len(pts) else 0.0
    return VerificationReport(len(pts), sup, len(word.reduce()), tolerance)


def commutator_witness(plan: WitnessPlan, generators: Assignment, pair: CommutatorPair,
                       n: int, samples: int = 1000, tolerance: float = IDENTITY_TOL,
                       seed: int = 0) -> Witness:
    """Emit and verify the slot-n word against the commutator of its pair."""
    word = witness_word(plan, n)
    bound = k_bound(plan, n)
    rng = np.random.default_rng(seed + n)
    pts = _witness_samples(plan, n, rng, samples)
    target = compose(
        [pair.f, pair.g, Inverse(pair.f), Inverse(pair.g)], dim=plan.dim
    )
    report = _verify_word(word, generators, target, pts, tolerance)
    if not report.passed:
        raise VerificationError(
            f"slot {n} word misses its commutator by {report.sup_error:.3e}", report
        )
    return Witness(n, word, bound, report)


# --- the swindle -----------------------------------------------------------

SWINDLE_LAYERS = 30
_BASE_OUTER = 0.5       # base annulus [1/4, 1/2]
_DROP_SCALE = 1.0 / 32  # compresses B(0, 2) to B(0, 1/16)
_DROP_CENTER = 0.375    # then shifts it to B(3/8 e1, 1/16), inside the annulus


def swindle_contraction(dim: int) -> RadialMap:
    """x/2 on B(0, 1), identity beyond B(0, 1.9); maps each annulus to the next."""
    return RadialMap(dim, PLProfile((0.0, 1.0, 1.9), (0.0, 0.5, 1.9)))


def drop_conjugator(dim: int) -> MapExpr:
    """Fixed compactly supported map taking B(0, 2) into the base annulus interior."""
    squeeze = RadialMap(dim, PLProfile((0.0, 2.0, 4.0), (0.0, 2.0 * _DROP_SCALE, 4.0)))
    a = np.zeros(dim)
    a[0] = _DROP_CENTER
    recenter = LocalTranslation(dim, a, CutoffProfile((1.0 / 16, 0.9), (1.0, 0.0)))
    return Compose([recenter, squeeze])


@dataclass
class SwindleFactorization:
    """h = conjugator^-1 [swindle, contraction] conjugator, all supported in B(0, 2)."""

    conjugator: MapExpr
    contraction: MapExpr
    swindle: MapExpr
    layers: int

    def as_pair(self) -> CommutatorPair:
        return CommutatorPair(self.swindle, self.contraction)

    def commutator_expr(self) -> MapExpr:
        dim = self.contraction.dim
        comm = compose(
            [self.swindle, self.contraction, Inverse(self.swindle), Inverse(self.contraction)],
            dim=dim,
        )
        return compose([Inverse(self.conjugator), comm, self.conjugator], dim=dim)


def _annulus_supported(h: MapExpr, rng, samples: int = 200) -> bool:
    """True when h is sampled-identity outside the open base annulus."""
    if h.support_radius > _BASE_OUTER:
        return False
    inner = ball_points(rng, h.dim, samples, _BASE_OUTER / 2.0)
    return np.array_equal(h.apply(inner), inner)


def swindle_factorize(h: MapExpr, layers: int = SWINDLE_LAYERS, verify: bool = True,
                      samples: int = 1000, tolerance: float = IDENTITY_TOL,
                      seed: int = 0) -> SwindleFactorization:
    """Write a supported homeomorphism as a single conjugated commutator.

    The target is dropped into the base annulus [1/4, 1/2], then stacked on
    the dyadic annulus tower by exact powers-of-two scalings: layer i acts as
    scale(2^-i) o h' o scale(2^i) on the annulus [2^-(i+2), 2^-(i+1)].  The
    commutator with the x/2 contraction telescopes the tower back to h'.
    Only finitely many layers are materialized; below them the swindle map is
    the identity, an error of at most 2^-layers * sup|h - id|.
    """
    rng = np.random.default_rng(seed)
    _check_supported(h, rng, label="swindle target")
    dim = h.dim
    contraction = swindle_contraction(dim)
    if h.is_identity():
        return SwindleFactorization(Identity(dim), contraction, Identity(dim), layers)

    drop = Identity(dim) if _annulus_supported(h, rng) else drop_conjugator(dim)
    dropped = compose([drop, h, Inverse(drop)], dim=dim)

    parts = []
    for i in range(layers):
        region = Region(Identity(dim), radius=2.0 ** -(i + 1), inner=2.0 ** -(i + 2))
        if i == 0:
            layer = dropped
        else:
            layer = Compose([Affine(dim, 2.0 ** -i), dropped, Affine(dim, 2.0 ** i)])
        parts.append((region, layer))
    swindle = PiecewiseUnion(parts, support_radius=_BASE_OUTER)

    fact = SwindleFactorization(drop, contraction, swindle, layers)
    if verify:
        pts = np.concatenate([
            ball_points(rng, dim, samples // 2, 2.2),
            ball_points(rng, dim, samples - samples // 2, _BASE_OUTER, inner=2.0 ** -8),
        ])
        got = fact.commutator_expr().apply(pts)
        want = h.apply(pts)
        sup = float(np.max(np.linalg.norm(got - want, axis=-1)))
        if sup >= tolerance:
            raise VerificationError(f"swindle factorization off by {sup:.3e}")
    return fact


def swindle_continuity_margins(fact: SwindleFactorization, depth: int = 20,
                               samples: int = 200, seed: int = 0):
    """Per-layer check that sup|swindle - id| on B(0, 2^-i r0) decays like 2^-i.

    Returns (i, sup, bound) rows with bound = 2^-i * r0 * (1 + s) where s is
    the sampled sup|swindle - id| on the base annulus: layer i acts by the
    2^-i scaling conjugate of the base layer, so its displacement is 2^-i s,
    and s <= 1 <= r0 (1 + s) because both points lie in B(0, r0).
    """
    rng = np.random.default_rng(seed)
    dim = fact.contraction.dim
    base = ball_points(rng, dim, samples, _BASE_OUTER, inner=_BASE_OUTER / 4.0)
    base_sup = float(np.max(np.linalg.norm(fact.swindle.apply(base) - base, axis=-1)))
    constant = _BASE_OUTER * (1.0 + base_sup)
    rows = []
    for i in range(depth + 1):
        radius = _BASE_OUTER * 2.0 ** -i
        pts = ball_points(rng, dim, samples, radius)
        sup = float(np.max(np.linalg.norm(fact.swindle.apply(pts) - pts, axis=-1)))
        bound = 2.0 ** -i * constant
        if sup > bound:
            raise VerificationError(f"swindle continuity bound violated at layer {i}")
        rows.append((i, sup, bound))
    return rows


# --- plain-target pipeline ---------------------------------------------------


@dataclass
class WitnessSession:
    plan: WitnessPlan
    assignment: Assignment
    witnesses: list


def witness_session(plan: WitnessPlan, targets, samples: int = 1000,
                    tolerance: float = IDENTITY_TOL, seed: int = 0,
                    layers: int = SWINDLE_LAYERS) -> WitnessSession:
    """Emit verified words for a mixed sequence of pair and plain targets.

    Plain targets are swindled into a commutator pair first; their words gain
    the two drop letters.  Pair targets are spelled directly against the
    commutator of the pair.  Identity targets emit the empty word.
    """
    targets = list(targets)
    if len(targets) > plan.n_max:
        raise SlotOverflowError(f"{len(targets)} targets for {plan.n_max} slots")
    pairs, facts = [], []
    for i, t in enumerate(targets):
        if isinstance(t, CommutatorPair):
            pairs.append(t)
            facts.append(None)
        else:
            fact = swindle_factorize(t.h, layers=layers, verify=False, seed=seed + 101 + i)
            pairs.append(fact.as_pair())
            facts.append(fact)
    generators = build_generators(plan, pairs)
    assignment = generators
    if any(facts):
        assignment = Assignment({**generators.maps, DROP: drop_conjugator(plan.dim)})

    witnesses = []
    for n, (target, pair, fact) in enumerate(zip(targets, pairs, facts)):
        if fact is None:
            goal = compose(
                [pair.f, pair.g, Inverse(pair.f), Inverse(pair.g)], dim=plan.dim
            )
            word = witness_word(plan, n)
            bound = k_bound(plan, n)
        else:
            goal = target.h
            bound = k_bound_conjugated(plan, n)
            if fact.swindle.is_identity():
                word = Word()
            elif fact.conjugator.is_identity():
                # target already lives in the base annulus: no drop letters
                word = witness_word(plan, n)
            else:
                word = Word.gen(DROP, -1) * witness_word(plan, n) * Word.gen(DROP)
                assert len(word) == bound
        rng = np.random.default_rng(seed + n)
        pts = _witness_samples(plan, n, rng, samples)
        report = _verify_word(word, assignment, goal, pts, tolerance)
        if not report.passed:
            raise VerificationError(
                f"slot {n} word off by {report.sup_error:.3e}", report
            )
        witnesses.append(Witness(n, word, bound, report))
    return WitnessSession(plan, assignment, witnesses)


def homeo_witness(plan: WitnessPlan, targets, samples: int = 1000,
                  tolerance: float = IDENTITY_TOL, seed: int = 0,
                  layers: int = SWINDLE_LAYERS) -> WitnessSession:
    """Witness session for plain supported homeomorphisms (all through the swindle)."""
    targets = list(targets)
    if not all(isinstance(t, PlainHomeo) for t in targets):
        raise TypeError("homeo_witness expects plain targets; use witness_session to mix")
    return witness_session(plan, targets, samples=samples, tolerance=tolerance,
                           seed=seed, layers=layers)


def schedule_powers(k_bounds, ratio_targets=None, denominators=None):
    """Strictly increasing powers p(n) with k_n / p(n) below the ratio targets.

    Default targets are 1/(n+1), giving p(n) = (n+1) k_n.  When a list of
    best-approximation denominators is supplied, each p(n) is the smallest
    multiple of the largest admissible denominator that clears the target,
    so the scheduled powers also return the rotation close to the identity.
    """
    k_bounds = [int(k) for k in k_bounds]
    if any(k <= 0 for k in k_bounds):
        raise ValueError("length bounds must be positive")
    if ratio_targets is None:
        ratio_targets = [1.0 / (n + 1) for n in range(len(k_bounds))]
    powers = []
    prev = 0
    for n, k in enumerate(k_bounds):
        floor_p = k / ratio_targets[n]
        if denominators:
            q = max((d for d in denominators if d <= floor_p), default=denominators[0])
            p = q * int(math.ceil(floor_p / q))
            while p <= prev:
                p += q
        else:
            p = int(math.ceil(floor_p))
            if p <= prev:
                p = prev + 1
        powers.append(p)
        prev = p
    return powers
