"""Seeded builders of random invertible maps for checks and demos."""

from __future__ import annotations

import numpy as np

from .geomaps import (
    Affine,
    AxisPush,
    Compose,
    Identity,
    Inverse,
    LocalTranslation,
    MapExpr,
    RadialMap,
)
from .pl import CutoffProfile, PLProfile


def random_localized_translation(rng, dim: int, max_shift: float = 0.45,
                                 outer: float = 1.8) -> LocalTranslation:
    """Translation bump supported in B(0, outer) with a safe contraction margin."""
    direction = rng.standard_normal(dim)
    direction /= np.linalg.norm(direction)
    a = direction * rng.uniform(0.05, max_shift)
    r1 = rng.uniform(0.2, 0.7)
    r2 = rng.uniform(1.1, outer)
    cutoff = CutoffProfile((r1, r2), (1.0, 0.0))
    norm_a = float(np.linalg.norm(a))
    if norm_a / (r2 - r1) >= 0.9:
        a *= 0.9 * (r2 - r1) / norm_a
    return LocalTranslation(dim, a, cutoff)


def random_radial(rng, dim: int) -> RadialMap:
    lam = rng.uniform(0.45, 0.9)
    r1 = rng.uniform(1.0, 2.0)
    r2 = r1 * rng.uniform(1.6, 2.4)
    return RadialMap(dim, PLProfile((0.0, r1, r2), (0.0, r1 * lam, r2)))


def random_push(rng, dim: int) -> AxisPush:
    t0 = rng.uniform(-1.6, -1.2)
    t1 = rng.uniform(0.8, 1.2)
    mid = rng.uniform(-0.2, 0.4)
    val = rng.uniform(mid + 0.1, t1 - 0.05)
    profile = PLProfile((t0, mid, t1), (t0, val, t1))
    cutoff = CutoffProfile((rng.uniform(0.3, 0.6), rng.uniform(0.9, 1.2)), (1.0, 0.0))
    return AxisPush(dim, profile, cutoff)


def random_primitive(rng, dim: int) -> MapExpr:
    kind = rng.integers(0, 4)
    if kind == 0:
        return random_radial(rng, dim)
    if kind == 1:
        return random_localized_translation(rng, dim)
    if kind == 2:
        return random_push(rng, dim)
    return Affine(dim, 2.0 ** rng.integers(-2, 3), rng.standard_normal(dim) * 0.3)


def random_chain(rng, dim: int, depth: int) -> MapExpr:
    """Composition chain mixing all primitive kinds and inverse nodes."""
    maps = []
    for _ in range(depth):
        m = random_primitive(rng, dim)
        if rng.random() < 0.3:
            m = Inverse(m)
        maps.append(m)
    return Compose(maps) if maps else Identity(dim)


def random_supported_homeo(rng, dim: int, pieces: int = 2) -> MapExpr:
    """Compactly supported composite inside B(0, 2) for swindle inputs."""
    return Compose([random_localized_translation(rng, dim) for _ in range(pieces)])
