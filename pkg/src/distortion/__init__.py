"""Explicit word-length witnesses for distortion in homeomorphism groups.

A library and CLI that builds finite generating sets and explicit words
certifying sublinear word-length growth of map powers, verifies every group
identity numerically at desk scale, and reports the certified bounds as
delimited tables with companion figures.
"""

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
    Sampler,
    c0_distance,
    compose,
    evaluate,
    evaluate_inverse,
    from_json,
    piecewise_union,
    power_exact,
    to_json,
)
from .pl import CutoffProfile, PLProfile
from .witness import (
    CommutatorPair,
    GeneratorParams,
    PlainHomeo,
    SwindleFactorization,
    Witness,
    WitnessPlan,
    WitnessSession,
    build_generators,
    build_plan,
    commutator_witness,
    homeo_witness,
    k_bound,
    schedule_powers,
    swindle_factorize,
    verify_plan,
    witness_session,
    witness_word,
)
from .words import Assignment, Letter, Word, commutator, evaluate_word, length_ratio_table

__version__ = "0.1.0"
