"""Command-line driver: plans, witness sessions, distortion demos, foliation.

Every command writes its delimited report (CSV and/or JSON) plus a rendered
figure into the output directory, prints a short summary, and exits 0 only
if every verification in the run passed.  Parse and validation problems exit
with status 2, verification failures with status 1.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import report
from .foliation import (
    FoliationVerificationError,
    FragmentationError,
    MonotonicityError,
    foliation_decompose,
)
from .geomaps import (
    InversionError,
    RegionOverlapError,
    Sampler,
    c0_distance,
    from_obj,
    _node_from_obj,
)
from .spheres import DecompositionError, VerificationFailure, sphere_distortion_demo
from .witness import (
    CommutatorPair,
    GeneratorParams,
    PlainHomeo,
    PlanSoundnessError,
    SlotOverflowError,
    SupportError,
    VerificationError,
    build_plan,
    k_bound,
    swindle_continuity_margins,
    swindle_factorize,
    witness_session,
)
from .fixtures import random_chain, random_localized_translation, random_supported_homeo

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_USAGE = 2

_VERIFICATION_ERRORS = (
    PlanSoundnessError,
    VerificationError,
    VerificationFailure,
    FoliationVerificationError,
    MonotonicityError,
    FragmentationError,
    DecompositionError,
    RegionOverlapError,
    InversionError,
)


@dataclass(frozen=True)
class RunConfig:
    """Everything a command run depends on; fixed seed means identical reports."""

    command: str
    dim: int = 2
    n_max: int = 4
    tolerance: float = 1e-6
    grid: int = 17
    seed: int = 0
    samples: int = 500
    input_path: str | None = None
    out_dir: str = "out"
    kind: str | None = None
    alpha: float | None = None
    theta: float | None = None

    def to_obj(self) -> dict:
        return asdict(self)

    @classmethod
    def from_obj(cls, obj: dict) -> "RunConfig":
        return cls(**obj)

    def meta(self) -> dict:
        pairs = [(k, v) for k, v in asdict(self).items() if v is not None]
        return dict(pairs)


def _out(cfg: RunConfig, name: str) -> Path:
    return Path(cfg.out_dir) / name


def _load_input(cfg: RunConfig) -> dict:
    if not cfg.input_path:
        raise ValueError("this command needs --input")
    with open(cfg.input_path) as fh:
        return json.load(fh)


def cmd_plan(cfg: RunConfig) -> int:
    params = GeneratorParams(dim=cfg.dim)
    plan = build_plan(params, cfg.n_max, seed=cfg.seed)
    rows = [
        {
            "n": n,
            "depth": plan.depths[n],
            "core_depth": plan.core_depths[n],
            "k_bound": k_bound(plan, n),
        }
        for n in range(cfg.n_max)
    ]
    path = report.write_csv(_out(cfg, "plan.csv"),
                            ["n", "depth", "core_depth", "k_bound"], rows,
                            header_meta=cfg.meta())
    if rows:
        report.plan_figure(rows, _out(cfg, "plan.png"))
    print(f"plan: {cfg.n_max} slots verified (zones disjoint, diameters decreasing)")
    for row in rows:
        print(f"  n={row['n']} depth={row['depth']} core={row['core_depth']} "
              f"k={row['k_bound']}")
    print(f"wrote {path}")
    return EXIT_OK


def _parse_targets(obj: dict, dim: int):
    targets = []
    for i, spec in enumerate(obj.get("targets", [])):
        kind = spec.get("kind")
        if kind == "pair":
            targets.append(CommutatorPair(
                _node_from_obj(spec["f"], dim), _node_from_obj(spec["g"], dim)
            ))
        elif kind == "homeo":
            targets.append(PlainHomeo(_node_from_obj(spec["h"], dim)))
        else:
            raise ValueError(f"target {i}: unknown kind {kind!r}")
    return targets


def cmd_witness(cfg: RunConfig) -> int:
    obj = _load_input(cfg)
    params_obj = obj.get("params", {})
    params = GeneratorParams(
        dim=int(params_obj.get("dim", cfg.dim)),
        contraction=float(params_obj.get("contraction", 0.5)),
        shift=tuple(params_obj.get("shift", ())),
    )
    n_max = int(obj.get("n_max", cfg.n_max))
    targets = _parse_targets(obj, params.dim)
    plan = build_plan(params, n_max, seed=cfg.seed)
    session = witness_session(plan, targets, samples=cfg.samples,
                              tolerance=cfg.tolerance, seed=cfg.seed)
    rows = [
        {
            "n": w.slot,
            "k_bound": w.k_bound,
            "reduced_len": w.report.reduced_length,
            "sup_err": w.report.sup_error,
            "samples": w.report.samples,
        }
        for w in session.witnesses
    ]
    fields = ["n", "k_bound", "reduced_len", "sup_err", "samples"]
    report.write_csv(_out(cfg, "witnesses.csv"), fields, rows, header_meta=cfg.meta())
    report.write_json(_out(cfg, "witnesses.json"), rows)
    report.write_json(_out(cfg, "words.json"),
                      [w.word.to_obj() for w in session.witnesses])
    if rows:
        report.witness_figure(rows, cfg.tolerance, _out(cfg, "witnesses.png"))
    worst = max((r["sup_err"] for r in rows), default=0.0)
    print(f"witness: {len(rows)} words verified, worst sup error {worst:.3e}")
    return EXIT_OK


def _demo_spec(cfg: RunConfig) -> dict:
    if cfg.input_path:
        return _load_input(cfg)
    kind = (cfg.kind or "").replace("-", "_")
    if kind == "circle_rotation":
        if cfg.alpha is None:
            raise ValueError("circle demo needs --alpha")
        return {"kind": "circle_rotation", "alpha": cfg.alpha}
    if kind == "sphere_rotation":
        if cfg.theta is None:
            raise ValueError("sphere demo needs --theta")
        return {"kind": "sphere_rotation", "theta": cfg.theta}
    raise ValueError("demo kind must be circle-rotation or sphere-rotation")


def cmd_demo(cfg: RunConfig) -> int:
    spec = _demo_spec(cfg)
    result = sphere_distortion_demo(spec, cfg.n_max, seed=cfg.seed,
                                    samples=cfg.samples, tolerance=cfg.tolerance)
    rows = [
        {
            "n": r.n,
            "p_n": r.p_n,
            "k_n": r.k_n,
            "reduced_len": r.reduced_len,
            "ratio": r.ratio,
            "sup_err": r.sup_err,
        }
        for r in result.rows
    ]
    fields = ["n", "p_n", "k_n", "reduced_len", "ratio", "sup_err"]
    meta = {**cfg.meta(), **{k: v for k, v in result.meta.items() if k != "denominators"}}
    report.write_csv(_out(cfg, "demo.csv"), fields, rows, header_meta=meta)
    report.write_json(_out(cfg, "demo_words.json"),
                      [w.to_obj() for w in result.words])
    if rows:
        report.demo_figure(rows, _out(cfg, "demo.png"))
    final = rows[-1]["ratio"] if rows else 0.0
    print(f"demo {result.kind}: {len(rows)} powers, final ratio {final:.3e}")
    if rows and final >= 0.01 and rows[-1]["reduced_len"] > 0:
        print("final ratio did not reach 0.01", file=sys.stderr)
        return EXIT_VERIFICATION
    return EXIT_OK


def cmd_fragment(cfg: RunConfig) -> int:
    obj = _load_input(cfg)
    target = from_obj(obj)
    rep = foliation_decompose(target, grid=cfg.grid, tol=cfg.tolerance)
    payload = {
        "dim": target.dim,
        "grid": rep.grid,
        "tolerance": rep.tolerance,
        "sup_error": rep.sup_error,
        "projection_errors": rep.projection_errors,
        "margins": [
            {"axis": m.axis, "min_slope": m.min_slope, "off_axis_drift": m.off_axis_drift}
            for m in rep.margins
        ],
        "passed": rep.passed,
    }
    report.write_json(_out(cfg, "fragment.json"), payload)
    report.fragment_figure(rep, _out(cfg, "fragment.png"))
    print(f"fragment: {len(rep.factors)} factors, reconstruction error {rep.sup_error:.3e}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    """Self-check battery over the whole pipeline; one PASS/FAIL line per check."""
    rng = np.random.default_rng(cfg.seed)
    checks: list[tuple[str, bool, str]] = []

    def run(name, fn):
        try:
            detail = fn()
            checks.append((name, True, detail))
        except Exception as exc:  # noqa: BLE001 -- report, do not crash the battery
            checks.append((name, False, str(exc)))

    def check_roundtrip():
        worst = 0.0
        for _ in range(8):
            chain = random_chain(rng, cfg.dim, depth=8)
            pts = rng.standard_normal((512, cfg.dim)) * 2.0
            back = chain.apply_inverse(chain.apply(pts))
            worst = max(worst, float(np.max(np.linalg.norm(back - pts, axis=-1))))
        if worst >= 1e-9:
            raise VerificationError(f"round-trip error {worst:.3e}")
        return f"worst round-trip {worst:.3e}"

    def check_support():
        m = random_localized_translation(rng, cfg.dim)
        shell = rng.standard_normal((256, cfg.dim))
        shell /= np.linalg.norm(shell, axis=-1, keepdims=True)
        shell *= m.support_radius + 1.0
        if not np.array_equal(m.apply(shell), shell):
            raise VerificationError("support identity violated")
        return "identity outside support exact"

    def check_plan():
        plan = build_plan(GeneratorParams(dim=cfg.dim), cfg.n_max, seed=cfg.seed)
        return f"{plan.n_max} slots, depths {plan.depths}"

    def check_witness():
        plan = build_plan(GeneratorParams(dim=cfg.dim), max(2, min(cfg.n_max, 3)),
                          seed=cfg.seed)
        targets = [
            CommutatorPair(random_localized_translation(rng, cfg.dim),
                           random_localized_translation(rng, cfg.dim))
            for _ in range(plan.n_max)
        ]
        session = witness_session(plan, targets, samples=300,
                                  tolerance=cfg.tolerance, seed=cfg.seed)
        worst = max(w.report.sup_error for w in session.witnesses)
        return f"{len(session.witnesses)} words, worst sup {worst:.3e}"

    def check_swindle():
        h = random_supported_homeo(rng, cfg.dim)
        fact = swindle_factorize(h, samples=400, tolerance=cfg.tolerance,
                                 seed=cfg.seed)
        rows = swindle_continuity_margins(fact, depth=10, seed=cfg.seed)
        return f"commutator ok, {len(rows)} continuity layers"

    def check_c0():
        sampler = Sampler("random", count=256, radius=2.5, seed=cfg.seed)
        m = random_localized_translation(rng, cfg.dim)
        d = c0_distance(m, m, sampler)
        if d != 0.0:
            raise VerificationError("distance of a map to itself is nonzero")
        return "c0 distance reflexive"

    run("map-roundtrip", check_roundtrip)
    run("support-identity", check_support)
    run("plan-soundness", check_plan)
    run("witness-words", check_witness)
    run("swindle", check_swindle)
    run("c0-distance", check_c0)

    all_ok = all(ok for _, ok, _ in checks)
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    if cfg.out_dir:
        report.write_json(_out(cfg, "verify.json"), [
            {"check": name, "passed": ok, "detail": detail}
            for name, ok, detail in checks
        ])
    return EXIT_OK if all_ok else EXIT_VERIFICATION


_COMMANDS = {
    "plan": cmd_plan,
    "witness": cmd_witness,
    "demo": cmd_demo,
    "fragment": cmd_fragment,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="distortion",
        description="Build and verify explicit distortion-witness words.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("plan", "print and export the input-independent witness schedule"),
        ("witness", "emit verified words for targets given as map JSON"),
        ("demo", "end-to-end rotation distortion demo with ratio table"),
        ("fragment", "foliation-factor decomposition of a near-identity map"),
        ("verify", "run the self-check battery"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--dim", type=int, default=2)
        p.add_argument("--nmax", type=int, default=4, dest="n_max")
        p.add_argument("--tol", type=float, default=1e-6, dest="tolerance")
        p.add_argument("--grid", type=int, default=17)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--samples", type=int, default=500)
        p.add_argument("--input", dest="input_path")
        p.add_argument("--out", dest="out_dir", default="out")
        if name == "demo":
            p.add_argument("--kind", choices=["circle-rotation", "sphere-rotation"])
            p.add_argument("--alpha", type=float)
            p.add_argument("--theta", type=float)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fields = {k: v for k, v in vars(args).items() if v is not None}
    cfg = RunConfig(**fields)
    try:
        return _COMMANDS[cfg.command](cfg)
    except json.JSONDecodeError as exc:
        print(f"input parse error: line {exc.lineno} column {exc.colno}: {exc.msg}",
              file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError, TypeError, OSError, SupportError,
            SlotOverflowError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _VERIFICATION_ERRORS as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION


if __name__ == "__main__":
    sys.exit(main())
