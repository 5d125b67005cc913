"""Command-line entry point: ``choreo {solve,sweep,certify,probe}``.

Exit codes: 0 success, 1 certification or solver failure (error JSON on
stderr), 2 usage error. Any flag may also be given through ``--config
FILE.json`` whose keys are the flag names with dashes replaced by
underscores; explicit flags win over the file.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dynamics import certify
from .errors import CertificationFailed, ChoreoError, SweepBroken
from .functionals import ProblemParams
from .minimizer import SolverConfig
from .pipeline import (
    DEFAULT_MODES,
    DEFAULT_RK4_STEPS,
    CertificationBounds,
    check_certificate,
    collision_scaling_probe,
    load_loop,
    run_single,
    run_sweep,
    summary,
    write_artifacts,
)


@dataclass
class CliConfig:
    subcommand: str
    alphas: list
    modes: int
    quad_nodes: int
    grad_tol: float
    max_iters: int
    seed_amplitude: float
    nc1: bool
    rng_seed: int | None
    output_dir: Path | None
    verbosity: int
    mass: float = 1.0
    collision_floor: float = 1e-6
    rk4_steps: int = DEFAULT_RK4_STEPS
    loop_path: Path | None = None
    epsilons: list | None = None
    bounds: CertificationBounds = CertificationBounds()
    continuity_slope: float = 0.25

    @property
    def alpha(self) -> float:
        return self.alphas[0]

    def params(self, alpha: float | None = None) -> ProblemParams:
        return ProblemParams(alpha=self.alpha if alpha is None else alpha, mass=self.mass,
                             quad_nodes=self.quad_nodes, collision_floor=self.collision_floor)

    def solver(self) -> SolverConfig:
        return SolverConfig(max_iters=self.max_iters, grad_tol=self.grad_tol,
                            seed_amplitude=self.seed_amplitude, rng_seed=self.rng_seed,
                            verbose=self.verbosity > 1)


def _alpha(text) -> float:
    try:
        a = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0.0 < a < 2.0:
        raise argparse.ArgumentTypeError(f"alpha must lie in (0, 2), got {a}")
    return a


def _alpha_list(text) -> list:
    if isinstance(text, (list, tuple)):
        return [_alpha(t) for t in text]
    return [_alpha(t) for t in str(text).split(",") if t.strip()]


def _float_list(text) -> list:
    if isinstance(text, (list, tuple)):
        return [float(t) for t in text]
    return [float(t) for t in str(text).split(",") if t.strip()]


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON file of default flag values")
    p.add_argument("--modes", type=int, default=DEFAULT_MODES, help="Fourier modes per component (default %(default)s)")
    p.add_argument("--quad-nodes", type=int, default=512, help="trapezoid nodes (default %(default)s)")
    p.add_argument("--mass", type=float, default=1.0, help="common body mass (default %(default)s)")
    p.add_argument("--collision-floor", type=float, default=1e-6, help="minimum admissible distance (default %(default)s)")
    p.add_argument("--grad-tol", type=float, default=1e-8, help="projected-gradient tolerance (default %(default)s)")
    p.add_argument("--max-iters", type=int, default=5000, help="descent iteration cap (default %(default)s)")
    p.add_argument("--seed-amplitude", type=float, default=1.0, help="seed curve amplitude (default %(default)s)")
    p.add_argument("--nc1", action="store_true", help="pin the first y harmonic to zero")
    p.add_argument("--rng-seed", type=int, default=None, help="jitter the seed deterministically")
    p.add_argument("--rk4-steps", type=int, default=DEFAULT_RK4_STEPS, help="RK4 steps per period (default %(default)s)")
    p.add_argument("--virial-tol", type=float, default=1e-6, help="(default %(default)s)")
    p.add_argument("--newton-tol", type=float, default=1e-4, help="(default %(default)s)")
    p.add_argument("--closure-tol", type=float, default=1e-5, help="(default %(default)s)")
    p.add_argument("--energy-tol", type=float, default=1e-8, help="(default %(default)s)")
    p.add_argument("--out", type=Path, default=None, help="output directory")
    p.add_argument("-v", "--verbose", action="count", default=0, help="-v: log summary, -vv: per-iteration lines")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="choreo", description="Figure-eight choreographies by scale-invariant descent.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("solve", help="solve and certify a single alpha")
    p.add_argument("--alpha", type=_alpha, default=1.0, help="potential exponent in (0, 2) (default %(default)s)")
    _common(p)

    p = sub.add_parser("sweep", help="alpha continuation")
    p.add_argument("--alphas", type=_alpha_list, default=[0.5, 0.75, 1.0, 1.25, 1.5],
                   help="comma-separated increasing alphas (default 0.5,0.75,1.0,1.25,1.5)")
    p.add_argument("--continuity-slope", type=float, default=0.25,
                   help="max coefficient distance per unit alpha (default %(default)s)")
    _common(p)

    p = sub.add_parser("certify", help="certify an existing loop.json")
    p.add_argument("--loop", type=Path, required=True, help="loop.json to certify")
    p.add_argument("--alpha", type=_alpha, default=1.0, help="(default %(default)s)")
    _common(p)

    p = sub.add_parser("probe", help="binary-collision action scaling")
    p.add_argument("--alphas", type=_alpha_list, default=[0.5, 1.0, 1.5], help="(default 0.5,1.0,1.5)")
    p.add_argument("--epsilons", type=_float_list, default=list(np.logspace(-1, -6, 11)),
                   help="comma-separated decreasing window sizes")
    _common(p)
    return parser


def _load_config_file(argv) -> dict:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", type=Path)
    known, _ = pre.parse_known_args(argv)
    if known.config is None:
        return {}
    return json.loads(known.config.read_text())


def parse_args(argv=None) -> CliConfig:
    """Map argv to a :class:`CliConfig`; invalid input exits with status 2."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        file_cfg = _load_config_file(argv)
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read --config: {exc}")
    if file_cfg:
        subparsers = parser._subparsers._group_actions[0].choices
        for name, sp in subparsers.items():
            dests = {a.dest for a in sp._actions}
            unknown = set(file_cfg) - dests
            if unknown and argv and argv[0] == name:
                parser.error(f"unknown config keys: {sorted(unknown)}")
            sp.set_defaults(**{k: v for k, v in file_cfg.items() if k in dests})
    ns = parser.parse_args(argv)
    try:
        if hasattr(ns, "alpha"):
            alphas = [_alpha(ns.alpha)]
        else:
            alphas = _alpha_list(ns.alphas)
        cfg = CliConfig(
            subcommand=ns.subcommand,
            alphas=alphas,
            modes=int(ns.modes),
            quad_nodes=int(ns.quad_nodes),
            grad_tol=float(ns.grad_tol),
            max_iters=int(ns.max_iters),
            seed_amplitude=float(ns.seed_amplitude),
            nc1=bool(ns.nc1),
            rng_seed=ns.rng_seed,
            output_dir=Path(ns.out) if ns.out is not None else None,
            verbosity=int(ns.verbose),
            mass=float(ns.mass),
            collision_floor=float(ns.collision_floor),
            rk4_steps=int(ns.rk4_steps),
            loop_path=getattr(ns, "loop", None),
            epsilons=_float_list(ns.epsilons) if hasattr(ns, "epsilons") else None,
            bounds=CertificationBounds(ns.virial_tol, ns.newton_tol, ns.closure_tol, ns.energy_tol),
            continuity_slope=float(getattr(ns, "continuity_slope", 0.25)),
        )
        if cfg.modes < 1 or cfg.rk4_steps < 1:
            raise ValueError("modes and rk4-steps must be positive")
        if cfg.subcommand == "sweep" and any(b <= a for a, b in zip(cfg.alphas, cfg.alphas[1:])):
            raise ValueError("alphas must be strictly increasing")
        for a in cfg.alphas:
            p = cfg.params(a)
            if p.quad_nodes < 4 * cfg.modes:
                raise ValueError(f"quad-nodes must be at least 4*modes = {4 * cfg.modes}")
        cfg.solver()
    except (ValueError, TypeError, argparse.ArgumentTypeError) as exc:
        parser.error(str(exc))
    return cfg


def _fail(code: str, detail: str) -> int:
    print(json.dumps({"error": code, "detail": detail}), file=sys.stderr)
    return 1


def _run(cfg: CliConfig) -> int:
    if cfg.subcommand == "solve":
        traj = run_single(cfg.params(), cfg.solver(), cfg.modes, bounds=cfg.bounds,
                          rk4_steps=cfg.rk4_steps, nc1=cfg.nc1)
        if cfg.output_dir is not None:
            write_artifacts(traj, cfg.output_dir)
        print(json.dumps(summary(traj), indent=2))
        return 0

    if cfg.subcommand == "sweep":
        res = run_sweep(cfg.alphas, cfg.params(), cfg.solver(), cfg.modes,
                        continuity_slope=cfg.continuity_slope, bounds=cfg.bounds, rk4_steps=cfg.rk4_steps)
        rows = []
        for traj in res.trajectories:
            if cfg.output_dir is not None:
                write_artifacts(traj, cfg.output_dir / f"alpha_{traj.alpha:g}")
            rows.append(summary(traj))
        out = {"runs": rows, "distances": res.distances, "continuity_slope": res.continuity_bound}
        if cfg.output_dir is not None:
            (cfg.output_dir / "sweep.json").write_text(json.dumps(out, indent=2) + "\n")
        print(json.dumps(out, indent=2))
        return 0

    if cfg.subcommand == "certify":
        loop = load_loop(cfg.loop_path)
        params = cfg.params()
        cert = certify(loop, params, steps=cfg.rk4_steps)
        if cfg.output_dir is not None:
            cfg.output_dir.mkdir(parents=True, exist_ok=True)
            (cfg.output_dir / "certificate.json").write_text(cert.to_json() + "\n")
        print(cert.to_json())
        check_certificate(cert, cfg.bounds, params.collision_floor)
        return 0

    if cfg.subcommand == "probe":
        tables = []
        for a in cfg.alphas:
            pr = collision_scaling_probe(a, cfg.epsilons)
            tables.append({"alpha": a, "fitted_exponent": pr.fitted_exponent,
                           "expected_exponent": pr.expected_exponent,
                           "rows": [dict(zip(("eps", "K", "V", "action"), r)) for r in pr.rows]})
        print(json.dumps(tables, indent=2))
        return 0
    raise AssertionError(cfg.subcommand)


def main(argv=None) -> int:
    cfg = parse_args(argv)
    logging.basicConfig(level=logging.INFO if cfg.verbosity else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _run(cfg)
    except CertificationFailed as exc:
        return _fail("certification_failed", str(exc))
    except SweepBroken as exc:
        return _fail("sweep_broken", str(exc))
    except ChoreoError as exc:
        return _fail(type(exc).__name__, str(exc))
    except (OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
        return _fail("invalid_input", f"{type(exc).__name__}: {exc}")


if __name__ == "__main__":
    sys.exit(main())
