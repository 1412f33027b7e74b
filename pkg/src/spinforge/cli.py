"""Command-line driver.

    spinforge <mode> --config <path|bundled-name> [--out PATH] [--steps N] [--tol X]

Exit codes: 0 success, 1 config error, 2 singularity, 3 certification
failure, 4 I/O error.  Failures print one line ``<ErrorType>: <detail>``
on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import report
from .config import MODES, ConfigError, RunConfig, bundled_names, load_raw, parse_config
from .core import BlochVector, Spinor, rotate_vectors
from .errors import ChiDegenerate, NonFiniteField, NotCyclic, SingularityError, SpinforgeError
from .loops import (check_loop_condition, certify_loop, phase_decomposition,
                    solid_angle_closed_form, solid_angle_constant_b3)
from .propagate import integrate_bloch
from .resonance import ConstantB3Model, probability_from_trajectory, transition_probability
from .synthesize import pointwise_inverse

EXIT_OK, EXIT_CONFIG, EXIT_SINGULAR, EXIT_CERT, EXIT_IO = 0, 1, 2, 3, 4


class CertificationFailure(SpinforgeError):
    pass


def _simulate(cfg: RunConfig, out):
    traj = integrate_bloch(cfg.field, cfg.n0, cfg.grid)
    report.emit_plot_data(traj, out, cfg.field)


def _synthesize(cfg: RunConfig, out):
    times = cfg.grid.times
    if cfg.target is not None:
        fld = pointwise_inverse(cfg.target, cfg.gauge)
        n, b = cfg.target.vectors, fld.values
    elif cfg.program is not None:
        n = rotate_vectors(cfg.program, times, cfg.n0)
        b = cfg.field(times)
    else:
        raise ConfigError("synthesize needs a rotation-program field kind or a trajectory")
    report.write_records(out, times, n, b)
    if cfg.echo:
        stream = sys.stderr if out in (None, "-") else sys.stdout
        for key, terms in sorted(cfg.echo.items()):
            print(f"{key}: {json.dumps(terms)}", file=stream)


def _resonance(cfg: RunConfig, out):
    if cfg.model is None:
        raise ConfigError("resonance mode needs a 'uniform' or 'constant-b3' field")
    # closed forms assume the spin starts at +k
    traj = integrate_bloch(cfg.field, BlochVector([0.0, 0.0, 1.0]), cfg.grid)
    times = cfg.grid.times
    closed = transition_probability(cfg.model, times)
    numeric = probability_from_trajectory(traj, slice(None))
    report.write_text(out, report.format_rows("t,p_closed,p_numeric", [times, closed, numeric]))


def _loop_check(cfg: RunConfig, out):
    cert = certify_loop(cfg.field, cfg.grid.tau, cfg.grid.steps, cfg.tol_loop)
    spec = None
    if cfg.program is not None:
        spec = check_loop_condition(cfg.program, cfg.grid.tau, cfg.tol_winding)
    report.write_report(out, {
        "mode": "loop-check",
        "tau": cfg.grid.tau,
        "steps": cfg.grid.steps,
        "deviation": cert.deviation,
        "tol": cert.tol,
        "certified": cert.valid,
        "global_phase": cert.global_phase,
        "periodic": cert.periodic,
        "periodic_deviation": cert.periodic_deviation,
        "l": None if spec is None else spec.l,
        "n": None if spec is None else spec.n,
    })
    if not cert.valid:
        raise CertificationFailure(f"deviation {cert.deviation!r} >= tol {cert.tol!r}")


def _closed_form_solid_angle(cfg: RunConfig):
    if cfg.program is None or cfg.phi != 0.0:
        return None
    spec = check_loop_condition(cfg.program, cfg.grid.tau, cfg.tol_winding)
    if spec is None:
        return None
    if isinstance(cfg.model, ConstantB3Model) and abs(math.cos(cfg.program.chi)) > 1e-12:
        return solid_angle_constant_b3(cfg.model.b0, cfg.program.chi, cfg.theta,
                                       cfg.program.alpha, spec)
    return solid_angle_closed_form(cfg.program, spec, cfg.theta)


def _phase(cfg: RunConfig, out):
    pd = phase_decomposition(cfg.field, Spinor.from_bloch(cfg.n0), cfg.grid.tau,
                             cfg.grid.steps, cfg.tol_loop)
    residual = pd.identity_residual
    report.write_report(out, {
        "mode": "phase",
        "tau": cfg.grid.tau,
        "steps": cfg.grid.steps,
        "total": pd.total,
        "dynamical": pd.dynamical,
        "geometric": pd.geometric,
        "solid_angle": pd.solid_angle,
        "solid_angle_closed_form": _closed_form_solid_angle(cfg),
        "identity_residual": residual,
        "tol_phase": cfg.tol_phase,
        "consistent": abs(residual) < cfg.tol_phase,
    })
    if not abs(residual) < cfg.tol_phase:
        raise CertificationFailure(f"phase identity residual {residual!r} >= {cfg.tol_phase!r}")


_HANDLERS = {"simulate": _simulate, "synthesize": _synthesize, "resonance": _resonance,
             "loop-check": _loop_check, "phase": _phase}


def run(cfg: RunConfig, out=None) -> None:
    """Execute one configuration; ``out`` overrides the config's output path."""
    if out is None:
        out = cfg.output
    _HANDLERS[cfg.mode](cfg, out)


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, (SingularityError, ChiDegenerate, NonFiniteField)):
        return EXIT_SINGULAR
    if isinstance(exc, (CertificationFailure, NotCyclic)):
        return EXIT_CERT
    if isinstance(exc, OSError):
        return EXIT_IO
    return EXIT_CONFIG


class _Parser(argparse.ArgumentParser):
    # usage errors are config errors (exit 1), not argparse's default 2
    def error(self, message):
        self.exit(EXIT_CONFIG, f"UsageError: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="spinforge",
        description="Spin-1/2 field synthesis, evolution loops and geometric phases.")
    parser.add_argument("mode", choices=MODES)
    parser.add_argument("--config", required=True,
                        help="config file, or one of: " + ", ".join(bundled_names()))
    parser.add_argument("--out", default=None, help="output path ('-' for stdout)")
    parser.add_argument("--steps", type=int, default=None, help="integrator steps over [0, tau]")
    parser.add_argument("--tol", type=float, default=None, help="loop certification tolerance")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw = load_raw(args.config)
        cfg = parse_config(raw, mode=args.mode, steps=args.steps, tol=args.tol)
        run(cfg, args.out)
    except (SpinforgeError, OSError, ValueError) as exc:
        name = "IOError" if isinstance(exc, OSError) else type(exc).__name__
        print(f"{name}: {exc}".replace("\n", " "), file=sys.stderr)
        return exit_code(exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
