"""Run configurations for the command-line driver.

A config is a JSON object.  Scalars may be given as numbers or as
arithmetic strings over ``pi``, ``e`` and ``sqrt`` (``"5 - 1/(2*pi)"``);
angle programs are term lists such as
``[{"sin": {"amp": "0.7*4/5", "freq": 5}}, {"lin": 1.0}]``.

Field descriptions (``"field"`` section, selected by ``"kind"``):

``constant``     ``b``: three components
``uniform``      ``alpha0``, ``beta0`` and ``lambda`` or ``chi``
``rotation``     ``alpha``, ``beta`` terms, ``lambda``/``chi``; optional ``gauge``
``constant-b3``  ``b0``, ``lambda``/``chi`` and either ``beta`` or ``alpha`` terms
``single-axis``  ``delta`` terms; optional ``gauge``
``sampled``      ``path`` of a CSV with columns t,n1,n2,n3,b1,b2,b3
``trajectory``   ``path`` of such a CSV (n-columns used) and ``gauge``; synthesize only

Gauges: ``"invariant"``, ``{"const": c}`` or ``{"derivative": terms, "scale": k}``.
"""

from __future__ import annotations

import ast
import json
import math
import operator
import os
from dataclasses import dataclass, field as dc_field
from importlib import resources
from pathlib import Path

import numpy as np

from .core import AngleProgram, BlochVector, RotationProgram, TimeGrid
from .errors import SpinforgeError
from .fields import SampledField, constant_field
from .propagate import DEFAULT_STEPS, BlochTrajectory
from .resonance import ConstantB3Model, UniformModel
from .synthesize import (constant_b3_field, constant_b3_field_from_alpha, constant_gauge,
                         derivative_gauge, invariant_gauge, single_axis_field,
                         two_axis_field_general, two_axis_field_invariant)

MODES = ("simulate", "synthesize", "resonance", "loop-check", "phase")
CSV_HEADER = "t,n1,n2,n3,b1,b2,b3"
STEPS_ENV = "SPINFORGE_STEPS"


class ConfigError(SpinforgeError, ValueError):
    pass


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_NAMES = {"pi": math.pi, "e": math.e}
_FUNCS = {"sqrt": math.sqrt, "sin": math.sin, "cos": math.cos, "acos": math.acos}


def _eval_node(node):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body)
    if isinstance(node, ast.Constant) and type(node.value) in (int, float):
        return node.value
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_node(node.left), _eval_node(node.right))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        return _UNARY[type(node.op)](_eval_node(node.operand))
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
            and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
        return _FUNCS[node.func.id](_eval_node(node.args[0]))
    raise ValueError("unsupported expression")


def number(value) -> float:
    """A float from a JSON number or an arithmetic string."""
    if isinstance(value, bool):
        raise ConfigError(f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        out = float(value)
    elif isinstance(value, str):
        try:
            out = float(_eval_node(ast.parse(value, mode="eval")))
        except (SyntaxError, ValueError, ZeroDivisionError, OverflowError) as exc:
            raise ConfigError(f"cannot evaluate {value!r}: {exc}") from None
    else:
        raise ConfigError(f"expected a number, got {value!r}")
    if not math.isfinite(out):
        raise ConfigError(f"non-finite value {value!r}")
    return out


def program(terms) -> AngleProgram:
    if not isinstance(terms, list):
        raise ConfigError(f"angle program must be a list of terms, got {terms!r}")
    try:
        return AngleProgram.from_terms(terms, number=number)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _require(section: dict, key: str, where: str):
    if key not in section:
        raise ConfigError(f"missing key {key!r} in {where}")
    return section[key]


def _chi(desc: dict) -> float:
    if ("chi" in desc) == ("lambda" in desc):
        raise ConfigError("field needs exactly one of 'chi' or 'lambda'")
    if "chi" in desc:
        chi = number(desc["chi"])
        if not 0 <= chi <= math.pi:
            raise ConfigError(f"chi must lie in [0, pi], got {chi!r}")
        return chi
    lam = number(desc["lambda"])
    if not -1 <= lam <= 1:
        raise ConfigError(f"lambda must lie in [-1, 1], got {lam!r}")
    return math.acos(lam)


def gauge(desc, prog: RotationProgram | None = None):
    if desc == "invariant":
        if prog is None:
            raise ConfigError("'invariant' gauge needs a rotation program")
        return invariant_gauge(prog)
    if isinstance(desc, dict) and set(desc) == {"const"}:
        return constant_gauge(number(desc["const"]))
    if isinstance(desc, dict) and "derivative" in desc and set(desc) <= {"derivative", "scale"}:
        return derivative_gauge(program(desc["derivative"]), number(desc.get("scale", 1.0)))
    raise ConfigError(f"unrecognized gauge {desc!r}")


def read_csv_columns(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a t,n1,n2,n3,b1,b2,b3 file; returns (times, 6-column data)."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ConfigError(f"{path}: expected header {CSV_HEADER!r}, got {header!r}")
        try:
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    if data.shape[1] != 7:
        raise ConfigError(f"{path}: expected 7 columns")
    return data[:, 0], data[:, 1:]


def read_field_csv(path) -> SampledField:
    t, cols = read_csv_columns(path)
    try:
        return SampledField(t, cols[:, 3:])
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def read_trajectory_csv(path) -> BlochTrajectory:
    t, cols = read_csv_columns(path)
    if t[0] != 0.0 or len(t) < 3:
        raise ConfigError(f"{path}: trajectory must start at t=0 and have at least 3 nodes")
    grid = TimeGrid(float(t[-1]), len(t) - 1)
    if np.max(np.abs(t - grid.times)) > 1e-9 * max(1.0, grid.tau):
        raise ConfigError(f"{path}: trajectory times must be uniformly spaced")
    return BlochTrajectory(grid, cols[:, :3])


@dataclass
class RunConfig:
    """A parsed configuration with its field and programs already built."""

    mode: str
    field_desc: dict
    field: object
    grid: TimeGrid
    theta: float = 0.0
    phi: float = 0.0
    output: str | None = None
    program: RotationProgram | None = None
    model: object = None
    target: BlochTrajectory | None = None
    gauge: object = None
    echo: dict = dc_field(default_factory=dict)
    tol_loop: float = 1e-4
    tol_phase: float = 1e-3
    tol_winding: float = 1e-9

    @property
    def n0(self) -> BlochVector:
        return BlochVector.from_angles(self.theta, self.phi)


def build_field(desc: dict, n0: BlochVector, theta: float, phi: float):
    """Field, rotation program, resonance model and echo data for a field description."""
    if not isinstance(desc, dict):
        raise ConfigError("'field' must be an object")
    kind = _require(desc, "kind", "field")
    prog = model = None
    echo: dict = {}
    if kind == "constant":
        b = _require(desc, "b", "field")
        if not isinstance(b, list) or len(b) != 3:
            raise ConfigError("'b' must list three components")
        fld = constant_field([number(c) for c in b])
    elif kind == "uniform":
        model = UniformModel(number(_require(desc, "alpha0", "field")),
                             number(_require(desc, "beta0", "field")), _chi(desc))
        prog = model.program
        fld = model.field()
    elif kind == "rotation":
        prog = RotationProgram(_chi(desc), program(desc.get("alpha", [])),
                               program(desc.get("beta", [])))
        if "gauge" in desc and desc["gauge"] != "invariant":
            fld = two_axis_field_general(prog, n0, gauge(desc["gauge"], prog))
        else:
            fld = two_axis_field_invariant(prog)
    elif kind == "constant-b3":
        b0 = number(_require(desc, "b0", "field"))
        chi = _chi(desc)
        if ("alpha" in desc) == ("beta" in desc):
            raise ConfigError("constant-b3 field needs exactly one of 'alpha' or 'beta'")
        if "beta" in desc:
            beta = program(desc["beta"])
            fld, alpha = constant_b3_field(b0, beta, chi)
            model = ConstantB3Model(b0, beta, chi)
            echo["alpha"] = alpha.to_terms()
        else:
            alpha = program(desc["alpha"])
            fld, beta = constant_b3_field_from_alpha(b0, alpha, chi)
            model = ConstantB3Model(b0, beta, chi, alpha)
            echo["beta"] = beta.to_terms()
        prog = RotationProgram(chi, alpha, beta)
    elif kind == "single-axis":
        delta = program(_require(desc, "delta", "field"))
        g = gauge(desc["gauge"]) if "gauge" in desc and desc["gauge"] != "invariant" else None
        fld = single_axis_field(theta, phi, delta, g)
        # turning by delta about k is the chi = 0 program with alpha = 0, beta = delta
        prog = RotationProgram(0.0, AngleProgram(), delta)
    elif kind == "sampled":
        fld = read_field_csv(_require(desc, "path", "field"))
    else:
        raise ConfigError(f"unknown field kind {kind!r}")
    return fld, prog, model, echo


def default_steps() -> int:
    raw = os.environ.get(STEPS_ENV)
    if raw is None:
        return DEFAULT_STEPS
    try:
        steps = int(raw)
    except ValueError:
        raise ConfigError(f"{STEPS_ENV} must be an integer, got {raw!r}") from None
    if steps < 2:
        raise ConfigError(f"{STEPS_ENV} must be >= 2")
    return steps


def bundled_names() -> list[str]:
    root = resources.files("spinforge") / "configs"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_raw(ref: str) -> dict:
    """Load a config from a path or, failing that, by bundled name."""
    path = Path(ref)
    if path.is_file():
        text = path.read_text(encoding="utf-8")
    elif ref in bundled_names():
        text = (resources.files("spinforge") / "configs" / f"{ref}.json").read_text(encoding="utf-8")
    elif path.suffix or len(path.parts) > 1:
        # looks like a path, not a bundled name
        raise FileNotFoundError(f"config file not found: {ref}")
    else:
        raise ConfigError(f"no config file or bundled config named {ref!r}")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{ref}: invalid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{ref}: top level must be an object")
    return raw


def parse_config(raw: dict, mode: str | None = None, steps: int | None = None,
                 tol: float | None = None) -> RunConfig:
    """Validate ``raw`` and build every object the run needs.

    ``mode``, ``steps`` and ``tol`` are command-line overrides.
    """
    cfg_mode = raw.get("mode")
    if mode is None:
        mode = cfg_mode
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {', '.join(MODES)}; got {mode!r}")
    initial = raw.get("initial", {})
    if not isinstance(initial, dict):
        raise ConfigError("'initial' must be an object")
    theta = number(initial.get("theta", 0.0))
    phi = number(initial.get("phi", 0.0))
    grid_raw = _require(raw, "grid", "config")
    if not isinstance(grid_raw, dict):
        raise ConfigError("'grid' must be an object")
    tau = number(_require(grid_raw, "tau", "grid"))
    if steps is None:
        steps = int(number(grid_raw["steps"])) if "steps" in grid_raw else default_steps()
    try:
        grid = TimeGrid(tau, steps)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    tols = raw.get("tolerances", {})
    if not isinstance(tols, dict) or not set(tols) <= {"loop", "phase", "winding"}:
        raise ConfigError("'tolerances' may only set loop, phase, winding")
    n0 = BlochVector.from_angles(theta, phi)

    desc = _require(raw, "field", "config")
    target = None
    if isinstance(desc, dict) and desc.get("kind") == "trajectory":
        if mode != "synthesize":
            raise ConfigError("field kind 'trajectory' is only valid in synthesize mode")
        target = read_trajectory_csv(_require(desc, "path", "field"))
        g = gauge(_require(desc, "gauge", "field"))
        fld, prog, model, echo = None, None, None, {}
        grid = target.grid
    else:
        try:
            fld, prog, model, echo = build_field(desc, n0, theta, phi)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, SpinforgeError) and not isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from None
        g = None
    output = raw.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("'output' must be a string path")
    cfg = RunConfig(mode=mode, field_desc=desc, field=fld, grid=grid, theta=theta, phi=phi,
                    output=output, program=prog, model=model, target=target, gauge=g, echo=echo,
                    tol_loop=number(tols.get("loop", 1e-4)),
                    tol_phase=number(tols.get("phase", 1e-3)),
                    tol_winding=number(tols.get("winding", 1e-9)))
    if tol is not None:
        cfg.tol_loop = tol
    return cfg
