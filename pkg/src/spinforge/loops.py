"""Evolution loops: certification, solid angles and phase decomposition.

An evolution loop is a field for which ``U(tau)`` is the identity up to a
global phase, so every state returns to itself at ``tau``.  For spin-1/2
the geometric part of the cyclic phase is minus half the oriented solid
angle swept by the Bloch vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import AngleProgram, RotationProgram, Spinor, TimeGrid, bloch_components
from .errors import ChiDegenerate, LoopConditionViolated, NotCyclic, OpenTrajectory, \
    SouthPoleSingularity
from .propagate import DEFAULT_STEPS, BlochTrajectory, integrate_propagator
from .quadrature import adaptive_simpson, grid_derivative, grid_integral
from .synthesize import EPS_LAMBDA

TOL_LOOP = 1e-4
TOL_PHASE = 1e-3
TOL_WINDING = 1e-9
EPS_POLE = 1e-6
CLOSURE_TOL = 1e-4
TWO_PI = 2 * math.pi


def wrap_phase(x):
    """Map angles onto (-pi, pi]."""
    y = np.mod(np.asarray(x, dtype=float) + math.pi, TWO_PI) - math.pi
    y = np.where(y == -math.pi, math.pi, y)
    return float(y) if np.ndim(y) == 0 else y


@dataclass(frozen=True)
class LoopSpec:
    tau: float
    l: int  # turns about e_chi
    n: int  # turns about k

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive")


@dataclass(frozen=True)
class LoopCertificate:
    tau: float
    deviation: float
    global_phase: float
    periodic: bool
    periodic_deviation: float
    tol: float = TOL_LOOP

    @property
    def valid(self) -> bool:
        return self.deviation < self.tol


@dataclass(frozen=True)
class PhaseDecomposition:
    total: float
    dynamical: float
    geometric: float
    solid_angle: float

    @property
    def identity_residual(self) -> float:
        """``total - dynamical + solid_angle / 2`` wrapped to (-pi, pi]; zero for a consistent loop."""
        return wrap_phase(self.total - self.dynamical + self.solid_angle / 2)


def check_loop_condition(prog: RotationProgram, tau: float, tol: float = TOL_WINDING):
    """Winding numbers ``(l, n)`` if ``alpha(tau)`` and ``beta(tau)`` are in ``2 pi Z``.

    Returns ``None`` when either angle misses a multiple of ``2 pi`` by more
    than ``tol`` turns.
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    turns_a = float(prog.alpha(tau)) / TWO_PI
    turns_b = float(prog.beta(tau)) / TWO_PI
    l, n = round(turns_a), round(turns_b)
    if abs(turns_a - l) > tol or abs(turns_b - n) > tol:
        return None
    return LoopSpec(float(tau), int(l), int(n))


def identity_deviation(u) -> float:
    """Distance of a 2x2 matrix from the scalar matrices: off-diagonals plus diagonal mismatch."""
    u = np.asarray(u)
    return float(abs(u[0, 1]) + abs(u[1, 0]) + abs(u[0, 0] - u[1, 1]))


def certify_loop(field, tau: float, grid_steps: int = DEFAULT_STEPS,
                 tol: float = TOL_LOOP) -> LoopCertificate:
    """Integrate ``U`` to ``2 tau`` and test ``U(tau)`` and ``U(2 tau)`` against ``e^{i phi} I``."""
    props = integrate_propagator(field, TimeGrid(2 * tau, 2 * grid_steps))
    u1 = props.matrices[grid_steps]
    u2 = props.matrices[-1]
    dev1, dev2 = identity_deviation(u1), identity_deviation(u2)
    phase = wrap_phase(np.angle(u1[0, 0] + u1[1, 1]))
    return LoopCertificate(float(tau), dev1, phase, dev2 < tol, dev2, tol)


def solid_angle_integrand(vectors, h: float) -> np.ndarray:
    n = np.asarray(vectors, dtype=float)
    dn = grid_derivative(n, h, order=4)
    return (n[:, 0] * dn[:, 1] - n[:, 1] * dn[:, 0]) / (1.0 + n[:, 2])


def solid_angle_quadrature(traj: BlochTrajectory, closure_tol: float = CLOSURE_TOL) -> float:
    """Oriented solid angle ``int (n1 n2' - n2 n1') / (1 + n3) dt`` of a closed trajectory.

    Derivatives use the five-point central stencil and the integral the
    composite Simpson rule.

    Raises
    ------
    OpenTrajectory
        If ``|n(tau) - n(0)| >= closure_tol``.
    SouthPoleSingularity
        If ``1 + n3 <= 1e-6`` at some node.
    """
    n = traj.vectors
    gap = float(np.linalg.norm(n[-1] - n[0]))
    if gap >= closure_tol:
        raise OpenTrajectory(f"trajectory does not close: |n(tau) - n(0)| = {gap!r}")
    near = 1.0 + n[:, 2] <= EPS_POLE
    if near.any():
        raise SouthPoleSingularity(traj.times[np.argmax(near)], "1 + n3 vanishes")
    return grid_integral(solid_angle_integrand(n, traj.grid.dt), traj.grid.dt)


def _winding_terms(spec: LoopSpec, chi: float, theta: float) -> float:
    c = math.cos(theta - chi)
    return TWO_PI * spec.n * (1 - math.cos(chi) * c) - TWO_PI * spec.l * (1 - c)


def _require_loop(prog: RotationProgram, spec: LoopSpec):
    found = check_loop_condition(prog, spec.tau)
    if found is None or (found.l, found.n) != (spec.l, spec.n):
        raise LoopConditionViolated(
            f"alpha(tau)={float(prog.alpha(spec.tau))!r}, beta(tau)={float(prog.beta(spec.tau))!r} "
            f"do not match l={spec.l}, n={spec.n}")


def solid_angle_closed_form(prog: RotationProgram, spec: LoopSpec, theta: float) -> float:
    """Solid angle of the loop started at ``(sin theta, 0, cos theta)``.

    Winding terms are exact; only ``int beta' cos(alpha) dt`` is computed
    numerically.
    """
    _require_loop(prog, spec)
    chi = prog.chi
    residual = adaptive_simpson(
        lambda t: prog.beta.derivative(t) * np.cos(prog.alpha(t)), 0.0, spec.tau, tol=1e-11)
    return _winding_terms(spec, chi, theta) + math.sin(chi) * math.sin(theta - chi) * residual


def cos_alpha_integral(alpha: AngleProgram, tau: float) -> float:
    return adaptive_simpson(lambda t: np.cos(alpha(t)), 0.0, tau, tol=1e-11)


def solid_angle_constant_b3(b0: float, chi: float, theta: float, alpha: AngleProgram,
                            spec: LoopSpec) -> float:
    """Solid angle for the constant-``b3`` family, where the residual reduces to ``-b0 int cos(alpha)``."""
    lam = math.cos(chi)
    if abs(lam) <= EPS_LAMBDA:
        raise ChiDegenerate(chi)
    beta = (alpha.scaled(lam) - AngleProgram.linear(b0)).simplified()
    _require_loop(RotationProgram(chi, alpha, beta), spec)
    return (_winding_terms(spec, chi, theta)
            - b0 * math.sin(chi) * math.sin(theta - chi) * cos_alpha_integral(alpha, spec.tau))


def phase_decomposition(field, psi0: Spinor, tau: float, grid_steps: int = DEFAULT_STEPS,
                        tol: float = TOL_LOOP) -> PhaseDecomposition:
    """Split the cyclic phase of ``psi0`` into dynamical and geometric parts.

    total = arg <psi(0)|psi(tau)>, dynamical = (1/2) int b.n dt, and the
    geometric phase is their difference wrapped to (-pi, pi].  The solid
    angle comes from quadrature on the same trajectory.

    Raises
    ------
    NotCyclic
        If ``U(tau)`` fails the loop certificate.
    """
    grid = TimeGrid(tau, grid_steps)
    props = integrate_propagator(field, grid)
    dev = identity_deviation(props.final)
    if not dev < tol:
        raise NotCyclic(f"U(tau) deviates from the identity by {dev!r} (tol {tol!r})")
    psi = props.matrices @ psi0.array
    n = bloch_components(psi)
    n /= np.linalg.norm(n, axis=-1, keepdims=True)
    b = np.asarray(field(grid.times), dtype=float)
    dynamical = 0.5 * grid_integral(np.einsum("ij,ij->i", b, n), grid.dt)
    total = float(np.angle(np.vdot(psi0.array, psi[-1])))
    omega = solid_angle_quadrature(BlochTrajectory(grid, n))
    return PhaseDecomposition(total, dynamical, wrap_phase(total - dynamical), omega)
