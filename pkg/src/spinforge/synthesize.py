"""Inverse techniques: fields that induce a prescribed spin motion.

For a given trajectory ``n(t)`` the linear system ``-b x n = dn/dt`` is
rank deficient, so ``b3(t)`` (the gauge) is free and fixes the other two
components wherever ``n3 != 0``.  For the two-axis rotation programs a
particular gauge removes the dependence on the initial state altogether.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .core import AngleProgram, BlochVector, RotationProgram, TimeGrid
from .errors import ChiDegenerate, DenominatorSingularity, EquatorSingularity
from .fields import SampledField, SymbolicField
from .propagate import BlochTrajectory
from .quadrature import grid_derivative

EPS_PLANE = 1e-9
EPS_LAMBDA = 1e-12

GaugeProgram = Callable[[np.ndarray], np.ndarray]


def constant_gauge(c: float) -> GaugeProgram:
    c = float(c)
    return lambda t: np.full_like(np.asarray(t, dtype=float), c)


def derivative_gauge(p: AngleProgram, scale: float = 1.0) -> GaugeProgram:
    """Gauge ``scale * dp/dt``."""
    return lambda t: scale * p.derivative(np.asarray(t, dtype=float))


def _eval_gauge(gauge, t):
    return np.broadcast_to(np.asarray(gauge(t), dtype=float), np.shape(t))


def pointwise_inverse(traj: BlochTrajectory, gauge: GaugeProgram) -> SampledField:
    """Field on the trajectory's nodes reproducing ``traj`` for the chosen ``b3``.

    ``b1 = (b3 n1 + n2') / n3`` and ``b2 = (b3 n2 - n1') / n3`` with the time
    derivative taken by central differences on the grid.

    Raises
    ------
    EquatorSingularity
        At the first node where ``|n3| <= 1e-9``.
    """
    t = traj.times
    n = traj.vectors
    small = np.abs(n[:, 2]) <= EPS_PLANE
    if small.any():
        raise EquatorSingularity(t[np.argmax(small)], "n3 vanishes")
    dn = grid_derivative(n, traj.grid.dt)
    b3 = _eval_gauge(gauge, t)
    b1 = (b3 * n[:, 0] + dn[:, 1]) / n[:, 2]
    b2 = (b3 * n[:, 1] - dn[:, 0]) / n[:, 2]
    return SampledField(t, np.stack([b1, b2, b3], axis=-1))


def single_axis_field(theta0: float, phi0: float, delta: AngleProgram,
                      gauge: GaugeProgram | None = None) -> SymbolicField:
    """Fields turning ``n`` about ``k`` by ``delta(t)`` from colatitude ``theta0``.

    ``gauge=None`` selects ``b3 = -delta'``, for which the field reduces to
    ``-delta'(t) k`` and no longer depends on ``theta0`` or ``phi0``.
    """
    if gauge is None:
        return SymbolicField(bz=lambda t: -delta.derivative(np.asarray(t, dtype=float)),
                             label="single-axis(invariant)")
    if abs(math.cos(theta0)) <= EPS_PLANE:
        raise EquatorSingularity(0.0, "tan(theta0) is unbounded")
    tan0 = math.tan(theta0)

    def amp(t):
        t = np.asarray(t, dtype=float)
        return tan0 * (_eval_gauge(gauge, t) + delta.derivative(t))

    return SymbolicField(
        lambda t: amp(t) * np.cos(phi0 + delta(np.asarray(t, dtype=float))),
        lambda t: amp(t) * np.sin(phi0 + delta(np.asarray(t, dtype=float))),
        lambda t: _eval_gauge(gauge, np.asarray(t, dtype=float)),
        label="single-axis",
    )


def _n_functions(prog: RotationProgram, n0, t):
    lam, s = prog.lam, prog.sin_chi
    x0, y0, z0 = n0
    a = prog.alpha(t)
    ca, sa = np.cos(a), np.sin(a)
    n1 = -lam * sa * x0 + ca * y0 + s * sa * z0
    n2 = lam * ca * x0 + sa * y0 - s * ca * z0
    n3 = s * x0 + lam * z0
    return n1, n2, n3


def two_axis_field_general(prog: RotationProgram, n0: BlochVector, gauge: GaugeProgram,
                           grid: TimeGrid | None = None) -> SymbolicField:
    """Field inducing ``n(t) = R(t) n0`` for an arbitrary gauge ``b3``.

    The denominator ``lambda N3 - sqrt(1 - lambda^2) N2(t)`` is checked at
    ``t = 0``, on every node of ``grid`` if one is given, and again whenever
    the returned field is evaluated.
    """
    v = n0.v if isinstance(n0, BlochVector) else np.asarray(n0, dtype=float)
    lam, s = prog.lam, prog.sin_chi

    def parts(t):
        t = np.asarray(t, dtype=float)
        big1, big2, big3 = _n_functions(prog, v, t)
        den = -s * big2 + lam * big3
        bad = np.abs(den) <= EPS_PLANE
        if np.any(bad):
            raise DenominatorSingularity(np.ravel(t)[np.argmax(np.ravel(bad))] if np.ndim(t) else t,
                                         "two-axis inverse denominator vanishes")
        da, db = prog.alpha.derivative(t), prog.beta.derivative(t)
        g = _eval_gauge(gauge, t) + db
        p = lam * da - g
        q = g * (lam * big2 + s * big3) - da * big2
        beta = prog.beta(t)
        cb, sb = np.cos(beta), np.sin(beta)
        b1 = (sb * p * big1 + cb * q) / den
        b2 = (-cb * p * big1 + sb * q) / den
        return b1, b2

    parts(np.array([0.0]))
    if grid is not None:
        parts(grid.times)
    return SymbolicField(
        lambda t: parts(t)[0],
        lambda t: parts(t)[1],
        lambda t: _eval_gauge(gauge, np.asarray(t, dtype=float)),
        label="two-axis(general)",
    )


def invariant_gauge(prog: RotationProgram) -> GaugeProgram:
    """The gauge ``b3 = lambda alpha' - beta'`` that decouples the field from ``n0``."""
    lam = prog.lam
    return lambda t: lam * prog.alpha.derivative(np.asarray(t, dtype=float)) \
        - prog.beta.derivative(np.asarray(t, dtype=float))


def two_axis_field_invariant(prog: RotationProgram) -> SymbolicField:
    """``b = alpha' sin(chi) [cos beta, sin beta, 0] + (lambda alpha' - beta') k``."""
    s = prog.sin_chi

    def transverse(t):
        return s * prog.alpha.derivative(np.asarray(t, dtype=float))

    return SymbolicField(
        lambda t: transverse(t) * np.cos(prog.beta(np.asarray(t, dtype=float))),
        lambda t: transverse(t) * np.sin(prog.beta(np.asarray(t, dtype=float))),
        invariant_gauge(prog),
        label="two-axis(invariant)",
    )


def constant_b3_field(b0: float, beta: AngleProgram, chi: float):
    """Field with constant third component ``b0`` realizing the program ``beta``.

    Returns ``(field, alpha)`` where ``alpha = (b0 t + beta) / cos(chi)``.
    The transverse part rotates with ``beta`` and has amplitude
    ``|b0 + beta'| sqrt(1/lambda^2 - 1)``.

    Raises
    ------
    ChiDegenerate
        If ``cos(chi)`` vanishes.
    """
    lam = math.cos(chi)
    if abs(lam) <= EPS_LAMBDA:
        raise ChiDegenerate(chi)
    s = math.sin(chi)
    b0 = float(b0)
    alpha = (AngleProgram.linear(b0) + beta).scaled(1.0 / lam).simplified()

    def transverse(t):
        return s / lam * (b0 + beta.derivative(np.asarray(t, dtype=float)))

    field = SymbolicField(
        lambda t: transverse(t) * np.cos(beta(np.asarray(t, dtype=float))),
        lambda t: transverse(t) * np.sin(beta(np.asarray(t, dtype=float))),
        lambda t: np.full_like(np.asarray(t, dtype=float), b0),
        label="constant-b3",
    )
    return field, alpha


def constant_b3_field_from_alpha(b0: float, alpha: AngleProgram, chi: float):
    """Constant-``b3`` family parametrized by ``alpha``; also valid at ``cos(chi) = 0``.

    Returns ``(field, beta)`` with ``beta = lambda alpha - b0 t``.
    """
    lam = math.cos(chi)
    beta = (alpha.scaled(lam) - AngleProgram.linear(b0)).simplified()
    return two_axis_field_invariant(RotationProgram(chi, alpha, beta)), beta
