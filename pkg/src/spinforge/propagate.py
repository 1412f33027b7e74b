"""Forward integration of the Bloch and spinor equations.

Both equations are linear in the state, ``y' = A(t) y``, so one classical
RK4 step is the matrix polynomial

    M = I + h/6 (A0 + 4 Am + A1) + h^2/6 (Am A0 + Am^2 + A1 Am)
          + h^3/12 (Am^2 A0 + A1 Am^2) + h^4/24 A1 Am^2 A0

with ``A0, Am, A1`` the generator at the start, midpoint and end of the
step.  All step matrices are built at once; the sequential part is only
the product chain with the renormalization after each step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import BlochVector, Spinor, TimeGrid, cross_matrix, spin_generator
from .errors import NonFiniteField

DEFAULT_STEPS = 20_000


@dataclass(frozen=True, eq=False)
class BlochTrajectory:
    """Bloch vectors at every node of ``grid``; ``vectors`` has shape (steps + 1, 3)."""

    grid: TimeGrid
    vectors: np.ndarray

    def __post_init__(self):
        v = np.array(self.vectors, dtype=float)
        if v.shape != (self.grid.steps + 1, 3):
            raise ValueError(f"expected {self.grid.steps + 1} samples of 3 components, got {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    @property
    def samples(self) -> list[BlochVector]:
        return [BlochVector(v) for v in self.vectors]

    def __len__(self):
        return len(self.vectors)

    def __getitem__(self, i) -> BlochVector:
        return BlochVector(self.vectors[i])

    def reversed(self) -> "BlochTrajectory":
        """Same curve traversed backwards in time."""
        return BlochTrajectory(self.grid, self.vectors[::-1])


@dataclass(frozen=True, eq=False)
class PropagatorTrajectory:
    grid: TimeGrid
    matrices: np.ndarray

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    @property
    def final(self) -> np.ndarray:
        return self.matrices[-1]


def _substeps(field, grid: TimeGrid) -> int:
    limit = getattr(field, "max_step", math.inf)
    if not math.isfinite(limit):
        return 1
    return max(1, math.ceil(grid.dt / limit * (1 - 1e-12)))


def _field_nodes(field, grid: TimeGrid, sub: int):
    """Field at the start, midpoint and end of every fine step."""
    n = grid.steps * sub
    t = np.linspace(0.0, grid.tau, n + 1)
    tm = 0.5 * (t[:-1] + t[1:])
    b_nodes = np.asarray(field(t), dtype=float)
    b_mid = np.asarray(field(tm), dtype=float)
    for ts, bs in ((t, b_nodes), (tm, b_mid)):
        bad = ~np.all(np.isfinite(bs), axis=-1)
        if bad.any():
            raise NonFiniteField(ts[np.argmax(bad)])
    return b_nodes[:-1], b_mid, b_nodes[1:], grid.tau / n


def _rk4_step_matrices(a0, am, a1, h):
    am_a0 = am @ a0
    am2 = am @ am
    a1_am = a1 @ am
    am2_a0 = am @ am_a0
    a1_am2 = a1 @ am2
    eye = np.eye(a0.shape[-1], dtype=a0.dtype)
    return (eye + h / 6 * (a0 + 4 * am + a1)
            + h * h / 6 * (am_a0 + am2 + a1_am)
            + h ** 3 / 12 * (am2_a0 + a1_am2)
            + h ** 4 / 24 * (a1_am2 @ a0))


def _step_matrices(field, grid: TimeGrid, generator):
    sub = _substeps(field, grid)
    b0, bm, b1, h = _field_nodes(field, grid, sub)
    steps = _rk4_step_matrices(generator(b0), generator(bm), generator(b1), h)
    if sub > 1:
        # fold the fine steps of each output interval into one transfer matrix
        steps = steps.reshape(grid.steps, sub, *steps.shape[1:])
        folded = steps[:, 0]
        for k in range(1, sub):
            folded = steps[:, k] @ folded
        steps = folded
    return steps


def integrate_bloch_many(field, n0s, grid: TimeGrid) -> np.ndarray:
    """Integrate several initial vectors at once; returns shape (steps + 1, k, 3).

    Each vector is renormalized to unit length after every step.
    """
    n0s = np.atleast_2d(np.asarray(n0s, dtype=float))
    steps = _step_matrices(field, grid, cross_matrix)
    out = np.empty((grid.steps + 1,) + n0s.shape)
    y = n0s.T.copy()
    out[0] = n0s
    for k in range(grid.steps):
        y = steps[k] @ y
        y /= np.sqrt(np.einsum("ij,ij->j", y, y))
        out[k + 1] = y.T
    return out


def integrate_bloch(field, n0: BlochVector, grid: TimeGrid) -> BlochTrajectory:
    """RK4 solution of ``dn/dt = -b(t) x n`` sampled on ``grid``."""
    if not isinstance(n0, BlochVector):
        n0 = BlochVector(n0)
    vecs = integrate_bloch_many(field, n0.v[None, :], grid)[:, 0, :]
    vecs[0] = n0.v
    return BlochTrajectory(grid, vecs)


def _project_su2(u: np.ndarray) -> np.ndarray:
    # nearest SU(2) matrix: quaternion part of u, rescaled to unit norm
    a = 0.5 * (u[0, 0] + u[1, 1].conjugate())
    b = 0.5 * (u[1, 0] - u[0, 1].conjugate())
    norm = math.sqrt(a.real ** 2 + a.imag ** 2 + b.real ** 2 + b.imag ** 2)
    a, b = a / norm, b / norm
    return np.array([[a, -b.conjugate()], [b, a.conjugate()]])


def integrate_propagator(field, grid: TimeGrid) -> PropagatorTrajectory:
    """RK4 solution of ``dU/dt = (i/2)(b . sigma) U`` from ``U(0) = I``.

    After each step the matrix is projected back onto SU(2).
    """
    steps = _step_matrices(field, grid, spin_generator)
    out = np.empty((grid.steps + 1, 2, 2), dtype=complex)
    u = np.eye(2, dtype=complex)
    out[0] = u
    for k in range(grid.steps):
        u = _project_su2(steps[k] @ u)
        out[k + 1] = u
    return PropagatorTrajectory(grid, out)


def integrate_spinor(field, psi0: Spinor, grid: TimeGrid) -> list[Spinor]:
    return [Spinor.from_array(a) for a in spinor_amplitudes(field, psi0, grid)]


def spinor_amplitudes(field, psi0: Spinor, grid: TimeGrid) -> np.ndarray:
    """Array form of :func:`integrate_spinor`, shape (steps + 1, 2)."""
    props = integrate_propagator(field, grid)
    return props.matrices @ psi0.array
