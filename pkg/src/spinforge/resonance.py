"""Transition probabilities |+> -> |-> for the rotating-field resonance models.

Both models start from ``n(0) = k`` (the state ``|+>``).  In the frame
rotating with the transverse field the spin sees a constant effective field
``alpha0 (sqrt(1 - lambda^2) i + lambda k)`` and precesses about it, which
is why only ``lambda = 0`` lets it reach ``-k``:

>>> import math
>>> from spinforge.resonance import UniformModel, transition_probability
>>> m = UniformModel(alpha0=2.0, beta0=7.0, chi=math.pi / 2)
>>> round(float(transition_probability(m, math.pi / 2)), 12)
1.0
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import AngleProgram, RotationProgram
from .errors import ChiDegenerate, NotMaximalResonance
from .propagate import BlochTrajectory
from .synthesize import EPS_LAMBDA, constant_b3_field, constant_b3_field_from_alpha, \
    two_axis_field_invariant


@dataclass(frozen=True)
class UniformModel:
    """Circularly polarized field: uniform rotations ``alpha = alpha0 t``, ``beta = beta0 t``."""

    alpha0: float
    beta0: float
    chi: float

    @property
    def lam(self) -> float:
        return math.cos(self.chi)

    @property
    def program(self) -> RotationProgram:
        return RotationProgram(self.chi, AngleProgram.linear(self.alpha0),
                               AngleProgram.linear(self.beta0))

    @property
    def alpha(self) -> AngleProgram:
        return AngleProgram.linear(self.alpha0)

    def field(self):
        return two_axis_field_invariant(self.program)


@dataclass(frozen=True)
class ConstantB3Model:
    """Field with constant ``b3 = b0`` and transverse part rotating with ``beta``.

    Build it from ``beta`` (needs ``cos(chi) != 0``) or, via
    :meth:`from_alpha`, from the rotation ``alpha`` about ``e_chi``, which
    stays meaningful at ``cos(chi) = 0``.
    """

    b0: float
    beta: AngleProgram
    chi: float
    alpha_program: AngleProgram | None = None

    def __post_init__(self):
        if self.alpha_program is None and abs(math.cos(self.chi)) <= EPS_LAMBDA:
            raise ChiDegenerate(self.chi)

    @classmethod
    def from_alpha(cls, b0: float, alpha: AngleProgram, chi: float) -> "ConstantB3Model":
        _, beta = constant_b3_field_from_alpha(b0, alpha, chi)
        return cls(b0, beta, chi, alpha)

    @property
    def lam(self) -> float:
        return math.cos(self.chi)

    @property
    def alpha(self) -> AngleProgram:
        if self.alpha_program is not None:
            return self.alpha_program
        return constant_b3_field(self.b0, self.beta, self.chi)[1]

    @property
    def program(self) -> RotationProgram:
        return RotationProgram(self.chi, self.alpha, self.beta)

    def field(self):
        if self.alpha_program is not None:
            return constant_b3_field_from_alpha(self.b0, self.alpha_program, self.chi)[0]
        return constant_b3_field(self.b0, self.beta, self.chi)[0]


ResonanceModel = UniformModel | ConstantB3Model


def transition_probability(model: ResonanceModel, t):
    """Closed form ``(1 - lambda^2)(1 - cos alpha(t)) / 2``; ``t`` may be an array."""
    lam = model.lam
    return (1.0 - lam * lam) * (1.0 - np.cos(model.alpha(t))) / 2.0


def probability_from_trajectory(traj: BlochTrajectory, t_index) -> float:
    """``(1 - n3) / 2`` at a node, clamped into [0, 1]."""
    n3 = traj.vectors[t_index, 2]
    return np.clip((1.0 - n3) / 2.0, 0.0, 1.0)


def resonance_times(model: UniformModel, n_max: int) -> list[float]:
    """Times ``(2n + 1) pi / alpha0`` of complete transfer, ``n = 0..n_max``.

    Raises
    ------
    NotMaximalResonance
        If ``lambda != 0``: the probability never reaches 1.
    """
    if model.alpha0 == 0:
        raise ValueError("alpha0 must be non-zero")
    if abs(model.lam) > EPS_LAMBDA:
        raise NotMaximalResonance(
            f"lambda={model.lam!r}: maximum probability is {1 - model.lam ** 2!r} < 1")
    return [(2 * n + 1) * math.pi / abs(model.alpha0) for n in range(n_max + 1)]
