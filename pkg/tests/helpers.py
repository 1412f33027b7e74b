"""Shared scenario builders for the test suite."""

import math

import numpy as np

from spinforge.core import AngleProgram, BlochVector, Linear, Quadratic, RotationProgram, Sinusoid
from spinforge.synthesize import constant_b3_field, constant_b3_field_from_alpha

LAM = 4 / 5
B0 = 3.0
CHI = math.acos(LAM)
TAU = 2 * math.pi
N0_LOOP = BlochVector([math.sqrt(3) / 2, 0.0, 0.5])
THETA_LOOP = math.pi / 3


def sine_loop_beta(a, alpha1, alpha0, lam=LAM, b0=B0):
    """beta(t) = a lam sin(alpha0 t) + (lam alpha1 - b0) t."""
    return AngleProgram((Sinusoid(a * lam, alpha0), Linear(lam * alpha1 - b0)))


LOOP_A = dict(a=0.7, alpha1=5.0, alpha0=5.0)
LOOP_B = dict(a=1.0, alpha1=5 - 1 / (2 * math.pi), alpha0=9 / 4)


def sine_loop_case(params):
    """(field, rotation program) for one of the two sinusoidal loop scenarios."""
    beta = sine_loop_beta(**params)
    field, alpha = constant_b3_field(B0, beta, CHI)
    return field, RotationProgram(CHI, alpha, beta)


def fresnel_case():
    alpha = AngleProgram.quadratic(5 / (2 * math.pi))
    field, beta = constant_b3_field_from_alpha(B0, alpha, CHI)
    return field, RotationProgram(CHI, alpha, beta)


def random_program(rng, lin=5.0, quad=0.5, amp=1.0, freq=4.0):
    terms = [Linear(rng.uniform(-lin, lin)), Quadratic(rng.uniform(-quad, quad)),
             Sinusoid(rng.uniform(-amp, amp), rng.uniform(0.3, freq))]
    return AngleProgram(tuple(terms))


def random_unit(rng, size=None):
    v = rng.normal(size=(3,) if size is None else (size, 3))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)
