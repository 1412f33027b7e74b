import math

import numpy as np
import pytest

from helpers import B0, CHI, LAM, LOOP_A, LOOP_B, random_program, random_unit, sine_loop_beta
from spinforge.core import AngleProgram, BlochVector, RotationProgram, TimeGrid, rotate_vectors
from spinforge.errors import ChiDegenerate, DenominatorSingularity, EquatorSingularity
from spinforge.propagate import BlochTrajectory, integrate_bloch, integrate_bloch_many
from spinforge.synthesize import (constant_b3_field, constant_b3_field_from_alpha, constant_gauge,
                                  derivative_gauge, invariant_gauge, pointwise_inverse,
                                  single_axis_field, two_axis_field_general,
                                  two_axis_field_invariant)

GRID = TimeGrid(2 * math.pi, 20_000)


def cone_trajectory(theta0, phi0, delta, grid=GRID):
    t = grid.times
    d = delta(t)
    return BlochTrajectory(grid, np.stack([
        np.sin(theta0) * np.cos(phi0 + d), np.sin(theta0) * np.sin(phi0 + d),
        np.full_like(t, np.cos(theta0))], axis=-1))


class TestPointwiseInverse:
    def test_recovers_axial_field(self):
        w = 1.3
        traj = cone_trajectory(0.7, 0.2, AngleProgram.linear(w))
        field = pointwise_inverse(traj, constant_gauge(-w))
        np.testing.assert_allclose(field.values, np.tile([0, 0, -w], (len(traj), 1)), atol=2e-4)

    def test_static_pole(self):
        traj = BlochTrajectory(TimeGrid(1.0, 10), np.tile([0.0, 0.0, 1.0], (11, 1)))
        field = pointwise_inverse(traj, constant_gauge(0.0))
        assert np.array_equal(field.values, np.zeros((11, 3)))

    def test_equator_node(self):
        v = np.tile([0.0, 0.0, 1.0], (11, 1))
        v[4] = [1.0, 0.0, 0.0]
        with pytest.raises(EquatorSingularity) as info:
            pointwise_inverse(BlochTrajectory(TimeGrid(1.0, 10), v), constant_gauge(0.0))
        assert info.value.t == pytest.approx(0.4)

    def test_gauge_covariance(self):
        # b1, b2 shift by b3 * (n1, n2) / n3; the induced motion is unchanged
        traj = integrate_bloch(two_axis_field_invariant(
            RotationProgram(0.5, AngleProgram.linear(2.0), AngleProgram.sinusoid(0.4, 1.5))),
            BlochVector.from_angles(0.4), GRID)
        base = pointwise_inverse(traj, constant_gauge(0.0))
        shifted = pointwise_inverse(traj, constant_gauge(1.7))
        n = traj.vectors
        np.testing.assert_allclose(shifted.values[:, :2] - base.values[:, :2],
                                   1.7 * n[:, :2] / n[:, 2:3], atol=1e-12)
        again = integrate_bloch(shifted, BlochVector(n[0]), GRID)
        np.testing.assert_allclose(again.vectors, n, atol=1e-5)

    def test_inverse_of_forward(self):
        rng = np.random.default_rng(21)
        for _ in range(5):
            prog = RotationProgram(rng.uniform(0, math.pi), random_program(rng),
                                   random_program(rng))
            field = two_axis_field_invariant(prog)
            traj = integrate_bloch(field, BlochVector(random_unit(rng)), GRID)
            rebuilt = pointwise_inverse(traj, lambda t: field(t)[..., 2])
            ok = np.abs(traj.vectors[:, 2]) > 0.1
            np.testing.assert_allclose(rebuilt.values[ok, :2], field(GRID.times)[ok, :2], atol=5e-4)


class TestSingleAxis:
    def test_invariant_gauge_is_axial(self):
        delta = AngleProgram((AngleProgram.linear(1.1).terms[0], AngleProgram.sinusoid(0.3, 2).terms[0]))
        f = single_axis_field(0.9, 0.3, delta)
        t = GRID.times
        expected = np.stack([np.zeros_like(t), np.zeros_like(t), -delta.derivative(t)], axis=-1)
        assert np.array_equal(f(t), expected)
        explicit = single_axis_field(0.9, 0.3, delta, derivative_gauge(delta, -1.0))
        assert np.array_equal(explicit(t), expected)

    def test_constant_rate_recovers_constant_field(self):
        f = single_axis_field(1.2, 0.0, AngleProgram.linear(2.5))
        np.testing.assert_allclose(f(GRID.times), np.tile([0, 0, -2.5], (len(GRID.times), 1)))

    def test_zero_gauge_round_trip(self):
        w, th = 1.5, math.pi / 4
        f = single_axis_field(th, 0.0, AngleProgram.linear(w), constant_gauge(0.0))
        t = GRID.times
        np.testing.assert_allclose(f(t), np.stack(
            [w * math.tan(th) * np.cos(w * t), w * math.tan(th) * np.sin(w * t), 0 * t], axis=-1),
            atol=1e-12)
        traj = integrate_bloch(f, BlochVector.from_angles(th), GRID)
        np.testing.assert_allclose(traj.vectors, cone_trajectory(th, 0.0, AngleProgram.linear(w)).vectors,
                                   atol=1e-5)

    def test_equatorial_start_needs_invariant_gauge(self):
        with pytest.raises(EquatorSingularity):
            single_axis_field(math.pi / 2, 0.0, AngleProgram.linear(1.0), constant_gauge(0.0))


class TestTwoAxis:
    prog = RotationProgram(0.8, AngleProgram((AngleProgram.linear(2.0).terms[0],
                                              AngleProgram.sinusoid(0.5, 3.0).terms[0])),
                           AngleProgram.quadratic(0.3))

    def test_invariant_gauge_reduces_to_invariant_field(self):
        t = GRID.times
        target = two_axis_field_invariant(self.prog)(t)
        rng = np.random.default_rng(4)
        for n0 in random_unit(rng, 10):
            if abs(n0[2]) < 0.05:
                continue
            f = two_axis_field_general(self.prog, BlochVector(n0), invariant_gauge(self.prog))
            np.testing.assert_allclose(f(t), target, atol=1e-12)

    def test_matches_pointwise_inverse(self):
        n0 = BlochVector.from_angles(0.5, 0.3)
        gauge = derivative_gauge(AngleProgram.sinusoid(1.0, 1.0))
        general = two_axis_field_general(self.prog, n0, gauge, grid=GRID)
        traj = BlochTrajectory(GRID, rotate_vectors(self.prog, GRID.times, n0))
        if np.min(np.abs(traj.vectors[:, 2])) < 0.05:
            pytest.skip("trajectory too close to the equator")
        np.testing.assert_allclose(general(GRID.times), pointwise_inverse(traj, gauge).values,
                                   atol=2e-4)

    def test_denominator_at_origin(self):
        with pytest.raises(DenominatorSingularity) as info:
            two_axis_field_general(self.prog, BlochVector([1.0, 0.0, 0.0]), constant_gauge(0.0))
        assert info.value.t == 0.0

    def test_uniform_rotations_give_rotating_field(self):
        a0, b0 = 5.0, 1.5
        prog = RotationProgram(CHI, AngleProgram.linear(a0), AngleProgram.linear(b0))
        t = GRID.times
        expected = np.stack([a0 * 0.6 * np.cos(b0 * t), a0 * 0.6 * np.sin(b0 * t),
                             np.full_like(t, LAM * a0 - b0)], axis=-1)
        np.testing.assert_allclose(two_axis_field_invariant(prog)(t), expected, atol=1e-13)

    def test_aligned_axes(self):
        alpha, beta = AngleProgram.sinusoid(1.0, 2.0), AngleProgram.linear(0.7)
        f = two_axis_field_invariant(RotationProgram(0.0, alpha, beta))
        t = GRID.times
        np.testing.assert_allclose(f(t)[:, 2], alpha.derivative(t) - beta.derivative(t), atol=1e-14)
        np.testing.assert_allclose(f(t)[:, :2], 0.0, atol=1e-14)

    def test_no_alpha(self):
        beta = AngleProgram.quadratic(0.2)
        f = two_axis_field_invariant(RotationProgram(1.0, AngleProgram(), beta))
        t = GRID.times
        np.testing.assert_allclose(f(t), np.stack([0 * t, 0 * t, -beta.derivative(t)], axis=-1))

    def test_forward_reproduces_rotation(self):
        rng = np.random.default_rng(8)
        for _ in range(4):
            prog = RotationProgram(rng.uniform(0, math.pi), random_program(rng), random_program(rng))
            n0s = random_unit(rng, 5)
            got = integrate_bloch_many(two_axis_field_invariant(prog), n0s, GRID)
            for k in range(5):
                np.testing.assert_allclose(got[:, k], rotate_vectors(prog, GRID.times, n0s[k]),
                                           atol=1e-5)


class TestConstantB3:
    def test_loop_programs(self):
        beta = sine_loop_beta(**LOOP_A)
        field, alpha = constant_b3_field(B0, beta, CHI)
        t = GRID.times
        np.testing.assert_allclose(alpha(t), 0.7 * np.sin(5 * t) + 5 * t, atol=1e-12)
        assert alpha(2 * math.pi) == pytest.approx(10 * math.pi, abs=1e-12)
        assert beta(2 * math.pi) == pytest.approx(2 * math.pi, abs=1e-12)
        np.testing.assert_allclose(field(t)[:, 2], B0)

    def test_transverse_amplitude(self):
        beta = sine_loop_beta(**LOOP_B)
        field, _ = constant_b3_field(B0, beta, CHI)
        t = GRID.times
        amp = np.hypot(field(t)[:, 0], field(t)[:, 1])
        np.testing.assert_allclose(amp, np.abs(B0 + beta.derivative(t)) * math.sqrt(1 / LAM ** 2 - 1),
                                   atol=1e-12)

    def test_agrees_with_invariant_field(self):
        beta = sine_loop_beta(**LOOP_B)
        field, alpha = constant_b3_field(B0, beta, CHI)
        np.testing.assert_allclose(field(GRID.times),
                                   two_axis_field_invariant(RotationProgram(CHI, alpha, beta))(GRID.times),
                                   atol=1e-12)

    def test_cancelled_transverse_part(self):
        field, alpha = constant_b3_field(B0, AngleProgram.linear(-B0), CHI)
        np.testing.assert_allclose(field(GRID.times), np.tile([0, 0, B0], (len(GRID.times), 1)),
                                   atol=1e-15)
        assert alpha.terms == ()

    def test_orthogonal_axes_rejected(self):
        with pytest.raises(ChiDegenerate):
            constant_b3_field(B0, AngleProgram.linear(1.0), math.pi / 2)

    def test_alpha_parametrization(self):
        alpha = AngleProgram.quadratic(5 / (2 * math.pi))
        field, beta = constant_b3_field_from_alpha(B0, alpha, CHI)
        assert alpha(2 * math.pi) == pytest.approx(10 * math.pi, abs=1e-9)
        assert beta(2 * math.pi) == pytest.approx(2 * math.pi, abs=1e-9)
        np.testing.assert_allclose(field(GRID.times)[:, 2], B0, atol=1e-12)
        # orthogonal axes are fine in this parametrization
        f0, b0prog = constant_b3_field_from_alpha(B0, alpha, math.pi / 2)
        np.testing.assert_allclose(b0prog(GRID.times), -B0 * GRID.times, atol=1e-12)
