"""Driving-field programs ``b(t)``.

A field is any object with ``__call__(t) -> ndarray`` returning shape
``t.shape + (3,)``.  Two concrete forms exist: closed-form component
functions and node samples with linear interpolation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

ComponentFn = Callable[[np.ndarray], np.ndarray]


def _zero(t):
    return np.zeros_like(np.asarray(t, dtype=float))


@dataclass(frozen=True)
class SymbolicField:
    """Field given by three vectorized closed-form component functions."""

    bx: ComponentFn = _zero
    by: ComponentFn = _zero
    bz: ComponentFn = _zero
    label: str = ""

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        comps = [np.broadcast_to(np.asarray(f(t), dtype=float), t.shape) for f in (self.bx, self.by, self.bz)]
        return np.stack(comps, axis=-1)

    max_step = np.inf


def constant_field(b) -> SymbolicField:
    bx, by, bz = (float(c) for c in b)
    return SymbolicField(
        lambda t: np.full_like(t, bx),
        lambda t: np.full_like(t, by),
        lambda t: np.full_like(t, bz),
        label=f"constant({bx!r}, {by!r}, {bz!r})",
    )


ZERO_FIELD = constant_field((0.0, 0.0, 0.0))


@dataclass(frozen=True, eq=False)
class SampledField:
    """Field known at strictly increasing nodes, linearly interpolated.

    Outside ``[times[0], times[-1]]`` the end values are held.
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.array(self.times, dtype=float)
        values = np.array(self.values, dtype=float)
        if times.ndim != 1 or times.size < 2:
            raise ValueError("sampled field needs at least two nodes")
        if values.shape != (times.size, 3):
            raise ValueError(f"values must have shape ({times.size}, 3), got {values.shape}")
        if not np.all(np.diff(times) > 0):
            raise ValueError("sample times must be strictly increasing")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(values))):
            raise ValueError("sampled field contains non-finite entries")
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        flat = t.reshape(-1)
        out = np.stack([np.interp(flat, self.times, self.values[:, k]) for k in range(3)], axis=-1)
        return out.reshape(t.shape + (3,))

    @property
    def max_step(self) -> float:
        """Largest integrator step allowed: the finest sample spacing."""
        return float(np.min(np.diff(self.times)))


FieldProgram = SymbolicField | SampledField
