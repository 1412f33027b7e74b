"""Spin-1/2 state types, SU(2)/SO(3) helpers and symbolic angle programs.

Units: hbar = 1 and the magnetic moment is absorbed into the field, so every
field is an angular frequency ``b = mu * B``.  The Hamiltonian is
``H = -(1/2) b . sigma``; with this sign the Bloch vector obeys
``dn/dt = -b x n``.

Rotations ``rot_y`` / ``rot_z`` are right-handed active rotations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidState

NORM_TOL = 1e-9

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])
IDENTITY2 = np.eye(2, dtype=complex)


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class BlochVector:
    """Unit vector on the sphere; the projective image of a spinor."""

    v: np.ndarray

    def __post_init__(self):
        v = _frozen(self.v)
        if v.shape != (3,) or not np.all(np.isfinite(v)):
            raise InvalidState(f"Bloch vector must be 3 finite reals, got {self.v!r}")
        if abs(np.linalg.norm(v) - 1.0) > NORM_TOL:
            raise InvalidState(f"Bloch vector not unit length: |v| = {np.linalg.norm(v)!r}")
        object.__setattr__(self, "v", v)

    @classmethod
    def from_angles(cls, theta: float, phi: float = 0.0) -> "BlochVector":
        st = math.sin(theta)
        return cls(np.array([st * math.cos(phi), st * math.sin(phi), math.cos(theta)]))

    def __iter__(self):
        return iter(self.v)

    def __repr__(self):
        return f"BlochVector({self.v.tolist()})"


@dataclass(frozen=True)
class Spinor:
    """Normalized spin-1/2 state ``up |+> + down |->``."""

    up: complex
    down: complex

    def __post_init__(self):
        up, down = complex(self.up), complex(self.down)
        norm2 = abs(up) ** 2 + abs(down) ** 2
        if not math.isfinite(norm2) or abs(norm2 - 1.0) > NORM_TOL:
            raise InvalidState(f"spinor not normalized: |psi|^2 = {norm2!r}")
        object.__setattr__(self, "up", up)
        object.__setattr__(self, "down", down)

    @classmethod
    def from_array(cls, a) -> "Spinor":
        return cls(complex(a[0]), complex(a[1]))

    @classmethod
    def from_bloch(cls, n: BlochVector | Sequence[float]) -> "Spinor":
        """Spinor with zero phase on the up component mapping onto ``n``."""
        v = n.v if isinstance(n, BlochVector) else np.asarray(n, dtype=float)
        theta = math.acos(max(-1.0, min(1.0, v[2])))
        phi = math.atan2(v[1], v[0])
        return cls(math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2))

    @property
    def array(self) -> np.ndarray:
        return np.array([self.up, self.down], dtype=complex)


UP = Spinor(1.0, 0.0)
DOWN = Spinor(0.0, 1.0)


def bloch_components(psi) -> np.ndarray:
    """Vectorized ``<psi|sigma|psi>`` for spinor arrays of shape (..., 2)."""
    psi = np.asarray(psi)
    a, b = psi[..., 0], psi[..., 1]
    ab = np.conj(a) * b
    return np.stack([2 * ab.real, 2 * ab.imag, abs(a) ** 2 - abs(b) ** 2], axis=-1)


def bloch_from_spinor(psi: Spinor) -> BlochVector:
    """Project a spinor onto the Bloch sphere, ``n = <psi|sigma|psi>``."""
    n = bloch_components(psi.array)
    return BlochVector(n / np.linalg.norm(n))


# --- SU(2) / SO(3) ---------------------------------------------------------

def is_su2(u, tol: float = NORM_TOL) -> bool:
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        return False
    return (np.max(np.abs(u.conj().T @ u - IDENTITY2)) <= tol
            and abs(abs(np.linalg.det(u)) - 1.0) <= tol)


def is_so3(r, tol: float = NORM_TOL) -> bool:
    r = np.asarray(r, dtype=float)
    if r.shape != (3, 3):
        return False
    return np.max(np.abs(r.T @ r - np.eye(3))) <= tol and abs(np.linalg.det(r) - 1.0) <= tol


def rot_y(w: float) -> np.ndarray:
    c, s = math.cos(w), math.sin(w)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(w: float) -> np.ndarray:
    c, s = math.cos(w), math.sin(w)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def su2_to_so3(u) -> np.ndarray:
    """Adjoint map: the rotation ``R`` with ``U (n.sigma) U^dag = (R n).sigma``."""
    u = np.asarray(u, dtype=complex)
    conj = np.einsum("ij,ajk,lk->ail", u, PAULI, u.conj())
    return 0.5 * np.einsum("bij,aji->ba", PAULI, conj).real


def cross_matrix(b) -> np.ndarray:
    """Generator ``A`` with ``A n = -b x n`` for field arrays of shape (..., 3)."""
    b = np.asarray(b, dtype=float)
    a = np.zeros(b.shape[:-1] + (3, 3))
    bx, by, bz = b[..., 0], b[..., 1], b[..., 2]
    a[..., 0, 1], a[..., 0, 2] = bz, -by
    a[..., 1, 0], a[..., 1, 2] = -bz, bx
    a[..., 2, 0], a[..., 2, 1] = by, -bx
    return a


def spin_generator(b) -> np.ndarray:
    """Generator ``G = (i/2) b.sigma`` of ``dU/dt = G U`` for fields (..., 3)."""
    b = np.asarray(b, dtype=float)
    return 0.5j * np.einsum("...k,kij->...ij", b, PAULI)


# --- angle programs --------------------------------------------------------

@dataclass(frozen=True)
class Linear:
    c: float

    def value(self, t):
        return self.c * t

    def derivative(self, t):
        return self.c * np.ones_like(t) if isinstance(t, np.ndarray) else self.c


@dataclass(frozen=True)
class Quadratic:
    c: float

    def value(self, t):
        return self.c * t * t

    def derivative(self, t):
        return 2.0 * self.c * t


@dataclass(frozen=True)
class Sinusoid:
    amp: float
    freq: float

    def value(self, t):
        return self.amp * np.sin(self.freq * t)

    def derivative(self, t):
        return self.amp * self.freq * np.cos(self.freq * t)


Term = Linear | Quadratic | Sinusoid


@dataclass(frozen=True)
class AngleProgram:
    """Angle as a function of time: a sum of ``c t``, ``c t^2`` and ``a sin(w t)``.

    Every admissible term vanishes at ``t = 0``, so ``p(0) = 0`` holds by
    construction.  Evaluation and differentiation are exact and accept
    scalars or numpy arrays.
    """

    terms: tuple[Term, ...] = field(default_factory=tuple)

    def __post_init__(self):
        terms = tuple(self.terms)
        for term in terms:
            if not isinstance(term, (Linear, Quadratic, Sinusoid)):
                raise TypeError(f"unsupported angle term {term!r}")
            coeffs = (term.amp, term.freq) if isinstance(term, Sinusoid) else (term.c,)
            if not all(math.isfinite(c) for c in coeffs):
                raise ValueError(f"non-finite coefficient in {term!r}")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def linear(cls, c: float) -> "AngleProgram":
        return cls((Linear(float(c)),))

    @classmethod
    def quadratic(cls, c: float) -> "AngleProgram":
        return cls((Quadratic(float(c)),))

    @classmethod
    def sinusoid(cls, amp: float, freq: float) -> "AngleProgram":
        return cls((Sinusoid(float(amp), float(freq)),))

    def __call__(self, t):
        out = 0.0 * np.asarray(t, dtype=float) if isinstance(t, np.ndarray) else 0.0
        for term in self.terms:
            out = out + term.value(t)
        return out

    def derivative(self, t):
        out = 0.0 * np.asarray(t, dtype=float) if isinstance(t, np.ndarray) else 0.0
        for term in self.terms:
            out = out + term.derivative(t)
        return out

    def __add__(self, other: "AngleProgram") -> "AngleProgram":
        return AngleProgram(self.terms + other.terms).simplified()

    def __neg__(self) -> "AngleProgram":
        return self.scaled(-1.0)

    def __sub__(self, other: "AngleProgram") -> "AngleProgram":
        return self + (-other)

    def scaled(self, k: float) -> "AngleProgram":
        out = []
        for term in self.terms:
            if isinstance(term, Sinusoid):
                out.append(Sinusoid(k * term.amp, term.freq))
            else:
                out.append(type(term)(k * term.c))
        return AngleProgram(tuple(out))

    def simplified(self) -> "AngleProgram":
        """Merge like terms and drop zero ones; keeps a canonical order."""
        lin = quad = 0.0
        sines: dict[float, float] = {}
        for term in self.terms:
            if isinstance(term, Linear):
                lin += term.c
            elif isinstance(term, Quadratic):
                quad += term.c
            else:
                sines[term.freq] = sines.get(term.freq, 0.0) + term.amp
        out: list[Term] = [Sinusoid(a, w) for w, a in sines.items() if a != 0.0 and w != 0.0]
        if lin != 0.0:
            out.append(Linear(lin))
        if quad != 0.0:
            out.append(Quadratic(quad))
        return AngleProgram(tuple(out))

    def to_terms(self) -> list[dict]:
        """Config representation, e.g. ``[{"sin": {"amp": .56, "freq": 5}}, {"lin": 1.0}]``."""
        out = []
        for term in self.terms:
            if isinstance(term, Linear):
                out.append({"lin": term.c})
            elif isinstance(term, Quadratic):
                out.append({"quad": term.c})
            else:
                out.append({"sin": {"amp": term.amp, "freq": term.freq}})
        return out

    @classmethod
    def from_terms(cls, terms: Iterable[dict], number=float) -> "AngleProgram":
        """Inverse of :meth:`to_terms`; ``number`` converts each scalar entry."""
        out: list[Term] = []
        for entry in terms:
            if not isinstance(entry, dict) or len(entry) != 1:
                raise ValueError(f"angle term must be a single-key mapping, got {entry!r}")
            (kind, val), = entry.items()
            if kind == "lin":
                out.append(Linear(number(val)))
            elif kind == "quad":
                out.append(Quadratic(number(val)))
            elif kind == "sin":
                if not isinstance(val, dict) or set(val) != {"amp", "freq"}:
                    raise ValueError(f"sin term needs amp and freq, got {val!r}")
                out.append(Sinusoid(number(val["amp"]), number(val["freq"])))
            else:
                raise ValueError(f"unknown angle term kind {kind!r}")
        return cls(tuple(out))


ZERO_PROGRAM = AngleProgram()


def eval_program(p: AngleProgram, t):
    return p(t)


def eval_derivative(p: AngleProgram, t):
    return p.derivative(t)


@dataclass(frozen=True)
class RotationProgram:
    """Simultaneous rotations: ``alpha`` about ``e_chi`` and ``beta`` about ``k``.

    ``e_chi`` lies in the x-z plane at angle ``chi`` from ``k``.
    """

    chi: float
    alpha: AngleProgram = ZERO_PROGRAM
    beta: AngleProgram = ZERO_PROGRAM

    def __post_init__(self):
        chi = float(self.chi)
        if not 0.0 <= chi <= math.pi:
            raise ValueError(f"chi must lie in [0, pi], got {chi!r}")
        object.__setattr__(self, "chi", chi)

    @classmethod
    def from_lambda(cls, lam: float, alpha=ZERO_PROGRAM, beta=ZERO_PROGRAM):
        if not -1.0 <= lam <= 1.0:
            raise ValueError(f"lambda must lie in [-1, 1], got {lam!r}")
        return cls(math.acos(lam), alpha, beta)

    @property
    def lam(self) -> float:
        return math.cos(self.chi)

    @property
    def sin_chi(self) -> float:
        return math.sin(self.chi)

    @property
    def axis(self) -> np.ndarray:
        return np.array([math.sin(self.chi), 0.0, math.cos(self.chi)])


def rotation_matrix(prog: RotationProgram, t: float) -> np.ndarray:
    """``R(t) = R3(beta) R2(-chi)^-1 R3(-alpha) R2(-chi)``.

    The inner block turns by ``-alpha`` about ``e_chi``; with the field of
    :func:`spinforge.synthesize.two_axis_field_invariant` this is exactly the
    flow of ``dn/dt = -b x n``.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    a, b = float(prog.alpha(t)), float(prog.beta(t))
    return rot_z(b) @ rot_y(prog.chi) @ rot_z(-a) @ rot_y(-prog.chi)


def rotate_vectors(prog: RotationProgram, times, n0) -> np.ndarray:
    """``R(t) n0`` for every time in ``times``; returns shape (len(times), 3)."""
    times = np.asarray(times, dtype=float)
    n0 = np.asarray(n0.v if isinstance(n0, BlochVector) else n0, dtype=float)
    lam, s = prog.lam, prog.sin_chi
    a, b = prog.alpha(times), prog.beta(times)
    # R2(-chi) n0, then R3(-alpha), then R2(chi), then R3(beta)
    p1 = lam * n0[0] - s * n0[2]
    p2 = n0[1]
    p3 = s * n0[0] + lam * n0[2]
    ca, sa = np.cos(a), np.sin(a)
    q1 = ca * p1 + sa * p2
    q2 = -sa * p1 + ca * p2
    m1 = lam * q1 + s * p3
    m3 = -s * q1 + lam * p3
    cb, sb = np.cos(b), np.sin(b)
    return np.stack([cb * m1 - sb * q2, sb * m1 + cb * q2, m3 * np.ones_like(a)], axis=-1)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid on ``[0, tau]`` with ``steps`` intervals (``steps + 1`` nodes)."""

    tau: float
    steps: int

    def __post_init__(self):
        if not (math.isfinite(self.tau) and self.tau > 0):
            raise ValueError(f"tau must be positive and finite, got {self.tau!r}")
        if int(self.steps) != self.steps or self.steps < 2:
            raise ValueError(f"steps must be an integer >= 2, got {self.steps!r}")
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "steps", int(self.steps))

    @property
    def dt(self) -> float:
        return self.tau / self.steps

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.tau, self.steps + 1)
