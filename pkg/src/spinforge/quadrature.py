"""Grid derivatives and quadrature rules."""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import simpson


def grid_derivative(y, h: float, order: int = 2) -> np.ndarray:
    """Finite-difference derivative along axis 0 of samples on a uniform grid.

    ``order=2``: central differences inside, second-order one-sided at the
    ends.  ``order=4``: five-point central stencil inside, fourth-order
    one-sided stencils on the two outermost nodes at each end.
    """
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    d = np.empty_like(y)
    if order == 2:
        if n < 3:
            raise ValueError("need at least 3 samples")
        d[1:-1] = (y[2:] - y[:-2]) / (2 * h)
        d[0] = (-3 * y[0] + 4 * y[1] - y[2]) / (2 * h)
        d[-1] = (3 * y[-1] - 4 * y[-2] + y[-3]) / (2 * h)
    elif order == 4:
        if n < 5:
            raise ValueError("need at least 5 samples")
        d[2:-2] = (y[:-4] - 8 * y[1:-3] + 8 * y[3:-1] - y[4:]) / (12 * h)
        d[0] = (-25 * y[0] + 48 * y[1] - 36 * y[2] + 16 * y[3] - 3 * y[4]) / (12 * h)
        d[1] = (-3 * y[0] - 10 * y[1] + 18 * y[2] - 6 * y[3] + y[4]) / (12 * h)
        d[-1] = (25 * y[-1] - 48 * y[-2] + 36 * y[-3] - 16 * y[-4] + 3 * y[-5]) / (12 * h)
        d[-2] = (3 * y[-1] + 10 * y[-2] - 18 * y[-3] + 6 * y[-4] - y[-5]) / (12 * h)
    else:
        raise ValueError(f"unsupported order {order}")
    return d


def grid_integral(y, h: float) -> float:
    """Composite Simpson rule for uniformly spaced samples."""
    return float(simpson(np.asarray(y, dtype=float), dx=h, axis=0))


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-9, panels: int = 64,
                     max_depth: int = 40) -> float:
    """Integrate ``f`` on ``[a, b]`` by adaptive Simpson with Richardson correction.

    The interval is first cut into ``panels`` equal panels so oscillatory
    integrands are resolved before the local error test is trusted; the
    absolute tolerance is shared between panels in proportion to width.
    ``f`` must accept numpy arrays.
    """
    if a == b:
        return 0.0
    if b < a:
        return -adaptive_simpson(f, b, a, tol, panels, max_depth)
    edges = np.linspace(a, b, panels + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    fe = np.asarray(f(edges), dtype=float)
    fm = np.asarray(f(mids), dtype=float)
    total = 0.0
    width = b - a
    # explicit stack instead of recursion: (a, b, fa, fm, fb, whole, tol, depth)
    stack = []
    for i in range(panels):
        lo, hi = edges[i], edges[i + 1]
        whole = (hi - lo) / 6 * (fe[i] + 4 * fm[i] + fe[i + 1])
        stack.append((lo, hi, fe[i], fm[i], fe[i + 1], whole, tol * (hi - lo) / width, 0))
    while stack:
        lo, hi, fa, fc, fb, whole, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        ql, qr = 0.5 * (lo + mid), 0.5 * (mid + hi)
        fl, fr = (float(v) for v in f(np.array([ql, qr])))
        left = (mid - lo) / 6 * (fa + 4 * fl + fc)
        right = (hi - mid) / 6 * (fc + 4 * fr + fb)
        delta = left + right - whole
        if depth >= max_depth or abs(delta) <= 15 * eps:
            total += left + right + delta / 15
        else:
            stack.append((lo, mid, fa, fl, fc, left, eps / 2, depth + 1))
            stack.append((mid, hi, fc, fr, fb, right, eps / 2, depth + 1))
    return total


def fresnel_integral_c(u: float) -> float:
    """Fresnel cosine integral ``C(u) = int_0^u cos(pi s^2 / 2) ds``."""
    if not math.isfinite(u):
        raise ValueError("u must be finite")
    # keep the initial panels finer than the local oscillation period ~ 1/u
    panels = max(64, int(8 * u * u))
    return adaptive_simpson(lambda s: np.cos(0.5 * np.pi * s * s), 0.0, float(u), tol=1e-9,
                            panels=panels)
