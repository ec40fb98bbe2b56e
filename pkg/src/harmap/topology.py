"""Winding numbers of sampled loops and critical-point counts.

The tangent winding of a closed C^1 curve is the total turn of its
derivative argument divided by 2*pi; zeros of a holomorphic function inside
a circle are counted by the winding of its boundary values around the
origin (argument principle).  Critical points of u_alpha are counted as
zeros of the derivative of its analytic completion f_alpha, which is the
sign-safe formulation of the gradient winding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from . import dirichlet, spectral
from .errors import (NonintegerError, PreconditionError, UndersampledError,
                     ZeroOnContourError)

MAX_TURN = np.pi / 2       # wrapped argument increments must stay below this
INTEGER_RESIDUAL = 0.05    # allowed distance of the winding sum from an integer
CONTOUR_FLOOR = 1e-9       # relative modulus floor on integration contours


@dataclass(frozen=True)
class SampledLoop:
    """Complex points traversed in order, implicitly closed."""

    points: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.points, dtype=np.complex128).copy()
        if p.ndim != 1 or p.size < 8:
            raise ValueError("a loop needs at least 8 points")
        if not np.all(np.isfinite(p)):
            raise ValueError("loop points must be finite")
        steps = np.abs(np.roll(p, -1) - p)
        if np.min(steps) < 1e-14:
            raise ValueError("degenerate step: two successive loop points coincide")
        p.setflags(write=False)
        object.__setattr__(self, "points", p)

    @property
    def n(self) -> int:
        return self.points.size


def _argument_sum(values: np.ndarray) -> float:
    """Sum of wrapped argument increments around a closed loop of values."""
    mags = np.abs(values)
    if np.min(mags) <= 1e-300:
        raise UndersampledError("loop passes through zero; argument undefined")
    ratios = np.roll(values, -1) / values
    inc = np.angle(ratios)
    if np.max(np.abs(inc)) >= MAX_TURN:
        raise UndersampledError(
            f"argument step {np.max(np.abs(inc)):.3f} >= pi/2; loop is undersampled"
        )
    return float(np.sum(inc))


def _round_to_integer(total: float) -> int:
    w = total / (2.0 * np.pi)
    nearest = round(w)
    if abs(w - nearest) >= INTEGER_RESIDUAL:
        raise NonintegerError(f"winding sum {w:.6f} is not close to an integer")
    return int(nearest)


def winding_number(loop: SampledLoop) -> int:
    """Winding of a loop of derivative samples: (1/2pi) sum of d arg."""
    return _round_to_integer(_argument_sum(loop.points))


def zeros_in_disk(h_coeffs, r: float) -> int:
    """Number of zeros of the polynomial h in |z| < r, counted by winding.

    Requires |h| on the circle to stay above CONTOUR_FLOOR relative to its
    maximum there; the sampling is refined automatically until the argument
    steps are resolved.
    """
    c = np.asarray(h_coeffs, dtype=np.complex128)
    if c.size == 0 or not np.any(c != 0):
        raise ZeroOnContourError("zero polynomial vanishes on every contour")
    if not (0.0 < r <= 1.0):
        raise ValueError("radius must lie in (0, 1]")
    m = max(256, spectral.next_power_of_two(8 * c.size))
    while True:
        z = r * np.exp(1j * spectral.grid(m))
        vals = P.polyval(z, c)
        top = float(np.max(np.abs(vals)))
        if top == 0.0 or float(np.min(np.abs(vals))) < CONTOUR_FLOOR * top:
            raise ZeroOnContourError(
                f"min |h| on |z|={r} is below {CONTOUR_FLOOR:.0e} of its max"
            )
        try:
            return _round_to_integer(_argument_sum(vals))
        except UndersampledError:
            if m >= 2 ** 20:
                raise
            m *= 2


def _trim(c: np.ndarray, rel: float = 1e-14) -> np.ndarray:
    """Drop a negligible trailing tail (keeps the winding count unchanged)."""
    mags = np.abs(c)
    top = mags.max()
    if top == 0.0:
        return c[:1]
    live = np.nonzero(mags > rel * top)[0]
    return c[: live[-1] + 1]


def critical_count(U: dirichlet.HarmonicMap, alpha: float) -> int:
    """Zeros of f_alpha' in the open disk (multiplicity counted)."""
    fp = np.asarray(dirichlet.f_alpha(U, alpha))
    fp = fp[1:] * np.arange(1, fp.size) if fp.size > 1 else np.zeros(1, complex)
    if fp.size == 0:
        fp = np.zeros(1, complex)
    return zeros_in_disk(_trim(fp), 1.0)


@dataclass(frozen=True)
class WindingReport:
    wn_f: int
    wn_phi: int
    critical_points: int
    consistent: bool


def wn_identity_check(U: dirichlet.HarmonicMap,
                      curve: dirichlet.BoundaryCurve) -> WindingReport:
    """Check WN(f(dB)) = WN(Phi(dB)) and M = WN(f(dB)) - 1.

    Requires det DU > 0 everywhere on the boundary grid.
    """
    zb = np.exp(1j * curve.thetas)
    jac = dirichlet.eval_jacobian(U, zb)
    if float(np.min(jac)) <= 0.0:
        raise PreconditionError("boundary Jacobian is not strictly positive")

    w = spectral.PeriodicSamples(curve.complex_samples)
    wn_phi = winding_number(SampledLoop(spectral.diff_theta(w).values))

    f = dirichlet.analytic_f(U)
    fp = f[1:] * np.arange(1, f.size) if f.size > 1 else np.zeros(1, complex)
    fp = _trim(fp)
    m = max(256, spectral.next_power_of_two(8 * max(fp.size, 2)))
    z = np.exp(1j * spectral.grid(m))
    dfd = 1j * z * P.polyval(z, fp)  # d/dtheta of f(e^{i theta})
    wn_f = winding_number(SampledLoop(dfd))

    M = critical_count(U, 0.0)
    return WindingReport(wn_f=wn_f, wn_phi=wn_phi, critical_points=M,
                         consistent=(wn_f == wn_phi) and (M == wn_f - 1))
