"""A small zoo of boundary curves used by demos, fixtures and tests."""

from __future__ import annotations

import numpy as np

from . import spectral
from .dirichlet import BoundaryCurve
from .spectral import DEFAULT_N


def circle(n: int = DEFAULT_N, radius: float = 1.0) -> BoundaryCurve:
    t = spectral.grid(n)
    return BoundaryCurve.from_complex(radius * np.exp(1j * t))


def ellipse(a: float = 2.0, b: float = 1.0, n: int = DEFAULT_N) -> BoundaryCurve:
    t = spectral.grid(n)
    return BoundaryCurve.from_components(a * np.cos(t), b * np.sin(t))


def perturbed_circle(c: float, n: int = DEFAULT_N) -> BoundaryCurve:
    """e^{i theta} + c e^{-2i theta}: simple for c < 0.5, nonconvex for c > 0.25."""
    t = spectral.grid(n)
    return BoundaryCurve.from_complex(np.exp(1j * t) + c * np.exp(-2j * t))


def trefoil_dents(n: int = DEFAULT_N) -> BoundaryCurve:
    """Three-dented rounded triangle, a nonconvex counterexample target."""
    return perturbed_circle(0.45, n)


def u_shape(n: int = DEFAULT_N) -> BoundaryCurve:
    """Polar curve with one deep indentation toward +x (a smooth 'U')."""
    t = spectral.grid(n)
    r = 0.75 - 0.5 * np.cos(t) - 0.12 * np.cos(2 * t)
    return BoundaryCurve.from_complex(r * np.exp(1j * t))


def pinched_oval(n: int = DEFAULT_N) -> BoundaryCurve:
    """Boundary Jacobian 1 + sqrt(2) cos t + 0.5 cos 2t: an exact zero at 3*pi/4.

    The zero lands on a grid point whenever 8 | n, so certification is
    deterministically indeterminate.
    """
    t = spectral.grid(n)
    psi = np.sin(t) + (np.sqrt(2.0) / 2.0) * np.sin(2 * t) + np.sin(3 * t) / 6.0
    return BoundaryCurve.from_components(np.cos(t), psi)


def figure_eight(n: int = DEFAULT_N) -> BoundaryCurve:
    t = spectral.grid(n)
    return BoundaryCurve.from_components(np.cos(t), np.sin(2 * t))


def clockwise_circle(n: int = DEFAULT_N) -> BoundaryCurve:
    t = spectral.grid(n)
    return BoundaryCurve.from_complex(np.exp(-1j * t))


def convex_curve(rng: np.random.Generator, n: int = DEFAULT_N,
                 harmonics: int = 6, amplitude: float = 0.25) -> BoundaryCurve:
    """Random strictly convex curve via a positive support-ish function.

    The point at angle theta is h n + h' tau with n, tau the rotating frame;
    the curve's speed is h + h'', so coefficients are rescaled until
    h + h'' >= 0.3 everywhere (strict convexity with margin).
    """
    t = spectral.grid(n)
    for _ in range(60):
        a = amplitude * rng.standard_normal(harmonics) / np.arange(2, harmonics + 2) ** 2
        b = amplitude * rng.standard_normal(harmonics) / np.arange(2, harmonics + 2) ** 2
        h = np.ones_like(t)
        hp = np.zeros_like(t)
        hpp = np.zeros_like(t)
        for k in range(1, harmonics + 1):
            # k = 1 terms translate the curve; keep them for variety
            h += a[k - 1] * np.cos(k * t) + b[k - 1] * np.sin(k * t)
            hp += -k * a[k - 1] * np.sin(k * t) + k * b[k - 1] * np.cos(k * t)
            hpp += -k * k * (a[k - 1] * np.cos(k * t) + b[k - 1] * np.sin(k * t))
        if np.min(h + hpp) >= 0.3 and np.min(h) >= 0.3:
            x = h * np.cos(t) - hp * np.sin(t)
            y = h * np.sin(t) + hp * np.cos(t)
            return BoundaryCurve.from_components(x, y)
        amplitude *= 0.7
    raise RuntimeError("failed to draw a convex curve")  # pragma: no cover


def reparametrize(curve: BoundaryCurve, rng: np.random.Generator,
                  harmonics: int = 4, strength: float = 0.4) -> BoundaryCurve:
    """Compose with a random increasing circle diffeomorphism s -> s + sum eps_k sin(ks + phi_k)."""
    n = curve.n
    s = spectral.grid(n)
    ks = np.arange(1, harmonics + 1)
    eps = strength * rng.uniform(0.2, 1.0, harmonics) / (ks * harmonics)
    phases = rng.uniform(0.0, 2.0 * np.pi, harmonics)
    theta = s + np.sum(eps[:, None] * np.sin(ks[:, None] * s[None, :] + phases[:, None]),
                       axis=0)
    c = np.fft.fft(curve.complex_samples) / n
    return BoundaryCurve.from_complex(spectral.trig_eval(c, theta))
