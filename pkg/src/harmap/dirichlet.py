"""Harmonic extension of circle boundary data, in canonical form.

The harmonic map U with boundary values Phi is stored as a pair of
holomorphic Taylor polynomials (G, H) with

    U(z) = G(z) + conj(H(z)),        det DU = |G'|^2 - |H'|^2,

obtained by re-indexing the Fourier coefficients of the boundary data:
nonnegative modes feed G, negative modes feed H (conjugated).  Evaluation
anywhere in the closed disk is then two polynomial evaluations; there is no
Poisson-kernel quadrature and no near-boundary blowup.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from . import spectral
from .errors import AliasingError, DomainError
from .spectral import PeriodicSamples

_EDGE_SLACK = 1e-12  # |z| may exceed 1 by this much; such points are clamped to |z| = 1


@dataclass(frozen=True)
class BoundaryCurve:
    """A closed curve Phi = (phi, psi) sampled on a uniform circle grid."""

    phi: PeriodicSamples
    psi: PeriodicSamples

    def __post_init__(self):
        if not (self.phi.is_real and self.psi.is_real):
            raise ValueError("curve components must be real-valued")
        if self.phi.n != self.psi.n:
            raise ValueError("phi and psi must share the same grid")

    @classmethod
    def from_complex(cls, values) -> "BoundaryCurve":
        v = np.asarray(values, dtype=np.complex128)
        return cls(PeriodicSamples(v.real), PeriodicSamples(v.imag))

    @classmethod
    def from_components(cls, phi, psi) -> "BoundaryCurve":
        return cls(PeriodicSamples(np.asarray(phi, float)),
                   PeriodicSamples(np.asarray(psi, float)))

    @property
    def n(self) -> int:
        return self.phi.n

    @property
    def thetas(self) -> np.ndarray:
        return self.phi.thetas

    @property
    def complex_samples(self) -> np.ndarray:
        return self.phi.values + 1j * self.psi.values

    def points(self) -> np.ndarray:
        return self.complex_samples


@dataclass(frozen=True)
class HarmonicMap:
    """Canonical pair (G, H): U = G + conj(H), both arrays of Taylor coefficients."""

    g_coeffs: np.ndarray
    h_coeffs: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.g_coeffs, dtype=np.complex128).copy()
        h = np.asarray(self.h_coeffs, dtype=np.complex128).copy()
        if g.ndim != 1 or h.ndim != 1 or g.size == 0 or h.size == 0:
            raise ValueError("coefficient arrays must be non-empty and one-dimensional")
        if not (np.all(np.isfinite(g)) and np.all(np.isfinite(h))):
            raise ValueError("coefficients must be finite")
        g.setflags(write=False)
        h.setflags(write=False)
        object.__setattr__(self, "g_coeffs", g)
        object.__setattr__(self, "h_coeffs", h)

    @property
    def degree(self) -> int:
        return max(self.g_coeffs.size, self.h_coeffs.size) - 1


@dataclass(frozen=True)
class JacobianField:
    """det DU sampled on an interior polar grid, with the recorded minimum."""

    radii: np.ndarray
    thetas: np.ndarray
    values: np.ndarray  # shape (rings, spokes)
    min_value: float
    argmin_z: complex


def _deriv(c: np.ndarray) -> np.ndarray:
    if c.size <= 1:
        return np.zeros(1, dtype=np.complex128)
    return c[1:] * np.arange(1, c.size)


def _trim_tail(c: np.ndarray, rel: float = 1e-15) -> np.ndarray:
    """Drop trailing coefficients at rounding level (they only add noise)."""
    mags = np.abs(c)
    top = mags.max()
    if top == 0.0:
        return c[:1]
    live = np.nonzero(mags > rel * top)[0]
    return c[: live[-1] + 1]


def solve(curve: BoundaryCurve) -> HarmonicMap:
    """Harmonic extension of the boundary data, as the canonical pair (G, H).

    Mode k >= 0 of the complex boundary data becomes G's coefficient a_k;
    mode k < 0 becomes H's coefficient b_{-k} = conj(c_k).  H(0) = 0.
    """
    w = PeriodicSamples(curve.complex_samples)
    spectral._warn_on_tail(w, "solve")
    n = curve.n
    c = np.fft.fft(w.values) / n
    half = n // 2
    g = c[:half].copy()
    h = np.zeros(half, dtype=np.complex128)
    h[1:] = np.conj(c[:half:-1])  # b_k = conj(c_{-k}), k = 1..n/2-1
    scale = max(np.max(np.abs(g)), np.max(np.abs(h)))
    if scale > 0:  # common trim keeps the pair index-aligned
        keep = max(np.nonzero(np.abs(g) > 1e-15 * scale)[0][-1] + 1 if
                   np.any(np.abs(g) > 1e-15 * scale) else 1,
                   np.nonzero(np.abs(h) > 1e-15 * scale)[0][-1] + 1 if
                   np.any(np.abs(h) > 1e-15 * scale) else 1)
        g, h = g[:keep], h[:keep]
    return HarmonicMap(g, h)


def _clamped(z) -> np.ndarray:
    z = np.asarray(z, dtype=np.complex128)
    r = np.abs(z)
    if np.any(r > 1.0 + _EDGE_SLACK):
        worst = float(np.max(r))
        raise DomainError(f"|z| = {worst} lies outside the closed unit disk")
    over = r > 1.0
    if np.any(over):
        z = np.where(over, z / np.where(r == 0, 1.0, r), z)
    return z


def evaluate(U: HarmonicMap, z):
    """U(z) = G(z) + conj(H(z)) for |z| <= 1 (plus 1e-12 rounding slack)."""
    zz = _clamped(z)
    val = P.polyval(zz, U.g_coeffs) + np.conj(P.polyval(zz, U.h_coeffs))
    return val if np.ndim(z) else complex(val)


def eval_jacobian(U: HarmonicMap, z):
    """det DU(z) = |G'(z)|^2 - |H'(z)|^2."""
    zz = _clamped(z)
    gp = P.polyval(zz, _deriv(U.g_coeffs))
    hp = P.polyval(zz, _deriv(U.h_coeffs))
    val = np.abs(gp) ** 2 - np.abs(hp) ** 2
    return val if np.ndim(z) else float(val)


def jacobian_field(U: HarmonicMap, rings: int, spokes: int) -> JacobianField:
    """det DU on the open interior grid r_i = (i+1)/(rings+1), theta_j = 2*pi*j/spokes."""
    if rings < 1:
        raise ValueError("rings must be >= 1")
    if spokes < 8:
        raise ValueError("spokes must be >= 8")
    radii = np.arange(1, rings + 1) / (rings + 1)
    thetas = 2.0 * np.pi * np.arange(spokes) / spokes
    zgrid = radii[:, None] * np.exp(1j * thetas[None, :])
    vals = eval_jacobian(U, zgrid)
    flat = int(np.argmin(vals))
    i, j = divmod(flat, spokes)
    return JacobianField(radii=radii, thetas=thetas, values=vals,
                         min_value=float(vals[i, j]), argmin_z=complex(zgrid[i, j]))


def analytic_f(U: HarmonicMap) -> np.ndarray:
    """Coefficients of f = G + H, the analytic completion of Re U."""
    m = max(U.g_coeffs.size, U.h_coeffs.size)
    out = np.zeros(m, dtype=np.complex128)
    out[: U.g_coeffs.size] += U.g_coeffs
    out[: U.h_coeffs.size] += U.h_coeffs
    return out


def f_alpha(U: HarmonicMap, alpha: float) -> np.ndarray:
    """Coefficients of e^{-i alpha} G + e^{i alpha} H, the completion of u_alpha."""
    m = max(U.g_coeffs.size, U.h_coeffs.size)
    out = np.zeros(m, dtype=np.complex128)
    out[: U.g_coeffs.size] += np.exp(-1j * alpha) * U.g_coeffs
    out[: U.h_coeffs.size] += np.exp(1j * alpha) * U.h_coeffs
    return out


def boundary_trace(U: HarmonicMap, n: int) -> BoundaryCurve:
    """Sample U on the unit circle; n must resolve the polynomial degree."""
    deg = U.degree
    if n < 2 * deg + 2:
        raise AliasingError(f"{n} samples cannot carry boundary degree {deg}")
    z = np.exp(1j * spectral.grid(n))
    w = P.polyval(z, U.g_coeffs) + np.conj(P.polyval(z, U.h_coeffs))
    return BoundaryCurve.from_complex(w)
