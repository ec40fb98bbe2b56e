"""Periodic function algebra on uniform grids of the unit circle.

Samples live at theta_j = 2*pi*j/n with n a power of two.  Everything here
is a Fourier multiplier on top of the plain FFT:

    d/dtheta : c_k -> i k c_k
    H        : c_k -> -i sign(k) c_k        (conjugate-function operator)

so H(cos k theta) = sin k theta and H(sin k theta) = -cos k theta for
k >= 1, and H annihilates the mean.  The Nyquist mode has no symmetric
partner and is annihilated by both operators; band-limited inputs
(degree <= n/2 - 1) never populate it.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import AliasingError, TailWarning

DEFAULT_N = 1024
TAIL_TOLERANCE = 1e-8      # relative l2 mass above |k| = n/4 that triggers TailWarning
DEGREE_TOLERANCE = 1e-12   # relative coefficient size that counts toward the degree


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def next_power_of_two(n: int) -> int:
    m = 1
    while m < n:
        m *= 2
    return m


def grid(n: int) -> np.ndarray:
    """The angles theta_j = 2*pi*j/n."""
    return 2.0 * np.pi * np.arange(n) / n


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PeriodicSamples:
    """n uniform samples of a 2*pi-periodic function, n a power of two >= 8."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if v.size < 8 or not is_power_of_two(v.size):
            raise ValueError(f"sample count must be a power of two >= 8, got {v.size}")
        dtype = np.complex128 if np.iscomplexobj(v) else np.float64
        v = v.astype(dtype, copy=True)
        if not np.all(np.isfinite(v)):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "values", _freeze(v))

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def thetas(self) -> np.ndarray:
        return grid(self.n)

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.values)


@dataclass(frozen=True)
class FourierCoeffs:
    """Fourier coefficients c_k, stored in FFT order for k in [-n/2, n/2).

    ``coeffs[j]`` is c_j for j < n/2 and c_{j-n} for j >= n/2.  ``degree`` is
    the largest |k| whose coefficient exceeds DEGREE_TOLERANCE relative to
    the largest coefficient.
    """

    coeffs: np.ndarray
    degree: int = -1

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.ndim != 1 or not is_power_of_two(c.size) or c.size < 8:
            raise ValueError("coefficient array must have power-of-two length >= 8")
        object.__setattr__(self, "coeffs", _freeze(c.copy()))
        if self.degree < 0:
            object.__setattr__(self, "degree", _measure_degree(self.coeffs))

    @property
    def n(self) -> int:
        return self.coeffs.size

    @property
    def freqs(self) -> np.ndarray:
        return np.fft.fftfreq(self.n, d=1.0 / self.n).astype(int)

    def __getitem__(self, k: int) -> complex:
        if abs(k) > self.n // 2:
            return 0.0 + 0.0j
        if k == self.n // 2:
            k = -k
        return complex(self.coeffs[k % self.n])

    def is_hermitian(self, tol: float = 1e-13) -> bool:
        """True when the coefficients synthesize a real-valued function."""
        c = self.coeffs
        scale = max(np.max(np.abs(c)), 1.0)
        flipped = np.conj(np.roll(c[::-1], 1))  # maps c_k -> conj(c_{-k})
        return bool(np.max(np.abs(c - flipped)) <= tol * scale)


def _measure_degree(c: np.ndarray) -> int:
    n = c.size
    mags = np.abs(c)
    top = mags.max()
    if top == 0.0:
        return 0
    k = np.abs(np.fft.fftfreq(n, d=1.0 / n).astype(int))
    live = mags > DEGREE_TOLERANCE * top
    return int(k[live].max()) if np.any(live) else 0


def to_fourier(s: PeriodicSamples) -> FourierCoeffs:
    """Forward transform; exact inverse of from_fourier for band-limited data."""
    return FourierCoeffs(np.fft.fft(s.values) / s.n)


def from_fourier(c: FourierCoeffs, n: int) -> PeriodicSamples:
    """Synthesize n uniform samples; raises AliasingError when n < 2*degree + 2."""
    if not is_power_of_two(n) or n < 8:
        raise ValueError(f"sample count must be a power of two >= 8, got {n}")
    if n < 2 * c.degree + 2:
        raise AliasingError(
            f"{n} samples cannot represent degree {c.degree} (need >= {2 * c.degree + 2})"
        )
    out = np.zeros(n, dtype=np.complex128)
    ks = c.freqs
    keep = np.abs(ks) <= n // 2 - 1
    out[ks[keep] % n] = c.coeffs[keep]
    vals = np.fft.ifft(out) * n
    if c.is_hermitian():
        vals = vals.real
    return PeriodicSamples(vals)


def tail_fraction(s: PeriodicSamples) -> float:
    """Relative l2 mass of the modes with |k| > n/4."""
    c = np.fft.fft(s.values) / s.n
    k = np.abs(np.fft.fftfreq(s.n, d=1.0 / s.n).astype(int))
    total = float(np.sum(np.abs(c) ** 2))
    if total == 0.0:
        return 0.0
    return float(np.sqrt(np.sum(np.abs(c[k > s.n // 4]) ** 2) / total))


def _warn_on_tail(s: PeriodicSamples, where: str):
    frac = tail_fraction(s)
    if frac > TAIL_TOLERANCE:
        warnings.warn(
            f"{where}: spectral tail mass {frac:.3e} exceeds {TAIL_TOLERANCE:.1e}; "
            "input may be too rough for C^1 semantics",
            TailWarning,
            stacklevel=3,
        )


def diff_theta(s: PeriodicSamples) -> PeriodicSamples:
    """Spectral derivative d/dtheta (multiplier i*k, Nyquist annihilated)."""
    _warn_on_tail(s, "diff_theta")
    n = s.n
    c = np.fft.fft(s.values)
    k = np.fft.fftfreq(n, d=1.0 / n)
    c *= 1j * k
    c[n // 2] = 0.0
    out = np.fft.ifft(c)
    return PeriodicSamples(out.real if s.is_real else out)


def hilbert(s: PeriodicSamples) -> PeriodicSamples:
    """Conjugate-function operator: cos k0 -> sin k0, sin k0 -> -cos k0, mean -> 0."""
    if not s.is_real:
        raise ValueError("hilbert expects real-valued samples")
    c = np.fft.fft(s.values)
    k = np.fft.fftfreq(s.n, d=1.0 / s.n)
    out = np.fft.ifft(-1j * np.sign(k) * c).real
    return PeriodicSamples(out)


def fourier_diff(coeffs: np.ndarray) -> np.ndarray:
    """d/dtheta on raw FFT-ordered coefficients (Nyquist zeroed)."""
    n = coeffs.size
    k = np.fft.fftfreq(n, d=1.0 / n)
    out = coeffs * (1j * k)
    out[n // 2] = 0.0
    return out


def trig_eval(coeffs: np.ndarray, x) -> np.ndarray:
    """Evaluate sum_k c_k e^{i k x} at arbitrary angles x.

    ``coeffs`` are FFT-ordered (as in to_fourier().coeffs).  The Nyquist mode
    is rendered as the symmetric real combination c_{n/2} cos(n x / 2).
    """
    c = np.asarray(coeffs, dtype=np.complex128)
    n = c.size
    x = np.asarray(x, dtype=np.float64)
    q = np.exp(1j * x)
    qb = np.conj(q)
    from numpy.polynomial import polynomial as P

    pos = P.polyval(q, c[: n // 2])
    dneg = c[-1 : n // 2 : -1]  # c_{-1}, c_{-2}, ..., c_{-(n/2-1)}
    neg = qb * P.polyval(qb, dneg) if dneg.size else 0.0
    nyq = c[n // 2] * np.cos((n // 2) * x)
    return pos + neg + nyq
