"""Numerical conformal mapping of the disk onto a starlike domain.

For a domain given in polar form center + rho(theta) e^{i theta}, the
boundary correspondence sigma of the conformal map m with m(0) = center,
m'(0) > 0 satisfies the classical fixed-point equation

    sigma(t) - t = H[ log rho(sigma(.)) ](t),

because log((m(z) - center)/z) is holomorphic in the disk.  The iteration
below solves the discrete version with adaptive under-relaxation; the
residual of the equation is the self-certifying convergence measure.  The
interior representation is the Taylor polynomial obtained by projecting the
boundary values onto nonnegative frequencies; the discarded
negative-frequency mass is reported as ``leakage``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as P

from . import spectral
from .errors import (DomainError, NoConvergenceError, NonmonotoneError,
                     NonstarlikeError)
from .shear import PowerSeries
from .spectral import PeriodicSamples

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 200
MIN_RELAXATION = 1e-4


@dataclass(frozen=True)
class StarlikeBoundary:
    """Polar radius samples rho(theta_j) > 0 about a star center."""

    center: complex
    rho: PeriodicSamples

    def __post_init__(self):
        if not self.rho.is_real:
            raise NonstarlikeError("polar radius must be real-valued")
        if float(np.min(self.rho.values)) <= 0.0:
            raise NonstarlikeError("polar radius must be strictly positive")
        object.__setattr__(self, "center", complex(self.center))

    @property
    def n(self) -> int:
        return self.rho.n

    def points(self) -> np.ndarray:
        return self.center + self.rho.values * np.exp(1j * self.rho.thetas)

    @property
    def diameter(self) -> float:
        p = self.points()
        return float(max(np.ptp(p.real), np.ptp(p.imag)))


@dataclass(frozen=True)
class ConformalMap:
    """Boundary correspondence + Taylor polynomial of a disk-to-domain map."""

    center: complex
    rho: PeriodicSamples
    sigma: PeriodicSamples        # sigma(t_j), strictly increasing mod 2*pi
    taylor: PowerSeries
    residual: float
    leakage: float                # relative negative-frequency mass
    near_circle_bound: float      # max |rho'/rho|, the classical epsilon
    iterations: int

    @property
    def n(self) -> int:
        return self.sigma.n


def _monotone_mod_2pi(sigma: np.ndarray) -> bool:
    d = np.diff(np.concatenate([sigma, [sigma[0] + 2.0 * np.pi]]))
    return bool(np.all(d > 0.0))


_HILBERT_MATRIX_CACHE: dict = {}


def _hilbert_matrix(n: int) -> np.ndarray:
    """The conjugate-function operator as a dense circulant matrix."""
    if n not in _HILBERT_MATRIX_CACHE:
        k = np.fft.fftfreq(n, d=1.0 / n)
        kernel = np.fft.ifft(-1j * np.sign(k)).real  # first column of the circulant
        idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
        _HILBERT_MATRIX_CACHE[n] = kernel[idx]
    return _HILBERT_MATRIX_CACHE[n]


def theodorsen(boundary: StarlikeBoundary, tol: float = DEFAULT_TOL,
               max_iter: int = DEFAULT_MAX_ITER,
               sigma0: Optional[np.ndarray] = None) -> ConformalMap:
    """Solve the boundary-correspondence equation by damped fixed-point iteration.

    ``sigma0`` warm-starts the correspondence (useful for continuation over a
    family of domains).  Raises NoConvergenceError when the residual is still
    above ``tol`` after ``max_iter`` accepted steps, and NonmonotoneError when
    the correspondence cannot be kept increasing even with the smallest
    relaxation factor.
    """
    n = boundary.n
    t = spectral.grid(n)
    rho = boundary.rho.values
    log_rho_coeffs = np.fft.fft(np.log(rho)) / n
    rho_coeffs = np.fft.fft(rho) / n

    import warnings as _warnings
    with _warnings.catch_warnings():
        _warnings.simplefilter("ignore")
        drho = spectral.diff_theta(boundary.rho).values
    near_circle = float(np.max(np.abs(drho / rho)))

    def conjugate(u: np.ndarray) -> np.ndarray:
        c = np.fft.fft(u)
        k = np.fft.fftfreq(n, d=1.0 / n)
        return np.fft.ifft(-1j * np.sign(k) * c).real

    if sigma0 is None:
        sigma = t.copy()
    else:
        sigma = np.asarray(sigma0, dtype=np.float64).copy()
        if sigma.shape != t.shape:
            raise ValueError("sigma0 must live on the boundary grid")

    dlog_rho_coeffs = spectral.fourier_diff(log_rho_coeffs)

    def residual_of(s: np.ndarray):
        u = spectral.trig_eval(log_rho_coeffs, s).real
        target = t + conjugate(u)
        return target, float(np.max(np.abs(target - s)))

    # phase 1: damped fixed-point steps (plenty for near-circular domains)
    lam = 0.5
    prev_res = np.inf
    improved = 0
    it = 0
    history: list = []
    target, residual = residual_of(sigma)
    while it < max_iter and residual > tol:
        if len(history) >= 40 and residual > 0.7 * history[-40]:
            break  # stalled; hand over to the Newton phase
        cand = sigma + lam * (target - sigma)
        if residual > prev_res * (1.0 + 1e-12):
            lam = max(lam * 0.5, MIN_RELAXATION)
            improved = 0
        else:
            improved += 1
            if improved >= 3:
                lam = min(lam * 2.0, 1.0)
                improved = 0
        sigma = cand
        prev_res = residual
        history.append(residual)
        it += 1
        target, residual = residual_of(sigma)

    # phase 2: damped Newton on R(s) = s - t - H[log rho(s)]; the Jacobian
    # I - H diag((log rho)'(s)) is a dense n-by-n solve, cheap at desk scale.
    # Monotonicity is a property of the converged correspondence, not of the
    # search path, so the line search monitors the residual norm only.
    if residual > tol:
        hmat = _hilbert_matrix(n)

        def norm2(s, tgt):
            return float(np.linalg.norm(tgt - s))

        r2 = norm2(sigma, target)
        for _ in range(max(0, min(80, max_iter - it))):
            if residual <= tol:
                break
            dvals = spectral.trig_eval(dlog_rho_coeffs, sigma).real
            jac = np.eye(n) - hmat * dvals[None, :]
            try:
                delta = np.linalg.solve(jac, target - sigma)
            except np.linalg.LinAlgError:
                raise NoConvergenceError("correspondence Jacobian is singular",
                                         residual=residual)
            alpha = 1.0
            accepted = False
            while alpha >= 1e-4:
                cand = sigma + alpha * delta
                cand_target, cand_res = residual_of(cand)
                cand_r2 = norm2(cand, cand_target)
                if cand_r2 < r2 * (1.0 - 1e-4 * alpha) or cand_res <= tol:
                    sigma, target, residual, r2 = cand, cand_target, cand_res, cand_r2
                    accepted = True
                    break
                alpha *= 0.5
            if not accepted:
                raise NoConvergenceError(
                    "Newton phase stopped making progress", residual=residual
                )
            it += 1
    if residual > tol:
        raise NoConvergenceError(
            f"residual {residual:.3e} > tol {tol:.1e} after {it} iterations",
            residual=residual,
        )
    if not _monotone_mod_2pi(sigma):
        raise NonmonotoneError(
            "converged correspondence is not increasing; domain out of reach"
        )

    w = boundary.center + spectral.trig_eval(rho_coeffs, sigma).real * np.exp(1j * sigma)
    c = np.fft.fft(w) / n
    half = n // 2
    mass = float(np.sum(np.abs(c)))
    leakage = float(np.sum(np.abs(c[half + 1:])) / mass) if mass > 0 else 0.0
    taylor = PowerSeries(c[:half])
    # sigma is stored as raw angle samples (it gains 2*pi per revolution;
    # its periodic part is sigma - t)
    return ConformalMap(center=boundary.center, rho=boundary.rho,
                        sigma=PeriodicSamples(sigma),
                        taylor=taylor, residual=residual, leakage=leakage,
                        near_circle_bound=near_circle, iterations=it)


def eval_conformal(m: ConformalMap, z):
    """Taylor evaluation of the map at |z| <= 1."""
    zz = np.asarray(z, dtype=np.complex128)
    if np.any(np.abs(zz) > 1.0 + 1e-12):
        raise DomainError("conformal map evaluated outside the closed disk")
    val = P.polyval(zz, m.taylor.coeffs)
    return val if np.ndim(z) else complex(val)


def _derivative_coeffs(m: ConformalMap) -> np.ndarray:
    c = m.taylor.coeffs
    return c[1:] * np.arange(1, c.size)

def invert_boundary(m: ConformalMap, w, tol: float = 1e-10,
                    max_iter: int = 60) -> float:
    """Angle t with |m(e^{it}) - w| <= tol, for w (near) the image boundary."""
    w = complex(w)
    dc = _derivative_coeffs(m)
    # initial guess: boundary sample closest to w
    t_grid = spectral.grid(m.n)
    zb = np.exp(1j * t_grid)
    vals = P.polyval(zb, m.taylor.coeffs)
    t = float(t_grid[int(np.argmin(np.abs(vals - w)))])
    for _ in range(max_iter):
        e = np.exp(1j * t)
        g = complex(P.polyval(e, m.taylor.coeffs)) - w
        if abs(g) <= tol:
            return float(t % (2.0 * np.pi))
        gp = 1j * e * complex(P.polyval(e, dc))
        if gp == 0:
            break
        step = (g / gp).real
        t -= step
    raise NoConvergenceError("boundary inversion did not converge", residual=abs(g))


def invert_point(m: ConformalMap, w, z0=None, tol: float = 1e-12,
                 max_iter: int = 80):
    """Interior preimage by damped Newton on the Taylor polynomial."""
    w = complex(w)
    dc = _derivative_coeffs(m)
    if z0 is None:
        rr = np.linspace(0.05, 0.95, 10)
        tt = spectral.grid(64)
        zg = (rr[:, None] * np.exp(1j * tt[None, :])).ravel()
        vg = P.polyval(zg, m.taylor.coeffs)
        z = complex(zg[int(np.argmin(np.abs(vg - w)))])
    else:
        z = complex(z0)
    for _ in range(max_iter):
        g = complex(P.polyval(z, m.taylor.coeffs)) - w
        if abs(g) <= tol:
            return z
        gp = complex(P.polyval(z, dc))
        if gp == 0:
            break
        step = g / gp
        znew = z - step
        halvings = 0
        while abs(znew) >= 1.0 and halvings < 60:
            step *= 0.5
            znew = z - step
            halvings += 1
        if halvings >= 60:
            break
        z = znew
    raise NoConvergenceError("interior inversion did not converge", residual=abs(g))
