"""Shear construction: harmonic diffeomorphisms with prescribed dilatation.

Given a univalent holomorphic f and a holomorphic omega with |omega| < 1 on
the closed disk, the canonical pair of the sheared map solves

    G' + H' = f',        omega * G' - H' = 0,

so G' = f'/(1 + omega) and H' = f' - G'.  The real part of U = G + conj(H)
equals the real part of f at coefficient level (H is literally f - G here),
and the dilatation H'/G' reproduces omega up to truncation error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as P

from . import certify, dirichlet, spectral
from .dirichlet import HarmonicMap
from .errors import (DilatationBoundError, PreconditionError, ReciprocalError,
                     TruncationError, ZeroOnContourError)

DEFAULT_ORDER = 128
TAIL_MASS_LIMIT = 1e-5    # mass fraction allowed in the last 8 coefficients
SUP_GRID = 4096           # boundary grid for sup-norm estimates
BOUND_SLACK = 1e-9        # |omega| must stay below 1 - BOUND_SLACK


@dataclass(frozen=True)
class PowerSeries:
    """Truncated Taylor series; arithmetic stays at the larger operand order."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=np.complex128)).copy()
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficients must form a non-empty 1-d array")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # -- constructors ------------------------------------------------------
    @classmethod
    def from_coeffs(cls, coeffs) -> "PowerSeries":
        return cls(np.asarray(coeffs, dtype=np.complex128))

    @classmethod
    def constant(cls, value, order: int = 0) -> "PowerSeries":
        c = np.zeros(order + 1, dtype=np.complex128)
        c[0] = value
        return cls(c)

    @classmethod
    def monomial(cls, value, power: int, order: Optional[int] = None) -> "PowerSeries":
        order = power if order is None else max(order, power)
        c = np.zeros(order + 1, dtype=np.complex128)
        c[power] = value
        return cls(c)

    # -- basics ------------------------------------------------------------
    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def pad(self, order: int) -> "PowerSeries":
        if order < self.order:
            raise ValueError("pad cannot reduce the order")
        c = np.zeros(order + 1, dtype=np.complex128)
        c[: self.coeffs.size] = self.coeffs
        return PowerSeries(c)

    def truncate(self, order: int) -> "PowerSeries":
        return PowerSeries(self.coeffs[: order + 1])

    def __call__(self, z):
        val = P.polyval(np.asarray(z, dtype=np.complex128), self.coeffs)
        return val if np.ndim(z) else complex(val)

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "PowerSeries":
        if isinstance(other, PowerSeries):
            return other
        return PowerSeries.constant(other)

    def __add__(self, other):
        o = self._coerce(other)
        k = max(self.order, o.order)
        return PowerSeries(self.pad(k).coeffs + o.pad(k).coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        k = max(self.order, o.order)
        return PowerSeries(self.pad(k).coeffs - o.pad(k).coeffs)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if np.isscalar(other) and not isinstance(other, PowerSeries):
            return PowerSeries(self.coeffs * other)
        o = self._coerce(other)
        k = max(self.order, o.order)
        full = np.convolve(self.coeffs, o.coeffs)
        return PowerSeries(full[: k + 1])

    __rmul__ = __mul__

    def __neg__(self):
        return PowerSeries(-self.coeffs)

    def reciprocal(self) -> "PowerSeries":
        """1/series at the same order; requires |c0| > 1e-12."""
        c = self.coeffs
        if abs(c[0]) <= 1e-12:
            raise ReciprocalError("constant term too small for a series reciprocal")
        k = self.order
        out = np.zeros(k + 1, dtype=np.complex128)
        out[0] = 1.0 / c[0]
        for m in range(1, k + 1):
            top = min(m, c.size - 1)
            acc = np.dot(c[1:top + 1], out[m - 1::-1][:top])
            out[m] = -acc / c[0]
        return PowerSeries(out)

    def differentiate(self) -> "PowerSeries":
        if self.order == 0:
            return PowerSeries.constant(0.0)
        return PowerSeries(self.coeffs[1:] * np.arange(1, self.coeffs.size))

    def integrate(self, constant=0.0) -> "PowerSeries":
        out = np.zeros(self.coeffs.size + 1, dtype=np.complex128)
        out[0] = constant
        out[1:] = self.coeffs / np.arange(1, self.coeffs.size + 1)
        return PowerSeries(out)

    # -- diagnostics ---------------------------------------------------------
    def boundary_sup(self, n: int = SUP_GRID) -> float:
        z = np.exp(1j * 2.0 * np.pi * np.arange(n) / n)
        return float(np.max(np.abs(P.polyval(z, self.coeffs))))

    def tail_mass(self, count: int = 8) -> float:
        """Mass fraction in the last ``count`` coefficients (trailing half if shorter)."""
        mags = np.abs(self.coeffs)
        total = float(np.sum(mags))
        if total == 0.0:
            return 0.0
        count = min(count, max(1, mags.size // 2))
        return float(np.sum(mags[-count:]) / total)


@dataclass(frozen=True)
class DilatationSpec:
    """A dilatation series together with its estimated boundary sup-norm."""

    omega: PowerSeries
    sup_bound: float

    @classmethod
    def from_series(cls, omega) -> "DilatationSpec":
        if not isinstance(omega, PowerSeries):
            omega = PowerSeries.from_coeffs(omega)
        return cls(omega=omega, sup_bound=omega.boundary_sup())


def _as_spec(omega) -> DilatationSpec:
    if isinstance(omega, DilatationSpec):
        return omega
    return DilatationSpec.from_series(omega)


def shear_construct(f: PowerSeries, omega, order: Optional[int] = None,
                    check_univalence: bool = True) -> HarmonicMap:
    """Build the harmonic map with Re U = Re f and dilatation omega.

    Raises DilatationBoundError when sup |omega| >= 1 (within slack),
    TruncationError when the series arithmetic sheds too much tail mass, and
    PreconditionError when the univalence screening of f fails.
    """
    spec = _as_spec(omega)
    if spec.sup_bound >= 1.0 - BOUND_SLACK:
        raise DilatationBoundError(
            f"sup |omega| = {spec.sup_bound:.6f} is not strictly below 1"
        )
    k = max(DEFAULT_ORDER if order is None else order, f.order, spec.omega.order)
    fk = f.pad(k)
    fp = fk.differentiate().pad(k)

    zb = np.exp(1j * 2.0 * np.pi * np.arange(SUP_GRID) / SUP_GRID)
    fpb = np.abs(P.polyval(zb, fp.coeffs))
    if float(np.min(fpb)) < 1e-9 * max(float(np.max(fpb)), 1e-300):
        raise ZeroOnContourError("f' (nearly) vanishes on the boundary grid")

    if check_univalence:
        n = 2048
        trace = P.polyval(np.exp(1j * 2.0 * np.pi * np.arange(n) / n), fk.coeffs)
        scale = max(float(np.max(np.abs(trace - trace.mean()))), 1e-300)
        if not certify.loop_is_injective(trace, 1e-9 * scale):
            raise PreconditionError("f is not univalent: boundary loop self-intersects")

    den = spec.omega.pad(k) + 1.0
    recip = den.reciprocal()
    if recip.tail_mass() > TAIL_MASS_LIMIT:
        raise TruncationError(
            "1/(1 + omega) sheds too much tail mass at this order; increase it"
        )
    gp = (fp * recip).truncate(k - 1 if k >= 1 else 0)
    if gp.tail_mass() > TAIL_MASS_LIMIT:
        raise TruncationError("G' sheds too much tail mass at this order")

    G = gp.integrate(constant=fk.coeffs[0]).truncate(k)
    H = fk - G  # exact coefficient-level complement: G + H == f
    return HarmonicMap(G.coeffs, H.coeffs)


def dilatation(U: HarmonicMap) -> PowerSeries:
    """omega = H'/G' of the canonical pair, truncated at the pair's order."""
    gp = PowerSeries(U.g_coeffs).differentiate()
    hp = PowerSeries(U.h_coeffs).differentiate()
    if abs(gp.coeffs[0]) < 1e-12:
        raise ReciprocalError("G'(0) is (nearly) zero; dilatation undefined")
    k = max(gp.order, hp.order)
    return (hp.pad(k) * gp.pad(k).reciprocal()).truncate(k)


@dataclass(frozen=True)
class EquivalenceReport:
    jacobian_positive_boundary: bool
    u_boundary_injective: Optional[bool]
    f_boundary_injective: Optional[bool]
    all_consistent: Optional[bool]
    indeterminate: bool


def verify_equivalences(U: HarmonicMap, n: int = 2048) -> EquivalenceReport:
    """Sampled check that U|dB and f|dB are injective together.

    Requires det DU > 0 on the boundary grid; otherwise the report is
    returned as indeterminate with no verdicts.
    """
    z = np.exp(1j * 2.0 * np.pi * np.arange(n) / n)
    jac = dirichlet.eval_jacobian(U, z)
    margin = certify.MARGIN_FACTOR * float(np.max(np.abs(jac)))
    if float(np.min(jac)) <= margin:
        return EquivalenceReport(jacobian_positive_boundary=False,
                                 u_boundary_injective=None,
                                 f_boundary_injective=None,
                                 all_consistent=None, indeterminate=True)
    uvals = dirichlet.evaluate(U, z)
    fvals = P.polyval(z, dirichlet.analytic_f(U))

    def injective(vals):
        scale = max(float(np.max(np.abs(vals - vals.mean()))), 1e-300)
        return certify.loop_is_injective(vals, 1e-9 * scale)

    ui = injective(uvals)
    fi = injective(fvals)
    return EquivalenceReport(jacobian_positive_boundary=True,
                             u_boundary_injective=ui, f_boundary_injective=fi,
                             all_consistent=(ui == fi), indeterminate=False)
