"""Invertibility certification for harmonic extensions, from boundary data alone.

The boundary Jacobian of the harmonic extension U of Phi = (phi, psi) is
computable without solving anything in the interior:

    J(theta) = psi' * H(phi') - phi' * H(psi')      on the unit circle,

with H the conjugate-function operator of :mod:`harmap.spectral` (the sign
of the formula is pinned by the identity-map oracle J == 1).  U is a
diffeomorphism onto its simple image exactly when the data is an
orientation-preserving C^1 circle diffeomorphism and J > 0 everywhere; it
suffices to check J > 0 on the preimage of the non-convex part of the
target boundary, since J > 0 holds automatically over the convex part.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import dirichlet, spectral, topology
from .dirichlet import BoundaryCurve
from .errors import DegenerateCurveError, HarmapError
from .spectral import PeriodicSamples

try:  # scipy >= 1.8 re-exports QhullError at the package level
    from scipy.spatial import ConvexHull, QhullError
except ImportError:  # pragma: no cover
    from scipy.spatial import ConvexHull
    from scipy.spatial.qhull import QhullError

INVERTIBLE = "invertible"
NOT_INVERTIBLE = "not_invertible"
INDETERMINATE = "indeterminate"

MARGIN_FACTOR = 1e-9   # positivity margin relative to max |J|
HULL_TOLERANCE = 1e-9  # hull-membership distance relative to diameter
SPEED_FLOOR = 1e-8     # min |Phi'| relative to max |Phi'| for a C^1 diffeo


# ---------------------------------------------------------------------------
# polygon primitives


def polygon_is_simple(points: np.ndarray, block: int = 256) -> bool:
    """Whether the closed polygon through ``points`` has no self-intersection.

    All-pairs segment test, vectorized in row blocks; adjacent segments share
    an endpoint and are exempt.  Exact touching of non-adjacent segments
    counts as an intersection.
    """
    p = np.asarray(points, dtype=np.complex128)
    n = p.size
    if n < 3:
        raise DegenerateCurveError("a polygon needs at least 3 points")
    a = p
    b = np.roll(p, -1)
    ax, ay, bx, by = a.real, a.imag, b.real, b.imag
    minx, maxx = np.minimum(ax, bx), np.maximum(ax, bx)
    miny, maxy = np.minimum(ay, by), np.maximum(ay, by)

    def cross(ox, oy, ux, uy, vx, vy):
        return (ux - ox) * (vy - oy) - (uy - oy) * (vx - ox)

    idx = np.arange(n)
    for start in range(0, n, block):
        rows = idx[start:start + block]
        # candidate partners strictly above the row index, excluding neighbors
        jj = idx[None, :]
        ii = rows[:, None]
        sep = (jj - ii) % n
        cand = (jj > ii) & (sep != 1) & (sep != n - 1)
        # bounding-box prefilter
        cand &= ~((minx[jj] > maxx[ii]) | (maxx[jj] < minx[ii]) |
                  (miny[jj] > maxy[ii]) | (maxy[jj] < miny[ii]))
        if not np.any(cand):
            continue
        i2, j2 = np.nonzero(cand)
        i2 = rows[i2]
        d1 = cross(ax[i2], ay[i2], bx[i2], by[i2], ax[j2], ay[j2])
        d2 = cross(ax[i2], ay[i2], bx[i2], by[i2], bx[j2], by[j2])
        d3 = cross(ax[j2], ay[j2], bx[j2], by[j2], ax[i2], ay[i2])
        d4 = cross(ax[j2], ay[j2], bx[j2], by[j2], bx[i2], by[i2])
        proper = (d1 * d2 < 0) & (d3 * d4 < 0)
        touching = ((d1 == 0) | (d2 == 0) | (d3 == 0) | (d4 == 0)) & \
                   (d1 * d2 <= 0) & (d3 * d4 <= 0)
        if np.any(proper | touching):
            return False
    return True


def points_in_polygon(pts: np.ndarray, poly: np.ndarray) -> np.ndarray:
    """Even-odd (crossing number) point-in-polygon test, vectorized."""
    pts = np.asarray(pts, dtype=np.complex128)
    poly = np.asarray(poly, dtype=np.complex128)
    x, y = pts.real[:, None], pts.imag[:, None]
    px, py = poly.real[None, :], poly.imag[None, :]
    qx, qy = np.roll(poly.real, -1)[None, :], np.roll(poly.imag, -1)[None, :]
    straddle = (py <= y) != (qy <= y)
    denom = np.where(qy - py == 0.0, 1.0, qy - py)
    xint = px + (y - py) / denom * (qx - px)
    crossings = np.sum(straddle & (x < xint), axis=1)
    return crossings % 2 == 1


def distance_to_polyline(pts: np.ndarray, poly: np.ndarray,
                         closed: bool = True) -> np.ndarray:
    """Euclidean distance from each point to a (closed) polyline."""
    pts = np.asarray(pts, dtype=np.complex128)
    poly = np.asarray(poly, dtype=np.complex128)
    a = poly if closed else poly[:-1]
    b = np.roll(poly, -1) if closed else poly[1:]
    seg = b - a
    seglen2 = np.maximum(np.abs(seg) ** 2, 1e-300)
    out = np.empty(pts.size, dtype=np.float64)
    block = max(1, int(2_000_000 // max(a.size, 1)))
    for s in range(0, pts.size, block):
        p = pts[s:s + block, None]
        t = np.clip(((p - a[None, :]) * np.conj(seg[None, :])).real / seglen2[None, :],
                    0.0, 1.0)
        d = np.abs(p - (a[None, :] + t * seg[None, :]))
        out[s:s + block] = d.min(axis=1)
    return out


def loop_is_injective(points: np.ndarray, tol: float) -> bool:
    """Simple polygon and no coincident non-neighbor samples (within tol)."""
    p = np.asarray(points, dtype=np.complex128)
    n = p.size
    if not polygon_is_simple(p):
        return False
    idx = np.arange(n)
    block = 256
    for start in range(0, n, block):
        rows = idx[start:start + block]
        sep = (idx[None, :] - rows[:, None]) % n
        cand = (idx[None, :] > rows[:, None]) & (sep != 1) & (sep != n - 1)
        d = np.abs(p[None, :] - p[rows][:, None])
        if np.any(cand & (d < tol)):
            return False
    return True


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class RegularityReport:
    is_simple: bool
    is_c1_diffeo: bool
    orientation: int
    min_speed: float
    max_speed: float
    tail_fraction: float


@dataclass(frozen=True)
class ConvexPartition:
    gamma_c_indices: np.ndarray
    gamma_nc_indices: np.ndarray
    hull_vertices: np.ndarray   # hull polygon, complex, counterclockwise
    hull_indices: np.ndarray    # sample indices of the hull vertices
    diameter: float


@dataclass(frozen=True)
class CertificateReport:
    jacobian_boundary: PeriodicSamples
    min_jacobian: float
    argmin_theta: float
    verdict: str
    margin: float
    checked_indices: np.ndarray
    checked_min: float
    regularity: RegularityReport
    partition: Optional[ConvexPartition]
    wn_report: Optional[topology.WindingReport]
    gamma_c_min: Optional[float]
    reasons: tuple


# ---------------------------------------------------------------------------
# operations


def boundary_jacobian(curve: BoundaryCurve) -> PeriodicSamples:
    """det DU on the boundary grid, from the boundary data alone."""
    dphi = spectral.diff_theta(curve.phi)
    dpsi = spectral.diff_theta(curve.psi)
    j = dpsi.values * spectral.hilbert(dphi).values \
        - dphi.values * spectral.hilbert(dpsi).values
    return PeriodicSamples(j)


def signed_area(points: np.ndarray) -> float:
    p = np.asarray(points, dtype=np.complex128)
    q = np.roll(p, -1)
    return 0.5 * float(np.sum(p.real * q.imag - q.real * p.imag))


def check_regularity(curve: BoundaryCurve) -> RegularityReport:
    """Simplicity, C^1-diffeomorphism quality and orientation of the data."""
    pts = curve.complex_samples
    w = spectral.PeriodicSamples(pts)
    import warnings as _warnings
    with _warnings.catch_warnings():
        _warnings.simplefilter("ignore")
        speed = np.abs(spectral.diff_theta(w).values)
    tail = spectral.tail_fraction(w)
    min_speed = float(np.min(speed))
    max_speed = float(np.max(speed))
    area = signed_area(pts)
    orientation = 1 if area > 0 else (-1 if area < 0 else 0)
    simple = polygon_is_simple(pts)
    c1 = (min_speed > SPEED_FLOOR * max_speed) and (tail <= spectral.TAIL_TOLERANCE)
    return RegularityReport(is_simple=simple, is_c1_diffeo=c1,
                            orientation=orientation, min_speed=min_speed,
                            max_speed=max_speed, tail_fraction=tail)


def convex_partition(curve_or_points) -> ConvexPartition:
    """Split boundary samples into convex-part and non-convex-part index sets.

    A sample belongs to the convex part when it lies within
    HULL_TOLERANCE * diameter of the boundary of the convex hull of the
    image polygon.
    """
    if isinstance(curve_or_points, BoundaryCurve):
        pts = curve_or_points.complex_samples
    else:
        pts = np.asarray(curve_or_points, dtype=np.complex128)
    n = pts.size
    xy = np.column_stack([pts.real, pts.imag])
    try:
        hull = ConvexHull(xy)
    except QhullError as exc:
        raise DegenerateCurveError(f"convex hull failed: {exc}") from exc
    hidx = hull.vertices.astype(int)  # counterclockwise
    hpts = pts[hidx]
    diam = 0.0
    for v in hpts:
        diam = max(diam, float(np.max(np.abs(hpts - v))))
    if diam < 1e-12:
        raise DegenerateCurveError("curve diameter is below 1e-12")
    dist = distance_to_polyline(pts, hpts, closed=True)
    on_hull = dist <= HULL_TOLERANCE * diam
    on_hull[hidx] = True
    idx = np.arange(n)
    return ConvexPartition(gamma_c_indices=idx[on_hull],
                           gamma_nc_indices=idx[~on_hull],
                           hull_vertices=hpts, hull_indices=hidx,
                           diameter=diam)


def _certify(curve: BoundaryCurve, nonconvex_only: bool) -> CertificateReport:
    reg = check_regularity(curve)
    J = boundary_jacobian(curve)
    jv = J.values
    margin = MARGIN_FACTOR * float(np.max(np.abs(jv)))
    partition = None
    reasons = []
    try:
        partition = convex_partition(curve)
    except DegenerateCurveError as exc:
        reasons.append(f"degenerate image: {exc}")

    n = curve.n
    if nonconvex_only and partition is not None:
        checked = partition.gamma_nc_indices
    else:
        checked = np.arange(n)
    checked_min = float(np.min(jv[checked])) if checked.size else float("inf")
    gamma_c_min = None
    if partition is not None and partition.gamma_c_indices.size:
        gamma_c_min = float(np.min(jv[partition.gamma_c_indices]))

    argmin = int(np.argmin(jv))
    reg_ok = reg.is_simple and reg.is_c1_diffeo and reg.orientation == 1
    if not reg.is_simple:
        reasons.append("image curve is not simple")
    if not reg.is_c1_diffeo:
        reasons.append("parametrization is not a C^1 diffeomorphism at grid resolution")
    if reg.orientation != 1:
        reasons.append("parametrization is not orientation-preserving")
    if checked_min < -margin:
        reasons.append("boundary Jacobian is negative on the checked set")

    if not reg_ok or checked_min < -margin or partition is None and nonconvex_only:
        verdict = NOT_INVERTIBLE
    elif checked_min > margin:
        verdict = INVERTIBLE
    else:
        verdict = INDETERMINATE
        reasons.append("minimum boundary Jacobian is within the resolution margin")

    wn_report = None
    if verdict == INVERTIBLE and float(np.min(jv)) > margin:
        try:
            wn_report = topology.wn_identity_check(dirichlet.solve(curve), curve)
        except HarmapError:
            wn_report = None

    return CertificateReport(
        jacobian_boundary=J,
        min_jacobian=float(jv[argmin]),
        argmin_theta=float(curve.thetas[argmin]),
        verdict=verdict,
        margin=margin,
        checked_indices=checked,
        checked_min=checked_min,
        regularity=reg,
        partition=partition,
        wn_report=wn_report,
        gamma_c_min=gamma_c_min,
        reasons=tuple(reasons),
    )


def certify_full(curve: BoundaryCurve) -> CertificateReport:
    """Full-boundary criterion: J > 0 everywhere on the circle."""
    return _certify(curve, nonconvex_only=False)


def certify_nonconvex(curve: BoundaryCurve) -> CertificateReport:
    """Refined criterion: J > 0 demanded only over the non-convex part.

    Positivity over the convex part is reported (gamma_c_min) as a sanity
    value but never required.
    """
    return _certify(curve, nonconvex_only=True)


def is_convex_in_direction(points, theta: float) -> bool:
    """Whether every line parallel to e^{i theta} meets the region in one piece.

    Implemented on the sampled Jordan curve: scan the family of lines
    x sin(theta) - y cos(theta) = c over sample-induced c values and count
    boundary crossings; more than two crossings for some line means the
    region is not convex in that direction.
    """
    p = np.asarray(points, dtype=np.complex128)
    if p.size < 3:
        raise DegenerateCurveError("need at least 3 points")
    if float(np.ptp(p.real)) < 1e-12 and float(np.ptp(p.imag)) < 1e-12:
        raise DegenerateCurveError("curve diameter is below 1e-12")
    s = p.real * np.sin(theta) - p.imag * np.cos(theta)
    levels = np.unique(s)
    if levels.size < 2:
        return True
    cs = 0.5 * (levels[:-1] + levels[1:])
    snext = np.roll(s, -1)
    block = max(1, int(2_000_000 // max(s.size, 1)))
    for b in range(0, cs.size, block):
        cb = cs[b:b + block, None]
        crossings = np.sum((s[None, :] - cb) * (snext[None, :] - cb) < 0, axis=1)
        if np.any(crossings > 2):
            return False
    return True
