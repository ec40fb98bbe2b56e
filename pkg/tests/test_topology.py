import numpy as np
import pytest

from harmap import certify, curves, spectral
from harmap.dirichlet import BoundaryCurve, HarmonicMap, boundary_trace, solve
from harmap.errors import (NonintegerError, PreconditionError,
                           UndersampledError, ZeroOnContourError)
from harmap.topology import (SampledLoop, critical_count, winding_number,
                             wn_identity_check, zeros_in_disk)

from conftest import kneser_curve


def derivative_loop(curve):
    w = spectral.PeriodicSamples(curve.complex_samples)
    return SampledLoop(spectral.diff_theta(w).values)


def test_loop_validation():
    with pytest.raises(ValueError):
        SampledLoop(np.array([1.0, 1.0] + [2.0] * 6, dtype=complex))


def test_winding_unit_circle_and_double():
    t = spectral.grid(256)
    assert winding_number(SampledLoop(1j * np.exp(1j * t))) == 1
    assert winding_number(SampledLoop(np.exp(2j * t))) == 2


def test_winding_ellipse_with_dense_oracle():
    crv = curves.ellipse(2.0, 1.0, 1024)
    assert winding_number(derivative_loop(crv)) == 1
    # oracle: dense argument sum of the analytic tangent
    t = np.linspace(0, 2 * np.pi, 200001)
    tang = -2 * np.sin(t) + 1j * np.cos(t)
    total = np.sum(np.angle(tang[1:] / tang[:-1]))
    assert round(total / (2 * np.pi)) == 1


def test_winding_undersampled():
    t = spectral.grid(8)
    with pytest.raises(UndersampledError):
        winding_number(SampledLoop(np.exp(3j * t)))


def test_winding_noninteger_guard():
    # closed loops always sum to multiples of 2*pi, so the residual guard
    # lives at the rounding layer
    from harmap.topology import _round_to_integer
    assert _round_to_integer(2 * np.pi * 1.01) == 1
    with pytest.raises(NonintegerError):
        _round_to_integer(2 * np.pi * 1.3)


def test_winding_reparametrization_invariant(rng):
    crv = curves.perturbed_circle(0.3, 512)
    base = winding_number(derivative_loop(crv))
    for _ in range(5):
        re = curves.reparametrize(crv, rng)
        assert winding_number(derivative_loop(re)) == base == 1


def test_zeros_in_disk_linear_roots():
    assert zeros_in_disk([1.0, 0.6], 1.0) == 0  # root at -1/0.6, outside
    assert zeros_in_disk([1.0, 1.4], 1.0) == 1  # root at -1/1.4, inside
    assert zeros_in_disk([0, 0, 0, 1.0], 1.0) == 3


def test_zeros_in_disk_contour_guard():
    with pytest.raises(ZeroOnContourError):
        zeros_in_disk([1.0, 1.0], 1.0)  # root at -1 on the contour


def test_zeros_in_disk_against_companion_roots(rng):
    for _ in range(40):
        deg = int(rng.integers(2, 13))
        c = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
        roots = np.roots(c[::-1])
        if np.min(np.abs(np.abs(roots) - 1.0)) < 1e-3:
            continue
        expected = int(np.sum(np.abs(roots) < 1.0))
        assert zeros_in_disk(c, 1.0) == expected


def test_critical_counts_conjugate_square_family():
    ident = solve(curves.circle(64))
    for alpha in np.linspace(0, 2 * np.pi, 7):
        assert critical_count(ident, alpha) == 0
    U3 = HarmonicMap([0, 1], [0, 0, 0.3])
    for alpha in np.linspace(0, 2 * np.pi, 16, endpoint=False):
        assert critical_count(U3, alpha) == 0
    U7 = HarmonicMap([0, 1], [0, 0, 0.7])
    assert critical_count(U7, 0.0) == 1
    # direct: f' = 1 + 1.4 z has its zero inside
    assert zeros_in_disk([1.0, 1.4], 1.0) == 1


def test_alpha_sweep_invariance(rng):
    # positive boundary Jacobian makes the count alpha-independent
    for _ in range(3):
        crv = kneser_curve(rng)
        U = solve(crv)
        counts = {critical_count(U, a)
                  for a in np.linspace(0, 2 * np.pi, 32, endpoint=False)}
        assert counts == {0}


def test_wn_identity_identity_map():
    crv = curves.circle(256)
    rep = wn_identity_check(solve(crv), crv)
    assert (rep.wn_f, rep.wn_phi, rep.critical_points, rep.consistent) == (1, 1, 0, True)


def test_wn_identity_conjugate_square():
    U = HarmonicMap([0, 1], [0, 0, 0.3])
    crv = boundary_trace(U, 256)
    rep = wn_identity_check(U, crv)
    assert rep.consistent and rep.wn_f == rep.wn_phi == 1 and rep.critical_points == 0


def test_wn_identity_kneser_case(rng):
    crv = kneser_curve(rng)
    rep = wn_identity_check(solve(crv), crv)
    assert rep.consistent and rep.wn_f == 1


def test_wn_identity_precondition():
    U = HarmonicMap([0, 1], [0, 0, 0.7])  # boundary Jacobian 1 - 1.96 < 0
    crv = boundary_trace(U, 256)
    with pytest.raises(PreconditionError):
        wn_identity_check(U, crv)
