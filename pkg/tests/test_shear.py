import numpy as np
import pytest

from harmap import curves
from harmap.certify import certify_full
from harmap.dirichlet import (analytic_f, boundary_trace, eval_jacobian,
                              evaluate, solve)
from harmap.errors import (DilatationBoundError, PreconditionError,
                           ReciprocalError, TruncationError)
from harmap.shear import (DilatationSpec, PowerSeries, dilatation,
                          shear_construct, verify_equivalences)


def test_series_arithmetic():
    a = PowerSeries.from_coeffs([1.0, 2.0, 3.0])
    b = PowerSeries.from_coeffs([0.5, -1.0])
    assert np.allclose((a + b).coeffs, [1.5, 1.0, 3.0])
    assert np.allclose((a - b).coeffs, [0.5, 3.0, 3.0])
    prod = a * b
    assert np.allclose(prod.coeffs, [0.5, 0.0, -0.5])  # truncated at order 2
    assert np.allclose((2.0 * a).coeffs, [2.0, 4.0, 6.0])
    d = a.differentiate()
    assert np.allclose(d.coeffs, [2.0, 6.0])
    i = d.integrate(constant=1.0)
    assert np.allclose(i.coeffs, [1.0, 2.0, 3.0])
    z = 0.3 + 0.1j
    assert abs(a(z) - (1 + 2 * z + 3 * z * z)) < 1e-15


def test_series_reciprocal():
    a = PowerSeries.from_coeffs([1.0, 0.6, 0.0, 0.0, 0.0, 0.0])
    r = a.reciprocal()
    expect = [(-0.6) ** k for k in range(6)]
    assert np.max(np.abs(r.coeffs - expect)) < 1e-14
    prod = (a * r).coeffs
    assert abs(prod[0] - 1.0) < 1e-14 and np.max(np.abs(prod[1:])) < 1e-14
    with pytest.raises(ReciprocalError):
        PowerSeries.from_coeffs([0.0, 1.0]).reciprocal()


def test_series_reciprocal_against_random(rng):
    for _ in range(20):
        k = int(rng.integers(3, 30))
        c = rng.standard_normal(k) / 3 + 1j * rng.standard_normal(k) / 3
        c[0] = 1.0 + 0.2 * c[0]
        s = PowerSeries(c)
        prod = (s * s.reciprocal()).coeffs
        assert abs(prod[0] - 1.0) < 1e-12
        assert np.max(np.abs(prod[1:])) < 1e-10


def test_dilatation_spec_sup():
    spec = DilatationSpec.from_series(PowerSeries.from_coeffs([0.0, 0.6]))
    assert abs(spec.sup_bound - 0.6) < 1e-12


def test_shear_identity_and_constant():
    f = PowerSeries.from_coeffs([0.0, 1.0])
    U = shear_construct(f, PowerSeries.from_coeffs([0.0]), order=16)
    assert abs(U.g_coeffs[1] - 1.0) < 1e-15
    assert np.max(np.abs(U.h_coeffs)) < 1e-15

    U = shear_construct(f, PowerSeries.from_coeffs([0.5]), order=16)
    # hand solution: G' = 1/1.5, H' = 0.5/1.5
    assert abs(U.g_coeffs[1] - 2.0 / 3.0) < 1e-15
    assert abs(U.h_coeffs[1] - 1.0 / 3.0) < 1e-15
    assert abs(eval_jacobian(U, 0.2 + 0.1j) - 1.0 / 3.0) < 1e-14


def test_shear_re_part_exact_bitlevel():
    f = PowerSeries.from_coeffs([0.0, 1.0])
    for omega in ([0.0], [0.5], [0.0, 0.6], [0.0, 0.0, 0.8]):
        U = shear_construct(f, PowerSeries.from_coeffs(omega), order=128)
        assert np.array_equal(analytic_f(U), f.pad(128).coeffs)


def test_shear_dilatation_roundtrip():
    f = PowerSeries.from_coeffs([0.0, 1.0])
    zb = np.exp(1j * np.linspace(0, 2 * np.pi, 733))
    for omega in ([0.0], [0.5], [0.0, 0.6], [0.0, 0.0, 0.8]):
        om = PowerSeries.from_coeffs(omega)
        U = shear_construct(f, om, order=128)
        back = dilatation(U)
        assert np.max(np.abs(back(zb) - om(zb))) < 1e-10
    # series case from the contract: omega = 0.6 z at K = 64
    om = PowerSeries.from_coeffs([0.0, 0.6])
    U = shear_construct(f, om, order=64)
    assert abs(U.g_coeffs[1] - 1.0) < 1e-15  # G' = sum (-0.6 z)^k
    assert abs(U.g_coeffs[2] + 0.3) < 1e-15
    assert np.max(np.abs(dilatation(U)(zb) - om(zb))) < 1e-10


def test_shear_bound_and_truncation_errors():
    f = PowerSeries.from_coeffs([0.0, 1.0])
    with pytest.raises(DilatationBoundError):
        shear_construct(f, PowerSeries.from_coeffs([1.01]))
    with pytest.raises(DilatationBoundError):
        shear_construct(f, PowerSeries.from_coeffs([1.0 - 1e-12]))
    with pytest.raises(TruncationError):
        shear_construct(f, PowerSeries.from_coeffs([0.0, 0.99]), order=128)


def test_shear_univalence_screen():
    f2 = PowerSeries.from_coeffs([0.0, 0.0, 1.0])  # z^2 double-covers
    with pytest.raises(PreconditionError):
        shear_construct(f2, PowerSeries.from_coeffs([0.2]), order=16)


def test_shear_jacobian_identity_on_grid():
    f = PowerSeries.from_coeffs([0.0, 1.0])
    om = PowerSeries.from_coeffs([0.0, 0.6])
    U = shear_construct(f, om, order=96)
    gp = PowerSeries(U.g_coeffs).differentiate()
    z = 0.7 * np.exp(1j * np.linspace(0, 2 * np.pi, 65))
    lhs = eval_jacobian(U, z)
    rhs = np.abs(gp(z)) ** 2 * (1 - np.abs(om(z)) ** 2)
    assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_shear_end_to_end_certification():
    f = PowerSeries.from_coeffs([0.0, 1.0])
    for omega in ([0.0], [0.5], [0.0, 0.6], [0.0, 0.0, 0.8]):
        U = shear_construct(f, PowerSeries.from_coeffs(omega), order=128)
        trace = boundary_trace(U, 1024)
        assert certify_full(trace).verdict == "invertible"


def test_dilatation_of_stored_pairs():
    ident = solve(curves.circle(64))
    d = dilatation(ident)
    assert np.max(np.abs(d.coeffs)) < 1e-12
    from harmap.dirichlet import HarmonicMap
    U = HarmonicMap([0, 1], [0, 0, 0.3])
    d = dilatation(U)
    assert abs(d.coeffs[1] - 0.6) < 1e-14
    with pytest.raises(ReciprocalError):
        dilatation(HarmonicMap([0, 0, 1.0], [0.0]))


def test_verify_equivalences_identity_and_square():
    rep = verify_equivalences(solve(curves.circle(64)))
    assert rep.u_boundary_injective and rep.f_boundary_injective
    assert rep.all_consistent and not rep.indeterminate

    from harmap.dirichlet import HarmonicMap
    rep = verify_equivalences(HarmonicMap([0, 1], [0, 0, 0.3]))
    assert rep.u_boundary_injective and rep.f_boundary_injective and rep.all_consistent

    # z^2 has positive boundary Jacobian but neither restriction is injective
    rep = verify_equivalences(HarmonicMap([0, 0, 1.0], [0.0]))
    assert rep.jacobian_positive_boundary
    assert rep.u_boundary_injective is False
    assert rep.f_boundary_injective is False
    assert rep.all_consistent

    # negative boundary Jacobian: indeterminate
    rep = verify_equivalences(HarmonicMap([0, 1], [0, 0, 0.7]))
    assert rep.indeterminate and rep.all_consistent is None


def test_equivalence_probe_random_pairs(rng):
    # random pairs with certified-positive boundary Jacobian: the two
    # injectivity verdicts must agree (disagreement would be a bug)
    from harmap.dirichlet import HarmonicMap
    checked = 0
    while checked < 25:
        kg = int(rng.integers(1, 4))
        g = np.zeros(6, dtype=complex)
        g[kg] = 1.0
        g += 0.2 * (rng.standard_normal(6) + 1j * rng.standard_normal(6)) / \
            np.arange(1, 7) ** 2
        h = 0.25 * (rng.standard_normal(6) + 1j * rng.standard_normal(6)) / \
            np.arange(1, 7) ** 2
        h[0] = 0.0
        U = HarmonicMap(g, h)
        rep = verify_equivalences(U)
        if rep.indeterminate:
            continue
        checked += 1
        assert rep.all_consistent
