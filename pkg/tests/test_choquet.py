import numpy as np
import pytest

from harmap import certify, curves
from harmap.choquet import (AffineMap, CounterexampleBundle, base_map_F,
                            build_counterexample, build_scaffold, eta_curve,
                            F_inverse_branch)
from harmap.dirichlet import eval_jacobian, evaluate, solve
from harmap.errors import ConvexInputError, DomainError


@pytest.fixture(scope="module")
def ushape_bundle():
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return build_counterexample(curves.u_shape(1024))


@pytest.fixture(scope="module")
def trefoil_bundle():
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return build_counterexample(curves.trefoil_dents(1024))


def test_base_map_values():
    assert base_map_F(0.0) == 0.0
    assert base_map_F(1.0 + 1.0j) == 1.0 + 0.0j
    assert abs(base_map_F(0.5 - 0.2j) - (0.5 + 0.21j)) < 1e-15


def test_inverse_branch():
    assert abs(F_inverse_branch(1.0 + 0.0j, +1) - (1.0 + 1.0j)) < 1e-15
    assert abs(F_inverse_branch(1.0 + 0.0j, -1) - (1.0 - 1.0j)) < 1e-15
    w = 0.5 + 0.21j
    assert abs(F_inverse_branch(w, -1) - (0.5 - 0.2j)) < 1e-12
    assert abs(base_map_F(F_inverse_branch(w, +1)) - w) < 1e-12
    with pytest.raises(DomainError):
        F_inverse_branch(0.0 + 1.0j, +1)
    with pytest.raises(ValueError):
        F_inverse_branch(1.0 + 0.0j, 2)


def test_affine_map_roundtrip(rng):
    m = rng.standard_normal((2, 2)) + np.eye(2)
    T = AffineMap(m, rng.standard_normal(2))
    z = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    back = T.inverse().apply(T.apply(z))
    assert np.max(np.abs(back - z)) < 1e-12


def test_scaffold_requires_nonconvex():
    with pytest.raises(ConvexInputError):
        build_scaffold(curves.circle(512))
    with pytest.raises(ConvexInputError):
        build_scaffold(curves.ellipse(2.0, 1.0, 512))


def test_scaffold_geometry(ushape_bundle):
    sc = ushape_bundle.scaffold
    pts = sc.curve.complex_samples
    # bridge midpoint, perpendicular march, cone vertex between C and X
    assert abs(sc.midpoint - (sc.bridge_a + sc.bridge_b) / 2) < 1e-12
    assert sc.p > 0
    # normalization anchors
    T = sc.affine
    assert abs(T.apply(sc.contact_a) - (sc.p + 1j * sc.p ** 2)) < 1e-8
    assert abs(T.apply(sc.contact_b) - (-sc.p + 1j * sc.p ** 2)) < 1e-8
    assert abs(T.apply(sc.vertex) - (-1j * sc.p ** 2)) < 1e-8
    assert T.det > 0
    # normalized samples never cross the parabola
    wn = T.apply(pts)
    assert float(np.max(wn.imag - wn.real ** 2)) <= 1e-7
    # the open bridge segment stays outside the region
    ts = np.linspace(0.2, 0.8, 13)
    seg = sc.bridge_a + ts * (sc.bridge_b - sc.bridge_a)
    assert not np.any(certify.points_in_polygon(seg, pts))


def test_gamma_curve_junctions(ushape_bundle):
    sc = ushape_bundle.scaffold
    g = ushape_bundle.gamma_curve.complex_samples
    n = g.size
    assert abs(g[0] - sc.p) < 1e-10           # junction at theta = 0
    assert abs(g[n // 2] + sc.p) < 1e-10      # junction at theta = pi
    assert np.max(np.abs(g[1:n // 2].imag)) > 0  # upper lift strictly above
    assert np.all(g[1:n // 2].imag >= 0)
    assert np.all(g[n // 2 + 1:].imag <= 0)
    assert certify.signed_area(g) > 0


@pytest.mark.parametrize("bundle_name", ["ushape_bundle", "trefoil_bundle"])
def test_bundle_invariants(bundle_name, request):
    b: CounterexampleBundle = request.getfixturevalue(bundle_name)
    d = b.diagnostics
    assert d["eta_max_abs_det"] <= 1e-6
    assert d["eta_sign_flip_fraction"] >= 0.95
    assert d["eta_parabola_error"] <= 1e-7
    assert d["phi_verdict"] == "not_invertible"
    assert d["phi_min_jacobian"] < 0
    diam = float(np.ptp(b.target_normalized.real))
    assert d["phi_target_distance"] <= 1e-6 * max(diam, np.ptp(b.target_normalized.imag))
    assert b.eta.size >= 256
    assert len(b.witnesses) >= 1
    for z1, z2 in b.witnesses:
        assert abs(z1 - z2) >= 0.05
        assert abs(evaluate(b.U, z1) - evaluate(b.U, z2)) <= 1e-8


def test_eta_is_the_fold(ushape_bundle):
    b = ushape_bundle
    eta = eta_curve(b)
    assert eta is b.eta and eta.size >= 256
    assert np.all(np.abs(eta) < 1.0)
    # the image lies on the parabola, strictly outside the closed target
    img = evaluate(b.U, eta)
    assert np.max(np.abs(img.imag - img.real ** 2)) <= 1e-7
    assert not np.any(certify.points_in_polygon(img, b.target_normalized))
    # injective along the fold: abscissas strictly increase
    assert np.all(np.diff(b.eta_x) > 0)
    assert np.max(np.abs(img.real - b.eta_x)) < 1e-9
    # fold endpoints head toward the junction preimages on the circle
    assert abs(eta[0]) > 0.8 and abs(eta[-1]) > 0.8


def test_emitted_boundary_data(ushape_bundle):
    b = ushape_bundle
    reg = certify.check_regularity(b.phi)
    assert reg.is_simple and reg.orientation == 1
    rep = certify.certify_full(b.phi)
    assert rep.verdict == "not_invertible"
    jv = rep.jacobian_boundary.values
    bad = np.nonzero(jv < -rep.margin)[0]
    assert bad.size > 0
    assert set(bad.tolist()) <= set(rep.partition.gamma_nc_indices.tolist())
    assert rep.gamma_c_min > -rep.margin


def test_bundle_map_is_harmonic(ushape_bundle):
    U = ushape_bundle.U
    h = 1e-4
    rng = np.random.default_rng(5)
    for _ in range(12):
        z = rng.uniform(0.1, 0.8) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        stencil = [evaluate(U, z + dz) for dz in (h, -h, 1j * h, -1j * h)]
        lap = (sum(stencil) - 4 * evaluate(U, z)) / h / h
        assert abs(lap) < 1e-6


def test_jacobian_field_sees_the_fold(ushape_bundle):
    from harmap.dirichlet import jacobian_field
    field = jacobian_field(ushape_bundle.U, 48, 192)
    assert field.min_value < 0
    assert np.max(field.values) > 0


def test_solve_of_phi_matches_certify(ushape_bundle):
    # the Hilbert-transform boundary formula equals the extension's boundary
    # Jacobian for the emitted data as well
    import warnings
    b = ushape_bundle
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        U = solve(b.phi)
        J = certify.boundary_jacobian(b.phi).values
    zb = np.exp(1j * b.phi.thetas)
    interior = eval_jacobian(U, zb)
    scale = np.max(np.abs(J))
    assert np.max(np.abs(J - interior)) <= 1e-8 * max(scale, 1.0)
