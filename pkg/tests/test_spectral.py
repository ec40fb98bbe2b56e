import numpy as np
import pytest

from harmap import spectral
from harmap.errors import AliasingError, TailWarning
from harmap.spectral import (PeriodicSamples, diff_theta, from_fourier, grid,
                             hilbert, to_fourier, trig_eval)

from conftest import pv_hilbert_oracle


def test_samples_validation():
    with pytest.raises(ValueError):
        PeriodicSamples(np.ones(7))
    with pytest.raises(ValueError):
        PeriodicSamples(np.ones(12))  # not a power of two
    with pytest.raises(ValueError):
        PeriodicSamples(np.array([np.nan] + [0.0] * 7))
    s = PeriodicSamples(np.ones(8))
    assert s.n == 8 and s.is_real
    with pytest.raises(ValueError):
        s.values[0] = 2.0  # frozen


def test_to_fourier_single_mode():
    t = grid(16)
    c = to_fourier(PeriodicSamples(np.cos(t)))
    assert abs(c[1] - 0.5) < 1e-15 and abs(c[-1] - 0.5) < 1e-15
    others = [c[k] for k in range(-8, 8) if k not in (-1, 1)]
    assert max(abs(v) for v in others) < 1e-15


def test_to_fourier_constant():
    c = to_fourier(PeriodicSamples(np.full(16, 1.0)))
    assert abs(c[0] - 1.0) < 1e-15


def test_to_fourier_mixture_vs_direct_dft():
    n = 32
    t = grid(n)
    vals = np.cos(3 * t) + 2 * np.sin(5 * t)
    c = to_fourier(PeriodicSamples(vals))
    # independent direct DFT
    direct = {k: np.sum(vals * np.exp(-1j * k * t)) / n for k in range(-n // 2, n // 2)}
    for k in range(-n // 2, n // 2):
        assert abs(c[k] - direct[k]) < 1e-13
    assert abs(c[3] - 0.5) < 1e-13 and abs(c[-3] - 0.5) < 1e-13
    assert abs(c[5] - (-1j)) < 1e-13 and abs(c[-5] - 1j) < 1e-13


def test_from_fourier_synthesis():
    n = 16
    c = to_fourier(PeriodicSamples(np.exp(1j * grid(n))))
    out = from_fourier(c, 16)
    assert np.max(np.abs(out.values - np.exp(1j * grid(16)))) < 1e-14

    const = to_fourier(PeriodicSamples(np.full(8, 2.5)))
    out = from_fourier(const, 8)
    assert out.is_real
    assert np.max(np.abs(out.values - 2.5)) < 1e-14


def test_roundtrip_random_trig_polynomial(rng):
    n = 64
    t = grid(n)
    vals = np.zeros(n)
    for k in range(11):
        a, b = rng.standard_normal(2)
        vals = vals + a * np.cos(k * t) + b * np.sin(k * t)
    c = to_fourier(PeriodicSamples(vals))
    assert c.degree <= 10
    back = from_fourier(c, n)
    scale = np.max(np.abs(vals))
    assert np.max(np.abs(back.values - vals)) <= 1e-13 * scale
    # and through a finer grid
    fine = from_fourier(c, 256)
    again = to_fourier(fine)
    for k in range(-12, 13):
        assert abs(again[k] - c[k]) < 1e-13 * scale


def test_from_fourier_aliasing_error():
    t = grid(64)
    c = to_fourier(PeriodicSamples(np.cos(10 * t)))
    with pytest.raises(AliasingError):
        from_fourier(c, 16)


def test_diff_theta():
    t = grid(32)
    d = diff_theta(PeriodicSamples(np.cos(t)))
    assert np.max(np.abs(d.values + np.sin(t))) < 1e-13
    d = diff_theta(PeriodicSamples(np.full(32, 3.0)))
    assert np.max(np.abs(d.values)) < 1e-13
    d = diff_theta(PeriodicSamples(np.cos(4 * t)))
    assert np.max(np.abs(d.values + 4 * np.sin(4 * t))) < 1e-12


def test_diff_theta_tail_warning():
    n = 64
    t = grid(n)
    rough = np.cos((n // 2 - 1) * t)
    with pytest.warns(TailWarning):
        diff_theta(PeriodicSamples(rough))


def test_hilbert_rejects_complex():
    with pytest.raises(ValueError):
        hilbert(PeriodicSamples(np.exp(1j * grid(16))))


def test_hilbert_against_pv_quadrature():
    n = 64
    t = grid(n)
    for vals in (np.cos(t), np.sin(3 * t), np.cos(2 * t) - 0.7 * np.sin(5 * t)):
        ours = hilbert(PeriodicSamples(vals)).values
        oracle = pv_hilbert_oracle(vals)
        assert np.max(np.abs(ours - oracle)) < 1e-10


def test_hilbert_trig_rules():
    n = 1024
    t = grid(n)
    assert np.max(np.abs(hilbert(PeriodicSamples(np.cos(t))).values - np.sin(t))) < 1e-12
    assert np.max(np.abs(hilbert(PeriodicSamples(np.sin(3 * t))).values + np.cos(3 * t))) < 1e-12
    assert np.max(np.abs(hilbert(PeriodicSamples(np.full(n, 7.0))).values)) < 1e-12


def test_hilbert_involution_and_skew_adjoint(rng):
    n = 128
    t = grid(n)
    f = np.zeros(n)
    g = np.zeros(n)
    for k in range(1, 20):
        a, b = rng.standard_normal(2) / k
        f += a * np.cos(k * t) + b * np.sin(k * t)
        a, b = rng.standard_normal(2) / k
        g += a * np.cos(k * t) + b * np.sin(k * t)
    sf, sg = PeriodicSamples(f), PeriodicSamples(g)
    hh = hilbert(hilbert(sf)).values
    assert np.max(np.abs(hh + f)) <= 1e-12 * np.max(np.abs(f))
    lhs = np.dot(hilbert(sf).values, g) + np.dot(f, hilbert(sg).values)
    assert abs(lhs) / n <= 1e-12 * np.max(np.abs(f)) * np.max(np.abs(g))
    # commutes with differentiation
    a = diff_theta(hilbert(sf)).values
    b = hilbert(diff_theta(sf)).values
    assert np.max(np.abs(a - b)) <= 1e-12 * np.max(np.abs(a) + 1)


def test_trig_eval_matches_grid():
    n = 32
    t = grid(n)
    vals = np.cos(3 * t) + 2 * np.sin(5 * t) + 0.5
    c = np.fft.fft(vals) / n
    assert np.max(np.abs(trig_eval(c, t).real - vals)) < 1e-13
    x = np.array([0.1, 1.7, 4.0])
    expect = np.cos(3 * x) + 2 * np.sin(5 * x) + 0.5
    assert np.max(np.abs(trig_eval(c, x).real - expect)) < 1e-13
