import numpy as np
import pytest

from harmap import curves, spectral
from harmap.dirichlet import BoundaryCurve


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


def random_bandlimited_curve(rng, degree=12, n=1024, base=1.0):
    """Random closed curve with modes in [-degree, degree] (may self-intersect)."""
    t = spectral.grid(n)
    w = base * np.exp(1j * t)
    for k in range(-degree, degree + 1):
        if k in (0, 1):
            continue
        amp = 0.3 * rng.standard_normal(2) / (1 + k * k)
        w += (amp[0] + 1j * amp[1]) * np.exp(1j * k * t)
    return BoundaryCurve.from_complex(w)


def kneser_curve(rng, n=1024):
    """Random convex target with a random C^1 reparametrization."""
    return curves.reparametrize(curves.convex_curve(rng, n), rng)


def pv_hilbert_oracle(values, m=8192):
    """Principal-value quadrature of the circle kernel cot((theta-tau)/2)/(2 pi).

    The PV integral of the bare kernel vanishes, so subtracting g(theta)
    leaves a smooth periodic integrand and the trapezoid rule is spectrally
    accurate.  The tau grid is staggered by half a step so no node hits the
    singularity.
    """
    n = values.size
    c = np.fft.fft(values) / n
    tau = (np.arange(m) + 0.5) * 2.0 * np.pi / m
    g_tau = spectral.trig_eval(c, tau).real
    thetas = spectral.grid(n)
    out = np.empty(n)
    for i, th in enumerate(thetas):
        g_th = float(np.real(spectral.trig_eval(c, np.array([th]))[0]))
        kern = 1.0 / np.tan((th - tau) / 2.0)
        out[i] = np.sum((g_tau - g_th) * kern) / m
    return out
