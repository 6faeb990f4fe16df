import numpy as np
import pytest

from lagflow.curve import DiscreteCurve, from_complex

TWO_PI = 2.0 * np.pi


def grid(N, offset=0.0):
    return TWO_PI * (np.arange(N) + offset) / N


def make_circle(N=256, R=1.0, center=0.0 + 0.0j, n=2, offset=0.0):
    return from_complex(center + R * np.exp(1j * grid(N, offset)), n)


def make_ellipse(N=256, a=2.0, b=1.0, n=2):
    phi = grid(N)
    return from_complex(a * np.cos(phi) + 1j * b * np.sin(phi), n)


def make_wavy(N=256, amp=0.1, l=3, n=2):
    phi = grid(N)
    return from_complex((1.0 + amp * np.cos(l * phi)) * np.exp(1j * phi), n)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
