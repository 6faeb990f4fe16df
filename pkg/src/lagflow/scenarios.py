"""Seed-curve generators for the experiment scenarios.

All generators sample on the uniform grid phi_j = 2 pi j / N and return a
DiscreteCurve carrying the ambient dimension n.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curve import DiscreteCurve, from_complex
from .errors import InvalidSpec

KINDS = ("circle", "offset_circle", "perturbed_symmetric", "figure_eight",
         "dumbbell", "chekanov")

DEFAULT_PARAMS = {
    "circle": {"R": 1.0, "cx": 0.0, "cy": 0.0},
    "offset_circle": {"R": 1.0, "cx": 3.0, "cy": 0.0},
    "perturbed_symmetric": {"R": 1.0, "a": 0.1, "l": 9, "omega0": 1},
    "figure_eight": {"R": 1.0},
    "dumbbell": {"R": 0.6, "d": 1.0, "w": 0.15, "tau": 0.10},
    "chekanov": {"kappa": 2.0 ** -0.5},
}


@dataclass(frozen=True)
class ScenarioSpec:
    kind: str
    n: int = 2
    N: int = 256
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidSpec(f"unknown scenario kind {self.kind!r}; choose from {KINDS}")
        if self.n < 1 or self.N < 16:
            raise InvalidSpec("need n >= 1 and N >= 16")
        merged = dict(DEFAULT_PARAMS[self.kind])
        unknown = set(self.params) - set(merged)
        if unknown:
            raise InvalidSpec(f"unknown parameters for {self.kind}: {sorted(unknown)}")
        merged.update(self.params)
        object.__setattr__(self, "params", merged)
        p = merged
        if self.kind == "perturbed_symmetric":
            if not (0.0 <= p["a"] < 1.0):
                raise InvalidSpec("perturbed_symmetric needs 0 <= a < 1")
            if int(p["l"]) < 1 or int(p["omega0"]) < 1:
                raise InvalidSpec("perturbed_symmetric needs integer l >= 1, omega0 >= 1")
        if self.kind == "dumbbell":
            if p["w"] <= 0:
                raise InvalidSpec("dumbbell needs neck half-width w > 0")
            if not (0 < p["R"] < p["d"]):
                raise InvalidSpec("dumbbell needs lobe radius 0 < R < d")
        if self.kind in ("circle", "offset_circle") and p["R"] <= 0:
            raise InvalidSpec("circle needs R > 0")


def generate(spec: ScenarioSpec) -> DiscreteCurve:
    """Build the seed curve of a scenario."""
    phi = 2.0 * np.pi * np.arange(spec.N) / spec.N
    p = spec.params
    if spec.kind in ("circle", "offset_circle"):
        z = (p["cx"] + 1j * p["cy"]) + p["R"] * np.exp(1j * phi)
    elif spec.kind == "perturbed_symmetric":
        l, w0 = int(p["l"]), int(p["omega0"])
        z = p["R"] * (1.0 + p["a"] * np.cos(l * phi)) * np.exp(1j * w0 * phi)
    elif spec.kind == "figure_eight":
        # Bernoulli lemniscate r^2 = R^2 cos(2 phi), rational parametrization;
        # passes through the origin, symmetric under z -> -z
        den = 1.0 + np.sin(phi) ** 2
        z = p["R"] * (np.cos(phi) + 1j * np.sin(phi) * np.cos(phi)) / den
    elif spec.kind == "dumbbell":
        z = _dumbbell_radius(phi, p["R"], p["d"], p["w"], p["tau"]) * np.exp(1j * phi)
    elif spec.kind == "chekanov":
        kappa = p["kappa"]
        E = np.exp(1j * kappa * np.cos(phi))
        z = E * np.cos(phi) + 1j * kappa * np.conj(E) * np.sin(phi)
    else:  # pragma: no cover
        raise InvalidSpec(spec.kind)
    return from_complex(z, spec.n)


def _dumbbell_radius(phi, R, d, w, tau, guard=0.05):
    """Radial profile of two circular lobes at (+-d, 0) bridged by a neck.

    The polar graph blends the right-lobe boundary r = d cos a + sqrt(R^2 -
    d^2 sin^2 a) into the horizontal bar y = w with a tanh switch; being a
    polar graph it is starshaped and embedded by construction, and the
    four-fold reflection symmetry puts the origin at the neck center.
    """
    a = np.abs(np.remainder(phi, np.pi))
    a = np.where(a > 0.5 * np.pi, np.pi - a, a)
    s2 = np.sin(a) ** 2
    lobe = d * np.cos(a) + np.sqrt(np.maximum(R * R - d * d * s2, 0.0))
    bar = w / np.sqrt(s2 + guard * guard)
    switch_at = 0.85 * np.arcsin(min(R / d, 1.0))
    sig = 0.5 * (1.0 + np.tanh((a - switch_at) / tau))
    return (1.0 - sig) * lobe + sig * bar


def random_fourier_seed(rng: np.random.Generator, N: int = 192, n: int = 2,
                        modes=(2, 3, 4, 5, 6), sigma: float = 0.08) -> DiscreteCurve:
    """Random starshaped + tamed perturbed circle.

    Draws a random low-frequency Fourier radius and shrinks the amplitude
    until the seed satisfies all four preserved predicates.
    """
    from .geometry import geometry
    from .topology import predicates

    phi = 2.0 * np.pi * np.arange(N) / N
    amps = rng.normal(0.0, sigma, size=len(modes)) / np.asarray(modes)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=len(modes))
    for _ in range(40):
        r = 1.0 + sum(a * np.cos(m * phi + ph) for a, m, ph in zip(amps, modes, phases))
        if r.min() > 0.2:
            curve = from_complex(r * np.exp(1j * phi), n)
            preds = predicates(curve, geometry(curve, n))
            if preds["starshaped"] and preds["tamed"] and preds["austere"] and preds["embedded"]:
                return curve
        amps = amps * 0.7
    return from_complex(np.exp(1j * phi), n)  # amplitudes shrank to a circle
