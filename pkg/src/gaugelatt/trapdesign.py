"""Closed-form optics calculators for the state-dependent lattice:
potential ratios, hopping rates, tilted-standing-wave profiles, the Raman
parity integral, and the effective lattice spacing."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import dblquad


@dataclass(frozen=True)
class StarkInputs:
    """ac Stark shifts of the two polarization states and the hyperfine
    combination weights (defaults: the F=1/F=2, m_F=+1 pair of 87Rb)."""

    V_plus: float
    V_minus: float
    coeffs_a: tuple = (0.25, 0.75)  # weights of (V_plus, V_minus) for |a>
    coeffs_b: tuple = (0.75, 0.25)

    def __post_init__(self):
        for c in (self.coeffs_a, self.coeffs_b):
            if abs(c[0] + c[1] - 1.0) > 1e-12:
                raise ValueError("combination weights must sum to 1")


@dataclass(frozen=True)
class TiltGeometry:
    eta: float               # tilt angle of the standing waves
    wavelength: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.eta < math.pi / 2:
            raise ValueError("tilt angle must lie in (0, pi/2)")

    @property
    def k(self) -> float:
        return 2.0 * math.pi / self.wavelength


def potential_ratio(s: StarkInputs) -> float:
    """V_b / V_a from the hyperfine combination weights; the 87Rb defaults
    give (3 V_+ + V_-) / (V_+ + 3 V_-)."""
    num = s.coeffs_b[0] * s.V_plus + s.coeffs_b[1] * s.V_minus
    den = s.coeffs_a[0] * s.V_plus + s.coeffs_a[1] * s.V_minus
    if den == 0.0:
        raise ZeroDivisionError("|a> potential vanishes; ratio diverges")
    return num / den


def hopping_rate(V0: float) -> float:
    """Deep-lattice 1D hopping rate (V0/Er)^(3/4) exp(-2 sqrt(V0/Er)) in
    recoil units; only ratios are meaningful."""
    if V0 <= 0:
        raise ValueError("potential depth must be positive")
    return V0 ** 0.75 * math.exp(-2.0 * math.sqrt(V0))


def field_profiles(g: TiltGeometry):
    """The sigma+ and pi field components of the tilted standing-wave pair.

    E_plus(x, z) = sqrt(2) sin(eta) cos(k x cos eta) cos(k z sin eta)
    E_pi(x, z)   = cos(eta) sin(k x cos eta) sin(k z sin eta)
    They are quarter-period offset in both directions, so potential minima
    of one polarization sit at maxima of the other.
    """
    k, eta = g.k, g.eta
    se, ce = math.sin(eta), math.cos(eta)

    def e_plus(x, z):
        return math.sqrt(2.0) * se * np.cos(k * x * ce) * np.cos(k * z * se)

    def e_pi(x, z):
        return ce * np.sin(k * x * ce) * np.sin(k * z * se)

    return e_plus, e_pi


def lattice_spacing(g: TiltGeometry) -> float:
    """Effective spacing lambda / (2 cos eta); the tilt stretches the period."""
    return g.wavelength / (2.0 * math.cos(g.eta))


def raman_parity_integral(g: TiltGeometry, sigma_x: float, sigma_z: float,
                          site: tuple = (0, 0),
                          center_offset: tuple = (0.0, 0.0)) -> float:
    """|int E_+ E_pi W_+ W_- dx dz| around one site with Gaussian Wannier
    orbitals of widths (sigma_x, sigma_z).

    For orbitals centered exactly on the site the integrand is odd in both
    directions and the integral vanishes; `center_offset` displaces the
    orbital center to probe that cancellation.
    """
    e_plus, e_pi = field_profiles(g)
    a = lattice_spacing(g)
    x0 = site[0] * a + center_offset[0]
    z0 = site[1] * (math.pi / (g.k * math.sin(g.eta))) + center_offset[1]

    def integrand(z, x):
        w2 = math.exp(-(x - x0) ** 2 / (2 * sigma_x ** 2)
                      - (z - z0) ** 2 / (2 * sigma_z ** 2))
        return e_plus(x, z) * e_pi(x, z) * w2

    span_x, span_z = 6.0 * sigma_x, 6.0 * sigma_z
    val, _ = dblquad(integrand, x0 - span_x, x0 + span_x,
                     lambda x: z0 - span_z, lambda x: z0 + span_z,
                     epsabs=1e-13, epsrel=1e-11)
    return abs(val)
