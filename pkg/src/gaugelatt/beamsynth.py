"""Beam-array synthesis: invert the beam/Wannier overlap matrix to find the
per-site beam weights that imprint a target Raman phase pattern."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .lattice import LatticeGeometry, PhasePattern


@dataclass(frozen=True)
class WannierModel:
    """Gaussian site orbitals for the two species, widths from the
    harmonic expansion of the sinusoidal wells."""

    sigma_a: float
    sigma_b: float
    r0: float = 1.0

    def __post_init__(self):
        if self.sigma_a <= 0 or self.sigma_b <= 0:
            raise ValueError("Wannier widths must be positive")
        if self.sigma_a >= self.r0 or self.sigma_b >= self.r0:
            raise ValueError("Wannier widths must be below the lattice spacing")


@dataclass(frozen=True)
class ModeFunction:
    """Normalized 2D Gaussian beam profile with 1/e^2-style waist w."""

    w: float

    def __post_init__(self):
        if self.w <= 0:
            raise ValueError("waist must be positive")

    def __call__(self, r2):
        # unit L2 norm: int |A|^2 = 1
        return math.sqrt(2.0 / (math.pi * self.w ** 2)) * np.exp(-r2 / self.w ** 2)


@dataclass(frozen=True)
class BeamArray:
    amplitudes: np.ndarray  # omega'_xi >= 0, one per site
    phases: np.ndarray

    @property
    def weights(self) -> np.ndarray:
        return self.amplitudes * np.exp(1j * self.phases)

    def write_csv(self, path, geom: LatticeGeometry) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["j", "k", "amplitude", "phase"])
            for j in range(geom.Lx):
                for k in range(geom.Ly):
                    i = j * geom.Ly + k
                    writer.writerow([j, k, f"{self.amplitudes[i]:.12g}",
                                     f"{self.phases[i]:.12g}"])


@dataclass(frozen=True)
class OverlapMatrix:
    T: np.ndarray
    cutoff_radius: float
    geom: LatticeGeometry


def wannier_width(V0: float, r0: float = 1.0) -> float:
    """Harmonic ground-state width of a sinusoidal well of depth V0 (recoil
    units): sigma = (r0/pi) (Er/V0)^(1/4)."""
    if V0 <= 0:
        raise ValueError("potential depth must be positive")
    return (r0 / math.pi) * V0 ** -0.25


def overlap_entry(d2: float, wm: WannierModel, mf: ModeFunction) -> float:
    """Closed-form integral of the beam profile against the on-site Wannier
    product, for squared center distance d2.

    With L2-normalized Gaussians the product W_a W_b is a Gaussian of
    combined width, and the beam integral is again Gaussian in the offset.
    """
    sa2, sb2 = wm.sigma_a ** 2, wm.sigma_b ** 2
    w2 = mf.w ** 2
    # W_a W_b decays as exp(-inv_s2 r^2); the beam as exp(-|r-d|^2/w^2)
    inv_s2 = 0.5 / sa2 + 0.5 / sb2
    inv_w2 = 1.0 / w2
    n_ab = 1.0 / (math.pi * wm.sigma_a * wm.sigma_b)
    n_beam = math.sqrt(2.0 / (math.pi * w2))
    inv_tot = inv_s2 + inv_w2
    pref = math.pi / inv_tot
    expo = -d2 * (inv_s2 * inv_w2) / inv_tot
    return n_ab * n_beam * pref * math.exp(expo)


def overlap_matrix(geom: LatticeGeometry, wm: WannierModel,
                   mf: ModeFunction, drop_tol: float = 1e-14) -> OverlapMatrix:
    """Assemble T[target site, beam center] from the closed-form Gaussian
    integrals, truncating entries below drop_tol."""
    n = geom.n_sites
    xs = np.empty((n, 2))
    for j in range(geom.Lx):
        for k in range(geom.Ly):
            xs[j * geom.Ly + k] = (j * geom.r0, k * geom.r0)
    d2 = ((xs[:, None, :] - xs[None, :, :]) ** 2).sum(axis=2)
    sa2, sb2 = wm.sigma_a ** 2, wm.sigma_b ** 2
    inv_s2 = 0.5 / sa2 + 0.5 / sb2
    w2 = mf.w ** 2
    inv_w2 = 1.0 / w2
    inv_tot = inv_s2 + inv_w2
    n_ab = 1.0 / (math.pi * wm.sigma_a * wm.sigma_b)
    n_beam = math.sqrt(2.0 / (math.pi * w2))
    pref = n_ab * n_beam * math.pi / inv_tot
    decay = inv_s2 * inv_w2 / inv_tot
    T = pref * np.exp(-decay * d2)
    mask = T < drop_tol
    T[mask] = 0.0
    kept = d2[~mask]
    cutoff = float(np.sqrt(kept.max())) if kept.size else 0.0
    return OverlapMatrix(T=T, cutoff_radius=cutoff, geom=geom)


def condition_number(T: OverlapMatrix) -> float:
    return float(np.linalg.cond(T.T))


def solve_beams(T: OverlapMatrix, target: np.ndarray,
                cond_limit: float = 1e12) -> tuple[BeamArray, dict]:
    """Solve T x = target for the beam weights.

    Returns the beam array plus diagnostics (condition number, relative
    residual, achieved amplitude spread)."""
    target = np.asarray(target, dtype=complex).ravel()
    mat = T.T
    if mat.shape[0] != mat.shape[1] or mat.shape[0] != target.size:
        raise ValueError("overlap matrix and target sizes do not match")
    cond = condition_number(T)
    if not np.isfinite(cond) or cond > cond_limit:
        raise RuntimeError(
            f"overlap matrix condition number {cond:.3e} exceeds {cond_limit:.0e}; "
            "beam waist too large for a stable inversion")
    x = np.linalg.solve(mat, target)
    resid = np.linalg.norm(mat @ x - target) / np.linalg.norm(target)
    if resid > 1e-10:
        raise RuntimeError(f"linear solve residual {resid:.2e} above 1e-10")
    amps = np.abs(x)
    phases = np.where(amps > 0, np.angle(x), 0.0)
    achieved = mat @ x
    mag = np.abs(achieved)
    diag = {
        "condition_number": cond,
        "relative_residual": float(resid),
        "amplitude_spread": float(mag.max() - mag.min()),
    }
    return BeamArray(amplitudes=amps, phases=phases), diag


def forward_check(T: OverlapMatrix, beams: BeamArray) -> np.ndarray:
    """Per-site complex Raman amplitude produced by a beam array."""
    return T.T @ beams.weights


def target_from_pattern(p: PhasePattern, amplitude: float = 1.0) -> np.ndarray:
    """Uniform-amplitude complex target from a site phase pattern."""
    return (amplitude * np.exp(1j * p.phi)).ravel()
