"""Lattice geometry, site phase patterns, link phases and plaquette fluxes.

Conventions: phases are stored in radians, canonicalized to [0, 2pi).
The x-link phase theta[j, k] lives on the bond (j,k) -> (j+1,k); y-links
carry no phase except the wrap links of a magnetic torus, which carry a
per-column twist so that every plaquette (wrap plaquettes included) sees
the same flux.
"""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.integrate import quad

TWO_PI = 2.0 * math.pi


class Boundary(enum.Enum):
    OPEN = "open"
    MAGNETIC_TORUS = "magnetic_torus"


def _canonical(phases):
    """Map phase array into [0, 2pi)."""
    out = np.asarray(phases, dtype=float) % TWO_PI
    # -1e-300 % 2pi == 2pi in floating point; fold that back
    out[out >= TWO_PI] = 0.0
    return out


@dataclass(frozen=True)
class LatticeGeometry:
    Lx: int
    Ly: int
    r0: float = 1.0
    boundary: Boundary = Boundary.OPEN

    def __post_init__(self):
        if self.Lx < 1 or self.Ly < 1:
            raise ValueError(f"need Lx, Ly >= 1, got {self.Lx}x{self.Ly}")
        if self.r0 <= 0:
            raise ValueError("lattice spacing must be positive")

    @property
    def n_sites(self) -> int:
        return self.Lx * self.Ly

    @property
    def is_torus(self) -> bool:
        return self.boundary is Boundary.MAGNETIC_TORUS

    def site_index(self, j: int, k: int) -> int:
        return (j % self.Lx) * self.Ly + (k % self.Ly)


@dataclass(frozen=True)
class PhasePattern:
    """Per-site Raman laser phases phi[j, k]."""

    phi: np.ndarray  # shape (Lx, Ly)

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float)
        if phi.ndim != 2:
            raise ValueError("phase pattern must be a 2D grid")
        if not np.all(np.isfinite(phi)):
            raise ValueError("phase pattern contains non-finite entries")
        object.__setattr__(self, "phi", _canonical(phi))

    def to_json(self, geom: LatticeGeometry) -> str:
        doc = {
            "Lx": geom.Lx,
            "Ly": geom.Ly,
            "boundary": geom.boundary.value,
            "phi": [[float(v) for v in row] for row in self.phi],
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> tuple["PhasePattern", LatticeGeometry]:
        doc = json.loads(text)
        geom = LatticeGeometry(
            Lx=int(doc["Lx"]), Ly=int(doc["Ly"]),
            boundary=Boundary(doc["boundary"]),
        )
        phi = np.asarray(doc["phi"], dtype=float)
        if phi.shape != (geom.Lx, geom.Ly):
            raise ValueError("phi grid shape does not match Lx, Ly")
        return cls(phi=phi), geom

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["j", "k", "phi"])
            for j in range(self.phi.shape[0]):
                for k in range(self.phi.shape[1]):
                    writer.writerow([j, k, f"{self.phi[j, k]:.12g}"])


@dataclass(frozen=True)
class LinkField:
    """Peierls phases on the lattice bonds.

    theta_x[j, k] is the phase on the x-bond (j,k)->(j+1,k).  On a torus
    theta_x has Lx rows (row Lx-1 is the wrap bond); on an open lattice it
    has Lx-1 rows.  boundary_twist_y[j] is the phase on the y-wrap bond
    (j,Ly-1)->(j,0); it is all-zero for open boundaries.  theta_x2, when
    present, holds second-neighbor x-bond phases (j,k)->(j+2,k).
    """

    theta_x: np.ndarray
    boundary_twist_y: np.ndarray
    theta_x2: np.ndarray | None = None

    def __post_init__(self):
        tx = np.asarray(self.theta_x, dtype=float)
        tw = np.asarray(self.boundary_twist_y, dtype=float)
        if not (np.all(np.isfinite(tx)) and np.all(np.isfinite(tw))):
            raise ValueError("link field contains non-finite entries")
        object.__setattr__(self, "theta_x", _canonical(tx))
        object.__setattr__(self, "boundary_twist_y", _canonical(tw))
        if self.theta_x2 is not None:
            t2 = np.asarray(self.theta_x2, dtype=float)
            if not np.all(np.isfinite(t2)):
                raise ValueError("second-neighbor link field non-finite")
            object.__setattr__(self, "theta_x2", _canonical(t2))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["j", "k", "theta_x"])
            for j in range(self.theta_x.shape[0]):
                for k in range(self.theta_x.shape[1]):
                    writer.writerow([j, k, f"{self.theta_x[j, k]:.12g}"])


@dataclass(frozen=True)
class VectorPotentialField:
    """Continuum vector potential, gauge-fixed to the x direction.

    A(x, y) is the x-component; fluxes are measured in flux quanta, so the
    flux quantum itself is 1 in these units.
    """

    A: Callable[[float, float], float]


def uniform_phase_pattern(alpha: Fraction | float, geom: LatticeGeometry) -> PhasePattern:
    """Site phases phi[j,k] = 2*pi*alpha*j*k producing a uniform field.

    Differencing along j turns this pattern into x-link phases
    theta[j,k] = 2*pi*alpha*k, the Landau-gauge uniform field.
    """
    alpha = float(alpha)
    j = np.arange(geom.Lx)[:, None]
    k = np.arange(geom.Ly)[None, :]
    return PhasePattern(phi=TWO_PI * alpha * j * k)


def links_from_phases(
    p: PhasePattern,
    geom: LatticeGeometry,
    alpha: Fraction | float | None = None,
) -> LinkField:
    """Difference the site phases into x-link phases theta = phi[j+1]-phi[j].

    Open boundary: only the Lx-1 interior bonds are emitted and no y twist.
    Magnetic torus: the x-wrap bond phase is phi[0,k]-phi[Lx-1,k] plus the
    closure of the uniform pattern, and the y-wrap bonds carry the
    Landau-gauge twist -2*pi*alpha*Ly*j.  `alpha` (flux per plaquette) is
    required for the torus and must satisfy alpha*Lx*Ly integer.
    """
    if p.phi.shape != (geom.Lx, geom.Ly):
        raise ValueError("phase pattern shape does not match geometry")
    if not geom.is_torus:
        theta = p.phi[1:, :] - p.phi[:-1, :]
        twist = np.zeros(geom.Lx)
        return LinkField(theta_x=theta, boundary_twist_y=twist)

    if alpha is None:
        raise ValueError("magnetic torus requires the flux per plaquette alpha")
    alpha = Fraction(alpha) if not isinstance(alpha, Fraction) else alpha
    n_phi = alpha * geom.Lx * geom.Ly
    if n_phi.denominator != 1:
        raise ValueError(
            f"total flux alpha*Lx*Ly = {n_phi} must be an integer on a torus"
        )
    a = float(alpha)
    theta = np.empty((geom.Lx, geom.Ly))
    theta[:-1, :] = p.phi[1:, :] - p.phi[:-1, :]
    # wrap bond (Lx-1,k)->(0,k): the uniform pattern continued to j=Lx gives
    # phi[Lx,k] = 2*pi*alpha*Lx*k, so the wrap phase is phi[Lx,k]-phi[Lx-1,k]
    k = np.arange(geom.Ly)
    theta[-1, :] = TWO_PI * a * geom.Lx * k - p.phi[-1, :] + p.phi[0, :]
    j = np.arange(geom.Lx)
    twist = -TWO_PI * a * geom.Ly * j
    return LinkField(theta_x=theta, boundary_twist_y=twist)


def links_from_vector_potential(
    v: VectorPotentialField, geom: LatticeGeometry
) -> LinkField:
    """Line-integrate A along each x-bond: theta = 2*pi * int A(x, y_k) dx."""
    n_rows = geom.Lx if geom.is_torus else geom.Lx - 1
    theta = np.empty((n_rows, geom.Ly))
    for j in range(n_rows):
        x0, x1 = j * geom.r0, (j + 1) * geom.r0
        for k in range(geom.Ly):
            y = k * geom.r0
            f = lambda x: v.A(x, y)
            val, _ = quad(f, x0, x1, epsabs=1e-13, epsrel=1e-13)
            if not math.isfinite(val):
                raise ValueError(f"vector potential not integrable on bond ({j},{k})")
            theta[j, k] = TWO_PI * val
    twist = np.zeros(geom.Lx)
    return LinkField(theta_x=theta, boundary_twist_y=twist)


def plaquette_flux(l: LinkField, geom: LatticeGeometry) -> np.ndarray:
    """Flux per plaquette in flux quanta, mod 1.

    The loop around plaquette (j,k) picks up
    theta_x[j,k] + theta_y[j+1,k] - theta_x[j,k+1] - theta_y[j,k], where the
    only nonzero y phases are the torus wrap twists.  For phase-only y bonds
    this reduces to (theta[j,k] - theta[j,k+1]) / 2pi.
    """
    tx = l.theta_x
    n_jp = geom.Lx if geom.is_torus else geom.Lx - 1
    n_kp = geom.Ly if geom.is_torus else geom.Ly - 1
    if tx.shape[0] < n_jp:
        raise ValueError("link field inconsistent with geometry")
    flux = np.empty((n_jp, n_kp))
    for j in range(n_jp):
        for k in range(n_kp):
            loop = tx[j, k] - tx[j, (k + 1) % geom.Ly]
            if geom.is_torus and k == geom.Ly - 1:
                loop += l.boundary_twist_y[(j + 1) % geom.Lx]
                loop -= l.boundary_twist_y[j]
            flux[j, k] = (loop / TWO_PI) % 1.0
    return flux


def field_strength(l: LinkField, geom: LatticeGeometry) -> np.ndarray:
    """Flux with the opposite sign convention: +alpha for the uniform pattern."""
    return (-plaquette_flux(l, geom)) % 1.0


def total_flux(l: LinkField, geom: LatticeGeometry) -> float:
    """Sum of plaquette fluxes; an integer on a magnetic torus."""
    return float(plaquette_flux(l, geom).sum())
