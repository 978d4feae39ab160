"""Torus Laughlin states at half filling, discretized onto the lattice,
and the ground-state overlap diagnostic."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .lattice import LatticeGeometry
from .manybody import (FockBasis, MotionalDensityMatrix, build_fock_basis,
                       subspace_overlap, symmetric_fock_to_product)


@dataclass(frozen=True)
class ThetaParams:
    tau: complex
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        if self.tau.imag <= 0:
            raise ValueError("modular parameter must have positive imaginary part")


def theta_with_characteristics(z: complex, params: ThetaParams,
                               tol: float = 1e-14) -> complex:
    """theta[a,b](z | tau) = sum_n exp(i pi tau (n+a)^2 + 2i (n+a)(z + pi b)).

    The sum window is centered on the dominant term and sized so the
    truncation error is below `tol` relative to the peak term.
    """
    tau, a, b = params.tau, params.a, params.b
    im_tau = tau.imag
    # |term(n)| ~ exp(-pi im_tau (n+a)^2 - 2 (n+a) Im z); peak at
    # n+a = -Im z / (pi im_tau)
    center = -z.imag / (math.pi * im_tau) - a
    width = math.sqrt(max(-math.log(tol * 1e-3), 1.0) / (math.pi * im_tau)) + 2.0
    n_lo = int(math.floor(center - width))
    n_hi = int(math.ceil(center + width))
    n = np.arange(n_lo, n_hi + 1, dtype=float) + a
    expo = 1j * math.pi * tau * n * n + 2j * n * (z + math.pi * b)
    return complex(np.sum(np.exp(expo)))


def theta1(z: complex, tau: complex, tol: float = 1e-14) -> complex:
    """Odd Jacobi theta function; vanishes linearly at the lattice of periods."""
    return -theta_with_characteristics(z, ThetaParams(tau=tau, a=0.5, b=0.5), tol)


@dataclass(frozen=True)
class LaughlinSubspace:
    """Two orthonormal half-filling ground-state candidates over the
    single-species motional Fock space."""

    states: tuple  # two complex vectors over the motional Fock basis
    basis: FockBasis
    gauge_tag: str

    def product_space_states(self) -> list[np.ndarray]:
        return [symmetric_fock_to_product(v, self.basis) for v in self.states]


# Center-of-mass characteristics for the two degenerate states, matched to
# the lattice Landau gauge used throughout (x-bond phases 2 pi alpha k with
# the per-column wrap twist).  Fixed by the magnetic-translation closure and
# ground-space overlap checks in the test suite.
_COM_A = (0.0, 0.5)
_COM_B = 0.0
_CONJUGATE = True


def laughlin_lattice_states(N: int, alpha: Fraction,
                            geom: LatticeGeometry) -> LaughlinSubspace:
    """Evaluate the two m=2 torus Laughlin wavefunctions at the site centers
    and symmetrize into bosonic Fock amplitudes.

    The construction is the center-of-mass theta factor (two characteristics)
    times the squared odd-theta relative factor times the Landau-gauge
    Gaussian, with magnetic length l = r0 / sqrt(2 pi alpha).
    """
    alpha = Fraction(alpha)
    if not geom.is_torus:
        raise ValueError("Laughlin construction requires a magnetic torus")
    n_phi = alpha * geom.Lx * geom.Ly
    if n_phi.denominator != 1:
        raise ValueError("total flux must be an integer")
    if Fraction(N, int(n_phi)) != Fraction(1, 2):
        raise ValueError(
            f"filling N/(alpha Lx Ly) = {N}/{int(n_phi)} must be 1/2")
    m = 2
    a = float(alpha)
    r0 = geom.r0
    L1 = geom.Lx * r0
    L2 = geom.Ly * r0
    tau = 1j * L2 / L1
    ell2 = r0 * r0 / (2.0 * math.pi * a)

    basis = build_fock_basis(geom.n_sites, N)
    # site index s = j*Ly + k -> position (j, k) * r0
    pos = np.empty(geom.n_sites, dtype=complex)
    ys = np.empty(geom.n_sites)
    for j in range(geom.Lx):
        for k in range(geom.Ly):
            pos[j * geom.Ly + k] = (j + 1j * k) * r0
            ys[j * geom.Ly + k] = k * r0

    vectors = []
    for s in range(2):
        com = ThetaParams(tau=m * tau, a=_COM_A[s], b=_COM_B)
        amps = np.empty(basis.size, dtype=complex)
        for i, modes in enumerate(basis.states):
            zs = pos[list(modes)]
            val = theta_with_characteristics(
                m * math.pi * zs.sum() / L1, com)
            for p in range(N):
                for q_ in range(p + 1, N):
                    val *= theta1(math.pi * (zs[p] - zs[q_]) / L1, tau) ** m
            gauss = math.exp(-float(np.sum(ys[list(modes)] ** 2)) / (2.0 * ell2))
            # bosonic normalization sqrt(N! / prod n_x!)
            mult = math.factorial(N)
            for mo in set(modes):
                mult //= math.factorial(modes.count(mo))
            amps[i] = val * gauss * math.sqrt(mult)
        if _CONJUGATE:
            amps = np.conj(amps)
        amps /= np.linalg.norm(amps)
        vectors.append(amps)

    # orthonormalize the pair (Gram-Schmidt; near-orthogonal already)
    v0, v1 = vectors
    v1 = v1 - np.vdot(v0, v1) * v0
    nrm = np.linalg.norm(v1)
    if nrm < 1e-8:
        raise RuntimeError("Laughlin pair degenerate after projection")
    v1 = v1 / nrm
    tag = (f"landau_gauge;theta_x=2*pi*alpha*k;com_a={_COM_A};com_b={_COM_B};"
           f"conjugate={_CONJUGATE}")
    return LaughlinSubspace(states=(v0, v1), basis=basis, gauge_tag=tag)


def laughlin_overlap(rho: MotionalDensityMatrix, sub: LaughlinSubspace,
                     warn_on_collapse: bool = True) -> float:
    """Tr(P_L rho P_L); depends only on the two-dimensional subspace."""
    if rho.n_sites != sub.basis.M or rho.N != sub.basis.N:
        raise ValueError("density matrix and subspace dimensions do not match")
    val = subspace_overlap(rho, sub.product_space_states())
    if warn_on_collapse and val < 0.5:
        warnings.warn(
            "Laughlin overlap below 0.5: likely a gauge-convention mismatch "
            "between the link field and the Laughlin construction",
            RuntimeWarning)
    return val


def magnetic_translation_x(geom: LatticeGeometry, alpha: Fraction,
                           steps: int) -> np.ndarray:
    """Single-species one-body magnetic translation by `steps` sites in x.

    In the Landau gauge used here the x-shift is a plain mode permutation,
    but it is a symmetry of the torus only when steps * alpha * Ly is an
    integer (otherwise it moves the y Wilson loops between sectors).
    """
    alpha = Fraction(alpha)
    if (alpha * steps * geom.Ly).denominator != 1:
        raise ValueError(
            f"steps*alpha*Ly = {alpha * steps * geom.Ly} must be an integer")
    n = geom.n_sites
    T = np.zeros((n, n))
    for j in range(geom.Lx):
        for k in range(geom.Ly):
            T[geom.site_index(j + steps, k), geom.site_index(j, k)] = 1.0
    return T


def apply_one_body_unitary(U: np.ndarray, vec: np.ndarray,
                           basis: FockBasis) -> np.ndarray:
    """Apply a one-body unitary to an N-boson Fock vector (N <= 2)."""
    psi = symmetric_fock_to_product(vec, basis)
    M, N = basis.M, basis.N
    if N == 1:
        out_fq = U @ psi
    elif N == 2:
        out_fq = (np.kron(U, U) @ psi)
    else:
        raise NotImplementedError("supported for N <= 2")
    out = np.empty(basis.size, dtype=complex)
    if N == 1:
        for i, (m,) in enumerate(basis.states):
            out[i] = out_fq[m]
    else:
        grid = out_fq.reshape(M, M)
        for i, (m1, m2) in enumerate(basis.states):
            if m1 == m2:
                out[i] = grid[m1, m2]
            else:
                out[i] = (grid[m1, m2] + grid[m2, m1]) / math.sqrt(2.0)
    return out
