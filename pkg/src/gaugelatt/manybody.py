"""Bosonic Fock space, the interacting bilayer Hamiltonian, low-lying
eigenstates, and the internal-state diagnostics (motional density matrix,
purity, dark-mode number)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .lattice import LatticeGeometry, LinkField
from .singleparticle import ModelParams, build_bilayer_hamiltonian

DEFAULT_DIM_CAP = 20_000_000


@dataclass(frozen=True)
class FockBasis:
    """Ordered N-boson occupation basis over M modes.

    States are stored as nondecreasing tuples of occupied mode indices
    (equivalent to occupation vectors); the ordering is lexicographic in
    these tuples, i.e. (2,0,...,0) comes first.
    """

    M: int
    N: int
    states: tuple
    index_of: dict

    @property
    def size(self) -> int:
        return len(self.states)

    def occupation_vector(self, i: int) -> np.ndarray:
        occ = np.zeros(self.M, dtype=int)
        for m in self.states[i]:
            occ[m] += 1
        return occ


def build_fock_basis(M: int, N: int, dim_cap: int = DEFAULT_DIM_CAP) -> FockBasis:
    if M < 1 or N < 0:
        raise ValueError("need M >= 1 and N >= 0")
    size = math.comb(M + N - 1, N)
    if size > dim_cap:
        raise ValueError(f"basis size {size} exceeds cap {dim_cap}")
    states = tuple(combinations_with_replacement(range(M), N))
    index_of = {s: i for i, s in enumerate(states)}
    return FockBasis(M=M, N=N, states=states, index_of=index_of)


def _occ_count(state: tuple, mode: int) -> int:
    return state.count(mode)


def _remove_add(state: tuple, rm: int, add: int) -> tuple:
    lst = list(state)
    lst.remove(rm)
    lst.append(add)
    lst.sort()
    return tuple(lst)


def second_quantize(one_body: sp.spmatrix, basis: FockBasis) -> sp.csr_matrix:
    """Lift a one-body mode matrix to the N-boson Fock space.

    Matrix elements pick up the bosonic factors sqrt(n_src (n_dst + 1)).
    """
    ob = sp.csc_matrix(one_body)
    if ob.shape != (basis.M, basis.M):
        raise ValueError("one-body matrix dimension does not match mode count")
    cols = [ob.getcol(m).tocoo() for m in range(basis.M)]
    rows_out, cols_out, vals_out = [], [], []
    for i, state in enumerate(basis.states):
        for m in set(state):
            n_m = state.count(m)
            col = cols[m]
            for r, t in zip(col.row, col.data):
                if r == m:
                    rows_out.append(i)
                    cols_out.append(i)
                    vals_out.append(t * n_m)
                else:
                    new = _remove_add(state, m, r)
                    j = basis.index_of[new]
                    amp = t * math.sqrt(n_m * (state.count(r) + 1))
                    rows_out.append(j)
                    cols_out.append(i)
                    vals_out.append(amp)
    H = sp.coo_matrix((vals_out, (rows_out, cols_out)),
                      shape=(basis.size, basis.size), dtype=complex)
    return H.tocsr()


def build_manybody_hamiltonian(
    geom: LatticeGeometry, links: LinkField, params: ModelParams,
    basis: FockBasis,
) -> sp.csr_matrix:
    """Interacting bilayer Hamiltonian: hopping + Raman coupling plus the
    on-site interaction U [n_a(n_a-1) + n_b(n_b-1) + n_a n_b]."""
    ns = geom.n_sites
    if basis.M != 2 * ns:
        raise ValueError("basis mode count must equal 2*Lx*Ly")
    H_sp = build_bilayer_hamiltonian(geom, links, params)
    H = second_quantize(H_sp, basis)
    if params.U != 0.0:
        diag = np.empty(basis.size)
        for i, state in enumerate(basis.states):
            val = 0.0
            for m in set(state):
                n = state.count(m)
                val += n * (n - 1)
            # cross-species term: n_a n_b on the same site
            for m in set(state):
                if m < ns:
                    partner = m + ns
                    val += state.count(m) * state.count(partner)
            diag[i] = params.U * val
        H = H + sp.diags(diag)
    return H.tocsr()


@dataclass(frozen=True)
class ManyBodyState:
    amplitudes: np.ndarray
    energy: float
    basis: FockBasis


def lowest_eigenstates(H: sp.spmatrix, count: int, basis: FockBasis,
                       tol_factor: float = 1e-9,
                       maxiter: int | None = None) -> list[ManyBodyState]:
    """The `count` lowest eigenpairs of a sparse Hermitian matrix.

    Degenerate subspaces come back as some orthonormal basis; downstream
    diagnostics must not depend on the choice.
    """
    if count < 1:
        raise ValueError("need count >= 1")
    dim = H.shape[0]
    scale = spla.norm(H, ord=np.inf) if sp.issparse(H) else np.linalg.norm(H, np.inf)
    if dim <= max(4 * count, 64):
        dense = H.toarray() if sp.issparse(H) else np.asarray(H)
        evals, evecs = np.linalg.eigh(dense)
    else:
        k = min(count + 4, dim - 2)
        evals, evecs = spla.eigsh(H, k=k, which="SA", maxiter=maxiter,
                                  tol=tol_factor / 10)
    order = np.argsort(evals)
    out = []
    for idx in order[:count]:
        v = evecs[:, idx]
        resid = np.linalg.norm(H @ v - evals[idx] * v)
        if resid > tol_factor * max(scale, 1.0):
            raise RuntimeError(
                f"eigensolver residual {resid:.2e} exceeds tolerance "
                f"{tol_factor * scale:.2e}")
        v = v / np.linalg.norm(v)
        out.append(ManyBodyState(amplitudes=v.astype(complex),
                                 energy=float(evals[idx]), basis=basis))
    return out


@dataclass(frozen=True)
class MotionalDensityMatrix:
    """Reduced density matrix after tracing the internal labels.

    Stored in factored form rho = C C^dag, where C maps the internal label
    space onto the first-quantized motional product space (n_sites^N rows).
    """

    factor: np.ndarray  # shape (n_sites**N, 2**N)
    n_sites: int
    N: int

    @property
    def matrix(self) -> np.ndarray:
        dim = self.factor.shape[0]
        if dim > 8192:
            raise MemoryError(f"refusing to materialize {dim}x{dim} density matrix")
        return self.factor @ self.factor.conj().T

    @property
    def trace(self) -> float:
        return float(np.sum(np.abs(self.factor) ** 2))


def _first_quantized(state: ManyBodyState) -> np.ndarray:
    """Expand a Fock vector into the symmetric first-quantized wavefunction
    over (mode_1, ..., mode_N); supported for N in {1, 2}."""
    basis = state.basis
    M, N = basis.M, basis.N
    if N == 1:
        psi = np.zeros(M, dtype=complex)
        for i, (m,) in enumerate(basis.states):
            psi[m] = state.amplitudes[i]
        return psi
    if N == 2:
        psi = np.zeros((M, M), dtype=complex)
        inv_sqrt2 = 1.0 / math.sqrt(2.0)
        for i, (m1, m2) in enumerate(basis.states):
            a = state.amplitudes[i]
            if m1 == m2:
                psi[m1, m2] = a
            else:
                psi[m1, m2] = a * inv_sqrt2
                psi[m2, m1] = a * inv_sqrt2
        return psi
    raise NotImplementedError("first-quantized expansion implemented for N <= 2")


def motional_density_matrix(state: ManyBodyState) -> MotionalDensityMatrix:
    """Partial trace over the internal (a/b) labels.

    The state is expanded in the first-quantized symmetric basis
    |motional positions> (x) |internal labels> and the labels are traced,
    leaving a trace-one matrix over the N-fold motional product space.
    """
    basis = state.basis
    if basis.M % 2 != 0:
        raise ValueError("mode count must be even (two internal states)")
    ns = basis.M // 2
    N = basis.N
    psi = _first_quantized(state)
    if N == 1:
        # modes are (species * ns + site); reshape to (species, site)
        C = psi.reshape(2, ns).T  # rows: site, cols: internal label
    elif N == 2:
        # psi[mu1, mu2] with mu = s*ns + x -> tensor (s1, x1, s2, x2)
        t = psi.reshape(2, ns, 2, ns)
        # rows (x1, x2), cols (s1, s2)
        C = np.transpose(t, (1, 3, 0, 2)).reshape(ns * ns, 4)
    else:
        raise NotImplementedError("partial trace implemented for N <= 2")
    return MotionalDensityMatrix(factor=C, n_sites=ns, N=N)


def purity(rho: MotionalDensityMatrix) -> float:
    """Tr(rho^2), computed from the factored form."""
    G = rho.factor.conj().T @ rho.factor  # small (2^N x 2^N) Gram matrix
    return float(np.real(np.sum(np.abs(G) ** 2)))  # Tr(G^2) for Hermitian G


def c_mode_number(state: ManyBodyState) -> float:
    """Expectation of the total dark-mode number sum_site c^dag c with
    c = (a - b)/sqrt(2), in the gauge-transformed frame."""
    basis = state.basis
    ns = basis.M // 2
    # one-body operator: 1/2 (n_a + n_b - a^dag b - b^dag a) per site
    rows, cols, vals = [], [], []
    for s in range(ns):
        a, b = s, ns + s
        rows += [a, b, a, b]
        cols += [a, b, b, a]
        vals += [0.5, 0.5, -0.5, -0.5]
    op = sp.coo_matrix((vals, (rows, cols)), shape=(basis.M, basis.M)).tocsr()
    big = second_quantize(op, basis)
    v = state.amplitudes
    return float(np.real(np.vdot(v, big @ v)))


def expectation_one_body(state: ManyBodyState, op: sp.spmatrix) -> float:
    """<state| second-quantized(op) |state> for a Hermitian one-body op."""
    big = second_quantize(op, state.basis)
    v = state.amplitudes
    return float(np.real(np.vdot(v, big @ v)))


def subspace_overlap(rho: MotionalDensityMatrix, states: list[np.ndarray]) -> float:
    """Tr(P rho P) for the projector onto orthonormal symmetric motional
    states given as first-quantized product-space vectors."""
    total = 0.0
    for s in states:
        w = rho.factor.conj().T @ s  # length 2^N
        total += float(np.real(np.vdot(w, w)))
    return total


def symmetric_fock_to_product(vec: np.ndarray, basis: FockBasis) -> np.ndarray:
    """Embed a single-species N-boson Fock vector into the first-quantized
    product space (dimension M^N); supported for N in {1, 2}."""
    M, N = basis.M, basis.N
    st = ManyBodyState(amplitudes=np.asarray(vec, dtype=complex),
                       energy=0.0, basis=basis)
    psi = _first_quantized(st)
    return psi.ravel()
