"""Superoperator assembly, steady states, transition energies, spectra.

Vectorization is column-stacking: vec(A X B) = (B^T kron A) vec(X), with
vec(X) = X.flatten(order="F").  The stored generator L satisfies
d vec(rho)/dt = L vec(rho); the decay rates are -Re eig(L) and the
transition energies are the imaginary parts of the eigenvalues of -L.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from .errors import DegenerateSteadyStateError
from .modelkit import LindbladModel
from .opalg import DensityMatrix, Operator, SpaceLayout

#: eigenvalues closer to zero than this count as stationary
ZERO_TOL = 1e-8


def vec(mat: np.ndarray) -> np.ndarray:
    return np.asarray(mat, dtype=complex).flatten(order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(v.size)))
    return v.reshape(d, d, order="F")


@dataclass(frozen=True)
class Superoperator:
    """Dense d^2 x d^2 generator in column-stacking convention."""

    layout: SpaceLayout
    matrix: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.layout.dim


def lindblad_rhs(model: LindbladModel, rho: np.ndarray) -> np.ndarray:
    """Direct evaluation of -i[H, rho] + sum (rate/2) D[c] rho; the
    independent reference the vectorized generator is tested against."""
    h = model.hamiltonian.matrix
    out = -1j * (h @ rho - rho @ h)
    for ch in model.channels:
        c = ch.collapse.matrix
        cdc = c.conj().T @ c
        out += (ch.rate / 2.0) * (2.0 * c @ rho @ c.conj().T - cdc @ rho - rho @ cdc)
    return out


def liouvillian_matrix(model: LindbladModel) -> Superoperator:
    """Assemble the dense generator of the model's master equation."""
    d = model.layout.dim
    eye = np.eye(d)
    h = model.hamiltonian.matrix
    L = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for ch in model.channels:
        c = ch.collapse.matrix
        cdc = c.conj().T @ c
        L += (ch.rate / 2.0) * (
            2.0 * np.kron(c.conj(), c)
            - np.kron(eye, cdc)
            - np.kron(cdc.T, eye)
        )
    return Superoperator(model.layout, L)


def _steady_from_eig(L: Superoperator) -> DensityMatrix:
    evals, evecs = np.linalg.eig(L.matrix)
    near_zero = np.flatnonzero(np.abs(evals) < ZERO_TOL)
    if near_zero.size == 0:
        raise DegenerateSteadyStateError(
            f"no stationary mode found (closest |eig| = {np.min(np.abs(evals)):.2e})"
        )
    if near_zero.size > 1:
        raise DegenerateSteadyStateError(
            f"{near_zero.size} stationary modes within {ZERO_TOL:.0e}; "
            "steady state is not unique"
        )
    rho = unvec(evecs[:, near_zero[0]])
    rho = (rho + rho.conj().T) / 2.0
    rho /= np.trace(rho)
    return DensityMatrix(L.layout, rho)


def steady_state(L: Superoperator, rcond_min: float = 1e-12) -> DensityMatrix:
    """Unique stationary state of the generator.

    Solves the bordered system (one row of L replaced by the trace
    constraint).  If the generator has a degenerate stationary subspace the
    bordered matrix is necessarily singular, so the solve falls through to
    a full eigendecomposition, which reports the degeneracy instead of
    silently picking a representative.
    """
    d = L.dim
    A = np.array(L.matrix)
    A[0, :] = vec(np.eye(d))
    b = np.zeros(d * d, dtype=complex)
    b[0] = 1.0
    try:
        anorm = np.linalg.norm(A, 1)
        lu, piv = scipy.linalg.lu_factor(A)
        rcond = scipy.linalg.lapack.zgecon(lu, anorm)[0]
        if rcond < rcond_min:
            return _steady_from_eig(L)
        x = scipy.linalg.lu_solve((lu, piv), b)
    except (scipy.linalg.LinAlgError, np.linalg.LinAlgError):
        return _steady_from_eig(L)
    residual = np.max(np.abs(L.matrix @ x))
    if not np.isfinite(residual) or residual > 1e-8 * max(1.0, anorm):
        return _steady_from_eig(L)
    rho = unvec(x)
    rho = (rho + rho.conj().T) / 2.0
    rho /= np.trace(rho)
    return DensityMatrix(L.layout, rho)


class LiouvilleEigen:
    """Cached eigendecomposition of a generator, shared across propagation
    times: exp(L t) v = V exp(diag(w) t) V^-1 v."""

    def __init__(self, L: Superoperator):
        self.L = L
        self.eigvals, self.V = np.linalg.eig(L.matrix)
        self.Vinv = np.linalg.inv(self.V)

    @cached_property
    def reconstruction_error(self) -> float:
        approx = (self.V * self.eigvals) @ self.Vinv
        scale = max(1.0, np.max(np.abs(self.L.matrix)))
        return float(np.max(np.abs(approx - self.L.matrix)) / scale)

    @property
    def trustworthy(self) -> bool:
        # defective (non-diagonalizable) generators reconstruct poorly
        return self.reconstruction_error < 1e-9

    def propagate_vec(self, v: np.ndarray, t: float) -> np.ndarray:
        return self.V @ (np.exp(self.eigvals * t) * (self.Vinv @ v))

    def propagate_many(self, v: np.ndarray, times: np.ndarray) -> np.ndarray:
        """Stack of exp(L t_k) v, one row per time."""
        coeff = self.Vinv @ v
        phases = np.exp(np.outer(np.asarray(times), self.eigvals))
        return (phases * coeff) @ self.V.T


def transition_energies(L: Superoperator, merge_tol: float = 1e-6,
                        weight_op: Operator | None = None,
                        weight_tol: float = 1e-8) -> np.ndarray:
    """Sorted distinct transition energies: imaginary parts of the
    eigenvalues of -L, merged within ``merge_tol``.

    With ``weight_op`` given (e.g. the emitter lowering operator), modes
    whose detection-side overlap |Tr(w^dag V_j)| is below ``weight_tol``
    are dropped before merging; these are coherence modes that cannot feed
    the monitored emission line.
    """
    evals, evecs = np.linalg.eig(L.matrix)
    energies = np.imag(-evals)
    if weight_op is not None:
        w = vec(weight_op.matrix)
        overlaps = np.abs(w.conj() @ evecs) / np.linalg.norm(evecs, axis=0)
        keep = overlaps > weight_tol
        energies = energies[keep]
    if energies.size == 0:
        return np.array([])
    energies = np.sort(energies)
    merged: list[float] = []
    group = [energies[0]]
    for e in energies[1:]:
        if e - group[-1] <= merge_tol:
            group.append(e)
        else:
            merged.append(float(np.mean(group)))
            group = [e]
    merged.append(float(np.mean(group)))
    return np.array(merged)


@dataclass(frozen=True)
class SpectrumTable:
    """Emission spectrum on a frequency grid (drive-frame offsets), with
    the delta-like coherent scattering weight reported separately."""

    omega: np.ndarray
    density: np.ndarray
    coherent_weight: float

    def __post_init__(self) -> None:
        if self.omega.shape != self.density.shape:
            raise ValueError("grid and density shapes differ")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("omega_over_gamma,spectral_density\n")
            for w, s in zip(self.omega.tolist(), self.density.tolist()):
                fh.write(f"{w!r},{s!r}\n")


def emission_spectrum(model: LindbladModel, emitter_op: Operator,
                      omega_grid: np.ndarray) -> SpectrumTable:
    """Steady-state emission spectrum of ``emitter_op``.

    Wiener-Khinchin form S(w) ~ Re int_0^inf e^{i w tau} <cd(tau) c(0)> dtau
    evaluated through the generator's eigenmodes, so every nonstationary
    mode contributes one Lorentzian and no stiff time integration is
    needed.  The stationary mode carries the coherent (elastic) delta peak,
    returned as ``coherent_weight = |<c>|^2`` instead of being smeared onto
    the grid.  The on-grid density is normalized to unit integral.
    """
    omega_grid = np.asarray(omega_grid, dtype=float)
    L = liouvillian_matrix(model)
    rho_ss = steady_state(L)
    eig = LiouvilleEigen(L)
    c = emitter_op.matrix
    coeff = eig.Vinv @ vec(c @ rho_ss.matrix)
    weights = (vec(c).conj() @ eig.V) * coeff
    radiating = np.abs(eig.eigvals) > ZERO_TOL
    lam = eig.eigvals[radiating]
    w_j = weights[radiating]
    # int_0^inf e^{(i w + lam) tau} dtau = -1/(lam + i w) for Re lam < 0
    dens = np.array([
        float(np.sum((w_j * (-1.0 / (lam + 1j * w))).real) / np.pi)
        for w in omega_grid
    ])
    dens = np.clip(dens, 0.0, None)
    total = np.trapezoid(dens, omega_grid)
    if total > 0:
        dens = dens / total
    coherent = float(np.abs(np.trace(c @ rho_ss.matrix)) ** 2)
    return SpectrumTable(omega_grid, dens, coherent)
