"""Entanglement and nonclassicality measures.

Fidelity is the squared Uhlmann overlap F = (Tr sqrt(sqrt(rho) sigma
sqrt(rho)))^2 throughout, so quoted percentages are F itself, not its
square root.  Negativity is evaluated on whatever state is passed in; the
standard use here is the two-detector reduced state with the emitter
traced out.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .errors import TruncationWarning, UndefinedCorrelationError
from .liouville import liouvillian_matrix, steady_state
from .modelkit import LindbladModel, PolaritonSpec
from .opalg import (
    DensityMatrix,
    Operator,
    SpaceLayout,
    annihilation,
    basis_state,
    bell_state,
    embed,
    partial_trace,
)

#: eigenvalue noise floor clipped to zero inside measure computations
CLIP = 1e-10
#: clipped negative mass above this level points at a too-small truncation
CLIP_WARN_MASS = 1e-6

_SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
_SYSY = np.kron(_SIGMA_Y, _SIGMA_Y)


def _psd_eigvals(mat: np.ndarray) -> np.ndarray:
    vals = np.linalg.eigvalsh((mat + mat.conj().T) / 2.0)
    neg = vals[vals < 0.0]
    if neg.size and -neg.sum() > CLIP_WARN_MASS:
        warnings.warn(
            f"clipped negative eigenvalue mass {-neg.sum():.2e}; the state "
            "is not numerically positive (truncation too small?)",
            TruncationWarning, stacklevel=3)
    return np.clip(vals, 0.0, None)


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh((mat + mat.conj().T) / 2.0)
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.conj().T


def partial_transpose(rho: Operator, slot: str) -> Operator:
    """Transpose the bra/ket indices of one subsystem."""
    lay = rho.layout
    k = lay.index(slot)
    n = len(lay.dims)
    tensor = rho.matrix.reshape(tuple(lay.dims) * 2)
    tensor = np.swapaxes(tensor, k, k + n)
    return Operator(lay, tensor.reshape(lay.dim, lay.dim))


def log_negativity(rho: DensityMatrix, slot: str) -> float:
    """log2 of the trace norm of the partial transpose; an entanglement
    monotone that vanishes on separable states.  Negative eigenvalues
    within 1e-8 of zero are treated as solver noise."""
    pt = partial_transpose(rho, slot).matrix
    vals = np.linalg.eigvalsh((pt + pt.conj().T) / 2.0)
    vals = np.where((vals < 0.0) & (vals > -1e-8), 0.0, vals)
    return float(np.log2(np.sum(np.abs(vals))))


def csi_R(model_or_rho: LindbladModel | DensityMatrix, op_a: Operator,
          op_b: Operator) -> float:
    """Cauchy-Schwarz coefficient R = [G2_ab]^2 / (G2_aa G2_bb) from
    equal-time second-order moments G2_cd = <cd dd d c>; R > 1 flags a
    nonclassical pair of modes."""
    if isinstance(model_or_rho, LindbladModel):
        rho = steady_state(liouvillian_matrix(model_or_rho))
    else:
        rho = model_or_rho
    a, b, r = op_a.matrix, op_b.matrix, rho.matrix

    def g2(c, d):
        return float(np.real(np.trace(
            c.conj().T @ d.conj().T @ d @ c @ r)))

    g_ab = g2(a, b)
    g_aa = g2(a, a)
    g_bb = g2(b, b)
    if g_aa <= 1e-30 or g_bb <= 1e-30:
        raise UndefinedCorrelationError(
            f"autocorrelator vanishes (G2_aa={g_aa:.3e}, G2_bb={g_bb:.3e}); "
            "R is undefined")
    return g_ab**2 / (g_aa * g_bb)


@dataclass(frozen=True)
class DetectionMatrix:
    """Normalized restriction of a two-mode state to the {0,1} x {0,1}
    excitation block, ordered {|0,0>, |1,0>, |0,1>, |1,1>}; treated as a
    two-qubit state for concurrence."""

    matrix: np.ndarray = field(repr=False)
    norm: float
    basis: str = "bare"

    def __post_init__(self) -> None:
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (4, 4):
            raise ValueError("detection matrix must be 4x4")
        if np.max(np.abs(mat - mat.conj().T)) > 1e-10:
            raise ValueError("detection matrix is not Hermitian")
        if abs(np.trace(mat) - 1.0) > 1e-10:
            raise ValueError("detection matrix is not normalized")
        if np.linalg.eigvalsh(mat).min() < -1e-8:
            raise ValueError("detection matrix is not positive")
        object.__setattr__(self, "matrix", mat)

    def as_density(self) -> DensityMatrix:
        lay = SpaceLayout((("q1", 2), ("q2", 2)))
        return DensityMatrix(lay, self.matrix, validate=False)


def _block_states(lay: SpaceLayout, slots: tuple[str, str], basis: str,
                  spec: PolaritonSpec | None) -> list[np.ndarray]:
    """The four {0,1}x{0,1} basis vectors on the two-mode layout, either
    bare Fock states or dressed lower/upper-branch states."""
    vac = basis_state(lay, {slots[0]: 0, slots[1]: 0}).amplitudes
    if basis == "bare":
        vecs = [
            vac,
            basis_state(lay, {slots[0]: 1, slots[1]: 0}).amplitudes,
            basis_state(lay, {slots[0]: 0, slots[1]: 1}).amplitudes,
            basis_state(lay, {slots[0]: 1, slots[1]: 1}).amplitudes,
        ]
    elif basis == "polariton":
        if spec is None:
            raise ValueError("polariton basis requires a PolaritonSpec")
        cp, cm = spec.mixing()
        a = embed(annihilation(lay.dim_of(slots[0])), lay, slots[0]).matrix
        b = embed(annihilation(lay.dim_of(slots[1])), lay, slots[1]).matrix
        l_dag = cp * a.conj().T - cm * b.conj().T
        u_dag = cm * a.conj().T + cp * b.conj().T
        vecs = [vac, l_dag @ vac, u_dag @ vac, l_dag @ u_dag @ vac]
    else:
        raise ValueError(f"unknown basis {basis!r}")
    out = []
    for v in vecs:
        n = np.linalg.norm(v)
        if n < 1e-14:
            raise ValueError("a block state vanishes inside the truncation")
        out.append(v / n)
    return out


def detection_matrix(rho_ss: DensityMatrix, mode_pair: tuple[str, str],
                     basis: str = "bare",
                     polariton_spec: PolaritonSpec | None = None) -> DetectionMatrix:
    """Project the (reduced) steady state onto the two-excitation block.

    ``basis="polariton"`` projects onto states built by applying the
    dressed lower/upper raising operators to the vacuum inside the
    truncated space, which is how branch-resolved detection sees the
    coupled modes; ``basis="bare"`` uses the local Fock states.
    """
    for slot in mode_pair:
        if rho_ss.layout.dim_of(slot) < 2:
            raise ValueError(f"slot {slot!r} is not bosonic enough (dim < 2)")
    red = rho_ss
    if set(rho_ss.layout.labels) != set(mode_pair):
        red = partial_trace(rho_ss, set(mode_pair))
    vecs = _block_states(red.layout, mode_pair, basis, polariton_spec)
    theta = np.empty((4, 4), dtype=complex)
    for i, vi in enumerate(vecs):
        for j, vj in enumerate(vecs):
            theta[i, j] = vi.conj() @ red.matrix @ vj
    norm = float(np.real(np.trace(theta)))
    if norm < 1e-14:
        raise ValueError("projected block has vanishing weight")
    theta = theta / norm
    theta = (theta + theta.conj().T) / 2.0
    return DetectionMatrix(theta, norm, basis)


def concurrence(theta: DetectionMatrix) -> float:
    """Two-qubit concurrence max(0, l1 - l2 - l3 - l4) with the l_i the
    decreasing square roots of the eigenvalues of theta @ theta_tilde,
    theta_tilde the spin-flipped matrix."""
    th = theta.matrix
    th_tilde = _SYSY @ th.T @ _SYSY
    vals = np.linalg.eigvals(th @ th_tilde)
    vals = np.sqrt(np.clip(np.real(vals), 0.0, None))
    vals = np.sort(vals)[::-1]
    return float(max(0.0, vals[0] - vals[1] - vals[2] - vals[3]))


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Squared Uhlmann fidelity; symmetric, 1 iff the states coincide."""
    if rho.layout.dim != sigma.layout.dim:
        raise ValueError("states live on different dimensions")
    sq = _psd_sqrt(rho.matrix)
    inner = sq @ sigma.matrix @ sq
    vals = _psd_eigvals(inner)
    f = float(np.sum(np.sqrt(vals)) ** 2)
    return min(f, 1.0)


def purity(rho: DensityMatrix) -> float:
    return float(np.real(np.trace(rho.matrix @ rho.matrix)))


def postselect_remove_vacuum(rho: DensityMatrix) -> DensityMatrix:
    """Project out the joint-vacuum component and renormalize."""
    lay = rho.layout
    vac = basis_state(lay, [0] * len(lay.dims)).amplitudes
    proj = np.eye(lay.dim) - np.outer(vac, vac.conj())
    out = proj @ rho.matrix @ proj
    weight = float(np.real(np.trace(out)))
    if weight < 1e-14:
        raise ValueError("state is (numerically) pure vacuum; nothing survives")
    return DensityMatrix(lay, out / weight, validate=False)


@dataclass(frozen=True)
class BellReport:
    """Best fit of a two-mode state by w_vac |vac><vac| + w_B |B><B|.

    ``fidelity_to_model`` is the squared Uhlmann fidelity against the full
    two-mode state and ``fidelity_block`` the same against the normalized
    {0,1}x{0,1} restriction; ``overlap_to_model`` is the square root of
    the former (the non-squared convention, which is what the source
    literature quotes).  ``bell_purity`` is the purity of the detection
    block (the state post-selected onto at most one excitation per mode);
    ``postselected_purity`` additionally removes the vacuum component,
    which is only meaningful for Bell states without a vacuum amplitude.
    """

    bell_weight: float
    vacuum_weight: float
    fidelity_to_model: float
    overlap_to_model: float
    bell_purity: float
    postselected_purity: float
    fidelity_block: float
    bell_kind: str


def bell_report(rho_modes: DensityMatrix, bell: str = "phi-",
                mode_pair: tuple[str, str] | None = None) -> BellReport:
    """Characterize a two-mode state against a vacuum + Bell-state model."""
    lay = rho_modes.layout
    if mode_pair is None:
        if len(lay.labels) != 2:
            raise ValueError("mode_pair needed for layouts with != 2 slots")
        mode_pair = (lay.labels[0], lay.labels[1])
    rho = rho_modes
    if set(lay.labels) != set(mode_pair):
        rho = partial_trace(rho_modes, set(mode_pair))
        lay = rho.layout
    vac = basis_state(lay, [0, 0]).amplitudes
    b = bell_state(lay, bell, mode_pair).amplitudes
    vac_dm = np.outer(vac, vac.conj())
    bell_dm = np.outer(b, b.conj())

    def model(w: float) -> DensityMatrix:
        return DensityMatrix(lay, (1.0 - w) * vac_dm + w * bell_dm,
                             validate=False)

    res = scipy.optimize.minimize_scalar(
        lambda w: -fidelity(rho, model(w)), bounds=(0.0, 1.0),
        method="bounded", options={"xatol": 1e-10})
    w_opt = float(res.x)
    f_full = fidelity(rho, model(w_opt))

    theta = detection_matrix(rho, mode_pair, basis="bare")
    theta_dm = theta.as_density()
    qlay = theta_dm.layout
    vac4 = basis_state(qlay, [0, 0]).amplitudes
    b4 = bell_state(qlay, bell).amplitudes

    def model4(w: float) -> DensityMatrix:
        m = (1.0 - w) * np.outer(vac4, vac4.conj()) + w * np.outer(b4, b4.conj())
        return DensityMatrix(qlay, m, validate=False)

    res4 = scipy.optimize.minimize_scalar(
        lambda w: -fidelity(theta_dm, model4(w)), bounds=(0.0, 1.0),
        method="bounded", options={"xatol": 1e-10})
    f_block = fidelity(theta_dm, model4(float(res4.x)))

    ps = postselect_remove_vacuum(theta_dm)
    return BellReport(bell_weight=w_opt, vacuum_weight=1.0 - w_opt,
                      fidelity_to_model=f_full,
                      overlap_to_model=float(np.sqrt(f_full)),
                      bell_purity=purity(theta_dm),
                      postselected_purity=purity(ps),
                      fidelity_block=f_block, bell_kind=bell)
