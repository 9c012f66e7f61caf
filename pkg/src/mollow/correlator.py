"""Propagation and two-time correlation functions via the quantum
regression theorem.

For a stationary model, <A(t+tau) B(t)> = Tr[A exp(L tau)(B rho_ss)], so
the cross-correlator G(tau) = <n1(0) n2(tau)> is the overlap of the
number operator of mode 2 against the propagated conditional state
op1 rho_ss op1^dag.  Negative delays use the stationary exchange
identity g12(-tau) = g21(tau) rather than anti-causal propagation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import UndefinedCorrelationError
from .liouville import LiouvilleEigen, Superoperator, liouvillian_matrix, steady_state, unvec, vec
from .modelkit import LindbladModel
from .opalg import DensityMatrix, Operator


@dataclass(frozen=True)
class CorrelationCurve:
    """Sampled correlation (or ratio) curve over delays in emitter
    lifetimes; ``flags`` marks bins where the value is undefined."""

    tau: np.ndarray
    values: np.ndarray
    op_labels: tuple[str, str] = ("", "")
    norms: tuple[float, float] = (1.0, 1.0)
    flags: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.tau.shape != self.values.shape:
            raise ValueError("tau and value shapes differ")

    def to_csv(self, path, value_column: str = "g2") -> None:
        with open(path, "w", newline="") as fh:
            if self.flags is None:
                fh.write(f"tau_gamma,{value_column}\n")
                for t, v in zip(self.tau.tolist(), self.values.tolist()):
                    fh.write(f"{t!r},{v!r}\n")
            else:
                fh.write(f"tau_gamma,{value_column},flags\n")
                for t, v, f in zip(self.tau.tolist(), self.values.tolist(),
                                   self.flags.tolist()):
                    fh.write(f"{t!r},{'nan' if f else repr(v)},{int(f)}\n")


def evolve(model: LindbladModel, rho0: DensityMatrix, t: float,
           eig: LiouvilleEigen | None = None) -> DensityMatrix:
    """rho(t) = exp(L t) rho0 through the generator's eigendecomposition,
    falling back to a scaling-and-squaring matrix exponential when the
    generator is too close to defective to diagonalize reliably."""
    if not np.isfinite(t) or t < 0:
        raise ValueError(f"propagation time must be finite and >= 0, got {t}")
    if t == 0:
        return rho0
    if eig is None:
        eig = LiouvilleEigen(liouvillian_matrix(model))
    if eig.trustworthy:
        v = eig.propagate_vec(vec(rho0.matrix), t)
    else:
        v = scipy.linalg.expm(eig.L.matrix * t) @ vec(rho0.matrix)
    out = unvec(v)
    out = (out + out.conj().T) / 2.0
    drift = abs(np.trace(out) - 1.0)
    if drift > 1e-9:
        raise RuntimeError(f"trace drifted by {drift:.2e} during propagation")
    return DensityMatrix(model.layout, out)


def _steady_and_eigen(model: LindbladModel,
                      eig: LiouvilleEigen | None) -> tuple[DensityMatrix, LiouvilleEigen]:
    if eig is None:
        eig = LiouvilleEigen(liouvillian_matrix(model))
    return steady_state(eig.L), eig


def g2_cross(model: LindbladModel, op1: Operator, op2: Operator,
             tau_grid: np.ndarray, direction: str = "auto",
             eig: LiouvilleEigen | None = None) -> CorrelationCurve:
    """Normalized cross-correlator g2_12(tau) between two monitored modes.

    Positive delays propagate the op1-conditioned steady state and read
    out mode 2; negative delays exchange the roles (stationary identity).
    ``direction`` can force "forward"/"backward" interpretation of a
    nonnegative grid; "auto" stitches both signs of the given grid.
    """
    tau_grid = np.asarray(tau_grid, dtype=float)
    rho_ss, eig = _steady_and_eigen(model, eig)
    m1, m2 = op1.matrix, op2.matrix
    n1 = float(np.real(np.trace(m1.conj().T @ m1 @ rho_ss.matrix)))
    n2 = float(np.real(np.trace(m2.conj().T @ m2 @ rho_ss.matrix)))
    if n1 <= 0 or n2 <= 0:
        raise UndefinedCorrelationError(
            f"cannot normalize: steady-state populations ({n1:.3e}, {n2:.3e})"
        )
    if direction not in ("auto", "forward", "backward"):
        raise ValueError(f"unknown direction {direction!r}")
    if direction != "auto" and np.any(tau_grid < 0):
        raise ValueError("forced-direction grids must be nonnegative")

    values = np.empty_like(tau_grid)

    def branch(a_first: np.ndarray, a_second: np.ndarray,
               taus: np.ndarray) -> np.ndarray:
        conditioned = vec(a_first @ rho_ss.matrix @ a_first.conj().T)
        readout = vec(a_second.conj().T @ a_second)
        propagated = eig.propagate_many(conditioned, np.abs(taus))
        return np.real(propagated @ readout.conj())

    if direction == "backward":
        fwd = np.zeros_like(tau_grid, dtype=bool)
    elif direction == "forward":
        fwd = np.ones_like(tau_grid, dtype=bool)
    else:
        fwd = tau_grid >= 0
    if np.any(fwd):
        values[fwd] = branch(m1, m2, tau_grid[fwd])
    if np.any(~fwd):
        values[~fwd] = branch(m2, m1, tau_grid[~fwd])
    return CorrelationCurve(tau_grid, values / (n1 * n2),
                            op_labels=("op1", "op2"), norms=(n1, n2))


def g2_auto_zero(model_or_rho: LindbladModel | DensityMatrix,
                 op: Operator) -> float:
    """Equal-time autocorrelation <cd cd c c> / <cd c>^2."""
    if isinstance(model_or_rho, LindbladModel):
        rho = steady_state(liouvillian_matrix(model_or_rho))
    else:
        rho = model_or_rho
    c = op.matrix
    n = float(np.real(np.trace(c.conj().T @ c @ rho.matrix)))
    if n <= 0:
        raise UndefinedCorrelationError("mode is unpopulated; g2(0) undefined")
    g2 = float(np.real(np.trace(c.conj().T @ c.conj().T @ c @ c @ rho.matrix)))
    return g2 / n**2
