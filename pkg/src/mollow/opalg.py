"""Tensor-product Hilbert-space layouts and dense operator algebra.

Conventions used throughout the package:

* Subsystem 0 is the slowest-varying index of the joint basis, i.e. the
  basis is ordered ``|i_0, i_1, ..., i_{n-1}>`` with the last subsystem
  cycling fastest (C order, matching ``numpy.kron``).
* All rates and frequencies are dimensionless, expressed in units of the
  emitter decay rate, and frequencies are measured from the drive
  (rotating-frame) frequency.
* Everything is dense ``complex128``; the spaces here are at most a few
  hundred dimensions, where dense linear algebra is both simpler and
  faster than sparse machinery.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import LayoutMismatchError

#: tolerance for algebraic identities (hermiticity, unit trace/norm)
ALG_TOL = 1e-10
#: slack allowed below zero for eigenvalues of physical density matrices
PSD_SLACK = 1e-8


@dataclass(frozen=True)
class SpaceLayout:
    """Ordered collection of labelled subsystems spanning a joint space."""

    subsystems: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        subs = tuple((str(lbl), int(dim)) for lbl, dim in self.subsystems)
        object.__setattr__(self, "subsystems", subs)
        labels = [lbl for lbl, _ in subs]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate subsystem labels in {labels}")
        for lbl, dim in subs:
            if dim < 2:
                raise ValueError(f"subsystem {lbl!r} has dim {dim} < 2")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lbl for lbl, _ in self.subsystems)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.subsystems)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def index(self, label: str) -> int:
        for k, (lbl, _) in enumerate(self.subsystems):
            if lbl == label:
                return k
        raise KeyError(f"no subsystem labelled {label!r} in {self.labels}")

    def dim_of(self, label: str) -> int:
        return self.subsystems[self.index(label)][1]

    def __contains__(self, label: str) -> bool:
        return label in self.labels


def layout(*subsystems: tuple[str, int]) -> SpaceLayout:
    """Shorthand constructor: ``layout(("sigma", 2), ("a1", 4))``."""
    return SpaceLayout(tuple(subsystems))


@dataclass(frozen=True)
class Operator:
    """Dense operator on a :class:`SpaceLayout`."""

    layout: SpaceLayout
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (self.layout.dim, self.layout.dim):
            raise LayoutMismatchError(
                f"matrix shape {mat.shape} != layout dim {self.layout.dim}"
            )
        object.__setattr__(self, "matrix", mat)

    def dag(self) -> "Operator":
        return Operator(self.layout, self.matrix.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def is_hermitian(self, tol: float = ALG_TOL) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T)) <= tol)

    def _check_same_layout(self, other: "Operator") -> None:
        if self.layout != other.layout:
            raise LayoutMismatchError("operators live on different layouts")

    def __add__(self, other: "Operator") -> "Operator":
        self._check_same_layout(other)
        return Operator(self.layout, self.matrix + other.matrix)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check_same_layout(other)
        return Operator(self.layout, self.matrix - other.matrix)

    def __neg__(self) -> "Operator":
        return Operator(self.layout, -self.matrix)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.layout, self.matrix * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, StateVector):
            if self.layout != other.layout:
                raise LayoutMismatchError("operator and state layouts differ")
            return StateVector(other.layout, self.matrix @ other.amplitudes,
                               normalized=False)
        self._check_same_layout(other)
        return Operator(self.layout, self.matrix @ other.matrix)


class DensityMatrix(Operator):
    """Operator validated as a physical state: Hermitian, unit trace,
    positive up to :data:`PSD_SLACK` of eigenvalue noise."""

    def __init__(self, layout: SpaceLayout, matrix: np.ndarray,
                 validate: bool = True):
        super().__init__(layout, matrix)
        if validate:
            self._validate()

    def _validate(self) -> None:
        mat = self.matrix
        herm_err = np.max(np.abs(mat - mat.conj().T))
        if herm_err > ALG_TOL:
            raise ValueError(f"not Hermitian: max asymmetry {herm_err:.2e}")
        tr_err = abs(np.trace(mat) - 1.0)
        if tr_err > ALG_TOL:
            raise ValueError(f"trace deviates from 1 by {tr_err:.2e}")
        lo = float(np.linalg.eigvalsh((mat + mat.conj().T) / 2).min())
        if lo < -PSD_SLACK:
            raise ValueError(f"negative eigenvalue {lo:.2e} below slack")

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


@dataclass(frozen=True)
class StateVector:
    """Pure state on a layout; unit norm unless ``normalized=False``
    (mid-step Monte Carlo states carry norm < 1)."""

    layout: SpaceLayout
    amplitudes: np.ndarray = field(repr=False)
    normalized: bool = True

    def __post_init__(self) -> None:
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amp.shape != (self.layout.dim,):
            raise LayoutMismatchError(
                f"amplitude length {amp.size} != layout dim {self.layout.dim}"
            )
        if self.normalized and abs(np.linalg.norm(amp) - 1.0) > ALG_TOL:
            raise ValueError("state vector is not normalized")
        object.__setattr__(self, "amplitudes", amp)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def unit(self) -> "StateVector":
        return StateVector(self.layout, self.amplitudes / self.norm)

    def inner(self, other: "StateVector") -> complex:
        if self.layout != other.layout:
            raise LayoutMismatchError("states live on different layouts")
        return complex(self.amplitudes.conj() @ other.amplitudes)

    def to_density(self) -> DensityMatrix:
        amp = self.amplitudes / self.norm
        return DensityMatrix(self.layout, np.outer(amp, amp.conj()))


def annihilation(dim: int, label: str = "mode") -> Operator:
    """Bosonic lowering operator on a ``dim``-level Fock ladder.

    Entries sqrt(k) at (k-1, k); for ``dim == 2`` this is the pseudo-spin
    lowering operator of a two-level emitter.
    """
    if dim < 2:
        raise ValueError(f"annihilation needs dim >= 2, got {dim}")
    mat = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)
    return Operator(layout((label, dim)), mat)


def identity(lay: SpaceLayout) -> Operator:
    return Operator(lay, np.eye(lay.dim))


def embed(op: Operator, lay: SpaceLayout, slot: str) -> Operator:
    """Place a single-subsystem operator into the joint space, tensoring
    identities on every other slot (basis ordering as documented above)."""
    k = lay.index(slot)
    dims = lay.dims
    if op.matrix.shape[0] != dims[k]:
        raise LayoutMismatchError(
            f"operator dim {op.matrix.shape[0]} != slot {slot!r} dim {dims[k]}"
        )
    before = int(np.prod(dims[:k])) if k > 0 else 1
    after = int(np.prod(dims[k + 1:])) if k + 1 < len(dims) else 1
    mat = np.kron(np.kron(np.eye(before), op.matrix), np.eye(after))
    return Operator(lay, mat)


def _reshaped(mat: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    n = len(dims)
    return mat.reshape(tuple(dims) * 2) if n > 1 else mat.reshape(dims[0], dims[0])


def partial_trace(rho: Operator, keep: Iterable[str]) -> DensityMatrix:
    """Trace out every subsystem not in ``keep``; kept subsystems retain
    their original relative order."""
    keep = set(keep)
    if not keep:
        raise ValueError("keep set must be nonempty")
    lay = rho.layout
    unknown = keep - set(lay.labels)
    if unknown:
        raise KeyError(f"unknown labels {sorted(unknown)}")
    dims = lay.dims
    n = len(dims)
    tensor = rho.matrix.reshape(tuple(dims) * 2)
    kept_idx = [i for i, lbl in enumerate(lay.labels) if lbl in keep]
    # contract bra/ket index pairs of the traced-out slots, highest first
    for i in reversed(range(n)):
        if i not in kept_idx:
            tensor = np.trace(tensor, axis1=i, axis2=i + tensor.ndim // 2)
    d_keep = int(np.prod([dims[i] for i in kept_idx]))
    new_layout = SpaceLayout(tuple(lay.subsystems[i] for i in kept_idx))
    out = tensor.reshape(d_keep, d_keep)
    # partial trace of a valid state is a valid state; skip re-diagonalizing
    return DensityMatrix(new_layout, out, validate=False)


def expectation(rho: Operator, op: Operator) -> complex:
    """Tr(rho @ op); imaginary part is numerical noise for Hermitian op."""
    if rho.layout != op.layout:
        raise LayoutMismatchError("state and operator layouts differ")
    return complex(np.trace(rho.matrix @ op.matrix))


def basis_state(lay: SpaceLayout, occupations: Mapping[str, int] | Sequence[int]) -> StateVector:
    """Product basis state; occupations per label (dict) or per slot (list)."""
    if isinstance(occupations, Mapping):
        occ = [occupations.get(lbl, 0) for lbl in lay.labels]
    else:
        occ = list(occupations)
    if len(occ) != len(lay.dims):
        raise LayoutMismatchError("one occupation per subsystem required")
    idx = 0
    for n, d in zip(occ, lay.dims):
        if not 0 <= n < d:
            raise ValueError(f"occupation {n} outside 0..{d - 1}")
        idx = idx * d + n
    amp = np.zeros(lay.dim)
    amp[idx] = 1.0
    return StateVector(lay, amp)


def bell_state(lay: SpaceLayout, kind: str, slots: tuple[str, str] | None = None) -> StateVector:
    """Two-mode Bell state on the {0,1} x {0,1} block of two slots.

    ``kind`` is one of ``phi+ phi- psi+ psi-``: phi states superpose
    |0,0> and |1,1>, psi states |0,1> and |1,0>.
    """
    if slots is None:
        if len(lay.labels) != 2:
            raise ValueError("slots must be given for layouts with != 2 subsystems")
        slots = (lay.labels[0], lay.labels[1])
    sign = {"phi+": 1.0, "phi-": -1.0, "psi+": 1.0, "psi-": -1.0}[kind]
    if kind.startswith("phi"):
        first, second = (0, 0), (1, 1)
    else:
        first, second = (0, 1), (1, 0)
    v1 = basis_state(lay, {slots[0]: first[0], slots[1]: first[1]})
    v2 = basis_state(lay, {slots[0]: second[0], slots[1]: second[1]})
    amp = (v1.amplitudes + sign * v2.amplitudes) / np.sqrt(2.0)
    return StateVector(lay, amp)
