"""Lindblad model construction: driven emitter, unidirectional cascades,
and target Hamiltonians (detector modes, coupled photon-exciton modes).

Master-equation convention: drho/dt = -i[H, rho] + sum_k (rate_k/2) D[c_k]
with D[c] rho = 2 c rho c^dag - c^dag c rho - rho c^dag c.  The cascade
compiler emits *blended* jump operators that carry their rates inside the
operator (channel rate 1), which keeps the unraveling used by the Monte
Carlo module in one-jump-per-click form.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import LayoutMismatchError, TruncationWarning
from .opalg import (
    DensityMatrix,
    Operator,
    SpaceLayout,
    annihilation,
    embed,
    layout,
    partial_trace,
)

HERM_TOL = 1e-10


@dataclass(frozen=True)
class Channel:
    """One collapse channel: rate (units of the emitter decay), collapse
    operator, and a unique label used for Monte Carlo click records."""

    rate: float
    collapse: Operator
    label: str


@dataclass(frozen=True)
class LindbladModel:
    """Hermitian Hamiltonian plus rated collapse channels on one layout."""

    layout: SpaceLayout
    hamiltonian: Operator
    channels: tuple[Channel, ...]

    def __post_init__(self) -> None:
        if self.hamiltonian.layout != self.layout:
            raise LayoutMismatchError("hamiltonian layout differs from model layout")
        if not self.hamiltonian.is_hermitian(HERM_TOL):
            raise ValueError("hamiltonian is not Hermitian within tolerance")
        labels = [ch.label for ch in self.channels]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate channel labels: {labels}")
        for ch in self.channels:
            if ch.rate < 0:
                raise ValueError(f"channel {ch.label!r} has negative rate {ch.rate}")
            if ch.collapse.layout != self.layout:
                raise LayoutMismatchError(f"channel {ch.label!r} layout differs")

    @property
    def channel_labels(self) -> tuple[str, ...]:
        return tuple(ch.label for ch in self.channels)

    def channel(self, label: str) -> Channel:
        for ch in self.channels:
            if ch.label == label:
                return ch
        raise KeyError(f"no channel labelled {label!r}")


@dataclass(frozen=True)
class TargetSpec:
    """One cascaded target mode.

    ``lam`` is the fraction of the source emission routed into the blended
    jump operator of this target, ``kappa`` the fraction of the target decay
    kept as an independent loss channel, ``epsilon`` the collection
    efficiency (applied by rescaling lam -> epsilon*lam, which rescales the
    effective coupling alpha = lam*(1-kappa) by epsilon).  ``detuning`` is
    the target frequency relative to the drive; it is consumed by the
    Hamiltonian builders, not by the cascade compiler itself.
    """

    slot: str
    Gamma: float
    lam: float = 0.5
    kappa: float = 0.0
    epsilon: float = 1.0
    detuning: float = 0.0

    def __post_init__(self) -> None:
        if self.Gamma <= 0:
            raise ValueError("target decay rate must be positive")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lam must lie in [0, 1]")
        if not 0.0 <= self.kappa <= 1.0:
            raise ValueError("kappa must lie in [0, 1]")
        if not 0.0 < self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in (0, 1]")

    @property
    def lam_eff(self) -> float:
        return self.epsilon * self.lam

    @property
    def alpha(self) -> float:
        """Effective dissipative-coupling fraction epsilon*lam*(1-kappa)."""
        return self.lam_eff * (1.0 - self.kappa)


@dataclass(frozen=True)
class CascadeSpec:
    """Unidirectional source -> targets coupling description."""

    targets: tuple[TargetSpec, ...]
    gamma_sigma: float = 1.0
    source_slot: str = "sigma"
    source_channel: str = "sigma"

    def __post_init__(self) -> None:
        if self.gamma_sigma <= 0:
            raise ValueError("source decay rate must be positive")
        slots = [t.slot for t in self.targets]
        if len(set(slots)) != len(slots):
            raise ValueError(f"duplicate target slots: {slots}")
        total = sum(t.lam_eff for t in self.targets)
        if total > 1.0 + 1e-12:
            raise ValueError(
                f"sum of effective lam fractions {total:.6f} exceeds 1; the "
                "residual source decay rate would be negative"
            )

    @property
    def residual_source_rate(self) -> float:
        return self.gamma_sigma * max(0.0, 1.0 - sum(t.lam_eff for t in self.targets))


@dataclass(frozen=True)
class PolaritonSpec:
    """Coupled photon (a) / exciton (b) pair in the strong-coupling regime.

    Frequencies are relative to the drive; ``g`` is the light-matter
    coupling.  The lower/upper dressed modes are l = c+ a - c- b and
    u = c- a + c+ b with c+- = sqrt((1 +- delta/sqrt(delta^2+4g^2))/2)
    and delta = omega_b - omega_a.
    """

    omega_a: float
    omega_b: float
    g: float
    Gamma_a: float
    Gamma_b: float
    truncation_a: int = 4
    truncation_b: int = 4

    def __post_init__(self) -> None:
        if self.g < 0:
            raise ValueError("coupling g must be nonnegative")
        if self.truncation_a < 2 or self.truncation_b < 2:
            raise ValueError("Fock truncations must be >= 2")

    @property
    def delta(self) -> float:
        return self.omega_b - self.omega_a

    def mixing(self) -> tuple[float, float]:
        """(c_plus, c_minus) dressing coefficients; degenerate d=g=0 falls
        back to the symmetric 1/sqrt(2) mixture."""
        root = np.hypot(self.delta, 2.0 * self.g)
        s = self.delta / root if root > 0 else 0.0
        return float(np.sqrt((1 + s) / 2)), float(np.sqrt((1 - s) / 2))

    def branch_frequencies(self) -> tuple[float, float]:
        """(omega_lower, omega_upper) relative to the drive."""
        root = np.hypot(self.delta, 2.0 * self.g)
        mid = (self.omega_a + self.omega_b) / 2.0
        return mid - root / 2.0, mid + root / 2.0


def build_driven_2ls(delta: float, omega_drive: float, gamma: float = 1.0,
                     slot: str = "sigma") -> LindbladModel:
    """Coherently driven two-level emitter in the drive rotating frame.

    H = delta sd s + omega_drive (sd + s) on a dim-2 space, with a single
    decay channel (gamma, s).  delta is the emitter-drive detuning.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    lay = layout((slot, 2))
    s = annihilation(2, slot)
    sm = Operator(lay, s.matrix)
    h = delta * (sm.dag() @ sm) + omega_drive * (sm.dag() + sm)
    return LindbladModel(lay, h, (Channel(gamma, sm, slot),))


def detector_hamiltonian(omega1: float, omega2: float, lay: SpaceLayout,
                         slots: tuple[str, str] = ("a1", "a2")) -> Operator:
    """Free Hamiltonian of two detector modes at the given frequencies
    (relative to the drive): omega1 n1 + omega2 n2."""
    h = np.zeros((lay.dim, lay.dim), dtype=complex)
    for omega, slot in zip((omega1, omega2), slots):
        a = embed(annihilation(lay.dim_of(slot)), lay, slot)
        h += omega * (a.dag() @ a).matrix
    return Operator(lay, h)


def polariton_hamiltonian(spec: PolaritonSpec, lay: SpaceLayout,
                          slots: tuple[str, str] = ("a", "b")) -> Operator:
    """omega_a n_a + omega_b n_b + g (ad b + bd a) on the given layout."""
    sa, sb = slots
    for slot, trunc in ((sa, spec.truncation_a), (sb, spec.truncation_b)):
        if lay.dim_of(slot) != trunc:
            raise LayoutMismatchError(
                f"slot {slot!r} dim {lay.dim_of(slot)} != spec truncation {trunc}"
            )
    a = embed(annihilation(spec.truncation_a), lay, sa)
    b = embed(annihilation(spec.truncation_b), lay, sb)
    h = (spec.omega_a * (a.dag() @ a) + spec.omega_b * (b.dag() @ b)
         + spec.g * (a.dag() @ b + b.dag() @ a))
    return Operator(lay, h.matrix)


def cascade(source: LindbladModel, spec: CascadeSpec,
            target_hamiltonian: Operator) -> LindbladModel:
    """Compile the unidirectional source -> targets master equation into
    explicit Lindblad form.

    The source channel named ``spec.source_channel`` (rate gamma) is split
    into one blended jump operator per target,

        O_n = sqrt(lam_n gamma) s + sqrt((1-kappa_n) Gamma_n) a_n,

    carried at channel rate 1, plus a residual source channel at rate
    (1 - sum lam_n) gamma and residual target channels at rates
    kappa_n Gamma_n.  The Hamiltonian gains the coupling i H'_n with

        H'_n = (1/2) sqrt(lam_n (1-kappa_n) gamma Gamma_n) (sd a_n - ad_n s),

    which is Hermitian as written (H'_n itself is anti-Hermitian) and
    whose interference against the blended dissipator cancels all
    back-action on the source: expanding rate/2 D[O_n] + i[.., i H'_n]
    reproduces exactly the unidirectional coupling terms
    sqrt(alpha_n gamma Gamma_n) ([s rho, ad_n] + [a_n, rho sd]).
    Collection efficiency enters as lam_n -> epsilon_n lam_n.
    """
    lay = target_hamiltonian.layout
    if not target_hamiltonian.is_hermitian(HERM_TOL):
        raise ValueError("target Hamiltonian is not Hermitian")
    if spec.source_slot not in lay:
        raise LayoutMismatchError(f"joint layout lacks slot {spec.source_slot!r}")
    for lbl in source.layout.labels:
        if lbl not in lay:
            raise LayoutMismatchError(f"joint layout lacks source slot {lbl!r}")

    def lift(op: Operator) -> Operator:
        # source operators act on a sublayout; re-embed slot by slot
        if source.layout == lay:
            return op
        if len(source.layout.labels) != 1:
            raise LayoutMismatchError("multi-slot source models must share the joint layout")
        return embed(op, lay, source.layout.labels[0])

    src_channel = source.channel(spec.source_channel)
    g_src = src_channel.rate
    if abs(g_src - spec.gamma_sigma) > 1e-12:
        raise ValueError(
            f"source channel rate {g_src} != spec.gamma_sigma {spec.gamma_sigma}"
        )
    s = lift(src_channel.collapse)

    h = lift(source.hamiltonian).matrix + target_hamiltonian.matrix
    channels: list[Channel] = []
    for tgt in spec.targets:
        a = embed(annihilation(lay.dim_of(tgt.slot)), lay, tgt.slot)
        coupling = np.sqrt(tgt.alpha * g_src * tgt.Gamma)
        # i H'_n is Hermitian: (sd a - ad s) is anti-Hermitian
        h = h + 0.5j * coupling * (s.dag() @ a - a.dag() @ s).matrix
        blended = np.sqrt(tgt.lam_eff * g_src) * s.matrix \
            + np.sqrt((1.0 - tgt.kappa) * tgt.Gamma) * a.matrix
        channels.append(Channel(1.0, Operator(lay, blended), tgt.slot))
        if tgt.kappa > 0:
            channels.append(Channel(tgt.kappa * tgt.Gamma, a, f"{tgt.slot}_res"))
    if spec.residual_source_rate > 1e-15:
        channels.append(
            Channel(spec.residual_source_rate, s, f"{spec.source_channel}_res")
        )
    # source channels other than the split one pass through unchanged
    for ch in source.channels:
        if ch.label != spec.source_channel:
            channels.append(Channel(ch.rate, lift(ch.collapse), ch.label))
    return LindbladModel(lay, Operator(lay, h), tuple(channels))


def top_level_populations(rho: DensityMatrix,
                          slots: tuple[str, ...] | None = None) -> dict[str, float]:
    """Population of the highest Fock level of each bosonic slot (dim >= 3)."""
    lay = rho.layout
    if slots is None:
        slots = tuple(lbl for lbl, d in lay.subsystems if d >= 3)
    out: dict[str, float] = {}
    for slot in slots:
        red = partial_trace(rho, {slot})
        out[slot] = float(np.real(red.matrix[-1, -1]))
    return out


def check_truncation_health(rho: DensityMatrix, tol: float = 1e-4,
                            slots: tuple[str, ...] | None = None) -> dict[str, float]:
    """Warn if any truncated mode holds more than ``tol`` population in its
    top Fock level; returns the populations for reporting."""
    pops = top_level_populations(rho, slots)
    for slot, p in pops.items():
        if p > tol:
            warnings.warn(
                f"slot {slot!r} top Fock level holds population {p:.2e} > {tol:.0e}; "
                "increase the truncation",
                TruncationWarning,
                stacklevel=2,
            )
    return pops
