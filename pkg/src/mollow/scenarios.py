"""Paper-level experiments: emitter + two-detector assembly, sideband
formulas, parameter maps, detuning/drive optimization, and the coupled
photon-exciton (polariton) study.

Unless stated otherwise every rate and frequency is in units of the
emitter decay rate and frequencies are offsets from the drive.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.optimize

from .entglmeas import (
    BellReport,
    DetectionMatrix,
    bell_report,
    concurrence,
    csi_R,
    detection_matrix,
    fidelity,
    log_negativity,
    postselect_remove_vacuum,
)
from .errors import TruncationError, UndefinedCorrelationError
from .liouville import liouvillian_matrix, steady_state
from .modelkit import (
    CascadeSpec,
    LindbladModel,
    PolaritonSpec,
    TargetSpec,
    build_driven_2ls,
    cascade,
    detector_hamiltonian,
    polariton_hamiltonian,
    top_level_populations,
)
from .opalg import DensityMatrix, annihilation, basis_state, bell_state, embed, \
    expectation, layout, partial_trace


def sideband_frequencies(delta: float, omega_drive: float) -> tuple[float, float]:
    """Drive-frame satellite-line positions (omega_plus, omega_minus) of
    the strongly driven emitter: +-sqrt(4 Omega^2 + Delta^2)."""
    w = math.hypot(2.0 * omega_drive, delta)
    return w, -w


@dataclass(frozen=True)
class MollowConfig:
    """Driven emitter observed by two cascaded detector modes.

    Detector frequencies default to the two satellite lines.  ``kappa``
    splits each detector linewidth into an absorption channel (rate
    kappa*Gamma, pure detector clicks for Monte Carlo counting) and the
    blended cascade output; kappa = 0 reproduces the plain two-detector
    master equation.
    """

    omega_drive: float
    delta: float
    gamma: float = 1.0
    Gamma: float = 0.1
    omega1: float | None = None
    omega2: float | None = None
    truncation: int = 4
    lam: float = 0.5
    kappa: float = 0.0
    epsilon: float = 1.0

    def __post_init__(self) -> None:
        if self.omega_drive < 0:
            raise ValueError("drive intensity must be nonnegative")
        if self.Gamma <= 0 or self.gamma <= 0:
            raise ValueError("rates must be positive")
        if self.truncation < 2:
            raise ValueError("detector truncation needs at least 2 Fock levels")

    def detector_frequencies(self) -> tuple[float, float]:
        wp, wm = sideband_frequencies(self.delta, self.omega_drive)
        return (self.omega1 if self.omega1 is not None else wp,
                self.omega2 if self.omega2 is not None else wm)


def build_system(cfg: MollowConfig) -> LindbladModel:
    """Compile the emitter + two-detector cascade on layout
    (sigma, a1, a2); detector 1 sits at the high-energy satellite by
    default, detector 2 at the low-energy one."""
    src = build_driven_2ls(cfg.delta, cfg.omega_drive, cfg.gamma)
    lay = layout(("sigma", 2), ("a1", cfg.truncation), ("a2", cfg.truncation))
    w1, w2 = cfg.detector_frequencies()
    hd = detector_hamiltonian(w1, w2, lay)
    spec = CascadeSpec(
        gamma_sigma=cfg.gamma,
        targets=(TargetSpec("a1", cfg.Gamma, cfg.lam, cfg.kappa, cfg.epsilon, w1),
                 TargetSpec("a2", cfg.Gamma, cfg.lam, cfg.kappa, cfg.epsilon, w2)),
    )
    return cascade(src, spec, hd)


def solve_steady(model: LindbladModel, health_tol: float = 1e-4):
    """Steady state plus truncation-health result (top Fock populations)."""
    rho = steady_state(liouvillian_matrix(model))
    pops = top_level_populations(rho)
    healthy = all(p <= health_tol for p in pops.values())
    return rho, pops, healthy


@dataclass
class SweepResultRow:
    Omega: float
    Delta: float
    Gamma: float
    negativity: float = math.nan
    R: float = math.nan
    g2_cross0: float = math.nan
    gamma_over_omegaplus: float = math.nan
    intensity: float = math.nan
    bell_weight: float = math.nan
    bell_fidelity: float = math.nan
    bell_purity: float = math.nan
    flags: str = ""

    CSV_HEADER = ("Omega,Delta,Gamma,negativity,R,g2_cross0,"
                  "gamma_over_omegaplus,intensity,bell_weight,bell_fidelity,"
                  "bell_purity,flags")

    def to_csv_line(self) -> str:
        vals = [self.Omega, self.Delta, self.Gamma, self.negativity, self.R,
                self.g2_cross0, self.gamma_over_omegaplus, self.intensity,
                self.bell_weight, self.bell_fidelity, self.bell_purity]
        return ",".join(
            "nan" if math.isnan(float(v)) else repr(float(v)) for v in vals
        ) + f",{self.flags}"


def point_metrics(cfg: MollowConfig, with_bell: bool = True,
                  health_tol: float = 1e-4) -> SweepResultRow:
    """All per-point observables of the parameter maps at one
    (Omega, Delta, Gamma): negativity and CSI coefficient of the reduced
    two-detector state, equal-time cross-correlation, linewidth-to-
    splitting ratio, detector emission rate, and the Bell-model fit."""
    row = SweepResultRow(cfg.omega_drive, cfg.delta, cfg.Gamma)
    flags: list[str] = []
    try:
        model = build_system(cfg)
        rho, pops, healthy = solve_steady(model, health_tol)
        if not healthy:
            flags.append("truncation")
        red = partial_trace(rho, {"a1", "a2"})
        a1 = embed(annihilation(cfg.truncation), red.layout, "a1")
        a2 = embed(annihilation(cfg.truncation), red.layout, "a2")
        n1 = float(np.real(expectation(red, a1.dag() @ a1)))
        n2 = float(np.real(expectation(red, a2.dag() @ a2)))
        row.negativity = log_negativity(red, "a1")
        wp = abs(cfg.detector_frequencies()[0])
        row.gamma_over_omegaplus = cfg.Gamma / wp if wp > 0 else math.inf
        row.intensity = cfg.Gamma * n1
        try:
            row.R = csi_R(red, a1, a2)
        except UndefinedCorrelationError:
            flags.append("undefined_R")
        if n1 > 0 and n2 > 0:
            g_ab = float(np.real(np.trace(
                a1.matrix.conj().T @ a2.matrix.conj().T @ a2.matrix
                @ a1.matrix @ red.matrix)))
            row.g2_cross0 = g_ab / (n1 * n2)
        else:
            flags.append("unpopulated")
        if with_bell:
            rep = bell_report(red, "phi-")
            row.bell_weight = rep.bell_weight
            row.bell_fidelity = rep.fidelity_to_model
            row.bell_purity = rep.bell_purity
    except Exception as exc:  # per-point failures must not kill a sweep
        flags.append(f"error:{type(exc).__name__}")
    row.flags = "|".join(flags)
    return row


def _parallel_rows(configs: list[MollowConfig], with_bell: bool,
                   threads: int) -> list[SweepResultRow]:
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda c: point_metrics(c, with_bell), configs))
    return [point_metrics(c, with_bell) for c in configs]


def entanglement_map(omega_grid, delta_grid, Gamma: float,
                     base: MollowConfig | None = None, with_bell: bool = False,
                     threads: int = 1) -> list[SweepResultRow]:
    """Fixed-linewidth map over (drive intensity, detuning), row-major
    with Omega as the slow axis."""
    if len(omega_grid) == 0 or len(delta_grid) == 0:
        raise ValueError("grids must be nonempty")
    base = base or MollowConfig(1.0, 0.0, Gamma=Gamma)
    configs = [replace(base, omega_drive=float(om), delta=float(d), Gamma=Gamma)
               for om in omega_grid for d in delta_grid]
    return _parallel_rows(configs, with_bell, threads)


def _negativity_at(cfg: MollowConfig) -> float:
    model = build_system(cfg)
    rho = steady_state(liouvillian_matrix(model))
    return log_negativity(partial_trace(rho, {"a1", "a2"}), "a1")


def optimal_detuning(omega_drive: float, Gamma: float,
                     delta_range: tuple[float, float] | None = None,
                     base: MollowConfig | None = None, coarse: int = 9,
                     xtol: float = 1e-3) -> tuple[float, float]:
    """(Delta_opt, N_max): detuning maximizing the negativity at fixed
    drive and linewidth.

    Coarse scan over Delta >= 0 (the maps are symmetric in the detuning
    sign) refined by bounded golden-section search; ties break toward the
    smaller detuning.  Returns (nan, 0.0) when no positive negativity
    exists anywhere in the range.
    """
    base = base or MollowConfig(omega_drive, 0.0, Gamma=Gamma)
    if delta_range is None:
        delta_range = (0.0, max(4.0 * omega_drive, 4.0 * Gamma, 8.0))
    lo, hi = delta_range
    grid = np.linspace(lo, hi, coarse)

    def value(d: float) -> float:
        return _negativity_at(replace(base, omega_drive=omega_drive,
                                      delta=float(d), Gamma=Gamma))

    vals = np.array([value(d) for d in grid])
    best = int(np.argmax(vals))
    if vals[best] <= 0.0:
        return math.nan, 0.0
    b_lo = grid[max(0, best - 1)]
    b_hi = grid[min(len(grid) - 1, best + 1)]
    if b_hi <= b_lo:
        return float(grid[best]), float(vals[best])
    res = scipy.optimize.minimize_scalar(
        lambda d: -value(d), bounds=(b_lo, b_hi), method="bounded",
        options={"xatol": xtol * max(1.0, hi)})
    d_opt, n_opt = float(res.x), float(-res.fun)
    if vals[best] > n_opt:  # golden found nothing better than the grid point
        d_opt, n_opt = float(grid[best]), float(vals[best])
    return d_opt, n_opt


def optimal_drive(delta: float, Gamma: float,
                  omega_range: tuple[float, float] | None = None,
                  base: MollowConfig | None = None, coarse: int = 9,
                  xtol: float = 1e-3) -> tuple[float, float]:
    """(Omega_opt, N_max): drive intensity maximizing the negativity at
    fixed detuning; same search strategy as :func:`optimal_detuning`."""
    base = base or MollowConfig(1.0, delta, Gamma=Gamma)
    if omega_range is None:
        omega_range = (0.3 * abs(delta), 0.9 * abs(delta))
    lo, hi = omega_range
    grid = np.linspace(lo, hi, coarse)

    def value(om: float) -> float:
        return _negativity_at(replace(base, omega_drive=float(om),
                                      delta=delta, Gamma=Gamma))

    vals = np.array([value(om) for om in grid])
    best = int(np.argmax(vals))
    if vals[best] <= 0.0:
        return math.nan, 0.0
    res = scipy.optimize.minimize_scalar(
        lambda om: -value(om),
        bounds=(grid[max(0, best - 1)], grid[min(len(grid) - 1, best + 1)]),
        method="bounded", options={"xatol": xtol * max(1.0, hi)})
    om_opt, n_opt = float(res.x), float(-res.fun)
    if vals[best] > n_opt:
        om_opt, n_opt = float(grid[best]), float(vals[best])
    return om_opt, n_opt


def optimal_map(omega_grid, Gamma_grid, base: MollowConfig | None = None,
                with_bell: bool = True, threads: int = 1,
                delta_over_omega: tuple[float, float] = (0.0, 3.5),
                coarse: int = 8) -> list[SweepResultRow]:
    """Map over (drive intensity, detector linewidth) with the detuning
    re-optimized at every point; one row per point, row-major with Omega
    as the slow axis, Delta column holding Delta_opt."""
    if len(omega_grid) == 0 or len(Gamma_grid) == 0:
        raise ValueError("grids must be nonempty")
    base = base or MollowConfig(1.0, 0.0)

    def job(args) -> SweepResultRow:
        om, G = args
        d_lo = delta_over_omega[0] * om
        d_hi = max(delta_over_omega[1] * om, 4.0 * G)
        d_opt, n_max = optimal_detuning(om, G, (d_lo, d_hi), base=base,
                                        coarse=coarse, xtol=1e-2)
        if math.isnan(d_opt):
            row = SweepResultRow(om, math.nan, G, negativity=0.0,
                                 flags="no_entanglement")
            return row
        row = point_metrics(replace(base, omega_drive=om, delta=d_opt, Gamma=G),
                            with_bell=with_bell)
        row.negativity = max(row.negativity, n_max)
        return row

    points = [(float(om), float(G)) for om in omega_grid for G in Gamma_grid]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(job, points))
    return [job(p) for p in points]


def default_polariton_spec(cfg: MollowConfig, g: float = 300.0,
                           Gamma_a: float = 10.0, Gamma_b: float | None = None,
                           truncation: int = 4) -> PolaritonSpec:
    """Photon resonant with the high-energy satellite, exciton with the
    low-energy one; exciton decay defaults to Gamma_a / 100."""
    wp, wm = sideband_frequencies(cfg.delta, cfg.omega_drive)
    return PolaritonSpec(omega_a=wp, omega_b=wm, g=g, Gamma_a=Gamma_a,
                         Gamma_b=Gamma_b if Gamma_b is not None else Gamma_a / 100.0,
                         truncation_a=truncation, truncation_b=truncation)


@dataclass(frozen=True)
class PolaritonStudy:
    """Branch-basis tomography and entanglement of the driven pair."""

    concurrence_before: float
    concurrence_after: float
    theta_before: np.ndarray
    theta_after: np.ndarray
    bell: BellReport
    fidelity_model_after: float
    psi_minus_overlap: float
    top_populations: dict[str, float]


def polariton_study(pol: PolaritonSpec, cfg: MollowConfig,
                    health_tol: float = 1e-4) -> PolaritonStudy:
    """Cascade the emitter into the coupled photon-exciton pair and
    characterize the branch-resolved two-polariton block.

    Reports the detection-matrix concurrence before and after vacuum
    removal, the best vacuum + singlet-Bell model fit, and the overlap of
    the vacuum-removed state with the singlet.
    """
    src = build_driven_2ls(cfg.delta, cfg.omega_drive, cfg.gamma)
    lay = layout(("sigma", 2), ("a", pol.truncation_a), ("b", pol.truncation_b))
    hp = polariton_hamiltonian(pol, lay)
    spec = CascadeSpec(
        gamma_sigma=cfg.gamma,
        targets=(TargetSpec("a", pol.Gamma_a, cfg.lam, cfg.kappa, cfg.epsilon,
                            pol.omega_a),
                 TargetSpec("b", pol.Gamma_b, cfg.lam, cfg.kappa, cfg.epsilon,
                            pol.omega_b)),
    )
    model = cascade(src, spec, hp)
    rho, pops, healthy = solve_steady(model, health_tol)
    if not healthy:
        worst = max(pops, key=pops.get)
        raise TruncationError(
            f"top Fock population of mode {worst!r} is {pops[worst]:.2e} > "
            f"{health_tol:.0e}; rerun with truncation >= "
            f"{max(pol.truncation_a, pol.truncation_b) + 1}")
    red = partial_trace(rho, {"a", "b"})
    theta = detection_matrix(red, ("a", "b"), basis="polariton", polariton_spec=pol)
    c_before = concurrence(theta)
    ps = postselect_remove_vacuum(theta.as_density())
    theta_ps = DetectionMatrix(ps.matrix, 1.0, "polariton")
    c_after = concurrence(theta_ps)
    rep = bell_report(red, "psi-")

    qlay = layout(("q1", 2), ("q2", 2))
    vac = basis_state(qlay, [0, 0]).amplitudes
    psi_m = bell_state(qlay, "psi-").amplitudes

    def model4(w: float) -> DensityMatrix:
        m = (1 - w) * np.outer(vac, vac.conj()) + w * np.outer(psi_m, psi_m.conj())
        return DensityMatrix(qlay, m, validate=False)

    res = scipy.optimize.minimize_scalar(
        lambda w: -fidelity(ps, model4(w)), bounds=(0.0, 1.0),
        method="bounded", options={"xatol": 1e-10})
    fid_after = fidelity(ps, model4(float(res.x)))
    overlap = float(np.real(psi_m.conj() @ ps.matrix @ psi_m))
    return PolaritonStudy(c_before, c_after, theta.matrix, ps.matrix, rep,
                          fid_after, overlap, pops)


def write_sweep_csv(rows: list[SweepResultRow], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(SweepResultRow.CSV_HEADER + "\n")
        for row in rows:
            fh.write(row.to_csv_line() + "\n")
