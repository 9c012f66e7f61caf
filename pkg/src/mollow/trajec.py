"""Monte Carlo wavefunction simulation of a Lindblad model with
per-channel click records and conditional counting statistics.

Every channel of the model is a jump channel; for compiled cascades the
blended channel of a target is the monitored output field of that
detector, so one of its jumps is one detector click, while residual
source jumps count as undetected loss.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import _mcwf
from .errors import InsufficientStatisticsError, TrajectoryError
from .correlator import CorrelationCurve
from .modelkit import LindbladModel
from .opalg import StateVector

#: maximum exactly-resolved count in conditional statistics; larger
#: counts are lumped into the top row
COUNT_CAP = 8


@dataclass(frozen=True)
class TrajectoryRecord:
    """Click record of a single seeded trajectory."""

    seed: int
    duration: float
    times: np.ndarray
    channels: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.times) != len(self.channels):
            raise ValueError("times and channel labels differ in length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("click times must be strictly increasing")

    @property
    def clicks(self) -> list[tuple[float, str]]:
        return list(zip(self.times.tolist(), self.channels))

    def to_json(self) -> str:
        return json.dumps({
            "seed": int(self.seed),
            "clicks": [{"t": t, "channel": ch} for t, ch in self.clicks],
        })


@dataclass
class TrajectoryBatch:
    """Column-packed ensemble of trajectories (label-indexed channels)."""

    channel_labels: tuple[str, ...]
    duration: float
    master_seed: int
    seeds: np.ndarray
    offsets: np.ndarray          # (n_traj+1,) indices into times/channels
    times: np.ndarray
    channels: np.ndarray         # int16 channel indices
    final_states: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_traj(self) -> int:
        return len(self.offsets) - 1

    def record(self, i: int) -> TrajectoryRecord:
        lo, hi = self.offsets[i], self.offsets[i + 1]
        labels = tuple(self.channel_labels[k] for k in self.channels[lo:hi])
        return TrajectoryRecord(int(self.seeds[i]), self.duration,
                                self.times[lo:hi].copy(), labels)

    def __iter__(self) -> Iterator[TrajectoryRecord]:
        return (self.record(i) for i in range(self.n_traj))

    def clicks_of(self, i: int, label: str) -> np.ndarray:
        lo, hi = self.offsets[i], self.offsets[i + 1]
        k = self.channel_labels.index(label)
        sel = self.channels[lo:hi] == k
        return self.times[lo:hi][sel]

    def write_jsonl(self, path) -> None:
        with open(path, "w") as fh:
            for rec in self:
                fh.write(rec.to_json() + "\n")


class _Engine:
    """Shared precomputation for trajectory kernels of one model."""

    def __init__(self, model: LindbladModel):
        self.model = model
        d = model.layout.dim
        h_eff = model.hamiltonian.matrix.astype(complex).copy()
        cops = []
        for ch in model.channels:
            c = np.sqrt(ch.rate) * ch.collapse.matrix
            cops.append(c)
            h_eff -= 0.5j * (c.conj().T @ c)
        self.cops = np.ascontiguousarray(np.stack(cops))
        w, V = np.linalg.eig(h_eff)
        Vinv = np.linalg.inv(V)
        scale = max(1.0, np.max(np.abs(h_eff)))
        err = np.max(np.abs((V * w) @ Vinv - h_eff)) / scale
        if err > 1e-9:
            raise TrajectoryError(
                f"effective Hamiltonian too close to defective to propagate "
                f"exactly (reconstruction error {err:.2e}); refusing to run"
            )
        self.V = np.ascontiguousarray(V)
        self.Vinv = np.ascontiguousarray(Vinv)
        self.G = np.ascontiguousarray(V.conj().T @ V)
        self.lam_mi = np.ascontiguousarray(-1j * w)
        self.dim = d

    def run(self, psi0: np.ndarray, duration: float, seed: int,
            dt_step: float, tol_t: float, cap: int = 4096):
        while True:
            out_t = np.empty(cap)
            out_ch = np.empty(cap, dtype=np.int32)
            out_psi = np.empty(self.dim, dtype=complex)
            n = _mcwf.run_trajectory_kernel(
                self.V, self.Vinv, self.G, self.lam_mi, self.cops,
                np.ascontiguousarray(psi0, dtype=complex), duration,
                np.uint64(seed), dt_step, tol_t, out_t, out_ch, out_psi)
            if n == _mcwf.OVERFLOW:
                cap *= 2
                continue
            if n == _mcwf.DEAD_WEIGHTS:
                raise TrajectoryError(
                    "norm threshold crossed but all jump weights vanish; "
                    "the model has no active channel on the reached state")
            return out_t[:n].copy(), out_ch[:n].copy(), out_psi


def run_trajectory(model: LindbladModel, psi0: StateVector, duration: float,
                   seed: int, dt_step: float = 0.5,
                   tol_t: float = 1e-9) -> TrajectoryRecord:
    """One quantum-jump trajectory; bit-reproducible for a fixed seed.

    The pre-drawn-threshold (waiting time) formulation is used: between
    jumps the non-Hermitian evolution is applied exactly via the
    eigendecomposition of H_eff, and the click instant solves
    |psi(t)|^2 = u to absolute precision ``tol_t``.
    """
    if duration <= 0:
        raise ValueError("duration must be positive")
    if not model.channels:
        raise ValueError("model has no collapse channels to unravel")
    eng = _Engine(model)
    t, ch, _ = eng.run(psi0.amplitudes, duration, seed, dt_step, tol_t)
    labels = tuple(model.channel_labels[k] for k in ch)
    return TrajectoryRecord(seed, duration, t, labels)


def run_ensemble(model: LindbladModel, psi0: StateVector, duration: float,
                 n_traj: int, master_seed: int, threads: int = 1,
                 dt_step: float = 0.5, tol_t: float = 1e-9,
                 keep_final_states: bool = False,
                 engine: "_Engine | None" = None) -> TrajectoryBatch:
    """Seeded ensemble; per-trajectory seeds derive from the master seed
    (see :func:`mollow._mcwf.derive_seed`), so results are independent of
    the thread count and scheduling order."""
    if duration <= 0 or n_traj <= 0:
        raise ValueError("duration and trajectory count must be positive")
    eng = engine if engine is not None else _Engine(model)
    seeds = np.array([
        int(_mcwf.derive_seed(np.uint64(master_seed), np.uint64(i)))
        for i in range(n_traj)
    ], dtype=np.uint64)
    psi = np.ascontiguousarray(psi0.amplitudes, dtype=complex)

    results: list = [None] * n_traj

    def work(indices: Sequence[int]) -> None:
        for i in indices:
            results[i] = eng.run(psi, duration, int(seeds[i]), dt_step, tol_t)

    if threads > 1:
        chunks = np.array_split(np.arange(n_traj), threads * 4)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, [c for c in chunks if len(c)]))
    else:
        work(range(n_traj))

    counts = np.array([len(r[0]) for r in results], dtype=np.int64)
    offsets = np.zeros(n_traj + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    times = np.concatenate([r[0] for r in results]) if offsets[-1] else np.empty(0)
    channels = (np.concatenate([r[1] for r in results]).astype(np.int16)
                if offsets[-1] else np.empty(0, dtype=np.int16))
    finals = np.stack([r[2] for r in results]) if keep_final_states else None
    return TrajectoryBatch(model.channel_labels, duration, master_seed,
                           seeds, offsets, times, channels, finals)


@dataclass
class ClickStats:
    """Conditional counting statistics: distribution of the number of
    signal clicks inside (t, t+tau] after each herald click at t."""

    herald_channel: str
    signal_channel: str
    tau_grid: np.ndarray
    counts: np.ndarray           # (COUNT_CAP+1, n_tau)
    total_heralds: int
    burn_in: float = 0.0

    def p(self, n: int | str) -> np.ndarray:
        """p(n, tau); ``n`` may be an exact count or "2plus"."""
        if self.total_heralds == 0:
            raise InsufficientStatisticsError("no heralds recorded")
        probs = self.counts / self.total_heralds
        if n == "2plus":
            return 1.0 - probs[0] - probs[1]
        n = int(n)
        if n >= COUNT_CAP:
            raise ValueError(f"counts >= {COUNT_CAP} are lumped; use smaller n")
        return probs[n]

    def merge(self, other: "ClickStats") -> "ClickStats":
        if (self.herald_channel != other.herald_channel
                or self.signal_channel != other.signal_channel
                or not np.array_equal(self.tau_grid, other.tau_grid)):
            raise ValueError("incompatible statistics cannot be merged")
        return ClickStats(self.herald_channel, self.signal_channel,
                          self.tau_grid, self.counts + other.counts,
                          self.total_heralds + other.total_heralds,
                          self.burn_in)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("tau_gamma,p0,p1,p2plus,heralds\n")
            p0, p1, p2p = self.p(0), self.p(1), self.p("2plus")
            for k, tau in enumerate(self.tau_grid.tolist()):
                fh.write(f"{tau!r},{float(p0[k])!r},{float(p1[k])!r},"
                         f"{float(p2p[k])!r},{self.total_heralds}\n")


def click_statistics(records: "TrajectoryBatch | Iterable[TrajectoryRecord]",
                     herald: str, signal: str, tau_grid: np.ndarray,
                     burn_in: float = 10.0) -> ClickStats:
    """Count signal clicks in windows after each herald click.

    Heralds are kept only if they fall after the burn-in and leave room
    for the longest window before the trajectory ends, so every herald
    sees every window length and the per-tau distributions are unbiased.
    """
    tau_grid = np.asarray(tau_grid, dtype=float)
    if tau_grid.size == 0 or np.any(np.diff(tau_grid) <= 0) or tau_grid[0] < 0:
        raise ValueError("tau grid must be ascending and nonnegative")
    if isinstance(records, TrajectoryBatch):
        batch = records
    else:
        batch = _batch_from_records(list(records))
    for label in (herald, signal):
        if label not in batch.channel_labels:
            raise KeyError(f"unknown channel {label!r}")
    t_max = batch.duration - tau_grid[-1]
    if t_max <= burn_in:
        raise ValueError("trajectories are too short for the requested windows")
    counts = np.zeros((COUNT_CAP + 1, tau_grid.size), dtype=np.int64)
    h_idx = batch.channel_labels.index(herald)
    s_idx = batch.channel_labels.index(signal)
    total = 0
    for i in range(batch.n_traj):
        lo, hi = batch.offsets[i], batch.offsets[i + 1]
        t = batch.times[lo:hi]
        ch = batch.channels[lo:hi]
        ht = t[ch == h_idx]
        ht = ht[(ht >= burn_in) & (ht <= t_max)]
        if ht.size == 0:
            continue
        st = t[ch == s_idx]
        total += _mcwf.count_window_kernel(ht, st, tau_grid, counts, COUNT_CAP)
    if total == 0:
        raise InsufficientStatisticsError(
            f"no {herald!r} clicks survive the burn-in of {burn_in}")
    return ClickStats(herald, signal, tau_grid, counts, total, burn_in)


def _batch_from_records(records: list[TrajectoryRecord]) -> TrajectoryBatch:
    if not records:
        raise InsufficientStatisticsError("no trajectories given")
    labels = sorted({lbl for r in records for lbl in r.channels})
    label_idx = {lbl: k for k, lbl in enumerate(labels)}
    duration = records[0].duration
    counts = np.array([len(r.times) for r in records], dtype=np.int64)
    offsets = np.zeros(len(records) + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    times = (np.concatenate([r.times for r in records])
             if offsets[-1] else np.empty(0))
    channels = np.array([label_idx[lbl] for r in records for lbl in r.channels],
                        dtype=np.int16)
    seeds = np.array([r.seed for r in records], dtype=np.uint64)
    return TrajectoryBatch(tuple(labels), duration, 0, seeds, offsets,
                           times, channels)


def heralding_ratio(stats_detuned: ClickStats, stats_resonant: ClickStats,
                    n: int | str) -> CorrelationCurve:
    """Pointwise ratio p(n, tau | detuned) / p(n, tau | resonant); bins
    with a vanishing denominator are flagged, not dropped."""
    if not np.array_equal(stats_detuned.tau_grid, stats_resonant.tau_grid):
        raise ValueError("tau grids differ")
    num = stats_detuned.p(n)
    den = stats_resonant.p(n)
    flags = den == 0.0
    values = np.full_like(num, np.nan)
    np.divide(num, den, out=values, where=~flags)
    return CorrelationCurve(stats_detuned.tau_grid, values,
                            op_labels=(f"p({n})", f"p({n})"), flags=flags)


@dataclass(frozen=True)
class DelayHistogram:
    """Monte Carlo estimate of the normalized cross-correlation versus
    delay, with per-bin standard errors (trajectory-to-trajectory)."""

    centers: np.ndarray
    g2: np.ndarray
    stderr: np.ndarray
    pairs: np.ndarray


def delay_histogram(batch: TrajectoryBatch, ch1: str, ch2: str,
                    edges: np.ndarray, burn_in: float = 10.0) -> DelayHistogram:
    """Histogram of delays t2 - t1 over click pairs, normalized by the
    uncorrelated-pair expectation so it estimates g2_12(tau).

    The normalization accounts for the finite counting window: a delay
    tau only has (T - burn - |tau|) valid start times per trajectory.
    """
    edges = np.asarray(edges, dtype=float)
    k1 = batch.channel_labels.index(ch1)
    k2 = batch.channel_labels.index(ch2)
    n_bins = edges.size - 1
    sum_pairs = np.zeros(n_bins, dtype=np.int64)
    sum_sq = np.zeros(n_bins, dtype=np.float64)
    n_clicks1 = 0
    n_clicks2 = 0
    t_window = batch.duration - burn_in
    local = np.zeros(n_bins, dtype=np.int64)
    for i in range(batch.n_traj):
        lo, hi = batch.offsets[i], batch.offsets[i + 1]
        t = batch.times[lo:hi]
        ch = batch.channels[lo:hi]
        keep = t >= burn_in
        t1 = t[keep & (ch == k1)]
        t2 = t[keep & (ch == k2)]
        n_clicks1 += t1.size
        n_clicks2 += t2.size
        local[:] = 0
        if t1.size and t2.size:
            _mcwf.pair_delay_kernel(t1, t2, edges, local)
        sum_pairs += local
        sum_sq += local.astype(float) ** 2
    n = batch.n_traj
    rate1 = n_clicks1 / (n * t_window)
    rate2 = n_clicks2 / (n * t_window)
    if rate1 == 0 or rate2 == 0:
        raise InsufficientStatisticsError("a channel recorded no clicks")
    centers = (edges[:-1] + edges[1:]) / 2.0
    widths = np.diff(edges)
    # measure of valid t1 for delay tau is (t_window - |tau|), integrated
    # over the bin; exact for |center| < t_window
    exposure = widths * (t_window - np.abs(centers))
    norm = n * rate1 * rate2 * exposure
    mean_pairs = sum_pairs / n
    var_pairs = sum_sq / n - mean_pairs**2
    g2 = sum_pairs / norm
    stderr = np.sqrt(np.maximum(var_pairs, 0.0) / n) / (rate1 * rate2 * exposure)
    return DelayHistogram(centers, g2, stderr, sum_pairs)
