"""Numba kernels for the quantum-jump unraveling.

The effective Hamiltonian H_eff = H - (i/2) sum_k rate_k ck^dag ck is
time independent, so the no-jump evolution is applied exactly through its
eigendecomposition: psi(t) = V exp(-i w t) V^-1 psi(0).  Between jumps the
state is kept in the eigenbasis (phi = V^-1 psi), where advancing time is
O(d) and the squared norm is a Gram-matrix form phi^dag (V^dag V) phi.
The jump time solves |psi(t)|^2 = u exactly (the norm is strictly
decreasing, so the pre-drawn threshold is bracketed by coarse steps and
then pinned by a safeguarded secant iteration), giving waiting-time
statistics that do not depend on any integrator step size.

RNG: one splitmix64 stream per trajectory.  The per-trajectory state is
derived from the master seed as mix64(master + (index+1) * GOLDEN), so
ensembles are reproducible regardless of scheduling order.
"""

from __future__ import annotations

import numpy as np
from numba import njit

GOLDEN = np.uint64(0x9E3779B97F4A7C15)

# kernel return codes
OK = 0
OVERFLOW = -1
DEAD_WEIGHTS = -2


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def _next_uniform(state):
    """Advance the splitmix64 state; uniform in the open interval (0,1)."""
    s = state + GOLDEN
    z = _mix64(s)
    u = (np.float64(z >> np.uint64(11)) + 0.5) * (2.0 ** -53)
    return s, u


@njit(cache=True)
def derive_seed(master: np.uint64, index: np.uint64) -> np.uint64:
    """Per-trajectory seed: mix64(master + (index+1)*GOLDEN)."""
    return _mix64(np.uint64(master) + (np.uint64(index) + np.uint64(1)) * GOLDEN)


@njit(cache=True, inline="always")
def _gram_norm2(G, phi, scratch):
    d = phi.shape[0]
    for i in range(d):
        acc = 0.0 + 0.0j
        for j in range(d):
            acc += G[i, j] * phi[j]
        scratch[i] = acc
    n2 = 0.0
    for i in range(d):
        n2 += (np.conj(phi[i]) * scratch[i]).real
    return n2


@njit(cache=True, inline="always")
def _norm2_at(G, phi0, lam_mi, s, scratch_phi, scratch):
    """Squared norm of V exp(-i w s) phi0; lam_mi = -i w."""
    d = phi0.shape[0]
    for i in range(d):
        scratch_phi[i] = phi0[i] * np.exp(lam_mi[i] * s)
    return _gram_norm2(G, scratch_phi, scratch)


@njit(cache=True, nogil=True)
def run_trajectory_kernel(V, Vinv, G, lam_mi, cops, psi0, duration, seed,
                          dt_step, tol_t, out_t, out_ch, out_psi):
    """Simulate one trajectory; fills click times/channels and the final
    (normalized) state.  Returns the click count, or a negative code."""
    d = psi0.shape[0]
    n_ch = cops.shape[0]
    cap = out_t.shape[0]

    phi0 = np.empty(d, dtype=np.complex128)
    phi = np.empty(d, dtype=np.complex128)
    psi = np.empty(d, dtype=np.complex128)
    scratch = np.empty(d, dtype=np.complex128)
    weights = np.empty(n_ch, dtype=np.float64)

    # enter the eigenbasis, normalized so each interval starts at norm 1
    for i in range(d):
        acc = 0.0 + 0.0j
        for j in range(d):
            acc += Vinv[i, j] * psi0[j]
        phi0[i] = acc
    n2 = _gram_norm2(G, phi0, scratch)
    inv = 1.0 / np.sqrt(n2)
    for i in range(d):
        phi0[i] *= inv

    state = np.uint64(seed)
    t_global = 0.0
    n_clicks = 0
    estep = np.exp(lam_mi * dt_step)

    while t_global < duration:
        state, u = _next_uniform(state)
        log_u = np.log(u)
        t_rem = duration - t_global

        # bracket the crossing |psi(s)|^2 = u with coarse exact steps,
        # advancing the phases incrementally (one cexp per eigenvalue
        # per segment instead of per evaluation)
        s_lo = 0.0
        f_lo = -log_u  # ln(N(0)) - ln(u), N(0) = 1
        s_hi = 0.0
        for i in range(d):
            phi[i] = phi0[i]
        jumped = True
        while True:
            if s_hi + dt_step <= t_rem:
                s_next = s_hi + dt_step
                for i in range(d):
                    phi[i] *= estep[i]
            else:
                s_next = t_rem
                ds = t_rem - s_hi
                for i in range(d):
                    phi[i] *= np.exp(lam_mi[i] * ds)
            s_prev = s_hi
            s_hi = s_next
            n2 = _gram_norm2(G, phi, scratch)
            f_hi = np.log(n2) - log_u
            if f_hi <= 0.0:
                s_lo = s_prev
                break
            if s_hi >= t_rem:
                jumped = False
                break
            s_lo = s_hi
            f_lo = f_hi

        if not jumped:
            # segment ends without a click; phi holds the state at t_rem
            for i in range(d):
                phi0[i] = phi[i]
            break

        # safeguarded secant on f(s) = ln N(s) - ln u inside (s_lo, s_hi];
        # f is smooth and strictly decreasing, so this converges fast and
        # the bisection fallback keeps the bracket valid regardless
        s_root = -1.0
        if f_lo <= 1e-12:
            s_root = s_lo
        for _ in range(200):
            if s_root >= 0.0 or s_hi - s_lo <= tol_t:
                break
            denom = f_hi - f_lo
            if denom < 0.0:
                s_mid = s_lo + (s_hi - s_lo) * (f_lo / -denom)
            else:
                s_mid = 0.5 * (s_lo + s_hi)
            width = s_hi - s_lo
            if s_mid <= s_lo or s_mid >= s_hi:
                s_mid = 0.5 * (s_lo + s_hi)
            n2 = _norm2_at(G, phi0, lam_mi, s_mid, phi, scratch)
            f_mid = np.log(n2) - log_u
            if abs(f_mid) <= 1e-12:
                s_root = s_mid
                break
            if f_mid > 0.0:
                s_lo = s_mid
                f_lo = f_mid
            else:
                s_hi = s_mid
                f_hi = f_mid
            if s_hi - s_lo > 0.75 * width:
                # slow side; force a bisection step to keep shrinking
                s_force = 0.5 * (s_lo + s_hi)
                n2 = _norm2_at(G, phi0, lam_mi, s_force, phi, scratch)
                f_force = np.log(n2) - log_u
                if abs(f_force) <= 1e-12:
                    s_root = s_force
                    break
                if f_force > 0.0:
                    s_lo = s_force
                    f_lo = f_force
                else:
                    s_hi = s_force
                    f_hi = f_force
        s_jump = s_root if s_root >= 0.0 else 0.5 * (s_lo + s_hi)

        # state at the jump time, back in the computational basis
        for i in range(d):
            phi[i] = phi0[i] * np.exp(lam_mi[i] * s_jump)
        for i in range(d):
            acc = 0.0 + 0.0j
            for j in range(d):
                acc += V[i, j] * phi[j]
            psi[i] = acc

        total = 0.0
        for k in range(n_ch):
            w = 0.0
            for i in range(d):
                acc = 0.0 + 0.0j
                for j in range(d):
                    acc += cops[k, i, j] * psi[j]
                scratch[i] = acc
            for i in range(d):
                w += (np.conj(scratch[i]) * scratch[i]).real
            weights[k] = w
            total += w
        if total <= 0.0:
            return DEAD_WEIGHTS

        state, r = _next_uniform(state)
        pick = r * total
        chosen = n_ch - 1
        acc_w = 0.0
        for k in range(n_ch):
            acc_w += weights[k]
            if pick <= acc_w:
                chosen = k
                break

        for i in range(d):
            acc = 0.0 + 0.0j
            for j in range(d):
                acc += cops[chosen, i, j] * psi[j]
            scratch[i] = acc
        inv = 1.0 / np.sqrt(weights[chosen])
        for i in range(d):
            psi[i] = scratch[i] * inv

        t_global = t_global + s_jump
        if n_clicks >= cap:
            return OVERFLOW
        out_t[n_clicks] = t_global
        out_ch[n_clicks] = chosen
        n_clicks += 1

        # restart the eigenbasis segment from the post-jump state
        for i in range(d):
            acc = 0.0 + 0.0j
            for j in range(d):
                acc += Vinv[i, j] * psi[j]
            phi0[i] = acc
        n2 = _gram_norm2(G, phi0, scratch)
        inv = 1.0 / np.sqrt(n2)
        for i in range(d):
            phi0[i] *= inv

    # normalized final state for ensemble averaging
    for i in range(d):
        acc = 0.0 + 0.0j
        for j in range(d):
            acc += V[i, j] * phi0[j]
        psi[i] = acc
    n2 = 0.0
    for i in range(d):
        n2 += (np.conj(psi[i]) * psi[i]).real
    inv = 1.0 / np.sqrt(n2)
    for i in range(d):
        out_psi[i] = psi[i] * inv
    return n_clicks


@njit(cache=True, nogil=True)
def count_window_kernel(herald_t, signal_t, tau_grid, counts, n_cap):
    """Per-herald signal counts inside (t, t+tau] for every window length.

    ``counts`` has shape (n_cap+1, n_tau); row n_cap lumps >= n_cap.
    Grids must be ascending.  Returns the number of heralds consumed.
    """
    n_tau = tau_grid.shape[0]
    n_sig = signal_t.shape[0]
    for h in range(herald_t.shape[0]):
        t0 = herald_t[h]
        j0 = np.searchsorted(signal_t, t0, side="right")
        j = j0
        for k in range(n_tau):
            hi = t0 + tau_grid[k]
            while j < n_sig and signal_t[j] <= hi:
                j += 1
            n = j - j0
            if n > n_cap:
                n = n_cap
            counts[n, k] += 1
    return herald_t.shape[0]


@njit(cache=True, nogil=True)
def pair_delay_kernel(t1, t2, edges, bins_out):
    """Histogram of ordered delays t2 - t1 over all cross pairs of one
    trajectory; edges ascending, delays outside the range ignored."""
    lo = edges[0]
    hi = edges[-1]
    n1 = t1.shape[0]
    n2 = t2.shape[0]
    j_start = 0
    for i in range(n1):
        a = t1[i] + lo
        b = t1[i] + hi
        while j_start < n2 and t2[j_start] < a:
            j_start += 1
        j = j_start
        while j < n2 and t2[j] < b:
            delta = t2[j] - t1[i]
            k = np.searchsorted(edges, delta, side="right") - 1
            if 0 <= k < bins_out.shape[0]:
                bins_out[k] += 1
            j += 1
