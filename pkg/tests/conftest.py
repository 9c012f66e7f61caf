"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the package's own code paths: the
Bloch generator is hand-written from the optical Bloch equations, the
multi-target cascade generator is transcribed term by term from the
non-Lindblad master equation, and the two-qubit measures are brute-force
matrix evaluations.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
import scipy.linalg

import mollow as mw


# ---------------------------------------------------------------- random

def rng(seed: int = 0) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_density(dim: int, gen: np.random.Generator) -> np.ndarray:
    a = gen.normal(size=(dim, dim)) + 1j * gen.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def random_unitary(dim: int, gen: np.random.Generator) -> np.ndarray:
    a = gen.normal(size=(dim, dim)) + 1j * gen.normal(size=(dim, dim))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_separable_two_qubit(gen: np.random.Generator, terms: int = 4) -> np.ndarray:
    out = np.zeros((4, 4), dtype=complex)
    w = gen.dirichlet(np.ones(terms))
    for k in range(terms):
        out += w[k] * np.kron(random_density(2, gen), random_density(2, gen))
    return out


# ------------------------------------------------------- analytic oracles

def bloch_pee(delta: float, omega: float, gamma: float = 1.0) -> float:
    """Steady-state excited population of the driven emitter."""
    return omega**2 / (delta**2 + gamma**2 / 4 + 2 * omega**2)


def bloch_generator(delta: float, omega: float, gamma: float = 1.0) -> np.ndarray:
    """Hand-written 4x4 generator on (rho_gg, rho_eg, rho_ge, rho_ee)."""
    G = np.zeros((4, 4), dtype=complex)
    # d rho_gg = i Omega (rho_eg - rho_ge) + gamma rho_ee
    G[0, 1] = 1j * omega
    G[0, 2] = -1j * omega
    G[0, 3] = gamma
    # d rho_eg = -i delta rho_eg - i Omega (rho_gg - rho_ee) - gamma/2 rho_eg
    G[1, 1] = -1j * delta - gamma / 2
    G[1, 0] = -1j * omega
    G[1, 3] = 1j * omega
    # d rho_ge = conjugate equation
    G[2, 2] = 1j * delta - gamma / 2
    G[2, 0] = 1j * omega
    G[2, 3] = -1j * omega
    # d rho_ee = -i Omega (rho_ge - rho_eg) - gamma rho_ee
    G[3, 2] = -1j * omega
    G[3, 1] = 1j * omega
    G[3, 3] = -gamma
    return G


def bloch_steady(delta: float, omega: float, gamma: float = 1.0) -> np.ndarray:
    """Null-space solve of the hand-written Bloch generator -> 2x2 state."""
    G = bloch_generator(delta, omega, gamma)
    ns = scipy.linalg.null_space(G)
    assert ns.shape[1] == 1
    v = ns[:, 0]
    rho = np.array([[v[0], v[2]], [v[1], v[3]]])
    rho = rho / np.trace(rho)
    return (rho + rho.conj().T) / 2


def direct_cascade_generator(delta, omega, gamma, targets, truncation) -> np.ndarray:
    """Term-by-term transcription of the non-Lindblad multi-target master
    equation: bare dissipators at full rates plus the unidirectional
    coupling sqrt(alpha_n gamma Gamma_n) ([s rho, ad_n] + [a_n, rho sd]);
    column-stacking superoperator, alpha_n = eps_n lam_n (1 - kappa_n).
    """
    slots = [("sigma", 2)] + [(t["slot"], truncation) for t in targets]
    lay = mw.layout(*slots)
    d = lay.dim
    eye = np.eye(d)
    s = mw.embed(mw.annihilation(2), lay, "sigma").matrix
    h = delta * (s.conj().T @ s) + omega * (s + s.conj().T)

    def pre(x):
        return np.kron(eye, x)

    def post(x):
        return np.kron(x.T, eye)

    def dissipator(c, rate):
        cdc = c.conj().T @ c
        return (rate / 2) * (2 * np.kron(c.conj(), c) - pre(cdc) - post(cdc))

    L = dissipator(s, gamma)
    for t in targets:
        a = mw.embed(mw.annihilation(truncation), lay, t["slot"]).matrix
        h = h + t["detuning"] * (a.conj().T @ a)
        L = L + dissipator(a, t["Gamma"])
        alpha = t.get("epsilon", 1.0) * t["lam"] * (1 - t.get("kappa", 0.0))
        g = math.sqrt(alpha * gamma * t["Gamma"])
        # [s rho, ad] + [a, rho sd]
        L = L + g * (np.kron(a.conj(), s) - pre(a.conj().T @ s)
                     + np.kron(s.conj(), a) - post(s.conj().T @ a))
    L = L - 1j * (pre(h) - post(h))
    return L


# --------------------------------------------------- measure brute forces

def brute_negativity(rho4: np.ndarray) -> float:
    """log2 trace norm of the partial transpose over the second qubit,
    by explicit index shuffling on the 2x2x2x2 tensor."""
    t = rho4.reshape(2, 2, 2, 2)          # (i1 i2, j1 j2)
    pt = t.transpose(0, 3, 2, 1).reshape(4, 4)
    vals = np.linalg.eigvalsh((pt + pt.conj().T) / 2)
    return float(np.log2(np.sum(np.abs(vals))))


def brute_concurrence(theta: np.ndarray) -> float:
    """Wootters formula via the literal sqrt(sqrt(t) ttilde sqrt(t))."""
    sy = np.array([[0, -1j], [1j, 0]])
    flip = np.kron(sy, sy)
    ttilde = flip @ theta.conj() @ flip
    sq = scipy.linalg.sqrtm(theta)
    m = scipy.linalg.sqrtm(sq @ ttilde @ sq)
    vals = np.sort(np.real(np.linalg.eigvals(m)))[::-1]
    return float(max(0.0, vals[0] - vals[1] - vals[2] - vals[3]))


# ------------------------------------------------------ state constructors

def coherent_state(alpha: complex, dim: int) -> np.ndarray:
    n = np.arange(dim)
    amps = np.exp(-abs(alpha) ** 2 / 2) * alpha**n / np.sqrt(
        scipy.special.factorial(n))
    return amps / np.linalg.norm(amps)


def thermal_state(nbar: float, dim: int) -> np.ndarray:
    p = (nbar / (1 + nbar)) ** np.arange(dim) / (1 + nbar)
    return np.diag(p / p.sum())


import scipy.special  # noqa: E402  (used above)


# --------------------------------------------------------------- fixtures

@pytest.fixture
def fig2_config() -> mw.MollowConfig:
    return mw.MollowConfig(omega_drive=1.0, delta=1.85, Gamma=1.0)


@pytest.fixture
def small_cascade():
    """Emitter + two truncation-3 detectors at the satellite lines."""
    cfg = mw.MollowConfig(omega_drive=1.0, delta=1.85, Gamma=1.0, truncation=3)
    return mw.build_system(cfg), cfg
