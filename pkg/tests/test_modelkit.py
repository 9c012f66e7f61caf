import numpy as np
import pytest

import mollow as mw
from mollow.errors import LayoutMismatchError
from mollow.liouville import liouvillian_matrix, steady_state

from conftest import bloch_pee, bloch_steady, direct_cascade_generator, rng


def test_driven_2ls_hamiltonian_matrix():
    m = mw.build_driven_2ls(delta=2.0, omega_drive=0.7)
    assert np.allclose(m.hamiltonian.matrix, [[0.0, 0.7], [0.7, 2.0]])
    ch = m.channel("sigma")
    assert ch.rate == 1.0
    assert np.array_equal(ch.collapse.matrix, [[0, 1], [0, 0]])


def test_driven_2ls_rejects_nonpositive_gamma():
    with pytest.raises(ValueError):
        mw.build_driven_2ls(0.0, 1.0, gamma=0.0)


def test_undriven_steady_state_is_ground():
    m = mw.build_driven_2ls(0.0, 0.0)
    rho = steady_state(liouvillian_matrix(m))
    assert np.allclose(rho.matrix, [[1, 0], [0, 0]], atol=1e-12)


@pytest.mark.parametrize("delta,omega,expected", [
    (0.0, 0.5, 1.0 / 3.0),
    (2.0, 1.0, 0.16),
])
def test_driven_steady_state_population(delta, omega, expected):
    m = mw.build_driven_2ls(delta, omega)
    rho = steady_state(liouvillian_matrix(m))
    pee = float(np.real(rho.matrix[1, 1]))
    assert abs(pee - expected) < 1e-12
    assert abs(pee - bloch_pee(delta, omega)) < 1e-12
    # cross-check against the hand-written Bloch generator's null space
    assert np.max(np.abs(rho.matrix - bloch_steady(delta, omega))) < 1e-10


def _two_detector_spec(Gamma=1.0, lam=0.5, kappa=0.0, epsilon=1.0, wp=2.0):
    return mw.CascadeSpec(targets=(
        mw.TargetSpec("a1", Gamma, lam, kappa, epsilon, wp),
        mw.TargetSpec("a2", Gamma, lam, kappa, epsilon, -wp)))


def _joint(trunc=3, wp=2.0):
    lay = mw.layout(("sigma", 2), ("a1", trunc), ("a2", trunc))
    return lay, mw.detector_hamiltonian(wp, -wp, lay)


def test_cascade_zero_lambda_decouples():
    src = mw.build_driven_2ls(0.0, 1.0)
    lay, hd = _joint()
    spec = _two_detector_spec(lam=0.0)
    model = mw.cascade(src, spec, hd)
    # independent decays: blended channels reduce to pure detector decay
    # and the residual source channel carries the full emitter rate
    res = model.channel("sigma_res")
    assert res.rate == pytest.approx(1.0)
    for slot in ("a1", "a2"):
        blended = model.channel(slot).collapse.matrix
        pure = mw.embed(mw.annihilation(3), lay, slot).matrix
        assert np.allclose(blended, pure)
    # no coupling terms in the Hamiltonian beyond the free parts
    expect_h = (mw.embed(src.hamiltonian, lay, "sigma") + hd).matrix
    assert np.allclose(model.hamiltonian.matrix, expect_h)


def test_cascade_reproduces_two_target_master_equation():
    # lam = 1/2, kappa = 0: the alpha_1 = alpha_2 = 1/2 equation with
    # coupling -sqrt(gamma Gamma / 2) {[ad, s rho] + [rho sd, a]}
    src = mw.build_driven_2ls(1.85, 1.0)
    lay, hd = _joint(trunc=3, wp=2.724)
    model = mw.cascade(src, _two_detector_spec(wp=2.724), hd)
    assert set(model.channel_labels) == {"a1", "a2"}  # no residual channels
    L = liouvillian_matrix(model).matrix
    targets = [{"slot": "a1", "Gamma": 1.0, "lam": 0.5, "detuning": 2.724},
               {"slot": "a2", "Gamma": 1.0, "lam": 0.5, "detuning": -2.724}]
    L_direct = direct_cascade_generator(1.85, 1.0, 1.0, targets, truncation=3)
    assert np.max(np.abs(L - L_direct)) < 1e-12


def test_cascade_generator_equivalence_random_fractions():
    gen = rng(21)
    for _ in range(4):
        delta = float(gen.uniform(-3, 3))
        omega = float(gen.uniform(0.2, 2.0))
        lam = gen.uniform(0.05, 0.45, size=2)
        kap = gen.uniform(0.0, 0.9, size=2)
        eps = gen.uniform(0.3, 1.0, size=2)
        Gam = gen.uniform(0.3, 3.0, size=2)
        det = gen.uniform(-4, 4, size=2)
        src = mw.build_driven_2ls(delta, omega)
        lay = mw.layout(("sigma", 2), ("a1", 3), ("a2", 3))
        hd = mw.detector_hamiltonian(det[0], det[1], lay)
        spec = mw.CascadeSpec(targets=(
            mw.TargetSpec("a1", Gam[0], lam[0], kap[0], eps[0], det[0]),
            mw.TargetSpec("a2", Gam[1], lam[1], kap[1], eps[1], det[1])))
        model = mw.cascade(src, spec, hd)
        L = liouvillian_matrix(model).matrix
        targets = [
            {"slot": "a1", "Gamma": Gam[0], "lam": lam[0], "kappa": kap[0],
             "epsilon": eps[0], "detuning": det[0]},
            {"slot": "a2", "Gamma": Gam[1], "lam": lam[1], "kappa": kap[1],
             "epsilon": eps[1], "detuning": det[1]},
        ]
        L_direct = direct_cascade_generator(delta, omega, 1.0, targets, 3)
        assert np.max(np.abs(L - L_direct)) < 1e-12


def test_cascade_rejects_overcommitted_source():
    src = mw.build_driven_2ls(0.0, 1.0)
    lay, hd = _joint()
    with pytest.raises(ValueError):
        mw.CascadeSpec(targets=(
            mw.TargetSpec("a1", 1.0, 0.7), mw.TargetSpec("a2", 1.0, 0.7)))


def test_cascade_rejects_non_hermitian_target_hamiltonian():
    src = mw.build_driven_2ls(0.0, 1.0)
    lay, _ = _joint()
    bad = mw.Operator(lay, np.triu(np.ones((lay.dim, lay.dim))))
    with pytest.raises(ValueError):
        mw.cascade(src, _two_detector_spec(), bad)


def test_cascade_hermitian_and_nonnegative_rates_random():
    gen = rng(33)
    for _ in range(5):
        lam = gen.uniform(0, 0.5, size=2)
        spec = mw.CascadeSpec(targets=(
            mw.TargetSpec("a1", float(gen.uniform(0.2, 5)), float(lam[0]),
                          float(gen.uniform(0, 1)), float(gen.uniform(0.1, 1))),
            mw.TargetSpec("a2", float(gen.uniform(0.2, 5)), float(lam[1]),
                          float(gen.uniform(0, 1)), float(gen.uniform(0.1, 1)))))
        src = mw.build_driven_2ls(float(gen.uniform(-2, 2)), float(gen.uniform(0, 2)))
        lay, hd = _joint()
        model = mw.cascade(src, spec, hd)
        h = model.hamiltonian.matrix
        assert np.max(np.abs(h - h.conj().T)) < 1e-12
        assert all(ch.rate >= 0 for ch in model.channels)


def test_no_backaction_on_source():
    src = mw.build_driven_2ls(1.85, 1.0)
    lay, hd = _joint()
    model = mw.cascade(src, _two_detector_spec(), hd)
    rho = steady_state(liouvillian_matrix(model))
    red = mw.partial_trace(rho, {"sigma"})
    solo = steady_state(liouvillian_matrix(src))
    dist = 0.5 * np.sum(np.abs(np.linalg.eigvalsh(red.matrix - solo.matrix)))
    assert dist < 1e-8


def test_detector_hamiltonian():
    lay = mw.layout(("sigma", 2), ("a1", 3), ("a2", 3))
    assert np.max(np.abs(mw.detector_hamiltonian(0.0, 0.0, lay).matrix)) == 0.0
    hd = mw.detector_hamiltonian(5.0, 0.0, lay)
    n1 = mw.embed(mw.Operator(mw.layout(("a1", 3)), np.diag([0, 5.0, 10.0])),
                  lay, "a1")
    assert np.allclose(hd.matrix, n1.matrix)
    hd2 = mw.detector_hamiltonian(1.3, -2.7, lay)
    assert np.array_equal(hd2.matrix, hd2.matrix.conj().T)
    with pytest.raises(KeyError):
        mw.detector_hamiltonian(1.0, 1.0, mw.layout(("sigma", 2)))


def test_polariton_hamiltonian_diagonal_when_uncoupled():
    spec = mw.PolaritonSpec(omega_a=3.0, omega_b=-3.0, g=0.0,
                            Gamma_a=1.0, Gamma_b=0.1,
                            truncation_a=3, truncation_b=3)
    lay = mw.layout(("sigma", 2), ("a", 3), ("b", 3))
    hp = mw.polariton_hamiltonian(spec, lay)
    assert np.allclose(hp.matrix, np.diag(np.diag(hp.matrix)))


def test_polariton_single_excitation_eigenvalues():
    # degenerate modes split by +- g
    spec = mw.PolaritonSpec(omega_a=1.0, omega_b=1.0, g=0.4,
                            Gamma_a=1.0, Gamma_b=0.1,
                            truncation_a=3, truncation_b=3)
    lay = mw.layout(("a", 3), ("b", 3))
    hp = mw.polariton_hamiltonian(spec, lay)
    evals = np.sort(np.linalg.eigvalsh(hp.matrix))
    assert abs(evals[1] - 0.6) < 1e-12 and abs(evals[2] - 1.4) < 1e-12
    # detuned case matches the closed-form branch frequencies
    spec2 = mw.PolaritonSpec(omega_a=0.0, omega_b=0.8, g=0.4,
                             Gamma_a=1.0, Gamma_b=0.1,
                             truncation_a=3, truncation_b=3)
    hp2 = mw.polariton_hamiltonian(spec2, lay)
    evals2 = np.sort(np.linalg.eigvalsh(hp2.matrix))
    wl, wu = spec2.branch_frequencies()
    root = np.hypot(spec2.delta, 2 * spec2.g)
    assert abs(wl - (0.8 - root) / 2) < 1e-12
    assert abs(wu - (0.8 + root) / 2) < 1e-12
    assert abs(evals2[1] - wl) < 1e-12
    assert abs(evals2[2] - wu) < 1e-12


def test_polariton_mixing_normalization():
    spec = mw.PolaritonSpec(omega_a=0.0, omega_b=1.0, g=0.3,
                            Gamma_a=1.0, Gamma_b=0.1)
    cp, cm = spec.mixing()
    assert abs(cp**2 + cm**2 - 1.0) < 1e-14


def test_truncation_health_warning():
    # a strongly-driven detector mode with a tight cutoff must warn
    cfg = mw.MollowConfig(omega_drive=1.0, delta=1.85, Gamma=1.0, truncation=3)
    model = mw.build_system(cfg)
    rho = steady_state(liouvillian_matrix(model))
    with pytest.warns(mw.modelkit.TruncationWarning):
        mw.check_truncation_health(rho, tol=1e-4)


def test_channel_label_uniqueness_enforced():
    lay = mw.layout(("q", 2))
    s = mw.annihilation(2, "q")
    with pytest.raises(ValueError):
        mw.LindbladModel(lay, mw.identity(lay) * 0.0,
                         (mw.Channel(1.0, s, "c"), mw.Channel(0.5, s, "c")))
