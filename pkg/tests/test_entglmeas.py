import numpy as np
import pytest

import mollow as mw
from mollow.entglmeas import (
    DetectionMatrix,
    bell_report,
    concurrence,
    csi_R,
    detection_matrix,
    fidelity,
    log_negativity,
    partial_transpose,
    postselect_remove_vacuum,
    purity,
)
from mollow.errors import UndefinedCorrelationError

from conftest import (
    brute_concurrence,
    brute_negativity,
    coherent_state,
    random_density,
    random_separable_two_qubit,
    random_unitary,
    rng,
    thermal_state,
)

QQ = mw.layout(("q1", 2), ("q2", 2))


def _dm(mat, lay=QQ):
    return mw.DensityMatrix(lay, mat, validate=False)


def test_partial_transpose_involution_and_product_positivity():
    gen = rng(2)
    rho = _dm(np.kron(random_density(2, gen), random_density(2, gen)))
    pt = partial_transpose(rho, "q2")
    assert np.min(np.linalg.eigvalsh(pt.matrix)) > -1e-12
    back = partial_transpose(mw.Operator(QQ, pt.matrix), "q2")
    assert np.array_equal(back.matrix, rho.matrix)


def test_partial_transpose_bell_min_eigenvalue():
    rho = mw.bell_state(QQ, "phi-").to_density()
    pt = partial_transpose(rho, "q2")
    assert abs(np.min(np.linalg.eigvalsh(pt.matrix)) + 0.5) < 1e-12


def test_log_negativity_bell_and_product():
    assert abs(log_negativity(mw.bell_state(QQ, "phi-").to_density(), "q1") - 1.0) < 1e-12
    gen = rng(4)
    prod = _dm(np.kron(random_density(2, gen), random_density(2, gen)))
    assert abs(log_negativity(prod, "q1")) < 1e-12


def test_log_negativity_weak_bell_admixture_regression():
    p = 0.006
    vac = mw.basis_state(QQ, [0, 0]).to_density().matrix
    bell = mw.bell_state(QQ, "phi-").to_density().matrix
    rho = _dm((1 - p) * vac + p * bell)
    value = log_negativity(rho, "q2")
    assert abs(value - brute_negativity(rho.matrix)) < 1e-12
    assert value == pytest.approx(0.0086303051, abs=1e-9)  # frozen oracle value


def test_log_negativity_local_unitary_invariance():
    gen = rng(6)
    rho = _dm(0.3 * np.eye(4) / 4 + 0.7 * mw.bell_state(QQ, "psi-").to_density().matrix)
    n0 = log_negativity(rho, "q1")
    for _ in range(5):
        u = np.kron(random_unitary(2, gen), random_unitary(2, gen))
        n1 = log_negativity(_dm(u @ rho.matrix @ u.conj().T), "q1")
        assert abs(n0 - n1) < 1e-9


def test_log_negativity_vanishes_on_separable_samples():
    gen = rng(8)
    for _ in range(10):
        rho = _dm(random_separable_two_qubit(gen))
        assert log_negativity(rho, "q1") < 1e-9


def test_csi_thermal_and_coherent_pairs():
    dim = 20
    lay = mw.layout(("a", dim), ("b", dim))
    a = mw.embed(mw.annihilation(dim), lay, "a")
    b = mw.embed(mw.annihilation(dim), lay, "b")
    th = np.kron(thermal_state(0.2, dim), thermal_state(0.35, dim))
    assert abs(csi_R(_dm(th, lay), a, b) - 0.25) < 1e-9
    ca = coherent_state(0.5, dim)
    cb = coherent_state(0.4j, dim)
    coh = np.kron(np.outer(ca, ca.conj()), np.outer(cb, cb.conj()))
    assert abs(csi_R(_dm(coh, lay), a, b) - 1.0) < 1e-9


def test_csi_undefined_for_single_photon_pair():
    lay = mw.layout(("a", 3), ("b", 3))
    rho = mw.basis_state(lay, [1, 1]).to_density()
    a = mw.embed(mw.annihilation(3), lay, "a")
    b = mw.embed(mw.annihilation(3), lay, "b")
    with pytest.raises(UndefinedCorrelationError):
        csi_R(rho, a, b)


def test_csi_classical_states_satisfy_inequality():
    gen = rng(10)
    dim = 12
    lay = mw.layout(("a", dim), ("b", dim))
    a = mw.embed(mw.annihilation(dim), lay, "a")
    b = mw.embed(mw.annihilation(dim), lay, "b")
    for _ in range(10):
        terms = []
        for _k in range(3):
            alpha = 0.6 * (gen.normal() + 1j * gen.normal()) / np.sqrt(2)
            beta = 0.6 * (gen.normal() + 1j * gen.normal()) / np.sqrt(2)
            ca, cb = coherent_state(alpha, dim), coherent_state(beta, dim)
            terms.append(np.kron(np.outer(ca, ca.conj()), np.outer(cb, cb.conj())))
        w = gen.dirichlet(np.ones(3))
        rho = sum(wk * t for wk, t in zip(w, terms))
        assert csi_R(_dm(rho, lay), a, b) <= 1.0 + 1e-9


def test_detection_matrix_vacuum_and_singlet():
    lay = mw.layout(("a1", 3), ("a2", 3))
    vac = mw.basis_state(lay, [0, 0]).to_density()
    th = detection_matrix(vac, ("a1", "a2"))
    assert np.allclose(th.matrix, np.diag([1.0, 0, 0, 0]))
    psi = mw.bell_state(lay, "psi-").to_density()
    th2 = detection_matrix(psi, ("a1", "a2"))
    expect = np.zeros((4, 4))
    expect[1, 1] = expect[2, 2] = 0.5
    expect[1, 2] = expect[2, 1] = -0.5
    assert np.allclose(th2.matrix, expect, atol=1e-12)


def test_detection_matrix_polariton_rotation_at_degeneracy():
    # delta = 0: lower/upper = (a -+ b)/sqrt(2); a bare photon is an even
    # superposition of the two branches
    spec = mw.PolaritonSpec(omega_a=0.0, omega_b=0.0, g=1.0,
                            Gamma_a=1.0, Gamma_b=1.0,
                            truncation_a=3, truncation_b=3)
    lay = mw.layout(("a", 3), ("b", 3))
    one_photon = mw.basis_state(lay, [1, 0]).to_density()
    th = detection_matrix(one_photon, ("a", "b"), basis="polariton",
                          polariton_spec=spec)
    expect = np.zeros((4, 4))
    expect[1, 1] = expect[2, 2] = 0.5
    expect[1, 2] = expect[2, 1] = 0.5
    assert np.allclose(th.matrix, expect, atol=1e-12)


def test_detection_matrix_normalization_traces_block():
    gen = rng(12)
    lay = mw.layout(("a1", 4), ("a2", 4))
    rho = mw.DensityMatrix(lay, random_density(16, gen))
    th = detection_matrix(rho, ("a1", "a2"))
    assert abs(np.trace(th.matrix) - 1.0) < 1e-12
    assert 0 < th.norm <= 1.0


def test_concurrence_extremes_and_werner():
    psi = DetectionMatrix(mw.bell_state(QQ, "psi-").to_density().matrix, 1.0)
    assert abs(concurrence(psi) - 1.0) < 1e-12
    mixed = DetectionMatrix(np.eye(4) / 4, 1.0)
    assert concurrence(mixed) == 0.0
    for p in (0.4, 0.8):
        mat = p * mw.bell_state(QQ, "psi-").to_density().matrix + (1 - p) * np.eye(4) / 4
        got = concurrence(DetectionMatrix(mat, 1.0))
        assert abs(got - max(0.0, (3 * p - 1) / 2)) < 1e-12
        assert abs(got - brute_concurrence(mat)) < 1e-10


def test_concurrence_local_unitary_invariance():
    gen = rng(14)
    mat = 0.8 * mw.bell_state(QQ, "psi-").to_density().matrix + 0.2 * np.eye(4) / 4
    c0 = concurrence(DetectionMatrix(mat, 1.0))
    for _ in range(5):
        u = np.kron(random_unitary(2, gen), random_unitary(2, gen))
        c1 = concurrence(DetectionMatrix(u @ mat @ u.conj().T, 1.0))
        assert abs(c0 - c1) < 1e-9


def test_fidelity_properties():
    gen = rng(16)
    rho = _dm(random_density(4, gen))
    sig = _dm(random_density(4, gen))
    assert abs(fidelity(rho, rho) - 1.0) < 1e-10
    assert abs(fidelity(rho, sig) - fidelity(sig, rho)) < 1e-10
    zero = mw.basis_state(QQ, [0, 0]).to_density()
    one = mw.basis_state(QQ, [1, 1]).to_density()
    assert fidelity(zero, one) < 1e-14
    plus = _dm(np.full((2, 2), 0.5), mw.layout(("q", 2)))
    z = mw.basis_state(mw.layout(("q", 2)), [0]).to_density()
    assert abs(fidelity(z, plus) - 0.5) < 1e-12


def test_fidelity_one_iff_equal():
    gen = rng(18)
    rho = _dm(random_density(4, gen))
    eps = 1e-3 * (random_density(4, gen) - np.eye(4) / 4)
    sig = _dm((rho.matrix + eps + (rho.matrix + eps).conj().T) / 2)
    sig = _dm(sig.matrix / np.trace(sig.matrix))
    assert fidelity(rho, sig) < 1.0 - 1e-8


def test_postselection():
    vac = mw.basis_state(QQ, [0, 0]).to_density().matrix
    psi = mw.bell_state(QQ, "psi-").to_density().matrix
    rho = _dm(0.9 * vac + 0.1 * psi)
    out = postselect_remove_vacuum(rho)
    assert np.max(np.abs(out.matrix - psi)) < 1e-12
    untouched = postselect_remove_vacuum(_dm(psi))
    assert np.max(np.abs(untouched.matrix - psi)) < 1e-12
    with pytest.raises(ValueError):
        postselect_remove_vacuum(_dm(vac))


def test_bell_report_self_consistency():
    lay = mw.layout(("a1", 3), ("a2", 3))
    vac = mw.basis_state(lay, [0, 0]).to_density().matrix
    bell = mw.bell_state(lay, "phi-").to_density().matrix
    rho = mw.DensityMatrix(lay, 0.994 * vac + 0.006 * bell)
    rep = bell_report(rho, "phi-")
    assert rep.bell_weight == pytest.approx(0.006, abs=1e-6)
    assert rep.fidelity_to_model > 1.0 - 1e-9
    psi = mw.bell_state(lay, "psi-").to_density()
    rep2 = bell_report(psi, "psi-")
    assert rep2.bell_weight == pytest.approx(1.0, abs=1e-6)
    assert rep2.postselected_purity == pytest.approx(1.0, abs=1e-9)


def test_purity():
    assert purity(mw.bell_state(QQ, "phi-").to_density()) == pytest.approx(1.0)
    assert purity(_dm(np.eye(4) / 4)) == pytest.approx(0.25)
