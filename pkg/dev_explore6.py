# scratch: polariton study at the reported optimum
import numpy as np
import mollow as mw
from mollow.liouville import liouvillian_matrix, steady_state
from mollow.entglmeas import purity, postselect_remove_vacuum, fidelity
from mollow.modelkit import top_level_populations

om, delta = 4.9, 8.92
wp = np.sqrt(4 * om**2 + delta**2)
print("sidebands:", wp)

def polariton_run(g, Ga, Gb, trunc=4, lam=0.5):
    src = mw.build_driven_2ls(delta, om)
    lay = mw.layout(("sigma", 2), ("a", trunc), ("b", trunc))
    spec = mw.PolaritonSpec(omega_a=wp, omega_b=-wp, g=g, Gamma_a=Ga, Gamma_b=Gb,
                            truncation_a=trunc, truncation_b=trunc)
    hp = mw.polariton_hamiltonian(spec, lay)
    cs = mw.CascadeSpec(targets=(
        mw.TargetSpec("a", Ga, lam, 0.0, 1.0, wp),
        mw.TargetSpec("b", Gb, lam, 0.0, 1.0, -wp)))
    model = mw.cascade(src, cs, hp)
    rho = steady_state(liouvillian_matrix(model))
    tp = top_level_populations(rho)
    red = mw.partial_trace(rho, {"a", "b"})
    th = mw.detection_matrix(red, ("a", "b"), basis="polariton", polariton_spec=spec)
    C_before = mw.concurrence(th)
    ps = postselect_remove_vacuum(th.as_density())
    th_ps = mw.DetectionMatrix(ps.matrix, 1.0, "polariton")
    C_after = mw.concurrence(th_ps)
    rep = mw.bell_report(red, "psi-")  # bare-basis bell report
    return th, C_before, C_after, ps, tp, red, spec

g, Ga = 300.0, 10.0
th, C0, C1, ps, tp, red, spec = polariton_run(g, Ga, Ga / 100)
print(f"g={g} Ga={Ga}: C_before={C0:.4f} C_after={C1:.4f} toppop={max(tp.values()):.1e}")
print("theta diag:", np.array2string(np.real(np.diag(th.matrix)), precision=5))
print("theta:", np.array2string(th.matrix, precision=4, suppress_small=True))
print("ps purity:", purity(ps))

# fidelity of post-selected state with vacuum+psi- superposition model (polariton basis)
# model on the 4-dim block: w_v |00> + w |psi-><psi-|
qlay = mw.layout(("q1", 2), ("q2", 2))
psi_m = mw.bell_state(qlay, "psi-").amplitudes
vac = mw.basis_state(qlay, [0, 0]).amplitudes
best = None
for w in np.linspace(0, 1, 201):
    m = (1 - w) * np.outer(vac, vac.conj()) + w * np.outer(psi_m, psi_m.conj())
    f = fidelity(mw.DensityMatrix(qlay, m, validate=False),
                 mw.DensityMatrix(qlay, th.matrix, validate=False))
    if best is None or f > best[1]:
        best = (w, f)
print("before-ps: best w,F:", best, " sqrtF:", np.sqrt(best[1]))
best = None
for w in np.linspace(0, 1, 201):
    m = (1 - w) * np.outer(vac, vac.conj()) + w * np.outer(psi_m, psi_m.conj())
    f = fidelity(mw.DensityMatrix(qlay, m, validate=False), ps)
    if best is None or f > best[1]:
        best = (w, f)
print("after-ps: best w,F:", best, " sqrtF:", np.sqrt(best[1]))
f_pure = float(np.real(psi_m.conj() @ ps.matrix @ psi_m))
print("after-ps overlap with |psi->:", f_pure)
