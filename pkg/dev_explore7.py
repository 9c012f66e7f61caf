# scratch: polariton concurrence sensitivity
import numpy as np
import mollow as mw
from mollow.liouville import liouvillian_matrix, steady_state
from mollow.entglmeas import postselect_remove_vacuum, fidelity, purity
from mollow.modelkit import top_level_populations

om, delta = 4.9, 8.92
wp = np.sqrt(4 * om**2 + delta**2)

def run(g, Ga, Gb, wa, wb, trunc=4, lam=0.5):
    src = mw.build_driven_2ls(delta, om)
    lay = mw.layout(("sigma", 2), ("a", trunc), ("b", trunc))
    spec = mw.PolaritonSpec(omega_a=wa, omega_b=wb, g=g, Gamma_a=Ga, Gamma_b=Gb,
                            truncation_a=trunc, truncation_b=trunc)
    hp = mw.polariton_hamiltonian(spec, lay)
    cs = mw.CascadeSpec(targets=(
        mw.TargetSpec("a", Ga, lam, 0.0, 1.0, wa),
        mw.TargetSpec("b", Gb, lam, 0.0, 1.0, wb)))
    model = mw.cascade(src, cs, hp)
    rho = steady_state(liouvillian_matrix(model))
    red = mw.partial_trace(rho, {"a", "b"})
    th = mw.detection_matrix(red, ("a", "b"), basis="polariton", polariton_spec=spec)
    ps = postselect_remove_vacuum(th.as_density())
    th_ps = mw.DetectionMatrix(ps.matrix, 1.0, "polariton")
    C = mw.concurrence(th_ps)
    qlay = mw.layout(("q1", 2), ("q2", 2))
    psi_m = mw.bell_state(qlay, "psi-").amplitudes
    F = float(np.real(psi_m.conj() @ ps.matrix @ psi_m))
    diag = np.real(np.diag(ps.matrix))
    return C, F, diag

print("baseline (photon=+wp):", run(300, 10, 0.1, wp, -wp))
print("swapped (photon=-wp): ", run(300, 10, 0.1, -wp, wp))
for Gb in (1.0, 0.01, 0.001):
    print(f"Gb={Gb}:", run(300, 10, Gb, wp, -wp)[:2])
for g in (100, 200, 400, 600):
    print(f"g={g}:", run(g, 10, 0.1, wp, -wp)[:2])
for Ga in (30, 100):
    print(f"Ga={Ga}:", run(300, Ga, Ga/100, wp, -wp)[:2])
print("trunc5 baseline:", run(300, 10, 0.1, wp, -wp, trunc=5)[:2])
