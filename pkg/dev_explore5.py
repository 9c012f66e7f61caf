# scratch: dissect bell-model fidelity and purity candidates across the corner
import numpy as np
import mollow as mw
from mollow.liouville import liouvillian_matrix, steady_state
from mollow.entglmeas import purity, postselect_remove_vacuum, fidelity
from dev_explore2 import build_sys
from scipy.optimize import minimize_scalar

def analyze(om, G, dopt=None, trunc=4):
    if dopt is None:
        r = minimize_scalar(lambda d: -neg(om, d, G, trunc), bounds=(1.5*om, 2.3*om),
                            method="bounded", options={"xatol": 1e-2})
        dopt = r.x
    model, lay = build_sys(om, dopt, G, trunc)
    rho = steady_state(liouvillian_matrix(model))
    from mollow.modelkit import top_level_populations
    tp = max(top_level_populations(rho).values())
    red = mw.partial_trace(rho, {"a1", "a2"})
    th = mw.detection_matrix(red, ("a1", "a2"))
    thd = th.as_density()
    rep = mw.bell_report(red, "phi-")
    ps = postselect_remove_vacuum(thd)
    d = np.real(np.diag(th.matrix))
    print(f"Om={om} G={G} D={dopt:.2f}: tp={tp:.1e} diag={np.array2string(d, precision=4)} "
          f"th03={th.matrix[0,3]:.4f}")
    print(f"   F_mix={rep.fidelity_to_model:.4f} F_blk={rep.fidelity_block:.4f} w={rep.bell_weight:.5f} "
          f"pur(theta)={purity(thd):.4f} pur(ps)={purity(ps):.4f} pur(red)={purity(red):.4f}")

def neg(om, d, G, trunc):
    model, lay = build_sys(om, d, G, trunc)
    rho = steady_state(liouvillian_matrix(model))
    red = mw.partial_trace(rho, {"a1", "a2"})
    return mw.log_negativity(red, "a1")

analyze(10, 0.1, 18.06)
analyze(10, 0.03)
analyze(10, 0.01)
analyze(20, 0.1)
analyze(40, 0.1)
analyze(5, 0.1)
