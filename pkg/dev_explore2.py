# scratch: entanglement landscape checks against reported values
import time
import numpy as np
import mollow as mw
from mollow.liouville import liouvillian_matrix, steady_state

def build_sys(om, delta, Gamma, trunc=4, lam=0.5, kap=0.0, eps=1.0):
    src = mw.build_driven_2ls(delta, om)
    lay = mw.layout(("sigma", 2), ("a1", trunc), ("a2", trunc))
    wp = np.sqrt(4*om**2 + delta**2)
    hd = mw.detector_hamiltonian(wp, -wp, lay)
    spec = mw.CascadeSpec(targets=(
        mw.TargetSpec("a1", Gamma, lam, kap, eps, wp),
        mw.TargetSpec("a2", Gamma, lam, kap, eps, -wp)))
    return mw.cascade(src, spec, hd), lay

def metrics(om, delta, Gamma, trunc=4):
    model, lay = build_sys(om, delta, Gamma, trunc)
    rho = steady_state(liouvillian_matrix(model))
    red = mw.partial_trace(rho, {"a1", "a2"})
    N = mw.log_negativity(red, "a1")
    a1 = mw.embed(mw.annihilation(trunc, "a1"), red.layout, "a1")
    a2 = mw.embed(mw.annihilation(trunc, "a2"), red.layout, "a2")
    try:
        R = mw.csi_R(red, a1, a2)
    except Exception:
        R = np.nan
    from mollow.modelkit import top_level_populations
    tp = max(top_level_populations(rho).values())
    return N, R, red, tp

t0=time.time()
# Delta_opt at Omega=10, Gamma=0.1 (expect ~2*Omega = 20)
om, G = 10.0, 0.1
ds = np.linspace(0.0, 40.0, 21)
Ns = [metrics(om, d, G)[0] for d in ds]
k = int(np.argmax(Ns))
print("coarse Delta_opt:", ds[k], "N:", Ns[k], " (t=%.1fs)"%(time.time()-t0))
for d in np.linspace(max(0,ds[k]-2), ds[k]+2, 9):
    N,R,red,tp = metrics(om, d, G)
    print(f"  D={d:6.2f}: N={N:.6f} R={R:.3f} toppop={tp:.2e}")
