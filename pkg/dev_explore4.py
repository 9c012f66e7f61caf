# scratch: bell report at the paper's high-quality corner + polariton study
import time
import numpy as np
import mollow as mw
from mollow.liouville import liouvillian_matrix, steady_state
from dev_explore2 import build_sys, metrics
from scipy.optimize import minimize_scalar

t0=time.time()

# golden refine Delta_opt at (Om=10, G=0.1), trunc 4
def negat(d, om=10.0, G=0.1, trunc=4):
    return metrics(om, d, G, trunc)[0]
res = minimize_scalar(lambda d: -negat(d), bounds=(14, 24), method="bounded",
                      options={"xatol": 1e-3})
dopt = res.x
print(f"Delta_opt={dopt:.4f} (ratio {dopt/10:.4f}) N={-res.fun:.6f}  t={time.time()-t0:.0f}s")

# Omega_opt at Delta=20, 40 (trunc 4, golden)
for D in (20.0, 40.0):
    r = minimize_scalar(lambda o: -metrics(o, D, 0.1, 4)[0], bounds=(0.4*D, 0.75*D),
                        method="bounded", options={"xatol": 1e-3*D})
    print(f"D={D}: omega_opt={r.x:.3f} ratio={r.x/D:.4f} N={-r.fun:.6f}")

# bell report at the optimum
model, lay = build_sys(10.0, dopt, 0.1, 4)
rho = steady_state(liouvillian_matrix(model))
red = mw.partial_trace(rho, {"a1", "a2"})
rep = mw.bell_report(red, "phi-")
print("bell report:", rep)
theta = mw.detection_matrix(red, ("a1", "a2"))
print("theta diag:", np.real(np.diag(theta.matrix)), " N_block:", theta.norm)
print("theta[0,3]:", theta.matrix[0,3])
print("t=%.0f"%(time.time()-t0))
