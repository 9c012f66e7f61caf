# scratch: more landscape checks
import time
import numpy as np
import mollow as mw
from mollow.liouville import liouvillian_matrix, steady_state
from dev_explore2 import build_sys, metrics

t0 = time.time()
# truncation 3 vs 4 agreement at representative points
for (om, d, G) in [(10,18,0.1), (5,9,0.1), (5,10,1.0), (5,8,10.0), (2,4,0.1), (20,36,0.1)]:
    N4, R4, red4, tp4 = metrics(om, d, G, 4)
    N3, R3, red3, tp3 = metrics(om, d, G, 3)
    print(f"om={om} D={d} G={G}: N4={N4:.6f} N3={N3:.6f} dN={abs(N4-N3):.2e} "
          f"R4={R4:.4f} R3={R3:.4f} tp3={tp3:.1e} tp4={tp4:.1e}")
print("t=%.1f"%(time.time()-t0))

# timing comparison
t0=time.time(); metrics(5,9,0.1,4); print("trunc4 solve: %.3fs"%(time.time()-t0))
t0=time.time(); metrics(5,9,0.1,3); print("trunc3 solve: %.3fs"%(time.time()-t0))

# criterion 7: argmax over Omega at Delta=20,40, Gamma=0.1
for D in (20.0, 40.0):
    oms = np.linspace(0.3*D, 0.9*D, 13)
    Ns = [metrics(o, D, 0.1, 3)[0] for o in oms]
    k = int(np.argmax(Ns))
    print(f"D={D}: coarse omega_opt={oms[k]:.2f} ({oms[k]/D:.3f} D) N={Ns[k]:.5f}")

# criterion 11: linewidth degradation at Omega=5
for G in (0.1, 1.0, 10.0):
    ds = np.linspace(0.0, 20.0, 21)
    Ns = [metrics(5.0, d, G, 3)[0] for d in ds]
    k=int(np.argmax(Ns))
    print(f"G={G}: Dopt~{ds[k]:.1f} N={Ns[k]:.6f}")
print("t=%.1f"%(time.time()-t0))
