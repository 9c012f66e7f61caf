# scratch: O-operator vs a-operator correlations; swapped herald roles
import numpy as np
import mollow as mw
from mollow.liouville import liouvillian_matrix, LiouvilleEigen
from mollow.trajec import run_ensemble, click_statistics, heralding_ratio, delay_histogram
from mollow.correlator import g2_cross
from dev_explore2 import build_sys
from dev_mc2 import batches, tau

for tag in ("det", "res"):
    b, model = batches[tag]
    lay = model.layout
    a1 = mw.embed(mw.annihilation(4), lay, "a1")
    a2 = mw.embed(mw.annihilation(4), lay, "a2")
    O1 = model.channel("a1").collapse
    O2 = model.channel("a2").collapse
    eig = LiouvilleEigen(liouvillian_matrix(model))
    edges = np.linspace(-10, 10, 51)
    dh = delay_histogram(b, "a1", "a2", edges, burn_in=10.0)
    fine = np.linspace(-10, 10, 501)
    cv_a = g2_cross(model, a1, a2, fine, eig=eig)
    cv_O = g2_cross(model, O1, O2, fine, eig=eig)
    for name, cv in (("a-ops", cv_a), ("O-ops", cv_O)):
        avg = np.array([np.mean(cv.values[(fine >= lo) & (fine < hi)])
                        for lo, hi in zip(edges[:-1], edges[1:])])
        dev = (dh.g2 - avg) / dh.stderr
        print(f"{tag} vs {name}: max|dev|={np.nanmax(np.abs(dev)):.2f} sigma, "
              f">3sigma: {int(np.sum(np.abs(dev)>3))}/50")
    print(f"  curve peaks: a-ops tau={fine[np.argmax(cv_a.values)]:.2f} max={cv_a.values.max():.3f} | "
          f"O-ops tau={fine[np.argmax(cv_O.values)]:.2f} max={cv_O.values.max():.3f}")

# swapped herald/signal: herald = a1 (omega_plus), signal = a2
stats = {}
for tag in ("det", "res"):
    b, model = batches[tag]
    stats[tag] = click_statistics(b, "a1", "a2", tau, burn_in=10.0)
r1 = heralding_ratio(stats["det"], stats["res"], 1)
r2p = heralding_ratio(stats["det"], stats["res"], "2plus")
k = int(np.nanargmax(r1.values))
print("swapped r1 peak: %.4f at tau=%.2f" % (r1.values[k], tau[k]))
cross = None
for i in range(k, len(tau) - 1):
    if r1.values[i] >= 1.0 > r1.values[i + 1]:
        f = (r1.values[i] - 1.0) / (r1.values[i] - r1.values[i + 1])
        cross = tau[i] + f * (tau[i + 1] - tau[i])
        break
print("swapped r1 crossing:", cross)
print("swapped r2plus max over (0,4]:", np.nanmax(r2p.values[tau <= 4.0]))
print("r2p curve:", np.array2string(r2p.values[::6], precision=3))
print("r1 curve:", np.array2string(r1.values[::6], precision=3))
