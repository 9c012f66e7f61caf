# scratch: herald/signal role combinations
import numpy as np
from mollow.trajec import click_statistics, heralding_ratio
from dev_mc4 import batches, tau

for herald, signal in (("a2_res", "a1_res"), ("a1_res", "a2_res"),
                       ("a1_res", "a1_res"), ("a2_res", "a2_res")):
    stats = {}
    for tag in ("det", "res"):
        b, model = batches[tag]
        stats[tag] = click_statistics(b, herald, signal, tau, burn_in=10.0)
    r1 = heralding_ratio(stats["det"], stats["res"], 1)
    r2p = heralding_ratio(stats["det"], stats["res"], "2plus")
    k = int(np.nanargmax(r1.values))
    cross = None
    for i in range(k, len(tau) - 1):
        if r1.values[i] >= 1.0 > r1.values[i + 1]:
            f = (r1.values[i] - 1.0) / (r1.values[i] - r1.values[i + 1])
            cross = tau[i] + f * (tau[i + 1] - tau[i])
            break
    print(f"H={herald} S={signal}: peak={r1.values[k]:.3f}@{tau[k]:.1f} cross={cross} "
          f"r2p_max={np.nanmax(r2p.values[tau<=4]):.3f}")
    print("   r1:", np.array2string(r1.values[::5], precision=3))
    print("   p1 det:", np.array2string(stats['det'].p(1)[::5], precision=3))
    print("   p1 res:", np.array2string(stats['res'].p(1)[::5], precision=3))
