# scratch: dilute-detection-limit r(n,tau) from regression curves
import numpy as np
import mollow as mw
from mollow.correlator import g2_cross
from mollow.liouville import liouvillian_matrix, steady_state
from dev_mc4 import build_sys

# herald = a2 (omega_-), signal = a1 (omega_+); conditional signal
# intensity at delay s after a herald is rate1 * g2_12(-s).
curves = {}
rates = {}
for tag, delta in (("det", 1.85), ("res", 0.0)):
    model, lay = build_sys(1.0, delta, 1.0, kap=0.0)
    a1 = mw.embed(mw.annihilation(4), lay, "a1")
    a2 = mw.embed(mw.annihilation(4), lay, "a2")
    rho = steady_state(liouvillian_matrix(model))
    n1 = np.real(mw.expectation(rho, a1.dag() @ a1))
    s = np.linspace(0.0, 8.0, 801)
    g21 = g2_cross(model, a2, a1, s, direction="forward")  # herald first
    curves[tag] = (s, g21.values)
    rates[tag] = n1
print("signal populations:", rates)

from scipy.integrate import cumulative_trapezoid
def mu(tag, kappa_gamma=1.0):
    s, g = curves[tag]
    return s, kappa_gamma * rates[tag] * cumulative_trapezoid(g, s, initial=0.0)

for eta in (1.0, 0.5, 0.25):   # effective recorded rate multiplier (kappa*Gamma)
    s, mu_d = mu("det", eta)
    _, mu_r = mu("res", eta)
    # Poisson-window approximation of p(1) = mu e^-mu (dilute limit keeps mu)
    r1 = (mu_d * np.exp(-mu_d)) / (mu_r * np.exp(-mu_r))
    k = int(np.argmax(r1[1:]) + 1)
    cross = None
    for i in range(k, len(s) - 1):
        if r1[i] >= 1.0 > r1[i + 1]:
            cross = s[i] + (r1[i] - 1) / (r1[i] - r1[i + 1]) * (s[i + 1] - s[i])
            break
    print(f"eta={eta}: r1 peak {r1[k]:.3f} @ {s[k]:.2f}, cross {cross}, r1(0+) {r1[1]:.3f}")
    print("   r1 at tau=1,2,3,4:", [f"{np.interp(t, s, r1):.3f}" for t in (1,2,3,4)])
# pure dilute limit eta->0: ratio of mus
s, mu_d = mu("det"); _, mu_r = mu("res")
r1_ld = mu_d / mu_r
k = int(np.argmax(r1_ld[1:]) + 1)
print("dilute r1: peak %.3f @ %.2f" % (r1_ld[k], s[k]),
      " r1(0+)=%.3f" % r1_ld[1],
      " values at 1,2,3,4:", [f"{np.interp(t, s, r1_ld):.3f}" for t in (1,2,3,4)])
