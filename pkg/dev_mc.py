# scratch: MCWF engine validation + timing
import time
import numpy as np
import mollow as mw
from mollow.liouville import liouvillian_matrix, steady_state
from mollow.trajec import run_trajectory, run_ensemble, click_statistics, delay_histogram, _Engine
from dev_explore2 import build_sys

# 1) undriven decay: one click, exponential waiting time
m = mw.build_driven_2ls(0.0, 0.0)
lay = m.layout
psi0 = mw.basis_state(lay, [1])
t0 = time.time()
rec = run_trajectory(m, psi0, 50.0, seed=7)
print("compile+first run: %.1fs" % (time.time() - t0), "clicks:", rec.clicks)

t0 = time.time()
ts = []
eng = _Engine(m)
for i in range(20000):
    tt, cc, _ = eng.run(psi0.amplitudes, 50.0, i + 1, 0.5, 1e-9)
    ts.append(tt[0])
ts = np.array(ts)
print("decay mean: %.4f (expect 1.0)  se %.4f  t=%.2fs" %
      (ts.mean(), ts.std() / np.sqrt(len(ts)), time.time() - t0))

# 2) driven 2LS ensemble vs evolve
m = mw.build_driven_2ls(1.0, 1.0)
batch = run_ensemble(m, mw.basis_state(m.layout, [0]), 2.0, 4000, 42,
                     keep_final_states=True)
avg = np.einsum("ti,tj->ij", batch.final_states, batch.final_states.conj()) / 4000
from mollow.correlator import evolve
rho2 = evolve(m, mw.basis_state(m.layout, [0]).to_density(), 2.0)
print("ensemble vs evolve:\n", np.abs(avg - rho2.matrix))

# 3) cascaded system: click rates vs steady state, timing
model, lay = build_sys(1.0, 1.85, 1.0, trunc=4)
rho = steady_state(liouvillian_matrix(model))
psi0 = mw.basis_state(lay, [0, 0, 0])
eng = _Engine(model)
t0 = time.time()
n_test = 200
batch = run_ensemble(model, psi0, 200.0, n_test, 123, engine=eng)
dt_run = time.time() - t0
print("per-traj time: %.2f ms -> 2e5 in %.0f s" % (1000 * dt_run / n_test, dt_run / n_test * 2e5))
for k, lbl in enumerate(model.channel_labels):
    n_clicks = np.sum(batch.channels == k)
    burn = batch.times >= 10.0
    n_b = np.sum((batch.channels == k) & burn)
    rate = n_b / (n_test * 190.0)
    ch = model.channel(lbl)
    c = ch.collapse
    exp_rate = ch.rate * np.real(mw.expectation(rho, c.dag() @ c))
    print(f"  {lbl}: MC rate {rate:.5f} vs ss {exp_rate:.5f}")
