# scratch exploration -- not part of the deliverable
import numpy as np
import mollow as mw
from mollow.liouville import liouvillian_matrix, steady_state, transition_energies, vec, lindblad_rhs

# 1) Bloch steady state oracle
for delta, om in [(0.0, 0.5), (2.0, 1.0), (1.85, 1.0), (8.92, 4.9)]:
    m = mw.build_driven_2ls(delta, om)
    rho = steady_state(liouvillian_matrix(m))
    s = m.channel("sigma").collapse
    pe = np.real(mw.expectation(rho, s.dag() @ s))
    pred = om**2 / (delta**2 + 0.25 + 2 * om**2)
    print(f"delta={delta} om={om}: pee={pe:.12f} pred={pred:.12f} diff={abs(pe-pred):.2e}")

# 2) transition energies: undriven detuned, driven
m = mw.build_driven_2ls(5.0, 0.0)
print("undriven lines:", transition_energies(liouvillian_matrix(m)))
m = mw.build_driven_2ls(12.5, 4.0)
lines = transition_energies(liouvillian_matrix(m))
print("driven lines:", lines, " formula:", np.sqrt(4*16+12.5**2))

# 3) cascade: build two-detector system at sidebands
def build_sys(om, delta, Gamma, trunc=4, lam=0.5, kap=0.0, eps=1.0):
    src = mw.build_driven_2ls(delta, om)
    lay = mw.layout(("sigma", 2), ("a1", trunc), ("a2", trunc))
    wp = np.sqrt(4*om**2 + delta**2)
    hd = mw.detector_hamiltonian(wp, -wp, lay)
    spec = mw.CascadeSpec(targets=(
        mw.TargetSpec("a1", Gamma, lam, kap, eps, wp),
        mw.TargetSpec("a2", Gamma, lam, kap, eps, -wp)))
    return mw.cascade(src, spec, hd), lay, wp

model, lay, wp = build_sys(1.0, 1.85, 1.0)
print("channels:", model.channel_labels)
L = liouvillian_matrix(model)
rho = steady_state(L)
# no-backaction check
red = mw.partial_trace(rho, {"sigma"})
solo = steady_state(liouvillian_matrix(mw.build_driven_2ls(1.85, 1.0)))
print("no-backaction trace dist:", 0.5*np.sum(np.abs(np.linalg.eigvalsh(red.matrix - solo.matrix))))
# detector populations and top-level occupation
a1 = mw.embed(mw.annihilation(4), lay, "a1")
a2 = mw.embed(mw.annihilation(4), lay, "a2")
n1 = np.real(mw.expectation(rho, a1.dag() @ a1))
n2 = np.real(mw.expectation(rho, a2.dag() @ a2))
print("n1,n2:", n1, n2)
from mollow.modelkit import top_level_populations
print("top pops (trunc4):", top_level_populations(rho))
m3, lay3, _ = build_sys(1.0, 1.85, 1.0, trunc=3)
rho3 = steady_state(liouvillian_matrix(m3))
print("top pops (trunc3):", top_level_populations(rho3))

# generator equivalence: direct SM transcription
def direct_liouvillian(om, delta, Gamma, lam=0.5, kap=0.0, eps=1.0, trunc=4):
    lay = mw.layout(("sigma", 2), ("a1", trunc), ("a2", trunc))
    wp = np.sqrt(4*om**2 + delta**2)
    s = mw.embed(mw.annihilation(2), lay, "sigma").matrix
    a = [mw.embed(mw.annihilation(trunc), lay, sl).matrix for sl in ("a1","a2")]
    h = mw.embed(mw.Operator(mw.layout(("sigma",2)),
        delta*np.array([[0,0],[0,1]])+om*np.array([[0,1],[1,0]])), lay, "sigma").matrix \
        + mw.detector_hamiltonian(wp, -wp, lay).matrix
    d = lay.dim; eye = np.eye(d)
    def pre(x): return np.kron(eye, x)
    def post(x): return np.kron(x.T, eye)
    def dis(c, rate):
        cdc = c.conj().T @ c
        return (rate/2)*(2*np.kron(c.conj(), c) - pre(cdc) - post(cdc))
    L = -1j*(pre(h) - post(h))
    L += dis(s, 1.0)
    alpha = eps*lam*(1-kap)
    for an, om_n in zip(a, (wp,-wp)):
        L += dis(an, Gamma)
        g = np.sqrt(alpha*1.0*Gamma)
        # sqrt(alpha G) { [s rho, ad] + [a, rho sd] }  (column-stacking superop)
        # [s rho, ad] = s rho ad - ad s rho ; [a, rho sd] = a rho sd - rho sd a
        L += g*( np.kron(an.conj(), s) - pre(an.conj().T @ s)
               + np.kron(s.conj(), an) - post(s.conj().T @ an) )
    return L

Ld = direct_liouvillian(1.0, 1.85, 1.0)
print("generator equivalence:", np.max(np.abs(Ld - L.matrix)))
# sanity rhs check
rng = np.random.default_rng(1)
X = rng.normal(size=(lay.dim,)*2) + 1j*rng.normal(size=(lay.dim,)*2)
X = X + X.conj().T
r1 = (L.matrix @ vec(X)).reshape(lay.dim, lay.dim, order="F")
r2 = lindblad_rhs(model, X)
print("rhs consistency:", np.max(np.abs(r1-r2)))
