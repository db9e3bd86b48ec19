"""
The half gap of two reflected walks is an exact Markov chain
============================================================

On the lattices the upper and lower reflected walks stay an even distance
``2 D`` apart.  Given its past, ``D`` moves according to the kernel
``P[x, y] = (y / x) * {1/2, 1/4}``.  Everything below is exact rational
arithmetic.
"""
from reflectlab import (bessel_kernel, chain_marginal, extract_kdp, kdp_step_distribution,
                        reflect_triple, simulate_triple, verify_lemma_identities)
from reflectlab.exact import generator_moments, lemma_histories, verify_kernel

##############################################################################
# A short simulated trajectory of the state ``(k, d, p)``.

traj = reflect_triple(simulate_triple(10, seed=0))
for n, state in enumerate(extract_kdp(traj)):
    print(n, state)

##############################################################################
# The eight sign triples from ``d = 3, p = 1``.

for outcome, mass in sorted(kdp_step_distribution(3, 1).items()):
    print("(dk, d', p') =", outcome, " mass", mass)

print("kernel row 3:", {y: str(bessel_kernel(3, y)) for y in (2, 3, 4)})
print("kernel check up to d = 50:", verify_kernel(50)["pass"])

##############################################################################
# Conditional on every history, ``P_n`` is uniform and ``D`` steps by the kernel.

for rec in lemma_histories(2):
    print(rec.d_history, rec.prob, {p: str(v) for p, v in rec.p_dist.items()})
report = verify_lemma_identities(10)
print("histories per level:", [lv["histories"] for lv in report["levels"]])
print("identities hold:", report["pass"])

##############################################################################
# Drift ``1/(2d)`` and second moment ``1/2`` per step: after scaling by
# ``sqrt(2 / n)`` this is the Bessel-3 generator.

for d in (1, 2, 10):
    print(d, *generator_moments(d))
print("law of D_4:", {d: str(p) for d, p in chain_marginal(4).items()})
