"""
Diffusive limit of the reflected gap
====================================

At time ``n`` the scaled half gap ``sqrt(2) D_n / sqrt(n)`` should look like
the time-one law of a 3d Bessel process.  The scaled distance from ``M`` to
either reflected walk should look like ``|N(0, 1)|``.  This demo runs a
smaller version of the KS experiments and plots empirical against limiting
CDFs.
"""
import matplotlib.pyplot as plt
import numpy as np

from reflectlab import BES3, HALF_NORMAL, mc_bessel_experiment, mc_reflected_bm_experiment
from reflectlab.statverify import bessel_samples, reflected_bm_samples

n_steps, trials, seed = 2000, 4000, 0

rep = mc_bessel_experiment(n_steps, trials, seed)
ctrl = mc_bessel_experiment(n_steps, trials, seed, oracle=HALF_NORMAL)
print(f"gap vs BES3:        D = {rep.statistic:.4f}  (critical {rep.critical_value:.4f})")
print(f"gap vs half-normal: D = {ctrl.statistic:.4f}")
for name, r in mc_reflected_bm_experiment(n_steps, trials, seed).items():
    print(f"{name} vs half-normal: D = {r.statistic:.4f}")

##############################################################################
# Empirical CDFs against the two limit laws.

grid = np.linspace(0, 4, 400)
fig, ax = plt.subplots(figsize=(7, 4))
for label, x, oracle in [("scaled gap", bessel_samples(n_steps, trials, seed), BES3),
                         ("scaled X-hat", reflected_bm_samples(n_steps, trials, seed)["x_hat"],
                          HALF_NORMAL)]:
    xs = np.sort(x)
    ax.step(xs, np.arange(1, xs.size + 1) / xs.size, where="post", label=label)
    ax.plot(grid, oracle.cdf(grid), "k--", lw=1)
ax.set_xlabel("r")
ax.set_ylabel("CDF")
ax.legend()
plt.show()
