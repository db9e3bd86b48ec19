"""
Pushing Brownian paths up and down
==================================

Three independent Brownian paths ``B, X, Y`` are sampled on a fine grid.  ``X``
is pushed up by ``B`` and ``Y`` is pushed down by ``B``.  The corrections only
grow while the reflected path sits on ``B``.
"""
import matplotlib.pyplot as plt
import numpy as np

from reflectlab import SampledPath, push_amount, push_down, push_up

rng = np.random.default_rng(1)
n = 5000
dt = 1.0 / n
increments = rng.normal(scale=np.sqrt(dt), size=(3, n))
B, X, Y = (SampledPath(np.concatenate([[0.0], np.cumsum(w)]), dt) for w in increments)

X_up = push_up(X, B)
Y_down = push_down(Y, B)

##############################################################################
# The reflected paths never cross ``B``; their gap ``Z = X_up - Y_down`` is the
# process whose law is studied in the other demos.

t = B.times
fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(8, 6))
ax1.plot(t, B.values, "k", lw=1, label="B")
ax1.plot(t, X_up.values, "C0", lw=1, label="X pushed up by B")
ax1.plot(t, Y_down.values, "C3", lw=1, label="Y pushed down by B")
ax1.legend(loc="upper left")
ax2.plot(t, push_amount(X, B), "C0", label="push applied to X")
ax2.plot(t, push_amount(-Y, -B), "C3", label="push applied to Y")
ax2.set_xlabel("t")
ax2.legend(loc="upper left")

##############################################################################
# Contact check: wherever a push grows, the reflected path equals ``B``.

push = push_amount(X, B)
rises = np.flatnonzero(np.diff(push) > 0) + 1
print("push increases at", rises.size, "grid points;",
      "all on the barrier:", np.array_equal(X_up.values[rises], B.values[rises]))
print("Z(1) =", X_up.values[-1] - Y_down.values[-1])

plt.show()
