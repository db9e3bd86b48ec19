"""Exit criteria.  Each test records one PASS/FAIL line, printed at the end of
the pytest run under "acceptance criteria"."""
import time

import numpy as np

from conftest import all_step_sequences
from reflectlab import exact, statverify
from reflectlab.lattice import online_push_up_step, push_down_values, push_up_values
from reflectlab.paths import SampledPath, push_amount, push_up


def _clear_caches():
    exact._step_counts.cache_clear()
    exact._children.cache_clear()
    exact._history_check.cache_clear()
    statverify._endpoints.cache_clear()


def _timed(fn, *args, **kwargs):
    _clear_caches()
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0


def test_1_kernel_equivalence(record):
    rep, secs = _timed(exact.verify_kernel, 50)
    ok = rep["pass"] and secs < 1.0
    record(1, "kernel equivalence d<=50, types A/B exact", ok, f"{secs:.2f}s")
    assert rep["pass"], rep["failures"][:3]
    assert secs < 1.0


def test_2_lemma_identities(record):
    rep, secs = _timed(exact.verify_lemma_identities, 10)
    n_hist = sum(lv["histories"] for lv in rep["levels"])
    ok = rep["pass"] and secs < 30.0
    record(2, "conditional identities on all histories to n=10", ok,
           f"{n_hist} histories, {secs:.2f}s")
    assert rep["pass"], rep["counterexample"]
    assert secs < 30.0


def test_3_marginal_agreement(record):
    rep, secs = _timed(exact.verify_marginal_agreement, 12)
    ok = rep["pass"] and secs < 60.0
    record(3, "chain marginal == history-DP marginal, n<=12", ok, f"{secs:.2f}s")
    assert rep["pass"]
    assert secs < 60.0


def test_4_generator_moments(record):
    rep, secs = _timed(exact.verify_generator_moments, 1000)
    ok = rep["pass"] and secs < 1.0
    record(4, "drift 1/(2d), second moment 1/2, d<=1000", ok, f"{secs:.2f}s")
    assert rep["pass"], rep["failures"][:3]
    assert secs < 1.0


def test_5_bessel_marginal(record):
    params = dict(n_steps=10_000, trials=20_000, seed=0, alpha=0.01)
    rep, secs = _timed(statverify.mc_bessel_experiment, **params)
    ctrl = statverify.mc_bessel_experiment(**params, oracle=statverify.HALF_NORMAL)
    ok = rep.passed and not ctrl.passed and secs < 60.0
    record(5, "scaled gap ~ BES3 at t=1 (KS), half-normal control rejected", ok,
           f"D={rep.statistic:.4f} < {rep.critical_value:.4f}, "
           f"control D={ctrl.statistic:.3f}, {secs:.1f}s")
    assert rep.passed and not ctrl.passed
    assert secs < 60.0


def test_6_reflected_bm_marginals(record):
    params = dict(n_steps=10_000, trials=20_000, seed=0, alpha=0.01)
    reps, secs = _timed(statverify.mc_reflected_bm_experiment, **params)
    ctrls = statverify.mc_reflected_bm_experiment(**params, oracle=statverify.BES3)
    ok = (all(r.passed for r in reps.values()) and not any(c.passed for c in ctrls.values())
          and secs < 60.0)
    detail = ", ".join(f"{k} D={r.statistic:.4f}" for k, r in reps.items())
    record(6, "X-hat, Y-hat ~ half-normal at t=1 (KS), BES3 control rejected", ok,
           f"{detail} < {reps['x_hat'].critical_value:.4f}, {secs:.1f}s")
    assert all(r.passed for r in reps.values())
    assert not any(c.passed for c in ctrls.values())
    assert secs < 60.0


def _continuous_axioms(rng, pairs=10_000):
    for _ in range(pairs):
        n = int(rng.integers(1, 64))
        x = np.cumsum(rng.normal(size=n)) * rng.uniform(0.1, 10)
        b = np.cumsum(rng.normal(size=n)) * rng.uniform(0.1, 10)
        x[0] = b[0] + abs(rng.normal()) * rng.integers(0, 2)
        xp, bp = SampledPath(x), SampledPath(b)
        r = push_up(xp, bp).values
        push = push_amount(xp, bp)
        if not (np.all(r >= b) and push[0] == 0 and np.all(np.diff(push) >= 0)):
            return False
        rises = np.flatnonzero(np.diff(push) > 0) + 1
        if not np.array_equal(r[rises], b[rises]):
            return False
        x2 = x + rng.normal(size=n) * rng.uniform(0, 1)
        b2 = b + rng.normal(size=n) * rng.uniform(0, 1)
        x2[0] = max(x2[0], b2[0])
        r2 = push_up(SampledPath(x2), SampledPath(b2)).values
        bound = 2 * np.abs(x - x2).max() + np.abs(b - b2).max()
        if np.abs(r - r2).max() > bound + 1e-12 * (1 + np.abs(r).max()):
            return False
    return True


def _discrete_axioms(n_steps, x_start):
    """All (x, b) pairs with n_steps steps, x from x_start on L*, b from 0 on L.

    Reflection is causal, so length-n pairs cover every shorter pair too.
    """
    steps = all_step_sequences(n_steps)
    xs = np.hstack([np.full((len(steps), 1), x_start), x_start + np.cumsum(steps, axis=1)])
    for bstep in steps:
        b = np.concatenate([[0], np.cumsum(bstep)])
        r = push_up_values(xs, b)
        push = r - xs
        dpush = np.diff(push, axis=1)
        if not (np.all(r - b >= 1) and np.all(push[:, 0] == 0) and np.all(dpush >= 0)
                and np.all(push % 2 == 0) and np.all(np.abs(np.diff(r, axis=1)) == 1)):
            return False
        if np.any((r[:, 1:] - b[1:] > 1) & (dpush != 0)):
            return False
        fold = xs[:, 0]
        for t in range(n_steps):
            fold = online_push_up_step(fold, steps[:, t], b[t + 1])
            if not np.array_equal(fold, r[:, t + 1]):
                return False
        if not np.array_equal(push_down_values(-xs, -b), -r):
            return False
    return True


def test_7_reflection_axioms(record):
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    cont = _continuous_axioms(rng)
    disc = _discrete_axioms(12, 1) and _discrete_axioms(10, 3) and _discrete_axioms(10, 5)
    record(7, "reflection axioms, Lipschitz bound, online fold == closed form",
           cont and disc, f"1e4 continuous pairs, all 4^12 discrete pairs, "
                          f"{time.perf_counter() - t0:.1f}s")
    assert cont, "continuous reflection axioms"
    assert disc, "discrete reflection axioms"


def test_8_simulator_oracle_agreement(record):
    rep = statverify.chi_square_agreement(n_steps=1000, trials=1000, seed=0, alpha=0.01)
    record(8, "one-step frequencies vs exact step law (chi-square)", rep["pass"],
           f"{rep['visits']} visits, chi2={rep['chi_square']:.0f} on {rep['dof']} dof, "
           f"p={rep['p_value']:.3f}")
    assert rep["visits"] == 1_000_000
    assert rep["off_support"] == 0
    assert rep["pass"]
