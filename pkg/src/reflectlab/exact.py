"""
Exact Markov structure of the reflected-walk gap
================================================

Everything here is exact rational arithmetic (:class:`fractions.Fraction`).

* :func:`bessel_kernel` is the transition matrix
  ``P[x, y] = (y / x) * {1/2 if y == x, 1/4 if |y - x| == 1, 0 otherwise}``.
* :func:`kdp_step_distribution` enumerates the eight equally likely sign
  triples and pushes them through the one-step reflection update.
* :func:`verify_lemma_identities` runs a dynamic program over every history
  ``(D_0, ..., D_n)`` carrying the joint law of ``P_n`` with that history, and
  checks that given the history, ``P_n`` is uniform on ``{0, ..., D_n - 1}``
  and ``D_{n+1}`` follows row ``D_n`` of the kernel.

The history DP keeps integer weights over the common denominator ``8**n``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .walks import kdp_update

__all__ = [
    "Rat",
    "HistoryRecord",
    "HistoryCapExceeded",
    "bessel_kernel",
    "kernel_row",
    "kdp_step_distribution",
    "published_decrease_masses",
    "generator_moments",
    "verify_kernel",
    "verify_generator_moments",
    "history_levels",
    "lemma_histories",
    "history_marginal",
    "verify_lemma_identities",
    "chain_marginal",
    "verify_marginal_agreement",
]

Rat = Fraction
HISTORY_CAP = 3**12
SIGN_TRIPLES = tuple(itertools.product((1, -1), repeat=3))


class HistoryCapExceeded(RuntimeError):
    pass


def bessel_kernel(x: int, y: int) -> Fraction:
    if x < 1:
        raise ValueError(f"kernel row index must be >= 1, got {x}")
    if y < 0:
        raise ValueError(f"kernel column index must be >= 0, got {y}")
    if y == x:
        base = Fraction(1, 2)
    elif abs(y - x) == 1:
        base = Fraction(1, 4)
    else:
        return Fraction(0)
    return Fraction(y, x) * base


def kernel_row(x: int) -> dict[int, Fraction]:
    """Nonzero entries of row ``x``."""
    row = {y: bessel_kernel(x, y) for y in (x - 1, x, x + 1) if y >= 0}
    return {y: v for y, v in row.items() if v}


def _check_state(d, p):
    if d < 1 or not 0 <= p <= d - 1:
        raise ValueError(f"invalid state d={d}, p={p}: need d >= 1, 0 <= p <= d - 1")


@lru_cache(maxsize=None)
def _step_counts(d: int, p: int, k: int = 0) -> dict[tuple[int, int, int], int]:
    # outcome -> number of the 8 sign triples producing it
    out: dict[tuple[int, int, int], int] = {}
    for dm, du, dl in SIGN_TRIPLES:
        k2, d2, p2 = kdp_update(k, d, p, dm, du, dl)
        key = (k2 - k, d2, p2)
        out[key] = out.get(key, 0) + 1
    return out


def kdp_step_distribution(d: int, p: int, k: int = 0) -> dict[tuple[int, int, int], Fraction]:
    """Exact one-step law of ``(dk, d', p')`` from state ``(k, d, p)``.

    ``k`` only translates the picture; the result does not depend on it.
    """
    _check_state(d, p)
    return {key: Fraction(c, 8) for key, c in _step_counts(d, p, k).items()}


def published_decrease_masses(d: int, p: int) -> dict[str, Fraction]:
    """The two ways the gap shrinks, as listed in closed form.

    ``A``: ``(k, d, p) -> (k+1, d-1, p)`` with mass ``1/8`` iff ``p <= d-2``.
    ``B``: ``(k, d, p) -> (k+1, d-1, p-1)`` with mass ``1/8`` iff ``p >= 1``.
    """
    return {
        "A": Fraction(1, 8) if 0 <= p <= d - 2 else Fraction(0),
        "B": Fraction(1, 8) if 1 <= p <= d - 1 else Fraction(0),
    }


def generator_moments(d: int) -> tuple[Fraction, Fraction]:
    """First and second moments of the one-step increment of the kernel chain."""
    row = kernel_row(d)
    drift = sum((v * (y - d) for y, v in row.items()), Fraction(0))
    second = sum((v * (y - d) ** 2 for y, v in row.items()), Fraction(0))
    return drift, second


def verify_kernel(d_max: int = 50) -> dict:
    """Compare the mechanically enumerated step law with the kernel.

    For every ``d <= d_max`` and every ``p`` the law must be stochastic, keep
    ``0 <= p' <= d' - 1``, not depend on ``k``, and reproduce the two closed
    form decrease cases.  Averaged over uniform ``p`` its ``d'`` marginal must
    equal the kernel row.
    """
    failures = []
    for d in range(1, d_max + 1):
        avg: dict[int, Fraction] = {}
        for p in range(d):
            law = kdp_step_distribution(d, p)
            if sum(law.values()) != 1:
                failures.append({"d": d, "p": p, "check": "stochastic"})
            if any(not 0 <= p2 <= d2 - 1 for _, d2, p2 in law):
                failures.append({"d": d, "p": p, "check": "p-range"})
            if law != kdp_step_distribution(d, p, k=d + 7):
                failures.append({"d": d, "p": p, "check": "k-independence"})
            published = published_decrease_masses(d, p)
            if (law.get((1, d - 1, p), 0) != published["A"]
                    or law.get((1, d - 1, p - 1), 0) != published["B"]):
                failures.append({"d": d, "p": p, "check": "types A/B"})
            for (_, d2, _), v in law.items():
                avg[d2] = avg.get(d2, Fraction(0)) + v / d
        avg = {y: v for y, v in avg.items() if v}
        if avg != kernel_row(d):
            failures.append({"d": d, "check": "kernel row",
                             "enumerated": {y: str(v) for y, v in sorted(avg.items())},
                             "kernel": {y: str(v) for y, v in sorted(kernel_row(d).items())}})
    return {"check": "kernel", "d_max": d_max, "pass": not failures,
            "failures": failures}


def verify_generator_moments(d_max: int = 1000) -> dict:
    bad = []
    for d in range(1, d_max + 1):
        drift, second = generator_moments(d)
        if drift != Fraction(1, 2 * d) or second != Fraction(1, 2):
            bad.append({"d": d, "drift": str(drift), "second_moment": str(second)})
    return {"check": "generator-moments", "d_max": d_max, "pass": not bad,
            "failures": bad}


# -- history dynamic program ------------------------------------------------

@dataclass(frozen=True)
class HistoryRecord:
    """A gap history ``(D_0, ..., D_n)`` with the law of ``P_n`` on it.

    ``p_dist[p]`` is ``P(history, P_n = p)``, so it sums to ``prob``.
    """

    d_history: tuple[int, ...]
    prob: Fraction
    p_dist: dict[int, Fraction] = field(default_factory=dict)


@lru_cache(maxsize=None)
def _children(d: int, counts: tuple[int, ...]) -> dict[int, tuple[int, ...]]:
    # integer weights of (d', p') one level deeper (denominator grows by 8)
    out: dict[int, list[int]] = {}
    for p, c in enumerate(counts):
        if not c:
            continue
        for (_, d2, p2), w in _step_counts(d, p).items():
            row = out.setdefault(d2, [0] * d2)
            row[p2] += c * w
    return {d2: tuple(row) for d2, row in out.items()}


def history_levels(n_max: int, cap: int = HISTORY_CAP):
    """Yield ``(n, level)`` for ``n = 0..n_max``.

    ``level`` maps each positive-probability history of length ``n + 1`` to
    the tuple of integer weights ``8**n * P(history, P_n = p)``, ``p < D_n``.
    """
    level = {(1,): (1,)}
    for n in range(n_max + 1):
        if len(level) > cap:
            raise HistoryCapExceeded(f"{len(level)} histories at n={n} exceed cap {cap}")
        yield n, level
        if n == n_max:
            break
        nxt = {}
        for hist, counts in level.items():
            for d2, row in _children(hist[-1], counts).items():
                if any(row):
                    nxt[hist + (d2,)] = row
        level = nxt


def lemma_histories(n: int) -> list[HistoryRecord]:
    """Every positive-probability history of length ``n + 1`` as exact records."""
    *_, (_, level) = history_levels(n)
    den = 8**n
    return [HistoryRecord(h, Fraction(sum(c), den),
                          {p: Fraction(v, den) for p, v in enumerate(c) if v})
            for h, c in sorted(level.items())]


def history_marginal(n: int) -> dict[int, Fraction]:
    """Law of ``D_n`` obtained by summing the history DP."""
    *_, (_, level) = history_levels(n)
    tot: dict[int, int] = {}
    for hist, counts in level.items():
        tot[hist[-1]] = tot.get(hist[-1], 0) + sum(counts)
    return {d: Fraction(v, 8**n) for d, v in sorted(tot.items())}


@lru_cache(maxsize=None)
def _history_check(d: int, counts: tuple[int, ...]):
    """Return ``None`` if both identities hold for this weight vector, else why."""
    prob = sum(counts)
    if any(c * d != prob for c in counts):
        return "id1"
    step = {d2: sum(row) for d2, row in _children(d, counts).items()}
    step = {d2: v for d2, v in step.items() if v}
    row = kernel_row(d)
    if set(step) != set(row):
        return "id2"
    for y, v in row.items():
        # conditional mass step[y] / (8 * prob) must equal the kernel entry
        if step[y] * v.denominator != 8 * prob * v.numerator:
            return "id2"
    return None


def verify_lemma_identities(n_max: int, cap: int = HISTORY_CAP) -> dict:
    """Check both conditional identities on every history up to ``n_max``.

    Returns a report with per-level results and the first counterexample.
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    levels = []
    counterexample = None
    for n, level in history_levels(n_max, cap):
        bad = {"id1": 0, "id2": 0}
        for hist, counts in level.items():
            why = _history_check(hist[-1], counts)
            if why:
                bad[why] += 1
                if counterexample is None:
                    den = 8**n
                    counterexample = {
                        "n": n, "identity": why, "d_history": list(hist),
                        "prob": str(Fraction(sum(counts), den)),
                        "p_dist": {p: str(Fraction(c, den)) for p, c in enumerate(counts)},
                    }
        levels.append({"n": n, "histories": len(level),
                       "id1": bad["id1"] == 0, "id2": bad["id2"] == 0,
                       "pass": not any(bad.values())})
    return {"check": "lemma-identities", "n_max": n_max,
            "pass": all(lv["pass"] for lv in levels),
            "levels": levels, "counterexample": counterexample}


def chain_marginal(n: int) -> dict[int, Fraction]:
    """Exact law after ``n`` steps of the kernel chain started at 1."""
    if n < 0:
        raise ValueError("n must be non-negative")
    dist = {1: Fraction(1)}
    for _ in range(n):
        nxt: dict[int, Fraction] = {}
        for x, px in dist.items():
            for y, v in kernel_row(x).items():
                nxt[y] = nxt.get(y, Fraction(0)) + px * v
        dist = nxt
    return dict(sorted(dist.items()))


def verify_marginal_agreement(n_max: int = 12) -> dict:
    levels = []
    for n, level in history_levels(n_max):
        tot: dict[int, int] = {}
        for hist, counts in level.items():
            tot[hist[-1]] = tot.get(hist[-1], 0) + sum(counts)
        dp = {d: Fraction(v, 8**n) for d, v in sorted(tot.items())}
        levels.append({"n": n, "pass": dp == chain_marginal(n)})
    return {"check": "marginal-agreement", "n_max": n_max,
            "pass": all(lv["pass"] for lv in levels), "levels": levels}
