"""
Coupled lattice walks and the (K, D, P) chain
=============================================

Three independent fair walks are run together: ``M`` on ``L`` from 0, and
``U``, ``L`` on ``L*`` from 1 and -1.  ``U`` is pushed up by ``M`` and ``L`` is
pushed down by ``M``.  In terms of the reflected walks,

* ``K = L_ref`` is the lower reflected walk,
* ``D = (U_ref - L_ref) / 2`` is the half gap,
* ``P = (M - L_ref - 1) / 2`` is the offset of ``M`` above the lower walk.

Random numbers
--------------
Trial ``i`` under seed ``s`` draws from
``Generator(PCG64(SeedSequence(s, spawn_key=(i,))))``.  PCG64 advances a
128-bit state by ``state <- state * a + c  (mod 2**128)`` and outputs the XSL-RR
permutation of the state; ``SeedSequence`` hashes ``(s, i)`` into the initial
state.  All of this is fixed by numpy's stability guarantees for
``SeedSequence``/``PCG64``, so results are reproducible across platforms and
independent of how trials are split among threads.

Each time step consumes exactly three doubles ``U_m, U_u, U_l`` from
``Generator.random`` in that order; a step is ``+1`` iff the draw is
``< 0.5``.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

import numpy as np

from .lattice import (LatticeWalk, discrete_push_down, discrete_push_up,
                      online_push_down_step, online_push_up_step,
                      push_down_values, push_up_values)
from .paths import SampledPath

__all__ = [
    "KDPState",
    "TripleTrajectory",
    "trial_rng",
    "draw_signs",
    "simulate_triple",
    "reflect_triple",
    "extract_kdp",
    "kdp_update",
    "scale_to_path",
    "simulate_endpoints",
    "simulate_kdp_batch",
    "thread_count",
]

SEED_MAX = 2**64 - 1
THREADS_ENV = "REFLECTLAB_THREADS"


class KDPState(NamedTuple):
    k: int
    d: int
    p: int


@dataclass(frozen=True)
class TripleTrajectory:
    m: LatticeWalk
    u: LatticeWalk
    l: LatticeWalk
    u_reflected: Optional[LatticeWalk] = None
    l_reflected: Optional[LatticeWalk] = None

    @property
    def n_steps(self) -> int:
        return len(self.m) - 1


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= SEED_MAX:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def thread_count(threads: Optional[int] = None) -> int:
    """Worker count: explicit argument, else ``$REFLECTLAB_THREADS``, else 1."""
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "1"))
    return max(1, int(threads))


def trial_rng(seed: int, trial: int = 0) -> np.random.Generator:
    """The generator owning trial ``trial`` of an experiment seeded by ``seed``."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=(int(trial),))
    return np.random.Generator(np.random.PCG64(ss))


def draw_signs(rng: np.random.Generator, n_steps: int) -> np.ndarray:
    """``(n_steps, 3)`` int8 array of steps for (M, U, L)."""
    return np.where(rng.random((n_steps, 3)) < 0.5, 1, -1).astype(np.int8)


def simulate_triple(n_steps: int, seed: int, trial: int = 0) -> TripleTrajectory:
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    signs = draw_signs(trial_rng(seed, trial), n_steps)
    return TripleTrajectory(m=LatticeWalk(0, signs[:, 0]),
                            u=LatticeWalk(1, signs[:, 1]),
                            l=LatticeWalk(-1, signs[:, 2]))


def reflect_triple(t: TripleTrajectory) -> TripleTrajectory:
    return replace(t, u_reflected=discrete_push_up(t.u, t.m),
                   l_reflected=discrete_push_down(t.l, t.m))


def _kdp_arrays(m, u_ref, l_ref):
    k = l_ref
    d = (u_ref - l_ref) // 2
    p = (m - l_ref - 1) // 2
    return k, d, p


def extract_kdp(t: TripleTrajectory) -> list[KDPState]:
    if t.u_reflected is None or t.l_reflected is None:
        raise ValueError("trajectory has not been reflected")
    k, d, p = _kdp_arrays(t.m.values, t.u_reflected.values, t.l_reflected.values)
    states = [KDPState(*s) for s in zip(k.tolist(), d.tolist(), p.tolist())]
    for s in states:
        if not 0 <= s.p <= s.d - 1:
            raise AssertionError(f"state {s} violates 0 <= p <= d - 1")
    return states


def kdp_update(k, d, p, dm, du, dl):
    """Advance ``(k, d, p)`` by one step with signs ``(dm, du, dl)``.

    Works on ints or on equally shaped arrays.  Only the current state and
    the signs enter, which is the Markov property of the triple.
    """
    low, mid, up = k, k + 2 * p + 1, k + 2 * d
    mid = mid + dm
    up = online_push_up_step(up, du, mid)
    low = online_push_down_step(low, dl, mid)
    return low, (up - low) // 2, (mid - low - 1) // 2


def scale_to_path(w: LatticeWalk, n: int) -> SampledPath:
    """Diffusive rescaling ``t -> w(n t) / sqrt(n)`` on the grid ``dt = 1/n``."""
    if n < 1:
        raise ValueError("n must be positive")
    if len(w) < n:
        raise ValueError(f"walk has {len(w)} values, need at least {n}")
    return SampledPath(w.values / np.sqrt(n), dt=1.0 / n)


def _batch_walks(seed, trials, n_steps):
    signs = np.stack([draw_signs(trial_rng(seed, i), n_steps) for i in trials])
    w = np.zeros((len(trials), n_steps + 1, 3), dtype=np.int32)
    np.cumsum(signs, axis=1, out=w[:, 1:])
    return w[:, :, 0], 1 + w[:, :, 1], -1 + w[:, :, 2]


def _endpoint_chunk(seed, trials, n_steps):
    m, u, l = _batch_walks(seed, trials, n_steps)
    # only the terminal value is needed: the running max collapses to a max
    push_u = np.maximum((m + 1 - u).max(axis=1), 0)
    push_l = np.maximum((l - m + 1).max(axis=1), 0)
    return np.stack([m[:, -1], u[:, -1] + push_u, l[:, -1] - push_l], axis=1)


def _run_chunks(fn, seed, trials, n_steps, chunk, threads):
    starts = range(0, trials, chunk)
    jobs = [range(s, min(trials, s + chunk)) for s in starts]
    workers = thread_count(threads)
    if workers == 1:
        return [fn(seed, j, n_steps) for j in jobs]
    with ThreadPoolExecutor(workers) as ex:
        return list(ex.map(lambda j: fn(seed, j, n_steps), jobs))


def simulate_endpoints(n_steps: int, trials: int, seed: int, *, threads=None,
                       chunk: int = 32) -> np.ndarray:
    """Terminal values ``(M, U_ref, L_ref)`` at time ``n_steps`` for each trial.

    Row ``i`` equals the last values of ``reflect_triple(simulate_triple(
    n_steps, seed, trial=i))``, whatever the thread count.
    """
    if n_steps < 1 or trials < 1:
        raise ValueError("n_steps and trials must be positive")
    check_seed(seed)
    parts = _run_chunks(_endpoint_chunk, seed, trials, n_steps, chunk, threads)
    return np.concatenate(parts).astype(np.int64)


def _kdp_chunk(seed, trials, n_steps):
    m, u, l = _batch_walks(seed, trials, n_steps)
    u_ref = push_up_values(u, m)
    l_ref = push_down_values(l, m)
    return np.stack(_kdp_arrays(m, u_ref, l_ref), axis=-1)


def simulate_kdp_batch(n_steps: int, trials: int, seed: int, *, threads=None,
                       chunk: int = 64) -> np.ndarray:
    """``(trials, n_steps + 1, 3)`` array of ``(k, d, p)`` along each trial."""
    if n_steps < 1 or trials < 1:
        raise ValueError("n_steps and trials must be positive")
    check_seed(seed)
    parts = _run_chunks(_kdp_chunk, seed, trials, n_steps, chunk, threads)
    return np.concatenate(parts).astype(np.int64)
