"""Shared machinery for the sequential elimination chain.

Both sequential receivers evolve the same Markov chain: a tracked hypothesis
index starts at 0 and advances by one whenever the current round "fires"
(a detector click, or an orthogonal-projection outcome), with the index
clamped at the last hypothesis. Only the per-round advance probability,
which depends on the tracked index and the true hypothesis, differs between
the receivers.
"""

from __future__ import annotations

import numpy as np


def final_distribution(stay: np.ndarray, advance: np.ndarray, rounds: int) -> np.ndarray:
    """Distribution over the tracked index after `rounds` rounds.

    `stay[k]` / `advance[k]` are the per-round probabilities of keeping or
    leaving index k given the (fixed) true hypothesis; the caller guarantees
    they sum to 1 up to rounding. The last index absorbs its own advances.
    """
    M = stay.shape[0]
    f = np.zeros(M)
    f[0] = 1.0
    for _ in range(rounds):
        nxt = f * stay
        nxt[1:] += f[:-1] * advance[:-1]
        nxt[-1] += f[-1] * advance[-1]
        f = nxt
    return f


def run_chain(
    advance_prob: np.ndarray,
    priors: np.ndarray,
    rounds: int,
    trials: int,
    seed: int,
) -> int:
    """Monte Carlo of the elimination chain; returns the number of errors.

    `advance_prob[k, m]` is the probability that the tracked index leaves k
    in one round when hypothesis m is true. One trial = sample m from the
    priors, run `rounds` rounds, error iff the final index differs from m.
    """
    rng = np.random.default_rng(seed)
    M = advance_prob.shape[0]
    true = rng.choice(M, size=trials, p=priors)
    cur = np.zeros(trials, dtype=np.intp)
    last = M - 1
    for _ in range(rounds):
        u = rng.random(trials)
        cur = np.minimum(cur + (u < advance_prob[cur, true]), last)
    return int(np.count_nonzero(cur != true))
