"""Binary user-association solvers for the VLC/RF network choice.

Every user is assigned to exactly one network through a binary vector
b, with b_j = 1 for the optical network and b_j = 0 for the radio
network. Because the two per-user serving sets are mutually
exclusive, scoring a candidate vector refits both networks' precoders
and powers under the gated clustering before summing the rates; every
candidate evaluation therefore costs two zero-forcing solves. Four
strategies share that evaluation:

* independent fair coin flips as a baseline,
* a Gibbs-style sampler over the single-flip neighborhood,
* a deterministic greedy switching loop, and
* exhaustive enumeration for small user counts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .rates import gain_tables

GIBBS_BETA = 1.0e4
GIBBS_T_MAX = 500
EXHAUSTIVE_MAX_USERS = 20


@dataclass(frozen=True)
class AssociationContext:
    """Immutable bundle of one trial's inputs to the solvers.

    ``recluster_v`` and ``recluster_r``, when set, rebuild a network's
    clustering for the subset of users currently assigned to it (they
    receive the boolean membership mask and return a full-size
    matrix). They exist for load-capped rules like nearest-N-per-AP,
    where serving slots should go to the network's own users; when
    None, the static matrix is row-gated instead, which is equivalent
    for per-user rules such as a distance ball.
    """

    Hv: np.ndarray
    Hr: np.ndarray
    Av: np.ndarray
    Ar: np.ndarray
    cfg_v: object
    cfg_r: object
    recluster_v: object = None
    recluster_r: object = None

    @property
    def n_users(self) -> int:
        return self.Hv.shape[0]


@dataclass
class SolveTrace:
    """Iteration record of one solve.

    ``rate_trace`` holds the sum-rate after each sample for the Gibbs
    solver and after each accepted change for the greedy solver.
    """

    iterations: int
    rate_trace: np.ndarray
    converged: bool
    changes: int


def evaluate_assignment(ctx: AssociationContext, b):
    """Per-user rates and the sum-rate of one assignment, after refits."""
    t = gain_tables(b, ctx)
    rates = kernels.per_user_rates(
        t.Gv, t.Gr, np.ascontiguousarray(b, dtype=np.uint8),
        t.noise_v, t.noise_r, t.bw_v, t.bw_r,
    )
    return rates, float(rates.sum())


def _sum_rate(ctx: AssociationContext, b) -> float:
    return evaluate_assignment(ctx, b)[1]


def associate_random(n_users: int, rng: np.random.Generator) -> np.ndarray:
    """Assign each user to a network by an independent fair coin flip."""
    if n_users < 1:
        raise ValueError("n_users must be at least 1")
    return rng.integers(0, 2, size=n_users, dtype=np.uint8)


def gibbs_score_transform(sum_rates) -> np.ndarray:
    """Sampling distribution over candidates from their sum-rates.

    Min-max normalizes the scores to [0, 1], divides by the total,
    squares to sharpen the contrast, and renormalizes. Equal scores
    give the uniform distribution.
    """
    r = np.asarray(sum_rates, dtype=float)
    lo = r.min()
    hi = r.max()
    if hi == lo:
        return np.full(r.size, 1.0 / r.size)
    r = (r - lo) / (hi - lo)
    r = r / r.sum()
    r = r * r
    return r / r.sum()


def gibbs_exponential_scores(sum_rates, beta: float) -> np.ndarray:
    """Boltzmann weights exp(-beta / R) for the inverse-sum-rate objective.

    Zero-rate candidates get zero weight; if every candidate has zero
    rate the distribution falls back to uniform.
    """
    r = np.asarray(sum_rates, dtype=float)
    exponents = np.full(r.size, -np.inf)
    positive = r > 0.0
    exponents[positive] = -beta / r[positive]
    top = exponents.max()
    if top == -np.inf:
        return np.full(r.size, 1.0 / r.size)
    w = np.exp(exponents - top)
    return w / w.sum()


def associate_gibbs(
    ctx: AssociationContext,
    beta: float = GIBBS_BETA,
    t_max: int = GIBBS_T_MAX,
    rng: np.random.Generator | None = None,
    weighting: str = "transform",
):
    """Randomized neighborhood sampling for the association vector.

    Starting from a uniformly sampled vector, each iteration scores the
    incumbent plus all single-flip neighbors and samples the next
    vector from the transformed scores ("transform", the default) or
    from Boltzmann weights with temperature parameter beta
    ("exponential"; beta is rescaled by the initial sum-rate so the
    weighting is insensitive to the absolute rate scale). The solve
    stops when the sampled vector equals the previous one, which by
    construction means the incumbent candidate was drawn.

    Returns:
        (b, SolveTrace). On hitting t_max without converging, the best
        vector sampled along the way is returned with converged False.
    """
    if t_max < 1:
        raise ValueError("t_max must be at least 1")
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    if weighting not in ("transform", "exponential"):
        raise ValueError(f"unknown gibbs weighting: {weighting}")
    if rng is None:
        rng = np.random.default_rng()

    n = ctx.n_users
    b = rng.integers(0, 2, size=n, dtype=np.uint8)
    current = _sum_rate(ctx, b)
    beta_eff = beta * current if current > 0.0 else beta

    best_b = b.copy()
    best_rate = current
    samples = []
    converged = False
    iterations = 0
    changes = 0
    scores = np.empty(n + 1)

    for _ in range(t_max):
        iterations += 1
        scores[0] = current
        for j in range(n):
            b[j] ^= 1
            scores[j + 1] = _sum_rate(ctx, b)
            b[j] ^= 1
        if weighting == "exponential":
            p = gibbs_exponential_scores(scores, beta_eff)
        else:
            p = gibbs_score_transform(scores)
        s = int(rng.choice(n + 1, p=p))
        sampled_rate = float(scores[s])
        samples.append(sampled_rate)
        if s == 0:
            converged = True
            break
        changes += 1
        b[s - 1] ^= 1
        current = sampled_rate
        if sampled_rate > best_rate:
            best_rate = sampled_rate
            best_b = b.copy()

    trace = SolveTrace(
        iterations=iterations,
        rate_trace=np.asarray(samples),
        converged=converged,
        changes=changes,
    )
    return (b if converged else best_b), trace


def associate_iterative(ctx: AssociationContext):
    """Greedy network switching until no single move helps.

    All users start on the optical network. Each sweep sorts users by
    their current rate, poorest service first, and tries to move each
    one to the other network, keeping the move only when the sum-rate
    strictly increases. The loop ends after a sweep with no accepted
    changes, so the result is a single-flip local optimum and the
    accepted sum-rate sequence is strictly increasing.
    """
    n = ctx.n_users
    b = np.ones(n, dtype=np.uint8)
    rates, current = evaluate_assignment(ctx, b)
    accepted: list = []
    sweeps = 0
    total_changes = 0
    while True:
        sweeps += 1
        order = np.argsort(rates, kind="stable")
        changes = 0
        for u in order:
            b[u] ^= 1
            cand_rates, cand = evaluate_assignment(ctx, b)
            if cand > current:
                current = cand
                rates = cand_rates
                accepted.append(cand)
                changes += 1
            else:
                b[u] ^= 1
        total_changes += changes
        if changes == 0:
            break
    trace = SolveTrace(
        iterations=sweeps,
        rate_trace=np.asarray(accepted),
        converged=True,
        changes=total_changes,
    )
    return b, trace


def associate_exhaustive(ctx: AssociationContext) -> np.ndarray:
    """Globally optimal association by enumerating all 2^n vectors.

    Guarded to at most 20 users. Vectors are enumerated as integers
    k = 0 .. 2^n - 1 with bit j of k giving b_j, and ties are broken
    toward the smallest k, so the result is deterministic.
    """
    n = ctx.n_users
    if n > EXHAUSTIVE_MAX_USERS:
        raise ValueError(
            f"exhaustive search supports at most {EXHAUSTIVE_MAX_USERS} "
            f"users, got {n}"
        )
    bits = np.arange(n, dtype=np.int64)
    best_b = None
    best_rate = -np.inf
    for k in range(1 << n):
        b = ((k >> bits) & 1).astype(np.uint8)
        rate = _sum_rate(ctx, b)
        if rate > best_rate:
            best_rate = rate
            best_b = b
    return best_b
