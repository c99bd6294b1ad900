"""Game playout and Monte Carlo evaluation under pluggable placement policies.

A game draws N i.i.d. values and must place each, irrevocably, on a distinct
reward slot.  Policies map (drawn value, slots remaining) to a rank among
the remaining rewards (rank 1 = smallest).  Randomness comes from the
counter-based streams in :mod:`.rng`: a game consumes its stream in step
order (roll first, then one extra draw per step for the random baseline),
so a record is a pure function of (distribution, rewards, policy, seed).

Monte Carlo trials derive independent stream keys via :func:`.rng.mix`, and
the batched implementation reproduces the scalar :func:`run_game` results
bit for bit, trial by trial.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import rng
from .distribution import DiscreteDistribution, asymptotic_profile
from .errors import RewardOverflowError, UnknownKindError, UnsortedRewardsError
from .policy_engine import location_matrix

POLICY_KINDS = ("optimal", "dprofile", "uniform_random")

_TRIAL_CHUNK = 1 << 14


@dataclass(frozen=True)
class PolicySpec:
    """Which placement rule to play; dprofile carries its fraction vector."""

    kind: str
    profile: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise UnknownKindError(f"unknown policy kind {self.kind!r}")
        if (self.profile is not None) != (self.kind == "dprofile"):
            raise ValueError("profile vector is required for dprofile and only dprofile")

    @classmethod
    def optimal(cls) -> "PolicySpec":
        return cls("optimal")

    @classmethod
    def uniform_random(cls) -> "PolicySpec":
        return cls("uniform_random")

    @classmethod
    def dprofile(cls, dist: DiscreteDistribution) -> "PolicySpec":
        """Stationary heuristic: place value i at rank ceil(d_i * m) among m slots."""
        return cls("dprofile", asymptotic_profile(dist).d)


@dataclass(frozen=True)
class GameRecord:
    """One full playout: the N rolls, the slot chosen for each, and the total."""

    rolls: tuple[float, ...]
    placements: tuple[int, ...]
    reward: float
    seed: int


@dataclass(frozen=True)
class SummaryStats:
    trials: int
    mean: float
    variance: float  # unbiased
    std_error: float


class _Policy:
    """Prepared placement rule: either a (horizon, support) rank matrix or a draw."""

    def __init__(self, kind: str, rank_matrix: np.ndarray | None):
        self.kind = kind
        self.needs_uniform = rank_matrix is None
        self.rank_matrix = rank_matrix

    @staticmethod
    def uniform_rank(u: float, m: int) -> int:
        return min(int(u * m) + 1, m)


def make_policy(spec: PolicySpec, dist: DiscreteDistribution, n_max: int = 0) -> _Policy:
    """Prepare a policy for boards up to n_max slots.

    optimal precomputes the slot rank of every support value at every
    horizon; dprofile precomputes clamp(ceil(d_i * m), 1, m); the random
    baseline draws its rank from the game's stream at play time.
    """
    if spec.kind == "optimal":
        return _Policy(spec.kind, location_matrix(dist, n_max) if n_max else None)
    if spec.kind == "dprofile":
        d = np.asarray(spec.profile)
        if d.shape != (dist.k,):
            raise ValueError(f"profile has {d.size} entries for a {dist.k}-point support")
        m_col = np.arange(1, n_max + 1, dtype=np.float64)[:, None]
        ranks = np.ceil(d[None, :] * m_col)
        np.clip(ranks, 1, m_col, out=ranks)
        return _Policy(spec.kind, ranks.astype(np.int32))
    if spec.kind == "uniform_random":
        return _Policy(spec.kind, None)
    raise UnknownKindError(f"unknown policy kind {spec.kind!r}")


def _check_rewards(rewards: Sequence[float]) -> tuple[float, ...]:
    rs = tuple(float(r) for r in rewards)
    if any(b <= a for a, b in zip(rs, rs[1:])):
        raise UnsortedRewardsError("rewards must be strictly increasing")
    return rs


def make_rewards(spec: str, n: int) -> tuple[float, ...]:
    """Reward presets: "linear" gives 1..n, "geometric:B" gives B^0..B^(n-1).

    Geometric rewards overflow double precision quickly (base 10 dies near
    n = 300); any non-finite value raises RewardOverflowError.
    """
    if spec == "linear":
        return tuple(float(r) for r in range(1, n + 1))
    if spec.startswith("geometric:"):
        base = float(spec.split(":", 1)[1])
        if base <= 1.0:
            raise UnsortedRewardsError(f"geometric base must be > 1, got {base!r}")
        try:
            rs = tuple(base**j for j in range(n))
        except OverflowError:
            raise RewardOverflowError(f"geometric:{base} overflows doubles at n={n}") from None
        if not all(math.isfinite(r) for r in rs):
            raise RewardOverflowError(f"geometric:{base} overflows doubles at n={n}")
        return rs
    raise ValueError(f"unknown rewards preset {spec!r}")


def run_game(
    dist: DiscreteDistribution,
    rewards: Sequence[float],
    policy: PolicySpec,
    seed: int,
) -> GameRecord:
    """Play one full game deterministically from ``seed``.

    The stream is consumed in step order: the roll for step t, then one
    placement draw if the policy is random.  The optimal policy consults
    the threshold row for the number of slots still open at each step.
    """
    rs = _check_rewards(rewards)
    n = len(rs)
    if n < 1:
        raise ValueError("need at least one reward slot")
    pol = make_policy(policy, dist, n_max=n)
    stream = rng.CounterStream(seed)
    cum_head = dist.cum[1:-1]  # f_1..f_{k-1}; a uniform below f_i rolls index <= i
    remaining = list(range(1, n + 1))
    rolls: list[float] = []
    placements: list[int] = []
    total = 0.0
    for t in range(n):
        i = bisect_right(cum_head, stream.next_uniform())
        x = dist.support[i]
        m = n - t
        if pol.needs_uniform:
            rank = pol.uniform_rank(stream.next_uniform(), m)
        else:
            rank = int(pol.rank_matrix[m - 1, i])
        slot = remaining.pop(rank - 1)
        total += x * rs[slot - 1]
        rolls.append(x)
        placements.append(slot)
    return GameRecord(tuple(rolls), tuple(placements), total, seed)


def monte_carlo(
    dist: DiscreteDistribution,
    rewards: Sequence[float],
    policy: PolicySpec,
    trials: int,
    seed: int,
) -> SummaryStats:
    """Estimate the expected game total over independent seeded trials.

    Trial t plays exactly :func:`run_game` with stream key mix(seed, t),
    so the estimate does not depend on chunking or execution order.  Runs
    vectorized across trials in fixed-size chunks.
    """
    rs = _check_rewards(rewards)
    n = len(rs)
    if n < 1:
        raise ValueError("need at least one reward slot")
    if trials < 2:
        raise ValueError("need at least 2 trials for a variance")
    pol = make_policy(policy, dist, n_max=n)
    support = np.asarray(dist.support)
    cum_head = np.asarray(dist.cum[1:-1])
    r_arr = np.asarray(rs)
    draws_per_step = 2 if pol.needs_uniform else 1

    totals = np.empty(trials)
    for lo in range(0, trials, _TRIAL_CHUNK):
        hi = min(lo + _TRIAL_CHUNK, trials)
        keys = rng.mix_block(seed, lo, hi - lo)
        u = rng.uniform_block(keys, 0, draws_per_step * n)
        roll_idx = np.searchsorted(cum_head, u[:, ::draws_per_step], side="right")
        x_vals = support[roll_idx]
        if pol.needs_uniform:
            u_place = u[:, 1::2]
        chunk = hi - lo
        alive = np.ones((chunk, n), dtype=bool)
        acc = np.zeros(chunk)
        rows = np.arange(chunk)
        for t in range(n):
            m = n - t
            if pol.needs_uniform:
                ranks = np.minimum((u_place[:, t] * m).astype(np.int64) + 1, m)
            else:
                ranks = pol.rank_matrix[m - 1, roll_idx[:, t]]
            cum_alive = np.cumsum(alive, axis=1)
            pos = np.argmax(cum_alive == ranks[:, None], axis=1)
            acc += x_vals[:, t] * r_arr[pos]
            alive[rows, pos] = False
        totals[lo:hi] = acc

    mean = float(np.mean(totals))
    variance = float(np.var(totals, ddof=1))
    return SummaryStats(trials, mean, variance, math.sqrt(variance / trials))


def report_csv(policy_kind: str, stats: SummaryStats, target: float | None) -> str:
    """Simulation report CSV; target and abs_gap stay empty for baselines."""
    header = "policy,trials,mean,variance,std_error,target,abs_gap"
    if target is None:
        tail = ","
    else:
        tail = f"{float(target)!r},{abs(stats.mean - target)!r}"
    row = (
        f"{policy_kind},{stats.trials},{stats.mean!r},"
        f"{stats.variance!r},{stats.std_error!r},{tail}"
    )
    return header + "\n" + row + "\n"
