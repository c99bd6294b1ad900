"""Exhaustive ground truth for small boards.

Computes the optimal expected total by brute-force recursion over subsets
of remaining slots: value(S) = sum_j p_j * max_{s in S} (x_j*r_s + value(S-s)).
Deliberately shares no code with the threshold recursion so the two can
cross-check each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .distribution import DiscreteDistribution
from .errors import TooManySlotsError
from .policy_engine import remaining_value

MAX_SLOTS = 14  # 2^m * m * k work; 14 keeps the worst case around 1.4e6 evaluations


@dataclass(frozen=True)
class SubsetValueTable:
    """Optimal expected value of every subset of slots, indexed by bitmask."""

    rewards: tuple[float, ...]
    values: tuple[float, ...]

    def value(self, mask: int) -> float:
        return self.values[mask]


def build_subset_table(dist: DiscreteDistribution, rewards: Sequence[float]) -> SubsetValueTable:
    """Exhaustive backward induction over all 2^m subsets of slot indices.

    Masks are processed in increasing population count, so every
    one-element-smaller subset is already solved.

    Raises:
        TooManySlotsError: more than MAX_SLOTS rewards.
    """
    rs = tuple(float(r) for r in rewards)
    m = len(rs)
    if m > MAX_SLOTS:
        raise TooManySlotsError(f"{m} slots exceeds the brute-force cap of {MAX_SLOTS}")
    xs = dist.support
    ps = dist.probs
    values = [0.0] * (1 << m)
    for mask in sorted(range(1, 1 << m), key=int.bit_count):
        choices = []  # (reward, value of the rest) per slot in the subset
        bits = mask
        while bits:
            low = bits & -bits
            choices.append((rs[low.bit_length() - 1], values[mask ^ low]))
            bits ^= low
        total = 0.0
        for x, p in zip(xs, ps):
            best = -float("inf")
            for r, rest in choices:
                v = x * r + rest
                if v > best:
                    best = v
            total += p * best
        values[mask] = total
    return SubsetValueTable(rs, tuple(values))


def oracle_value(dist: DiscreteDistribution, rewards: Sequence[float]) -> float:
    """Exact optimal expected total for playing len(rewards) draws onto these slots."""
    if len(rewards) == 0:
        return 0.0
    table = build_subset_table(dist, rewards)
    return table.values[-1]


class Agreement(NamedTuple):
    oracle: float
    engine: float
    rel_gap: float


def oracle_agreement(dist: DiscreteDistribution, rewards: Sequence[float]) -> Agreement:
    """Compare brute force against the threshold engine on one instance.

    rel_gap = |oracle - engine| / max(1, |oracle|); rewards must be strictly
    increasing (the engine requires it) and at most 12 slots keep this fast.
    """
    if len(rewards) > 12:
        raise TooManySlotsError(f"{len(rewards)} slots exceeds the agreement cap of 12")
    o = oracle_value(dist, rewards)
    e = remaining_value(dist, rewards)
    return Agreement(o, e, abs(o - e) / max(1.0, abs(o)))
