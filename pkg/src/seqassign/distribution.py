"""Discrete distribution arithmetic for the assignment engine.

A distribution is a finite set of real support points x_1 < ... < x_k with
positive probabilities.  Everything downstream (threshold recursion, rate
functions, the asymptotic placement profile) is driven by the cumulative
masses f_i = p_1 + ... + p_i, so those prefix sums are computed once at
construction time and kept on the object.

All objects here are immutable and all functions are pure.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    DomainError,
    IndexOutOfRangeError,
    InvalidDistributionFileError,
    LengthMismatchError,
    NonPositiveProbError,
    ProbSumOutOfToleranceError,
    UnsortedSupportError,
)

PROB_SUM_TOL = 1e-9


@dataclass(frozen=True)
class DiscreteDistribution:
    """Validated discrete distribution with cached prefix sums.

    ``cum[i]`` is f_i = P[X <= x_i] with ``cum[0] = 0`` and ``cum[k] = 1``
    exactly; ``cum_xp[i]`` is the prefix sum of x_j * p_j over j <= i.
    Construct via :func:`make_distribution`, which renormalizes and checks
    the invariants.
    """

    support: tuple[float, ...]
    probs: tuple[float, ...]
    cum: tuple[float, ...]
    cum_xp: tuple[float, ...]

    @property
    def k(self) -> int:
        return len(self.support)

    @property
    def mean(self) -> float:
        return self.cum_xp[-1]

    def index_of(self, x: float) -> int | None:
        """1-based index of x in the support, or None if absent."""
        idx = bisect_right(self.support, x)
        if idx > 0 and self.support[idx - 1] == x:
            return idx
        return None


def make_distribution(support: list[float], probs: list[float]) -> DiscreteDistribution:
    """Validate and build a distribution from support points and probabilities.

    The probabilities must sum to 1 within ``PROB_SUM_TOL``; they are then
    renormalized so long recursions see an exact unit mass.

    Raises:
        LengthMismatchError: lists differ in length or have fewer than 2 entries.
        UnsortedSupportError: support not strictly increasing.
        NonPositiveProbError: some probability is <= 0.
        ProbSumOutOfToleranceError: probabilities do not sum to 1 within tolerance.
    """
    xs = [float(x) for x in support]
    ps = [float(p) for p in probs]
    if len(xs) != len(ps):
        raise LengthMismatchError(f"support has {len(xs)} entries, probs has {len(ps)}")
    if len(xs) < 2:
        raise LengthMismatchError("need at least 2 support points")
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise UnsortedSupportError("support must be strictly increasing")
    if any(p <= 0 for p in ps):
        raise NonPositiveProbError("all probabilities must be > 0")
    total = math.fsum(ps)
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise ProbSumOutOfToleranceError(f"probabilities sum to {total!r}, not 1")
    ps = [p / total for p in ps]

    cum = [0.0]
    cum_xp = [0.0]
    acc = 0.0
    acc_xp = 0.0
    for x, p in zip(xs, ps):
        acc += p
        acc_xp += x * p
        cum.append(acc)
        cum_xp.append(acc_xp)
    cum[-1] = 1.0  # exact unit mass by construction

    return DiscreteDistribution(tuple(xs), tuple(ps), tuple(cum), tuple(cum_xp))


def load_distribution(source: str | Path | dict) -> DiscreteDistribution:
    """Build a distribution from a JSON file or an already-parsed mapping.

    The document must be an object with numeric arrays "support" and "probs".
    Semantic problems surface as the construction errors of
    :func:`make_distribution`; structural problems raise
    InvalidDistributionFileError.
    """
    if isinstance(source, (str, Path)):
        try:
            data = json.loads(Path(source).read_text())
        except OSError as exc:
            raise InvalidDistributionFileError(f"{source}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InvalidDistributionFileError(f"{source}: not valid JSON ({exc})") from exc
    else:
        data = source
    if not isinstance(data, dict) or "support" not in data or "probs" not in data:
        raise InvalidDistributionFileError('expected an object with "support" and "probs" arrays')
    support, probs = data["support"], data["probs"]
    if not isinstance(support, list) or not isinstance(probs, list):
        raise InvalidDistributionFileError('"support" and "probs" must be arrays')
    try:
        return make_distribution(support, probs)
    except (TypeError, ValueError) as exc:
        raise InvalidDistributionFileError(f"non-numeric entries: {exc}") from exc


def fair_dice() -> DiscreteDistribution:
    """Uniform distribution on 1..6."""
    return make_distribution([1, 2, 3, 4, 5, 6], [1 / 6] * 6)


def cdf(dist: DiscreteDistribution, x: float) -> float:
    """P[X <= x]; 0 below the support, 1 at and above its top point."""
    return dist.cum[bisect_right(dist.support, x)]


def truncated_mean(dist: DiscreteDistribution, lo: float, hi: float) -> float:
    """E[X * 1{lo < X <= hi}] from prefix sums, in O(log k).

    ``lo`` and ``hi`` may be +-inf; an empty interval contributes 0.
    """
    if lo >= hi:
        return 0.0
    i_lo = bisect_right(dist.support, lo)
    i_hi = bisect_right(dist.support, hi)
    return dist.cum_xp[i_hi] - dist.cum_xp[i_lo]


def kl_bernoulli(y: float, p: float) -> float:
    """Binary KL divergence y*log(y/p) + (1-y)*log((1-y)/(1-p)).

    Uses the 0*log(0) = 0 convention at the endpoints y = 0 and y = 1.

    Raises:
        DomainError: y outside [0, 1] or p outside (0, 1).
    """
    if not 0.0 <= y <= 1.0:
        raise DomainError(f"y={y!r} outside [0, 1]")
    if not 0.0 < p < 1.0:
        raise DomainError(f"p={p!r} outside (0, 1)")
    out = 0.0
    if y > 0.0:
        out += y * math.log(y / p)
    if y < 1.0:
        out += (1.0 - y) * math.log((1.0 - y) / (1.0 - p))
    return out


def _check_interior_index(dist: DiscreteDistribution, i: int) -> None:
    if not 2 <= i <= dist.k - 1:
        raise IndexOutOfRangeError(f"i={i} not in 2..{dist.k - 1}")


def rate_minus(dist: DiscreteDistribution, i: int, y: float) -> float:
    """Decay rate of {unusually many draws land strictly below x_i}.

    Equals the binary KL divergence of y against f_{i-1}.  ``i`` is the
    1-based support index and must be interior (2 <= i <= k-1).
    """
    _check_interior_index(dist, i)
    return kl_bernoulli(y, dist.cum[i - 1])


def rate_plus(dist: DiscreteDistribution, i: int, y: float) -> float:
    """Decay rate of {unusually many draws land strictly above x_i}.

    Equals the binary KL divergence of y against f_i, for interior i.
    """
    _check_interior_index(dist, i)
    return kl_bernoulli(y, dist.cum[i])


@dataclass(frozen=True)
class AsymptoticProfile:
    """Limiting placement fractions d_1 = 0 < d_2 < ... < d_k = 1.

    For a large board, support value x_i belongs near slot rank d_i * N
    (rank 1 = smallest reward).  Interior entries are the crossing points
    where the two tail rate functions of :func:`rate_minus` and
    :func:`rate_plus` agree.
    """

    d: tuple[float, ...]


def asymptotic_profile(dist: DiscreteDistribution) -> AsymptoticProfile:
    """Closed-form placement profile of the distribution.

    For interior i the fraction is
    log((1-f_i)/(1-f_{i-1})) / log(f_{i-1}(1-f_i) / ((1-f_{i-1}) f_i)),
    which lies strictly between f_{i-1} and f_i; the ends are pinned to
    d_1 = 0 and d_k = 1.  For k = 2 the profile is just (0, 1).
    """
    f = dist.cum
    d = [0.0]
    for i in range(2, dist.k):
        num = math.log((1.0 - f[i]) / (1.0 - f[i - 1]))
        den = math.log(f[i - 1] * (1.0 - f[i]) / ((1.0 - f[i - 1]) * f[i]))
        d.append(num / den)
    d.append(1.0)
    for i in range(2, dist.k):  # crossing point must sit inside its mass band
        assert f[i - 1] < d[i - 1] < f[i], (i, d[i - 1])
    assert all(b > a for a, b in zip(d, d[1:])), "profile must be strictly increasing"
    return AsymptoticProfile(tuple(d))
