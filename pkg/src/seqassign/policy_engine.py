"""Optimal threshold policies for sequential assignment, by backward recursion.

With m draws left and the remaining reward slots sorted increasingly, the
optimal play is an interval rule: there are breakpoints
-inf = a_{m,0} < a_{m,1} < ... < a_{m,m} = +inf, depending only on the
distribution, and a drawn value in the n-th interval goes onto the n-th
smallest remaining reward.  Rows satisfy the recursion

    a_{m+1,n} = E[ clamp(X, a_{m,n-1}, a_{m,n}) ]

i.e. each new breakpoint is the expectation of a draw clamped to the
bracketing interval of the previous row, which expands to a truncated mean
plus the two boundary masses (with (+-inf) * 0 taken as 0).  The breakpoint
a_{m,n} equals the expected value that ends up on the n-th smallest slot
under optimal play, which is what makes expected totals a dot product of
rewards with a row (:func:`remaining_value`).

Numerics: at large horizons most breakpoints hug a support point to within
exp(-c * distance_into_plateau), far below float64 resolution.  Evaluating
the recursion on plain values flattens those separations to a few ulps and
the slow drift of the transition zones between plateaus then wanders off,
corrupting the location vectors.  The engine instead carries each entry as
(nearest support index, signed offset).  Brackets whose endpoints hug the
same support point cancel that support's coefficient identically, so the
update mixes only offset-sized terms and keeps full relative precision;
every other bracket shape gets an exact precomputed anchor shift.  Public
rows still expose plain float64 values; the anchored form also yields exact
location queries (first slot rank whose breakpoint reaches a support value).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .distribution import DiscreteDistribution
from .errors import (
    CapacityError,
    EmptyRewardsError,
    UnsortedRewardsError,
    ValueNotInSupportError,
)

DEFAULT_CELL_BUDGET = 2**28
_VALUE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class ThresholdRow:
    """Breakpoints for one horizon: ``interior`` holds a_{m,1}..a_{m,m-1}.

    The sentinels a_{m,0} = -inf and a_{m,m} = +inf are implicit.  Rows
    produced by a live recursion also carry ``near``/``tau``: the index of
    the support point nearest each entry and the signed offset from it,
    which preserve orderings that the plain values round away.  All arrays
    are read-only; rows are safe to share between threads.
    """

    horizon: int
    interior: np.ndarray
    near: np.ndarray | None = field(default=None, repr=False, compare=False)
    tau: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        assert self.horizon >= 1 and self.interior.shape == (self.horizon - 1,)
        self.interior.flags.writeable = False
        if self.near is not None:
            assert self.tau is not None and self.near.shape == self.tau.shape == self.interior.shape
            self.near.flags.writeable = False
            self.tau.flags.writeable = False

    def rank_of(self, x: float) -> int:
        """Slot rank for value x at this horizon: min n with x <= a_{m,n}.

        Compares against the plain float64 values; use
        :func:`locations_from_row` for the offset-exact ranks of support
        points.
        """
        return int(np.searchsorted(self.interior, x, side="left")) + 1


@dataclass(frozen=True)
class LocationVector:
    """Slot ranks ell(1) <= ... <= ell(k) for each support value at one horizon."""

    horizon: int
    ell: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class ThresholdTable:
    """Rows for horizons 1..n_max ("all") or just the final row ("last")."""

    dist: DiscreteDistribution
    n_max: int
    retention: str
    rows: dict[int, ThresholdRow] = field(repr=False)

    def row(self, horizon: int) -> ThresholdRow:
        try:
            return self.rows[horizon]
        except KeyError:
            raise ValueError(
                f"row for horizon {horizon} not stored (retention={self.retention!r})"
            ) from None


class _ComboTable:
    """Exact anchor shifts, one per bracket shape.

    A bracket shape classifies the pair (b_{n-1}, b_n) by (atoms <= lower,
    lower anchor, atoms <= upper, upper anchor), with sentinel codes at the
    -inf/+inf ends.  The update for that shape is

        new = shift + anchor_of(shape) + tau_lo * F[i_lo] + tau_hi * (1 - F[i_hi])

    where the shift collects every term that does not scale with an offset.
    Shapes whose endpoints share one anchor have shift identically zero
    (the anchor's probability coefficients sum to one); the rest are
    evaluated in exact rational arithmetic over the stored floats and
    rounded once, so a shift is correct to one ulp of itself rather than
    of the support span.
    """

    def __init__(self, dist: DiscreteDistribution, cum: np.ndarray, comp: np.ndarray):
        self.k = dist.k
        self.support = np.asarray(dist.support)
        self._fx = [Fraction(x) for x in dist.support]
        self._fp = [Fraction(p) for p in dist.probs]
        self._fcum = [Fraction(float(c)) for c in cum]
        self._fcomp = [Fraction(float(c)) for c in comp]
        self._cache: dict[int, tuple[int, float]] = {}
        self._keys = np.empty(0, dtype=np.int64)
        self._anchor = np.empty(0, dtype=np.int32)
        self._delta = np.empty(0, dtype=np.float64)

    # key packing: ((i_lo * B + m_lo) * B + i_hi) * B + m_hi, B = k + 1,
    # anchors 0..k-1 plus sentinel code k, atom counts 0..k
    def pack(self, i_lo, m_lo, i_hi, m_hi) -> np.ndarray:
        base = np.int64(self.k + 1)
        return ((i_lo.astype(np.int64) * base + m_lo) * base + i_hi) * base + m_hi

    def lookup(self, keys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        pos = np.searchsorted(self._keys, keys)
        if self._keys.size:
            hit = self._keys[np.minimum(pos, self._keys.size - 1)] == keys
        else:
            hit = np.zeros(keys.shape, dtype=bool)
        if not hit.all():
            for key in np.unique(keys[~hit]):
                self._cache[int(key)] = self._compute(int(key))
            items = sorted(self._cache.items())
            self._keys = np.array([key for key, _ in items], dtype=np.int64)
            self._anchor = np.array([a for _, (a, _) in items], dtype=np.int32)
            self._delta = np.array([d for _, (_, d) in items], dtype=np.float64)
            pos = np.searchsorted(self._keys, keys)
        return self._anchor[pos], self._delta[pos]

    def _compute(self, key: int) -> tuple[int, float]:
        base = self.k + 1
        sent = self.k
        m_hi = key % base
        key //= base
        i_hi = key % base
        key //= base
        m_lo = key % base
        i_lo = key // base
        # shapes with a single real anchor whose coefficients sum to one
        if m_lo == m_hi and m_lo != sent:
            return m_lo, 0.0
        if m_lo == sent and m_hi == 0:
            return 0, 0.0
        if m_hi == sent and m_lo == self.k - 1:
            return self.k - 1, 0.0
        xp = sum((self._fx[t] * self._fp[t] for t in range(i_lo, i_hi)), Fraction(0))
        if m_lo != sent:
            xp += self._fx[m_lo] * self._fcum[i_lo]
        if m_hi != sent:
            xp += self._fx[m_hi] * self._fcomp[i_hi]
        pos = int(np.searchsorted(self.support, float(xp), side="left"))
        best = min(max(pos - 1, 0), self.k - 1)
        alt = min(pos, self.k - 1)
        if alt != best and abs(xp - self._fx[alt]) < abs(xp - self._fx[best]):
            best = alt
        return best, float(xp - self._fx[best])


class _Engine:
    """One live recursion frontier in anchored-offset form."""

    def __init__(self, dist: DiscreteDistribution):
        self.dist = dist
        self.support = np.asarray(dist.support)
        self.cum = np.asarray(dist.cum)
        self.comp = 1.0 - self.cum
        self.k = dist.k
        self.span = float(dist.support[-1] - dist.support[0])
        self.combos = _ComboTable(dist, self.cum, self.comp)
        self.horizon = 1
        self.near = np.empty(0, dtype=np.int32)
        self.tau = np.empty(0, dtype=np.float64)
        self.values = np.empty(0, dtype=np.float64)

    @classmethod
    def from_row(cls, dist: DiscreteDistribution, row: ThresholdRow) -> "_Engine":
        eng = cls(dist)
        eng.horizon = row.horizon
        if row.near is not None:
            eng.near, eng.tau = row.near, row.tau
        else:
            # reconstruct anchors from plain values: nearest support point
            v = row.interior
            pos = np.searchsorted(eng.support, v, side="left")
            lo = np.clip(pos - 1, 0, eng.k - 1)
            hi = np.clip(pos, 0, eng.k - 1)
            eng.near = np.where(
                v - eng.support[lo] <= eng.support[hi] - v, lo, hi
            ).astype(np.int32)
            eng.tau = v - eng.support[eng.near]
        eng.values = row.interior
        return eng

    def row(self) -> ThresholdRow:
        return ThresholdRow(self.horizon, self.values, self.near, self.tau)

    def step(self) -> None:
        k = self.k
        sent = np.int32(k)
        below = np.signbit(self.tau)
        idx = (self.near + 1 - below).astype(np.int64)  # atoms <= entry value
        i_lo = np.concatenate(([0], idx))
        m_lo = np.concatenate(([sent], self.near)).astype(np.int64)
        i_hi = np.concatenate((idx, [k]))
        m_hi = np.concatenate((self.near, [sent])).astype(np.int64)
        t_lo = np.concatenate(([0.0], self.tau))
        t_hi = np.concatenate((self.tau, [0.0]))

        anchor, delta = self.combos.lookup(self.combos.pack(i_lo, m_lo, i_hi, m_hi))
        mixed = t_lo * self.cum[i_lo] + t_hi * self.comp[i_hi]
        tau = np.where(delta != 0.0, delta + mixed, mixed)

        # re-anchor entries that drifted closer to a neighbouring support point
        v = self.support[anchor] + tau
        pos = np.searchsorted(self.support, v, side="left")
        lo = np.clip(pos - 1, 0, k - 1)
        hi = np.clip(pos, 0, k - 1)
        nearest = np.where(v - self.support[lo] <= self.support[hi] - v, lo, hi)
        moved = nearest != anchor
        if moved.any():
            tau = np.where(moved, v - self.support[nearest], tau)
            anchor = np.where(moved, nearest, anchor)

        same = anchor[1:] == anchor[:-1]
        assert not same.any() or (tau[1:][same] >= tau[:-1][same]).all(), (
            "offsets out of order within an anchor run"
        )
        out = np.maximum.accumulate(v)
        tol = _VALUE_RTOL * self.span
        assert (out - v).max(initial=0.0) <= tol, "non-monotone row"
        # each entry must stay bracketed by the previous row
        prev = self.values
        assert prev.size == 0 or (
            (out[1:] >= prev - tol).all() and (out[:-1] <= prev + tol).all()
        ), "row escaped its bracketing interval"

        self.near = anchor.astype(np.int32)
        self.tau = tau
        self.values = out
        self.horizon += 1


def next_row(dist: DiscreteDistribution, prev: ThresholdRow) -> ThresholdRow:
    """One backward-recursion step: the row for horizon N+1 from horizon N."""
    eng = _Engine.from_row(dist, prev)
    eng.step()
    return eng.row()


def iter_rows(dist: DiscreteDistribution, n_max: int) -> Iterator[ThresholdRow]:
    """Yield the rows for horizons 1..n_max, one O(m) step at a time.

    The single-pass driver behind table builds and convergence sweeps;
    O(n_max^2) time overall but only O(n_max) live memory.
    """
    eng = _Engine(dist)
    yield eng.row()
    for _ in range(1, n_max):
        eng.step()
        yield eng.row()


def build_table(
    dist: DiscreteDistribution,
    n: int,
    retention: str = "all",
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> ThresholdTable:
    """Build threshold rows up to horizon ``n``.

    retention="all" stores every row (O(n^2) memory, guarded by
    ``cell_budget`` total entries); retention="last" keeps only horizon n.
    Non-final stored rows are plain values; the final row keeps its anchored
    form for exact location queries.  The build is deterministic: identical
    inputs give bit-identical rows.

    Raises:
        CapacityError: retention="all" and n(n-1)/2 exceeds ``cell_budget``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if retention not in ("all", "last"):
        raise ValueError(f"retention must be 'all' or 'last', got {retention!r}")
    if retention == "all" and n * (n - 1) // 2 > cell_budget:
        raise CapacityError(f"horizon {n} needs {n * (n - 1) // 2} cells > budget {cell_budget}")
    rows: dict[int, ThresholdRow] = {}
    for row in iter_rows(dist, n):
        if row.horizon == n:
            rows[n] = row
        elif retention == "all":
            rows[row.horizon] = ThresholdRow(row.horizon, row.interior)
    return ThresholdTable(dist, n, retention, rows)


def locations_from_row(dist: DiscreteDistribution, row: ThresholdRow) -> tuple[int, ...]:
    """Slot rank per support value against one row: min n with x_i <= a_{m,n}.

    Uses the row's anchored offsets when present, so a breakpoint that sits
    below a support point by less than an ulp still counts as below.
    """
    if row.near is None:
        return tuple(
            int(r) + 1 for r in np.searchsorted(row.interior, dist.support, side="left")
        )
    k = dist.k
    anchored_lt = np.bincount(row.near, minlength=k).cumsum()  # entries anchored < i
    eq_below = np.bincount(row.near[np.signbit(row.tau)], minlength=k)
    ell = np.empty(k, dtype=np.int64)
    ell[0] = eq_below[0] + 1
    ell[1:] = anchored_lt[:-1] + eq_below[1:] + 1
    return tuple(int(e) for e in ell)


def locations(dist: DiscreteDistribution, n: int) -> LocationVector:
    """Optimal slot rank for each support value when n slots remain.

    Ties of the interval rule (a value equal to a breakpoint) resolve to
    the smaller rank; both choices have equal expected value.
    """
    table = build_table(dist, n, retention="last")
    return LocationVector(n, locations_from_row(dist, table.row(n)))


def location_matrix(dist: DiscreteDistribution, n_max: int) -> np.ndarray:
    """(n_max, k) array of slot ranks: row m-1 holds the ranks at horizon m."""
    out = np.empty((n_max, dist.k), dtype=np.int32)
    for row in iter_rows(dist, n_max):
        out[row.horizon - 1] = locations_from_row(dist, row)
    out.flags.writeable = False
    return out


def _check_rewards(rewards: Sequence[float]) -> np.ndarray:
    arr = np.asarray(rewards, dtype=np.float64)
    if arr.ndim != 1:
        raise UnsortedRewardsError("rewards must be a flat sequence")
    if arr.size >= 2 and not (np.diff(arr) > 0).all():
        raise UnsortedRewardsError("rewards must be strictly increasing")
    return arr


def remaining_value(dist: DiscreteDistribution, rewards: Sequence[float]) -> float:
    """Optimal expected total of playing m i.i.d. draws onto these reward slots.

    Equals the dot product of the sorted rewards with the horizon-(m+1)
    interior row, because entry n of that row is the expected value landing
    on the n-th smallest slot under optimal play.

    Raises:
        UnsortedRewardsError: rewards not strictly increasing.
    """
    arr = _check_rewards(rewards)
    if arr.size == 0:
        return 0.0
    table = build_table(dist, arr.size + 1, retention="last")
    return float(arr @ table.row(arr.size + 1).interior)


def _whatif_from_row(
    interior: np.ndarray, rewards: np.ndarray, x: float
) -> tuple[int, np.ndarray]:
    """Slot rank plus the value of forcing x onto each slot, from the horizon-m row.

    whatif[j] = x*r_j + (optimal value of the other m-1 slots); the same
    interior row prices every deleted-slot subproblem, so one prefix and
    one suffix sweep cover all j.
    """
    m = rewards.size
    slot_rank = int(np.searchsorted(interior, x, side="left")) + 1
    head = np.zeros(m)
    tail = np.zeros(m)
    if m > 1:
        head[1:] = np.cumsum(rewards[:-1] * interior)
        tail[:-1] = np.cumsum((rewards[1:] * interior)[::-1])[::-1]
    return slot_rank, x * rewards + head + tail


def advise(
    dist: DiscreteDistribution, rewards: Sequence[float], x: float
) -> tuple[int, list[float]]:
    """Optimal slot rank for value x among m remaining rewards, with what-ifs.

    Returns (slot_rank, whatif) where whatif[j] is the expected final total
    from placing x on the j-th smallest reward and playing on optimally.
    The advised rank attains the maximum of whatif; when x sits exactly on
    a breakpoint the neighbouring slot ties and the smaller rank is advised.

    Raises:
        EmptyRewardsError: no rewards remain.
        ValueNotInSupportError: x is not a support point.
        UnsortedRewardsError: rewards not strictly increasing.
    """
    arr = _check_rewards(rewards)
    if arr.size == 0:
        raise EmptyRewardsError("need at least one reward slot")
    i = dist.index_of(x)
    if i is None:
        raise ValueNotInSupportError(f"{x!r} is not a support value")
    table = build_table(dist, arr.size, retention="last")
    row = table.row(arr.size)
    _, whatif = _whatif_from_row(row.interior, arr, x)
    slot_rank = locations_from_row(dist, row)[i - 1]
    return slot_rank, [float(w) for w in whatif]


def thresholds_csv(row: ThresholdRow) -> str:
    """Threshold row as CSV with round-trip precision: header ``n,a``."""
    lines = ["n,a"]
    lines += [f"{n},{float(a)!r}" for n, a in enumerate(row.interior, start=1)]
    return "\n".join(lines) + "\n"


def locations_csv(dist: DiscreteDistribution, vec: LocationVector) -> str:
    """Location vector as CSV: header ``i,x_i,ell``."""
    lines = ["i,x_i,ell"]
    lines += [
        f"{i},{float(x)!r},{ell}"
        for i, (x, ell) in enumerate(zip(dist.support, vec.ell), start=1)
    ]
    return "\n".join(lines) + "\n"
