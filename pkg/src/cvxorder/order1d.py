"""Convex order on the line, majorization, and the three-point Popoviciu check."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .measure import DiscreteMeasure, MeasureError


@dataclass(frozen=True)
class Dominated:
    name = "Dominated"


@dataclass(frozen=True)
class NotDominated:
    """Order fails; ``u -> max(u - threshold, 0)`` integrates higher under ``a``."""

    threshold: Fraction
    name = "NotDominated"


@dataclass(frozen=True)
class MeanMismatch:
    mean_a: object
    mean_b: object
    name = "MeanMismatch"


@dataclass(frozen=True)
class StopLossProfile:
    thresholds: tuple[Fraction, ...]
    values: tuple[Fraction, ...]


@dataclass(frozen=True)
class MajorizationVerdict:
    holds: bool
    failing_k: Optional[int]
    partial_sums_x: tuple[Fraction, ...]
    partial_sums_y: tuple[Fraction, ...]


def _require_1d(m: DiscreteMeasure) -> None:
    if m.dim != 1:
        raise MeasureError(f"expected a 1-dimensional measure, got dimension {m.dim}")


def stop_loss(m: DiscreteMeasure, t) -> Fraction:
    """Integral of ``max(x - t, 0)`` under ``m``."""
    _require_1d(m)
    t = Fraction(t)
    return sum((w * (p[0] - t) for p, w in m.atoms if p[0] > t), Fraction(0))


def mean(m: DiscreteMeasure) -> Fraction:
    _require_1d(m)
    return sum((w * p[0] for p, w in m.atoms), Fraction(0))


def stop_loss_profile(m: DiscreteMeasure, thresholds=None) -> StopLossProfile:
    """Stop-loss values at ``thresholds`` (default: the support of ``m``)."""
    _require_1d(m)
    if thresholds is None:
        thresholds = [p[0] for p in m.points]
    ts = tuple(sorted(set(Fraction(t) for t in thresholds)))
    return StopLossProfile(ts, tuple(stop_loss(m, t) for t in ts))


def _stop_losses(m: DiscreteMeasure, ts: Sequence[Fraction]) -> list[Fraction]:
    """Stop-loss values at increasing thresholds ``ts`` via one descending sweep."""
    atoms = sorted(((p[0], w) for p, w in m.atoms), reverse=True)
    out = [Fraction(0)] * len(ts)
    mass = moment = Fraction(0)
    k = 0
    for idx in range(len(ts) - 1, -1, -1):
        t = ts[idx]
        while k < len(atoms) and atoms[k][0] > t:
            mass += atoms[k][1]
            moment += atoms[k][1] * atoms[k][0]
            k += 1
        out[idx] = moment - t * mass
    return out


def check_convex_order_1d(a: DiscreteMeasure, b: DiscreteMeasure):
    """Decide whether ``a`` is dominated by ``b`` in the convex order.

    Both stop-loss transforms are piecewise linear with kinks at support
    points only, and their difference vanishes at both infinities once the
    means agree, so checking the union of supports is enough.
    """
    _require_1d(a)
    _require_1d(b)
    ma, mb = mean(a), mean(b)
    if ma != mb:
        return MeanMismatch(ma, mb)
    ts = sorted({p[0] for p in a.points} | {p[0] for p in b.points})
    for t, sa, sb in zip(ts, _stop_losses(a, ts), _stop_losses(b, ts)):
        if sa > sb:
            return NotDominated(t)
    return Dominated()


def _scan(xs: list[int], ys: list[int]):
    """Majorization core on integer vectors: (holds, failing_k, sums_x, sums_y)."""
    xs = sorted(xs, reverse=True)
    ys = sorted(ys, reverse=True)
    sx = list(itertools.accumulate(xs))
    sy = list(itertools.accumulate(ys))
    n = len(sx)
    for k in range(n - 1):
        if sx[k] > sy[k]:
            return False, k + 1, sx, sy
    if sx[-1] != sy[-1]:
        return False, n, sx, sy
    return True, None, sx, sy


def _to_ints(values: Sequence[Fraction]) -> tuple[list[int], int]:
    den = math.lcm(*(v.denominator for v in values))
    return [v.numerator * (den // v.denominator) for v in values], den


def majorizes(x: Sequence, y: Sequence) -> MajorizationVerdict:
    """Check whether ``x`` is majorized by ``y``.

    Descending partial sums of ``x`` must not exceed those of ``y`` and the
    totals must agree. ``failing_k`` is 1-based.
    """
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    if not x:
        raise ValueError("majorization needs non-empty vectors")
    ints, den = _to_ints([Fraction(c) for c in x] + [Fraction(c) for c in y])
    holds, k, sx, sy = _scan(ints[:len(x)], ints[len(x):])
    return MajorizationVerdict(
        holds, k, tuple(Fraction(c, den) for c in sx), tuple(Fraction(c, den) for c in sy)
    )


def popoviciu_majorization_vectors(r, s, t) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """Pairwise midpoints (each twice) versus centroid (three times) and r, s, t."""
    r, s, t = Fraction(r), Fraction(s), Fraction(t)
    rs, st, rt = (r + s) / 2, (s + t) / 2, (r + t) / 2
    c = (r + s + t) / 3
    return (rs, rs, st, st, rt, rt), (c, c, c, r, s, t)


def popoviciu_holds(r, s, t) -> bool:
    """Majorization of the midpoint vector by the centroid/point vector.

    Both vectors are scaled by ``6 * lcm(denominators)`` so the check runs
    on integers; majorization is invariant under positive scaling.
    """
    (R, S, T), _ = _to_ints([Fraction(r), Fraction(s), Fraction(t)])
    mids = [3 * (R + S)] * 2 + [3 * (S + T)] * 2 + [3 * (R + T)] * 2
    rest = [2 * (R + S + T)] * 3 + [6 * R, 6 * S, 6 * T]
    return _scan(mids, rest)[0]
