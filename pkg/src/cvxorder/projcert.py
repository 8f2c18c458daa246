"""Certify convex order of every 1-D projection of a pair of measures on Q^2.

The order of the projected support points only changes when the direction
crosses a line orthogonal to a difference of two pooled support points.
Between two such critical directions, the stop-loss difference at the kink
``t = p.v`` is a linear function ``c_p . v`` of the direction, so checking
it at the two arc endpoints proves it on the whole arc. Critical
directions themselves are checked by exact projection.

Any pair of finite planar measures is accepted, not only the triangle
family, so a result here is a computed fact about the given pair.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .measure import (
    DiscreteMeasure,
    MeasureError,
    Point,
    barycenter,
    dot,
    format_rational,
    project,
    sub,
)
from .order1d import Dominated, MeanMismatch, NotDominated, check_convex_order_1d


@dataclass(frozen=True)
class AllDominated:
    name = "AllDominated"


@dataclass(frozen=True)
class FailsAt:
    direction: Point
    threshold: Fraction
    name = "FailsAt"


@dataclass(frozen=True)
class Arc:
    endpoints: tuple[Point, Point]
    sign_pattern_id: int
    kink_vectors: tuple[Point, ...]
    verified: bool


@dataclass(frozen=True)
class DirectionCertificate:
    critical_directions: tuple[Point, ...]
    arcs: tuple[Arc, ...]
    overall: object
    direction_checks: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        def vec(p):
            return [format_rational(c) for c in p]

        overall = {"verdict": self.overall.name}
        if isinstance(self.overall, FailsAt):
            overall["direction"] = vec(self.overall.direction)
            overall["threshold"] = format_rational(self.overall.threshold)
        return {
            "critical_directions": [vec(d) for d in self.critical_directions],
            "direction_checks": list(self.direction_checks),
            "arcs": [
                {
                    "endpoints": [vec(e) for e in a.endpoints],
                    "sign_pattern_id": a.sign_pattern_id,
                    "kink_vector_count": len(a.kink_vectors),
                    "kink_vectors": [vec(c) for c in a.kink_vectors],
                    "verified": a.verified,
                }
                for a in self.arcs
            ],
            "overall": overall,
        }


def _require_2d(*ms: DiscreteMeasure) -> None:
    for m in ms:
        if m.dim != 2:
            raise MeasureError(f"direction certification needs dimension 2, got {m.dim}")


def primitive(v: Sequence) -> Point:
    """Positive multiple of ``v`` with coprime integer coordinates."""
    v = [Fraction(c) for c in v]
    den = math.lcm(*(c.denominator for c in v))
    ints = [int(c * den) for c in v]
    g = math.gcd(*ints)
    if g == 0:
        raise ValueError("zero vector has no direction")
    return tuple(Fraction(c // g) for c in ints)


def _half(v: Point) -> int:
    return 0 if v[1] > 0 or (v[1] == 0 and v[0] > 0) else 1


def _angle_cmp(u: Point, v: Point) -> int:
    hu, hv = _half(u), _half(v)
    if hu != hv:
        return hu - hv
    cross = u[0] * v[1] - u[1] * v[0]
    return -1 if cross > 0 else (1 if cross < 0 else 0)


def sort_by_angle(dirs) -> list[Point]:
    """Sort nonzero vectors counter-clockwise, starting at angle 0."""
    return sorted(dirs, key=functools.cmp_to_key(_angle_cmp))


def _rot90(v: Point) -> Point:
    return (-v[1], v[0])


def _pooled(mu: DiscreteMeasure, nu: DiscreteMeasure) -> list[Point]:
    return sorted(set(mu.points) | set(nu.points))


_AXES = tuple(tuple(Fraction(c) for c in v) for v in ((1, 0), (0, 1), (-1, 0), (0, -1)))


def critical_directions(mu: DiscreteMeasure, nu: DiscreteMeasure) -> list[Point]:
    _require_2d(mu, nu)
    pts = _pooled(mu, nu)
    dirs = set()
    for i, p in enumerate(pts):
        for q in pts[i + 1:]:
            r = primitive(_rot90(sub(q, p)))
            dirs.add(r)
            dirs.add(tuple(-c for c in r))
    if not dirs:
        dirs.update(_AXES)
    return sort_by_angle(dirs)


def arc_breakpoints(dirs: Sequence[Point]) -> list[Point]:
    """Critical directions, refined so that consecutive ones are less than pi apart."""
    dirs = list(dirs)
    if len(dirs) == 2:
        r = _rot90(dirs[0])
        dirs += [r, tuple(-c for c in r)]
    return sort_by_angle(dirs)


def _is_critical(pts: Sequence[Point], v: Point) -> bool:
    # v is orthogonal to some pooled difference iff two projections coincide
    return len({dot(p, v) for p in pts}) < len(pts)


def kink_vectors_on_arc(mu: DiscreteMeasure, nu: DiscreteMeasure, probe: Sequence) -> list[Point]:
    """Kink vectors ``c_p`` for each pooled point ``p`` (sorted order).

    For every direction ``v`` on the open arc containing ``probe``, the
    stop-loss difference (``nu`` minus ``mu``) of the projections at
    threshold ``p.v`` equals ``c_p . v``, where
    ``c_p = sum over q with (q - p).probe > 0 of (nu(q) - mu(q)) (q - p)``.
    """
    _require_2d(mu, nu)
    probe = tuple(Fraction(c) for c in probe)
    pts = _pooled(mu, nu)
    if _is_critical(pts, probe):
        raise ValueError(f"probe {probe} is a critical direction")
    # sweep from the top projection down, keeping suffix sums of dw and dw*q
    order = sorted(range(len(pts)), key=lambda k: dot(pts[k], probe), reverse=True)
    out = [None] * len(pts)
    mass = m0 = m1 = Fraction(0)
    for k in order:
        p = pts[k]
        out[k] = (m0 - mass * p[0], m1 - mass * p[1])
        dw = nu.weight_at(p) - mu.weight_at(p)
        mass += dw
        m0 += dw * p[0]
        m1 += dw * p[1]
    return out


def _order_pattern(pts, probe) -> tuple[int, ...]:
    return tuple(sorted(range(len(pts)), key=lambda k: dot(pts[k], probe)))


def certify_all_directions_2d(mu: DiscreteMeasure, nu: DiscreteMeasure) -> DirectionCertificate:
    _require_2d(mu, nu)
    dirs = arc_breakpoints(critical_directions(mu, nu))
    bm, bn = barycenter(mu), barycenter(nu)
    pts = _pooled(mu, nu)
    if bm != bn:
        # v = bm - bn gives mean(mu_v) > mean(nu_v); any threshold below all
        # projected points then separates them
        v = primitive(sub(bm, bn))
        t = min(dot(v, p) for p in pts)
        return DirectionCertificate(tuple(dirs), (), FailsAt(v, t))

    failure = None
    checks = []
    for e in dirs:
        verdict = check_convex_order_1d(project(mu, e), project(nu, e))
        checks.append(verdict.name)
        if failure is None and isinstance(verdict, NotDominated):
            failure = FailsAt(e, verdict.threshold)

    arcs = []
    patterns: dict[tuple, int] = {}
    for k, e1 in enumerate(dirs):
        e2 = dirs[(k + 1) % len(dirs)]
        probe = (e1[0] + e2[0], e1[1] + e2[1])
        kinks = kink_vectors_on_arc(mu, nu, probe)
        ok = all(dot(c, e1) >= 0 and dot(c, e2) >= 0 for c in kinks)
        pid = patterns.setdefault(_order_pattern(pts, probe), len(patterns))
        arcs.append(Arc((e1, e2), pid, tuple(kinks), ok))
        if not ok and failure is None:
            # at an endpoint the kink difference equals c.e exactly, so the
            # direct check there must already have failed
            raise AssertionError(f"arc {e1}..{e2} failed but its endpoints passed")

    overall = failure if failure is not None else AllDominated()
    return DirectionCertificate(tuple(dirs), tuple(arcs), overall, tuple(checks))


def recheck_certificate(doc: dict, mu: DiscreteMeasure, nu: DiscreteMeasure) -> bool:
    """Re-verify a serialized AllDominated certificate against the measures.

    Checks that the arcs tile the circle with each arc under pi and no
    pooled-pair critical direction strictly inside, that the stored kink
    vectors are correct and nonnegative at both endpoints, and that every
    listed critical direction passes a direct projection check.
    """
    from .measure import parse_rational

    def vec(v):
        return tuple(parse_rational(c) for c in v)

    if doc["overall"]["verdict"] != "AllDominated" or barycenter(mu) != barycenter(nu):
        return False
    arcs = doc["arcs"]
    pts = _pooled(mu, nu)
    for k, arc in enumerate(arcs):
        e1, e2 = (vec(e) for e in arc["endpoints"])
        if vec(arcs[(k + 1) % len(arcs)]["endpoints"][0]) != e2:
            return False
        if e1[0] * e2[1] - e1[1] * e2[0] <= 0:
            return False
        probe = (e1[0] + e2[0], e1[1] + e2[1])
        if _is_critical(pts, probe):
            return False
        for i, p in enumerate(pts):
            for q in pts[i + 1:]:
                n = _rot90(sub(q, p))
                for r in (n, tuple(-c for c in n)):
                    # r strictly between e1 and e2
                    if (e1[0] * r[1] - e1[1] * r[0] > 0) and (r[0] * e2[1] - r[1] * e2[0] > 0):
                        return False
        kinks = [vec(c) for c in arc["kink_vectors"]]
        if kinks != kink_vectors_on_arc(mu, nu, probe):
            return False
        if any(dot(c, e1) < 0 or dot(c, e2) < 0 for c in kinks):
            return False
    # angles must add up to one full turn: exactly one arc wraps past angle 0
    wraps = sum(
        1 for k, arc in enumerate(arcs)
        if _angle_cmp(vec(arc["endpoints"][0]), vec(arc["endpoints"][1])) >= 0
    )
    if wraps != 1:
        return False
    for d in doc["critical_directions"]:
        v = vec(d)
        if not isinstance(check_convex_order_1d(project(mu, v), project(nu, v)), Dominated):
            return False
    return True


def _to_int_grid(values) -> int:
    return math.lcm(*(Fraction(c).denominator for c in values))


def spot_check_directions(mu: DiscreteMeasure, nu: DiscreteMeasure, dirs: Sequence[Sequence]):
    """1-D convex-order verdicts of the projections along each direction.

    Verdicts match ``check_convex_order_1d(project(mu, v), project(nu, v))``.
    The work is vectorized over directions in exact integer arithmetic:
    points, weights and directions are scaled to integers, with an
    ``int64`` fast path when magnitudes allow it and Python integers
    otherwise.
    """
    _require_2d(mu, nu)
    dirs = [tuple(Fraction(c) for c in v) for v in dirs]
    for v in dirs:
        if len(v) != 2:
            raise MeasureError(f"direction {v} is not 2-dimensional")
        if v == (0, 0):
            raise ValueError("zero direction in spot check")
    if not dirs:
        return []
    L = _to_int_grid(c for p in _pooled(mu, nu) for c in p)
    W = _to_int_grid(mu.weights + nu.weights)
    Dk = [_to_int_grid(v) for v in dirs]
    Vint = [[int(c * d) for c in v] for v, d in zip(dirs, Dk)]
    Pa = [[int(c * L) for c in p] for p in mu.points]
    Pb = [[int(c * L) for c in p] for p in nu.points]
    wa = [int(w * W) for w in mu.weights]
    wb = [int(w * W) for w in nu.weights]

    vmax = max(abs(c) for v in Vint for c in v)
    pmax = max(abs(c) for p in Pa + Pb for c in p)
    bound = 4 * vmax * pmax * W * (len(Pa) + len(Pb))
    dtype = np.int64 if bound < 2**62 else object
    Pa, Pb = np.array(Pa, dtype=dtype), np.array(Pb, dtype=dtype)
    wa, wb = np.array(wa, dtype=dtype), np.array(wb, dtype=dtype)

    out = []
    chunk = 2048
    for start in range(0, len(dirs), chunk):
        V = np.array(Vint[start:start + chunk], dtype=dtype)
        Sa, Sb = V @ Pa.T, V @ Pb.T
        ma, mb = Sa @ wa, Sb @ wb
        T = np.concatenate([Sa, Sb], axis=1)
        zero = np.zeros((), dtype=dtype)
        sla = (np.maximum(Sa[:, None, :] - T[:, :, None], zero) * wa).sum(axis=2)
        slb = (np.maximum(Sb[:, None, :] - T[:, :, None], zero) * wb).sum(axis=2)
        viol = sla > slb
        for r in range(V.shape[0]):
            k = start + r
            den = L * Dk[k]
            if ma[r] != mb[r]:
                verdict = MeanMismatch(Fraction(int(ma[r]), W * den), Fraction(int(mb[r]), W * den))
            elif viol[r].any():
                verdict = NotDominated(Fraction(int(min(T[r][viol[r]])), den))
            else:
                verdict = Dominated()
            out.append((dirs[k], verdict))
    return out
