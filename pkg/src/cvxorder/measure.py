"""Finitely supported probability measures on Q^d.

Scalars are :class:`fractions.Fraction`; points are tuples of fractions.
Measures are immutable, keep their atoms in lexicographic order, and never
hold two atoms at the same point.
"""

from __future__ import annotations

import json
import re
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Point = tuple[Fraction, ...]
Atom = tuple[Point, Fraction]

_RATIONAL_RE = re.compile(r"^-?[0-9]+(/[0-9]+)?$")


class MeasureError(ValueError):
    """Invalid measure data (bad weights, shapes or file contents)."""


def parse_rational(text: str, field: str = "value") -> Fraction:
    """Parse ``"p"`` or ``"p/q"`` (optional leading ``-``, q > 0) exactly."""
    if not isinstance(text, str) or not _RATIONAL_RE.match(text):
        raise MeasureError(f"{field}: expected a rational string 'p' or 'p/q', got {text!r}")
    if "/" in text:
        num, den = text.split("/")
        if int(den) == 0:
            raise MeasureError(f"{field}: zero denominator in {text!r}")
        return Fraction(int(num), int(den))
    return Fraction(int(text))


def format_rational(q: Fraction | int) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def point(*coords) -> Point:
    """Build a point from ints, Fractions or rational strings."""
    return tuple(parse_rational(c) if isinstance(c, str) else Fraction(c) for c in coords)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    if len(u) != len(v):
        raise MeasureError(f"dimension mismatch: {len(u)} vs {len(v)}")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def add(u: Point, v: Point) -> Point:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Point, v: Point) -> Point:
    return tuple(a - b for a, b in zip(u, v))


def scale(c, u: Point) -> Point:
    return tuple(c * a for a in u)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Probability measure with finitely many atoms.

    Direct construction expects canonical atoms (distinct points in
    lexicographic order, positive weights summing to 1). Use
    :func:`normalize` to build a measure from arbitrary atom lists.
    """

    dim: int
    atoms: tuple[Atom, ...]

    def __post_init__(self):
        if self.dim < 1:
            raise MeasureError("dimension must be positive")
        if not self.atoms:
            raise MeasureError("a measure needs at least one atom")
        prev = None
        total = Fraction(0)
        for p, w in self.atoms:
            if len(p) != self.dim:
                raise MeasureError(f"point {p} does not have dimension {self.dim}")
            if w <= 0:
                raise MeasureError(f"non-positive weight {w}")
            if prev is not None and not prev < p:
                raise MeasureError("atoms must be distinct and lexicographically sorted")
            prev = p
            total += w
        if total != 1:
            raise MeasureError(f"weights sum to {total}, expected 1")

    @property
    def points(self) -> list[Point]:
        return [p for p, _ in self.atoms]

    @property
    def weights(self) -> list[Fraction]:
        return [w for _, w in self.atoms]

    def __len__(self):
        return len(self.atoms)

    def weight_at(self, p: Point) -> Fraction:
        for q, w in self.atoms:
            if q == p:
                return w
        return Fraction(0)

    def integrate(self, f) -> Fraction:
        """Exact integral of ``f`` (a callable on points)."""
        return sum((w * f(p) for p, w in self.atoms), Fraction(0))


def normalize(atoms: Iterable[tuple[Sequence, object]], rescale: bool = False) -> DiscreteMeasure:
    """Merge duplicate points, drop zero weights and return a measure.

    With ``rescale=False`` the weights must already sum to exactly 1;
    with ``rescale=True`` they are divided by their total.
    """
    merged: dict[Point, Fraction] = defaultdict(Fraction)
    dim = None
    for p, w in atoms:
        p = tuple(Fraction(c) for c in p)
        w = Fraction(w)
        if dim is None:
            dim = len(p)
        elif len(p) != dim:
            raise MeasureError(f"dimension mismatch among points: {dim} vs {len(p)}")
        if w < 0:
            raise MeasureError(f"negative weight {w} at {p}")
        merged[p] += w
    if dim is None:
        raise MeasureError("empty atom list")
    total = sum(merged.values(), Fraction(0))
    if total == 0:
        raise MeasureError("all weights are zero")
    if rescale:
        merged = {p: w / total for p, w in merged.items()}
    elif total != 1:
        raise MeasureError(f"weights sum to {total}, expected 1")
    return DiscreteMeasure(dim, tuple(sorted((p, w) for p, w in merged.items() if w != 0)))


def dirac(p: Sequence) -> DiscreteMeasure:
    return normalize([(p, 1)])


def uniform(points: Iterable[Sequence]) -> DiscreteMeasure:
    """Uniform measure on a multiset of points (repeats add weight)."""
    return normalize([(p, 1) for p in points], rescale=True)


def barycenter(m: DiscreteMeasure) -> Point:
    out = [Fraction(0)] * m.dim
    for p, w in m.atoms:
        for k, c in enumerate(p):
            out[k] += w * c
    return tuple(out)


def project(m: DiscreteMeasure, v: Sequence) -> DiscreteMeasure:
    """Pushforward of ``m`` under ``x -> v.x``; a 1-D measure."""
    v = tuple(Fraction(c) for c in v)
    if len(v) != m.dim:
        raise MeasureError(f"direction has dimension {len(v)}, measure has {m.dim}")
    return normalize(((dot(v, p),), w) for p, w in m.atoms)


def affine_pushforward(m: DiscreteMeasure, A: Sequence[Sequence], b: Sequence) -> DiscreteMeasure:
    """Pushforward of ``m`` under ``x -> A x + b``."""
    A = [tuple(Fraction(c) for c in row) for row in A]
    b = tuple(Fraction(c) for c in b)
    if not A or len(A) != len(b) or any(len(row) != m.dim for row in A):
        raise MeasureError("affine map shape does not match the measure")
    return normalize(
        (tuple(dot(row, p) + bk for row, bk in zip(A, b)), w) for p, w in m.atoms
    )


def embed(m: DiscreteMeasure, target_dim: int) -> DiscreteMeasure:
    if target_dim < m.dim:
        raise MeasureError(f"cannot embed dimension {m.dim} into {target_dim}")
    pad = (Fraction(0),) * (target_dim - m.dim)
    return normalize((p + pad, w) for p, w in m.atoms)


def triangle_instance(x: Sequence, y: Sequence, z: Sequence) -> tuple[DiscreteMeasure, DiscreteMeasure]:
    """Midpoint measure ``mu`` and vertex/centroid measure ``nu`` of a triangle.

    ``nu`` puts mass 1/2 on the centroid and 1/6 on each vertex; ``mu`` is
    uniform on the three edge midpoints.
    """
    x, y, z = (tuple(Fraction(c) for c in p) for p in (x, y, z))
    if not len(x) == len(y) == len(z) == 2:
        raise MeasureError("triangle vertices must be points in Q^2")
    centroid = scale(Fraction(1, 3), add(add(x, y), z))
    half = Fraction(1, 2)
    nu = normalize([(centroid, Fraction(1, 2)), (x, Fraction(1, 6)),
                    (y, Fraction(1, 6)), (z, Fraction(1, 6))])
    mu = uniform([scale(half, add(x, y)), scale(half, add(y, z)), scale(half, add(x, z))])
    return mu, nu


PAPER_POINTS = (point(0, -1), point(-1, 0), point(2, 2))


def paper_instance() -> tuple[DiscreteMeasure, DiscreteMeasure]:
    """The triangle pair at x=(0,-1), y=(-1,0), z=(2,2)."""
    return triangle_instance(*PAPER_POINTS)


# -- JSON file format -------------------------------------------------------

def measure_to_dict(m: DiscreteMeasure) -> dict:
    return {
        "dim": m.dim,
        "atoms": [
            {"point": [format_rational(c) for c in p], "weight": format_rational(w)}
            for p, w in m.atoms
        ],
    }


def measure_from_dict(doc) -> DiscreteMeasure:
    if not isinstance(doc, dict):
        raise MeasureError("measure document must be a JSON object")
    dim = doc.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise MeasureError(f"dim: expected a positive integer, got {dim!r}")
    atoms = doc.get("atoms")
    if not isinstance(atoms, list) or not atoms:
        raise MeasureError("atoms: expected a non-empty list")
    parsed = []
    for i, atom in enumerate(atoms):
        if not isinstance(atom, dict):
            raise MeasureError(f"atoms[{i}]: expected an object")
        pt = atom.get("point")
        if not isinstance(pt, list) or len(pt) != dim:
            raise MeasureError(f"atoms[{i}].point: expected a list of {dim} rationals")
        p = tuple(parse_rational(c, f"atoms[{i}].point[{k}]") for k, c in enumerate(pt))
        w = parse_rational(atom.get("weight"), f"atoms[{i}].weight")
        if w <= 0:
            raise MeasureError(f"atoms[{i}].weight: must be positive, got {format_rational(w)}")
        parsed.append((p, w))
    total = sum((w for _, w in parsed), Fraction(0))
    if total != 1:
        raise MeasureError(f"weight: weights sum to {format_rational(total)}, expected 1")
    return normalize(parsed)


def dumps_measure(m: DiscreteMeasure) -> str:
    return json.dumps(measure_to_dict(m), indent=2) + "\n"


def loads_measure(text: str) -> DiscreteMeasure:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MeasureError(f"not valid JSON: {exc}") from None
    return measure_from_dict(doc)


def load_measure(path) -> DiscreteMeasure:
    with open(path, encoding="utf-8") as fh:
        return loads_measure(fh.read())


def save_measure(m: DiscreteMeasure, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_measure(m))
