"""Convex order in Q^d through martingale couplings.

``mu`` is dominated by ``nu`` iff there is a coupling ``pi`` of the two
whose conditional mean given each ``mu``-atom is that atom. Feasibility is
decided exactly with :mod:`cvxorder.lp`; an infeasibility certificate is
turned into a max-affine convex function that integrates strictly higher
under ``mu`` than under ``nu``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import lp
from .measure import DiscreteMeasure, MeasureError, Point, add, barycenter, dot, scale
from .order1d import MeanMismatch


@dataclass(frozen=True)
class MaxAffineWitness:
    """``f(w) = max_i (slope_i . w + intercept_i)``; convex by construction."""

    pieces: tuple[tuple[Point, Fraction], ...]

    def __post_init__(self):
        if not self.pieces:
            raise ValueError("a max-affine function needs at least one piece")
        d = len(self.pieces[0][0])
        if any(len(s) != d for s, _ in self.pieces):
            raise ValueError("all slopes must share one dimension")

    @property
    def dim(self) -> int:
        return len(self.pieces[0][0])

    def __call__(self, w: Sequence) -> Fraction:
        w = tuple(Fraction(c) for c in w)
        if len(w) != self.dim:
            raise MeasureError(f"witness has dimension {self.dim}, point has {len(w)}")
        return max(dot(s, w) + c for s, c in self.pieces)


@dataclass(frozen=True)
class Dominated:
    """``coupling[i][j]`` is the mass moved from ``mu``-atom i to ``nu``-atom j."""

    coupling: tuple[tuple[Fraction, ...], ...]
    name = "Dominated"


@dataclass(frozen=True)
class NotDominated:
    """``certificate`` is the Farkas vector the witness was read from."""

    witness: MaxAffineWitness
    gap: Fraction
    certificate: tuple = ()
    name = "NotDominated"


@dataclass(frozen=True)
class MartingaleSystem:
    mu_atoms: tuple
    nu_atoms: tuple
    lp: lp.LpProblem

    @property
    def dim(self) -> int:
        return len(self.mu_atoms[0][0])


def build_martingale_system(mu: DiscreteMeasure, nu: DiscreteMeasure) -> MartingaleSystem:
    """Rows: mu-marginals, nu-marginals, then d barycenter rows per mu-atom.

    Variable ``i * len(nu) + j`` is ``pi[i][j]``.
    """
    if mu.dim != nu.dim:
        raise MeasureError(f"dimension mismatch: {mu.dim} vs {nu.dim}")
    return system_from_atoms(mu.atoms, nu.atoms)


def system_from_atoms(mu_atoms, nu_atoms) -> MartingaleSystem:
    """Same rows as :func:`build_martingale_system` for raw weighted atoms.

    Total masses are not checked, which lets callers build sub-probability
    systems.
    """
    mu_atoms = tuple((tuple(Fraction(c) for c in p), Fraction(w)) for p, w in mu_atoms)
    nu_atoms = tuple((tuple(Fraction(c) for c in p), Fraction(w)) for p, w in nu_atoms)
    nm, nn, d = len(mu_atoms), len(nu_atoms), len(mu_atoms[0][0])
    ncols = nm * nn
    zero = Fraction(0)
    rows, rhs = [], []
    for i, (_, w) in enumerate(mu_atoms):
        row = [zero] * ncols
        for j in range(nn):
            row[i * nn + j] = Fraction(1)
        rows.append(row)
        rhs.append(w)
    for j, (_, w) in enumerate(nu_atoms):
        row = [zero] * ncols
        for i in range(nm):
            row[i * nn + j] = Fraction(1)
        rows.append(row)
        rhs.append(w)
    for i, (x, w) in enumerate(mu_atoms):
        for k in range(d):
            row = [zero] * ncols
            for j, (y, _) in enumerate(nu_atoms):
                row[i * nn + j] = y[k]
            rows.append(row)
            rhs.append(w * x[k])
    return MartingaleSystem(mu_atoms, nu_atoms, lp.LpProblem(rows, rhs))


def _prune(pieces, support) -> tuple:
    keep = []
    for idx, (s, c) in enumerate(pieces):
        if (s, c) in (pieces[k] for k in keep):
            continue
        vals = [(dot(s, p) + c, max(dot(t, p) + e for t, e in pieces)) for p in support]
        if any(v == top for v, top in vals):
            keep.append(idx)
    return tuple(pieces[k] for k in keep)


def extract_witness(sys: MartingaleSystem, farkas: Sequence) -> MaxAffineWitness:
    """Turn a Farkas vector for ``sys.lp`` into a separating convex function.

    Splitting the certificate into ``a_i`` (mu rows), ``b_j`` (nu rows) and
    ``c_i`` (barycenter rows), validity says ``a_i + b_j + c_i.y_j >= 0`` and
    the weighted sum against the right-hand side is negative, so
    ``f(w) = max_i(-a_i - c_i.w)`` satisfies ``f(y_j) <= b_j`` and
    ``int f dmu > sum_j b_j nu_j >= int f dnu``.
    """
    u = tuple(Fraction(c) for c in farkas)
    if len(u) != sys.lp.shape[0] or not lp.verify_outcome(sys.lp, lp.Infeasible(u)):
        raise ValueError("not a valid Farkas certificate for this martingale system")
    nm, nn, d = len(sys.mu_atoms), len(sys.nu_atoms), sys.dim
    a = u[:nm]
    c = [u[nm + nn + i * d: nm + nn + (i + 1) * d] for i in range(nm)]
    pieces = [(tuple(-ck for ck in c[i]), -a[i]) for i in range(nm)]
    support = [p for p, _ in sys.mu_atoms] + [p for p, _ in sys.nu_atoms]
    return MaxAffineWitness(_prune(pieces, support))


def evaluate_witness(f: MaxAffineWitness, mu: DiscreteMeasure, nu: DiscreteMeasure):
    """Return ``(int f dmu, int f dnu, gap)`` exactly."""
    if not f.dim == mu.dim == nu.dim:
        raise MeasureError("witness and measures must share one dimension")
    int_mu = mu.integrate(f)
    int_nu = nu.integrate(f)
    return int_mu, int_nu, int_mu - int_nu


def check_convex_order(mu: DiscreteMeasure, nu: DiscreteMeasure):
    """Decide ``mu`` dominated by ``nu``.

    Returns :class:`MeanMismatch`, :class:`Dominated` with a martingale
    coupling, or :class:`NotDominated` with a witness and its positive gap.
    """
    if mu.dim != nu.dim:
        raise MeasureError(f"dimension mismatch: {mu.dim} vs {nu.dim}")
    bm, bn = barycenter(mu), barycenter(nu)
    if bm != bn:
        return MeanMismatch(bm, bn)
    sys = build_martingale_system(mu, nu)
    out = lp.solve_feasibility(sys.lp)
    if isinstance(out, lp.Feasible):
        nn = len(nu)
        pi = out.point
        return Dominated(tuple(tuple(pi[i * nn:(i + 1) * nn]) for i in range(len(mu))))
    f = extract_witness(sys, out.certificate)
    _, _, gap = evaluate_witness(f, mu, nu)
    if gap <= 0:
        raise AssertionError(f"extracted witness has non-positive gap {gap}")
    return NotDominated(f, gap, out.certificate)


def coupling_outcome(verdict: Dominated) -> lp.Feasible:
    """Flatten a coupling back into an LP point for :func:`lp.verify_outcome`."""
    return lp.Feasible(tuple(c for row in verdict.coupling for c in row))


def paper_witness() -> MaxAffineWitness:
    """``f(w) = max(0, w_1, w_2)``."""
    z = Fraction(0)
    one = Fraction(1)
    return MaxAffineWitness((((z, z), z), ((one, z), z), ((z, one), z)))


def pull_back(f: MaxAffineWitness, A: Sequence[Sequence], b: Sequence) -> MaxAffineWitness:
    """The witness ``w -> f(A w + b)``."""
    A = [tuple(Fraction(c) for c in row) for row in A]
    b = tuple(Fraction(c) for c in b)
    cols = list(zip(*A))
    return MaxAffineWitness(tuple(
        (tuple(dot(s, col) for col in cols), dot(s, b) + c) for s, c in f.pieces
    ))


def evaluate_inequality_1(x, y, z, f: MaxAffineWitness):
    """Centroid/vertex side versus doubled-midpoint side of the triangle inequality.

    Returns ``(lhs, rhs, lhs >= rhs)`` with
    ``lhs = 3 f(centroid) + f(x) + f(y) + f(z)`` and
    ``rhs = 2 (f(mid_xy) + f(mid_yz) + f(mid_xz))``.
    """
    x, y, z = (tuple(Fraction(c) for c in p) for p in (x, y, z))
    if not len(x) == len(y) == len(z) == 2 or f.dim != 2:
        raise MeasureError("triangle inequality check needs points and a witness on Q^2")
    half = Fraction(1, 2)
    centroid = scale(Fraction(1, 3), add(add(x, y), z))
    lhs = 3 * f(centroid) + f(x) + f(y) + f(z)
    rhs = 2 * (f(scale(half, add(x, y))) + f(scale(half, add(y, z))) + f(scale(half, add(x, z))))
    return lhs, rhs, lhs >= rhs
