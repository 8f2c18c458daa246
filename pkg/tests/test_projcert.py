from fractions import Fraction as F
import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from cvxorder.measure import MeasureError, dirac, dot, normalize, paper_instance, project, triangle_instance, uniform
from cvxorder.order1d import (
    Dominated,
    MeanMismatch,
    NotDominated,
    check_convex_order_1d,
    popoviciu_holds,
    stop_loss,
)
from cvxorder.projcert import (
    AllDominated,
    FailsAt,
    arc_breakpoints,
    certify_all_directions_2d,
    critical_directions,
    kink_vectors_on_arc,
    primitive,
    recheck_certificate,
    sort_by_angle,
    spot_check_directions,
)

from _gen import rand_direction, rand_measure, rand_point, spread_chain

P = lambda *c: tuple(F(x) for x in c)  # noqa: E731


def reference(mu, nu, v):
    return check_convex_order_1d(project(mu, v), project(nu, v))


def test_primitive_and_angle_sort():
    assert primitive((F(2, 3), F(-4, 3))) == P(1, -2)
    assert primitive((0, -5)) == P(0, -1)
    with pytest.raises(ValueError):
        primitive((0, 0))
    dirs = [P(0, -1), P(-1, 0), P(1, 1), P(1, 0), P(-1, -1), P(0, 1)]
    assert sort_by_angle(dirs) == [P(1, 0), P(1, 1), P(0, 1), P(-1, 0), P(-1, -1), P(0, -1)]


def test_critical_direction_examples():
    mu, nu = paper_instance()
    dirs = critical_directions(mu, nu)
    assert len(dirs) <= 42
    assert len(set(dirs)) == len(dirs)
    assert all(tuple(-c for c in d) in dirs for d in dirs)
    assert critical_directions(dirac((0, 0)), dirac((1, 0))) == [P(0, 1), P(0, -1)]
    assert critical_directions(dirac((3, 3)), dirac((3, 3))) == [P(1, 0), P(0, 1), P(-1, 0), P(0, -1)]
    with pytest.raises(MeasureError):
        critical_directions(dirac((0,)), dirac((0,)))


def test_breakpoints_split_half_turns():
    bps = arc_breakpoints([P(0, 1), P(0, -1)])
    assert bps == [P(1, 0), P(0, 1), P(-1, 0), P(0, -1)]


def test_kink_vectors_examples():
    m = uniform([(1, 2), (0, -1), (3, 3)])
    assert all(c == (0, 0) for c in kink_vectors_on_arc(m, m, (1, F(1, 7))))
    mu, nu = dirac((0, 0)), uniform([(-1, 0), (1, 0)])
    # pooled order (-1,0), (0,0), (1,0); c_p = sum over q ahead of p of (nu-mu)(q) (q - p)
    assert kink_vectors_on_arc(mu, nu, (1, F(1, 3))) == [P(0, 0), P(F(1, 2), 0), P(0, 0)]
    with pytest.raises(ValueError):
        kink_vectors_on_arc(mu, nu, (0, 1))


def test_triangle_instance_certified():
    mu, nu = paper_instance()
    cert = certify_all_directions_2d(mu, nu)
    assert cert.overall == AllDominated()
    assert all(a.verified for a in cert.arcs)
    assert all(len(a.kink_vectors) == 7 for a in cert.arcs)
    doc = json.loads(json.dumps(cert.to_dict()))
    assert recheck_certificate(doc, mu, nu)
    # kink vectors agree with direct 1-D evaluation at each arc probe
    for arc in cert.arcs:
        e1, e2 = arc.endpoints
        probe = (e1[0] + e2[0], e1[1] + e2[1])
        assert isinstance(reference(mu, nu, probe), Dominated)


def test_spread_against_mean_fails_at_x_axis():
    mu, nu = uniform([(0, 0), (2, 0)]), dirac((1, 0))
    cert = certify_all_directions_2d(mu, nu)
    assert isinstance(cert.overall, FailsAt)
    assert cert.overall.direction == P(1, 0)
    assert isinstance(reference(mu, nu, cert.overall.direction), NotDominated)
    t = cert.overall.threshold
    assert stop_loss(project(mu, (1, 0)), t) > stop_loss(project(nu, (1, 0)), t)


def test_identical_measures_all_zero_kinks():
    m = uniform([(1, 2), (0, -1), (3, 3)])
    cert = certify_all_directions_2d(m, m)
    assert cert.overall == AllDominated()
    assert all(c == (0, 0) for a in cert.arcs for c in a.kink_vectors)


def test_barycenter_mismatch_fails_immediately():
    mu, nu = dirac((0, 0)), dirac((1, 2))
    cert = certify_all_directions_2d(mu, nu)
    v, t = cert.overall.direction, cert.overall.threshold
    assert stop_loss(project(mu, v), t) > stop_loss(project(nu, v), t)


def test_recheck_rejects_tampering():
    mu, nu = paper_instance()
    doc = certify_all_directions_2d(mu, nu).to_dict()
    doc["arcs"][0]["kink_vectors"][0] = ["5", "5"]
    assert not recheck_certificate(doc, mu, nu)
    doc = certify_all_directions_2d(mu, nu).to_dict()
    del doc["arcs"][3]
    assert not recheck_certificate(doc, mu, nu)
    doc = certify_all_directions_2d(nu, mu).to_dict()
    assert not recheck_certificate(doc, nu, mu)


def test_spot_check_examples():
    mu, nu = paper_instance()
    cert = certify_all_directions_2d(mu, nu)
    probes = [(a.endpoints[0][0] + a.endpoints[1][0], a.endpoints[0][1] + a.endpoints[1][1]) for a in cert.arcs]
    results = spot_check_directions(mu, nu, list(cert.critical_directions) + probes)
    assert all(isinstance(v, Dominated) for _, v in results)
    m = uniform([(1, 2), (0, -1)])
    rng = random.Random(3)
    assert all(isinstance(v, Dominated) for _, v in spot_check_directions(m, m, [rand_direction(rng) for _ in range(50)]))
    with pytest.raises(ValueError):
        spot_check_directions(mu, nu, [(0, 0)])


def test_spot_check_reversed_pair():
    mu, nu = paper_instance()
    cert = certify_all_directions_2d(nu, mu)
    assert isinstance(cert.overall, FailsAt)
    (_, v), = spot_check_directions(nu, mu, [cert.overall.direction])
    assert isinstance(v, NotDominated) and v.threshold == cert.overall.threshold


def test_spot_check_big_numbers_use_exact_python_ints():
    big = F(10**15 + 1, 7)
    mu = uniform([(big, -big), (0, 1)])
    nu = spread_chain(random.Random(1), mu, 2)
    dirs = [(F(10**6 + 3, 11), F(-(10**6), 13)), (1, 2)]
    got = spot_check_directions(mu, nu, dirs)
    assert [v for _, v in got] == [reference(mu, nu, d) for d in dirs]


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_spot_check_matches_reference(seed):
    rng = random.Random(seed)
    mu = rand_measure(rng, 2, rng.randint(1, 4))
    r = rng.random()
    if r < 0.4:
        nu = spread_chain(rng, mu, 2)
    elif r < 0.7:
        nu = rand_measure(rng, 2, rng.randint(1, 4))
    else:
        mu, nu = spread_chain(rng, mu, 2), mu
    dirs = [rand_direction(rng) for _ in range(8)]
    for d, verdict in spot_check_directions(mu, nu, dirs):
        assert verdict == reference(mu, nu, d)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_triangles_certify_and_match_popoviciu(seed):
    rng = random.Random(seed)
    x, y, z = (rand_point(rng, 2) for _ in range(3))
    mu, nu = triangle_instance(x, y, z)
    assert certify_all_directions_2d(mu, nu).overall == AllDominated()
    for _ in range(5):
        v = rand_direction(rng)
        r, s, t = dot(v, x), dot(v, y), dot(v, z)
        assert isinstance(reference(mu, nu, v), Dominated) == popoviciu_holds(r, s, t)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_antipodal_symmetry_and_kink_linearity(seed):
    rng = random.Random(seed)
    mu = rand_measure(rng, 2, rng.randint(1, 4))
    nu = spread_chain(rng, mu, 2) if rng.random() < 0.5 else rand_measure(rng, 2, 3)
    v = rand_direction(rng)
    assert type(reference(mu, nu, v)) is type(reference(mu, nu, tuple(-c for c in v)))

    cert = certify_all_directions_2d(mu, nu)
    arc = cert.arcs[rng.randrange(len(cert.arcs))] if cert.arcs else None
    if arc is None:
        return
    e1, e2 = arc.endpoints
    pooled = sorted(set(mu.points) | set(nu.points))
    for a, b in ((1, 1), (1, 3), (5, 2)):
        probe = (a * e1[0] + b * e2[0], a * e1[1] + b * e2[1])
        kinks = kink_vectors_on_arc(mu, nu, probe)
        assert kinks == list(arc.kink_vectors)
        mv, nv = project(mu, probe), project(nu, probe)
        for p, c in zip(pooled, kinks):
            t = dot(p, probe)
            assert stop_loss(nv, t) - stop_loss(mv, t) == dot(c, probe)


def test_critical_directions_cover_all_pairs():
    mu = normalize([((0, 0), F(1, 2)), ((1, 2), F(1, 2))])
    nu = uniform([(F(1, 2), 1), (-1, 3)])
    dirs = set(critical_directions(mu, nu))
    pts = sorted(set(mu.points) | set(nu.points))
    for i, p in enumerate(pts):
        for q in pts[i + 1:]:
            n = primitive((-(q[1] - p[1]), q[0] - p[0]))
            assert n in dirs and tuple(-c for c in n) in dirs


def test_mean_mismatch_in_spot_check():
    (_, v), = spot_check_directions(dirac((0, 0)), dirac((1, 1)), [(1, 0)])
    assert v == MeanMismatch(F(0), F(1))
