from fractions import Fraction as F
import random

import pytest
from hypothesis import given, settings, strategies as st

from cvxorder.measure import (
    DiscreteMeasure,
    MeasureError,
    affine_pushforward,
    barycenter,
    dirac,
    dot,
    dumps_measure,
    embed,
    loads_measure,
    normalize,
    paper_instance,
    parse_rational,
    point,
    project,
    triangle_instance,
)

from _gen import rand_measure, rand_point

q = F


def atoms_of(m):
    return {p: w for p, w in m.atoms}


def test_normalize_merges_duplicates():
    m = normalize([((0,), F(1, 2)), ((0,), F(1, 4)), ((1,), F(1, 4))])
    assert atoms_of(m) == {(0,): F(3, 4), (1,): F(1, 4)}


def test_normalize_nu_from_six_atoms():
    c = (q(1, 3), q(1, 3))
    atoms = [(c, F(1, 6))] * 3 + [((0, -1), F(1, 6)), ((-1, 0), F(1, 6)), ((2, 2), F(1, 6))]
    m = normalize(atoms)
    assert len(m) == 4
    assert m.weight_at(c) == F(1, 2)


def test_normalize_rejects_bad_totals():
    with pytest.raises(MeasureError):
        normalize([((0,), 1), ((1,), 1)])
    assert atoms_of(normalize([((0,), 1), ((1,), 1)], rescale=True)) == {(0,): F(1, 2), (1,): F(1, 2)}


@pytest.mark.parametrize("atoms", [
    [],
    [((0,), -1), ((1,), 2)],
    [((0,), F(1, 2)), ((0, 1), F(1, 2))],
    [((0,), 0)],
])
def test_normalize_errors(atoms):
    with pytest.raises(MeasureError):
        normalize(atoms)


def test_zero_weights_dropped():
    m = normalize([((0,), 1), ((5,), 0)])
    assert m.points == [(0,)]


def test_direct_construction_checks_canonical_form():
    with pytest.raises(MeasureError):
        DiscreteMeasure(1, (((F(1),), F(1, 2)), ((F(0),), F(1, 2))))


def test_barycenters():
    assert barycenter(dirac((5, -3))) == (5, -3)
    mu, nu = paper_instance()
    assert barycenter(nu) == (q(1, 3), q(1, 3))
    assert barycenter(mu) == (q(1, 3), q(1, 3))
    # hand sum for nu
    hand = tuple(F(3, 6) * F(1, 3) + F(1, 6) * (a + b + c) for a, b, c in zip((0, -1), (-1, 0), (2, 2)))
    assert barycenter(nu) == hand


def test_reference_instance_atoms():
    mu, nu = paper_instance()
    third = F(1, 3)
    assert atoms_of(mu) == {(q(-1, 2), q(-1, 2)): third, (q(1, 2), q(1)): third, (q(1), q(1, 2)): third}
    assert atoms_of(nu) == {
        (q(1, 3), q(1, 3)): F(1, 2),
        (q(0), q(-1)): F(1, 6),
        (q(-1), q(0)): F(1, 6),
        (q(2), q(2)): F(1, 6),
    }


def test_project_examples():
    mu, nu = paper_instance()
    assert atoms_of(project(mu, (1, 0))) == {(q(-1, 2),): F(1, 3), (q(1, 2),): F(1, 3), (q(1),): F(1, 3)}
    assert atoms_of(project(nu, (1, 1))) == {(q(-1),): F(1, 3), (q(2, 3),): F(1, 2), (q(4),): F(1, 6)}
    assert atoms_of(project(nu, (0, 0))) == {(q(0),): F(1)}
    with pytest.raises(MeasureError):
        project(nu, (1, 0, 0))


def test_triangle_examples():
    mu, nu = triangle_instance((0, 0), (0, 0), (0, 0))
    assert mu == nu == dirac((0, 0))
    mu, nu = triangle_instance((0, 0), (1, 0), (0, 1))
    assert atoms_of(nu) == {
        (q(1, 3), q(1, 3)): F(1, 2), (q(0), q(0)): F(1, 6), (q(1), q(0)): F(1, 6), (q(0), q(1)): F(1, 6)
    }
    with pytest.raises(MeasureError):
        triangle_instance((0,), (1,), (2,))


def test_embed():
    assert embed(dirac((1,)), 3) == dirac((1, 0, 0))
    mu, _ = paper_instance()
    assert embed(mu, 2) == mu
    assert (q(-1, 2), q(-1, 2), q(0), q(0)) in embed(mu, 4).points
    with pytest.raises(MeasureError):
        embed(mu, 1)


def test_affine_pushforward_examples():
    mu, nu = paper_instance()
    assert affine_pushforward(nu, [[1, 0], [0, 1]], [0, 0]) == nu
    assert affine_pushforward(nu, [[2, 3]], [0]) == project(nu, (2, 3))
    assert affine_pushforward(dirac((1, 1)), [[2, 0], [0, 2]], [0, 0]) == dirac((2, 2))
    with pytest.raises(MeasureError):
        affine_pushforward(nu, [[1, 0, 0]], [0])


def test_parse_rational():
    assert parse_rational("-6/4") == F(-3, 2)
    assert parse_rational("7") == 7
    for bad in ["1/0", "1.5", " 1", "1/-2", "", "+1", "1e3"]:
        with pytest.raises(MeasureError):
            parse_rational(bad)


def test_json_round_trip_and_canonical_text():
    _, nu = paper_instance()
    text = dumps_measure(nu)
    assert loads_measure(text) == nu
    assert '"weight": "1/6"' in text
    # non-canonical input order and unreduced fractions
    doc = '{"dim": 1, "atoms": [{"point": ["4/2"], "weight": "2/4"}, {"point": ["0"], "weight": "1/2"}]}'
    m = loads_measure(doc)
    assert dumps_measure(m) == (
        '{\n  "dim": 1,\n  "atoms": [\n    {\n      "point": [\n        "0"\n      ],\n'
        '      "weight": "1/2"\n    },\n    {\n      "point": [\n        "2"\n      ],\n'
        '      "weight": "1/2"\n    }\n  ]\n}\n'
    )


@pytest.mark.parametrize("doc,field", [
    ('{"dim": 1, "atoms": [{"point": ["0"], "weight": "1/0"}]}', "atoms[0].weight"),
    ('{"dim": 1, "atoms": [{"point": ["x"], "weight": "1"}]}', "atoms[0].point[0]"),
    ('{"dim": 2, "atoms": [{"point": ["0"], "weight": "1"}]}', "atoms[0].point"),
    ('{"dim": 1, "atoms": [{"point": ["0"], "weight": "1/2"}]}', "weight"),
    ('{"dim": 0, "atoms": []}', "dim"),
    ('{"dim": 1, "atoms": [{"point": ["0"], "weight": "-1"}, {"point": ["1"], "weight": "2"}]}', "atoms[0].weight"),
])
def test_json_errors_name_the_field(doc, field):
    with pytest.raises(MeasureError, match=field.replace("[", r"\[").replace("]", r"\]")):
        loads_measure(doc)


def test_point_helper():
    assert point("1/2", 3) == (F(1, 2), F(3))


@settings(max_examples=200)
@given(seed=st.integers(0, 10**9), dim=st.integers(1, 3), n=st.integers(1, 6))
def test_projection_properties(seed, dim, n):
    rng = random.Random(seed)
    m = rand_measure(rng, dim, n)
    v = rand_point(rng, dim)
    pm = project(m, v)
    assert barycenter(pm) == (dot(v, barycenter(m)),)
    assert sum(pm.weights) == 1 and all(w > 0 for w in pm.weights)
    assert len(set(pm.points)) == len(pm)
    assert affine_pushforward(m, [v], [0]) == pm
    assert normalize(m.atoms) == m


@settings(max_examples=200)
@given(seed=st.integers(0, 10**9))
def test_triangle_barycenters_agree(seed):
    rng = random.Random(seed)
    x, y, z = (rand_point(rng, 2) for _ in range(3))
    mu, nu = triangle_instance(x, y, z)
    centroid = tuple((a + b + c) / 3 for a, b, c in zip(x, y, z))
    assert barycenter(mu) == barycenter(nu) == centroid
