import itertools
import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from efd.structures import (
    FiniteStructure, compose_matrices, decode_matrix, discrete_metric,
    encode_morphism, find_isomorphism, is_homomorphism, structure_from_json,
    structure_to_json, validate_structure)

from helpers import (METRIC, chain_structure, metric_space, random_metric,
                     two_point_pair)

F = Fraction


def test_valid_structures_pass():
    a, b = two_point_pair()
    for s in (a, b, chain_structure(3)):
        report = validate_structure(s)
        assert report.ok, report.defects


def test_metric_defects_are_reported():
    bad = metric_space("a", {(0, 1): F(3)}, 2)  # exceeds sort diameter 2
    report = validate_structure(bad)
    assert not report.ok
    assert any("diameter" in d for d in report.defects)

    asym = FiniteStructure(
        language=METRIC, universes={"M": ("a1", "a2")},
        metric={"M": {("a1", "a2"): F(1), ("a2", "a1"): F(1, 2),
                      ("a1", "a1"): F(0), ("a2", "a2"): F(0)}},
        relations={}, functions={}, constants={})
    report = validate_structure(asym)
    assert any("symmetric" in d for d in report.defects)


def test_triangle_violation_detected():
    bad = metric_space("a", {(0, 1): F(1, 2), (0, 2): F(1, 2), (1, 2): F(2)}, 3)
    report = validate_structure(bad)
    assert not report.ok
    assert any("triangle" in d for d in report.defects)


def test_structure_json_round_trip():
    for s in (two_point_pair()[0], chain_structure(3)):
        data = json.loads(json.dumps(structure_to_json(s)))
        back = structure_from_json(data)
        assert back.language == s.language
        assert back.universes == s.universes
        assert back.metric == s.metric
        assert back.relations == s.relations


def test_structure_json_with_supplied_language():
    s = chain_structure(2)
    data = structure_to_json(s)
    del data["language"]
    back = structure_from_json(data, language=s.language)
    assert back.relations == s.relations


def test_malformed_structure_json():
    with pytest.raises(ValueError):
        structure_from_json({"universes": {}})


# ---------------------------------------------------------------------------
# morphisms and their matrices


def _endomaps(s: FiniteStructure, sort: str):
    ids = s.elems(sort)
    for image in itertools.product(ids, repeat=len(ids)):
        yield {sort: dict(zip(ids, image))}


def _hom_endomaps(s: FiniteStructure, sort: str = "M"):
    return [m for m in _endomaps(s, sort) if is_homomorphism(m, s, s)]


def test_identity_and_constant_maps_are_homomorphisms():
    s = metric_space("a", {(0, 1): F(1), (0, 2): F(1), (1, 2): F(1)}, 3)
    ids = s.elems("M")
    identity = {"M": {x: x for x in ids}}
    collapse = {"M": {x: ids[0] for x in ids}}
    assert is_homomorphism(identity, s, s)
    assert is_homomorphism(collapse, s, s)


def test_expanding_map_is_not_contractive():
    a = metric_space("a", {(0, 1): F(1, 2)}, 2)
    b = metric_space("b", {(0, 1): F(2)}, 2)
    stretch = {"M": {"a1": "b1", "a2": "b2"}}
    assert not is_homomorphism(stretch, a, b)
    squash = {"M": {"b1": "a1", "b2": "a2"}}
    assert is_homomorphism(squash, b, a)


def test_encode_decode_round_trip():
    s = random_metric(random.Random(7), "m", 3)
    for m in _hom_endomaps(s):
        assert decode_matrix(encode_morphism(m, s, s)) == m


def test_matrix_composition_matches_map_composition():
    s = random_metric(random.Random(11), "m", 3)
    homs = _hom_endomaps(s)
    assert homs
    for f in homs:
        for g in homs:
            gf = {"M": {x: g["M"][f["M"][x]] for x in s.elems("M")}}
            lhs = compose_matrices(encode_morphism(f, s, s),
                                   encode_morphism(g, s, s))
            rhs = encode_morphism(gf, s, s)
            assert lhs.entries == rhs.entries


def test_find_isomorphism_on_relabeled_structure():
    s = metric_space("a", {(0, 1): F(1), (0, 2): F(3, 2), (1, 2): F(2)}, 3)
    t = metric_space("b", {(0, 1): F(2), (0, 2): F(3, 2), (1, 2): F(1)}, 3)
    # t is s with the points listed in reverse order
    iso = find_isomorphism(s, t)
    assert iso is not None
    assert iso["M"] == {"a1": "b3", "a2": "b2", "a3": "b1"}


def test_find_isomorphism_absent():
    a, b = two_point_pair()
    assert find_isomorphism(a, b) is None
    assert find_isomorphism(a, metric_space("c", {}, 1)) is None


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_isomorphism_is_symmetric(seed):
    rng = random.Random(seed)
    s = random_metric(rng, "m", 3)
    t = random_metric(rng, "n", 3)
    assert (find_isomorphism(s, t) is None) == (find_isomorphism(t, s) is None)
