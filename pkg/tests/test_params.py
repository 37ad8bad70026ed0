"""Parameter-set validation, classification, and symmetry helpers."""

import math

import pytest

from wanderlines.params import (
    DomainEdges,
    Negative,
    NonMonotone,
    ParamSet,
    normalize_to_pos,
    validate,
)


def test_sequences_must_be_weakly_decreasing():
    with pytest.raises(NonMonotone):
        validate(a_plus=(1.0, 2.0))


def test_entries_must_be_nonnegative():
    with pytest.raises(Negative):
        validate(b_plus=(-0.5,))
    with pytest.raises(Negative):
        validate(c_plus=-1.0)


def test_class_detection():
    assert ParamSet().is_positive_class()
    assert ParamSet(a_plus=(2.0, 1.0), b_plus=(1.0,)).is_positive_class()
    p = ParamSet(a_minus=(0.5,))
    assert not p.is_positive_class()
    assert p.is_finite_class()
    assert ParamSet(c_minus=1.0).klass == "general"


def test_domain_edges_positive_class():
    edges = ParamSet(a_plus=(2.0, 1.0), b_plus=(1.0,)).domain_edges()
    assert edges == DomainEdges(0.5, -1.0)
    empty = ParamSet().domain_edges()
    assert empty.underline_a == math.inf and empty.underline_b == -math.inf


def test_domain_edges_collapse_with_minus_entries():
    edges = ParamSet(a_minus=(0.5,)).domain_edges()
    assert edges.underline_a == 0.0 and edges.underline_b == 0.0


def test_reflected_swaps_roles():
    p = ParamSet(a_plus=(2.0,), b_plus=(1.0, 0.5), c_plus=0.3)
    r = p.reflected()
    assert r.a_plus == (1.0, 0.5) and r.b_plus == (2.0,)
    assert r.reflected() == p


def test_translated_adds_to_c_plus():
    p = ParamSet(a_plus=(1.0,), c_plus=0.2).translated(0.5)
    assert p.c_plus == pytest.approx(0.7)
    assert p.a_plus == (1.0,)


def test_dict_round_trip():
    p = ParamSet(a_plus=(2.0, 1.0), b_minus=(0.25,), c_plus=0.1)
    assert ParamSet.from_dict(p.to_dict()) == p
    assert ParamSet.from_json(p.to_json()) == p


def test_support_indices_ignore_trailing_zeros():
    s = ParamSet(a_plus=(2.0, 1.0, 0.0)).support_indices()
    assert s.J_a_plus == 2


def test_normalize_to_pos_maps_finite_class():
    p_pos, delta = normalize_to_pos(ParamSet(a_minus=(0.5,)))
    assert p_pos.is_positive_class()
    assert p_pos.a_plus == (4.0,) and p_pos.b_plus == (4.0,)
    assert delta == pytest.approx(0.25)
    p_pos2, _ = normalize_to_pos(ParamSet(a_plus=(1.0,), a_minus=(0.5,)))
    assert p_pos2.is_positive_class()
    assert len(p_pos2.a_plus) == 2
