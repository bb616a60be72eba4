"""
Tests for the string-topology calculator on spherical space forms
"""

import pytest
from hypothesis import given, settings, strategies as st

from DGMorse.exceptions import SchemaError
from DGMorse.groups import FiniteGroup, cyclic_group, quaternion_group
from DGMorse.reports import is_pass
from DGMorse.sng import (BasedLoopElement, FreeLoopClass, based_coproduct, coproduct_table, left_multiply,
                         lifted_coproduct, loop_basis, morse_cross_check, parse_class, right_multiply,
                         table_frame_rows, verify_sng_properties)


def test_betti_numbers_of_rp3_free_loops():
    basis = loop_basis(cyclic_group(2), 3, 2)
    assert basis.betti.tolist()[:6] == [2, 0, 2, 2, 2, 2]
    assert basis.complete_through == 5


def test_relative_mode_drops_the_base_classes():
    basis = loop_basis(cyclic_group(2), 3, 2, relative=True)
    assert basis.betti.tolist()[:6] == [1, 0, 2, 1, 2, 2]
    assert FreeLoopClass("x", "1", 0) not in basis.classes


def test_quaternion_classes_per_degree():
    basis = loop_basis(quaternion_group(), 3, 1)
    assert basis.betti[0] == 5
    assert basis.betti[2] == 5


def test_coproduct_of_a_level_one_class():
    G = cyclic_group(2)
    c = parse_class("x,[s],1", G)
    rows = table_frame_rows({c: lifted_coproduct(c, G, 3)}, 3)
    assert [(r["left"], r["right"], r["multiplicity"]) for r in rows] == [
        ("x_{[1],0}", "x_{[s],0}", 1),
        ("x_{[s],0}", "x_{[1],0}", 1),
    ]
    assert all(r["degree"] == 2 for r in rows)


def test_class_collapsing_gives_multiplicities():
    G = quaternion_group()
    row = lifted_coproduct(FreeLoopClass("x", "1", 1), G, 3)
    assert row[(FreeLoopClass("x", "i", 0), FreeLoopClass("x", "i", 0))] == 2
    assert sum(row.values()) == len(G)


def test_y_classes_split_into_mixed_pairs():
    G = cyclic_group(3)
    row = lifted_coproduct(FreeLoopClass("y", "1", 1), G, 3)
    kinds = {(a.kind, b.kind) for a, b in row}
    assert kinds == {("x", "y"), ("y", "x")}


def test_relative_table_removes_base_pairs():
    G = cyclic_group(2)
    table = coproduct_table(G, 3, 1, relative=True)
    base = FreeLoopClass("x", "1", 0)
    assert all(base not in pair for row in table.values() for pair in row)


@pytest.mark.parametrize("text", ["x,[s]", "z,[1],0", "x,[q],1"])
def test_malformed_classes_are_rejected(text):
    with pytest.raises(SchemaError):
        parse_class(text, cyclic_group(2))


@pytest.mark.parametrize("n", [2, 4, 1])
def test_sphere_dimension_must_be_odd(n):
    with pytest.raises(SchemaError):
        loop_basis(cyclic_group(2), n, 1)


@pytest.mark.parametrize("build, n", [
    (lambda: cyclic_group(2), 3),
    (lambda: cyclic_group(5), 3),
    (quaternion_group, 3),
    (lambda: cyclic_group(3), 5),
])
def test_coproduct_properties(build, n):
    report = verify_sng_properties(build(), n, 3)
    assert is_pass(report)


def test_morse_and_loop_betti_numbers_agree():
    assert is_pass(morse_cross_check(cyclic_group(2), 3, 2))
    assert is_pass(morse_cross_check(cyclic_group(3), 3, 2))


def test_cross_check_needs_a_cyclic_group():
    with pytest.raises(SchemaError):
        morse_cross_check(quaternion_group(), 3, 1)


@settings(max_examples=30, deadline=None)
@given(g=st.sampled_from(["1", "-1", "i", "-j", "k"]), h=st.sampled_from(["1", "i", "-i", "j", "-k"]),
       k=st.integers(min_value=0, max_value=3))
def test_based_coproduct_is_bi_equivariant(g, h, k):
    G = quaternion_group()
    e = BasedLoopElement.monomial(G, 3, g, k)
    unit = BasedLoopElement.monomial(G, 3, h)
    assert based_coproduct(unit * e) == left_multiply(G, h, based_coproduct(e))
    assert based_coproduct(e * unit) == right_multiply(G, based_coproduct(e), h)


def test_cross_check_finds_the_generator_of_a_reordered_cyclic_group():
    labels = {0: "1", 1: "g", 2: "g^2", 3: "g^3"}
    exponent = {label: k for k, label in labels.items()}
    G = FiniteGroup.from_function(["1", "g^2", "g", "g^3"],
                                  lambda a, b: labels[(exponent[a] + exponent[b]) % 4], "C4")
    report = morse_cross_check(G, 3, 2)
    assert is_pass(report)
    assert report["details"] == morse_cross_check(cyclic_group(4), 3, 2)["details"]
