"""
Tests for finite groups built from names and multiplication tables
"""

from pathlib import Path

import pytest

from DGMorse.exceptions import GroupError
from DGMorse.fixture_reader import FixtureReader
from DGMorse.groups import FiniteGroup, cyclic_group, group_by_name, quaternion_group


def test_cyclic_group_labels_and_orders():
    C4 = cyclic_group(4)
    assert C4.elements == ("1", "g", "g^2", "g^3")
    assert C4.order("g") == 4
    assert C4.order("g^2") == 2
    assert C4.inv("g") == "g^3"
    assert C4.is_abelian()
    assert len(C4.conjugacy_classes()) == 4


def test_quaternion_group_classes():
    Q8 = quaternion_group()
    assert len(Q8) == 8
    assert not Q8.is_abelian()
    assert Q8.mult("i", "j") == "k"
    assert Q8.mult("j", "i") == "-k"
    assert Q8.conjugacy_classes() == [("1",), ("-1",), ("i", "-i"), ("j", "-j"), ("k", "-k")]
    assert Q8.representative("-j") == "j"


@pytest.mark.parametrize("name, order", [("C5", 5), ("Z/3", 3), ("z6", 6), ("Q8", 8), ("Q12", 12)])
def test_group_names(name, order):
    assert len(group_by_name(name)) == order


@pytest.mark.parametrize("name", ["D4", "Q6", "C0", "cyclic"])
def test_unknown_group_names(name):
    with pytest.raises(GroupError):
        group_by_name(name)


def test_table_fixture_builds_c3():
    _, G = FixtureReader(Path(__file__).parent / "fixtures").read("c3_table.json", "group")
    assert G.identity == "e"
    assert G.order("a") == 3
    assert G.power("a", -1) == "b"
    assert len(G.conjugacy_classes()) == 3


def test_tables_must_be_latin_squares():
    with pytest.raises(GroupError):
        FiniteGroup.from_table(["e", "a"], [["e", "a"], ["a", "a"]])


def test_tables_must_name_known_elements():
    with pytest.raises(GroupError):
        FiniteGroup.from_table(["e", "a"], [["e", "a"], ["a", "b"]])


def test_non_associative_loop_is_rejected():
    # a Latin square with identity 0 that is not a group
    rows = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    with pytest.raises(GroupError):
        FiniteGroup([str(n) for n in range(5)], rows, "loop")


def reordered_c4():
    """C4 listed as 1, g^2, g, g^3, so the second element is not a generator"""
    labels = {0: "1", 1: "g", 2: "g^2", 3: "g^3"}
    exponent = {label: k for k, label in labels.items()}
    return FiniteGroup.from_function(["1", "g^2", "g", "g^3"],
                                     lambda a, b: labels[(exponent[a] + exponent[b]) % 4], "C4")


def test_generator_is_searched_not_assumed():
    G = reordered_c4()
    assert G.elements[1] == "g^2"
    assert G.generator() == "g"
    assert G.is_cyclic()
    assert cyclic_group(5).generator() == "g"
    assert cyclic_group(1).generator() == "1"


def test_quaternion_group_has_no_generator():
    Q8 = quaternion_group()
    assert Q8.generator() is None
    assert not Q8.is_cyclic()
