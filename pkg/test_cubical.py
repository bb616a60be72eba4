"""
Tests for cubical sets, their normalized chains and the Serre diagonal
"""

from fractions import Fraction
from pathlib import Path

import pytest

from DGMorse.complexes import homology
from DGMorse.cubical import (CubicalChain, CubicalSet, boundary, chain_complex, circle, cross_product,
                             cube_diagonal, product_set, serre_diagonal, standard_cube, verify_cubical)
from DGMorse.exceptions import SchemaError
from DGMorse.fixture_reader import FixtureReader
from DGMorse.reports import failed_checks, is_pass

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def reader():
    return FixtureReader(FIXTURES)


@pytest.mark.parametrize("name", ["cube2.json", "cube3.json", "circle.json", "torus.json"])
def test_shipped_cubical_sets_verify(reader, name):
    _, X = reader.read(name, "cubical_set")
    report = verify_cubical(X)
    assert is_pass(report), failed_checks(report["checks"])


def test_interval_boundary_and_diagonal():
    I = standard_cube(1)
    assert boundary(CubicalChain.cube(I, "1:t1")) == CubicalChain(I, 0, {"0:1": 1, "0:0": -1})
    assert cube_diagonal(I, "1:t1") == [(1, "0:0", "1:t1"), (1, "1:t1", "0:1")]


def test_square_boundary_signs():
    I2 = standard_cube(2)
    expected = CubicalChain(I2, 1, {"1:1,t1": 1, "1:0,t1": -1, "1:t1,1": -1, "1:t1,0": 1})
    assert boundary(CubicalChain.cube(I2, "2:t1,t2")) == expected


def test_square_diagonal_has_a_signed_middle_term():
    I2 = standard_cube(2)
    assert cube_diagonal(I2, "2:t1,t2") == [
        (1, "0:0,0", "2:t1,t2"),
        (1, "1:t1,0", "1:1,t1"),
        (-1, "1:0,t1", "1:t1,1"),
        (1, "2:t1,t2", "0:1,1"),
    ]


def test_degenerate_cubes_vanish_in_chains():
    I = standard_cube(1, max_dim=2)
    assert I.is_degenerate("1:0")
    assert CubicalChain(I, 1, {"1:0": 3}).is_zero()
    assert chain_complex(I).space.dims() == {0: 2, 1: 1, 2: 0}


def test_circle_and_torus_homology():
    S1 = circle()
    assert homology(chain_complex(S1)).dims() == {0: 1, 1: 1}
    assert serre_diagonal(CubicalChain.cube(S1, "a")) == {("v", "a"): Fraction(1), ("a", "v"): Fraction(1)}
    T = product_set(S1, S1)
    assert homology(chain_complex(T)).dims() == {0: 1, 1: 2, 2: 1}
    square = cross_product(CubicalChain.cube(S1, "a"), CubicalChain.cube(S1, "a"), T)
    assert square.terms == {"a×a": Fraction(1)}
    assert boundary(square).is_zero()


def test_face_counts_are_checked():
    with pytest.raises(SchemaError):
        CubicalSet({0: ["v"], 1: ["e"]}, {"v": [], "e": []})


def test_broken_face_identity_is_reported():
    X = CubicalSet(
        {0: ["p", "q"], 1: ["a", "b", "c", "e"], 2: ["s"]},
        {"p": [], "q": [], "a": [("p", "q")], "b": [("p", "q")], "c": [("p", "q")], "e": [("q", "p")],
         "s": [("a", "b"), ("c", "e")]},
        name="twisted square")
    report = verify_cubical(X)
    assert not is_pass(report)
    assert "cubical_identities" in [c["check"] for c in failed_checks(report["checks"])]
