"""
Tests for chain complexes, homology and retracts
"""

from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from DGMorse.algebra import GradedMap, GradedSpace, compose, identity
from DGMorse.complexes import (ChainComplex, ShiftedChainMap, homology, induced_on_homology, retract_to_homology,
                               shift, verify_chain_map, verify_complex, verify_retract)
from DGMorse.config import ProfiledConfig
from DGMorse.dense_oracle import check_homology, dense_homology_dims
from DGMorse.exceptions import ComplexError, DegreeMismatchError
from DGMorse.fixture_reader import load_fixture
from DGMorse.random_fixtures import gauge_retract, instance_rngs, random_complex
from DGMorse.reports import is_pass

FIXTURES = Path(__file__).parent / "fixtures"


def test_interval_is_contractible():
    C = load_fixture(FIXTURES / "interval.json", "complex")
    assert homology(C).dims() == {0: 1, 1: 0}
    assert C.euler_characteristic() == 1


def test_circle_cells_have_two_classes():
    C = load_fixture(FIXTURES / "circle_cells.json", "complex")
    H = homology(C)
    assert H.dims() == {0: 1, 1: 1}
    assert H.representatives[(1, "H1.0")] == {(1, "e"): Fraction(1)}


def test_nonzero_square_is_rejected_with_witness():
    space = GradedSpace.build({0: ["a"], 1: ["b"], 2: ["c"]})
    d = GradedMap(space, space, -1, {(2, "c"): {(1, "b"): 1}, (1, "b"): {(0, "a"): 1}})
    with pytest.raises(ComplexError) as info:
        ChainComplex(space, d)
    assert info.value.witness["degree"] == 2


def test_differential_must_lower_degree():
    space = GradedSpace.build({0: ["a"]})
    with pytest.raises(DegreeMismatchError):
        ChainComplex(space, identity(space))


def test_shift_negates_the_differential():
    C = load_fixture(FIXTURES / "interval.json", "complex")
    S = shift(C, 1)
    assert S.space.dims() == {1: 2, 2: 1}
    assert S.d.column((2, "e")) == {(1, "b"): Fraction(-1), (1, "a"): Fraction(1)}
    assert is_pass(verify_complex(S))


def test_chain_map_with_shift_follows_sign_rule():
    C = load_fixture(FIXTURES / "interval.json", "complex")
    S = shift(C, 1)
    suspension = GradedMap(C.space, S.space, 1, {key: {(key[0] + 1, key[1]): 1} for key in C.space})
    assert is_pass(verify_chain_map(ShiftedChainMap(C, S, suspension)))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_retract_to_homology_satisfies_side_conditions(seed):
    C = random_complex(instance_rngs(seed, 1)[0], degrees=range(-1, 6), max_dim=6)
    R = retract_to_homology(C)
    assert is_pass(verify_retract(R))
    assert R.small.space.dims() == dense_homology_dims(C)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_homology_agrees_with_dense_oracle(seed):
    C = random_complex(instance_rngs(seed, 1)[0], degrees=(0, 1, 2, 3))
    assert is_pass(check_homology(C, homology(C).dims()))


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_gauge_retract_induces_identity_on_homology(seed):
    rng = instance_rngs(seed, 1)[0]
    C = random_complex(rng)
    G = gauge_retract(rng, C)
    assert is_pass(verify_retract(G, side_conditions=False))
    R = retract_to_homology(C)
    assert induced_on_homology(G.i.map, R, R) == identity(R.small.space)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_acceptance_profile_draws_from_its_degree_range(seed):
    config = ProfiledConfig.acceptance()
    C = random_complex(instance_rngs(seed, 1)[0], config.sweep_degrees, config.sweep_max_dim)
    assert C.space.degrees == config.sweep_degrees
    assert max(C.space.dims().values()) <= config.sweep_max_dim
    assert compose(C.d, C.d).is_zero()
    assert is_pass(verify_complex(C))
    assert is_pass(check_homology(C, homology(C).dims()))


def test_acceptance_profile_reaches_outside_the_default_degrees():
    config = ProfiledConfig.acceptance()
    used = set()
    for rng in instance_rngs(5, 20):
        C = random_complex(rng, config.sweep_degrees, config.sweep_max_dim)
        used |= {q for q, n in C.space.dims().items() if n}
    assert min(used) < 0
    assert max(used) > 2
