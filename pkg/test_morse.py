"""
Tests for twisting cocycles, enriched Morse complexes, induced maps and the
critical-index spectral sequence
"""

from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from DGMorse.algebra import identity
from DGMorse.builtins import conjugation_module, group_algebra, lens_cocycle, regular_module, trivial_module
from DGMorse.complexes import homology
from DGMorse.dense_oracle import check_homology, dense_homology_dims
from DGMorse.exceptions import ArityBoundError, ComplexError, DegreeMismatchError, SchemaError
from DGMorse.fixture_reader import FixtureReader
from DGMorse.groups import cyclic_group
from DGMorse.morse import (CriticalSet, TwistingCocycle, build_enriched, check_functoriality, induce_morphism,
                           required_arity, spectral_sequence, verify_enriched, verify_induced,
                           verify_spectral_sequence, verify_twisting_cocycle, zero_cocycle)
from DGMorse.random_fixtures import instance_rngs, random_infty_iso
from DGMorse.reports import first_failure, is_pass

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def reader():
    return FixtureReader(FIXTURES)


def test_shipped_cocycle_matches_builtin(reader):
    _, T = reader.read("lens2_cocycle.json", "twisting_cocycle")
    assert is_pass(verify_twisting_cocycle(T))
    assert T == lens_cocycle(cyclic_group(2), 3)


def test_mutated_cocycle_fails_at_first_composite_pair(reader):
    _, T = reader.read("lens2_mutated.json", "twisting_cocycle")
    report = verify_twisting_cocycle(T)
    assert not is_pass(report)
    assert report["witness"]["pair"] == ["x2", "x0"]
    assert report["witness"]["degree"] == 0


def test_mutated_cocycle_gives_no_complex(reader):
    with pytest.raises(ComplexError):
        reader.read("lens2_mutated_enriched.json", "enriched")


def test_cocycle_entries_must_have_the_right_degree():
    A = group_algebra(cyclic_group(2))
    crit = CriticalSet({"x0": 0, "x2": 2})
    with pytest.raises(DegreeMismatchError):
        TwistingCocycle(A, crit, {("x2", "x0"): {(0, "1"): 1}})


@pytest.mark.parametrize("name", ["lens3_regular.json", "lens3_trivial.json"])
def test_lens_space_homology(reader, name):
    _, E = reader.read(name, "enriched")
    assert is_pass(verify_enriched(E))
    assert homology(E.complex).dims() == {0: 1, 1: 0, 2: 0, 3: 1}
    assert is_pass(check_homology(E.complex, {0: 1, 1: 0, 2: 0, 3: 1}))


@pytest.mark.parametrize("fiber", ["regular", "trivial"])
@pytest.mark.parametrize("order", [2, 3, 5])
def test_lens_space_homology_for_several_orders(order, fiber):
    G = cyclic_group(order)
    M = regular_module(group_algebra(G)) if fiber == "regular" else trivial_module(G)
    T = lens_cocycle(G, 3)
    assert is_pass(verify_twisting_cocycle(T))
    E = build_enriched(M, T)
    assert is_pass(verify_enriched(E))
    expected = {0: 1, 1: 0, 2: 0, 3: 1}
    assert homology(E.complex).dims() == expected
    assert dense_homology_dims(E.complex) == expected


def test_zero_cocycle_gives_the_untwisted_product():
    M = regular_module(group_algebra(cyclic_group(2)))
    crit = CriticalSet({"a": 0, "b": 1})
    E = build_enriched(M, zero_cocycle(M.algebra, crit))
    assert homology(E.complex).dims() == {0: 2, 1: 2}


def test_spectral_sequence_of_rp3_with_conjugation_fiber(reader):
    _, E = reader.read("lens2.json", "enriched")
    pages = spectral_sequence(E, 3)
    assert is_pass(verify_spectral_sequence(pages))
    for q in (0, 2, 4, 6, 8):
        assert [pages.dim(1, p, q) for p in range(4)] == [2, 2, 2, 2]
        assert [pages.dim(2, p, q) for p in range(4)] == [2, 0, 0, 2]
        assert pages.dim(2, 0, q + 1) == 0
    assert pages.differentials_vanish(2)
    assert [pages.homology_dims[n] for n in range(6)] == [2, 0, 2, 2, 2, 2]
    assert pages.table(2).loc[4, 3] == 2


def test_spectral_sequence_with_trivial_fiber(reader):
    _, E = reader.read("lens3_trivial.json", "enriched")
    pages = spectral_sequence(E, 2)
    assert [pages.dim(2, p, 0) for p in range(4)] == [1, 0, 0, 1]
    assert pages.infinity_totals() == {0: 1, 3: 1}


def test_negative_page_is_rejected(reader):
    _, E = reader.read("lens3_trivial.json", "enriched")
    with pytest.raises(SchemaError):
        spectral_sequence(E, -1)


def test_identity_induces_identity(reader):
    _, E = reader.read("lens2.json", "enriched")
    _, eta = reader.read("c2_conj_identity.json", "ainfty_morphism")
    assert required_arity(E.cocycle) == 4
    induced = induce_morphism(eta, E, E)
    assert (induced.map - identity(E.space)).is_zero()
    assert is_pass(verify_induced(eta, E, E))


def test_small_arity_bound_is_rejected():
    reader = FixtureReader(FIXTURES, arity_bound=3)
    _, E = reader.read("lens2.json", "enriched")
    _, eta = reader.read("c2_conj_identity.json", "ainfty_morphism")
    with pytest.raises(ArityBoundError) as info:
        induce_morphism(eta, E, E)
    assert info.value.witness == {"required": 4, "arity_bound": 3}


@settings(max_examples=4, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_induced_maps_are_functorial(seed):
    rng = instance_rngs(seed, 1)[0]
    M = conjugation_module(cyclic_group(2), 2, 2)
    E = build_enriched(M, lens_cocycle(cyclic_group(2), 2))
    K = required_arity(E.cocycle)
    eta = random_infty_iso(rng, M, K)
    zeta = random_infty_iso(rng, M, K)
    assert is_pass(verify_induced(eta, E, E)), first_failure(verify_induced(eta, E, E))
    assert is_pass(check_functoriality(eta, zeta, E, E, E))
