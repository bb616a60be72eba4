"""
Cross-checks between the sparse engine and the dense expansion
"""

from pathlib import Path

from hypothesis import given, settings, strategies as st

from DGMorse.ainfty import AInftyModule, homotopy_transfer, promote, verify_ainfty_module
from DGMorse.builtins import group_algebra, regular_module
from DGMorse.complexes import retract_to_homology
from DGMorse.dense_oracle import check_morphism, check_structure, dense_homology_dims
from DGMorse.fixture_reader import FixtureReader, load_fixture
from DGMorse.groups import cyclic_group
from DGMorse.random_fixtures import instance_rngs, random_dga, random_free_module, random_infty_iso
from DGMorse.reports import first_failure, is_pass

FIXTURES = Path(__file__).parent / "fixtures"


def test_oracle_agrees_on_a_broken_module():
    M = promote(regular_module(group_algebra(cyclic_group(2))), 3)
    broken = AInftyModule(M.algebra, M.carrier, {1: M.op(1), 2: M.op(2).scale(2)}, 3)
    assert not is_pass(verify_ainfty_module(broken))
    assert is_pass(check_structure(broken))


def test_oracle_agrees_on_a_failing_morphism():
    _, f = FixtureReader(FIXTURES, arity_bound=3).read("c2_bad.json", "ainfty_morphism")
    assert is_pass(check_morphism(f))


def test_dense_homology_of_shipped_complexes():
    assert dense_homology_dims(load_fixture(FIXTURES / "circle_cells.json", "complex")) == {0: 1, 1: 1}
    assert dense_homology_dims(load_fixture(FIXTURES / "interval.json", "complex")) == {0: 1, 1: 0}


@settings(max_examples=8, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_oracle_agrees_on_transferred_structures(seed):
    rng = instance_rngs(seed, 1)[0]
    M = random_free_module(rng, random_dga(rng))
    small, i, _ = homotopy_transfer(M, retract_to_homology(M.complex), 3)
    report = check_structure(small)
    assert is_pass(report), first_failure(report)
    assert is_pass(check_morphism(i))


@settings(max_examples=8, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_oracle_agrees_on_random_isomorphisms(seed):
    rng = instance_rngs(seed, 1)[0]
    M = random_free_module(rng, random_dga(rng))
    report = check_morphism(random_infty_iso(rng, M, 3))
    assert is_pass(report), first_failure(report)
