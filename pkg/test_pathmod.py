"""
Tests for path modules and coherent chain homotopies
"""

import logging
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from DGMorse.ainfty import morphisms_equal
from DGMorse.algebra import identity
from DGMorse.builtins import free_module, group_algebra, regular_module, truncated_polynomial
from DGMorse.complexes import identity_retract, retract_to_homology, verify_chain_map, verify_retract
from DGMorse.config import ToolkitConfig
from DGMorse.exceptions import FiberError
from DGMorse.fixture_reader import FixtureReader
from DGMorse.groups import cyclic_group
from DGMorse.pathmod import (compose_path, cone_morphism, cone_pair, cone_path_module, cone_retract,
                             identity_path_morphism, invert_path_iso, strict_path_module, transfer_path,
                             verify_path_module, verify_path_morphism, verify_path_pair)
from DGMorse.pipeline import VerificationPipeline
from DGMorse.random_fixtures import instance_rngs, random_complex, random_dga, random_path_iso
from DGMorse.reports import first_failure, is_pass

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def reader():
    return FixtureReader(FIXTURES, arity_bound=3)


@pytest.fixture(scope="module")
def pipeline():
    return VerificationPipeline(ToolkitConfig(max_arity=3, max_workers=1, log_level=logging.WARNING))


@pytest.mark.parametrize("name", ["c2_strict_path.json", "c2_cone.json"])
def test_shipped_path_modules_verify(reader, name):
    _, E = reader.read(name, "path_module")
    assert is_pass(verify_path_module(E))
    assert is_pass(verify_path_morphism(identity_path_morphism(E)))


def test_cone_identity_fixture(reader):
    _, h = reader.read("c2_cone_identity.json", "path_morphism")
    assert is_pass(verify_path_morphism(h))


@pytest.mark.parametrize("build", [
    lambda: group_algebra(cyclic_group(2)),
    lambda: truncated_polynomial(2, 3),
])
def test_cone_pair_is_a_path_pair(build):
    pair, _ = cone_pair(build())
    assert is_pass(verify_path_pair(pair))


def test_cone_total_is_acyclic_but_fiber_is_not():
    E = cone_path_module(regular_module(group_algebra(cyclic_group(2))), 3)
    R = retract_to_homology(E.complex, E.fiber_keys)
    assert is_pass(verify_retract(R))
    assert R.small.space.dims() == {0: 2, 1: 2}
    assert len(R.small_fiber) == 2
    assert is_pass(verify_retract(R.fiber_retract()))


def test_cone_fiber_equals_the_module_carrier():
    M = regular_module(group_algebra(cyclic_group(2)))
    E = cone_path_module(M, 3)
    assert E.fiber == M.space
    assert E.fiber_module().carrier == M.space


def test_cone_of_the_identity_is_the_identity():
    M = regular_module(group_algebra(cyclic_group(3)))
    E = cone_path_module(M, 3)
    eta = cone_morphism(identity(M.space), E, E)
    assert is_pass(verify_chain_map(eta.eta_1))
    assert is_pass(verify_path_morphism(eta))
    assert morphisms_equal(eta, identity_path_morphism(E)) is None


def test_transfer_of_cone_module_is_valid():
    E = cone_path_module(regular_module(group_algebra(cyclic_group(3))), 3)
    small, i, p = transfer_path(E, retract_to_homology(E.complex, E.fiber_keys))
    assert is_pass(verify_path_module(small))
    assert is_pass(verify_path_morphism(i))
    assert is_pass(verify_path_morphism(p))


def test_identity_retract_reproduces_the_structure():
    E = strict_path_module(regular_module(group_algebra(cyclic_group(2))), 3)
    small, i, _ = transfer_path(E, identity_retract(E.complex))
    assert (small.op(2) - E.op(2)).is_zero()
    assert small.op(3).is_zero()
    assert morphisms_equal(i, identity_path_morphism(E)) is None


def test_transfer_rejects_a_retract_ignoring_the_fiber():
    rng = instance_rngs(11, 1)[0]
    A = truncated_polynomial(2, 3)
    E = cone_path_module(free_module(A, random_complex(rng)), 3)
    with pytest.raises(FiberError):
        transfer_path(E, retract_to_homology(E.complex))


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_cone_retract_restricts_to_fibers(seed):
    rng = instance_rngs(seed, 1)[0]
    M = free_module(random_dga(rng), random_complex(rng))
    R = cone_retract(retract_to_homology(M.complex))
    assert is_pass(verify_retract(R))
    assert is_pass(verify_retract(R.fiber_retract()))


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_path_iso_roundtrip(seed):
    rng = instance_rngs(seed, 1)[0]
    E = cone_path_module(free_module(random_dga(rng), random_complex(rng)), 3)
    h = random_path_iso(rng, E)
    g = invert_path_iso(h)
    assert is_pass(verify_path_morphism(h))
    assert is_pass(verify_path_morphism(g))
    assert morphisms_equal(compose_path(g, h), identity_path_morphism(E)) is None
    assert morphisms_equal(compose_path(h, g), identity_path_morphism(E)) is None


@settings(max_examples=8, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_path_quasi_inverse_sweep_instance(pipeline, seed):
    report = pipeline.path_instance(0, instance_rngs(seed, 1)[0])
    assert is_pass(report), first_failure(report)
