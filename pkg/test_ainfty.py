"""
Tests for strict DGAs, A∞ modules and morphisms: verification, composition,
inversion and homotopy transfer
"""

import logging
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from DGMorse.ainfty import (AInftyModule, compose_morphisms, homology_roundtrip, homotopy_transfer,
                            identity_morphism, invert_infty_iso, invert_infty_quasi_iso, morphisms_equal, promote,
                            suspend_module, suspend_morphism, verify_ainfty_module, verify_dga, verify_morphism,
                            verify_morphism_strict_form, verify_strict_module, zero_morphism)
from DGMorse.builtins import (acyclic_algebra, conjugation_module, exterior_algebra, free_module, group_algebra,
                              regular_module, tensor_algebra, trivial_module, truncated_polynomial)
from DGMorse.complexes import retract_to_homology, shift
from DGMorse.config import ToolkitConfig
from DGMorse.exceptions import CompositionError, InversionError
from DGMorse.fixture_reader import FixtureReader
from DGMorse.groups import cyclic_group, quaternion_group
from DGMorse.pipeline import VerificationPipeline
from DGMorse.random_fixtures import (instance_rngs, random_complex, random_dga, random_free_module, random_infty_iso,
                                     random_quasi_iso, shifted_free_morphism)
from DGMorse.reports import first_failure, is_pass

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def reader():
    return FixtureReader(FIXTURES, arity_bound=3)


@pytest.fixture(scope="module")
def pipeline():
    return VerificationPipeline(ToolkitConfig(max_arity=4, max_workers=1, log_level=logging.WARNING))


@pytest.mark.parametrize("build", [
    lambda: group_algebra(cyclic_group(2)),
    lambda: group_algebra(cyclic_group(5)),
    lambda: group_algebra(quaternion_group()),
    lambda: truncated_polynomial(2, 4),
    lambda: exterior_algebra(2),
    acyclic_algebra,
    lambda: tensor_algebra(exterior_algebra(1), acyclic_algebra()),
])
def test_builtin_algebras_are_dgas(build):
    assert is_pass(verify_dga(build()))


def test_truncation_kills_the_top_power():
    A = truncated_polynomial(2, 3)
    assert A.space.dims() == {0: 1, 2: 1, 4: 1}
    assert A.multiply({(2, "x"): 1}, {(4, "x^2"): 1}) == {}


@pytest.mark.parametrize("build", [
    lambda: regular_module(group_algebra(cyclic_group(3))),
    lambda: trivial_module(quaternion_group()),
    lambda: conjugation_module(cyclic_group(2), 3, 2),
])
def test_builtin_modules_are_strict_modules(build):
    M = build()
    assert is_pass(verify_strict_module(M))
    assert is_pass(verify_ainfty_module(promote(M, 4)))


def test_fixture_module_over_acyclic_algebra(reader):
    _, M = reader.read("acyclic_regular.json", "module")
    assert is_pass(verify_strict_module(M))


def test_equivariant_swap_passes_and_strict_form_agrees(reader):
    _, f = reader.read("c2_swap.json", "ainfty_morphism")
    assert is_pass(verify_morphism(f))
    assert is_pass(verify_morphism_strict_form(f))


def test_non_equivariant_map_fails_with_witness(reader):
    _, f = reader.read("c2_bad.json", "ainfty_morphism")
    report = verify_morphism(f)
    assert not is_pass(report)
    bad = first_failure(report)
    assert bad["check"] == "N=1"
    assert bad["witness"]["degree"] == 0
    with pytest.raises(InversionError):
        invert_infty_iso(f)


def test_rescaled_action_breaks_associativity_equation():
    M = promote(regular_module(group_algebra(cyclic_group(2))), 3)
    broken = AInftyModule(M.algebra, M.carrier, {1: M.op(1), 2: M.op(2).scale(2)}, 3)
    report = verify_ainfty_module(broken)
    assert not is_pass(report)
    assert first_failure(report)["check"] == "N=3"


def test_composition_requires_equal_arity_bounds():
    M = regular_module(group_algebra(cyclic_group(2)))
    with pytest.raises(CompositionError):
        compose_morphisms(identity_morphism(promote(M, 3)), identity_morphism(promote(M, 4)))


def test_suspension_preserves_validity():
    rng = instance_rngs(3, 1)[0]
    M = promote(free_module(exterior_algebra(1), random_complex(rng)), 3)
    for c in (-1, 1, 2):
        assert is_pass(verify_ainfty_module(suspend_module(M, c)))


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000), index=st.integers(min_value=0, max_value=3))
def test_infty_iso_roundtrip(pipeline, seed, index):
    report = pipeline.iso_instance(index, instance_rngs(seed, 1)[0])
    assert is_pass(report), first_failure(report)


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_inverse_of_a_composite_is_the_reversed_composite(seed):
    rng = instance_rngs(seed, 1)[0]
    A = random_dga(rng)
    M = free_module(A, random_complex(rng))
    f = random_infty_iso(rng, M, 3)
    g = random_infty_iso(rng, M, 3)
    composite = compose_morphisms(g, f)
    expected = compose_morphisms(invert_infty_iso(f), invert_infty_iso(g))
    assert morphisms_equal(invert_infty_iso(composite), expected) is None


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_shifted_isomorphism_inverts(seed):
    rng = instance_rngs(seed, 1)[0]
    A = random_dga(rng)
    V = random_complex(rng)
    f = shifted_free_morphism(A, V, 1, 3)
    g = invert_infty_iso(f)
    assert g.shift == -1
    assert is_pass(verify_morphism(f))
    assert is_pass(verify_morphism(g))
    assert morphisms_equal(compose_morphisms(g, f), identity_morphism(f.source)) is None


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_transferred_structure_is_valid(seed):
    rng = instance_rngs(seed, 1)[0]
    M = random_free_module(rng, random_dga(rng))
    R = retract_to_homology(M.complex)
    small, i, p = homotopy_transfer(M, R, 5)
    assert small.carrier == R.small.space
    assert is_pass(verify_ainfty_module(small))
    assert is_pass(verify_morphism(i))
    assert is_pass(verify_morphism(p))


@settings(max_examples=8, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_quasi_iso_homotopy_inverse(seed):
    rng = instance_rngs(seed, 1)[0]
    instance = random_quasi_iso(rng, random_dga(rng), 3)
    f = instance.morphism
    g = invert_infty_quasi_iso(f, retract_to_homology(instance.source.complex),
                               retract_to_homology(instance.target.complex))
    assert is_pass(verify_morphism(g))
    assert is_pass(homology_roundtrip(f, g))


@settings(max_examples=8, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000), m=st.sampled_from([-1, 1, 2]))
def test_shifted_isomorphism_with_higher_components_inverts(seed, m):
    rng = instance_rngs(seed, 1)[0]
    A = group_algebra(cyclic_group(2))
    V = random_complex(rng)
    twist = random_infty_iso(rng, free_module(A, shift(V, m)), 3)
    f = compose_morphisms(twist, shifted_free_morphism(A, V, m, 3))
    g = invert_infty_iso(f)
    assert g.shift == -m
    assert is_pass(verify_morphism(g)), first_failure(verify_morphism(g))
    assert morphisms_equal(compose_morphisms(g, f), identity_morphism(f.source)) is None
    assert morphisms_equal(compose_morphisms(f, g), identity_morphism(f.target)) is None


def test_quasi_iso_between_wide_complexes_has_homotopy_inverse():
    rng = instance_rngs(11, 1)[0]
    instance = random_quasi_iso(rng, exterior_algebra(1), 3, max_dim=4, degrees=range(-2, 5))
    f = instance.morphism
    assert f.source.carrier != f.target.carrier
    g = invert_infty_quasi_iso(f, retract_to_homology(instance.source.complex),
                               retract_to_homology(instance.target.complex))
    assert g.source.carrier == f.target.carrier
    assert is_pass(verify_morphism(g))
    assert is_pass(homology_roundtrip(f, g))


@pytest.mark.parametrize("c", [-1, 1, 2])
def test_suspended_morphism_is_valid(c):
    rng = instance_rngs(7, 1)[0]
    M = free_module(exterior_algebra(1), random_complex(rng))
    f = random_infty_iso(rng, M, 3)
    source, target = suspend_module(f.source, c), suspend_module(f.target, c)
    suspended = suspend_morphism(f, c, source, target)
    assert is_pass(verify_morphism(suspended))
    one = identity_morphism(f.source)
    assert morphisms_equal(suspend_morphism(one, c, source, source), identity_morphism(source)) is None


def test_zero_morphism_is_valid():
    M = promote(regular_module(group_algebra(cyclic_group(3))), 3)
    N = promote(trivial_module(cyclic_group(3)), 3)
    zero = zero_morphism(M, N)
    assert is_pass(verify_morphism(zero))
    assert zero.is_strict()


@pytest.mark.parametrize("index", [0, 1])
def test_iso_instance_at_the_acceptance_distribution(index):
    config = ToolkitConfig(max_arity=3, max_workers=1, log_level=logging.WARNING,
                           sweep_min_degree=-2, sweep_max_degree=6, sweep_max_dim=5)
    report = VerificationPipeline(config).iso_instance(index, instance_rngs(index, 1)[0])
    assert is_pass(report), first_failure(report)
