"""
Tests for the sparse graded linear algebra layer
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from DGMorse.ainfty import invert_map
from DGMorse.algebra import (GradedMap, GradedSpace, compose, format_key, format_scalar, identity, join_keys, sign,
                             split_key, tensor_many, tensor_maps, tensor_product, tensor_spaces, to_scalar)
from DGMorse.dense_oracle import dense_compose
from DGMorse.exceptions import CompositionError, DegreeMismatchError, InversionError, SchemaError
from DGMorse.linalg import EchelonBasis, kernel_basis, rank, solve
from DGMorse.random_fixtures import instance_rngs, random_complex, random_map


def two_degree_space():
    return GradedSpace.build({0: ["a"], 1: ["b"]})


def test_to_scalar_accepts_integers_and_ratios():
    assert to_scalar(3) == Fraction(3)
    assert to_scalar("-2/4") == Fraction(-1, 2)
    assert to_scalar(" 7 ") == Fraction(7)


@pytest.mark.parametrize("bad", ["1.5", "abc", True, 0.5, "1/0"])
def test_to_scalar_rejects_everything_else(bad):
    with pytest.raises(SchemaError):
        to_scalar(bad)


def test_repeated_labels_are_rejected():
    with pytest.raises(SchemaError):
        GradedSpace.build({0: ["a", "a"]})


def test_map_entry_in_wrong_degree_is_rejected():
    V = two_degree_space()
    with pytest.raises(DegreeMismatchError):
        GradedMap(V, V, 0, {(0, "a"): {(1, "b"): 1}})


def test_compose_requires_matching_spaces():
    V = two_degree_space()
    W = GradedSpace.build({0: ["c"]})
    with pytest.raises(CompositionError):
        compose(identity(V), identity(W))


def test_tensor_keys_split_and_join():
    V = two_degree_space()
    VVV = tensor_product(V, V, V)
    key = VVV.keys(2)[0]
    parts = split_key(key, [1, 2])
    assert parts[0][0] + parts[1][0] == 2
    assert join_keys(parts, [1, 2]) == key
    assert format_key(key).count("⊗") == 2


def test_tensor_product_of_maps_uses_koszul_sign():
    V = two_degree_space()
    f = GradedMap(V, V, 1, {(0, "a"): {(1, "b"): 1}})
    one = identity(V)

    # f passes over b (degree 1) before acting on a
    b_a = (1, ((1, "b"), (0, "a")))
    b_b = (2, ((1, "b"), (1, "b")))
    assert tensor_many([one, f]).column(b_a) == {b_b: Fraction(-1)}

    a_a = (0, ((0, "a"), (0, "a")))
    b_a_target = (1, ((1, "b"), (0, "a")))
    assert tensor_many([f, one]).column(a_a) == {b_a_target: Fraction(1)}


def test_block_reads_dense_matrix():
    V = GradedSpace.build({0: ["a", "b"]})
    f = GradedMap(V, V, 0, {(0, "a"): {(0, "b"): 2}, (0, "b"): {(0, "a"): "1/3"}})
    assert f.block(0) == [[0, Fraction(1, 3)], [2, 0]]


def test_singular_map_cannot_be_inverted():
    V = GradedSpace.build({0: ["a", "b"]})
    f = GradedMap(V, V, 0, {(0, "a"): {(0, "a"): 1}, (0, "b"): {(0, "a"): 1}})
    with pytest.raises(InversionError):
        invert_map(f)


def test_rank_and_kernel():
    vectors = [{"x": Fraction(1), "y": Fraction(1)}, {"x": Fraction(2), "y": Fraction(2)}, {"y": Fraction(1)}]
    assert rank(vectors) == 2
    kernel = kernel_basis(list(enumerate(vectors)))
    assert len(kernel) == 1


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_random_complexes_square_to_zero(seed):
    rng = instance_rngs(seed, 1)[0]
    C = random_complex(rng)
    assert compose(C.d, C.d).is_zero()
    assert C.space.dim() > 0


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_sparse_composition_matches_dense_products(seed):
    rng = instance_rngs(seed, 1)[0]
    V = random_complex(rng, degrees=(0, 1, 2), max_dim=3).space
    f = random_map(rng, V, V, -1)
    g = random_map(rng, V, V, -1)
    assert compose(g, f) == dense_compose(g, f)


def test_empty_degree_slots_do_not_affect_equality():
    padded = GradedSpace.build({0: ["a"], 1: []}, degrees=[-1, 2])
    plain = GradedSpace.build({0: ["a"]})
    assert padded == plain
    assert hash(padded) == hash(plain)
    assert padded.dims() == {-1: 0, 0: 1, 1: 0, 2: 0}
    assert padded != GradedSpace.build({1: ["a"]})


def test_tensor_spaces_flatten_and_multiply_dimensions():
    V = two_degree_space()
    W = GradedSpace.build({0: ["x", "y"]})
    VW = tensor_spaces(V, W)
    assert VW.arity == 2
    assert VW.dims() == {0: 2, 1: 2}
    assert tensor_spaces(VW, V) == tensor_product(V, W, V)


@settings(max_examples=40)
@given(value=st.fractions())
def test_scalars_survive_printing_and_parsing(value):
    assert to_scalar(format_scalar(value)) == value


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_tensor_maps_interchange_with_koszul_sign(seed):
    rng = instance_rngs(seed, 1)[0]
    V = random_complex(rng, degrees=(0, 1, 2), max_dim=2).space
    W = random_complex(rng, degrees=(-1, 0, 1), max_dim=2, prefix="w").space
    df, dg, df2, dg2 = (int(rng.integers(-1, 2)) for _ in range(4))
    f, f2 = random_map(rng, V, V, df), random_map(rng, V, V, df2)
    g, g2 = random_map(rng, W, W, dg), random_map(rng, W, W, dg2)
    left = compose(tensor_maps(f, g), tensor_maps(f2, g2))
    right = tensor_maps(compose(f, f2), compose(g, g2)).scale(sign(dg * df2))
    assert left == right


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_composition_is_associative(seed):
    rng = instance_rngs(seed, 1)[0]
    U = random_complex(rng, degrees=(0, 1), max_dim=3, prefix="u").space
    V = random_complex(rng, degrees=(0, 1, 2), max_dim=3).space
    W = random_complex(rng, degrees=(0, 1, 2), max_dim=2, prefix="w").space
    h = random_map(rng, U, V, 1)
    g = random_map(rng, V, W, 0)
    f = random_map(rng, W, U, -1)
    assert compose(f, compose(g, h)) == compose(compose(f, g), h)


def test_echelon_membership_and_solve():
    generators = [("a", {"x": Fraction(1), "y": Fraction(1)}), ("b", {"y": Fraction(1)})]
    basis = EchelonBasis()
    for tag, vector in generators:
        basis.add(vector, tag)
    assert basis.contains({"x": Fraction(3)})
    assert not basis.contains({"z": Fraction(1)})
    assert solve(generators, {"x": Fraction(2), "y": Fraction(3)}) == {"a": Fraction(2), "b": Fraction(1)}
    assert solve(generators, {"z": Fraction(1)}) is None
