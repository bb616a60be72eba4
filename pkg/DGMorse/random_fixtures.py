"""
Seeded random instances for property sweeps.

Every sweep instance gets its own numpy Generator spawned from one
SeedSequence, so results do not depend on the order in which worker threads
pick instances up.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from .algebra import GradedMap, GradedSpace, Key, compose, identity
from .ainfty import (AInftyMorphism, DGAlgebra, StrictModule, compose_morphisms, homotopy_transfer,
                     invert_map, promote)
from .builtins import (acyclic_algebra, direct_sum_complex, exterior_algebra, free_module, group_algebra,
                       tensor_algebra, truncated_polynomial)
from .complexes import ChainComplex, HomotopyRetract, ShiftedChainMap, shift
from .exceptions import InversionError, RetractError
from .groups import cyclic_group
from .pathmod import PathModule, PathMorphism, compose_path, cone_morphism, cone_path_module, transfer_path

logger = logging.getLogger(__name__)

MAX_GAUGE_ATTEMPTS = 20


def instance_rngs(seed: int, count: int) -> List[np.random.Generator]:
    """One independent generator per sweep instance"""
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(count)]


def random_scalar(rng: np.random.Generator, low: int = -2, high: int = 2, nonzero: bool = False) -> Fraction:
    while True:
        value = int(rng.integers(low, high + 1))
        if value or not nonzero:
            return Fraction(value)


def random_map(rng: np.random.Generator, source: GradedSpace, target: GradedSpace, degree: int,
               density: float = 0.5, fiber: Optional[Iterable[Key]] = None) -> GradedMap:
    """
    Sparse random map of the given degree. With a fiber key set, columns of
    fiber keys only hit fiber keys.
    """
    fiber = frozenset(fiber) if fiber is not None else None
    columns = {}
    for key in source:
        targets = target.keys(key[0] + degree)
        if fiber is not None and key in fiber:
            targets = [t for t in targets if t in fiber]
        column = {}
        for t in targets:
            if rng.random() < density:
                c = random_scalar(rng, nonzero=True)
                column[t] = c
        if column:
            columns[key] = column
    return GradedMap(source, target, degree, columns, check=False)


def random_dga(rng: np.random.Generator) -> DGAlgebra:
    """A small algebra from the built-in catalog, sometimes tensored with a second one"""
    catalog = [
        lambda: group_algebra(cyclic_group(2)),
        lambda: group_algebra(cyclic_group(3)),
        lambda: truncated_polynomial(2, 3),
        lambda: exterior_algebra(1),
        acyclic_algebra,
    ]
    A = catalog[int(rng.integers(len(catalog)))]()
    if A.space.dim() <= 2 and rng.random() < 0.3:
        A = tensor_algebra(A, catalog[int(rng.integers(2, len(catalog)))]())
    return A


def random_complex(rng: np.random.Generator, degrees: Sequence[int] = (0, 1, 2), max_dim: int = 2,
                   prefix: str = "v") -> ChainComplex:
    """
    A split complex d(a_j) = b_j conjugated by unitriangular changes of basis,
    so d² = 0 exactly and the homology has a known size.
    """
    basis: Dict[int, List[str]] = {q: [f"{prefix}{q}.{n}" for n in range(int(rng.integers(0, max_dim + 1)))]
                                   for q in degrees}
    if not any(basis.values()):
        basis[degrees[0]] = [f"{prefix}{degrees[0]}.0"]
    space = GradedSpace.build(basis)
    columns = {}
    free = {q: list(space.keys(q)) for q in degrees}
    for q in degrees:
        if q - 1 not in basis:
            continue
        rank = int(rng.integers(0, min(len(free[q]), len(free[q - 1])) + 1))
        for _ in range(rank):
            source, target = free[q].pop(), free[q - 1].pop(0)
            columns[source] = {target: Fraction(1)}
    split = GradedMap(space, space, -1, columns, check=False)
    change = _unitriangular(rng, space)
    d = compose(change, compose(split, invert_map(change)))
    return ChainComplex(space, d, check=False)


def _unitriangular(rng: np.random.Generator, space: GradedSpace) -> GradedMap:
    columns = {}
    for q in space.degrees:
        keys = space.keys(q)
        for n, key in enumerate(keys):
            column = {key: Fraction(1)}
            for earlier in keys[:n]:
                c = random_scalar(rng)
                if c:
                    column[earlier] = c
            columns[key] = column
    return GradedMap(space, space, 0, columns, check=False)


def random_free_module(rng: np.random.Generator, A: DGAlgebra, max_dim: int = 2,
                       degrees: Sequence[int] = (0, 1, 2)) -> StrictModule:
    V = random_complex(rng, degrees, max_dim)
    return free_module(A, V, f"free({A.name})")


def gauge_retract(rng: np.random.Generator, C: ChainComplex,
                  fiber: Optional[Iterable[Key]] = None) -> HomotopyRetract:
    """
    Retract of C onto itself: i = 1 + dψ + ψd, p = i⁻¹ and h = dψ' − ψ'd,
    so dh + hd = 0 = 1 − ip. With a fiber both ψ and ψ' preserve it.
    """
    fiber_keys = frozenset(fiber) if fiber is not None else None
    d, one = C.d, identity(C.space)
    for attempt in range(MAX_GAUGE_ATTEMPTS):
        psi = random_map(rng, C.space, C.space, 1, fiber=fiber_keys)
        i = one + compose(d, psi) + compose(psi, d)
        try:
            p = invert_map(i)
        except InversionError:
            logger.debug(f"Gauge attempt {attempt} gave a singular map, retrying")
            continue
        psi2 = random_map(rng, C.space, C.space, 2, fiber=fiber_keys)
        h = compose(d, psi2) - compose(psi2, d)
        return HomotopyRetract(C, C, ShiftedChainMap(C, C, i), ShiftedChainMap(C, C, p), h,
                               fiber_keys, fiber_keys)
    raise RetractError(f"no invertible gauge found in {MAX_GAUGE_ATTEMPTS} attempts")


def random_infty_iso(rng: np.random.Generator, M: StrictModule, arity_bound: int) -> AInftyMorphism:
    """i_∞∘p_∞ through a gauge retract: an ∞-automorphism of M with nonzero higher components."""
    R = gauge_retract(rng, M.complex)
    small, i, p = homotopy_transfer(M, R, arity_bound)
    return compose_morphisms(i, p)


def shifted_free_morphism(A: DGAlgebra, V: ChainComplex, m: int, arity_bound: int) -> AInftyMorphism:
    """The strict shift-m isomorphism V⊗A → (Σ^m V)⊗A, v⊗a ↦ v⊗a."""
    source = promote(free_module(A, V), arity_bound)
    target = promote(free_module(A, shift(V, m)), arity_bound)
    columns = {key: {(key[0] + m, key[1]): Fraction(1)} for key in source.carrier}
    f1 = GradedMap(source.carrier, target.carrier, m, columns, check=False)
    return AInftyMorphism(source, target, m, {1: f1})


def acyclic_pair(degree: int, prefix: str = "w") -> ChainComplex:
    """w1 → w0 with d w1 = w0, in degrees degree + 1 and degree."""
    space = GradedSpace.build({degree: [f"{prefix}0"], degree + 1: [f"{prefix}1"]})
    d = GradedMap(space, space, -1, {(degree + 1, f"{prefix}1"): {(degree, f"{prefix}0"): Fraction(1)}})
    return ChainComplex(space, d)


@dataclass
class QuasiInstance:
    """A quasi-isomorphism M → N between strict modules"""

    source: StrictModule
    target: StrictModule
    morphism: AInftyMorphism


def random_quasi_iso(rng: np.random.Generator, A: DGAlgebra, arity_bound: int, max_dim: int = 2,
                     degrees: Sequence[int] = (0, 1, 2)) -> QuasiInstance:
    """(∞-iso of N) ∘ (inclusion V⊗A ↪ (V ⊕ W)⊗A) with W acyclic."""
    V = random_complex(rng, degrees, max_dim)
    W = acyclic_pair(int(rng.choice(list(degrees))))
    M = free_module(A, V)
    N = free_module(A, direct_sum_complex(V, W))
    inclusion = GradedMap(M.space, N.space, 0, {key: {key: Fraction(1)} for key in M.space}, check=False)
    f = AInftyMorphism(promote(M, arity_bound), promote(N, arity_bound), 0, {1: inclusion})
    g = random_infty_iso(rng, N, arity_bound)
    return QuasiInstance(M, N, compose_morphisms(g, f))


def random_path_iso(rng: np.random.Generator, E: PathModule) -> PathMorphism:
    """Path ∞-automorphism of a strict path module through a fiber-preserving gauge retract."""
    R = gauge_retract(rng, E.complex, E.fiber_keys)
    small, i, p = transfer_path(E, R)
    return compose_path(i, p)


@dataclass
class PathQuasiInstance:
    source: PathModule
    target: PathModule
    morphism: PathMorphism


def random_path_quasi(rng: np.random.Generator, A: DGAlgebra, arity_bound: int, max_dim: int = 2,
                      degrees: Sequence[int] = (0, 1, 2)) -> PathQuasiInstance:
    """Cone of an acyclic-extension inclusion, followed by a random path automorphism of the target."""
    V = random_complex(rng, degrees, max_dim)
    W = acyclic_pair(int(rng.choice(list(degrees))))
    M = free_module(A, V)
    N = free_module(A, direct_sum_complex(V, W))
    source = cone_path_module(M, arity_bound)
    target = cone_path_module(N, arity_bound, source.pair)
    inclusion = GradedMap(M.space, N.space, 0, {key: {key: Fraction(1)} for key in M.space}, check=False)
    h = cone_morphism(inclusion, source, target)
    return PathQuasiInstance(source, target, compose_path(random_path_iso(rng, target), h))
