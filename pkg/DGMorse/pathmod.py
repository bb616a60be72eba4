"""
Path modules over a pair (A, P) and their morphisms (coherent chain homotopies)
"""

import logging
from dataclasses import replace
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Tuple

from .algebra import (GradedMap, GradedSpace, Key, compose, identity, sign, tensor_differential,
                      tensor_many, tensor_product)
from .ainfty import (AInftyModule, AInftyMorphism, DGAlgebra, ModuleFrame, MorphismFrame, StrictModule,
                     compose_components, homology_roundtrip, invert_components, transfer_components,
                     verify_morphism, verify_morphism_frame, verify_structure)
from .complexes import ChainComplex, HomotopyRetract, ShiftedChainMap, require_retract, retract_to_homology
from .exceptions import (DegreeMismatchError, FiberError, InversionError, QuasiIsomorphismError, SchemaError)
from .linalg import EchelonBasis
from .reports import combine, failed, passed, residual_report

logger = logging.getLogger(__name__)


class PathPair:
    """A DGA A, a complex P with a left A-action, and A ↪ P"""

    def __init__(self, algebra: DGAlgebra, pathspace: ChainComplex, action: GradedMap, embedding: GradedMap):
        if action.source != tensor_product(algebra.space, pathspace.space) or action.target != pathspace.space \
                or action.degree != 0:
            raise DegreeMismatchError("left action must be a degree-0 map A⊗P → P")
        if embedding.source != algebra.space or embedding.target != pathspace.space or embedding.degree != 0:
            raise DegreeMismatchError("embedding must be a degree-0 map A → P")
        self.algebra = algebra
        self.pathspace = pathspace
        self.action = action
        self.embedding = embedding


def verify_path_pair(pair: PathPair) -> dict:
    A, P = pair.algebra, pair.pathspace
    one_a, one_p = identity(A.space), identity(P.space)
    checks = []
    assoc = compose(pair.action, tensor_many([A.mu, one_p])) - compose(pair.action, tensor_many([one_a, pair.action]))
    checks.append(residual_report("left_associativity", assoc, "(ab)·π differs from a·(b·π)"))
    bad = next((key for key in P.space
                if pair.action.column((key[0], (A.unit, key))) != {key: Fraction(1)}), None)
    checks.append(failed("left_unit", "1·π differs from π", {"degree": bad[0], "basis": str(bad[1])})
                  if bad else passed("left_unit"))
    leibniz = compose(P.d, pair.action) - compose(pair.action, tensor_differential([A.d, P.d]))
    checks.append(residual_report("leibniz", leibniz, "d(a·π) differs from da·π ± a·dπ"))
    chain = compose(pair.embedding, A.d) - compose(P.d, pair.embedding)
    checks.append(residual_report("embedding_chain_map", chain, "embedding does not commute with d"))
    linear = compose(pair.embedding, A.mu) - compose(pair.action, tensor_many([one_a, pair.embedding]))
    checks.append(residual_report("embedding_equivariant", linear, "embedding does not commute with the action"))
    images = EchelonBasis()
    rank = sum(images.add(pair.embedding.column(key))[0] for key in A.space)
    checks.append(passed("embedding_injective") if rank == A.space.dim()
                  else failed("embedding_injective", f"embedding has rank {rank} < {A.space.dim()}"))
    return combine("path_pair", checks)


class PathModule(ModuleFrame):
    """Total complex 𝓔 ⊇ fiber 𝓕 with m_k: 𝓕⊗A^{⊗k−2}⊗P → 𝓔 for 2 ≤ k ≤ K"""

    def __init__(self, pair: PathPair, total: ChainComplex, fiber: Iterable[Key],
                 ops: Mapping[int, GradedMap], arity_bound: int, name: str = ""):
        super().__init__()
        if arity_bound < 1:
            raise SchemaError("arity bound must be at least 1")
        self.pair = pair
        self.complex = total
        self.fiber_keys = frozenset(fiber)
        self.fiber_complex = total.subcomplex(self.fiber_keys)
        self.arity_bound = arity_bound
        self.name = name
        self.ops: Dict[int, GradedMap] = {}
        for k, op in ops.items():
            if not 2 <= k <= arity_bound:
                raise SchemaError(f"operation m_{k} lies outside arities 2..{arity_bound}")
            if op.source != self.word(k) or op.target != total.space or op.degree != k - 2:
                raise DegreeMismatchError(f"m_{k} must be a degree-{k - 2} map from 𝓕⊗A^{k - 2}⊗P to 𝓔")
            self.ops[k] = op

    algebra = property(lambda self: self.pair.algebra)
    total = property(lambda self: self.complex.space)
    fiber = property(lambda self: self.fiber_complex.space)
    last = property(lambda self: self.pair.pathspace.space)
    last_d = property(lambda self: self.pair.pathspace.d)
    last_action = property(lambda self: self.pair.action)
    embedding = property(lambda self: self.pair.embedding)

    def op(self, k: int) -> GradedMap:
        if k == 1:
            return self.complex.d
        return self.ops.get(k) or self.zero_op(k)

    def is_strict(self) -> bool:
        return all(self.op(k).is_zero() for k in range(3, self.arity_bound + 1))

    def fiber_module(self) -> AInftyModule:
        """The fiber with the restricted operations, an A∞ module over A."""
        ops = {k: self.fiber_op(k) for k in range(1, self.arity_bound + 1)}
        return AInftyModule(self.algebra, self.fiber, ops, self.arity_bound, f"fiber({self.name})")

    def with_arity(self, arity_bound: int) -> 'PathModule':
        ops = {k: op for k, op in self.ops.items() if k <= arity_bound}
        return PathModule(self.pair, self.complex, self.fiber_keys, ops, arity_bound, self.name)

    def __repr__(self):
        return f"PathModule({self.name or 'unnamed'}, K={self.arity_bound}, total={self.total.dims()})"


def verify_path_module(E: PathModule) -> dict:
    checks = [verify_structure(E, "structure")]
    try:
        checks.append(verify_structure(E.fiber_module(), "fiber_module"))
    except FiberError as exc:
        checks.append(failed("fiber_module", f"operations do not restrict to the fiber: {exc}", exc.witness))
    return combine("path_module", checks, {"fiber_dims": {str(q): n for q, n in E.fiber.dims().items()}})


class PathMorphism(MorphismFrame):
    """η_1: 𝓔¹ → 𝓔² and η_k on 𝓕¹⊗A^{⊗k−2}⊗P, with target shift m"""

    def __init__(self, source: PathModule, target: PathModule, shift: int, maps: Mapping[int, GradedMap]):
        self._setup(source, target, shift, maps)

    @property
    def eta_1(self) -> ShiftedChainMap:
        return ShiftedChainMap(self.source.complex, self.target.complex, self.component(1))

    def fiber_morphism(self) -> AInftyMorphism:
        maps = {k: self.fiber_component(k) for k in range(1, self.arity_bound + 1)}
        return AInftyMorphism(self.source.fiber_module(), self.target.fiber_module(), self.shift, maps)

    def __repr__(self):
        return f"PathMorphism(shift={self.shift}, K={self.arity_bound}, components={sorted(self.maps)})"


def identity_path_morphism(E: PathModule) -> PathMorphism:
    return PathMorphism(E, E, 0, {1: identity(E.total)})


def verify_path_morphism(h: PathMorphism) -> dict:
    checks = [verify_morphism_frame(h, "equations")]
    try:
        checks.append(verify_morphism(h.fiber_morphism()))
    except FiberError as exc:
        checks.append(failed("ainfty_morphism", f"components do not restrict to the fibers: {exc}", exc.witness))
    return combine("path_morphism", checks, {"shift": h.shift})


def compose_path(h2: PathMorphism, h1: PathMorphism) -> PathMorphism:
    return PathMorphism(h1.source, h2.target, h1.shift + h2.shift, compose_components(h2, h1))


def invert_path_iso(h: PathMorphism) -> PathMorphism:
    return PathMorphism(h.target, h.source, -h.shift, invert_components(h))


def strict_path_module(M: StrictModule, arity_bound: int) -> PathModule:
    """A strict module as a strict path module over (A, A)."""
    A = M.algebra
    pair = PathPair(A, A.complex, A.mu, identity(A.space))
    ops = {2: M.action} if arity_bound >= 2 else {}
    return PathModule(pair, M.complex, M.space.keys(), ops, arity_bound, M.name)


def _cone_label(label) -> str:
    return f"{label}·t"


def _cone_space(space: GradedSpace) -> Tuple[GradedSpace, Dict[Key, Key]]:
    """X ⊕ X·t with |x·t| = |x| + 1; returns the space and x ↦ x·t on keys."""
    basis: Dict[int, list] = {}
    for q in space.degrees:
        basis.setdefault(q, [])
        basis.setdefault(q + 1, [])
    for key in space:
        basis[key[0]].append(key[1])
    shifted = {}
    for key in space:
        t_key = (key[0] + 1, _cone_label(key[1]))
        basis[key[0] + 1].append(t_key[1])
        shifted[key] = t_key
    return GradedSpace.build(basis), shifted


def _cone_complex(C: ChainComplex) -> Tuple[ChainComplex, Dict[Key, Key]]:
    """Cone of the identity: d(x·t) = (dx)·t + (−1)^{|x|} x."""
    space, t = _cone_space(C.space)
    columns = {}
    for key in C.space:
        image = C.d.column(key)
        if image:
            columns[key] = dict(image)
        column = {t[k]: c for k, c in image.items()}
        column[key] = Fraction(sign(key[0]))
        columns[t[key]] = column
    return ChainComplex(space, GradedMap(space, space, -1, columns, check=False)), t


def _cone_extend(f: GradedMap, source: GradedSpace, target: GradedSpace,
                 t_source: Dict[Key, Key], t_target: Dict[Key, Key]) -> GradedMap:
    """F(x) = f(x), F(x·t) = f(x)·t."""
    columns = {}
    for key, column in f.items():
        columns[key] = dict(column)
        columns[t_source[key]] = {t_target[k]: c for k, c in column.items()}
    return GradedMap(source, target, f.degree, columns, check=False)


def cone_pair(A: DGAlgebra) -> Tuple[PathPair, Dict[Key, Key]]:
    """(A, Cone(id_A)): an acyclic path complex containing A."""
    P, t = _cone_complex(A.complex)
    word = tensor_product(A.space, P.space)
    columns = {}
    for (deg, (b, a)), image in A.mu.items():
        columns[(deg, (b, a))] = dict(image)
        columns[(deg + 1, (b, t[a]))] = {t[k]: c for k, c in image.items()}
    action = GradedMap(word, P.space, 0, columns, check=False)
    embedding = GradedMap(A.space, P.space, 0, {key: {key: Fraction(1)} for key in A.space}, check=False)
    return PathPair(A, P, action, embedding), t


def cone_path_module(M: StrictModule, arity_bound: int, pair: Optional[PathPair] = None) -> PathModule:
    """𝓕 = M inside 𝓔 = M⊗_A Cone(id_A) = M ⊕ M·t, strict."""
    A = M.algebra
    if pair is None:
        pair, t_alg = cone_pair(A)
    else:
        t_alg = {key: (key[0] + 1, _cone_label(key[1])) for key in A.space}
    E, t = _cone_complex(M.complex)
    word = tensor_product(M.space, pair.pathspace.space)
    columns = {}
    for (deg, (x, a)), image in M.action.items():
        columns[(deg, (x, a))] = dict(image)
        columns[(deg + 1, (x, t_alg[a]))] = {t[k]: c for k, c in image.items()}
    ops = {2: GradedMap(word, E.space, 0, columns, check=False)} if arity_bound >= 2 else {}
    return PathModule(pair, E, M.space.keys(), ops, arity_bound, f"cone({M.name})")


def cone_retract(R: HomotopyRetract) -> HomotopyRetract:
    """Extend a retract of 𝓕 to one of Cone(𝓕) restricting to 𝓕 on the fibers."""
    big, t_big = _cone_complex(R.big)
    small, t_small = _cone_complex(R.small)
    i = _cone_extend(R.i.map, small.space, big.space, t_small, t_big)
    p = _cone_extend(R.p.map, big.space, small.space, t_big, t_small)
    h = _cone_extend(R.h, big.space, big.space, t_big, t_big)
    return HomotopyRetract(big, small, ShiftedChainMap(small, big, i), ShiftedChainMap(big, small, p), h,
                           frozenset(R.big.space.keys()), frozenset(R.small.space.keys()))


def cone_morphism(f: GradedMap, source: PathModule, target: PathModule) -> PathMorphism:
    """Trivial coherent homotopy on cones induced by a strictly equivariant chain map of fibers."""
    t_source = {key: (key[0] + 1, _cone_label(key[1])) for key in source.fiber}
    t_target = {key: (key[0] + 1, _cone_label(key[1])) for key in target.fiber}
    eta = _cone_extend(f, source.total, target.total, t_source, t_target)
    return PathMorphism(source, target, f.degree, {1: eta})


def transfer_path(E: PathModule, R: HomotopyRetract, arity_bound: Optional[int] = None
                  ) -> Tuple[PathModule, PathMorphism, PathMorphism]:
    """Transferred path module on R.small with the morphisms i and p."""
    K = arity_bound or E.arity_bound
    if K != E.arity_bound:
        E = E.with_arity(K)
    if not E.is_strict():
        raise SchemaError("transfer starts from a strict path module")
    if R.big.space != E.total or R.big.d != E.complex.d:
        raise SchemaError("retract does not start from the total complex")
    if R.fiber is None:
        if R.small.space == R.big.space:
            R = replace(R, fiber=E.fiber_keys, small_fiber=E.fiber_keys)
        else:
            raise FiberError("retract carries no fiber data")
    if R.fiber != E.fiber_keys:
        raise FiberError("retract fiber differs from the module's fiber")
    require_retract(R)
    R_fiber = R.fiber_retract()
    require_retract(R_fiber)
    ops, i_maps, p_maps = transfer_components(E, R, R_fiber, K)
    small = PathModule(E.pair, R.small, R.small_fiber, {k: op for k, op in ops.items() if k >= 2}, K,
                       f"transfer({E.name})")
    logger.debug(f"Transferred path module onto total dims {R.small.space.dims()}")
    return small, PathMorphism(small, E, 0, i_maps), PathMorphism(E, small, 0, p_maps)


def invert_path_quasi(h: PathMorphism,
                      retracts: Optional[Tuple[HomotopyRetract, HomotopyRetract]] = None) -> PathMorphism:
    """
    Homotopy inverse i¹ ∘ (p² ∘ η ∘ i¹)^{-1} ∘ p² of a path morphism whose
    arity-one part is a quasi-isomorphism on totals and fibers.
    """
    if retracts is None:
        retracts = (retract_to_homology(h.source.complex, h.source.fiber_keys),
                    retract_to_homology(h.target.complex, h.target.fiber_keys))
    R1, R2 = retracts
    _, i1, _ = transfer_path(h.source, R1)
    _, _, p2 = transfer_path(h.target, R2)
    epsilon = compose_path(p2, compose_path(h, i1))
    try:
        delta = invert_path_iso(epsilon)
    except (InversionError, FiberError) as exc:
        raise QuasiIsomorphismError(f"η_1 is not a quasi-isomorphism: {exc}", exc.witness)
    return compose_path(i1, compose_path(delta, p2))


def path_homology_roundtrip(h: PathMorphism, g: PathMorphism) -> dict:
    checks = [homology_roundtrip(h, g)]
    fiber = homology_roundtrip(h.fiber_morphism(), g.fiber_morphism())
    fiber["check"] = "fiber_homology_roundtrip"
    checks.append(fiber)
    return combine("path_homology_roundtrip", checks)
