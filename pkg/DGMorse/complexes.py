"""
Chain complexes, shifted chain maps, homology and homotopy retracts
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from .algebra import (GradedMap, GradedSpace, Key, Vector, compose, format_key, identity,
                      sign, vector_to_dict, zero_map)
from .exceptions import ComplexError, DegreeMismatchError, FiberError, RetractError
from .linalg import EchelonBasis, kernel_basis
from .reports import combine, failed, map_witness, passed, residual_report

logger = logging.getLogger(__name__)


class ChainComplex:
    """A finite graded space with a degree −1 differential squaring to zero"""

    def __init__(self, space: GradedSpace, differential: Optional[GradedMap] = None, check: bool = True):
        if differential is None:
            differential = zero_map(space, space, -1)
        if differential.source != space or differential.target != space:
            raise DegreeMismatchError("differential must be an endomorphism of the carrier")
        if differential.degree != -1:
            raise DegreeMismatchError(f"differential has degree {differential.degree}, expected -1")
        self.space = space
        self.differential = differential
        if check:
            witness = self.square_witness()
            if witness:
                raise ComplexError(f"d∘d is nonzero in degree {witness['degree']}", witness)

    @property
    def d(self) -> GradedMap:
        return self.differential

    def __eq__(self, other):
        if not isinstance(other, ChainComplex):
            return NotImplemented
        return self.space == other.space and self.differential == other.differential

    def __hash__(self):
        return hash(self.space)

    def __repr__(self):
        return f"ChainComplex(dims={self.dims()})"

    def square_witness(self):
        return map_witness(compose(self.differential, self.differential))

    def dims(self) -> Dict[int, int]:
        return self.space.dims()

    def euler_characteristic(self) -> int:
        return sum(sign(q) * n for q, n in self.dims().items())

    def shift(self, k: int) -> 'ChainComplex':
        return shift(self, k)

    def subcomplex(self, keys: Iterable[Key]) -> 'ChainComplex':
        """Subcomplex on a basis-label subset; closure under d is checked."""
        sub = self.space.subspace(keys)
        try:
            d = self.differential.restrict(sub).corestrict(sub)
        except FiberError as exc:
            raise FiberError(f"label subset is not closed under d: {exc}", exc.witness)
        return ChainComplex(sub, GradedMap(sub, sub, -1, dict(d.items()), check=False), check=False)


def verify_complex(C: ChainComplex) -> dict:
    witness = C.square_witness()
    if witness:
        return failed("d_squared", f"d∘d is nonzero in degree {witness['degree']}", witness)
    return passed("d_squared", {"dims": {str(q): n for q, n in C.dims().items()}})


def shift(C: ChainComplex, k: int) -> ChainComplex:
    """Σᵏ: degrees raised by k, differential scaled by (−1)ᵏ."""
    if k == 0:
        return C
    space = C.space.shift(k)
    s = sign(k)
    columns = {(src[0] + k, src[1]): {(tgt[0] + k, tgt[1]): s * c for tgt, c in column.items()}
               for src, column in C.differential.items()}
    return ChainComplex(space, GradedMap(space, space, -1, columns, check=False), check=False)


class ShiftedChainMap:
    """A map f with f∘d = (−1)^{|f|} d∘f"""

    def __init__(self, source: ChainComplex, target: ChainComplex, map: GradedMap):
        if map.source != source.space or map.target != target.space:
            raise DegreeMismatchError("chain map spaces do not match its complexes")
        self.source = source
        self.target = target
        self.map = map

    @property
    def shift(self) -> int:
        return self.map.degree

    def residual(self) -> GradedMap:
        left = compose(self.map, self.source.d)
        right = compose(self.target.d, self.map).scale(sign(self.shift))
        return left - right


def verify_chain_map(f: ShiftedChainMap) -> dict:
    return residual_report("chain_map", f.residual(), "f∘d differs from (−1)^|f| d∘f", shift=f.shift)


@dataclass
class Homology:
    space: GradedSpace
    representatives: Dict[Key, Vector]

    def dims(self) -> Dict[int, int]:
        return self.space.dims()

    def to_dict(self) -> dict:
        return {
            "dims": {str(q): n for q, n in self.dims().items()},
            "representatives": {format_key(k): vector_to_dict(v) for k, v in self.representatives.items()},
        }


@dataclass
class HomotopyRetract:
    big: ChainComplex
    small: ChainComplex
    i: ShiftedChainMap
    p: ShiftedChainMap
    h: GradedMap
    fiber: Optional[FrozenSet[Key]] = None
    small_fiber: Optional[FrozenSet[Key]] = None

    def fiber_retract(self) -> 'HomotopyRetract':
        """The restriction of a fiber-compatible retract to the fibers."""
        if self.fiber is None:
            raise FiberError("retract carries no fiber data")
        big = self.big.subcomplex(self.fiber)
        small = self.small.subcomplex(self.small_fiber)
        i = self.i.map.restrict(small.space).corestrict(big.space)
        p = self.p.map.restrict(big.space).corestrict(small.space)
        h = self.h.restrict(big.space).corestrict(big.space)
        return HomotopyRetract(big, small, ShiftedChainMap(small, big, i), ShiftedChainMap(big, small, p), h)


def identity_retract(C: ChainComplex) -> HomotopyRetract:
    one = identity(C.space)
    return HomotopyRetract(C, C, ShiftedChainMap(C, C, one), ShiftedChainMap(C, C, one),
                           zero_map(C.space, C.space, 1))


def verify_retract(R: HomotopyRetract, side_conditions: bool = True) -> dict:
    checks = [
        verify_chain_map(R.i),
        verify_chain_map(R.p),
    ]
    d, one = R.big.d, identity(R.big.space)
    homotopy = compose(d, R.h) + compose(R.h, d) - (one - compose(R.i.map, R.p.map))
    checks.append(residual_report("homotopy", homotopy, "dh + hd differs from id − ip"))
    checks.append(residual_report("p_i", compose(R.p.map, R.i.map) - identity(R.small.space),
                                  "p∘i differs from the identity"))
    if side_conditions:
        checks.append(residual_report("h_h", compose(R.h, R.h), "h∘h is nonzero"))
        checks.append(residual_report("h_i", compose(R.h, R.i.map), "h∘i is nonzero"))
        checks.append(residual_report("p_h", compose(R.p.map, R.h), "p∘h is nonzero"))
    return combine("retract", checks)


def require_retract(R: HomotopyRetract):
    report = verify_retract(R, side_conditions=False)
    if report["status"] != "pass":
        bad = next(c for c in report["checks"] if c["status"] != "pass")
        raise RetractError(f"retract invariant violated: {bad['message']}", bad.get("witness"))


@dataclass
class _Splitting:
    """
    Per degree: A (with d injective), B = d(A) one degree down, H cycles
    completing B to the cycles, W completing everything to a basis.
    """
    A: Dict[int, List[Vector]] = field(default_factory=dict)
    B: Dict[int, List[Tuple[Vector, Vector]]] = field(default_factory=dict)
    H: Dict[int, List[Vector]] = field(default_factory=dict)
    W: Dict[int, List[Vector]] = field(default_factory=dict)


def _unit(key: Key) -> Vector:
    return {key: Fraction(1)}


def _split(C: ChainComplex, seed: Optional[_Splitting] = None) -> _Splitting:
    """
    Without a seed W is empty. A seed (the splitting of a subcomplex) is
    extended so its H stays among the cycle representatives; pairs whose
    boundary would cancel a seeded class are left in W instead.
    """
    order = C.space.position
    d = C.d
    split = _Splitting()
    for q in C.space.degrees:
        split.B.setdefault(q - 1, [])
    for q in C.space.degrees:
        images = EchelonBasis(order)
        for rep in (seed.H.get(q - 1, []) if seed else []):
            images.add(rep)
        chosen = []
        seeded = seed.A.get(q, []) if seed else []
        for n, candidate in enumerate(seeded + [_unit(k) for k in C.space.keys(q)]):
            image = d(candidate)
            if images.add(image)[0]:
                chosen.append(candidate)
                split.B.setdefault(q - 1, []).append((image, candidate))
            elif n < len(seeded):
                raise RetractError(f"fiber splitting is inconsistent in degree {q}")
        split.A[q] = chosen
    for q in C.space.degrees:
        span = EchelonBasis(order)
        for boundary, _ in split.B.get(q, []):
            span.add(boundary)
        reps = []
        for vector in (seed.H.get(q, []) if seed else []):
            if not span.add(vector)[0]:
                raise RetractError(
                    f"fiber cycle is not independent in degree {q}",
                    {"degree": q, "value": vector_to_dict(vector)})
            reps.append(vector)
        cycles = kernel_basis([(k, d(_unit(k))) for k in C.space.keys(q)], order)
        for cycle in cycles:
            if span.add(cycle)[0]:
                reps.append(cycle)
        split.H[q] = reps
        for vector in split.A[q]:
            span.add(vector)
        split.W[q] = [_unit(k) for k in C.space.keys(q) if span.add(_unit(k))[0]]
    return split


def retract_to_homology(C: ChainComplex, fiber: Optional[Iterable[Key]] = None) -> HomotopyRetract:
    """
    Strong deformation retract of C onto (H(C), 0).

    Each C_q splits as B_q ⊕ H_q ⊕ A_q with d: A_q ≅ B_{q−1}; h inverts d on B.
    With a fiber label subset the splitting of the subcomplex is extended, so
    i, p and h all restrict to the fibers and the small fiber is H(fiber).
    When H(fiber) → H(C) is not injective the small total keeps the extra
    summand W (labels W<q>.<n>) with the differential induced by p∘d∘i.
    """
    seed = None
    fiber_keys = None
    if fiber is not None:
        fiber_keys = frozenset(fiber)
        seed = _split(C.subcomplex(fiber_keys))
    split = _split(C, seed)

    small_basis = {q: [f"H{q}.{n}" for n in range(len(split.H[q]))] + [f"W{q}.{n}" for n in range(len(split.W[q]))]
                   for q in C.space.degrees}
    small_space = GradedSpace.build(small_basis, C.space.degrees)

    bases = {}
    for q in C.space.degrees:
        full = EchelonBasis()
        for j, (boundary, _) in enumerate(split.B.get(q, [])):
            full.add(boundary, ("B", j))
        for n, rep in enumerate(split.H[q]):
            full.add(rep, ("H", n))
        for n, vector in enumerate(split.A[q]):
            full.add(vector, ("A", n))
        for n, vector in enumerate(split.W[q]):
            full.add(vector, ("W", n))
        bases[q] = full

    def decompose(vector: Vector, q: int) -> Tuple[Vector, Vector]:
        """(p(vector), h(vector)) from the coordinates in the splitting of degree q."""
        if not vector:
            return {}, {}
        coords = bases[q].express(vector)
        if coords is None:
            raise RetractError(f"splitting does not span degree {q}")
        p_col: Vector = {}
        h_col: Vector = {}
        for (part, n), c in coords.items():
            if part == "H":
                p_col[(q, f"H{q}.{n}")] = c
            elif part == "W":
                p_col[(q, f"W{q}.{n}")] = c
            elif part == "B":
                for k2, v in split.B[q][n][1].items():
                    h_col[k2] = h_col.get(k2, 0) + c * v
        return p_col, {k2: v for k2, v in h_col.items() if v}

    i_columns, p_columns, h_columns, d_columns = {}, {}, {}, {}
    for q in C.space.degrees:
        for key in C.space.keys(q):
            p_columns[key], h_columns[key] = decompose(_unit(key), q)
        for n, rep in enumerate(split.H[q]):
            i_columns[(q, f"H{q}.{n}")] = rep
        for n, w in enumerate(split.W[q]):
            dw = C.d(w)
            d_small, h_dw = decompose(dw, q - 1)
            column = dict(w)
            for k2, v in h_dw.items():
                column[k2] = column.get(k2, 0) - v
            i_columns[(q, f"W{q}.{n}")] = {k2: v for k2, v in column.items() if v}
            if d_small:
                d_columns[(q, f"W{q}.{n}")] = d_small

    i = GradedMap(small_space, C.space, 0, i_columns, check=False)
    p = GradedMap(C.space, small_space, 0, p_columns, check=False)
    h = GradedMap(C.space, C.space, 1, h_columns, check=False)
    small = ChainComplex(small_space, GradedMap(small_space, small_space, -1, d_columns, check=False), check=False)
    small_fiber = None
    if seed is not None:
        small_fiber = frozenset((q, small_basis[q][n]) for q in C.space.degrees
                                for n in range(len(seed.H.get(q, []))))
    logger.debug(f"Retract onto dims {small_space.dims()}")
    return HomotopyRetract(C, small, ShiftedChainMap(small, C, i), ShiftedChainMap(C, small, p), h,
                           fiber_keys, small_fiber)


def homology(C: ChainComplex) -> Homology:
    R = retract_to_homology(C)
    return Homology(R.small.space, {key: R.i.map.column(key) for key in R.small.space})


def induced_on_homology(f: GradedMap, source: HomotopyRetract, target: HomotopyRetract) -> GradedMap:
    """H(f) = p_target ∘ f ∘ i_source."""
    return compose(target.p.map, compose(f, source.i.map))
