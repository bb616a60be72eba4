"""
Finite cubical sets, normalized cubical chains and the Serre diagonal.

Boundary convention: d = Σ_i (−1)^{i−1} (∂_i¹ − ∂_i⁰), degenerate faces
dropped. The diagonal sends σ to

    Σ_{J⊔K} sgn(J,K) σ|_{I^J×{0}^K} ⊗ σ|_{{1}^J×I^K},  sgn(J,K) = (−1)^{#{j∈J, k∈K : j>k}}.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .algebra import (GradedMap, GradedSpace, Vector, compose, identity, sign, tensor_differential,
                      tensor_many, tensor_product, to_scalar)
from .complexes import ChainComplex
from .exceptions import SchemaError
from .reports import combine, failed, passed, residual_report

logger = logging.getLogger(__name__)

Faces = List[Tuple[str, str]]


@dataclass
class CubicalSet:
    """
    Explicit finite cubical set.

    faces[c][i−1] = (∂_i⁰ c, ∂_i¹ c); degeneracies[c][i−1] = s_i c where given.
    Cubes in `degenerate` (and every listed s_i c) are zero in normalized chains.
    """

    cubes: Dict[int, List[str]]
    faces: Dict[str, Faces]
    degeneracies: Dict[str, List[str]] = field(default_factory=dict)
    degenerate: FrozenSet[str] = frozenset()
    components: Dict[str, Tuple[str, str]] = field(default_factory=dict)
    name: str = "cubical set"

    def __post_init__(self):
        self.dims: Dict[str, int] = {}
        for k, labels in self.cubes.items():
            for label in labels:
                if label in self.dims:
                    raise SchemaError(f"cube {label!r} is declared twice")
                self.dims[label] = int(k)
        flagged = set(self.degenerate)
        for label, images in self.degeneracies.items():
            self._check(label)
            for image in images:
                self._check(image)
                flagged.add(image)
        self.degenerate = frozenset(flagged)
        for label, k in self.dims.items():
            faces = self.faces.get(label, [])
            if len(faces) != k:
                raise SchemaError(f"cube {label!r} of dimension {k} lists {len(faces)} face pairs")
            for pair in faces:
                for face in pair:
                    if self._check(face) != k - 1:
                        raise SchemaError(f"face {face!r} of {label!r} has the wrong dimension")
        logger.debug(f"{self.name}: {len(self.dims)} cubes, {len(self.degenerate)} degenerate")

    def _check(self, label: str) -> int:
        try:
            return self.dims[label]
        except KeyError:
            raise SchemaError(f"unknown cube {label!r}")

    def dim(self, label: str) -> int:
        return self._check(label)

    @property
    def top(self) -> int:
        return max(self.cubes) if self.cubes else 0

    def face(self, label: str, i: int, eps: int) -> str:
        """∂_i^ε with 1 ≤ i ≤ dim."""
        k = self._check(label)
        if not 1 <= i <= k:
            raise SchemaError(f"face index {i} out of range for the {k}-cube {label!r}")
        return self.faces[label][i - 1][eps]

    def restrict(self, label: str, fixed: Mapping[int, int]) -> str:
        """Fix coordinates (1-based) to constants, applying faces from the highest index down."""
        for i in sorted(fixed, reverse=True):
            label = self.face(label, i, fixed[i])
        return label

    def is_degenerate(self, label: str) -> bool:
        return label in self.degenerate

    def nondegenerate(self, k: int) -> List[str]:
        return [c for c in self.cubes.get(k, []) if c not in self.degenerate]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "cubes": {str(k): list(v) for k, v in sorted(self.cubes.items())},
            "faces": {c: [list(p) for p in f] for c, f in self.faces.items() if f},
            "degeneracies": dict(self.degeneracies),
            "degenerate": sorted(self.degenerate),
        }


class CubicalChain:
    """Rational combination of nondegenerate k-cubes; degenerate terms are discarded."""

    def __init__(self, X: CubicalSet, dimension: int, terms: Optional[Mapping[str, object]] = None):
        self.X = X
        self.dimension = dimension
        self.terms: Dict[str, Fraction] = {}
        for label, c in (terms or {}).items():
            if X.dim(label) != dimension:
                raise SchemaError(f"cube {label!r} does not have dimension {dimension}")
            if X.is_degenerate(label):
                continue
            value = self.terms.get(label, 0) + to_scalar(c)
            if value:
                self.terms[label] = value
            else:
                self.terms.pop(label, None)

    @classmethod
    def cube(cls, X: CubicalSet, label: str) -> 'CubicalChain':
        return cls(X, X.dim(label), {label: 1})

    def __eq__(self, other):
        if not isinstance(other, CubicalChain):
            return NotImplemented
        return self.dimension == other.dimension and self.terms == other.terms

    def __add__(self, other: 'CubicalChain') -> 'CubicalChain':
        terms = dict(self.terms)
        for label, c in other.terms.items():
            terms[label] = terms.get(label, 0) + c
        return CubicalChain(self.X, self.dimension, terms)

    def __neg__(self) -> 'CubicalChain':
        return CubicalChain(self.X, self.dimension, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: 'CubicalChain') -> 'CubicalChain':
        return self + (-other)

    def is_zero(self) -> bool:
        return not self.terms

    def vector(self) -> Vector:
        return {(self.dimension, label): c for label, c in self.terms.items()}

    def __repr__(self):
        return " + ".join(f"{c}·{label}" for label, c in self.terms.items()) or "0"


def _cube_boundary(X: CubicalSet, label: str) -> Dict[str, Fraction]:
    out: Dict[str, Fraction] = {}
    for i in range(1, X.dim(label) + 1):
        s = sign(i - 1)
        for eps, factor in ((1, s), (0, -s)):
            face = X.face(label, i, eps)
            if not X.is_degenerate(face):
                out[face] = out.get(face, 0) + factor
    return {k: Fraction(c) for k, c in out.items() if c}


def boundary(c: CubicalChain) -> CubicalChain:
    if c.dimension < 1:
        raise SchemaError("boundary needs a chain of dimension at least 1")
    terms: Dict[str, Fraction] = {}
    for label, coefficient in c.terms.items():
        for face, x in _cube_boundary(c.X, label).items():
            terms[face] = terms.get(face, 0) + coefficient * x
    return CubicalChain(c.X, c.dimension - 1, terms)


def _splits(k: int) -> Iterable[Tuple[Tuple[int, ...], Tuple[int, ...], int]]:
    """(J, K, sgn(J,K)) over all ordered partitions of {1..k}."""
    everything = range(1, k + 1)
    for size in range(k + 1):
        for J in combinations(everything, size):
            K = tuple(i for i in everything if i not in J)
            yield J, K, sign(sum(1 for j in J for m in K if j > m))


def cube_diagonal(X: CubicalSet, label: str) -> List[Tuple[int, str, str]]:
    """Signed pairs of Δ(σ) with degenerate pairs removed"""
    terms = []
    for J, K, s in _splits(X.dim(label)):
        left = X.restrict(label, {k: 0 for k in K})
        right = X.restrict(label, {j: 1 for j in J})
        if X.is_degenerate(left) or X.is_degenerate(right):
            continue
        terms.append((s, left, right))
    return terms


def serre_diagonal(c: CubicalChain) -> Dict[Tuple[str, str], Fraction]:
    out: Dict[Tuple[str, str], Fraction] = {}
    for label, coefficient in c.terms.items():
        for s, left, right in cube_diagonal(c.X, label):
            value = out.get((left, right), 0) + s * coefficient
            if value:
                out[(left, right)] = value
            else:
                out.pop((left, right), None)
    return out


def product_set(X: CubicalSet, Y: CubicalSet) -> CubicalSet:
    """X×Y with cubes a×b; faces act on the first |a| coordinates through a."""
    cubes: Dict[int, List[str]] = {}
    faces: Dict[str, Faces] = {}
    components: Dict[str, Tuple[str, str]] = {}
    degenerate = set()
    for a, p in X.dims.items():
        for b, q in Y.dims.items():
            label = f"{a}×{b}"
            cubes.setdefault(p + q, []).append(label)
            components[label] = (a, b)
            pairs = [(f"{X.face(a, i, 0)}×{b}", f"{X.face(a, i, 1)}×{b}") for i in range(1, p + 1)]
            pairs += [(f"{a}×{Y.face(b, i, 0)}", f"{a}×{Y.face(b, i, 1)}") for i in range(1, q + 1)]
            faces[label] = pairs
            if X.is_degenerate(a) or Y.is_degenerate(b):
                degenerate.add(label)
    return CubicalSet({k: cubes[k] for k in sorted(cubes)}, faces, {}, frozenset(degenerate), components,
                      f"{X.name}×{Y.name}")


def cross_product(a: CubicalChain, b: CubicalChain, XY: Optional[CubicalSet] = None) -> CubicalChain:
    XY = XY or product_set(a.X, b.X)
    terms = {f"{x}×{y}": cx * cy for x, cx in a.terms.items() for y, cy in b.terms.items()}
    return CubicalChain(XY, a.dimension + b.dimension, terms)


def _cube_word(m: int, tokens: Sequence[str]) -> str:
    return f"{m}:" + ",".join(tokens)


def standard_cube(n: int, max_dim: Optional[int] = None) -> CubicalSet:
    """
    The standard n-cube with its degenerate cubes up to dimension max_dim.

    An m-cube is a word in 0, 1, t1..tm (each t_j at most once, in increasing
    order) naming the map I^m → I^n; it is degenerate unless every t_j occurs.
    """
    if n < 0:
        raise SchemaError("cube dimension must be nonnegative")
    max_dim = n if max_dim is None else max_dim
    cubes: Dict[int, List[str]] = {}
    words: Dict[str, Tuple[int, Tuple[str, ...]]] = {}
    for m in range(max_dim + 1):
        labels = []
        for used in range(min(m, n) + 1):
            for positions in combinations(range(n), used):
                for indices in combinations(range(1, m + 1), used):
                    for constants in product("01", repeat=n - used):
                        tokens, ci = [], iter(constants)
                        it = iter(indices)
                        for pos in range(n):
                            tokens.append(f"t{next(it)}" if pos in positions else next(ci))
                        label = _cube_word(m, tokens)
                        labels.append(label)
                        words[label] = (m, tuple(tokens))
        cubes[m] = labels

    def rename(tokens: Sequence[str], mapping) -> Tuple[str, ...]:
        return tuple(mapping(int(t[1:])) if t.startswith("t") else t for t in tokens)

    faces: Dict[str, Faces] = {}
    degeneracies: Dict[str, List[str]] = {}
    degenerate = set()
    for label, (m, tokens) in words.items():
        if sum(1 for t in tokens if t.startswith("t")) < m:
            degenerate.add(label)
        pairs = []
        for i in range(1, m + 1):
            pair = []
            for eps in "01":
                new = rename(tokens, lambda j: eps if j == i else (f"t{j - 1}" if j > i else f"t{j}"))
                pair.append(_cube_word(m - 1, new))
            pairs.append(tuple(pair))
        faces[label] = pairs
        if m + 1 <= max_dim:
            degeneracies[label] = [_cube_word(m + 1, rename(tokens, lambda j: f"t{j + 1}" if j >= i else f"t{j}"))
                                   for i in range(1, m + 2)]
    return CubicalSet(cubes, faces, degeneracies, frozenset(degenerate), name=f"I^{n}")


def circle() -> CubicalSet:
    """One vertex, one loop, and the degenerate 1-cube on the vertex"""
    return CubicalSet({0: ["v"], 1: ["a", "s1v"]},
                      {"v": [], "a": [("v", "v")], "s1v": [("v", "v")]},
                      {"v": ["s1v"]}, frozenset({"s1v"}), name="S1")


def point() -> CubicalSet:
    return CubicalSet({0: ["*"]}, {"*": []}, name="point")


def chain_space(X: CubicalSet) -> GradedSpace:
    return GradedSpace.build({k: X.nondegenerate(k) for k in X.cubes})


def chain_complex(X: CubicalSet) -> ChainComplex:
    space = chain_space(X)
    columns = {}
    for key in space:
        column = {(key[0] - 1, face): c for face, c in _cube_boundary(X, key[1]).items()}
        if column:
            columns[key] = column
    return ChainComplex(space, GradedMap(space, space, -1, columns, check=False), check=False)


def diagonal_map(X: CubicalSet) -> GradedMap:
    space = chain_space(X)
    target = tensor_product(space, space)
    columns = {}
    for key in space:
        column: Vector = {}
        for s, left, right in cube_diagonal(X, key[1]):
            p, q = X.dim(left), X.dim(right)
            tensor_key = (p + q, ((p, left), (q, right)))
            column[tensor_key] = column.get(tensor_key, 0) + s
        column = {k: Fraction(c) for k, c in column.items() if c}
        if column:
            columns[key] = column
    return GradedMap(space, target, 0, columns, check=False)


def augmentation(X: CubicalSet) -> GradedMap:
    """ε: vertices ↦ 1 in the ground ring ℝ = {0: ["1"]}."""
    space = chain_space(X)
    ground = GradedSpace.build({0: ["1"]})
    columns = {key: {(0, "1"): Fraction(1)} for key in space.keys(0)}
    return GradedMap(space, ground, 0, columns, check=False)


def _unitor(source: GradedSpace, target: GradedSpace, position: int) -> GradedMap:
    """ℝ⊗C → C or C⊗ℝ → C, dropping the ground factor."""
    columns = {key: {key[1][1 - position]: Fraction(1)} for key in source}
    return GradedMap(source, target, 0, columns, check=False)


def _identity_errors(X: CubicalSet) -> Optional[dict]:
    for label, k in X.dims.items():
        for j in range(2, k + 1):
            for i in range(1, j):
                for eps, delta in product((0, 1), repeat=2):
                    left = X.face(X.face(label, j, delta), i, eps)
                    right = X.face(X.face(label, i, eps), j - 1, delta)
                    if left != right:
                        return {"cube": label, "i": i, "j": j, "eps": eps, "delta": delta}
    return None


def _degeneracy(X: CubicalSet, label: str, j: int) -> Optional[str]:
    images = X.degeneracies.get(label)
    return images[j - 1] if images and j <= len(images) else None


def _degeneracy_errors(X: CubicalSet) -> Optional[dict]:
    """∂_i s_j is s_{j−1}∂_i for i < j, the identity for i = j and s_j∂_{i−1} for i > j."""
    for label, images in X.degeneracies.items():
        for j, image in enumerate(images, start=1):
            for i, eps in product(range(1, X.dim(label) + 2), (0, 1)):
                if i == j:
                    expected = label
                elif i < j:
                    expected = _degeneracy(X, X.face(label, i, eps), j - 1)
                else:
                    expected = _degeneracy(X, X.face(label, i - 1, eps), j)
                if expected is not None and X.face(image, i, eps) != expected:
                    return {"cube": label, "degeneracy": j, "face": i, "eps": eps}
    return None


def verify_cubical(X: CubicalSet) -> dict:
    """Cubical identities, d² = 0, Δ chain map, coassociativity and counit."""
    checks = []
    witness = _identity_errors(X)
    checks.append(failed("cubical_identities", "∂_i∂_j differs from ∂_{j−1}∂_i", witness)
                  if witness else passed("cubical_identities"))
    witness = _degeneracy_errors(X)
    checks.append(failed("degeneracy_identities", "face of a degeneracy violates the cubical relations", witness)
                  if witness else passed("degeneracy_identities"))

    C = chain_complex(X)
    d = C.d
    checks.append(residual_report("d_squared", compose(d, d), "d∘d is nonzero"))
    delta = diagonal_map(X)
    chain_map = compose(delta, d) - compose(tensor_differential([d, d]), delta)
    checks.append(residual_report("diagonal_chain_map", chain_map, "Δ∘d differs from d_⊗∘Δ"))
    one = identity(C.space)
    coassoc = compose(tensor_many([delta, one]), delta) - compose(tensor_many([one, delta]), delta)
    checks.append(residual_report("coassociativity", coassoc, "(Δ⊗id)Δ differs from (id⊗Δ)Δ"))
    eps = augmentation(X)
    left = compose(tensor_many([eps, one]), delta)
    right = compose(tensor_many([one, eps]), delta)
    left = compose(_unitor(left.target, C.space, 0), left) - one
    right = compose(_unitor(right.target, C.space, 1), right) - one
    checks.append(residual_report("counit_left", left, "(ε⊗id)Δ is not the identity"))
    checks.append(residual_report("counit_right", right, "(id⊗ε)Δ is not the identity"))
    return combine("cubical", checks, {"name": X.name, "dims": {str(k): len(X.nondegenerate(k)) for k in X.cubes}})


def cubes_of_dimension(X: CubicalSet, k: int) -> List[str]:
    if k not in X.cubes:
        raise SchemaError(f"{X.name} has no cubes of dimension {k}")
    return X.nondegenerate(k)
