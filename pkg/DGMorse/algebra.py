"""
Graded vector spaces with labelled bases and degree-shifting linear maps.

A basis vector is a key (degree, label). Tensor products flatten their
factors; a tensor key carries the tuple of primitive keys as its label.
All coefficients are exact Fractions.
"""

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Dict, Hashable, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .exceptions import CompositionError, DegreeMismatchError, FiberError, SchemaError
from .linalg import axpy

logger = logging.getLogger(__name__)

Key = Tuple[int, Hashable]
Vector = Dict[Key, Fraction]

_RATIONAL = re.compile(r"^\s*[+-]?\d+\s*(/\s*\d+\s*)?$")


def to_scalar(value) -> Fraction:
    """Coerce an int, Fraction or 'p/q' string into an exact scalar."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise SchemaError(f"boolean is not a scalar: {value!r}")
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, str):
        if not _RATIONAL.match(value):
            raise SchemaError(f"scalar must be written as an integer or p/q: {value!r}")
        try:
            return Fraction(value.replace(" ", ""))
        except ZeroDivisionError:
            raise SchemaError(f"zero denominator in scalar {value!r}")
    raise SchemaError(f"unsupported scalar type {type(value).__name__}: {value!r}")


def format_scalar(value: Fraction) -> str:
    return str(value)


def sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


@dataclass(frozen=True, eq=False)
class GradedSpace:
    """
    Finite graded space; `basis` is a degree-sorted tuple of (degree, labels).

    Declared degrees without basis vectors are kept for reporting but do not
    take part in equality.
    """

    basis: Tuple[Tuple[int, Tuple[Hashable, ...]], ...]
    factors: Tuple['GradedSpace', ...] = ()
    _index: Dict[Key, int] = field(default=None, repr=False, compare=False)
    _hash: int = field(default=0, repr=False, compare=False)
    _support: tuple = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        index = {}
        previous = None
        for degree, labels in self.basis:
            if previous is not None and degree <= previous:
                raise SchemaError(f"degrees must be strictly increasing, got {degree} after {previous}")
            previous = degree
            if len(set(labels)) != len(labels):
                raise SchemaError(f"basis labels repeat in degree {degree}")
            for label in labels:
                index[(degree, label)] = len(index)
        support = tuple((q, labels) for q, labels in self.basis if labels)
        object.__setattr__(self, '_index', index)
        object.__setattr__(self, '_support', support)
        object.__setattr__(self, '_hash', hash((support, self.factors)))

    @classmethod
    def build(cls, mapping: Mapping[int, Sequence[Hashable]],
              degrees: Optional[Iterable[int]] = None) -> 'GradedSpace':
        declared = set(int(q) for q in mapping)
        if degrees is not None:
            declared |= set(int(q) for q in degrees)
        basis = tuple((q, tuple(mapping.get(q, ()))) for q in sorted(declared))
        return cls(basis)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, GradedSpace):
            return NotImplemented
        return self._hash == other._hash and self._support == other._support and self.factors == other.factors

    def __repr__(self):
        dims = ", ".join(f"{q}:{len(labels)}" for q, labels in self.basis)
        return f"GradedSpace(arity={self.arity}, dims={{{dims}}})"

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(q for q, _ in self.basis)

    @property
    def arity(self) -> int:
        return len(self.factors) or 1

    def labels(self, q: int) -> Tuple[Hashable, ...]:
        for degree, labels in self.basis:
            if degree == q:
                return labels
        return ()

    def dim(self, q: Optional[int] = None) -> int:
        if q is None:
            return len(self._index)
        return len(self.labels(q))

    def dims(self) -> Dict[int, int]:
        return {q: len(labels) for q, labels in self.basis}

    def keys(self, q: Optional[int] = None) -> List[Key]:
        if q is not None:
            return [(q, label) for label in self.labels(q)]
        return list(self._index)

    def position(self, key: Key) -> int:
        return self._index[key]

    def __contains__(self, key) -> bool:
        return key in self._index

    def __iter__(self) -> Iterator[Key]:
        return iter(self._index)

    def shift(self, k: int) -> 'GradedSpace':
        if self.factors:
            raise SchemaError("only primitive spaces can be shifted")
        return GradedSpace(tuple((q + k, labels) for q, labels in self.basis))

    def subspace(self, keys: Iterable[Key]) -> 'GradedSpace':
        """Primitive space spanned by a subset of basis keys, in declared order."""
        if self.factors:
            raise SchemaError("subspaces are only taken of primitive spaces")
        wanted = set(keys)
        missing = [key for key in wanted if key not in self._index]
        if missing:
            raise SchemaError(f"unknown basis keys {sorted(map(str, missing))}")
        return GradedSpace(tuple(
            (q, tuple(label for label in labels if (q, label) in wanted)) for q, labels in self.basis
        ))

    def to_dict(self) -> dict:
        return {
            "degrees": list(self.degrees),
            "basis": {str(q): [format_label(label) for label in labels] for q, labels in self.basis},
        }


def format_label(label: Hashable) -> str:
    if isinstance(label, tuple) and label and isinstance(label[0], tuple):
        return "⊗".join(format_label(key[1]) for key in label)
    return str(label)


def format_key(key: Key) -> str:
    return format_label(key[1])


@lru_cache(maxsize=4096)
def _tensor_of_primitives(prims: Tuple[GradedSpace, ...]) -> GradedSpace:
    by_degree: Dict[int, List[Hashable]] = {}
    for combination in product(*(prim.keys() for prim in prims)):
        total = sum(key[0] for key in combination)
        by_degree.setdefault(total, []).append(tuple(combination))
    declared = set()
    for degrees in product(*(prim.degrees for prim in prims)):
        declared.add(sum(degrees))
    basis = tuple((q, tuple(by_degree.get(q, ()))) for q in sorted(declared))
    return GradedSpace(basis, prims)


def tensor_product(*spaces: GradedSpace) -> GradedSpace:
    """Flattened tensor product; a single argument is returned unchanged."""
    prims: List[GradedSpace] = []
    for space in spaces:
        prims.extend(space.factors or (space,))
    if len(prims) == 1:
        return prims[0]
    return _tensor_of_primitives(tuple(prims))


def tensor_spaces(V: GradedSpace, W: GradedSpace) -> GradedSpace:
    return tensor_product(V, W)


def split_key(key: Key, arities: Sequence[int]) -> List[Key]:
    if len(arities) == 1:
        return [key]
    prims = key[1]
    parts = []
    start = 0
    for arity in arities:
        chunk = prims[start:start + arity]
        start += arity
        if arity == 1:
            parts.append(chunk[0])
        else:
            parts.append((sum(k[0] for k in chunk), chunk))
    return parts


def join_keys(subkeys: Sequence[Key], arities: Sequence[int]) -> Key:
    prims: List[Key] = []
    for key, arity in zip(subkeys, arities):
        if arity == 1:
            prims.append(key)
        else:
            prims.extend(key[1])
    if len(prims) == 1:
        return prims[0]
    return (sum(k[0] for k in prims), tuple(prims))


class GradedMap:
    """
    Sparse degree-shifting linear map.

    Columns map a source key to the dict of its nonzero target coefficients.
    A map is total on the declared degrees and zero elsewhere.
    """

    __slots__ = ("source", "target", "degree", "_columns")

    def __init__(self, source: GradedSpace, target: GradedSpace, degree: int,
                 columns: Optional[Mapping[Key, Mapping[Key, object]]] = None, check: bool = True):
        self.source = source
        self.target = target
        self.degree = degree
        cleaned: Dict[Key, Vector] = {}
        for src, column in (columns or {}).items():
            if check and src not in source:
                raise DegreeMismatchError(f"column {format_key(src)} (degree {src[0]}) is not a source basis vector")
            out = {}
            for tgt, value in column.items():
                coefficient = to_scalar(value) if check else value
                if not coefficient:
                    continue
                if check:
                    if tgt not in target:
                        raise DegreeMismatchError(
                            f"entry {format_key(tgt)} (degree {tgt[0]}) is not a target basis vector",
                            {"degree": src[0], "basis": format_key(src)})
                    if tgt[0] != src[0] + degree:
                        raise DegreeMismatchError(
                            f"entry maps degree {src[0]} to {tgt[0]}, expected {src[0] + degree}",
                            {"degree": src[0], "basis": format_key(src), "target": format_key(tgt)})
                out[tgt] = coefficient
            if out:
                cleaned[src] = out
        self._columns = cleaned

    def __repr__(self):
        return f"GradedMap(degree={self.degree}, nnz={self.nnz}, source={self.source!r}, target={self.target!r})"

    # Access

    def column(self, key: Key) -> Vector:
        return self._columns.get(key, {})

    def items(self):
        return self._columns.items()

    def apply(self, vector: Mapping[Key, Fraction]) -> Vector:
        out: Vector = {}
        for key, coefficient in vector.items():
            column = self._columns.get(key)
            if column:
                axpy(out, coefficient, column)
        return out

    __call__ = apply

    def entries(self) -> Iterator[Tuple[Key, Key, Fraction]]:
        for src in self.source:
            column = self._columns.get(src)
            if not column:
                continue
            for tgt in sorted(column, key=self.target.position):
                yield src, tgt, column[tgt]

    def block(self, q: int) -> List[List[Fraction]]:
        """Dense matrix from source degree q to target degree q + degree."""
        rows = self.target.keys(q + self.degree)
        cols = self.source.keys(q)
        return [[self.column(c).get(r, Fraction(0)) for c in cols] for r in rows]

    @property
    def nnz(self) -> int:
        return sum(len(column) for column in self._columns.values())

    def is_zero(self) -> bool:
        return not self._columns

    # Arithmetic

    def _check_parallel(self, other: 'GradedMap'):
        if self.source != other.source or self.target != other.target or self.degree != other.degree:
            raise CompositionError(
                f"maps are not parallel: degrees {self.degree} and {other.degree} or spaces differ")

    def __eq__(self, other):
        if not isinstance(other, GradedMap):
            return NotImplemented
        return (self.degree == other.degree and self.source == other.source
                and self.target == other.target and self._columns == other._columns)

    def __add__(self, other: 'GradedMap') -> 'GradedMap':
        self._check_parallel(other)
        columns = {src: dict(column) for src, column in self._columns.items()}
        for src, column in other._columns.items():
            axpy(columns.setdefault(src, {}), Fraction(1), column)
        return GradedMap(self.source, self.target, self.degree, columns, check=False)

    def __neg__(self) -> 'GradedMap':
        return self.scale(-1)

    def __sub__(self, other: 'GradedMap') -> 'GradedMap':
        return self + (-other)

    def scale(self, factor) -> 'GradedMap':
        factor = to_scalar(factor)
        if not factor:
            return zero_map(self.source, self.target, self.degree)
        columns = {src: {tgt: factor * c for tgt, c in column.items()} for src, column in self._columns.items()}
        return GradedMap(self.source, self.target, self.degree, columns, check=False)

    def __rmul__(self, factor) -> 'GradedMap':
        return self.scale(factor)

    def __matmul__(self, other: 'GradedMap') -> 'GradedMap':
        return compose(self, other)

    # Restriction

    def restrict(self, subspace: GradedSpace) -> 'GradedMap':
        columns = {src: column for src, column in self._columns.items() if src in subspace}
        return GradedMap(subspace, self.target, self.degree, columns, check=False)

    def corestrict(self, subspace: GradedSpace) -> 'GradedMap':
        for src, column in self._columns.items():
            for tgt in column:
                if tgt not in subspace:
                    raise FiberError(
                        f"image of {format_key(src)} leaves the subspace at {format_key(tgt)}",
                        {"degree": src[0], "basis": format_key(src), "value": {format_key(tgt): str(column[tgt])}})
        return GradedMap(self.source, subspace, self.degree, self._columns, check=False)


def _first_mismatch(left: GradedSpace, right: GradedSpace) -> str:
    for q in sorted(set(left.degrees) | set(right.degrees)):
        if left.labels(q) != right.labels(q):
            return f"degree {q}"
    if left.factors != right.factors:
        return "tensor factorisation"
    return "declared degrees"


def compose(g: GradedMap, f: GradedMap) -> GradedMap:
    """g∘f, blockwise."""
    if g.source != f.target:
        raise CompositionError(f"cannot compose: spaces differ in {_first_mismatch(g.source, f.target)}")
    columns = {}
    for src, column in f.items():
        out: Vector = {}
        for mid, coefficient in column.items():
            image = g.column(mid)
            if image:
                axpy(out, coefficient, image)
        if out:
            columns[src] = out
    return GradedMap(f.source, g.target, f.degree + g.degree, columns, check=False)


def identity(space: GradedSpace) -> GradedMap:
    one = Fraction(1)
    return GradedMap(space, space, 0, {key: {key: one} for key in space}, check=False)


def zero_map(source: GradedSpace, target: GradedSpace, degree: int = 0) -> GradedMap:
    return GradedMap(source, target, degree, {}, check=False)


def map_sum(maps: Iterable[GradedMap], source: GradedSpace, target: GradedSpace, degree: int) -> GradedMap:
    columns: Dict[Key, Vector] = {}
    for piece in maps:
        if piece.source != source or piece.target != target or piece.degree != degree:
            raise CompositionError("summands are not parallel maps")
        for src, column in piece.items():
            axpy(columns.setdefault(src, {}), Fraction(1), column)
    columns = {src: column for src, column in columns.items() if column}
    return GradedMap(source, target, degree, columns, check=False)


def tensor_many(maps: Sequence[GradedMap]) -> GradedMap:
    """
    f_1⊗...⊗f_n with the Koszul rule: passing f_j over v_i (i < j)
    costs (−1)^{|f_j||v_i|}.
    """
    if len(maps) == 1:
        return maps[0]
    source = tensor_product(*(m.source for m in maps))
    target = tensor_product(*(m.target for m in maps))
    degree = sum(m.degree for m in maps)
    source_arities = [m.source.arity for m in maps]
    target_arities = [m.target.arity for m in maps]
    columns: Dict[Key, Vector] = {}
    for chosen in product(*(list(m.items()) for m in maps)):
        parity = 0
        passed = 0
        for (src, _), m in zip(chosen, maps):
            parity += m.degree * passed
            passed += src[0]
        coefficient_sign = sign(parity)
        src_key = join_keys([src for src, _ in chosen], source_arities)
        out = columns.setdefault(src_key, {})
        for entries in product(*(column.items() for _, column in chosen)):
            value = Fraction(coefficient_sign)
            for _, c in entries:
                value *= c
            tgt_key = join_keys([tgt for tgt, _ in entries], target_arities)
            new = out.get(tgt_key, 0) + value
            if new:
                out[tgt_key] = new
            else:
                out.pop(tgt_key, None)
    columns = {src: column for src, column in columns.items() if column}
    return GradedMap(source, target, degree, columns, check=False)


def tensor_maps(f: GradedMap, g: GradedMap) -> GradedMap:
    return tensor_many([f, g])


def tensor_differential(differentials: Sequence[GradedMap]) -> GradedMap:
    """Σ_j id⊗...⊗d_j⊗...⊗id on the tensor product of the complexes."""
    ids = [identity(d.source) for d in differentials]
    pieces = []
    for j, d in enumerate(differentials):
        factors = list(ids)
        factors[j] = d
        pieces.append(tensor_many(factors))
    if len(pieces) == 1:
        return pieces[0]
    return map_sum(pieces, pieces[0].source, pieces[0].target, pieces[0].degree)


def vector_to_dict(vector: Mapping[Key, Fraction]) -> Dict[str, str]:
    return {format_key(key): format_scalar(value) for key, value in vector.items()}
