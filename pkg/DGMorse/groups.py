"""
Finite groups given by multiplication tables
"""

import logging
from functools import lru_cache
from itertools import product
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import GroupError

logger = logging.getLogger(__name__)


class FiniteGroup:
    """
    A group as an element list plus a Cayley table on indices.

    Methods take and return element labels; the table itself is indexed by
    position in `elements`. Group axioms are checked on construction.
    """

    def __init__(self, elements: Sequence[str], table, name: str = "group"):
        self.elements: Tuple[str, ...] = tuple(str(e) for e in elements)
        if len(set(self.elements)) != len(self.elements):
            raise GroupError("element labels repeat")
        self.table = np.asarray(table, dtype=np.int64)
        self.name = name
        self._index = {e: n for n, e in enumerate(self.elements)}
        self._check_axioms()
        self._identity = self._find_identity()
        self._inverse = [int(np.flatnonzero(self.table[a] == self._identity)[0]) for a in range(len(self))]

    def _check_axioms(self):
        n = len(self.elements)
        if n == 0:
            raise GroupError("a group has at least one element")
        if self.table.shape != (n, n):
            raise GroupError(f"table has shape {self.table.shape}, expected ({n}, {n})")
        if self.table.min() < 0 or self.table.max() >= n:
            raise GroupError("table entries must index elements")
        for row in range(n):
            if len(set(self.table[row].tolist())) != n or len(set(self.table[:, row].tolist())) != n:
                raise GroupError(f"row or column of {self.elements[row]} is not a permutation")
        left = self.table[self.table, :]
        for a, b in product(range(n), repeat=2):
            if not np.array_equal(left[a, b], self.table[a, self.table[b]]):
                raise GroupError(f"associativity fails at ({self.elements[a]}, {self.elements[b]}, ·)")

    def _find_identity(self) -> int:
        for e in range(len(self)):
            if np.array_equal(self.table[e], np.arange(len(self))):
                return e
        raise GroupError("no identity element")

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={len(self)})"

    def __eq__(self, other):
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        return self.elements == other.elements and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash(self.elements)

    def index(self, g: str) -> int:
        try:
            return self._index[g]
        except KeyError:
            raise GroupError(f"unknown group element {g!r}")

    @property
    def identity(self) -> str:
        return self.elements[self._identity]

    def mult(self, a: str, b: str) -> str:
        return self.elements[self.table[self.index(a), self.index(b)]]

    def inv(self, a: str) -> str:
        return self.elements[self._inverse[self.index(a)]]

    def conjugate(self, a: str, h: str) -> str:
        """h^{-1} a h"""
        return self.mult(self.inv(h), self.mult(a, h))

    def power(self, a: str, k: int) -> str:
        result = self.identity
        base = a if k >= 0 else self.inv(a)
        for _ in range(abs(k)):
            result = self.mult(result, base)
        return result

    def order(self, a: str) -> int:
        x, n = a, 1
        while x != self.identity:
            x = self.mult(x, a)
            n += 1
        return n

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def generator(self) -> Optional[str]:
        """The first listed element of full order, or None when the group is not cyclic."""
        if len(self) == 1:
            return self.identity
        return next((g for g in self.elements if self.order(g) == len(self)), None)

    def is_cyclic(self) -> bool:
        return self.generator() is not None

    def conjugacy_classes(self) -> List[Tuple[str, ...]]:
        return _classes(self)

    def class_of(self, g: str) -> Tuple[str, ...]:
        for cls in self.conjugacy_classes():
            if g in cls:
                return cls
        raise GroupError(f"unknown group element {g!r}")

    def representative(self, g: str) -> str:
        """The earliest declared element conjugate to g."""
        return self.class_of(g)[0]

    def to_dict(self) -> dict:
        return {"name": self.name, "elements": list(self.elements), "table": self.table.tolist()}

    @classmethod
    def from_function(cls, elements: Sequence[str], mult: Callable[[str, str], str], name: str) -> 'FiniteGroup':
        index = {e: n for n, e in enumerate(elements)}
        table = np.zeros((len(elements), len(elements)), dtype=np.int64)
        for (i, a), (j, b) in product(enumerate(elements), repeat=2):
            table[i, j] = index[mult(a, b)]
        return cls(elements, table, name)

    @classmethod
    def from_table(cls, elements: Sequence[str], rows: Sequence[Sequence[str]], name: str = "group") -> 'FiniteGroup':
        """Table given by element labels, rows[i][j] = elements[i]·elements[j]."""
        index = {str(e): n for n, e in enumerate(elements)}
        try:
            table = [[index[str(entry)] for entry in row] for row in rows]
        except KeyError as exc:
            raise GroupError(f"table mentions an unknown element {exc.args[0]!r}")
        return cls(elements, table, name)


@lru_cache(maxsize=64)
def _classes(G: FiniteGroup) -> List[Tuple[str, ...]]:
    seen = set()
    classes = []
    for g in G.elements:
        if g in seen:
            continue
        orbit = {G.conjugate(g, h) for h in G.elements}
        ordered = tuple(e for e in G.elements if e in orbit)
        seen.update(ordered)
        classes.append(ordered)
    logger.debug(f"{G.name}: {len(classes)} conjugacy classes")
    return classes


def conjugacy_classes(G: FiniteGroup) -> List[Tuple[str, ...]]:
    return G.conjugacy_classes()


def cyclic_group(m: int) -> FiniteGroup:
    if m < 1:
        raise GroupError(f"cyclic group order must be positive, got {m}")
    generator = "s" if m == 2 else "g"
    labels = ["1"] + [generator if k == 1 else f"{generator}^{k}" for k in range(1, m)]
    table = [[(i + j) % m for j in range(m)] for i in range(m)]
    return FiniteGroup(labels, table, f"C{m}")


def _quaternion_labels(m: int) -> Dict[Tuple[int, int], str]:
    if m == 2:
        return {(0, 0): "1", (2, 0): "-1", (1, 0): "i", (3, 0): "-i",
                (0, 1): "j", (2, 1): "-j", (1, 1): "k", (3, 1): "-k"}
    labels = {}
    for k in range(2 * m):
        power = "" if k == 0 else ("a" if k == 1 else f"a^{k}")
        labels[(k, 0)] = power or "1"
        labels[(k, 1)] = f"{power}b"
    return labels


def quaternion_group(m: int = 2) -> FiniteGroup:
    """Dicyclic group Q_{4m} = ⟨a, b | a^{2m}, b² = a^m, b a b^{-1} = a^{-1}⟩; m = 2 is Q8."""
    if m < 2:
        raise GroupError(f"Q_4m needs m ≥ 2, got {m}")
    labels = _quaternion_labels(m)
    pairs = list(labels) if m == 2 else [(k, e) for e in (0, 1) for k in range(2 * m)]

    def mult(x: Tuple[int, int], y: Tuple[int, int]) -> Tuple[int, int]:
        (k, e), (l, f) = x, y
        if e == 0:
            return (k + l) % (2 * m), f
        return (k - l + m * f) % (2 * m), (1 + f) % 2

    pair_of = {labels[p]: p for p in pairs}
    return FiniteGroup.from_function([labels[p] for p in pairs],
                                     lambda x, y: labels[mult(pair_of[x], pair_of[y])],
                                     "Q8" if m == 2 else f"Q{4 * m}")


def group_by_name(name: str) -> FiniteGroup:
    """C<m>, Z/<m>, Z<m> for cyclic groups; Q8, Q<4m> for quaternionic ones."""
    text = name.strip()
    upper = text.upper()
    try:
        if upper.startswith("Z/"):
            return cyclic_group(int(upper[2:]))
        if upper[:1] in ("C", "Z"):
            return cyclic_group(int(upper[1:]))
        if upper.startswith("Q"):
            order = int(upper[1:])
            if order % 4:
                raise GroupError(f"quaternionic group order must be divisible by 4, got {order}")
            return quaternion_group(order // 4)
    except ValueError:
        pass
    raise GroupError(f"unknown group name {name!r}")
