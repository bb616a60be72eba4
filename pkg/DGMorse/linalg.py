"""
Exact linear algebra over the rationals on sparse coordinate vectors.

Vectors are dicts mapping hashable coordinates to nonzero Fractions.
Elimination is deterministic: pivots are chosen by a caller-supplied
ordering, falling back to the vector's own key order.
"""

from fractions import Fraction
from typing import Any, Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

Vector = Dict[Hashable, Fraction]


def axpy(y: Vector, a: Fraction, x: Vector) -> Vector:
    """In place y += a*x, dropping coordinates that cancel."""
    if not a:
        return y
    for key, value in x.items():
        new = y.get(key, 0) + a * value
        if new:
            y[key] = new
        else:
            y.pop(key, None)
    return y


def scale(a: Fraction, x: Vector) -> Vector:
    if not a:
        return {}
    return {key: a * value for key, value in x.items()}


class EchelonBasis:
    """
    Incrementally built echelon basis of a subspace.

    Every stored row has coefficient 1 at its pivot and zero at the pivots of
    all earlier rows. Rows remember how they were obtained from the added
    generators, so membership tests also return coordinates.
    """

    __slots__ = ["order", "rows"]

    def __init__(self, order: Optional[Callable[[Hashable], Any]] = None):
        self.order = order
        self.rows: List[Tuple[Hashable, Vector, Vector]] = []

    def __len__(self) -> int:
        return len(self.rows)

    def _pivot(self, vector: Vector) -> Hashable:
        if self.order is None:
            return next(iter(vector))
        return min(vector, key=self.order)

    def reduce(self, vector: Vector) -> Tuple[Vector, Vector]:
        """Return (residual, combination) with vector = residual + sum(combination[tag] * generator[tag])."""
        residual = dict(vector)
        combination: Vector = {}
        for pivot, row, row_combination in self.rows:
            coefficient = residual.get(pivot)
            if coefficient:
                axpy(residual, -coefficient, row)
                axpy(combination, coefficient, row_combination)
        return residual, combination

    def add(self, vector: Vector, tag: Hashable = None) -> Tuple[bool, Vector]:
        """
        Add a generator.

        Returns (True, {}) when the vector was independent, otherwise
        (False, combination) expressing it through earlier generators.
        """
        if tag is None:
            tag = len(self.rows)
        residual, combination = self.reduce(vector)
        if not residual:
            return False, combination
        pivot = self._pivot(residual)
        inverse = 1 / residual[pivot]
        row = scale(inverse, residual)
        row_combination = scale(-inverse, combination)
        axpy(row_combination, inverse, {tag: Fraction(1)})
        self.rows.append((pivot, row, row_combination))
        return True, {}

    def contains(self, vector: Vector) -> bool:
        residual, _ = self.reduce(vector)
        return not residual

    def express(self, vector: Vector) -> Optional[Vector]:
        """Coordinates of vector in terms of the generator tags, or None."""
        residual, combination = self.reduce(vector)
        if residual:
            return None
        return combination

    @property
    def pivots(self) -> List[Hashable]:
        return [pivot for pivot, _, _ in self.rows]


def rank(vectors: Iterable[Vector], order: Optional[Callable] = None) -> int:
    basis = EchelonBasis(order)
    for vector in vectors:
        basis.add(vector)
    return len(basis)


def kernel_basis(columns: Sequence[Tuple[Hashable, Vector]],
                 order: Optional[Callable] = None) -> List[Vector]:
    """
    Kernel of the linear map sending tag -> image.

    Each returned vector lives in tag coordinates. Columns are processed in
    the given order, so the basis is reproducible.
    """
    images = EchelonBasis(order)
    kernel = []
    for tag, image in columns:
        independent, combination = images.add(image, tag)
        if not independent:
            relation = {tag: Fraction(1)}
            axpy(relation, Fraction(-1), combination)
            kernel.append(relation)
    return kernel


def solve(generators: Sequence[Tuple[Hashable, Vector]], vector: Vector,
          order: Optional[Callable] = None) -> Optional[Vector]:
    basis = EchelonBasis(order)
    for tag, generator in generators:
        basis.add(generator, tag)
    return basis.express(vector)


def invert_columns(source_keys: Sequence[Hashable], target_keys: Sequence[Hashable],
                   columns: Dict[Hashable, Vector]) -> Dict[Hashable, Vector]:
    """
    Invert a square matrix given by its columns.

    Returns the columns of the inverse, indexed by target keys. Raises
    ValueError when the matrix is not square or is singular.
    """
    if len(source_keys) != len(target_keys):
        raise ValueError(f"matrix is {len(target_keys)}x{len(source_keys)}, not square")
    basis = EchelonBasis()
    for key in source_keys:
        basis.add(columns.get(key, {}), key)
    if len(basis) != len(source_keys):
        raise ValueError("matrix is singular")
    inverse = {}
    for key in target_keys:
        inverse[key] = basis.express({key: Fraction(1)})
    return inverse
