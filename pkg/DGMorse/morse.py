"""
Enriched Morse complexes with coefficients in a DG module.

A twisting cocycle assigns to pairs of critical points x, y with |x| > |y|
an algebra element m_{x,y} of degree |x| − |y| − 1. The enriched complex is
𝓕 ⊗ span(Crit) with

    d(α⊗x) = dα⊗x + (−1)^{|α|} Σ_y α·m_{x,y} ⊗ y

and is filtered by critical index.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np
import pandas as pd

from .algebra import (GradedMap, GradedSpace, Key, Vector, compose, identity, join_keys, map_sum,
                      tensor_many, tensor_product, to_scalar, vector_to_dict)
from .ainfty import AInftyMorphism, DGAlgebra, StrictModule, compose_morphisms
from .complexes import ChainComplex, ShiftedChainMap, homology, verify_chain_map
from .exceptions import ArityBoundError, ComplexError, DegreeMismatchError, SchemaError
from .linalg import EchelonBasis, kernel_basis, rank
from .reports import combine, failed, first_difference, passed, residual_report

logger = logging.getLogger(__name__)


class CriticalSet:
    """Critical points with their Morse indices, in declared order"""

    def __init__(self, points: Mapping[str, int]):
        self.points: Dict[str, int] = {}
        for label, index in points.items():
            if label in self.points:
                raise SchemaError(f"critical point {label!r} is declared twice")
            if int(index) < 0:
                raise SchemaError(f"Morse index of {label!r} is negative")
            self.points[str(label)] = int(index)
        if not self.points:
            raise SchemaError("a critical set is nonempty")
        basis: Dict[int, List[str]] = {}
        for label, index in self.points.items():
            basis.setdefault(index, []).append(label)
        self.space = GradedSpace.build(basis)

    def index(self, x: str) -> int:
        try:
            return self.points[x]
        except KeyError:
            raise SchemaError(f"unknown critical point {x!r}")

    def key(self, x: str) -> Key:
        return (self.index(x), x)

    @property
    def labels(self) -> List[str]:
        return list(self.points)

    @property
    def index_span(self) -> int:
        return max(self.points.values()) - min(self.points.values())

    def __eq__(self, other):
        if not isinstance(other, CriticalSet):
            return NotImplemented
        return self.points == other.points

    def __hash__(self):
        return hash(tuple(self.points.items()))


class TwistingCocycle:
    """Connection coefficients m_{x,y} ∈ A"""

    def __init__(self, algebra: DGAlgebra, crit: CriticalSet,
                 entries: Mapping[Tuple[str, str], Mapping[Key, object]], name: str = ""):
        self.algebra = algebra
        self.crit = crit
        self.name = name
        self.entries: Dict[Tuple[str, str], Vector] = {}
        for (x, y), element in entries.items():
            ix, iy = crit.index(x), crit.index(y)
            if ix <= iy:
                raise DegreeMismatchError(f"entry m_({x},{y}) needs |{x}| > |{y}|, got {ix} ≤ {iy}")
            expected = ix - iy - 1
            vector = {}
            for key, c in element.items():
                if key not in algebra.space:
                    raise SchemaError(f"entry m_({x},{y}) uses unknown algebra basis {key!r}")
                if key[0] != expected:
                    raise DegreeMismatchError(
                        f"entry m_({x},{y}) has a term of degree {key[0]}, expected {expected}",
                        {"pair": [x, y], "degree": key[0]})
                c = to_scalar(c)
                if c:
                    vector[key] = c
            if vector:
                self.entries[(x, y)] = vector

    def entry(self, x: str, y: str) -> Vector:
        return self.entries.get((x, y), {})

    def __eq__(self, other):
        if not isinstance(other, TwistingCocycle):
            return NotImplemented
        return self.algebra == other.algebra and self.crit == other.crit and self.entries == other.entries

    def __hash__(self):
        return hash(self.crit)

    def as_map(self) -> GradedMap:
        """𝒎̃: x ↦ Σ_y m_{x,y}⊗y, a degree −1 map Crit → A⊗Crit."""
        target = tensor_product(self.algebra.space, self.crit.space)
        arities = [self.algebra.space.arity, 1]
        columns = {}
        for (x, y), element in self.entries.items():
            y_key = self.crit.key(y)
            column = columns.setdefault(self.crit.key(x), {})
            for a, c in element.items():
                column[join_keys([a, y_key], arities)] = c
        return GradedMap(self.crit.space, target, -1, columns, check=False)

    def to_dict(self) -> dict:
        return {
            "critical": dict(self.crit.points),
            "entries": [{"pair": [x, y], "value": vector_to_dict(v)} for (x, y), v in self.entries.items()],
        }


def zero_cocycle(algebra: DGAlgebra, crit: CriticalSet) -> TwistingCocycle:
    return TwistingCocycle(algebra, crit, {}, "zero")


def cocycle_residual(T: TwistingCocycle, x: str, y: str) -> Vector:
    """d m_{x,y} − Σ_z (−1)^{|x|−|z|} m_{x,z} m_{z,y}"""
    A = T.algebra
    ix, iy = T.crit.index(x), T.crit.index(y)
    out = dict(A.d.apply(T.entry(x, y)))
    for z in T.crit.labels:
        iz = T.crit.index(z)
        if not iy < iz < ix:
            continue
        product = A.multiply(T.entry(x, z), T.entry(z, y))
        factor = -1 if (ix - iz) % 2 == 0 else 1
        for key, c in product.items():
            value = out.get(key, 0) + factor * c
            if value:
                out[key] = value
            else:
                out.pop(key, None)
    return out


def verify_twisting_cocycle(T: TwistingCocycle) -> dict:
    for x in T.crit.labels:
        for y in T.crit.labels:
            if T.crit.index(x) <= T.crit.index(y):
                continue
            residual = cocycle_residual(T, x, y)
            if residual:
                witness = {"pair": [x, y], "degree": T.crit.index(x) - T.crit.index(y) - 2,
                           "value": vector_to_dict(residual)}
                return failed("twisting_cocycle", f"cocycle identity fails at ({x}, {y})", witness)
    return passed("twisting_cocycle", {"critical_points": len(T.crit.points), "entries": len(T.entries)})


class EnrichedComplex:
    """𝓕 ⊗ span(Crit) with the twisted differential"""

    def __init__(self, fiber: StrictModule, cocycle: TwistingCocycle, complex: ChainComplex):
        self.fiber = fiber
        self.cocycle = cocycle
        self.complex = complex

    @property
    def space(self) -> GradedSpace:
        return self.complex.space

    @property
    def d(self) -> GradedMap:
        return self.complex.d

    @staticmethod
    def filtration(key: Key) -> int:
        """Critical index p of a basis tensor α⊗x."""
        return key[1][-1][0]

    def __repr__(self):
        return f"EnrichedComplex(fiber={self.fiber.name or 'unnamed'}, dims={self.space.dims()})"


def enriched_differential(F: StrictModule, T: TwistingCocycle) -> GradedMap:
    one_crit = identity(T.crit.space)
    untwisted = tensor_many([F.complex.d, one_crit])
    connection = tensor_many([identity(F.space), T.as_map()])
    twist = compose(tensor_many([F.action, one_crit]), connection)
    return untwisted + twist


def build_enriched(F: StrictModule, T: TwistingCocycle) -> EnrichedComplex:
    if not (F.algebra == T.algebra):
        raise SchemaError("fiber module and cocycle are over different algebras")
    space = tensor_product(F.space, T.crit.space)
    complex = ChainComplex(space, enriched_differential(F, T), check=False)
    witness = complex.square_witness()
    if witness:
        raise ComplexError(f"enriched differential squares to a nonzero map in degree {witness['degree']}", witness)
    logger.debug(f"Built enriched complex with dims {space.dims()}")
    return EnrichedComplex(F, T, complex)


def verify_enriched(E: EnrichedComplex) -> dict:
    return combine("enriched", [
        verify_twisting_cocycle(E.cocycle),
        residual_report("d_squared", compose(E.d, E.d), "enriched differential squares to a nonzero map"),
    ])


def required_arity(T: TwistingCocycle) -> int:
    return T.crit.index_span + 1


def induce_morphism(eta: AInftyMorphism, E1: EnrichedComplex, E2: EnrichedComplex) -> ShiftedChainMap:
    """η̃ = Σ_k (η_{k+1}⊗id)∘(id⊗𝒎̃^k), a chain map of degree shift(η)."""
    if eta.source.carrier != E1.fiber.space or eta.target.carrier != E2.fiber.space:
        raise SchemaError("morphism fibers do not match the enriched complexes")
    if not (E1.cocycle == E2.cocycle):
        raise SchemaError("enriched complexes use different twisting cocycles")
    T = E1.cocycle
    needed = required_arity(T)
    if eta.arity_bound < needed:
        raise ArityBoundError(f"arity bound {eta.arity_bound} is too small; the induced map needs {needed}",
                              {"required": needed, "arity_bound": eta.arity_bound})
    A = T.algebra
    one_crit = identity(T.crit.space)
    mtilde = T.as_map()
    walk = identity(E1.space)
    terms = []
    for k in range(needed):
        terms.append(compose(tensor_many([eta.component(k + 1), one_crit]), walk))
        prefix = identity(tensor_product(E1.fiber.space, *([A.space] * k)))
        walk = compose(tensor_many([prefix, mtilde]), walk)
        if walk.is_zero():
            break
    induced = map_sum(terms, E1.space, E2.space, eta.shift)
    return ShiftedChainMap(E1.complex, E2.complex, induced)


def check_functoriality(eta: AInftyMorphism, zeta: AInftyMorphism,
                        E1: EnrichedComplex, E2: EnrichedComplex, E3: EnrichedComplex) -> dict:
    """(η∘ζ)~ against η̃∘ζ̃ for ζ: 𝓕1 → 𝓕2 and η: 𝓕2 → 𝓕3."""
    composite = induce_morphism(compose_morphisms(eta, zeta), E1, E3).map
    separate = compose(induce_morphism(eta, E2, E3).map, induce_morphism(zeta, E1, E2).map)
    witness = first_difference(composite, separate)
    if witness:
        return failed("functoriality", "induced map of a composite differs from the composite of induced maps",
                      witness)
    return passed("functoriality")


def verify_induced(eta: AInftyMorphism, E1: EnrichedComplex, E2: EnrichedComplex) -> dict:
    return verify_chain_map(induce_morphism(eta, E1, E2))


@dataclass
class FiltrationPages:
    """Dimensions of E^r_{p,q} (p = critical index, q = fiber degree) and ranks of d^r"""

    p_values: List[int]
    q_values: List[int]
    pages: Dict[int, np.ndarray] = field(default_factory=dict)
    ranks: Dict[int, np.ndarray] = field(default_factory=dict)
    infinity: Optional[np.ndarray] = None
    infinity_page: int = 0
    homology_dims: Dict[int, int] = field(default_factory=dict)
    checks: List[dict] = field(default_factory=list)

    def page(self, r: int) -> np.ndarray:
        if r not in self.pages:
            raise SchemaError(f"page {r} was not computed (pages {sorted(self.pages)})")
        return self.pages[r]

    def dim(self, r: int, p: int, q: int) -> int:
        grid = self.page(r)
        if p not in self.p_values or q not in self.q_values:
            return 0
        return int(grid[self.p_values.index(p), self.q_values.index(q)])

    def infinity_totals(self) -> Dict[int, int]:
        totals: Dict[int, int] = {}
        for a, p in enumerate(self.p_values):
            for b, q in enumerate(self.q_values):
                if self.infinity[a, b]:
                    totals[p + q] = totals.get(p + q, 0) + int(self.infinity[a, b])
        return totals

    def differentials_vanish(self, from_page: int) -> bool:
        return all(not grid.any() for r, grid in self.ranks.items() if r >= from_page)

    def table(self, r: Optional[int] = None) -> pd.DataFrame:
        """Rows are fiber degrees q, columns critical indices p."""
        grid = self.infinity if r is None else self.page(r)
        frame = pd.DataFrame(grid.T, index=self.q_values, columns=self.p_values)
        frame.index.name = "q"
        frame.columns.name = "p"
        return frame

    def to_dict(self) -> dict:
        def grid_dict(grid: np.ndarray) -> Dict[str, int]:
            return {f"{p},{q}": int(grid[a, b]) for a, p in enumerate(self.p_values)
                    for b, q in enumerate(self.q_values) if grid[a, b]}
        return {
            "p_values": self.p_values,
            "q_values": self.q_values,
            "pages": {str(r): grid_dict(grid) for r, grid in self.pages.items()},
            "differential_ranks": {str(r): grid_dict(grid) for r, grid in self.ranks.items()},
            "infinity": grid_dict(self.infinity),
            "infinity_page": self.infinity_page,
            "homology_dims": {str(n): d for n, d in self.homology_dims.items()},
        }


class _FiltrationSolver:
    """Z^r_p = F_p ∩ d⁻¹F_{p−r} and D^r_p = Z^{r−1}_{p−1} + dZ^{r−1}_{p+r−1}, per total degree."""

    def __init__(self, E: EnrichedComplex):
        self.E = E
        self.order = E.space.position
        self._z: Dict[Tuple[int, int, int], List[Vector]] = {}
        self._reps: Dict[Tuple[int, int, int], Tuple[List[Vector], List[Vector]]] = {}

    def keys(self, n: int, p: int, exact: bool = False) -> List[Key]:
        test = (lambda v: v == p) if exact else (lambda v: v <= p)
        return [key for key in self.E.space.keys(n) if test(self.E.filtration(key))]

    def Z(self, r: int, p: int, n: int) -> List[Vector]:
        if (r, p, n) not in self._z:
            keys = self.keys(n, p)
            if r < 0:
                vectors = [{key: Fraction(1)} for key in keys]
            else:
                columns = []
                for key in keys:
                    image = self.E.d.column(key)
                    columns.append((key, {k: c for k, c in image.items() if self.E.filtration(k) > p - r}))
                vectors = kernel_basis(columns, self.order)
            self._z[(r, p, n)] = vectors
        return self._z[(r, p, n)]

    def D(self, r: int, p: int, n: int) -> List[Vector]:
        images = [self.E.d.apply(z) for z in self.Z(r - 1, p + r - 1, n + 1)]
        return self.Z(r - 1, p - 1, n) + [v for v in images if v]

    def representatives(self, r: int, p: int, n: int) -> Tuple[List[Vector], List[Vector]]:
        """(basis of D, representatives of Z/D)."""
        if (r, p, n) not in self._reps:
            span = EchelonBasis(self.order)
            boundary = []
            for v in self.D(r, p, n):
                if span.add(v)[0]:
                    boundary.append(v)
            reps = [z for z in self.Z(r, p, n) if span.add(z)[0]]
            self._reps[(r, p, n)] = (boundary, reps)
        return self._reps[(r, p, n)]

    def differential_rank(self, r: int, p: int, n: int) -> int:
        _, reps = self.representatives(r, p, n)
        if not reps:
            return 0
        boundary, targets = self.representatives(r, p - r, n - 1)
        if not targets:
            return 0
        basis = EchelonBasis(self.order)
        for i, v in enumerate(boundary):
            basis.add(v, ("D", i))
        for j, v in enumerate(targets):
            basis.add(v, ("R", j))
        images = []
        for z in reps:
            coords = basis.express(self.E.d.apply(z))
            if coords is None:
                raise ComplexError(f"d^{r} leaves Z^{r} at filtration {p - r}, degree {n - 1}")
            images.append({tag: c for tag, c in coords.items() if tag[0] == "R"})
        return rank(images)


def spectral_sequence(E: EnrichedComplex, r_max: int) -> FiltrationPages:
    """Pages E^0 … E^{r_max} and E^∞ of the critical-index filtration."""
    if r_max < 0:
        raise SchemaError("r_max must be nonnegative")
    solver = _FiltrationSolver(E)
    p_values = sorted(set(E.cocycle.crit.points.values()))
    p_values = list(range(p_values[0], p_values[-1] + 1))
    q_values = list(E.fiber.space.degrees)
    q_values = list(range(q_values[0], q_values[-1] + 1)) if q_values else [0]
    degrees = E.space.degrees
    shape = (len(p_values), len(q_values))
    r_inf = p_values[-1] - p_values[0] + 1
    pages = FiltrationPages(p_values, q_values, infinity_page=r_inf)

    def dims_at(r: int) -> np.ndarray:
        grid = np.zeros(shape, dtype=np.int64)
        for a, p in enumerate(p_values):
            for b, q in enumerate(q_values):
                if p + q in degrees:
                    grid[a, b] = len(solver.representatives(r, p, p + q)[1])
        return grid

    for r in range(r_max + 1):
        pages.pages[r] = dims_at(r)
        ranks = np.zeros(shape, dtype=np.int64)
        for a, p in enumerate(p_values):
            for b, q in enumerate(q_values):
                if p + q in degrees:
                    ranks[a, b] = solver.differential_rank(r, p, p + q)
        pages.ranks[r] = ranks
        logger.debug(f"E^{r} total dimension {int(pages.pages[r].sum())}")
    pages.infinity = dims_at(max(r_inf, 0))

    failures = []
    for r in range(r_max):
        nxt = pages.pages[r + 1]
        for a, p in enumerate(p_values):
            for b, q in enumerate(q_values):
                incoming = 0
                if p + r in p_values and q - r + 1 in q_values:
                    incoming = pages.ranks[r][p_values.index(p + r), q_values.index(q - r + 1)]
                expected = pages.pages[r][a, b] - pages.ranks[r][a, b] - incoming
                if nxt[a, b] != expected:
                    failures.append({"page": r + 1, "p": p, "q": q, "value": int(nxt[a, b]), "expected": int(expected)})
    pages.checks.append(failed("page_homology", "E^{r+1} differs from the homology of (E^r, d^r)", failures[0])
                        if failures else passed("page_homology"))

    pages.homology_dims = {n: d for n, d in homology(E.complex).dims().items()}
    totals = pages.infinity_totals()
    bad = next((n for n in degrees if totals.get(n, 0) != pages.homology_dims.get(n, 0)), None)
    if bad is None:
        pages.checks.append(passed("convergence"))
    else:
        pages.checks.append(failed("convergence", f"E^∞ does not add up to the homology in degree {bad}",
                                   {"degree": bad, "infinity": totals.get(bad, 0),
                                    "homology": pages.homology_dims.get(bad, 0)}))
    return pages


def verify_spectral_sequence(pages: FiltrationPages) -> dict:
    return combine("spectral_sequence", pages.checks, {"infinity_page": pages.infinity_page})
