"""
String-topology calculator for spherical space forms Sⁿ/G.

The Pontryagin ring of the based loop space is ℝ[G][x] with x central of
degree n−1; free-loop homology has a basis x_{[g],k}, y_{[g],k} indexed by
conjugacy classes. Coefficients are exact; class collapsing may produce
multiplicities above one.
"""

import logging
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np

from .exceptions import GroupError, SchemaError
from .groups import FiniteGroup
from .reports import combine, failed, passed

logger = logging.getLogger(__name__)

Monomial = Tuple[str, int]
BasedPair = Tuple[Monomial, Monomial]


def _check_dimension(n: int):
    if n <= 1 or n % 2 == 0:
        raise SchemaError(f"sphere dimension must be odd and greater than one, got {n}")


def _add(target: Dict, key, value):
    total = target.get(key, 0) + value
    if total:
        target[key] = total
    else:
        target.pop(key, None)


class BasedLoopElement:
    """Sparse combination of monomials g·x^k in ℝ[G][x]"""

    def __init__(self, group: FiniteGroup, n: int, terms: Optional[Mapping[Monomial, object]] = None):
        self.group = group
        self.n = n
        self.terms: Dict[Monomial, Fraction] = {}
        for (g, k), c in (terms or {}).items():
            group.index(g)
            if k < 0:
                raise SchemaError(f"power of x must be nonnegative, got {k}")
            _add(self.terms, (g, int(k)), Fraction(c))

    @classmethod
    def monomial(cls, group: FiniteGroup, n: int, g: str, k: int = 0) -> 'BasedLoopElement':
        return cls(group, n, {(g, k): 1})

    def degrees(self) -> List[int]:
        return sorted({k * (self.n - 1) for _, k in self.terms})

    def __eq__(self, other):
        if not isinstance(other, BasedLoopElement):
            return NotImplemented
        return self.terms == other.terms

    def __add__(self, other: 'BasedLoopElement') -> 'BasedLoopElement':
        out = dict(self.terms)
        for key, c in other.terms.items():
            _add(out, key, c)
        return BasedLoopElement(self.group, self.n, out)

    def __mul__(self, other: 'BasedLoopElement') -> 'BasedLoopElement':
        """Pontryagin product: (g x^i)(h x^j) = gh x^{i+j}."""
        out: Dict[Monomial, Fraction] = {}
        for (g, i), a in self.terms.items():
            for (h, j), b in other.terms.items():
                _add(out, (self.group.mult(g, h), i + j), a * b)
        return BasedLoopElement(self.group, self.n, out)

    def __repr__(self):
        return " + ".join(f"{c}·{format_monomial(m)}" for m, c in sorted(self.terms.items())) or "0"


def format_monomial(m: Monomial) -> str:
    g, k = m
    return g if k == 0 else f"{g}x^{k}"


def based_coproduct(e: BasedLoopElement) -> Dict[BasedPair, Fraction]:
    """gx^k ↦ Σ_{i+j=k−1} Σ_h gh^{-1}x^i ⊗ hx^j, extended linearly."""
    _check_dimension(e.n)
    G = e.group
    out: Dict[BasedPair, Fraction] = {}
    for (g, k), c in e.terms.items():
        for i in range(k):
            j = k - 1 - i
            for h in G.elements:
                _add(out, ((G.mult(g, G.inv(h)), i), (h, j)), c)
    return out


def left_multiply(G: FiniteGroup, g: str, pairs: Mapping[BasedPair, Fraction]) -> Dict[BasedPair, Fraction]:
    out: Dict[BasedPair, Fraction] = {}
    for ((a, i), (b, j)), c in pairs.items():
        _add(out, ((G.mult(g, a), i), (b, j)), c)
    return out


def right_multiply(G: FiniteGroup, pairs: Mapping[BasedPair, Fraction], g: str) -> Dict[BasedPair, Fraction]:
    out: Dict[BasedPair, Fraction] = {}
    for ((a, i), (b, j)), c in pairs.items():
        _add(out, ((a, i), (G.mult(b, g), j)), c)
    return out


@dataclass(frozen=True, order=True)
class FreeLoopClass:
    kind: str
    rep: str
    level: int

    def degree(self, n: int) -> int:
        base = self.level * (n - 1)
        return base if self.kind == "x" else base + n

    def __str__(self):
        return f"{self.kind},[{self.rep}],{self.level}"

    def symbol(self) -> str:
        return f"{self.kind}_{{[{self.rep}],{self.level}}}"


_CLASS_PATTERN = re.compile(r"^\s*([xy])\s*,\s*\[\s*([^\]]+?)\s*\]\s*,\s*(\d+)\s*$")


def parse_class(text: str, G: FiniteGroup) -> FreeLoopClass:
    """Parse "x,[g],k" into a class whose representative is canonical."""
    match = _CLASS_PATTERN.match(text)
    if not match:
        raise SchemaError(f"class must be written as 'x,[g],k' or 'y,[g],k', got {text!r}")
    kind, g, level = match.groups()
    try:
        rep = G.representative(g)
    except GroupError as exc:
        raise SchemaError(str(exc))
    return FreeLoopClass(kind, rep, int(level))


def _is_base_class(c: FreeLoopClass, G: FiniteGroup) -> bool:
    return c.level == 0 and c.rep == G.identity


@dataclass
class LoopBasis:
    classes: List[FreeLoopClass]
    betti: np.ndarray
    complete_through: int

    def to_dict(self, n: int) -> dict:
        return {
            "classes": [{"class": str(c), "degree": c.degree(n)} for c in self.classes],
            "betti": {str(q): int(b) for q, b in enumerate(self.betti.tolist())},
            "complete_through": self.complete_through,
        }


def loop_basis(G: FiniteGroup, n: int, max_k: int, relative: bool = False) -> LoopBasis:
    """
    Classes x_{[g],k}, y_{[g],k} for k ≤ max_k with the Betti table.

    The table counts every listed class; degrees above `complete_through`
    would also receive classes of level max_k + 1.
    """
    _check_dimension(n)
    reps = [cls[0] for cls in G.conjugacy_classes()]
    classes = []
    for k in range(max_k + 1):
        for kind in ("x", "y"):
            for rep in reps:
                c = FreeLoopClass(kind, rep, k)
                if relative and _is_base_class(c, G):
                    continue
                classes.append(c)
    top = max(c.degree(n) for c in classes) if classes else 0
    betti = np.zeros(top + 1, dtype=np.int64)
    for c in classes:
        betti[c.degree(n)] += 1
    return LoopBasis(classes, betti, (max_k + 1) * (n - 1) - 1)


Row = Dict[Tuple[FreeLoopClass, FreeLoopClass], int]


def lifted_coproduct(c: FreeLoopClass, G: FiniteGroup, n: int) -> Row:
    """
    x_{[g],k} ↦ Σ_{i+j=k−1} Σ_h x_{[gh⁻¹],i}⊗x_{[h],j};
    y_{[g],k} ↦ Σ_{i+j=k−1} Σ_h (x_{[gh⁻¹],i}⊗y_{[h],j} + y_{[gh⁻¹],i}⊗x_{[h],j}).
    """
    _check_dimension(n)
    g = c.rep
    row: Counter = Counter()
    for i in range(c.level):
        j = c.level - 1 - i
        for h in G.elements:
            left, right = G.representative(G.mult(g, G.inv(h))), G.representative(h)
            if c.kind == "x":
                row[(FreeLoopClass("x", left, i), FreeLoopClass("x", right, j))] += 1
            else:
                row[(FreeLoopClass("x", left, i), FreeLoopClass("y", right, j))] += 1
                row[(FreeLoopClass("y", left, i), FreeLoopClass("x", right, j))] += 1
    return dict(row)


def coproduct_table(G: FiniteGroup, n: int, max_k: int, relative: bool = False,
                    classes: Optional[Iterable[FreeLoopClass]] = None) -> Dict[FreeLoopClass, Row]:
    """Rows of the lifted coproduct; relative mode drops x_{[1],0}, y_{[1],0} everywhere."""
    if classes is None:
        classes = loop_basis(G, n, max_k, relative).classes
    table = {}
    for c in classes:
        row = lifted_coproduct(c, G, n)
        if relative:
            row = {pair: m for pair, m in row.items()
                   if not (_is_base_class(pair[0], G) or _is_base_class(pair[1], G))}
        table[c] = row
    return table


def table_frame_rows(table: Mapping[FreeLoopClass, Row], n: int) -> List[dict]:
    rows = []
    for c, row in table.items():
        for (a, b), m in sorted(row.items()):
            rows.append({"class": str(c), "degree": c.degree(n), "left": a.symbol(), "right": b.symbol(),
                         "multiplicity": m})
    return rows


def _apply_left(row: Row, G: FiniteGroup, n: int) -> Counter:
    out: Counter = Counter()
    for (a, b), m in row.items():
        for (a1, a2), m1 in lifted_coproduct(a, G, n).items():
            out[(a1, a2, b)] += m * m1
    return out


def _apply_right(row: Row, G: FiniteGroup, n: int) -> Counter:
    out: Counter = Counter()
    for (a, b), m in row.items():
        for (b1, b2), m2 in lifted_coproduct(b, G, n).items():
            out[(a, b1, b2)] += m * m2
    return out


def verify_sng_properties(G: FiniteGroup, n: int, max_k: int) -> dict:
    """Degree law, equivariance of the based coproduct, coassociativity and x-class cocommutativity."""
    _check_dimension(n)
    classes = loop_basis(G, n, max_k).classes
    checks = []

    bad = None
    for c in classes:
        for a, b in lifted_coproduct(c, G, n):
            if a.degree(n) + b.degree(n) != c.degree(n) + 1 - n:
                bad = {"class": str(c), "pair": f"{a}⊗{b}"}
                break
        if bad:
            break
    checks.append(failed("degree_law", "output degree differs from input degree + 1 − n", bad)
                  if bad else passed("degree_law"))

    bad = None
    for g, k in ((g, k) for k in range(max_k + 1) for g in G.elements):
        e = BasedLoopElement.monomial(G, n, g, k)
        image = based_coproduct(e)
        for other in G.elements:
            shifted = BasedLoopElement.monomial(G, n, other) * e
            if based_coproduct(shifted) != left_multiply(G, other, image):
                bad = {"monomial": format_monomial((g, k)), "left": other}
                break
            shifted = e * BasedLoopElement.monomial(G, n, other)
            if based_coproduct(shifted) != right_multiply(G, image, other):
                bad = {"monomial": format_monomial((g, k)), "right": other}
                break
        if bad:
            break
    checks.append(failed("equivariance", "based coproduct is not G-bi-equivariant", bad)
                  if bad else passed("equivariance"))

    bad = None
    for c in classes:
        row = lifted_coproduct(c, G, n)
        left, right = _apply_left(row, G, n), _apply_right(row, G, n)
        if left != right:
            bad = {"class": str(c)}
            break
    checks.append(failed("coassociativity", "(∨⊗id)∨ differs from (id⊗∨)∨", bad)
                  if bad else passed("coassociativity"))

    bad = None
    y_symmetric = True
    for c in classes:
        row = lifted_coproduct(c, G, n)
        swapped = {(b, a): m for (a, b), m in row.items()}
        if swapped != row:
            if c.kind == "x":
                bad = bad or {"class": str(c)}
            else:
                y_symmetric = False
    checks.append(failed("cocommutativity", "factor swap changes the coproduct of an x-class", bad)
                  if bad else passed("cocommutativity", {"y_classes_symmetric": y_symmetric}))
    logger.info(f"Checked coproduct properties for {G.name}, n={n}, k≤{max_k}")
    return combine("sng_properties", checks, {"group": G.name, "n": n, "max_k": max_k})


def morse_cross_check(G: FiniteGroup, n: int, max_k: int) -> dict:
    """
    Total E^∞ dimensions of the lens enriched complex with conjugation fiber
    against the free-loop Betti numbers, degree by degree.
    """
    from .builtins import conjugation_module, lens_cocycle
    from .morse import build_enriched, spectral_sequence

    if not G.is_cyclic():
        raise SchemaError("the cross-check runs on cyclic groups only")
    fiber = conjugation_module(G, n, max_k)
    cocycle = lens_cocycle(G, n)
    pages = spectral_sequence(build_enriched(fiber, cocycle), 2)
    totals = pages.infinity_totals()
    betti = loop_basis(G, n, max_k).betti
    limit = max_k * (n - 1)
    mismatches = {str(q): {"spectral": int(totals.get(q, 0)), "loop_basis": int(betti[q]) if q < len(betti) else 0}
                  for q in range(limit + 1)
                  if int(totals.get(q, 0)) != (int(betti[q]) if q < len(betti) else 0)}
    details = {"group": G.name, "n": n, "degrees_compared": limit + 1}
    if mismatches:
        first = min(mismatches, key=int)
        return failed("morse_cross_check", f"Betti numbers differ in degree {first}",
                      {"degree": int(first), **mismatches[first]}, details)
    return passed("morse_cross_check", details)
