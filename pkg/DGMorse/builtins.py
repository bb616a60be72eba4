"""
Built-in algebras, modules and twisting cocycles.

Every builder returns freshly validated objects; the group algebra is cached
per group because lens fixtures, conjugation modules and sweeps all reuse it.
"""

import logging
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Callable, Dict, List, Mapping, Optional, Sequence

from .algebra import GradedMap, GradedSpace, Key, Vector, sign, tensor_product
from .ainfty import DGAlgebra, StrictModule
from .complexes import ChainComplex
from .exceptions import GroupError, SchemaError
from .groups import FiniteGroup, group_by_name
from .morse import CriticalSet, TwistingCocycle

logger = logging.getLogger(__name__)

Rule = Callable[[Key, Key], Vector]


def algebra_from_rule(basis: Mapping[int, Sequence[str]], rule: Rule, unit: str,
                      differential: Optional[Mapping[Key, Vector]] = None, name: str = "") -> DGAlgebra:
    """
    Assemble a DGA from a basis, a product rule on basis keys and a differential.

    Args:
        basis: degree -> labels
        rule: (a, b) -> product vector of two basis keys
        unit: label of the degree-0 unit
        differential: optional columns of d
        name: display name

    Returns:
        DGAlgebra (not verified; callers run verify_dga when the rule is new)
    """
    space = GradedSpace.build(basis)
    d = GradedMap(space, space, -1, differential or {})
    square = tensor_product(space, space)
    columns = {}
    for a, b in product(space.keys(), repeat=2):
        value = rule(a, b)
        if value:
            columns[(a[0] + b[0], (a, b))] = value
    mu = GradedMap(square, space, 0, columns)
    return DGAlgebra(ChainComplex(space, d), mu, (0, unit), name)


@lru_cache(maxsize=32)
def group_algebra(G: FiniteGroup) -> DGAlgebra:
    """ℝ[G] concentrated in degree 0"""
    def rule(a: Key, b: Key) -> Vector:
        return {(0, G.mult(a[1], b[1])): Fraction(1)}
    return algebra_from_rule({0: list(G.elements)}, rule, G.identity, name=f"R[{G.name}]")


def _power_label(k: int) -> str:
    return "1" if k == 0 else ("x" if k == 1 else f"x^{k}")


def truncated_polynomial(degree: int = 2, top: int = 5) -> DGAlgebra:
    """ℝ[x]/(x^top) with |x| = degree and zero differential."""
    if top < 1:
        raise SchemaError("truncation power must be positive")
    labels = {_power_label(k): k for k in range(top)}
    basis: Dict[int, List[str]] = {}
    for label, k in labels.items():
        basis.setdefault(k * degree, []).append(label)

    def rule(a: Key, b: Key) -> Vector:
        k = labels[a[1]] + labels[b[1]]
        return {(k * degree, _power_label(k)): Fraction(1)} if k < top else {}
    return algebra_from_rule(basis, rule, "1", name=f"R[x]/(x^{top})")


def _wedge_label(subset) -> str:
    return "∧".join(f"e{i}" for i in subset) or "1"


def exterior_algebra(generators: int = 1) -> DGAlgebra:
    """Λ(e1, ..., en) with |e_i| = 1 and zero differential"""
    subsets = [tuple(i for i in range(1, generators + 1) if mask >> (i - 1) & 1) for mask in range(2 ** generators)]
    subsets.sort(key=len)
    by_label = {_wedge_label(s): s for s in subsets}
    basis: Dict[int, List[str]] = {}
    for s in subsets:
        basis.setdefault(len(s), []).append(_wedge_label(s))

    def rule(a: Key, b: Key) -> Vector:
        I, J = by_label[a[1]], by_label[b[1]]
        if set(I) & set(J):
            return {}
        inversions = sum(1 for i in I for j in J if i > j)
        merged = tuple(sorted(I + J))
        return {(len(merged), _wedge_label(merged)): Fraction(sign(inversions))}
    return algebra_from_rule(basis, rule, "1", name=f"Λ({generators})")


def acyclic_algebra() -> DGAlgebra:
    """ℝ⟨1, t⟩ with |t| = 1, t² = 0, dt = 1."""
    def rule(a: Key, b: Key) -> Vector:
        if a[1] == "1":
            return {b: Fraction(1)}
        if b[1] == "1":
            return {a: Fraction(1)}
        return {}
    return algebra_from_rule({0: ["1"], 1: ["t"]}, rule, "1", {(1, "t"): {(0, "1"): 1}}, name="acyclic")


def tensor_algebra(A: DGAlgebra, B: DGAlgebra) -> DGAlgebra:
    """A⊗B with (a⊗b)(a'⊗b') = (−1)^{|b||a'|} aa'⊗bb', labels "a|b"."""
    pair_key = {}
    basis: Dict[int, List[str]] = {}
    for a, b in product(A.space.keys(), B.space.keys()):
        key = (a[0] + b[0], f"{a[1]}|{b[1]}")
        pair_key[(a, b)] = key
        basis.setdefault(key[0], []).append(key[1])
    split = {key: pair for pair, key in pair_key.items()}

    def combine_vectors(left: Vector, right: Vector, factor: int) -> Vector:
        out: Vector = {}
        for (ka, ca), (kb, cb) in product(left.items(), right.items()):
            target = pair_key[(ka, kb)]
            out[target] = out.get(target, 0) + factor * ca * cb
        return {k: c for k, c in out.items() if c}

    def rule(x: Key, y: Key) -> Vector:
        (a, b), (a2, b2) = split[x], split[y]
        return combine_vectors(A.multiply({a: 1}, {a2: 1}), B.multiply({b: 1}, {b2: 1}), sign(b[0] * a2[0]))

    differential = {}
    for (a, b), key in pair_key.items():
        column: Vector = {}
        for part in (combine_vectors(A.d.column(a), {b: Fraction(1)}, 1),
                     combine_vectors({a: Fraction(1)}, B.d.column(b), sign(a[0]))):
            for k, c in part.items():
                column[k] = column.get(k, 0) + c
        column = {k: c for k, c in column.items() if c}
        if column:
            differential[key] = column
    unit = f"{A.unit[1]}|{B.unit[1]}"
    return algebra_from_rule(basis, rule, unit, differential, f"{A.name}⊗{B.name}")


def free_module(A: DGAlgebra, V: ChainComplex, name: str = "") -> StrictModule:
    """
    V⊗A as a right A-module, basis labels "v.a".

    d(v⊗a) = dv⊗a + (−1)^{|v|} v⊗da, (v⊗a)·b = v⊗ab.
    """
    pair_key = {}
    basis: Dict[int, List[str]] = {q: [] for q in V.space.degrees}
    for v, a in product(V.space.keys(), A.space.keys()):
        key = (v[0] + a[0], f"{v[1]}.{a[1]}")
        pair_key[(v, a)] = key
        basis.setdefault(key[0], []).append(key[1])
    space = GradedSpace.build(basis)

    d_columns = {}
    for (v, a), key in pair_key.items():
        column: Vector = {}
        for w, c in V.d.column(v).items():
            column[pair_key[(w, a)]] = column.get(pair_key[(w, a)], 0) + c
        for b, c in A.d.column(a).items():
            column[pair_key[(v, b)]] = column.get(pair_key[(v, b)], 0) + sign(v[0]) * c
        column = {k: c for k, c in column.items() if c}
        if column:
            d_columns[key] = column
    complex = ChainComplex(space, GradedMap(space, space, -1, d_columns))

    action_columns = {}
    for (v, a), key in pair_key.items():
        for b in A.space.keys():
            image = A.multiply({a: Fraction(1)}, {b: Fraction(1)})
            if image:
                action_columns[(key[0] + b[0], (key, b))] = {pair_key[(v, c)]: x for c, x in image.items()}
    action = GradedMap(tensor_product(space, A.space), space, 0, action_columns)
    return StrictModule(A, complex, action, name or f"free({A.name})")


def direct_sum_complex(C1: ChainComplex, C2: ChainComplex) -> ChainComplex:
    """C1 ⊕ C2 on the union of the (disjoint) label sets"""
    overlap = set(C1.space.keys()) & set(C2.space.keys())
    if overlap:
        raise SchemaError(f"direct sum summands share basis keys {sorted(map(str, overlap))}")
    basis: Dict[int, List] = {}
    for q in sorted(set(C1.space.degrees) | set(C2.space.degrees)):
        basis[q] = list(C1.space.labels(q)) + list(C2.space.labels(q))
    space = GradedSpace.build(basis)
    columns = {key: dict(column) for C in (C1, C2) for key, column in C.d.items()}
    return ChainComplex(space, GradedMap(space, space, -1, columns, check=False), check=False)


def regular_module(A: DGAlgebra) -> StrictModule:
    return StrictModule(A, A.complex, A.mu, f"regular({A.name})")


def trivial_module(G: FiniteGroup) -> StrictModule:
    """ℝ with every group element acting as 1"""
    A = group_algebra(G)
    space = GradedSpace.build({0: ["1"]})
    columns = {(0, ((0, "1"), g)): {(0, "1"): 1} for g in A.space.keys()}
    action = GradedMap(tensor_product(space, A.space), space, 0, columns)
    return StrictModule(A, ChainComplex(space), action, f"trivial({G.name})")


def conjugation_module(G: FiniteGroup, n: int, max_k: int) -> StrictModule:
    """
    Slices k ≤ max_k of ℝ[G][x] with |g x^k| = k(n−1) and the
    conjugation action (g x^k)·h = h⁻¹ g h x^k.
    """
    from .sng import format_monomial

    if max_k < 0:
        raise SchemaError("max_k must be nonnegative")
    A = group_algebra(G)
    basis: Dict[int, List[str]] = {}
    for k in range(max_k + 1):
        basis.setdefault(k * (n - 1), []).extend(format_monomial((g, k)) for g in G.elements)
    space = GradedSpace.build(basis)
    columns = {}
    for k in range(max_k + 1):
        q = k * (n - 1)
        for g, h in product(G.elements, repeat=2):
            source = (q, ((q, format_monomial((g, k))), (0, h)))
            columns[source] = {(q, format_monomial((G.conjugate(g, h), k))): 1}
    action = GradedMap(tensor_product(space, A.space), space, 0, columns)
    return StrictModule(A, ChainComplex(space), action, f"conjugation({G.name}, n={n})")


def lens_cocycle(G: FiniteGroup, top: int, mutate: bool = False) -> TwistingCocycle:
    """
    Cell structure of the lens space S^top/G for cyclic G = ⟨g⟩.

    Critical points x_0, ..., x_top with |x_j| = j; m_{x_j,x_{j−1}} is
    g − 1 for odd j and the norm element 1 + g + ... + g^{m−1} for even j.
    With mutate=True the entry m_{x1,x0} is replaced by g, which breaks the
    cocycle identity at (x2, x0).
    """
    g = G.generator()
    if g is None:
        raise GroupError(f"{G.name} is not cyclic")
    if top < 1:
        raise SchemaError("lens complex needs top dimension at least 1")
    A = group_algebra(G)
    crit = CriticalSet({f"x{j}": j for j in range(top + 1)})
    norm = {(0, h): Fraction(1) for h in G.elements}
    difference: Vector = {(0, g): Fraction(1)}
    difference[(0, G.identity)] = difference.get((0, G.identity), 0) - 1
    difference = {k: c for k, c in difference.items() if c}
    entries = {}
    for j in range(1, top + 1):
        entries[(f"x{j}", f"x{j - 1}")] = difference if j % 2 else norm
    if mutate:
        entries[("x1", "x0")] = {(0, g): Fraction(1)}
    return TwistingCocycle(A, crit, entries, f"lens({G.name}, {top})" + (" mutated" if mutate else ""))


def algebra_by_name(name: str, **options) -> DGAlgebra:
    """
    Resolve a built-in algebra by name: "group" (with group=...), "poly",
    "exterior", "acyclic", or "R[<group>]".
    """
    text = name.strip()
    if text.startswith("R[") and text.endswith("]"):
        return group_algebra(group_by_name(text[2:-1]))
    if text == "group":
        return group_algebra(group_by_name(str(options.get("group", "C2"))))
    if text == "poly":
        return truncated_polynomial(int(options.get("degree", 2)), int(options.get("top", 5)))
    if text == "exterior":
        return exterior_algebra(int(options.get("generators", 1)))
    if text == "acyclic":
        return acyclic_algebra()
    raise SchemaError(f"unknown built-in algebra {name!r}")


def module_by_name(name: str, **options) -> StrictModule:
    """"regular", "trivial" and "conjugation" modules over group algebras."""
    G = group_by_name(str(options.get("group", "C2")))
    if name == "regular":
        return regular_module(group_algebra(G))
    if name == "trivial":
        return trivial_module(G)
    if name == "conjugation":
        return conjugation_module(G, int(options.get("n", 3)), int(options.get("max_k", 4)))
    raise SchemaError(f"unknown built-in module {name!r}")
