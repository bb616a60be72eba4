"""
Independent dense reimplementation used to cross-check the sparse engine.

Homology ranks come from sympy matrices. Structure and morphism equations are
expanded term by term on every basis tensor with explicit Koszul signs,
without going through map composition or tensor_many.
"""

import logging
from fractions import Fraction
from typing import Dict, List, Tuple

import sympy

from .ainfty import AInftyModule, AInftyMorphism, morphism_residual, structure_residual
from .algebra import GradedMap, Key, format_key, join_keys, sign, split_key
from .complexes import ChainComplex
from .reports import combine, failed, passed

logger = logging.getLogger(__name__)

Word = Tuple[Key, ...]
Expansion = Dict[Word, sympy.Rational]


def _rational(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


def _fraction(value: sympy.Rational) -> Fraction:
    return Fraction(int(value.p), int(value.q))


def _add(out: dict, key, value):
    total = out.get(key, 0) + value
    if total:
        out[key] = total
    else:
        out.pop(key, None)


def dense_matrix(f: GradedMap, q: int) -> sympy.Matrix:
    """Block of f from source degree q, as an exact sympy matrix."""
    rows = f.block(q)
    if not rows or not rows[0]:
        return sympy.zeros(len(rows), len(f.source.keys(q)))
    return sympy.Matrix([[_rational(c) for c in row] for row in rows])


def dense_homology_dims(C: ChainComplex) -> Dict[int, int]:
    """dim H_q = dim C_q − rank d_q − rank d_{q+1}"""
    ranks = {q: dense_matrix(C.d, q).rank() for q in C.space.degrees}
    return {q: C.space.dim(q) - ranks.get(q, 0) - ranks.get(q + 1, 0) for q in C.space.degrees}


def dense_compose(g: GradedMap, f: GradedMap) -> GradedMap:
    """g∘f by per-degree matrix products."""
    columns = {}
    for q in f.source.degrees:
        cols = f.source.keys(q)
        rows = g.target.keys(q + f.degree + g.degree)
        if not cols or not rows:
            continue
        product = dense_matrix(g, q + f.degree) * dense_matrix(f, q)
        for j, src in enumerate(cols):
            column = {rows[i]: _fraction(product[i, j]) for i in range(len(rows)) if product[i, j] != 0}
            if column:
                columns[src] = column
    return GradedMap(f.source, g.target, f.degree + g.degree, columns, check=False)


def check_homology(C: ChainComplex, dims: Dict[int, int], check: str = "oracle_homology") -> dict:
    """Compare homology dimensions from the sparse engine with the dense ranks."""
    expected = dense_homology_dims(C)
    for q in sorted(set(expected) | set(dims)):
        if expected.get(q, 0) != dims.get(q, 0):
            return failed(check, f"homology dimension differs in degree {q}",
                          {"degree": q, "sparse": dims.get(q, 0), "dense": expected.get(q, 0)})
    return passed(check, {"dims": {str(q): n for q, n in expected.items()}})


class _Expander:
    """Applies operations of a plain module factor by factor."""

    def __init__(self, M: AInftyModule):
        self.M = M
        self.A = M.algebra
        self.arity_a = M.algebra.space.arity

    def arities(self, k: int) -> List[int]:
        return [self.M.total.arity] + [self.arity_a] * (k - 1)

    def split(self, key: Key, k: int) -> Word:
        if k == 1:
            return (key,)
        return tuple(split_key(key, self.arities(k)))

    def join(self, word: Word) -> Key:
        if len(word) == 1:
            return word[0]
        return join_keys(list(word), self.arities(len(word)))

    @staticmethod
    def column(f: GradedMap, key: Key) -> Dict[Key, sympy.Rational]:
        return {t: _rational(c) for t, c in f.column(key).items()}

    def apply(self, f: GradedMap, word: Word) -> Dict[Key, sympy.Rational]:
        return self.column(f, self.join(word))

    def differential(self, word: Word) -> Expansion:
        """Leibniz rule with the sign (−1)^{|x_1|+...+|x_{j−1}|}."""
        out: Expansion = {}
        passed_degree = 0
        for j, x in enumerate(word):
            d = self.M.op(1) if j == 0 else self.A.d
            for y, c in self.column(d, x).items():
                _add(out, word[:j] + (y,) + word[j + 1:], sign(passed_degree) * c)
            passed_degree += x[0]
        return out

    def multiply_at(self, word: Word, r: int) -> Expansion:
        a, b = word[r], word[r + 1]
        product = self.column(self.A.mu, join_keys([a, b], [self.arity_a, self.arity_a]))
        return {word[:r] + (c,) + word[r + 2:]: v for c, v in product.items()}

    def act_first(self, f: GradedMap, word: Word, k: int) -> Expansion:
        """f on the first k factors, the rest passed through unchanged."""
        out: Expansion = {}
        for y, c in self.apply(f, word[:k]).items():
            _add(out, (y,) + word[k:], c)
        return out

    def then(self, f: GradedMap, expansion: Expansion, into: Dict[Key, sympy.Rational], factor):
        for word, c in expansion.items():
            for y, v in self.apply(f, word).items():
                _add(into, y, factor * c * v)


def expand_structure(M: AInftyModule, N: int, word: Word) -> Dict[Key, sympy.Rational]:
    """The N-th structure equation evaluated on one basis tensor."""
    E = _Expander(M)
    out: Dict[Key, sympy.Rational] = {}
    E.then(M.op(1), E.act_first(M.op(N), word, N), out, 1)
    if N == 1:
        return out
    E.then(M.op(N), E.differential(word), out, sign(N + 1))
    for t in range(1, N - 1):
        E.then(M.op(t + 1), E.act_first(M.op(N - t), word, N - t), out, sign((N - t) * t))
    for r in range(1, N - 1):
        E.then(M.op(N - 1), E.multiply_at(word, r), out, sign(r))
    return out


def expand_morphism(f: AInftyMorphism, n: int, word: Word) -> Dict[Key, sympy.Rational]:
    """The arity-n morphism equation evaluated on one basis tensor."""
    S, T, m = f.source, f.target, f.shift
    E = _Expander(S)
    out: Dict[Key, sympy.Rational] = {}
    if n == 1:
        E.then(f.component(1), E.differential(word), out, 1)
        E.then(T.op(1), E.act_first(f.component(1), word, 1), out, -sign(m))
        return out
    E.then(f.component(n), E.differential(word), out, sign(n - 1))
    for s in range(2, n + 1):
        E.then(f.component(n - s + 1), E.act_first(S.op(s), word, s), out, sign(s * (n - s)))
    for r in range(1, n - 1):
        E.then(f.component(n - 1), E.multiply_at(word, r), out, sign(r))
    E.then(T.op(1), E.act_first(f.component(n), word, n), out, -sign(m))
    for t in range(1, n):
        E.then(T.op(t + 1), E.act_first(f.component(n - t), word, n - t), out,
               -sign(t * (n - t - 1) + m * (t + 1)))
    return out


def _compare(check: str, sparse: GradedMap, expand, split) -> dict:
    for key in sparse.source:
        dense = {t: _fraction(v) for t, v in expand(split(key)).items()}
        if dense != sparse.column(key):
            return failed(check, "sparse and dense expansions differ",
                          {"basis": format_key(key),
                           "dense": {format_key(t): str(v) for t, v in dense.items()},
                           "sparse": {format_key(t): str(v) for t, v in sparse.column(key).items()}})
    return passed(check)


def check_structure(M: AInftyModule, max_arity: int = 3) -> dict:
    """Sparse structure residuals agree with the dense expansion up to max_arity."""
    E = _Expander(M)
    reports = []
    for N in range(1, min(max_arity, M.arity_bound) + 1):
        logger.debug(f"Expanding structure equation N={N} on {M.word(N).dim()} basis tensors")
        reports.append(_compare(f"N={N}", structure_residual(M, N),
                                lambda w, N=N: expand_structure(M, N, w), lambda k, N=N: E.split(k, N)))
    return combine("oracle_structure", reports)


def check_morphism(f: AInftyMorphism, max_arity: int = 3) -> dict:
    """Sparse morphism residuals agree with the dense expansion up to max_arity."""
    E = _Expander(f.source)
    reports = []
    for n in range(1, min(max_arity, f.arity_bound) + 1):
        reports.append(_compare(f"n={n}", morphism_residual(f, n),
                                lambda w, n=n: expand_morphism(f, n, w), lambda k, n=n: E.split(k, n)))
    return combine("oracle_morphism", reports)
