"""
Strict DGAs, strict and A∞ right modules, A∞ morphisms.

The structure equations, composition, inversion and homotopy transfer are
written once against a small "frame" interface (total space, fiber, last
tensor factor) so that path modules reuse them unchanged. For an ordinary
module the fiber is the whole carrier and the last factor is the algebra.

A morphism of shift m is a degree-0 morphism into Σ^{−m} of its target,
whose operations are (−1)^{mk} m_k and whose differential is (−1)^m d.
"""

import logging
from fractions import Fraction
from typing import Dict, Mapping, Optional, Tuple

from .algebra import (GradedMap, GradedSpace, Key, compose, format_key, identity, map_sum, sign,
                      tensor_differential, tensor_many, tensor_product, zero_map)
from .complexes import (ChainComplex, HomotopyRetract, induced_on_homology,
                        require_retract, retract_to_homology, verify_complex)
from .exceptions import (CompositionError, DegreeMismatchError, FiberError, InversionError,
                         QuasiIsomorphismError, SchemaError)
from .linalg import invert_columns
from .reports import combine, failed, map_witness, passed, residual_report

logger = logging.getLogger(__name__)


class DGAlgebra:
    """Strict differential graded algebra (A, d, μ, 1)"""

    def __init__(self, complex: ChainComplex, product: GradedMap, unit: Key, name: str = ""):
        square = tensor_product(complex.space, complex.space)
        if product.source != square or product.target != complex.space or product.degree != 0:
            raise DegreeMismatchError("product must be a degree-0 map A⊗A → A")
        if unit not in complex.space or unit[0] != 0:
            raise DegreeMismatchError(f"unit {unit!r} is not a degree-0 basis vector")
        self.complex = complex
        self.mu = product
        self.unit = unit
        self.name = name

    @property
    def space(self) -> GradedSpace:
        return self.complex.space

    @property
    def d(self) -> GradedMap:
        return self.complex.d

    def multiply(self, a: Mapping[Key, Fraction], b: Mapping[Key, Fraction]) -> Dict[Key, Fraction]:
        tensor = {}
        for ka, ca in a.items():
            for kb, cb in b.items():
                key = (ka[0] + kb[0], (ka, kb))
                tensor[key] = tensor.get(key, 0) + ca * cb
        return self.mu.apply({k: v for k, v in tensor.items() if v})

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, DGAlgebra):
            return NotImplemented
        return self.complex == other.complex and self.mu == other.mu and self.unit == other.unit

    def __hash__(self):
        return hash(self.space)

    def __repr__(self):
        return f"DGAlgebra({self.name or 'unnamed'}, dims={self.space.dims()})"


def verify_dga(A: DGAlgebra) -> dict:
    checks = [verify_complex(A.complex)]
    one = identity(A.space)
    left = compose(A.mu, tensor_many([A.mu, one]))
    right = compose(A.mu, tensor_many([one, A.mu]))
    checks.append(residual_report("associativity", left - right, "μ(μ⊗id) differs from μ(id⊗μ)"))
    unit_failures = None
    for key in A.space:
        for side, pair in (("left", (A.unit, key)), ("right", (key, A.unit))):
            product = A.mu.column((key[0], pair))
            if product != {key: Fraction(1)}:
                unit_failures = {"degree": key[0], "basis": format_key(key), "side": side,
                                 "value": {format_key(k): str(v) for k, v in product.items()}}
                break
        if unit_failures:
            break
    if unit_failures:
        checks.append(failed("unit", "unit is not two-sided", unit_failures))
    else:
        checks.append(passed("unit"))
    leibniz = compose(A.d, A.mu) - compose(A.mu, tensor_differential([A.d, A.d]))
    checks.append(residual_report("leibniz", leibniz, "d∘μ differs from μ∘d_⊗"))
    return combine("dga", checks)


class StrictModule:
    """Strict right module over a DGA"""

    def __init__(self, algebra: DGAlgebra, complex: ChainComplex, action: GradedMap, name: str = ""):
        word = tensor_product(complex.space, algebra.space)
        if action.source != word or action.target != complex.space or action.degree != 0:
            raise DegreeMismatchError("action must be a degree-0 map M⊗A → M")
        self.algebra = algebra
        self.complex = complex
        self.action = action
        self.name = name

    @property
    def space(self) -> GradedSpace:
        return self.complex.space

    def __repr__(self):
        return f"StrictModule({self.name or 'unnamed'}, dims={self.space.dims()})"


def verify_strict_module(M: StrictModule) -> dict:
    A = M.algebra
    one_m, one_a = identity(M.space), identity(A.space)
    checks = [verify_complex(M.complex)]
    assoc = compose(M.action, tensor_many([M.action, one_a])) - compose(M.action, tensor_many([one_m, A.mu]))
    checks.append(residual_report("associativity", assoc, "(x·a)·b differs from x·(ab)"))
    bad = None
    for key in M.space:
        if M.action.column((key[0], (key, A.unit))) != {key: Fraction(1)}:
            bad = {"degree": key[0], "basis": format_key(key)}
            break
    checks.append(failed("unit", "x·1 differs from x", bad) if bad else passed("unit"))
    leibniz = compose(M.complex.d, M.action) - compose(M.action, tensor_differential([M.complex.d, A.d]))
    checks.append(residual_report("leibniz", leibniz, "d(x·a) differs from dx·a ± x·da"))
    return combine("strict_module", checks)


class ModuleFrame:
    """
    Shared shape of modules and path modules.

    Subclasses provide algebra, total, fiber, last, last_d, last_action,
    embedding, arity_bound and the operations.
    """

    algebra: DGAlgebra
    arity_bound: int

    def __init__(self):
        self._fiber_ops: Dict[int, GradedMap] = {}
        self._inclusions: Dict[int, GradedMap] = {}
        self._word_d: Dict[Tuple[str, int], GradedMap] = {}

    # Words

    def word(self, k: int) -> GradedSpace:
        if k == 1:
            return self.total
        return tensor_product(self.fiber, *([self.algebra.space] * (k - 2)), self.last)

    def fiber_word(self, k: int) -> GradedSpace:
        return tensor_product(self.fiber, *([self.algebra.space] * (k - 1)))

    def word_differential(self, k: int) -> GradedMap:
        if ("word", k) not in self._word_d:
            if k == 1:
                d = self.op(1)
            else:
                d = tensor_differential([self.fiber_op(1)] + [self.algebra.d] * (k - 2) + [self.last_d])
            self._word_d[("word", k)] = d
        return self._word_d[("word", k)]

    def is_plain(self) -> bool:
        return self.fiber is self.total and self.last == self.algebra.space

    def inclusion(self, k: int) -> GradedMap:
        """fiber_word(k) → word(k) through the embedding of the last factor (k ≥ 2)."""
        if k not in self._inclusions:
            factors = [identity(self.fiber)] + [identity(self.algebra.space)] * (k - 2) + [self.embedding]
            self._inclusions[k] = tensor_many(factors)
        return self._inclusions[k]

    def restrict_to_fiber(self, outer: GradedMap, k: int, target_fiber: GradedSpace) -> GradedMap:
        if self.is_plain() and outer.target == target_fiber:
            return outer
        if k == 1:
            return outer.restrict(self.fiber).corestrict(target_fiber)
        return compose(outer, self.inclusion(k)).corestrict(target_fiber)

    def fiber_op(self, k: int) -> GradedMap:
        if self.is_plain():
            return self.op(k)
        if k not in self._fiber_ops:
            self._fiber_ops[k] = self.restrict_to_fiber(self.op(k), k, self.fiber)
        return self._fiber_ops[k]

    def zero_op(self, k: int) -> GradedMap:
        return zero_map(self.word(k), self.total, k - 2)

    def insertion(self, n: int, r: int) -> GradedMap:
        """id^{⊗r}⊗μ⊗id^{⊗n−r−2} on word(n), the last product acting on the last factor."""
        A = self.algebra
        one_a = identity(A.space)
        if r == n - 2:
            return tensor_many([identity(self.fiber)] + [one_a] * (r - 1) + [self.last_action])
        return tensor_many([identity(self.fiber)] + [one_a] * (r - 1) + [A.mu]
                           + [one_a] * (n - r - 3) + [identity(self.last)])

    def same_as(self, other: 'ModuleFrame') -> bool:
        if self is other:
            return True
        if type(self) is not type(other) or self.total != other.total or self.fiber != other.fiber:
            return False
        if self.last != other.last or not (self.algebra == other.algebra):
            return False
        bound = max(self.arity_bound, other.arity_bound)
        return all(self.op(k) == other.op(k) for k in range(1, bound + 1))


def structure_residual(E: ModuleFrame, N: int) -> GradedMap:
    """Left-hand side of the N-th structure equation; zero iff it holds."""
    if N == 1:
        return compose(E.op(1), E.op(1))
    one_a = identity(E.algebra.space)
    one_last = identity(E.last)
    terms = [compose(E.op(1), E.op(N)),
             compose(E.op(N), E.word_differential(N)).scale(sign(N + 1))]
    for t in range(1, N - 1):
        inner = tensor_many([E.fiber_op(N - t)] + [one_a] * (t - 1) + [one_last])
        terms.append(compose(E.op(t + 1), inner).scale(sign((N - t) * t)))
    for r in range(1, N - 1):
        terms.append(compose(E.op(N - 1), E.insertion(N, r)).scale(sign(r)))
    return map_sum(terms, E.word(N), E.total, N - 3)


def verify_structure(E: ModuleFrame, check: str, arities: Optional[range] = None) -> dict:
    reports = []
    for N in arities or range(1, E.arity_bound + 1):
        try:
            residual = structure_residual(E, N)
        except FiberError as exc:
            reports.append(failed(f"N={N}", f"operation does not restrict to the fiber: {exc}", exc.witness))
            continue
        reports.append(residual_report(f"N={N}", residual, f"structure equation fails at N={N}", N=N))
    return combine(check, reports, {"arity_bound": E.arity_bound})


class AInftyModule(ModuleFrame):
    """Truncated A∞ right module (m_k)_{k≤K} over a strict DGA"""

    def __init__(self, algebra: DGAlgebra, carrier: GradedSpace, ops: Mapping[int, GradedMap],
                 arity_bound: int, name: str = ""):
        super().__init__()
        if arity_bound < 1:
            raise SchemaError("arity bound must be at least 1")
        self.algebra = algebra
        self.carrier = carrier
        self.arity_bound = arity_bound
        self.name = name
        self.embedding = identity(algebra.space)
        self.ops: Dict[int, GradedMap] = {}
        for k, op in ops.items():
            if not 1 <= k <= arity_bound:
                raise SchemaError(f"operation m_{k} lies outside arities 1..{arity_bound}")
            if op.source != self.word(k) or op.target != carrier or op.degree != k - 2:
                raise DegreeMismatchError(f"m_{k} must be a degree-{k - 2} map from the arity-{k} word")
            self.ops[k] = op

    total = property(lambda self: self.carrier)
    fiber = property(lambda self: self.carrier)
    last = property(lambda self: self.algebra.space)
    last_d = property(lambda self: self.algebra.d)
    last_action = property(lambda self: self.algebra.mu)

    def op(self, k: int) -> GradedMap:
        return self.ops.get(k) or self.zero_op(k)

    @property
    def complex(self) -> ChainComplex:
        return ChainComplex(self.carrier, self.op(1), check=False)

    def is_strict(self) -> bool:
        return all(self.op(k).is_zero() for k in range(3, self.arity_bound + 1))

    def as_strict(self) -> StrictModule:
        if not self.is_strict():
            raise SchemaError("module has nonzero higher operations")
        if self.arity_bound < 2:
            raise SchemaError("a strict module needs the arity-2 action")
        return StrictModule(self.algebra, ChainComplex(self.carrier, self.op(1)), self.op(2), self.name)

    def truncate(self, arity_bound: int) -> 'AInftyModule':
        ops = {k: op for k, op in self.ops.items() if k <= arity_bound}
        return AInftyModule(self.algebra, self.carrier, ops, arity_bound, self.name)

    def __repr__(self):
        return f"AInftyModule({self.name or 'unnamed'}, K={self.arity_bound}, dims={self.carrier.dims()})"


def promote(M: StrictModule, arity_bound: int) -> AInftyModule:
    """A strict module viewed as an A∞ module with m_{≥3} = 0."""
    ops = {1: M.complex.d}
    if arity_bound >= 2:
        ops[2] = M.action
    return AInftyModule(M.algebra, M.space, ops, arity_bound, M.name)


def verify_ainfty_module(N: AInftyModule, A: Optional[DGAlgebra] = None) -> dict:
    if A is not None and not (N.algebra == A):
        return failed("ainfty_module", "module is defined over a different algebra")
    return verify_structure(N, "ainfty_module")


class MorphismFrame:
    """Components (f_k)_{k≤K}; f_1 on totals, f_k on source words for k ≥ 2."""

    source: ModuleFrame
    target: ModuleFrame
    shift: int

    def _setup(self, source: ModuleFrame, target: ModuleFrame, shift: int, maps: Mapping[int, GradedMap]):
        if source.arity_bound != target.arity_bound:
            raise CompositionError(
                f"source and target arity bounds differ ({source.arity_bound} vs {target.arity_bound})")
        if not (source.algebra == target.algebra):
            raise CompositionError("source and target are modules over different algebras")
        self.source = source
        self.target = target
        self.shift = shift
        self.maps: Dict[int, GradedMap] = {}
        self._fiber: Dict[int, GradedMap] = {}
        for k, f in maps.items():
            if not 1 <= k <= self.arity_bound:
                raise SchemaError(f"component f_{k} lies outside arities 1..{self.arity_bound}")
            if f.source != source.word(k) or f.target != target.total or f.degree != shift + k - 1:
                raise DegreeMismatchError(
                    f"f_{k} must be a degree-{shift + k - 1} map from the source arity-{k} word to the target")
            self.maps[k] = f

    @property
    def arity_bound(self) -> int:
        return self.source.arity_bound

    def component(self, k: int) -> GradedMap:
        return self.maps.get(k) or zero_map(self.source.word(k), self.target.total, self.shift + k - 1)

    def fiber_component(self, k: int) -> GradedMap:
        if k not in self._fiber:
            self._fiber[k] = self.source.restrict_to_fiber(self.component(k), k, self.target.fiber)
        return self._fiber[k]


def morphism_residual(f: MorphismFrame, n: int) -> GradedMap:
    """The arity-n morphism equation (reported as N = n − 1); zero iff it holds."""
    S, T, m = f.source, f.target, f.shift
    if n == 1:
        return compose(f.component(1), S.op(1)) - compose(T.op(1), f.component(1)).scale(sign(m))
    one_a, one_last = identity(S.algebra.space), identity(S.last)
    terms = [compose(f.component(n), S.word_differential(n)).scale(sign(n - 1))]
    for s in range(2, n + 1):
        if s == n:
            terms.append(compose(f.component(1), S.op(n)).scale(sign(s * (n - s))))
        else:
            inner = tensor_many([S.fiber_op(s)] + [one_a] * (n - s - 1) + [one_last])
            terms.append(compose(f.component(n - s + 1), inner).scale(sign(s * (n - s))))
    for r in range(1, n - 1):
        terms.append(compose(f.component(n - 1), S.insertion(n, r)).scale(sign(r)))
    terms.append(compose(T.op(1), f.component(n)).scale(-sign(m)))
    for t in range(1, n):
        inner = tensor_many([f.fiber_component(n - t)] + [one_a] * (t - 1) + [one_last])
        terms.append(compose(T.op(t + 1), inner).scale(-sign(t * (n - t - 1) + m * (t + 1))))
    return map_sum(terms, S.word(n), T.total, m + n - 2)


def verify_morphism_frame(f: MorphismFrame, check: str) -> dict:
    reports = []
    for n in range(1, f.arity_bound + 1):
        try:
            residual = morphism_residual(f, n)
        except FiberError as exc:
            reports.append(failed(f"N={n - 1}", f"component does not restrict to the fibers: {exc}", exc.witness))
            continue
        reports.append(residual_report(f"N={n - 1}", residual, f"morphism equation fails at N={n - 1}", N=n - 1))
    return combine(check, reports, {"arity_bound": f.arity_bound, "shift": f.shift})


def compose_components(g: MorphismFrame, f: MorphismFrame) -> Dict[int, GradedMap]:
    """(g∘f)_n = Σ_k (−1)^{k(n−1−k) + m_f k} g_{k+1}(f_{n−k}⊗id^{⊗k})."""
    if not f.target.same_as(g.source):
        raise CompositionError("target of the first morphism is not the source of the second")
    if f.arity_bound != g.arity_bound:
        raise CompositionError(f"arity bounds differ ({f.arity_bound} vs {g.arity_bound})")
    S = f.source
    one_a, one_last = identity(S.algebra.space), identity(S.last)
    out = {1: compose(g.component(1), f.component(1))}
    for n in range(2, f.arity_bound + 1):
        terms = [compose(g.component(1), f.component(n))]
        for k in range(1, n):
            inner = tensor_many([f.fiber_component(n - k)] + [one_a] * (k - 1) + [one_last])
            piece = compose(g.component(k + 1), inner)
            terms.append(piece.scale(sign(k * (n - 1 - k) + f.shift * k)))
        out[n] = map_sum(terms, S.word(n), g.target.total, f.shift + g.shift + n - 1)
    return out


def invert_map(f: GradedMap) -> GradedMap:
    """Blockwise inverse of a map that is an isomorphism in every degree."""
    columns = {}
    for q in f.source.degrees:
        src, tgt = f.source.keys(q), f.target.keys(q + f.degree)
        block = {key: f.column(key) for key in src}
        try:
            inverse = invert_columns(src, tgt, block)
        except ValueError as exc:
            raise InversionError(f"arity-one component is not invertible in degree {q}: {exc}", {"degree": q})
        columns.update(inverse)
    for q in f.target.degrees:
        if f.target.dim(q) and q - f.degree not in f.source.degrees:
            raise InversionError(f"arity-one component misses target degree {q}", {"degree": q})
    return GradedMap(f.target, f.source, -f.degree, columns, check=False)


def invert_components(f: MorphismFrame) -> Dict[int, GradedMap]:
    """
    Components of the inverse of an ∞-isomorphism, already suspended so the
    result is a morphism of shift −m from the target to the source.
    """
    S, T, m = f.source, f.target, f.shift
    f1 = f.component(1)
    if not S.is_plain() or not T.is_plain():
        try:
            invert_map(f1.restrict(S.fiber).corestrict(T.fiber))
        except (FiberError, InversionError) as exc:
            raise FiberError(f"arity-one component does not map the fiber onto the target fiber: {exc}",
                             exc.witness)
    f1_inv = invert_map(f1)
    one_a, one_last = identity(S.algebra.space), identity(S.last)
    raw: Dict[int, GradedMap] = {1: f1_inv}
    raw_fiber: Dict[int, GradedMap] = {}

    def fiber_of(k: int) -> GradedMap:
        if k not in raw_fiber:
            raw_fiber[k] = T.restrict_to_fiber(raw[k], k, S.fiber)
        return raw_fiber[k]

    for N in range(1, f.arity_bound):
        terms = []
        for r in range(N):
            inner = tensor_many([fiber_of(r + 1)] + [one_a] * (N - r - 1) + [one_last])
            terms.append(compose(f.component(N - r + 1), inner).scale(sign(r * (N - r))))
        total = map_sum(terms, T.word(N + 1), T.total, N) if terms else zero_map(T.word(N + 1), T.total, N)
        raw[N + 1] = compose(f1_inv, total).scale(-1)
    return {k: g.scale(sign(m * (k - 1))) for k, g in raw.items()}


class AInftyMorphism(MorphismFrame):
    """Truncated morphism (f_k) of A∞ modules with target shift m"""

    def __init__(self, source: AInftyModule, target: AInftyModule, shift: int, maps: Mapping[int, GradedMap]):
        self._setup(source, target, shift, maps)

    def __repr__(self):
        return f"AInftyMorphism(shift={self.shift}, K={self.arity_bound}, components={sorted(self.maps)})"

    def is_strict(self) -> bool:
        return all(self.component(k).is_zero() for k in range(2, self.arity_bound + 1))


def identity_morphism(M: AInftyModule) -> AInftyMorphism:
    return AInftyMorphism(M, M, 0, {1: identity(M.carrier)})


def zero_morphism(source: AInftyModule, target: AInftyModule, shift: int = 0) -> AInftyMorphism:
    return AInftyMorphism(source, target, shift, {})


def verify_morphism(f: AInftyMorphism) -> dict:
    return verify_morphism_frame(f, "ainfty_morphism")


def morphisms_equal(f: MorphismFrame, g: MorphismFrame) -> Optional[dict]:
    """None when equal term by term, else a witness naming the first differing arity."""
    if f.shift != g.shift or f.arity_bound != g.arity_bound:
        return {"message": "shift or arity bound differs", "shift": [f.shift, g.shift]}
    for k in range(1, f.arity_bound + 1):
        witness = map_witness(f.component(k) - g.component(k), arity=k)
        if witness:
            return witness
    return None


def compose_morphisms(g: AInftyMorphism, f: AInftyMorphism) -> AInftyMorphism:
    return AInftyMorphism(f.source, g.target, f.shift + g.shift, compose_components(g, f))


def invert_infty_iso(f: AInftyMorphism) -> AInftyMorphism:
    return AInftyMorphism(f.target, f.source, -f.shift, invert_components(f))


def _strict_form_residual(f: AInftyMorphism, N: int) -> GradedMap:
    """Equation N of the strict, degree-shifted morphism definition, written literally."""
    S, T, m = f.source, f.target, f.shift
    g = f.component
    if N == 0:
        return compose(g(1), S.op(1)) + compose(T.op(1), g(1)).scale(sign(1 + m))
    one_a = identity(S.algebra.space)
    lhs = compose(g(N + 1), S.word_differential(N + 1)) + compose(T.op(1), g(N + 1)).scale(sign(N + 1 + m))
    rhs = [compose(g(N), tensor_many([S.op(2)] + [one_a] * (N - 1))).scale(sign(N + 1)),
           compose(T.op(2), tensor_many([g(N), one_a])).scale(-1)]
    for r in range(1, N):
        rhs.append(compose(g(N), S.insertion(N + 1, r)).scale(sign(N + 1 + r)))
    return lhs - map_sum(rhs, S.word(N + 1), T.total, m + N - 1)


def verify_morphism_strict_form(f: AInftyMorphism) -> dict:
    """
    The strict rendering, plus its agreement with the canonical equations:
    equation N of this form equals (−1)^N times the canonical residual.
    """
    if not (f.source.is_strict() and f.target.is_strict()):
        return failed("strict_form", "the strict rendering applies to strict modules only")
    reports = []
    for N in range(0, f.arity_bound):
        literal = _strict_form_residual(f, N)
        canonical = morphism_residual(f, N + 1).scale(sign(N))
        reports.append(residual_report(f"N={N}", literal, f"strict morphism equation fails at N={N}", N=N))
        reports.append(residual_report(f"agreement N={N}", literal - canonical,
                                       "strict rendering disagrees with the canonical equation", N=N))
    return combine("strict_form", reports, {"shift": f.shift})


def _shift_key(key: Key, c: int) -> Key:
    if isinstance(key[1], tuple) and key[1] and isinstance(key[1][0], tuple):
        first = key[1][0]
        return (key[0] + c, ((first[0] + c, first[1]),) + key[1][1:])
    return (key[0] + c, key[1])


def _shift_map(f: GradedMap, source: GradedSpace, target: GradedSpace, c_source: int, c_target: int,
               factor: int) -> GradedMap:
    columns = {_shift_key(src, c_source): {_shift_key(tgt, c_target): factor * v for tgt, v in col.items()}
               for src, col in f.items()}
    return GradedMap(source, target, f.degree + c_target - c_source, columns, check=False)


def suspend_module(M: AInftyModule, c: int) -> AInftyModule:
    """Σ^c M: degrees raised by c, m_k scaled by (−1)^{ck}."""
    carrier = M.carrier.shift(c)
    frame = AInftyModule(M.algebra, carrier, {}, M.arity_bound)
    ops = {k: _shift_map(M.op(k), frame.word(k), carrier, c, c, sign(c * k))
           for k in range(1, M.arity_bound + 1)}
    return AInftyModule(M.algebra, carrier, ops, M.arity_bound, M.name)


def suspend_morphism(f: AInftyMorphism, c: int, source: AInftyModule, target: AInftyModule) -> AInftyMorphism:
    """Σ^c f between Σ^c source and Σ^c target: components scaled by (−1)^{c(k−1)}."""
    maps = {k: _shift_map(f.component(k), source.word(k), target.carrier, c, c, sign(c * (k - 1)))
            for k in range(1, f.arity_bound + 1)}
    return AInftyMorphism(source, target, f.shift, maps)


def transfer_components(frame: ModuleFrame, R: HomotopyRetract, R_fiber: HomotopyRetract, arity_bound: int):
    """
    Tree formulas shared by module and path transfer.

    Returns (ops, i_components, p_components) for arities ≤ arity_bound.
    Inner products act on the fiber; the outermost one is the arity-2
    operation of the frame.
    """
    A = frame.algebra
    one_a, one_last = identity(A.space), identity(frame.last)
    mu_fiber = frame.fiber_op(2) if arity_bound >= 2 else None
    final = frame.op(2) if arity_bound >= 2 else None
    i_f, h_f = R_fiber.i.map, R_fiber.h
    ops = {1: R.small.d}
    i_maps = {1: R.i.map}
    p_maps = {1: R.p.map}
    U = i_f
    V = h_f
    for k in range(2, arity_bound + 1):
        tree = compose(final, tensor_many([U, one_last]))
        ops[k] = compose(R.p.map, tree).scale(sign((k - 2) * (k - 3) // 2))
        i_maps[k] = compose(R.h, tree).scale(sign(k * (k - 1) // 2))
        p_tree = compose(final, tensor_many([V, one_last]))
        p_maps[k] = compose(R.p.map, p_tree).scale(sign((k - 1) * (k - 2) // 2))
        U = compose(h_f, compose(mu_fiber, tensor_many([U, one_a])))
        V = compose(h_f, compose(mu_fiber, tensor_many([V, one_a])))
    return ops, i_maps, p_maps


def homotopy_transfer(M: StrictModule, R: HomotopyRetract, arity_bound: int
                      ) -> Tuple[AInftyModule, AInftyMorphism, AInftyMorphism]:
    """Transferred A∞ structure on R.small with the ∞-morphisms i and p."""
    if R.big.space != M.space or R.big.d != M.complex.d:
        raise SchemaError("retract does not start from the module's complex")
    require_retract(R)
    big = promote(M, arity_bound)
    ops, i_maps, p_maps = transfer_components(big, R, R, arity_bound)
    small = AInftyModule(M.algebra, R.small.space, ops, arity_bound, f"transfer({M.name})")
    logger.debug(f"Transferred structure onto dims {R.small.space.dims()} up to arity {arity_bound}")
    return small, AInftyMorphism(small, big, 0, i_maps), AInftyMorphism(big, small, 0, p_maps)


def homology_roundtrip(f: MorphismFrame, g: MorphismFrame) -> dict:
    """H(g_1)∘H(f_1) and H(f_1)∘H(g_1) against the identity on homology of the totals."""
    source = ChainComplex(f.source.total, f.source.op(1), check=False)
    target = ChainComplex(f.target.total, f.target.op(1), check=False)
    R_s, R_t = retract_to_homology(source), retract_to_homology(target)
    Hf = induced_on_homology(f.component(1), R_s, R_t)
    Hg = induced_on_homology(g.component(1), R_t, R_s)
    checks = [
        residual_report("H(g)H(f)", compose(Hg, Hf) - identity(R_s.small.space), "H(g_1)∘H(f_1) is not the identity"),
        residual_report("H(f)H(g)", compose(Hf, Hg) - identity(R_t.small.space), "H(f_1)∘H(g_1) is not the identity"),
    ]
    return combine("homology_roundtrip", checks, {"homology_dims": {str(q): n for q, n in R_s.small.space.dims().items()}})


def invert_infty_quasi_iso(f: AInftyMorphism, R_M: HomotopyRetract, R_N: HomotopyRetract) -> AInftyMorphism:
    """
    Homotopy inverse of an ∞-quasi-isomorphism between strict modules:
    i^M ∘ (p^N ∘ f ∘ i^M)^{-1} ∘ p^N.
    """
    M, N = f.source.as_strict(), f.target.as_strict()
    K = f.arity_bound
    _, i_m, _ = homotopy_transfer(M, R_M, K)
    _, _, p_n = homotopy_transfer(N, R_N, K)
    i_m = AInftyMorphism(i_m.source, f.source, 0, i_m.maps)
    p_n = AInftyMorphism(f.target, p_n.target, 0, p_n.maps)
    epsilon = compose_morphisms(p_n, compose_morphisms(f, i_m))
    try:
        delta = invert_infty_iso(epsilon)
    except InversionError as exc:
        raise QuasiIsomorphismError(f"f_1 is not a quasi-isomorphism: {exc}", exc.witness)
    return compose_morphisms(i_m, compose_morphisms(delta, p_n))
