"""
JSON fixture reader for spaces, maps, complexes, algebras, modules, morphisms,
twisting cocycles, enriched complexes, cubical sets, groups and path modules
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

from .algebra import GradedMap, GradedSpace, Key, format_key, tensor_product, to_scalar
from .ainfty import AInftyModule, AInftyMorphism, DGAlgebra, StrictModule, promote
from .builtins import algebra_by_name, lens_cocycle, module_by_name
from .complexes import ChainComplex
from .cubical import CubicalSet, circle, point, product_set, standard_cube
from .exceptions import SchemaError
from .groups import FiniteGroup, group_by_name
from .morse import CriticalSet, EnrichedComplex, TwistingCocycle, build_enriched
from .pathmod import PathModule, PathMorphism, cone_path_module, identity_path_morphism, strict_path_module

SCHEMA_VERSION = 1

KINDS = ("graded_space", "graded_map", "complex", "dga", "module", "ainfty_module", "ainfty_morphism",
         "twisting_cocycle", "enriched", "cubical_set", "group", "path_module", "path_morphism")


class FixtureReader:
    """Read fixtures and resolve nested specs, built-ins and file references"""

    def __init__(self, base_dir: Optional[Union[str, Path]] = None, arity_bound: int = 4):
        self.logger = logging.getLogger(__name__)
        self.base_dir = Path(base_dir) if base_dir else Path.cwd()
        self.arity_bound = arity_bound
        self._cache: Dict[Path, Dict[str, Any]] = {}

    # Files

    def load_json(self, path: Union[str, Path]) -> Dict[str, Any]:
        """Load and check the schema header of one fixture file"""
        path = Path(path)
        if not path.is_absolute():
            path = self.base_dir / path
        path = path.resolve()
        if path in self._cache:
            return self._cache[path]
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except FileNotFoundError:
            raise SchemaError(f"fixture file not found: {path}")
        except json.JSONDecodeError as e:
            raise SchemaError(f"fixture {path.name} is not valid JSON: {e}")
        if not isinstance(data, dict):
            raise SchemaError(f"fixture {path.name} must be a JSON object")
        if data.get("schema") != SCHEMA_VERSION:
            raise SchemaError(f"fixture {path.name} has schema {data.get('schema')!r}, expected {SCHEMA_VERSION}")
        if data.get("kind") not in KINDS:
            raise SchemaError(f"fixture {path.name} has unknown kind {data.get('kind')!r}")
        data = dict(data, _dir=str(path.parent))
        self._cache[path] = data
        self.logger.debug(f"Loaded {data['kind']} fixture {path.name}")
        return data

    def read(self, path: Union[str, Path], kind: Optional[str] = None) -> Tuple[str, Any]:
        """Load a fixture file and build its object"""
        data = self.load_json(path)
        if kind and data["kind"] != kind:
            raise SchemaError(f"expected a {kind} fixture, got {data['kind']}")
        return data["kind"], self.build(data)

    def resolve(self, node: Any, kind: str, context: Optional[Mapping[str, Any]] = None) -> Any:
        """A nested node: inline object, {"ref": file} or a bare file name"""
        if isinstance(node, str):
            node = {"ref": node}
        if not isinstance(node, dict):
            raise SchemaError(f"{kind} must be given as an object or a file reference")
        if "ref" in node:
            base = Path((context or {}).get("_dir", self.base_dir))
            data = self.load_json(base / node["ref"])
        else:
            data = dict(node, kind=node.get("kind", kind), _dir=(context or {}).get("_dir", str(self.base_dir)))
        if data["kind"] != kind:
            raise SchemaError(f"expected a {kind}, got {data['kind']}")
        return self.build(data)

    def build(self, data: Mapping[str, Any]) -> Any:
        builder = getattr(self, f"_build_{data['kind']}")
        try:
            return builder(data)
        except (KeyError, TypeError, ValueError) as e:
            raise SchemaError(f"malformed {data['kind']} fixture: {e!r}")

    # Linear data

    def _build_graded_space(self, data: Mapping[str, Any]) -> GradedSpace:
        basis = {int(q): [str(label) for label in labels] for q, labels in data.get("basis", {}).items()}
        return GradedSpace.build(basis, [int(q) for q in data.get("degrees", [])])

    def parse_map(self, data: Mapping[str, Any], source: GradedSpace, target: GradedSpace,
                  degree: Optional[int] = None) -> GradedMap:
        """Sparse entries [source degree, target label, source label, "p/q"]; tensor labels use ⊗."""
        if degree is None:
            degree = int(data["degree"])
        elif "degree" in data and int(data["degree"]) != degree:
            raise SchemaError(f"map degree {data['degree']} differs from the expected {degree}")
        source_index = _label_index(source)
        target_index = _label_index(target)
        columns: Dict[Key, Dict[Key, Any]] = {}
        for entry in data.get("entries", []):
            if len(entry) != 4:
                raise SchemaError(f"map entry {entry!r} needs [degree, row, column, value]")
            q, row, col, value = int(entry[0]), str(entry[1]), str(entry[2]), entry[3]
            src = source_index.get((q, col))
            if src is None:
                raise SchemaError(f"unknown source basis {col!r} in degree {q}")
            tgt = target_index.get((q + degree, row))
            if tgt is None:
                raise SchemaError(f"unknown target basis {row!r} in degree {q + degree}")
            column = columns.setdefault(src, {})
            column[tgt] = column.get(tgt, 0) + to_scalar(value)
        return GradedMap(source, target, degree, columns)

    def _build_graded_map(self, data: Mapping[str, Any]) -> GradedMap:
        source = self.resolve(data["source"], "graded_space", data)
        target = self.resolve(data.get("target", data["source"]), "graded_space", data)
        return self.parse_map(data, source, target)

    def _build_complex(self, data: Mapping[str, Any]) -> ChainComplex:
        space = self.resolve(data["space"], "graded_space", data)
        d = self.parse_map(data.get("d", {}), space, space, -1)
        return ChainComplex(space, d)

    # Algebra and modules

    def _build_dga(self, data: Mapping[str, Any]) -> DGAlgebra:
        if "builtin" in data:
            options = {k: v for k, v in data.items() if k not in ("builtin", "kind", "schema", "_dir")}
            return algebra_by_name(str(data["builtin"]), **options)
        complex = self.resolve(data["complex"], "complex", data)
        square = tensor_product(complex.space, complex.space)
        product = self.parse_map(data["product"], square, complex.space, 0)
        unit = _label_index(complex.space).get((0, str(data.get("unit", "1"))))
        if unit is None:
            raise SchemaError(f"unit {data.get('unit', '1')!r} is not a degree-0 basis label")
        return DGAlgebra(complex, product, unit, data.get("name", ""))

    def _build_module(self, data: Mapping[str, Any]) -> StrictModule:
        if "builtin" in data:
            options = {k: v for k, v in data.items() if k not in ("builtin", "kind", "schema", "_dir")}
            return module_by_name(str(data["builtin"]), **options)
        A = self.resolve(data["algebra"], "dga", data)
        complex = self.resolve(data["complex"], "complex", data)
        action = self.parse_map(data["action"], tensor_product(complex.space, A.space), complex.space, 0)
        return StrictModule(A, complex, action, data.get("name", ""))

    def _build_ainfty_module(self, data: Mapping[str, Any]) -> AInftyModule:
        K = int(data.get("arity_bound", self.arity_bound))
        if "module" in data:
            return promote(self.resolve(data["module"], "module", data), K)
        A = self.resolve(data["algebra"], "dga", data)
        carrier = self.resolve(data["carrier"], "graded_space", data)
        frame = AInftyModule(A, carrier, {}, K)
        ops = {int(k): self.parse_map(op, frame.word(int(k)), carrier, int(k) - 2)
               for k, op in data.get("ops", {}).items()}
        return AInftyModule(A, carrier, ops, K, data.get("name", ""))

    def module_like(self, node: Any, context: Mapping[str, Any], arity_bound: int) -> AInftyModule:
        """A strict module (promoted) or an A∞ module, whichever the node holds"""
        kind = _peek_kind(self, node, context)
        if kind == "ainfty_module":
            module = self.resolve(node, "ainfty_module", context)
            return module if module.arity_bound == arity_bound else module.truncate(arity_bound)
        return promote(self.resolve(node, "module", context), arity_bound)

    def _build_ainfty_morphism(self, data: Mapping[str, Any]) -> AInftyMorphism:
        K = int(data.get("arity_bound", self.arity_bound))
        source = self.module_like(data["source"], data, K)
        target = self.module_like(data.get("target", data["source"]), data, K)
        shift = int(data.get("shift", 0))
        maps = {}
        for k, component in data.get("components", {}).items():
            k = int(k)
            maps[k] = self.parse_map(component, source.word(k), target.carrier, shift + k - 1)
        return AInftyMorphism(source, target, shift, maps)

    # Morse data

    def _build_twisting_cocycle(self, data: Mapping[str, Any]) -> TwistingCocycle:
        if data.get("builtin") == "lens":
            return lens_cocycle(group_by_name(str(data.get("group", "C2"))), int(data.get("top", 3)),
                                bool(data.get("mutate", False)))
        A = self.resolve(data["algebra"], "dga", data)
        crit = CriticalSet({str(x): int(i) for x, i in data["critical"].items()})
        index = _label_index(A.space)
        entries = {}
        for entry in data.get("entries", []):
            x, y = (str(v) for v in entry["pair"])
            element = {}
            for label, value in entry.get("value", {}).items():
                expected = crit.index(x) - crit.index(y) - 1
                key = index.get((expected, str(label))) or _unique_label(A.space, str(label))
                element[key] = to_scalar(value)
            entries[(x, y)] = element
        return TwistingCocycle(A, crit, entries, data.get("name", ""))

    def _build_enriched(self, data: Mapping[str, Any]) -> EnrichedComplex:
        fiber = self.resolve(data["fiber"], "module", data)
        cocycle = self.resolve(data["cocycle"], "twisting_cocycle", data)
        return build_enriched(fiber, cocycle)

    # Combinatorial data

    def _build_cubical_set(self, data: Mapping[str, Any]) -> CubicalSet:
        builtin = data.get("builtin")
        if builtin == "cube":
            n = int(data.get("n", 2))
            return standard_cube(n, int(data.get("max_dim", n)))
        if builtin == "circle":
            return circle()
        if builtin == "point":
            return point()
        if builtin == "product":
            return product_set(self.resolve(data["left"], "cubical_set", data),
                               self.resolve(data["right"], "cubical_set", data))
        cubes = {int(k): [str(c) for c in labels] for k, labels in data["cubes"].items()}
        faces = {str(c): [(str(a), str(b)) for a, b in pairs] for c, pairs in data.get("faces", {}).items()}
        for labels in cubes.values():
            for c in labels:
                faces.setdefault(c, [])
        degeneracies = {str(c): [str(s) for s in images] for c, images in data.get("degeneracies", {}).items()}
        return CubicalSet(cubes, faces, degeneracies, frozenset(str(c) for c in data.get("degenerate", [])),
                          name=data.get("name", "cubical set"))

    def _build_group(self, data: Mapping[str, Any]) -> FiniteGroup:
        if "builtin" in data:
            return group_by_name(str(data["builtin"]))
        return FiniteGroup.from_table([str(e) for e in data["elements"]], data["table"], data.get("name", "group"))

    def _build_path_module(self, data: Mapping[str, Any]) -> PathModule:
        K = int(data.get("arity_bound", self.arity_bound))
        M = self.resolve(data["module"], "module", data)
        builtin = data.get("builtin", "cone")
        if builtin == "cone":
            return cone_path_module(M, K)
        if builtin == "strict":
            return strict_path_module(M, K)
        raise SchemaError(f"unknown path module construction {builtin!r}")

    def _build_path_morphism(self, data: Mapping[str, Any]) -> PathMorphism:
        source = self.resolve(data["source"], "path_module", data)
        if data.get("builtin") == "identity":
            return identity_path_morphism(source)
        target = self.resolve(data.get("target", data["source"]), "path_module", data)
        if target.same_as(source):
            target = source
        shift = int(data.get("shift", 0))
        maps = {}
        for k, component in data.get("components", {}).items():
            k = int(k)
            maps[k] = self.parse_map(component, source.word(k), target.total, shift + k - 1)
        return PathMorphism(source, target, shift, maps)


def _label_index(space: GradedSpace) -> Dict[Tuple[int, str], Key]:
    return {(key[0], format_key(key)): key for key in space}


def _unique_label(space: GradedSpace, label: str) -> Key:
    matches = [key for key in space if format_key(key) == label]
    if len(matches) != 1:
        raise SchemaError(f"algebra label {label!r} matches {len(matches)} basis vectors")
    return matches[0]


def _peek_kind(reader: FixtureReader, node: Any, context: Mapping[str, Any]) -> str:
    if isinstance(node, str):
        node = {"ref": node}
    if isinstance(node, dict) and "ref" in node:
        return reader.load_json(Path(context.get("_dir", reader.base_dir)) / node["ref"])["kind"]
    return node.get("kind", "module") if isinstance(node, dict) else "module"


def load_fixture(path: Union[str, Path], kind: Optional[str] = None, arity_bound: int = 4) -> Any:
    """
    Convenience function to read a single fixture

    Args:
        path: fixture file
        kind: expected kind, checked when given
        arity_bound: default K for modules and morphisms without one

    Returns:
        The constructed object
    """
    path = Path(path)
    reader = FixtureReader(path.parent, arity_bound)
    return reader.read(path.name, kind)[1]
