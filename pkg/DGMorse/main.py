"""
Main entry point for the DG-Morse toolkit
"""

import argparse
import logging
import sys
import time
from dataclasses import dataclass
from functools import partial
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from .ainfty import (compose_morphisms, homology_roundtrip, homotopy_transfer, identity_morphism,
                     invert_infty_iso, invert_infty_quasi_iso, promote, verify_ainfty_module, verify_dga,
                     verify_morphism, verify_morphism_strict_form, verify_strict_module)
from .algebra import format_key, format_scalar, vector_to_dict
from .complexes import homology, induced_on_homology, retract_to_homology, verify_chain_map, verify_complex, verify_retract
from .config import ProfiledConfig, ToolkitConfig
from .cubical import CubicalChain, boundary, chain_complex, cube_diagonal, cubes_of_dimension, verify_cubical
from .dense_oracle import check_homology, check_morphism, check_structure
from .exceptions import ConfigurationError, DegreeMismatchError, GroupError, SchemaError, ToolkitError
from .fixture_reader import SCHEMA_VERSION, FixtureReader
from .groups import FiniteGroup, group_by_name
from .linalg import rank
from .morse import induce_morphism, spectral_sequence, verify_enriched, verify_spectral_sequence, verify_twisting_cocycle
from .output_formatter import FORMATS, OutputFormatter, frame_records
from .pathmod import (compose_path, identity_path_morphism, invert_path_iso, invert_path_quasi,
                      path_homology_roundtrip, transfer_path, verify_path_module, verify_path_morphism)
from .pipeline import SWEEPS, VerificationPipeline, roundtrip_report
from .reports import FAIL, PASS, failed, is_pass, passed
from .sng import coproduct_table, loop_basis, morse_cross_check, parse_class, table_frame_rows, verify_sng_properties

INPUT_ERRORS = (SchemaError, DegreeMismatchError, ConfigurationError)

# Groups and dimensions covered by `sng check --all`
STANDARD_GROUPS = ("C2", "C3", "Q8")
STANDARD_DIMENSIONS = (3, 5)

Tables = Dict[str, List[Dict[str, Any]]]
Outcome = Tuple[List[dict], Tables]


@dataclass
class CommandContext:
    config: ToolkitConfig
    pipeline: VerificationPipeline
    reader: FixtureReader
    oracle: bool = False

    def load(self, path: str, kinds: Sequence[str]) -> Tuple[str, Any]:
        """Read a fixture and check its kind; group lookups failing here are input errors."""
        try:
            kind, obj = self.reader.read(path)
        except GroupError as e:
            raise SchemaError(f"{path}: {e}", e.witness)
        if kind not in kinds:
            raise SchemaError(f"{path} holds a {kind}, expected {' or '.join(kinds)}")
        return kind, obj


def _dims_rows(dims: Dict[int, int], column: str = "dim") -> List[Dict[str, int]]:
    return [{"degree": q, column: n} for q, n in sorted(dims.items())]


def _component_rows(f) -> List[Dict[str, int]]:
    return [{"arity": k, "degree": f.component(k).degree, "nonzero": f.component(k).nnz}
            for k in range(1, f.arity_bound + 1)]


def _group(name: str) -> FiniteGroup:
    """A built-in group name or a group fixture file"""
    try:
        if name.endswith(".json") or Path(name).is_file():
            return FixtureReader(Path(name).parent).read(Path(name).name, "group")[1]
        return group_by_name(name)
    except GroupError as e:
        raise SchemaError(str(e))


# ainfty

def ainfty_verify(ctx: CommandContext, args) -> Outcome:
    kind, obj = ctx.load(args.input, ("dga", "module", "ainfty_module", "ainfty_morphism"))
    tables: Tables = {}
    if kind == "dga":
        checks = [verify_dga(obj)]
        tables["algebra"] = _dims_rows(obj.space.dims())
    elif kind == "module":
        checks = [verify_strict_module(obj)]
        if ctx.oracle:
            checks.append(check_structure(promote(obj, ctx.config.max_arity)))
        tables["module"] = _dims_rows(obj.space.dims())
    elif kind == "ainfty_module":
        checks = [verify_ainfty_module(obj)]
        if ctx.oracle:
            checks.append(check_structure(obj))
        tables["operations"] = [{"arity": k, "degree": k - 2, "nonzero": obj.op(k).nnz}
                                for k in range(1, obj.arity_bound + 1)]
    else:
        checks = [verify_morphism(obj)]
        if obj.source.is_strict() and obj.target.is_strict():
            checks.append(verify_morphism_strict_form(obj))
        if ctx.oracle:
            checks.append(check_morphism(obj))
        tables["components"] = _component_rows(obj)
    return checks, tables


def ainfty_compose(ctx: CommandContext, args) -> Outcome:
    _, f = ctx.load(args.first, ("ainfty_morphism",))
    _, g = ctx.load(args.second, ("ainfty_morphism",))
    composite = compose_morphisms(g, f)
    return [verify_morphism(composite)], {"components": _component_rows(composite)}


def ainfty_invert(ctx: CommandContext, args) -> Outcome:
    _, f = ctx.load(args.input, ("ainfty_morphism",))
    if args.quasi:
        g = invert_infty_quasi_iso(f, retract_to_homology(f.source.complex), retract_to_homology(f.target.complex))
        checks = [verify_morphism(g), homology_roundtrip(f, g)]
    else:
        g = invert_infty_iso(f)
        checks = [
            verify_morphism(g),
            roundtrip_report("inverse_after", compose_morphisms(g, f), identity_morphism(f.source)),
            roundtrip_report("inverse_before", compose_morphisms(f, g), identity_morphism(f.target)),
        ]
    return checks, {"components": _component_rows(g)}


def ainfty_transfer(ctx: CommandContext, args) -> Outcome:
    _, M = ctx.load(args.input, ("module",))
    K = args.arity or ctx.config.transfer_arity
    R = retract_to_homology(M.complex)
    small, i, p = homotopy_transfer(M, R, K)
    checks = [verify_retract(R), verify_ainfty_module(small), verify_morphism(i), verify_morphism(p)]
    if ctx.oracle:
        checks.append(check_structure(small))
    tables = {
        "homology": _dims_rows(R.small.space.dims()),
        "operations": [{"arity": k, "degree": k - 2, "nonzero": small.op(k).nnz} for k in range(1, K + 1)],
    }
    return checks, tables


def run_sweep(ctx: CommandContext, args) -> Outcome:
    report = ctx.pipeline.run_sweep(args.which)
    sweeps = report["checks"] if args.which == "all" else [report]
    rows = [{"sweep": s["check"], "instances": s["details"]["instances"], "failed": s["details"]["failed"]}
            for s in sweeps]
    return [report], {"sweeps": rows}


# pathmod

def pathmod_verify(ctx: CommandContext, args) -> Outcome:
    kind, obj = ctx.load(args.input, ("path_module", "path_morphism"))
    if kind == "path_module":
        return [verify_path_module(obj)], {"total": _dims_rows(obj.total.dims()),
                                           "fiber": _dims_rows(obj.fiber.dims())}
    return [verify_path_morphism(obj)], {"components": _component_rows(obj)}


def pathmod_compose(ctx: CommandContext, args) -> Outcome:
    _, h1 = ctx.load(args.first, ("path_morphism",))
    _, h2 = ctx.load(args.second, ("path_morphism",))
    composite = compose_path(h2, h1)
    return [verify_path_morphism(composite)], {"components": _component_rows(composite)}


def pathmod_invert(ctx: CommandContext, args) -> Outcome:
    _, h = ctx.load(args.input, ("path_morphism",))
    if args.quasi:
        g = invert_path_quasi(h)
        checks = [verify_path_morphism(g), path_homology_roundtrip(h, g)]
    else:
        g = invert_path_iso(h)
        checks = [
            verify_path_morphism(g),
            roundtrip_report("inverse_after", compose_path(g, h), identity_path_morphism(h.source)),
            roundtrip_report("inverse_before", compose_path(h, g), identity_path_morphism(h.target)),
        ]
    return checks, {"components": _component_rows(g)}


def pathmod_transfer(ctx: CommandContext, args) -> Outcome:
    _, E = ctx.load(args.input, ("path_module",))
    R = retract_to_homology(E.complex, E.fiber_keys)
    small, i, p = transfer_path(E, R, args.arity)
    checks = [verify_path_module(small), verify_path_morphism(i), verify_path_morphism(p)]
    return checks, {"total": _dims_rows(small.total.dims()), "fiber": _dims_rows(small.fiber.dims())}


# morse

def morse_verify(ctx: CommandContext, args) -> Outcome:
    kind, obj = ctx.load(args.input, ("twisting_cocycle", "enriched"))
    if kind == "twisting_cocycle":
        rows = [{"pair": f"{x},{y}", "value": str(vector_to_dict(v))} for (x, y), v in obj.entries.items()]
        return [verify_twisting_cocycle(obj)], {"cocycle": rows}
    return [verify_enriched(obj)], {"chains": _dims_rows(obj.space.dims())}


def morse_build(ctx: CommandContext, args) -> Outcome:
    _, E = ctx.load(args.input, ("enriched",))
    H = homology(E.complex)
    checks = [verify_enriched(E)]
    if ctx.oracle:
        checks.append(check_homology(E.complex, H.dims()))
    return checks, {"chains": _dims_rows(E.space.dims()), "homology": _dims_rows(H.dims())}


def morse_induce(ctx: CommandContext, args) -> Outcome:
    _, eta = ctx.load(args.morphism, ("ainfty_morphism",))
    _, E1 = ctx.load(args.source, ("enriched",))
    _, E2 = ctx.load(args.target, ("enriched",))
    f = induce_morphism(eta, E1, E2)
    R1, R2 = retract_to_homology(E1.complex), retract_to_homology(E2.complex)
    Hf = induced_on_homology(f.map, R1, R2)
    rows = []
    for q in Hf.source.degrees:
        rows.append({"degree": q, "source": Hf.source.dim(q), "target": Hf.target.dim(q + Hf.degree),
                     "rank": rank(Hf.column(key) for key in Hf.source.keys(q))})
    return [verify_chain_map(f)], {"homology_map": rows}


def morse_specseq(ctx: CommandContext, args) -> Outcome:
    _, E = ctx.load(args.input, ("enriched",))
    if args.page < 0:
        raise SchemaError("page must be nonnegative")
    pages = spectral_sequence(E, args.page)
    tables = {
        f"E{args.page}": frame_records(pages.table(args.page)),
        "Einf": frame_records(pages.table()),
        "homology": _dims_rows(pages.homology_dims),
    }
    return [verify_spectral_sequence(pages)], tables


# cubical

def cubical_diagonal(ctx: CommandContext, args) -> Outcome:
    _, X = ctx.load(args.input, ("cubical_set",))
    rows = []
    for k in sorted(X.cubes):
        for label in X.nondegenerate(k):
            for s, left, right in cube_diagonal(X, label):
                rows.append({"cube": label, "sign": s, "left": left, "right": right})
    return [verify_cubical(X)], {"diagonal": rows}


def cubical_boundary(ctx: CommandContext, args) -> Outcome:
    _, X = ctx.load(args.input, ("cubical_set",))
    dims = [args.dim] if args.dim is not None else [k for k in sorted(X.cubes) if k >= 1]
    rows = []
    for k in dims:
        for label in cubes_of_dimension(X, k):
            for face, c in boundary(CubicalChain.cube(X, label)).terms.items():
                rows.append({"cube": label, "face": face, "coefficient": format_scalar(c)})
    return [verify_complex(chain_complex(X))], {"boundary": rows}


# sng

def sng_betti(ctx: CommandContext, args) -> Outcome:
    G = _group(args.group)
    basis = loop_basis(G, args.n, ctx.config.max_k, args.relative)
    tables = {
        "betti": [{"degree": q, "dim": int(b)} for q, b in enumerate(basis.betti.tolist())],
        "classes": [{"class": str(c), "degree": c.degree(args.n)} for c in basis.classes],
    }
    details = {"group": G.name, "n": args.n, "complete_through": basis.complete_through}
    return [passed("loop_basis", details)], tables


def sng_coproduct(ctx: CommandContext, args) -> Outcome:
    G = _group(args.group)
    classes = [parse_class(args.cls, G)] if args.cls else None
    table = coproduct_table(G, args.n, ctx.config.max_k, args.relative, classes)
    rows = table_frame_rows(table, args.n)
    return [passed("coproduct", {"group": G.name, "n": args.n, "classes": len(table)})], {"coproduct": rows}


def sng_check(ctx: CommandContext, args) -> Outcome:
    if args.all:
        cases = [(name, n) for name in STANDARD_GROUPS for n in STANDARD_DIMENSIONS]
    else:
        cases = [(args.group, args.n)]
    tasks: List[Callable[[], dict]] = []
    for name, n in cases:
        G = _group(name)
        tasks.append(partial(verify_sng_properties, G, n, ctx.config.max_k))
        if len(G) > 1 and G.is_cyclic() and n == 3:
            tasks.append(partial(morse_cross_check, G, n, ctx.config.max_k))
    checks = ctx.pipeline.run_tasks(tasks, "sng")
    rows = [{"check": c["check"], "group": c.get("details", {}).get("group", ""), "status": c["status"]}
            for c in checks]
    return checks, {"summary": rows}


# complex

def complex_homology(ctx: CommandContext, args) -> Outcome:
    _, C = ctx.load(args.input, ("complex",))
    H = homology(C)
    checks = [verify_complex(C)]
    if ctx.oracle:
        checks.append(check_homology(C, H.dims()))
    rows = [{"class": format_key(k), "representative": str(vector_to_dict(v))} for k, v in H.representatives.items()]
    return checks, {"homology": _dims_rows(H.dims()), "representatives": rows}


def complex_retract(ctx: CommandContext, args) -> Outcome:
    _, C = ctx.load(args.input, ("complex",))
    R = retract_to_homology(C)
    rows = [{"degree": q, "complex": C.space.dim(q), "homology": R.small.space.dim(q)} for q in C.space.degrees]
    return [verify_retract(R)], {"retract": rows}


COMMANDS: Dict[Tuple[str, str], Callable[[CommandContext, Any], Outcome]] = {
    ("ainfty", "verify"): ainfty_verify,
    ("ainfty", "compose"): ainfty_compose,
    ("ainfty", "invert"): ainfty_invert,
    ("ainfty", "transfer"): ainfty_transfer,
    ("ainfty", "sweep"): run_sweep,
    ("pathmod", "verify"): pathmod_verify,
    ("pathmod", "compose"): pathmod_compose,
    ("pathmod", "invert"): pathmod_invert,
    ("pathmod", "transfer"): pathmod_transfer,
    ("pathmod", "sweep"): run_sweep,
    ("morse", "verify"): morse_verify,
    ("morse", "build"): morse_build,
    ("morse", "induce"): morse_induce,
    ("morse", "specseq"): morse_specseq,
    ("cubical", "diagonal"): cubical_diagonal,
    ("cubical", "boundary"): cubical_boundary,
    ("sng", "betti"): sng_betti,
    ("sng", "coproduct"): sng_coproduct,
    ("sng", "check"): sng_check,
    ("complex", "homology"): complex_homology,
    ("complex", "retract"): complex_retract,
}


# Parser

def _add_common(parser: argparse.ArgumentParser, nested: bool):
    """Global options; nested copies use SUPPRESS so they only override when given."""
    def default(value):
        return argparse.SUPPRESS if nested else value

    parser.add_argument("--format", choices=FORMATS, default=default(None), help="Report format (default: json)")
    parser.add_argument("--seed", type=int, default=default(None), help="Seed for randomized sweeps")
    parser.add_argument("-o", "--output", default=default(None), help="Write the report to this file")
    parser.add_argument("--profile", choices=["quick", "acceptance"], default=default(None),
                        help="Use a pre-configured profile")
    parser.add_argument("--workers", type=int, default=default(None), help="Number of worker threads")
    parser.add_argument("--max-arity", type=int, default=default(None), help="Arity bound K for fixtures")
    parser.add_argument("--max-k", type=int, default=default(None), help="Largest loop level k")
    parser.add_argument("--oracle", action="store_true", default=default(False),
                        help="Cross-check against the dense oracle")
    parser.add_argument("--timings", action="store_true", default=default(False), help="Record timings")
    parser.add_argument("--save", action="store_true", default=default(False),
                        help="Also save the report and a summary to the output directory")
    parser.add_argument("-v", "--verbose", action="store_true", default=default(False),
                        help="Enable verbose logging")
    parser.add_argument("-q", "--quiet", action="store_true", default=default(False),
                        help="Suppress all logging except errors")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dgmorse",
        description="DG-Morse toolkit - exact verification of A∞ modules, twisted Morse complexes and loop coproducts"
    )
    _add_common(parser, nested=False)
    commands = parser.add_subparsers(dest="command", required=True)

    def action_parser(group, name, help_text):
        sub = group.add_parser(name, help=help_text)
        _add_common(sub, nested=True)
        return sub

    for family, label in (("ainfty", "A∞ modules and morphisms"), ("pathmod", "path modules and morphisms")):
        family_parser = commands.add_parser(family, help=label)
        actions = family_parser.add_subparsers(dest="action", required=True)
        action_parser(actions, "verify", "Verify a fixture").add_argument("input")
        sub = action_parser(actions, "compose", "Compose SECOND after FIRST")
        sub.add_argument("first")
        sub.add_argument("second")
        sub = action_parser(actions, "invert", "Invert an ∞-isomorphism")
        sub.add_argument("input")
        sub.add_argument("--quasi", action="store_true", help="Homotopy inverse of a quasi-isomorphism")
        sub = action_parser(actions, "transfer", "Transfer onto homology")
        sub.add_argument("input")
        sub.add_argument("--arity", type=int, help="Arity bound of the transferred structure")
        sub = action_parser(actions, "sweep", "Seeded randomized sweep")
        sub.add_argument("which", nargs="?", choices=SWEEPS + ("all",), default="iso" if family == "ainfty" else "path")
        sub.add_argument("--instances", type=int, help="Instances per sweep")
        sub.add_argument("--arity", type=int, help="Arity bound of transferred structures")

    morse = commands.add_parser("morse", help="Twisted Morse complexes")
    actions = morse.add_subparsers(dest="action", required=True)
    action_parser(actions, "verify", "Verify a cocycle or enriched complex").add_argument("input")
    action_parser(actions, "build", "Enriched complex and its homology").add_argument("input")
    sub = action_parser(actions, "induce", "Chain map induced by an A∞ morphism of fibers")
    sub.add_argument("morphism")
    sub.add_argument("source")
    sub.add_argument("target")
    sub = action_parser(actions, "specseq", "Spectral sequence of the critical-index filtration")
    sub.add_argument("input")
    sub.add_argument("--page", type=int, default=2, help="Page to print (default: 2)")

    cubical = commands.add_parser("cubical", help="Cubical sets")
    actions = cubical.add_subparsers(dest="action", required=True)
    action_parser(actions, "diagonal", "Serre diagonal and its checks").add_argument("input")
    sub = action_parser(actions, "boundary", "Cubical boundary")
    sub.add_argument("input")
    sub.add_argument("--dim", type=int, help="Only cubes of this dimension")

    sng = commands.add_parser("sng", help="Loop homology coproduct of spherical space forms")
    actions = sng.add_subparsers(dest="action", required=True)
    for name, help_text in (("betti", "Loop classes and Betti table"), ("coproduct", "Coproduct table"),
                            ("check", "Coproduct properties and the Morse cross-check")):
        sub = action_parser(actions, name, help_text)
        sub.add_argument("--group", default="C2", help="Group name (C<m>, Q8, Q<4m>) or group fixture")
        sub.add_argument("--n", type=int, default=3, help="Odd sphere dimension")
        if name != "check":
            sub.add_argument("--relative", action="store_true", help="Relative to constant loops")
        if name == "coproduct":
            sub.add_argument("--class", dest="cls", help="Single class, written x,[g],k")
        if name == "check":
            sub.add_argument("--all", action="store_true", help="All standard groups and dimensions")

    complex_parser = commands.add_parser("complex", help="Chain complexes")
    actions = complex_parser.add_subparsers(dest="action", required=True)
    action_parser(actions, "homology", "Homology with representatives").add_argument("input")
    action_parser(actions, "retract", "Retract onto homology").add_argument("input")
    return parser


def create_config(args) -> ToolkitConfig:
    """Create configuration from command line arguments"""
    if args.profile == "quick":
        config = ProfiledConfig.quick()
    elif args.profile == "acceptance":
        config = ProfiledConfig.acceptance()
    else:
        config = ToolkitConfig()

    if args.format:
        config.output_format = args.format
    if args.seed is not None:
        config.seed = args.seed
    if args.workers:
        config.max_workers = args.workers
    if args.max_arity:
        config.max_arity = args.max_arity
    if args.max_k is not None:
        config.max_k = args.max_k
    arity = getattr(args, "arity", None)
    if arity:
        config.transfer_arity = arity
    instances = getattr(args, "instances", None)
    if instances is not None:
        for name in ("iso_instances", "transfer_instances", "quasi_instances", "path_instances"):
            setattr(config, name, instances)

    config.record_timings = args.timings
    config.save_results = args.save

    if args.quiet:
        config.log_level = logging.ERROR
    elif args.verbose:
        config.log_level = logging.DEBUG
    else:
        config.log_level = logging.WARNING

    return config


def _error_report(command: str, error: Exception) -> dict:
    return {"schema": SCHEMA_VERSION, "command": command, "status": "error",
            "error": {"type": type(error).__name__, "message": str(error)}}


def execute(args, config: ToolkitConfig) -> Tuple[int, dict, Optional[VerificationPipeline]]:
    command = f"{args.command} {args.action}"
    start = time.perf_counter()
    pipeline = None
    try:
        pipeline = VerificationPipeline(config)
        ctx = CommandContext(config, pipeline, FixtureReader(Path.cwd(), config.max_arity), args.oracle)
        checks, tables = COMMANDS[(args.command, args.action)](ctx, args)
    except INPUT_ERRORS as e:
        return 2, _error_report(command, e), pipeline
    except ToolkitError as e:
        checks, tables = [failed(type(e).__name__, str(e), e.witness)], {}

    status = PASS if all(is_pass(c) for c in checks) else FAIL
    report = {"schema": SCHEMA_VERSION, "command": command, "seed": config.seed, "status": status,
              "checks": checks, "tables": tables}
    if config.record_timings:
        timings = dict(pipeline.timings)
        timings["total"] = time.perf_counter() - start
        report["timings"] = timings
    return (0 if status == PASS else 1), report, pipeline


def dispatch(argv: Optional[Sequence[str]] = None) -> Tuple[int, dict]:
    """
    Parse arguments and run one command

    Args:
        argv: command line without the program name

    Returns:
        Exit code (0 pass, 1 verification failure, 2 malformed input) and the report
    """
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0), {}
    try:
        config = create_config(args)
    except ConfigurationError as e:
        return 2, _error_report(f"{args.command} {args.action}", e)
    code, report, _ = execute(args, config)
    return code, report


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point for CLI usage"""
    args = build_parser().parse_args(argv)
    config = create_config(args)
    code, report, pipeline = execute(args, config)

    if report.get("status") == "error":
        print(f"error: {report['error']['message']}", file=sys.stderr)
        return code

    formatter = pipeline.formatter if pipeline else OutputFormatter(config)
    data = formatter.emit_report(report, config.output_format)
    if args.output:
        output = Path(args.output)
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_bytes(data)
    else:
        sys.stdout.write(data.decode("utf-8"))

    if config.save_results and pipeline:
        pipeline.save_results(report)
    return code


if __name__ == "__main__":
    sys.exit(main())
