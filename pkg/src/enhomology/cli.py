"""
Command-line front end: enh <command> [options]

Commands:
- compute        homology and/or cohomology tables of B^[n](A, M), plus a run manifest
- verify         worked example, d^2 audit, cell-structure and retract checks;
                 --all bundles them with the Hochschild comparison of --algebra
- trees          list n-level trees with a given number of leaves
- oracle         Hochschild homology of A_+ with coefficients in M; --compare
                 checks the degree shift of the reduced complex (no length-0
                 chains) against B^[1](A, M), and the dense oracle
- operad-verify  retract, cell and twisting-cochain lift checks
- stability      one Betti number for n = 1 .. n_max

Inputs:
- --algebra / --module take a JSON path or builtin:<name>[:<param>...], e.g.
  builtin:truncated_polynomial:3, builtin:trivial_algebra:2:0,1,
  builtin:unital_extension, builtin:trivial_coefficients

Exit codes:
- 0 success, 1 failed check, 2 internal invariant, 3 input or schema, 4 resource bound
Nothing is written to --out unless the whole command succeeds.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from itertools import product
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .algdata import (
    AlgebraPresentation,
    BimodulePresentation,
    builtin,
    dump_algebra,
    dump_bimodule,
    load_and_validate_algebra,
    load_and_validate_bimodule,
)
from .coeff import RATIONALS, CoefficientRing, parse_ring
from .config import DEFAULT_OPERAD_BOUNDS, DEFAULT_RING, RETRACT_MAX_DEGREE, SCHEMA_VERSION, default_jobs
from .errors import EnhError, InputError, SchemaError
from .homcalc import HomologyTable, d_squared_check, homology_table, stability_scan
from .manifest import InputDigest, ManifestClock, RunManifest, builtin_digest, file_digest
from .operadlab import (
    CheckResult,
    LiftBounds,
    VerificationReport,
    en_colimit_check,
    operad_verify,
    retract_check,
    theta_restriction_check,
)
from .oracles import dense_homology_oracle, hochschild_complex
from .treecomb import enumerate_trees
from .twist import (
    COHOMOLOGY,
    GOLDEN_COEFFICIENT_DEGREES,
    GOLDEN_DEGREE_VARIANTS,
    HOMOLOGY,
    assemble_cohomology_complex,
    assemble_homology_complex,
    golden_theta_example,
)

logger = logging.getLogger(__name__)

BUILTIN_PREFIX = "builtin:"
MODULE_BUILTINS = {'unital_extension', 'trivial_coefficients'}
DEFAULT_MODULE = "builtin:trivial_coefficients"


# ---------------------------------------------------------------------------
# Input loading
# ---------------------------------------------------------------------------

def _parse_param(text: str) -> Any:
    try:
        if ',' in text:
            return [int(x) for x in text.split(',') if x.strip()]
        return int(text)
    except ValueError:
        raise SchemaError(f"builtin parameters must be integers or comma lists, got {text!r}") from None


def _split_selector(selector: str) -> Tuple[str, List[Any]]:
    name, *params = selector[len(BUILTIN_PREFIX):].split(':')
    return name, [_parse_param(p) for p in params]


def _read_json(path: Path) -> Any:
    if not path.is_file():
        raise InputError(f"input file not found: {path}")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path} is not valid JSON: {e}") from None
    except OSError as e:
        raise InputError(f"could not read {path}: {e}") from None


def load_algebra(selector: str, ring: CoefficientRing = RATIONALS) -> Tuple[AlgebraPresentation, InputDigest]:
    if selector.startswith(BUILTIN_PREFIX):
        name, params = _split_selector(selector)
        if name in MODULE_BUILTINS:
            raise SchemaError(f"{name} is a module builtin, not an algebra")
        A = builtin(name, *params)
        return A, builtin_digest(selector, dump_algebra(A))
    path = Path(selector)
    A = load_and_validate_algebra(_read_json(path), name=path.stem, ring=ring)
    return A, file_digest(path)


def load_module(selector: str, A: AlgebraPresentation,
                ring: CoefficientRing = RATIONALS) -> Tuple[BimodulePresentation, InputDigest]:
    if selector.startswith(BUILTIN_PREFIX):
        name, params = _split_selector(selector)
        if name not in MODULE_BUILTINS:
            raise SchemaError(f"{name} is an algebra builtin, not a module")
        M = builtin(name, A, *params)
        return M, builtin_digest(selector, dump_bimodule(M))
    path = Path(selector)
    M = load_and_validate_bimodule(_read_json(path), A, name=path.stem, ring=ring)
    return M, file_digest(path)


def _load_inputs(args, ring: CoefficientRing
                 ) -> Tuple[AlgebraPresentation, BimodulePresentation, Dict[str, InputDigest]]:
    A, a_digest = load_algebra(args.algebra, ring)
    M, m_digest = load_module(args.module, A, ring)
    return A, M, {'algebra': a_digest, 'module': m_digest}


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _write_outputs(files: Dict[Path, str]) -> None:
    """Write every prepared file; called only once all content exists."""
    for path, text in files.items():
        path.parent.mkdir(parents=True, exist_ok=True)
        try:
            path.write_text(text, encoding='utf-8')
        except OSError as e:
            raise InputError(f"could not write {path}: {e}") from None
        print(f"Wrote {path}")


def _emit_json(document: Any, out: Optional[str]) -> None:
    text = json.dumps(document, indent=2, sort_keys=True) + '\n'
    if out:
        _write_outputs({Path(out): text})
    else:
        sys.stdout.write(text)


def _report_dict(report: VerificationReport, extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    document = {'schema_version': SCHEMA_VERSION}
    document.update(report.to_dict())
    if extra:
        document.update(extra)
    return document


def _print_report(report: VerificationReport) -> None:
    for name, check in sorted(report.checks.items()):
        status = "ok" if check.passed else "FAILED"
        print(f"[{status}] {name} ({check.checked} checked)", file=sys.stderr)
        for text in check.counterexamples:
            print(f"    {text}", file=sys.stderr)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def run_compute(args) -> int:
    ring = parse_ring(args.ring)
    A, M, digests = _load_inputs(args, ring)
    modes = [HOMOLOGY, COHOMOLOGY] if args.mode == 'both' else [args.mode]
    manifest = RunManifest(
        command='compute',
        parameters={'n': args.n, 'ring': ring.label, 'max_degree': args.max_degree,
                    'mode': args.mode, 'jobs': args.jobs},
        inputs=digests,
    )
    tables: Dict[str, HomologyTable] = {}
    with ManifestClock(manifest):
        for mode in modes:
            assemble = assemble_homology_complex if mode == HOMOLOGY else assemble_cohomology_complex
            c = assemble(A, M, args.n, args.max_degree, ring, jobs=args.jobs)
            manifest.record_sizes(mode, c.matrix_sizes())
            tables[mode] = homology_table(c, args.jobs)
    for mode, table in tables.items():
        for row in table.rows:
            if row.edge:
                print(f"Warning: {mode} degree {row.degree} is an edge; its value is an upper bound",
                      file=sys.stderr)

    if args.out:
        out = Path(args.out)
        files = {}
        for mode, table in tables.items():
            text = table.to_json() + '\n' if args.format == 'json' else table.to_tsv()
            files[out / f"{mode}.{args.format}"] = text
        files[out / "manifest.json"] = manifest.to_json() + '\n'
        _write_outputs(files)
    elif args.format == 'json':
        document = {mode: table.to_dict() for mode, table in tables.items()}
        document['manifest'] = manifest.to_dict()
        sys.stdout.write(json.dumps(document, indent=2, sort_keys=True) + '\n')
    else:
        for mode, table in tables.items():
            sys.stdout.write(f"# {mode}\n{table.to_tsv()}")
    return 0


def _golden_checks() -> CheckResult:
    result = CheckResult('worked theta example')
    for degrees, u in product(GOLDEN_DEGREE_VARIANTS, GOLDEN_COEFFICIENT_DEGREES):
        golden = golden_theta_example(degrees, u)
        result.checked += 1
        if not golden.matches:
            result.fail(f"{golden.label}: computed {golden.describe(golden.computed)}, "
                        f"expected {golden.describe(golden.expected)}")
    return result


def run_verify(args) -> int:
    if args.all:
        args.golden_example = args.cells = args.retract = True
    if not (args.golden_example or args.algebra or args.cells or args.retract):
        raise SchemaError("verify needs --golden-example, --cells, --retract, --all or --algebra")
    report = VerificationReport(parameters={})
    square_zero = None
    if args.golden_example:
        report.add(_golden_checks())
    if args.cells:
        report.add(en_colimit_check(3, RETRACT_MAX_DEGREE, 3))
        for check in theta_restriction_check(3, 4).checks.values():
            report.add(check)
    if args.retract:
        for check in retract_check(3, RETRACT_MAX_DEGREE, args.jobs).checks.values():
            report.add(check)
    if args.algebra:
        if args.n is None or args.max_degree is None:
            raise SchemaError("the d^2 audit needs --n and --max-degree")
        ring = parse_ring(args.ring)
        A, M, _ = _load_inputs(args, ring)
        c = assemble_homology_complex(A, M, args.n, args.max_degree, ring, jobs=args.jobs, check=False)
        square_zero = d_squared_check(c)
        check = report.add(CheckResult('d^2 = 0', checked=square_zero.checked))
        if not square_zero.clean:
            check.fail(f"degree {square_zero.degree}: entry ({square_zero.row_element}, "
                       f"{square_zero.column_element}) = {square_zero.value}")
        report.parameters.update({'algebra': A.name, 'module': M.name, 'n': args.n,
                                  'max_degree': args.max_degree, 'ring': ring.label})
        if args.all:
            for check in _shift_comparison(A, M, ring, args.max_degree, args.jobs):
                report.add(check)
    _print_report(report)
    extra = {'d_squared': square_zero.to_dict()} if square_zero is not None else None
    _emit_json(_report_dict(report, extra), args.out)
    if square_zero is not None and not square_zero.clean:
        return 2
    return 0 if report.passed else 1


def run_trees(args) -> int:
    trees = enumerate_trees(args.n, args.leaves)
    if args.format == 'json':
        document = {
            'schema_version': SCHEMA_VERSION,
            'n': args.n,
            'leaves': args.leaves,
            'count': len(trees),
            'trees': [
                {'tree': t.to_text(), **({'edges': list(t.leaf_edge_indices())} if args.edges else {})}
                for t in trees
            ],
        }
        _emit_json(document, args.out)
        return 0
    lines = []
    for t in trees:
        line = t.to_text()
        if args.edges:
            line += '\t' + ','.join(str(s) for s in t.leaf_edge_indices())
        lines.append(line)
    text = '\n'.join(lines) + '\n' if lines else ''
    if args.out:
        _write_outputs({Path(args.out): text})
    else:
        sys.stdout.write(text)
    return 0


def _shift_comparison(A, M, ring: CoefficientRing, max_degree: int, jobs: int) -> Tuple[CheckResult, CheckResult]:
    """B^[1] in degree d against reduced Hochschild in degree d + 1, and sparse against dense ranks."""
    shift = CheckResult('betti_d(B^[1]) = betti_(d+1)(reduced Hochschild)')
    dense = CheckResult('sparse ranks = dense oracle')
    c = assemble_homology_complex(A, M, 1, max_degree, ring, jobs=jobs)
    sparse = homology_table(c, jobs)
    hh = homology_table(hochschild_complex(A, M, max_degree + 2, ring, reduced=True))
    for row in sparse.rows:
        if row.edge:
            continue
        shift.checked += 1
        other = hh.betti(row.degree + 1)
        if row.betti != other:
            shift.fail(f"degree {row.degree}: {row.betti} != {other}")
    dims = {d: c.dimension(d) for d in c.degrees}
    oracle = dense_homology_oracle(dict(c.differentials), ring, dims)
    for row in sparse.rows:
        dense.checked += 1
        other = oracle.row(row.degree)
        mine = (row.cycles, row.boundaries, sorted(row.torsion))
        if mine != (other.cycles, other.boundaries, sorted(other.torsion)):
            dense.fail(f"degree {row.degree}: sparse {row.cycles}/{row.boundaries}/{list(row.torsion)}, "
                       f"dense {other.cycles}/{other.boundaries}/{list(other.torsion)}")
    return shift, dense


def run_oracle(args) -> int:
    ring = parse_ring(args.ring)
    A, M, _ = _load_inputs(args, ring)
    table = homology_table(hochschild_complex(A, M, args.max_degree, ring, reduced=args.reduced))
    document: Dict[str, Any] = {'schema_version': SCHEMA_VERSION, 'hochschild': table.to_dict()}
    status = 0
    if args.compare:
        report = VerificationReport(parameters={'algebra': A.name, 'module': M.name, 'ring': ring.label,
                                                'max_degree': args.max_degree})
        for check in _shift_comparison(A, M, ring, args.max_degree, args.jobs):
            report.add(check)
        _print_report(report)
        document['comparison'] = report.to_dict()
        status = 0 if report.passed else 1
    if args.format == 'tsv' and not args.compare:
        text = table.to_tsv()
        if args.out:
            _write_outputs({Path(args.out): text})
        else:
            sys.stdout.write(text)
    else:
        _emit_json(document, args.out)
    return status


def _int_list(text: str) -> List[int]:
    try:
        values = [int(x) for x in text.split(',') if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("level counts must be positive")
    return values


def run_operad_verify(args) -> int:
    bounds = LiftBounds(args.lift_arity, args.lift_degree, args.lift_leaves)
    report = operad_verify(args.arity, args.max_simplicial_degree, bounds, args.lift_n, args.jobs)
    _print_report(report)
    _emit_json(_report_dict(report), args.out)
    return 0 if report.passed else 1


def run_stability(args) -> int:
    ring = parse_ring(args.ring)
    A, M, _ = _load_inputs(args, ring)
    scan = stability_scan(A, M, args.degree, args.n_max, ring, args.jobs)
    for n, betti in scan.rows:
        print(f"n={n}\tbetti_{args.degree}={betti}", file=sys.stderr)
    _emit_json(scan.to_dict(), args.out)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the schema code."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"Error: {message}", file=sys.stderr)
        raise SystemExit(SchemaError.exit_code)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("-v", "--verbose", action="count", default=0, help="More logging (-vv for debug)")
    p.add_argument("--jobs", type=int, default=default_jobs(), help="Worker threads (default: CPU count)")
    p.add_argument("--out", help="Write results here instead of stdout")


def _add_inputs(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--algebra", required=required, help="Algebra JSON path or builtin:<name>[:<param>...]")
    p.add_argument("--module", default=DEFAULT_MODULE, help=f"Bimodule JSON path or builtin (default {DEFAULT_MODULE})")
    p.add_argument("--ring", default=DEFAULT_RING, help="q, z or f:P (default q)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="enh", description="E_n-homology via twisted iterated bar complexes")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="Homology/cohomology tables and a run manifest")
    _add_inputs(p)
    p.add_argument("--n", type=int, required=True, help="Number of tree levels")
    p.add_argument("--max-degree", type=int, required=True, help="Largest degree to assemble")
    p.add_argument("--mode", choices=[HOMOLOGY, COHOMOLOGY, "both"], default=HOMOLOGY)
    p.add_argument("--format", choices=["json", "tsv"], default="json")
    _add_common(p)
    p.set_defaults(func=run_compute)

    p = sub.add_parser("verify", help="Worked example, d^2 audit, cell and retract checks",
                       description="The twisting-cochain lift runs under operad-verify.")
    _add_inputs(p, required=False)
    p.add_argument("--n", type=int, help="Number of tree levels for the d^2 audit")
    p.add_argument("--max-degree", type=int, help="Largest degree for the d^2 audit")
    p.add_argument("--golden-example", action="store_true", help="Check the worked theta example")
    p.add_argument("--cells", action="store_true", help="Check the cell structure (n <= 3, leaves <= 4)")
    p.add_argument("--retract", action="store_true", help="Check the Barratt-Eccles retract in arity 3")
    p.add_argument("--all", action="store_true",
                   help="Run every check above; with --algebra also compare against Hochschild homology")
    _add_common(p)
    p.set_defaults(func=run_verify)

    p = sub.add_parser("trees", help="List n-level trees in canonical order")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--leaves", type=int, required=True)
    p.add_argument("--edges", action="store_true", help="Also print the depth-first edge index of every leaf")
    p.add_argument("--format", choices=["text", "json"], default="text")
    _add_common(p)
    p.set_defaults(func=run_trees)

    p = sub.add_parser("oracle", help="Normalized Hochschild homology of A_+ with coefficients in M")
    _add_inputs(p)
    p.add_argument("--max-degree", type=int, required=True)
    p.add_argument("--compare", action="store_true", help="Compare against B^[1](A, M) and the dense oracle")
    p.add_argument("--reduced", action="store_true", help="Drop the length-0 chains M from the table")
    p.add_argument("--format", choices=["json", "tsv"], default="json")
    _add_common(p)
    p.set_defaults(func=run_oracle)

    p = sub.add_parser("operad-verify", help="Retract, cell and lift checks")
    p.add_argument("--arity", type=int, default=DEFAULT_OPERAD_BOUNDS['arity'])
    p.add_argument("--max-simplicial-degree", type=int, default=2)
    p.add_argument("--lift-arity", type=int, default=DEFAULT_OPERAD_BOUNDS['arity'])
    p.add_argument("--lift-degree", type=int, default=DEFAULT_OPERAD_BOUNDS['degree'])
    p.add_argument("--lift-leaves", type=int, default=DEFAULT_OPERAD_BOUNDS['leaves'])
    p.add_argument("--lift-n", type=_int_list, default=[1, 2], help="Level counts for the lift (default 1,2)")
    _add_common(p)
    p.set_defaults(func=run_operad_verify)

    p = sub.add_parser("stability", help="Betti number in one degree as n grows")
    _add_inputs(p)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=run_stability)

    return parser


def _configure_logging(verbose: int) -> None:
    level = logging.WARNING if verbose <= 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(name)s:%(levelname)s:%(message)s")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    if args.jobs < 1:
        print("Error: --jobs must be at least 1", file=sys.stderr)
        return 3
    try:
        return args.func(args)
    except EnhError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
