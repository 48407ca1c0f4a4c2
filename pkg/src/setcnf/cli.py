"""Command-line entry point.

Subcommands:
  encode   compile a constraint-model file to DIMACS (+ varmap, fixed)
  sgp      generate a social-golfer instance in a chosen encoding
  solve    run the internal solver or an external DIMACS solver
  verify   decode a model file back into a schedule and check it
  table    instance-size report against the published baselines

Exit codes: 0 success / SAT, 20 UNSAT, 1 usage or I/O error,
2 verification failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

from . import dsl, sgp
from .cnf import CnfFormula, read_varmap
from .encoder import EncodeOptions, encode_model
from .model import ModelError
from .simplify import extend_model, read_fixed, unit_propagate, write_fixed
from .solver import (
    SAT,
    TIMEOUT,
    UNSAT,
    Budget,
    SolverError,
    parse_solver_output,
    solve_external,
    solve_internal,
)

SOLVER_ENV = "SETCNF_SOLVER"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2
EXIT_UNSAT = 20


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _write_instance(formula: CnfFormula, base: Path, up: bool) -> tuple[int, int, bool]:
    """Emit .cnf/.varmap (and .fixed under --up); returns final sizes
    and whether propagation proved the instance unsatisfiable."""
    formula.write_varmap(base.with_suffix(".varmap"))
    unsat = False
    if up:
        simp = unit_propagate(formula)
        write_fixed(simp, base.with_suffix(".fixed"))
        unsat = simp.proved_unsat
        formula = simp.formula
    with open(base.with_suffix(".cnf"), "wb") as f:
        formula.emit_dimacs(f)
    return formula.num_vars, formula.num_clauses, unsat


def cmd_encode(args) -> int:
    try:
        text = Path(args.model).read_text()
    except OSError as exc:
        return _fail(str(exc))
    try:
        model = dsl.parse_model(text)
        formula = encode_model(model, EncodeOptions(share_pairs=args.pairs))
    except (dsl.ParseError, dsl.SemanticError, ModelError) as exc:
        return _fail(str(exc))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    base = out_dir / Path(args.model).stem
    num_vars, num_clauses, unsat = _write_instance(formula, base, args.up)
    print(f"{base.with_suffix('.cnf')}\t{num_vars}\t{num_clauses}")
    if unsat:
        print("unsat-at-encode: unit propagation derived the empty clause")
        return EXIT_UNSAT
    return EXIT_OK


_SB_FLAGS = {"none": "none", "tme": "tme", "constraints": "sbc", "model": "sbm"}
_SOCIAL_FLAGS = {"imp": "implication", "card": "cardinality"}


def cmd_sgp(args) -> int:
    try:
        config = sgp.SgpConfig(args.g, args.p, args.w)
        variant = sgp.SgpVariant(
            encoding=args.encoding,
            symmetry=_SB_FLAGS[args.sb],
            socialization=_SOCIAL_FLAGS[args.social],
            unit_propagate=args.up,
        )
    except ValueError as exc:
        return _fail(str(exc))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    base = out_dir / f"sgp_{variant.key}_{config.name}"
    if args.encoding == "de":
        formula = sgp.build_de(config)
    elif args.encoding == "tme":
        formula = sgp.build_tme(config, sb=variant.symmetry == "tme")
    else:
        model = sgp.build_sgp_model(config, variant, slot_pairs=args.slots)
        text = dsl.format_model(model)
        base.with_suffix(".dsl").write_text(text)
        reparsed = dsl.parse_model(text)
        if reparsed != model:
            return _fail("model text round-trip mismatch")
        formula = encode_model(reparsed, EncodeOptions(share_pairs=args.pairs))
    num_vars, num_clauses, unsat = _write_instance(formula, base, args.up)
    print(f"{variant.key}\t{config.name}\t{num_vars}\t{num_clauses}")
    if unsat:
        return EXIT_UNSAT
    return EXIT_OK


def _resolve_solver(spec: str | None) -> str:
    if spec is None:
        return os.environ.get(SOLVER_ENV, "internal")
    return spec


def cmd_solve(args) -> int:
    solver = _resolve_solver(args.solver)
    budget = Budget(max_seconds=args.timeout)
    try:
        if solver == "internal":
            from .cnf import parse_dimacs

            num_vars, clauses = parse_dimacs(Path(args.dimacs).read_text())
            result = solve_internal((num_vars, clauses), budget)
        elif solver.startswith("cmd:"):
            result = solve_external(args.dimacs, solver[4:], budget)
        else:
            return _fail(f"unknown solver {solver!r} (use internal or cmd:<command>)")
    except (OSError, SolverError) as exc:
        return _fail(str(exc))
    out = Path(args.out) if args.out else Path(args.dimacs).with_suffix(".model")
    if result.status == SAT:
        lits = " ".join(
            str(v if result.model[v] else -v) for v in sorted(result.model)
        )
        out.write_text(f"SAT\n{lits} 0\n")
        print(f"SAT\t{result.stats.seconds:.2f}s\t{out}")
        return EXIT_OK
    if result.status == UNSAT:
        out.write_text("UNSAT\n")
        print(f"UNSAT\t{result.stats.seconds:.2f}s")
        return EXIT_UNSAT
    print(f"TIMEOUT after {args.timeout}s", file=sys.stderr)
    return EXIT_USAGE


_VARIANT_KEYS = {
    "de": sgp.SgpVariant("de"),
    "tme": sgp.SgpVariant("tme"),
    "tme_sb": sgp.SgpVariant("tme", "tme"),
    "sce": sgp.SgpVariant("sce"),
    "sce_sbc": sgp.SgpVariant("sce", "sbc"),
    "sce_sbm": sgp.SgpVariant("sce", "sbm"),
}


def cmd_verify(args) -> int:
    try:
        config = sgp.SgpConfig(args.g, args.p, args.w)
        variant = _VARIANT_KEYS[args.variant]
        status, lits = parse_solver_output(Path(args.model).read_text())
        origins = read_varmap(args.varmap)
    except (OSError, KeyError, SolverError) as exc:
        return _fail(str(exc))
    if status != SAT:
        return _fail("model file reports UNSAT; nothing to verify")
    if args.fixed:
        simp = read_fixed(args.fixed)
        residual = {abs(l): l > 0 for l in lits}
        try:
            model = extend_model(simp, residual)
        except ValueError as exc:
            return _fail(str(exc))
    else:
        model = {v: False for v in origins}
        for lit in lits:
            if abs(lit) in model:
                model[abs(lit)] = lit > 0
    try:
        schedule = sgp.decode_schedule(config, variant, model, origins)
    except sgp.DecodeError as exc:
        print(f"INVALID: {exc}")
        return EXIT_VERIFY
    violations = sgp.verify_schedule(config, schedule)
    if violations:
        print(f"INVALID: {violations[0]}")
        for v in violations[1:]:
            print(f"  also: {v}")
        return EXIT_VERIFY
    print("VALID")
    print(sgp.format_schedule(schedule))
    return EXIT_OK


def _table_rows(configs, variants, pairs: str):
    for config in configs:
        key = (config.g, config.p, config.w)
        for kind in variants:
            if kind in ("de", "tme", "tme_sb"):
                vars_, clauses = sgp.closed_form_counts(kind, config)
            else:
                variant = {
                    "sce": sgp.SgpVariant("sce"),
                    "sce_sbc": sgp.SgpVariant("sce", "sbc"),
                    "sce_sbm": sgp.SgpVariant("sce", "sbm"),
                    "sce_up": sgp.SgpVariant("sce", unit_propagate=True),
                }[kind]
                model = sgp.build_sgp_model(config, variant)
                formula = encode_model(model, EncodeOptions(share_pairs=pairs))
                if variant.unit_propagate:
                    formula = unit_propagate(formula).formula
                vars_, clauses = formula.num_vars, formula.num_clauses
            ref = sgp.PUBLISHED_SIZES.get(kind, {}).get(key)
            if ref:
                yield (config.name, kind, vars_, clauses, ref[0], ref[1],
                       vars_ - ref[0], clauses - ref[1])
            else:
                yield (config.name, kind, vars_, clauses, "", "", "", "")


def cmd_table(args) -> int:
    try:
        configs = (
            [sgp.SgpConfig.parse(c) for c in args.configs.split(",")]
            if args.configs
            else list(sgp.BENCHMARK_CONFIGS)
        )
    except ValueError as exc:
        return _fail(str(exc))
    variants = args.variants.split(",") if args.variants else ["de", "tme", "tme_sb"]
    known = {"de", "tme", "tme_sb", "sce", "sce_up", "sce_sbc", "sce_sbm"}
    for v in variants:
        if v not in known:
            return _fail(f"unknown variant {v!r}")
    header = ("prob", "variant", "vars", "clauses", "ref_vars", "ref_clauses",
              "d_vars", "d_clauses")
    rows = list(_table_rows(configs, variants, args.pairs))
    if args.md:
        print("| " + " | ".join(header) + " |")
        print("|" + "---|" * len(header))
        for row in rows:
            print("| " + " | ".join(str(x) for x in row) + " |")
    else:
        print("\t".join(header))
        for row in rows:
            print("\t".join(str(x) for x in row))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="setcnf",
        description="Compile set-constraint models to CNF and work the "
        "social-golfer encodings end to end.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_enc = sub.add_parser("encode", help="compile a model file to DIMACS")
    p_enc.add_argument("model", help="constraint-model source file")
    p_enc.add_argument("--up", action="store_true", help="unit-propagate after encoding")
    p_enc.add_argument("--out", default=".", help="output directory")
    p_enc.add_argument("--pairs", choices=("strict", "all"), default="strict")
    p_enc.set_defaults(func=cmd_encode)

    p_sgp = sub.add_parser("sgp", help="generate a social-golfer instance")
    p_sgp.add_argument("g", type=int)
    p_sgp.add_argument("p", type=int)
    p_sgp.add_argument("w", type=int)
    p_sgp.add_argument("--encoding", choices=("de", "tme", "sce"), default="sce")
    p_sgp.add_argument("--sb", choices=tuple(_SB_FLAGS), default="none")
    p_sgp.add_argument("--social", choices=("imp", "card"), default="imp")
    p_sgp.add_argument("--up", action="store_true")
    p_sgp.add_argument("--out", default=".")
    p_sgp.add_argument("--pairs", choices=("strict", "all"), default="strict")
    p_sgp.add_argument(
        "--slots", choices=("all", "asymmetric"), default="all",
        help="socialization slot-pair coverage (asymmetric reproduces the "
        "reduced quantification, an under-constrained relaxation)",
    )
    p_sgp.set_defaults(func=cmd_sgp)

    p_solve = sub.add_parser("solve", help="solve a DIMACS instance")
    p_solve.add_argument("dimacs")
    p_solve.add_argument(
        "--solver",
        default=None,
        help=f"internal or cmd:<command>; default ${SOLVER_ENV} or internal",
    )
    p_solve.add_argument("--timeout", type=float, default=300.0)
    p_solve.add_argument("--out", default=None, help="model file (default <dimacs>.model)")
    p_solve.set_defaults(func=cmd_solve)

    p_ver = sub.add_parser("verify", help="decode + check a schedule")
    p_ver.add_argument("g", type=int)
    p_ver.add_argument("p", type=int)
    p_ver.add_argument("w", type=int)
    p_ver.add_argument("--variant", required=True, choices=tuple(_VARIANT_KEYS))
    p_ver.add_argument("--model", required=True, help="solver model file")
    p_ver.add_argument("--varmap", required=True)
    p_ver.add_argument("--fixed", default=None, help="propagation sidecar for --up runs")
    p_ver.set_defaults(func=cmd_verify)

    p_tab = sub.add_parser("table", help="instance-size report")
    p_tab.add_argument("--configs", default=None, help="comma-separated g-p-w triples")
    p_tab.add_argument(
        "--variants", default=None, help="comma-separated subset of "
        "de,tme,tme_sb,sce,sce_up,sce_sbc,sce_sbm",
    )
    p_tab.add_argument("--pairs", choices=("strict", "all"), default="strict")
    p_tab.add_argument("--md", action="store_true", help="markdown instead of TSV")
    p_tab.set_defaults(func=cmd_table)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
