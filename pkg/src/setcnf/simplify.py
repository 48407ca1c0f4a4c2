"""Unit-propagation post-treatment.

Fixing the literals forced by unit clauses (to fixpoint) removes every
satisfied clause and every falsified literal, then compacts the
surviving variables to a dense 1..V' range.  The result is
equisatisfiable with the input, and the recorded fixed/renaming maps
let a model of the residual be extended back to a model of the
original.  Pure-literal reasoning and subsumption are deliberately out
of scope; this is unit propagation only.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .cnf import CnfFormula

SIMPLIFIED = "simplified"
PROVED_UNSAT = "unsat"


@dataclass
class Simplification:
    formula: CnfFormula
    fixed: dict[int, bool]
    renaming: dict[int, int]
    status: str
    original_num_vars: int = 0

    @property
    def proved_unsat(self) -> bool:
        return self.status == PROVED_UNSAT


def _residual(origins, lits: np.ndarray, ends: np.ndarray) -> CnfFormula:
    formula = CnfFormula()
    formula._origins = list(origins)
    formula._lits.frombytes(np.ascontiguousarray(lits, dtype=np.int32).tobytes())
    formula._ends.frombytes(np.ascontiguousarray(ends, dtype=np.int64).tobytes())
    formula._spans = [("residual", 0)]
    return formula


def unit_propagate(formula: CnfFormula) -> Simplification:
    """Propagate unit clauses to fixpoint and rebuild the formula.

    Queue order is FIFO over unit clauses in emission order; the final
    fixpoint does not depend on it.  UNSAT (an empty clause, present or
    derived) is a status, never an exception.
    """
    num_vars = formula.num_vars
    lits = formula.lits_array()
    ends = formula.ends_array()
    n_clauses = len(ends)
    widths = np.diff(ends, prepend=0)
    starts = ends - widths
    clause_of = np.repeat(np.arange(n_clauses, dtype=np.int64), widths)

    assign = np.zeros(num_vars + 1, dtype=np.int8)
    n_free = widths.astype(np.int64).copy()
    satisfied = np.zeros(n_clauses, dtype=bool)

    occ: dict[int, np.ndarray] = {}
    if len(lits):
        order = np.argsort(lits, kind="stable")
        sorted_lits = lits[order]
        sorted_clauses = clause_of[order]
        uniq, first = np.unique(sorted_lits, return_index=True)
        bounds = np.append(first, len(sorted_lits))
        for i, lit in enumerate(uniq):
            occ[int(lit)] = sorted_clauses[bounds[i] : bounds[i + 1]]

    def unsat(partial_fixed: dict[int, bool]) -> Simplification:
        residual = _residual([], np.array([], np.int32), np.array([0], np.int64))
        return Simplification(residual, partial_fixed, {}, PROVED_UNSAT, num_vars)

    fixed: dict[int, bool] = {}
    if (widths == 0).any():
        return unsat(fixed)

    queue = deque(int(lits[starts[c]]) for c in np.flatnonzero(widths == 1))
    lits_list = lits.tolist()
    while queue:
        lit = queue.popleft()
        var = abs(lit)
        current = assign[var]
        want = 1 if lit > 0 else -1
        if current == want:
            continue
        if current == -want:
            return unsat(fixed)
        assign[var] = want
        fixed[var] = lit > 0
        for c in occ.get(lit, ()):
            satisfied[c] = True
        for c in occ.get(-lit, ()):
            if satisfied[c]:
                continue
            n_free[c] -= 1
            if n_free[c] == 0:
                return unsat(fixed)
            if n_free[c] == 1:
                for pos in range(starts[c], ends[c]):
                    l = lits_list[pos]
                    if assign[abs(l)] == 0:
                        queue.append(l)
                        break

    keep_clause = ~satisfied
    if len(lits):
        lit_alive = (assign[np.abs(lits)] == 0) & keep_clause[clause_of]
        kept_lits = lits[lit_alive]
        kept_widths = np.bincount(clause_of[lit_alive], minlength=n_clauses)[keep_clause]
    else:
        kept_lits = lits
        kept_widths = widths[keep_clause]

    old_vars = np.unique(np.abs(kept_lits))
    mapping = np.zeros(num_vars + 1, dtype=np.int64)
    mapping[old_vars] = np.arange(1, len(old_vars) + 1)
    renaming = {int(v): int(mapping[v]) for v in old_vars}
    new_lits = (np.sign(kept_lits) * mapping[np.abs(kept_lits)]).astype(np.int32)
    new_ends = np.cumsum(kept_widths, dtype=np.int64)
    origins = [formula.origin(int(v)) for v in old_vars]
    residual = _residual(origins, new_lits, new_ends)
    return Simplification(residual, fixed, renaming, SIMPLIFIED, num_vars)


def extend_model(simp: Simplification, residual_model: dict[int, bool]) -> dict[int, bool]:
    """Lift a model of the residual formula to the original variables.

    Variables eliminated because all their clauses were satisfied are
    unconstrained; they default to false.
    """
    full: dict[int, bool] = {}
    for var in range(1, simp.original_num_vars + 1):
        if var in simp.fixed:
            full[var] = simp.fixed[var]
        elif var in simp.renaming:
            new = simp.renaming[var]
            if new not in residual_model:
                raise ValueError(f"residual model misses variable {new}")
            full[var] = residual_model[new]
        else:
            full[var] = False
    return full


def write_fixed(simp: Simplification, path) -> None:
    """Sidecar recording fixed assignments and the compaction renaming."""
    with open(path, "w") as f:
        f.write(f"vars {simp.original_num_vars}\n")
        f.write(f"status {simp.status}\n")
        for var in sorted(simp.fixed):
            f.write(f"fix {var} {1 if simp.fixed[var] else 0}\n")
        for old in sorted(simp.renaming):
            f.write(f"map {old} {simp.renaming[old]}\n")


def read_fixed(path) -> Simplification:
    fixed: dict[int, bool] = {}
    renaming: dict[int, int] = {}
    num_vars = 0
    status = SIMPLIFIED
    with open(path) as f:
        for line in f:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "vars":
                num_vars = int(parts[1])
            elif parts[0] == "status":
                status = parts[1]
            elif parts[0] == "fix":
                fixed[int(parts[1])] = parts[2] == "1"
            elif parts[0] == "map":
                renaming[int(parts[1])] = int(parts[2])
    return Simplification(CnfFormula(), fixed, renaming, status, num_vars)
