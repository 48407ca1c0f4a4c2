"""Complete internal SAT solver plus an external-solver adapter.

The internal solver is a conflict-driven DPLL: two-watched-literal
propagation with a dedicated binary-clause fast path, first-UIP
learning with clause minimization and backjumping, Luby restarts, and
activity-based branching with phase saving (a static most-occurrences
order is available as an option).  It is meant for desk-scale
instances, not competition; anything heavy goes to an external DIMACS
solver through ``solve_external``.  Every satisfiable answer is
self-checked against the clause set before being returned.

``iter_models`` enumerates all total models by chronological
backtracking (no learning, no restarts), which the cross-encoding and
property tests rely on.
"""

from __future__ import annotations

import shlex
import subprocess
import time
from dataclasses import dataclass, field
from heapq import heapify, heappop, heappush

from .cnf import CnfFormula, parse_dimacs

SAT = "sat"
UNSAT = "unsat"
TIMEOUT = "timeout"


class SolverError(Exception):
    pass


@dataclass
class Budget:
    max_seconds: float | None = None
    max_conflicts: int | None = None


@dataclass
class SolveStats:
    decisions: int = 0
    propagations: int = 0
    conflicts: int = 0
    seconds: float = 0.0


@dataclass
class SolveResult:
    status: str
    model: dict[int, bool] | None = None
    stats: SolveStats = field(default_factory=SolveStats)


def _as_clause_list(formula) -> tuple[int, list[tuple[int, ...]]]:
    if isinstance(formula, CnfFormula):
        return formula.num_vars, list(formula.clauses())
    num_vars, clauses = formula
    return num_vars, [tuple(c) for c in clauses]


def _lit_idx(lit: int) -> int:
    return lit + lit if lit > 0 else 1 - lit - lit


class _Engine:
    """CDCL core.  Literal values live in an array indexed by literal
    (1 true, 0 false, -1 unassigned), binary clauses propagate through
    implication lists, and longer clauses through watched literals."""

    def __init__(self, num_vars: int, clauses: list[tuple[int, ...]], heuristic: str = "activity"):
        self.num_vars = num_vars
        self.heuristic = heuristic
        self.val = [-1] * (2 * num_vars + 2)
        self.clauses: list[list[int]] = []
        self.watch: list[list[int]] = [[] for _ in range(2 * num_vars + 2)]
        self.bin_watch: list[list[tuple[int, int]]] = [[] for _ in range(2 * num_vars + 2)]
        self.level = [0] * (num_vars + 1)
        self.reason = [-1] * (num_vars + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.stats = SolveStats()
        self.ok = True

        occurrences = [0] * (num_vars + 1)
        units: list[int] = []
        for clause in clauses:
            for lit in clause:
                occurrences[abs(lit)] += 1
            if len(clause) == 0:
                self.ok = False
            elif len(clause) == 1:
                units.append(clause[0])
            else:
                self._attach(list(clause))
        self.n_original = len(self.clauses)
        # Static fallback order: most clause occurrences first, ties by id.
        self.order = sorted(range(1, num_vars + 1), key=lambda v: (-occurrences[v], v))
        self.order_pos = [0]
        self.activity = [0.0] * (num_vars + 1)
        self.act_inc = 1.0
        self.phase = bytearray(num_vars + 1)  # saved polarity, 0 = false
        self.heap: list[tuple[float, int]] = [(0.0, v) for v in self.order]
        heapify(self.heap)
        if self.ok:
            for lit in units:
                if not self._enqueue(lit, -1):
                    self.ok = False
                    break

    # -- plumbing -----------------------------------------------------------

    def _attach(self, clause: list[int]) -> int:
        # watch lists are keyed by the literal that, once falsified,
        # forces a visit
        ci = len(self.clauses)
        self.clauses.append(clause)
        if len(clause) == 2:
            a, b = clause
            self.bin_watch[_lit_idx(a)].append((b, ci))
            self.bin_watch[_lit_idx(b)].append((a, ci))
        else:
            self.watch[_lit_idx(clause[0])].append(ci)
            self.watch[_lit_idx(clause[1])].append(ci)
        return ci

    def _enqueue(self, lit: int, reason: int) -> bool:
        idx = _lit_idx(lit)
        v = self.val[idx]
        if v >= 0:
            return v == 1
        self.val[idx] = 1
        self.val[idx ^ 1] = 0
        var = abs(lit)
        self.level[var] = len(self.trail_lim)
        self.reason[var] = reason
        self.trail.append(lit)
        return True

    def _propagate(self) -> int:
        """Exhaust pending implications; return conflicting clause index
        or -1.  Literal-index arithmetic is inlined: this loop is the
        solver's hot path."""
        val = self.val
        trail = self.trail
        clauses = self.clauses
        watch = self.watch
        level = len(self.trail_lim)
        levels = self.level
        reasons = self.reason
        while self.qhead < len(trail):
            lit = trail[self.qhead]
            self.qhead += 1
            self.stats.propagations += 1
            false_lit = -lit
            fidx = false_lit + false_lit if false_lit > 0 else 1 - false_lit - false_lit
            for other, ci in self.bin_watch[fidx]:
                v = val[other + other if other > 0 else 1 - other - other]
                if v == 0:
                    return ci
                if v < 0:
                    oidx = other + other if other > 0 else 1 - other - other
                    val[oidx] = 1
                    val[oidx ^ 1] = 0
                    var = other if other > 0 else -other
                    levels[var] = level
                    reasons[var] = ci
                    trail.append(other)
            ws = watch[fidx]
            i = j = 0
            n = len(ws)
            while i < n:
                ci = ws[i]
                i += 1
                clause = clauses[ci]
                if clause[0] == false_lit:
                    clause[0] = clause[1]
                    clause[1] = false_lit
                first = clause[0]
                fv = val[first + first if first > 0 else 1 - first - first]
                if fv == 1:
                    ws[j] = ci
                    j += 1
                    continue
                for k in range(2, len(clause)):
                    lk = clause[k]
                    if val[lk + lk if lk > 0 else 1 - lk - lk] != 0:
                        clause[1] = lk
                        clause[k] = false_lit
                        watch[lk + lk if lk > 0 else 1 - lk - lk].append(ci)
                        break
                else:
                    ws[j] = ci
                    j += 1
                    if fv == 0:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        return ci
                    fidx2 = first + first if first > 0 else 1 - first - first
                    val[fidx2] = 1
                    val[fidx2 ^ 1] = 0
                    var = first if first > 0 else -first
                    levels[var] = level
                    reasons[var] = ci
                    trail.append(first)
            del ws[j:]
        return -1

    def _bump(self, var: int) -> None:
        act = self.activity[var] + self.act_inc
        self.activity[var] = act
        if act > 1e100:
            self.activity = [a * 1e-100 for a in self.activity]
            self.act_inc *= 1e-100
            self.heap = [(-self.activity[v], v) for v in range(1, self.num_vars + 1)
                         if self.val[_lit_idx(v)] < 0]
            heapify(self.heap)
        else:
            heappush(self.heap, (-act, var))

    def _decide_var(self) -> int:
        if self.heuristic == "activity":
            heap = self.heap
            val = self.val
            while heap:
                act, v = heap[0]
                if val[_lit_idx(v)] < 0 and -act == self.activity[v]:
                    return v
                heappop(heap)
        pos = self.order_pos[-1]
        order = self.order
        val = self.val
        while pos < len(order) and val[_lit_idx(order[pos])] >= 0:
            pos += 1
        self.order_pos[-1] = pos
        return order[pos] if pos < len(order) else 0

    def _decision_lit(self, var: int) -> int:
        if self.heuristic == "activity":
            return var if self.phase[var] else -var
        return var  # static mode tries true first

    def _new_level(self, lit: int) -> None:
        self.trail_lim.append(len(self.trail))
        self.order_pos.append(self.order_pos[-1])
        self._enqueue(lit, -1)
        self.stats.decisions += 1

    def _cancel_to(self, target_level: int) -> None:
        if len(self.trail_lim) <= target_level:
            return
        bound = self.trail_lim[target_level]
        val = self.val
        save_phase = self.heuristic == "activity"
        for lit in self.trail[bound:]:
            idx = _lit_idx(lit)
            val[idx] = -1
            val[idx ^ 1] = -1
            var = abs(lit)
            if save_phase:
                self.phase[var] = 1 if lit > 0 else 0
                heappush(self.heap, (-self.activity[var], var))
        del self.trail[bound:]
        del self.trail_lim[target_level:]
        del self.order_pos[target_level + 1 :]
        self.qhead = len(self.trail)

    def _model(self) -> dict[int, bool]:
        return {
            v: self.val[_lit_idx(v)] == 1 for v in range(1, self.num_vars + 1)
        }

    # -- CDCL ----------------------------------------------------------------

    def _analyze(self, conflict: int) -> tuple[list[int], int]:
        """First-UIP learned clause (minimized) and its backjump level."""
        current = len(self.trail_lim)
        seen = bytearray(self.num_vars + 1)
        learned: list[int] = []
        counter = 0
        clause = self.clauses[conflict]
        idx = len(self.trail) - 1
        p = 0
        while True:
            for q in clause:
                if q == p:
                    continue
                var = abs(q)
                if seen[var] or self.level[var] == 0:
                    continue
                seen[var] = 1
                self._bump(var)
                if self.level[var] == current:
                    counter += 1
                else:
                    learned.append(q)
            trail = self.trail
            while not seen[abs(trail[idx])]:
                idx -= 1
            lit = trail[idx]
            var = abs(lit)
            idx -= 1
            counter -= 1
            if counter == 0:
                uip = -lit
                break
            clause = self.clauses[self.reason[var]]
            p = lit
        # drop literals implied by the rest of the clause
        minimized = [uip]
        for q in learned:
            r = self.reason[abs(q)]
            if r == -1:
                minimized.append(q)
                continue
            for l in self.clauses[r]:
                lv = abs(l)
                if lv != abs(q) and not seen[lv] and self.level[lv] > 0:
                    minimized.append(q)
                    break
        self.act_inc /= 0.95
        if len(minimized) == 1:
            return minimized, 0
        back = max(self.level[abs(q)] for q in minimized[1:])
        for k in range(1, len(minimized)):
            if self.level[abs(minimized[k])] == back:
                minimized[1], minimized[k] = minimized[k], minimized[1]
                break
        return minimized, back

    def _reduce_learned(self, keep: int) -> None:
        locked = {self.reason[abs(lit)] for lit in self.trail}
        candidates = [
            ci for ci in range(self.n_original, len(self.clauses)) if ci not in locked
        ]
        candidates.sort(key=lambda ci: len(self.clauses[ci]))
        survivors = set(candidates[:keep]) | {
            ci for ci in locked if ci >= self.n_original
        }
        remap: dict[int, int] = {}
        new_clauses = self.clauses[: self.n_original]
        for ci in range(self.n_original, len(self.clauses)):
            if ci in survivors:
                remap[ci] = len(new_clauses)
                new_clauses.append(self.clauses[ci])
        self.clauses = new_clauses
        size = 2 * self.num_vars + 2
        self.watch = [[] for _ in range(size)]
        self.bin_watch = [[] for _ in range(size)]
        for ci, clause in enumerate(self.clauses):
            if len(clause) == 2:
                a, b = clause
                self.bin_watch[_lit_idx(a)].append((b, ci))
                self.bin_watch[_lit_idx(b)].append((a, ci))
            else:
                self.watch[_lit_idx(clause[0])].append(ci)
                self.watch[_lit_idx(clause[1])].append(ci)
        for var in range(1, self.num_vars + 1):
            r = self.reason[var]
            if r >= self.n_original:
                self.reason[var] = remap.get(r, -1)

    def solve(self, budget: Budget | None = None) -> SolveResult:
        start = time.monotonic()
        budget = budget or Budget()
        if not self.ok:
            return SolveResult(UNSAT, None, self.stats)
        luby_base, restart_at, luby_i = 64, 64, 1
        max_learned = max(4000, self.n_original // 2)
        conflicts_since_restart = 0
        while True:
            conflict = self._propagate()
            if conflict >= 0:
                self.stats.conflicts += 1
                conflicts_since_restart += 1
                if not self.trail_lim:
                    self.stats.seconds = time.monotonic() - start
                    return SolveResult(UNSAT, None, self.stats)
                learned, back = self._analyze(conflict)
                self._cancel_to(back)
                if len(learned) == 1:
                    if not self._enqueue(learned[0], -1):
                        self.stats.seconds = time.monotonic() - start
                        return SolveResult(UNSAT, None, self.stats)
                else:
                    ci = self._attach(learned)
                    self._enqueue(learned[0], ci)
                if self.stats.conflicts % 64 == 0:
                    if budget.max_conflicts and self.stats.conflicts >= budget.max_conflicts:
                        break
                    if budget.max_seconds and time.monotonic() - start > budget.max_seconds:
                        break
                continue
            if len(self.trail) == self.num_vars:
                self.stats.seconds = time.monotonic() - start
                return SolveResult(SAT, self._model(), self.stats)
            if conflicts_since_restart >= restart_at:
                conflicts_since_restart = 0
                luby_i += 1
                restart_at = luby_base * _luby(luby_i)
                self._cancel_to(0)
                if len(self.clauses) - self.n_original > max_learned:
                    self._reduce_learned(max_learned // 2)
                continue
            var = self._decide_var()
            assert var != 0, "decision requested with all variables assigned"
            self._new_level(self._decision_lit(var))
        self.stats.seconds = time.monotonic() - start
        return SolveResult(TIMEOUT, None, self.stats)

    # -- enumeration ----------------------------------------------------------

    def iter_models(self):
        """Yield every total model once, as a sorted tuple of the true
        variables, by chronological backtracking over variables in id
        order (true branch first).  Learning is disabled so nothing is
        pruned; enumeration order is therefore reproducible.

        Everything is inlined: with hundreds of thousands of models the
        walk itself is the hot path.
        """
        if not self.ok:
            return
        val = self.val
        clauses = self.clauses
        watch = self.watch
        bin_watch = self.bin_watch
        trail = self.trail
        n = self.num_vars
        qhead = self.qhead
        # (trail mark, decision var, flipped) per open decision
        stack: list[tuple[int, int, bool]] = []

        def propagate() -> bool:
            nonlocal qhead
            while qhead < len(trail):
                lit = trail[qhead]
                qhead += 1
                false_lit = -lit
                fidx = false_lit + false_lit if false_lit > 0 else 1 - false_lit - false_lit
                for other, ci in bin_watch[fidx]:
                    v = val[other + other if other > 0 else 1 - other - other]
                    if v == 0:
                        return True
                    if v < 0:
                        oidx = other + other if other > 0 else 1 - other - other
                        val[oidx] = 1
                        val[oidx ^ 1] = 0
                        trail.append(other)
                ws = watch[fidx]
                i = j = 0
                nw = len(ws)
                while i < nw:
                    ci = ws[i]
                    i += 1
                    clause = clauses[ci]
                    if clause[0] == false_lit:
                        clause[0] = clause[1]
                        clause[1] = false_lit
                    first = clause[0]
                    fv = val[first + first if first > 0 else 1 - first - first]
                    if fv == 1:
                        ws[j] = ci
                        j += 1
                        continue
                    for k in range(2, len(clause)):
                        lk = clause[k]
                        if val[lk + lk if lk > 0 else 1 - lk - lk] != 0:
                            clause[1] = lk
                            clause[k] = false_lit
                            watch[lk + lk if lk > 0 else 1 - lk - lk].append(ci)
                            break
                    else:
                        ws[j] = ci
                        j += 1
                        if fv == 0:
                            while i < nw:
                                ws[j] = ws[i]
                                j += 1
                                i += 1
                            del ws[j:]
                            return True
                        fi2 = first + first if first > 0 else 1 - first - first
                        val[fi2] = 1
                        val[fi2 ^ 1] = 0
                        trail.append(first)
                del ws[j:]
            return False

        def backtrack_flip() -> bool:
            nonlocal qhead
            while stack:
                mark, var, flipped = stack[-1]
                for l in trail[mark:]:
                    ii = l + l if l > 0 else 1 - l - l
                    val[ii] = -1
                    val[ii ^ 1] = -1
                del trail[mark:]
                qhead = mark
                if flipped:
                    stack.pop()
                    continue
                stack[-1] = (mark, var, True)
                idx = var + var
                val[idx] = 0
                val[idx ^ 1] = 1
                trail.append(-var)
                return True
            return False

        while True:
            if propagate():
                self.stats.conflicts += 1
                if not backtrack_flip():
                    return
                continue
            if len(trail) == n:
                yield tuple(sorted(l for l in trail if l > 0))
                if not backtrack_flip():
                    return
                continue
            # next unassigned variable by id; ids below the last
            # decision are all assigned already
            pos = stack[-1][1] + 1 if stack else 1
            while val[pos + pos] >= 0:
                pos += 1
            stack.append((len(trail), pos, False))
            val[pos + pos] = 1
            val[pos + pos + 1] = 0
            trail.append(pos)
            self.stats.decisions += 1


def _luby(i: int) -> int:
    k = 1
    while (1 << (k + 1)) - 1 <= i:
        k += 1
    while (1 << k) - 1 != i:
        i -= (1 << k) - 1
        k = 1
        while (1 << (k + 1)) - 1 <= i:
            k += 1
    return 1 << (k - 1)


def solve_internal(formula, budget: Budget | None = None, heuristic: str = "activity") -> SolveResult:
    """Complete search over a CnfFormula or (num_vars, clauses) pair.

    Timeout is a status, not an error; satisfiable results are
    self-checked before being returned.  ``heuristic`` picks the
    branching rule: "activity" (default) or "static" most-occurrences
    with true-first polarity.
    """
    num_vars, clauses = _as_clause_list(formula)
    result = _Engine(num_vars, clauses, heuristic).solve(budget)
    if result.status == SAT and not check_model((num_vars, clauses), result.model):
        raise SolverError("internal solver produced a model that fails its clauses")
    return result


def iter_models(formula):
    """All total models, each as a sorted tuple of true variable ids
    (everything absent is false).  Enumeration walks variables in id
    order, so the model sequence is reproducible."""
    num_vars, clauses = _as_clause_list(formula)
    return _Engine(num_vars, clauses, heuristic="static").iter_models()


def check_model(formula, model: dict[int, bool]) -> bool:
    """True iff every clause has a true literal under a total model."""
    num_vars, clauses = _as_clause_list(formula)
    for var in range(1, num_vars + 1):
        if var not in model:
            raise SolverError(f"model is partial: variable {var} unassigned")
    for clause in clauses:
        for lit in clause:
            if model[abs(lit)] == (lit > 0):
                break
        else:
            return False
    return True


# -- external adapter ---------------------------------------------------------


def parse_solver_output(text: str) -> tuple[str, list[int]]:
    """Extract verdict and model literals from a DIMACS solver's stdout.

    Accepts both the bare style (``SAT`` / ``UNSAT`` followed by
    literals ending in 0) and the competition style (``s SATISFIABLE``
    plus ``v`` lines).
    """
    status = None
    lits: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        tokens = line.split()
        if tokens[0] == "s":
            tokens = tokens[1:]
            if not tokens:
                continue
        if tokens[0].upper() in ("UNSAT", "UNSATISFIABLE"):
            status = UNSAT
            continue
        if tokens[0].upper() in ("SAT", "SATISFIABLE"):
            status = SAT
            tokens = tokens[1:]
        if tokens and tokens[0] == "v":
            tokens = tokens[1:]
        if status == SAT:
            for tok in tokens:
                try:
                    lit = int(tok)
                except ValueError:
                    continue
                if lit != 0:
                    lits.append(lit)
    if status is None:
        raise SolverError("unrecognized solver output")
    return status, lits


def solve_external(dimacs_path, command, budget: Budget | None = None) -> SolveResult:
    """Run an external DIMACS solver process and parse its model.

    ``command`` is a shell-style string or argv list; the DIMACS path is
    appended as the last argument.  The parsed model is checked against
    the instance; a mismatch signals an adapter or solver fault and is
    an error, not a verdict.
    """
    budget = budget or Budget(max_seconds=300.0)
    argv = shlex.split(command) if isinstance(command, str) else list(command)
    argv.append(str(dimacs_path))
    start = time.monotonic()
    try:
        proc = subprocess.run(
            argv, capture_output=True, text=True, timeout=budget.max_seconds
        )
    except subprocess.TimeoutExpired:
        return SolveResult(TIMEOUT, None, SolveStats(seconds=time.monotonic() - start))
    except OSError as exc:
        raise SolverError(f"failed to launch solver {argv[0]!r}: {exc}") from exc
    status, lits = parse_solver_output(proc.stdout)
    elapsed = time.monotonic() - start
    if status == UNSAT:
        return SolveResult(UNSAT, None, SolveStats(seconds=elapsed))
    with open(dimacs_path) as f:
        num_vars, clauses = parse_dimacs(f.read())
    model = {v: False for v in range(1, num_vars + 1)}
    for lit in lits:
        if abs(lit) <= num_vars:
            model[abs(lit)] = lit > 0
    if not check_model((num_vars, clauses), model):
        raise SolverError("external solver model fails the instance")
    return SolveResult(SAT, model, SolveStats(seconds=elapsed))
