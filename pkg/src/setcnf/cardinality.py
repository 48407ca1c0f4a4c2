"""Cardinality constraints via the unary totalizer/comparator pair.

The totalizer is a balanced binary tree over the input literals: every
node carries one fresh output variable per leaf below it, and its
clauses sort truth values in unary (true outputs packed first).  The
comparator then pins the sorted prefix with unit clauses.  Those units
are exactly what later vanishes under unit propagation.

A naive pairwise encoding is kept alongside purely as a cross-check
oracle at small sizes.
"""

from __future__ import annotations

from itertools import combinations, count
from typing import Sequence


def build_totalizer(ctx, inputs: Sequence[int]) -> list[int]:
    """Emit sorting clauses for the inputs; return root output variables.

    A single input is its own (sorted) output: no clauses.  Splits are
    ceil/floor with the larger half first; node ids are assigned in
    preorder, so variable allocation is reproducible.
    """
    if len(inputs) <= 1:
        return list(inputs)
    formula = ctx.formula
    cid = ctx.constraint_id
    node_ids = count(1)

    def build(lits: list[int]) -> list[int]:
        if len(lits) == 1:
            return lits
        m = len(lits)
        node = next(node_ids)
        outs = [formula.new_var(("tot", cid, node, p)) for p in range(1, m + 1)]
        half = (m + 1) // 2
        left = build(lits[:half])
        right = build(lits[half:])
        a, b = len(left), len(right)
        # Sorted-merge schema with boundary constants (index 0 is true,
        # index size+1 is false); clauses satisfied by a constant are
        # dropped, false constants are removed from the clause.
        for alpha in range(a + 1):
            for beta in range(b + 1):
                gamma = alpha + beta
                if gamma >= 1:
                    clause = []
                    if alpha >= 1:
                        clause.append(-left[alpha - 1])
                    if beta >= 1:
                        clause.append(-right[beta - 1])
                    clause.append(outs[gamma - 1])
                    formula.add_clause(clause)
                if gamma + 1 <= m:
                    clause = []
                    if alpha < a:
                        clause.append(left[alpha])
                    if beta < b:
                        clause.append(right[beta])
                    clause.append(-outs[gamma])
                    formula.add_clause(clause)
        return outs

    return build(list(inputs))


def encode_comparator(ctx, outputs: Sequence[int], k: int) -> None:
    """Units fixing exactly k true inputs: the first min(k, n) sorted
    outputs positive, the rest negative; k beyond n is infeasible and
    adds the empty clause."""
    n = len(outputs)
    for s in outputs[: min(k, n)]:
        ctx.formula.add_clause([s])
    for s in outputs[k:]:
        ctx.formula.add_clause([-s])
    if k > n:
        ctx.formula.add_empty_clause()


def _gather_inputs(ctx, set_name: str, k: int) -> tuple[list[int], int]:
    """Support variables in canonical order, with constant-assigned
    inputs folded away: fixed-true inputs lower the remaining bound,
    fixed-false inputs disappear."""
    free, fixed_true = [], 0
    for x in sorted(ctx.support(set_name)):
        var = ctx.var(set_name, x)
        val = ctx.fixed.get(var)
        if val is None:
            free.append(var)
        elif val:
            fixed_true += 1
    return free, k - fixed_true


def encode_cardinality_eq(ctx, set_name: str, k: int) -> None:
    """|set| == k: totalizer over the support variables plus comparator."""
    inputs, k = _gather_inputs(ctx, set_name, k)
    if k < 0:
        ctx.formula.add_empty_clause()
        return
    outputs = build_totalizer(ctx, inputs)
    encode_comparator(ctx, outputs, k)


def encode_cardinality_atmost(ctx, set_name: str, k: int) -> None:
    """|set| <= k: totalizer plus the negative comparator units only."""
    inputs, k = _gather_inputs(ctx, set_name, k)
    if k < 0:
        ctx.formula.add_empty_clause()
        return
    outputs = build_totalizer(ctx, inputs)
    for s in outputs[k:]:
        ctx.formula.add_clause([-s])


def naive_cardinality_eq(ctx, set_name: str, k: int) -> None:
    """Pairwise oracle encoding of |set| == k, for tiny supports only:
    every (k+1)-subset has a false variable, every (n-k+1)-subset a true
    one.  Clause count is C(n, k+1) + C(n, n-k+1)."""
    support = sorted(ctx.support(set_name))
    n = len(support)
    if n > 12:
        raise ValueError(f"naive cardinality limited to 12 inputs, got {n}")
    variables = [ctx.var(set_name, x) for x in support]
    for subset in combinations(variables, k + 1):
        ctx.emit([-v for v in subset])
    at_least = n - k + 1
    if at_least <= 0:
        ctx.formula.add_empty_clause()
    else:
        for subset in combinations(variables, at_least):
            ctx.emit(list(subset))
