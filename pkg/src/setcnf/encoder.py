"""Clause generation for each set-constraint form.

Every rule appends clauses over support variables to a shared formula;
cardinality constraints delegate to the totalizer machinery.  Rules
emit their clause families in a fixed order (families as documented on
each function, elements in universe-index order), so identical models
produce byte-identical DIMACS.

Elements fixed by constant assignments are substituted at generation
time: a literal known true satisfies (and suppresses) its clause, a
literal known false is removed.  The constant-assignment units
themselves are always emitted, so the formula remains equivalent and
decodable.  Biconditionals are emitted as their binary/ternary
decomposition; the only auxiliary variables introduced here are the
difference witnesses of the inequality rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .cardinality import encode_cardinality_atmost, encode_cardinality_eq
from .cnf import CnfFormula
from .model import (
    CardinalityAtMost,
    CardinalityEq,
    ConstantAssign,
    Difference,
    EmptyIntersection,
    Equal,
    Intersection,
    Member,
    ModelError,
    MultiIntersection,
    MultiUnion,
    ProblemModel,
    ShareAtMost,
    Subset,
    Union,
)


@dataclass(frozen=True)
class EncodeOptions:
    """Knobs that change clause generation without changing semantics.

    share_pairs: "strict" emits one clause per unordered element pair in
    ShareAtMost constraints; "all" emits both orders (duplicate clauses,
    doubling that family's count).  Applies to bound=1 only.
    """

    share_pairs: str = "strict"


class EncodingContext:
    """Carries the model, target formula and the constant-substitution map."""

    def __init__(self, model: ProblemModel, formula: CnfFormula, options: EncodeOptions):
        self.model = model
        self.formula = formula
        self.options = options
        self.constraint_id = 0
        self.fixed: dict[int, bool] = {}
        self._supports = {name: set(sv.support) for name, sv in model.sets.items()}

    def support(self, name: str) -> set[int]:
        return self._supports[name]

    def var(self, set_name: str, element: int) -> int:
        return self.formula.support_var(set_name, element)

    def label(self, element: int) -> str:
        return self.model.universe.label_of(element)

    def emit(self, lits) -> None:
        """Normalize and append one clause: substitute constants, drop
        duplicate literals, skip tautologies; an all-false clause
        becomes the empty clause (FALSE)."""
        out = []
        seen = set()
        for lit in lits:
            val = self.fixed.get(abs(lit))
            if val is not None:
                if (lit > 0) == val:
                    return
                continue
            if lit in seen:
                continue
            if -lit in seen:
                return
            seen.add(lit)
            out.append(lit)
        if out:
            self.formula.add_clause(out)
        else:
            self.formula.add_empty_clause()

    def emit_block(self, block: np.ndarray) -> None:
        self.formula.add_clauses_block(block)

    def has_fixed(self, set_name: str) -> bool:
        return any(self.var(set_name, x) in self.fixed for x in self.support(set_name))


def encode_model(model: ProblemModel, options: EncodeOptions | None = None) -> CnfFormula:
    """Translate a validated model into a CNF formula.

    Support variables are allocated for all sets in declaration order,
    then constraints are encoded in sequence (auxiliary variables in
    constraint order).  Constant assignments are collected up front so
    every rule can substitute them.
    """
    report = model.validate()
    if not report.ok:
        raise ModelError("; ".join(report.violations))
    formula = CnfFormula()
    for name, sv in model.sets.items():
        formula.register_set(
            name, sv.support, [model.universe.label_of(i) for i in sv.support]
        )
    ctx = EncodingContext(model, formula, options or EncodeOptions())

    conflicted: set[int] = set()
    for con in model.constraints:
        if not isinstance(con, ConstantAssign):
            continue
        members = set(con.elements)
        for x in model.sets[con.set_name].support:
            var = ctx.var(con.set_name, x)
            value = x in members
            if var in ctx.fixed and ctx.fixed[var] != value:
                conflicted.add(var)
            else:
                ctx.fixed[var] = value
    for var in conflicted:
        ctx.fixed.pop(var, None)

    for i, con in enumerate(model.constraints):
        ctx.constraint_id = i + 1
        formula.begin_constraint(f"{i + 1}:{type(con).__name__}")
        _RULES[type(con)](ctx, con)
    return formula


# --- individual rules -------------------------------------------------------


def encode_member(ctx: EncodingContext, con: Member) -> None:
    """In support: one unit clause.  Outside support: membership is
    impossible, so a positive constraint is FALSE and a negative one is
    vacuous."""
    if con.element in ctx.support(con.set_name):
        var = ctx.var(con.set_name, con.element)
        ctx.emit([var if con.positive else -var])
    elif con.positive:
        ctx.formula.add_empty_clause()


def encode_equal(ctx: EncodingContext, con: Equal) -> None:
    if not con.positive:
        encode_not_equal(ctx, con)
        return
    sf, sg = ctx.support(con.left), ctx.support(con.right)
    for x in sorted(sf & sg):
        f, g = ctx.var(con.left, x), ctx.var(con.right, x)
        ctx.emit([-f, g])
        ctx.emit([-g, f])
    for x in sorted(sf - sg):
        ctx.emit([-ctx.var(con.left, x)])
    for x in sorted(sg - sf):
        ctx.emit([-ctx.var(con.right, x)])


def encode_not_equal(ctx: EncodingContext, con: Equal) -> None:
    """Existence of a difference witness: one auxiliary d_x per element
    of either support (d_x <-> the sets disagree on x), plus the clause
    requiring some witness to hold.  Both supports empty forces both
    sets empty, hence equal: FALSE."""
    sf, sg = ctx.support(con.left), ctx.support(con.right)
    union = sorted(sf | sg)
    if not union:
        ctx.formula.add_empty_clause()
        return
    witnesses = []
    for x in union:
        d = ctx.formula.new_var(("diff", ctx.constraint_id, ctx.label(x)))
        witnesses.append(d)
        if x in sf and x in sg:
            f, g = ctx.var(con.left, x), ctx.var(con.right, x)
            ctx.emit([-d, f, g])
            ctx.emit([-d, -f, -g])
            ctx.emit([d, -f, g])
            ctx.emit([d, f, -g])
        elif x in sf:
            f = ctx.var(con.left, x)
            ctx.emit([-d, f])
            ctx.emit([d, -f])
        else:
            g = ctx.var(con.right, x)
            ctx.emit([-d, g])
            ctx.emit([d, -g])
    ctx.emit(witnesses)


def encode_intersection(ctx: EncodingContext, con: Intersection) -> None:
    sf, sg, sh = ctx.support(con.left), ctx.support(con.right), ctx.support(con.result)
    for x in sorted(sf & sg & sh):
        f, g, h = ctx.var(con.left, x), ctx.var(con.right, x), ctx.var(con.result, x)
        ctx.emit([-f, -g, h])
        ctx.emit([-h, f])
        ctx.emit([-h, g])
    for x in sorted((sf & sg) - sh):
        ctx.emit([-ctx.var(con.left, x), -ctx.var(con.right, x)])
    for x in sorted(sh - (sf & sg)):
        ctx.emit([-ctx.var(con.result, x)])


def encode_empty_intersection(ctx: EncodingContext, con: EmptyIntersection) -> None:
    """One clause per element common to all supports: not all sets may
    hold it.  Elements missing from any support contribute nothing."""
    common = set(ctx.support(con.sets[0]))
    for name in con.sets[1:]:
        common &= ctx.support(name)
    for x in sorted(common):
        ctx.emit([-ctx.var(name, x) for name in con.sets])


def encode_union(ctx: EncodingContext, con: Union) -> None:
    sf, sg, sh = ctx.support(con.left), ctx.support(con.right), ctx.support(con.result)
    for x in sorted(sf & sg & sh):
        f, g, h = ctx.var(con.left, x), ctx.var(con.right, x), ctx.var(con.result, x)
        ctx.emit([-h, f, g])
        ctx.emit([-f, h])
        ctx.emit([-g, h])
    for x in sorted((sf & sh) - sg):
        f, h = ctx.var(con.left, x), ctx.var(con.result, x)
        ctx.emit([-f, h])
        ctx.emit([-h, f])
    for x in sorted((sg & sh) - sf):
        g, h = ctx.var(con.right, x), ctx.var(con.result, x)
        ctx.emit([-g, h])
        ctx.emit([-h, g])
    for x in sorted(sh - (sf | sg)):
        ctx.emit([-ctx.var(con.result, x)])
    for x in sorted(sf - sh):
        ctx.emit([-ctx.var(con.left, x)])
    for x in sorted(sg - sh):
        ctx.emit([-ctx.var(con.right, x)])


def encode_subset(ctx: EncodingContext, con: Subset) -> None:
    sf, sg = ctx.support(con.left), ctx.support(con.right)
    for x in sorted(sf & sg):
        ctx.emit([-ctx.var(con.left, x), ctx.var(con.right, x)])
    for x in sorted(sf - sg):
        ctx.emit([-ctx.var(con.left, x)])


def encode_difference(ctx: EncodingContext, con: Difference) -> None:
    """result == left \\ right, five support-partition families."""
    sf, sg, sh = ctx.support(con.left), ctx.support(con.right), ctx.support(con.result)
    for x in sorted(sf & sg & sh):
        f, g, h = ctx.var(con.left, x), ctx.var(con.right, x), ctx.var(con.result, x)
        ctx.emit([-f, g, h])
        ctx.emit([-h, f])
        ctx.emit([-h, -g])
    for x in sorted(sf - (sg | sh)):
        ctx.emit([-ctx.var(con.left, x)])
    for x in sorted(sh - sf):
        ctx.emit([-ctx.var(con.result, x)])
    for x in sorted((sf & sh) - sg):
        f, h = ctx.var(con.left, x), ctx.var(con.result, x)
        ctx.emit([-f, h])
        ctx.emit([-h, f])
    for x in sorted((sf & sg) - sh):
        ctx.emit([-ctx.var(con.left, x), ctx.var(con.right, x)])


def encode_multi_union(ctx: EncodingContext, con: MultiUnion) -> None:
    """Per-element membership signatures instead of the power-set form:
    each element of the result support lands in exactly one (I, J) cell,
    so the clause set matches the quantified formulation at linear cost.
    """
    sh = ctx.support(con.result)
    supports = [ctx.support(name) for name in con.sets]
    h_elems = sorted(sh)
    signatures = {
        x: [i for i, s in enumerate(supports) if x in s] for x in h_elems
    }
    for x in h_elems:
        sig = signatures[x]
        if not sig:
            continue
        h = ctx.var(con.result, x)
        operand_vars = [ctx.var(con.sets[i], x) for i in sig]
        for v in operand_vars:
            ctx.emit([-v, h])
        ctx.emit([-h] + operand_vars)
    for x in h_elems:
        if not signatures[x]:
            ctx.emit([-ctx.var(con.result, x)])
    for i, s in enumerate(supports):
        for x in sorted(s - sh):
            ctx.emit([-ctx.var(con.sets[i], x)])


def encode_multi_intersection(ctx: EncodingContext, con: MultiIntersection) -> None:
    sh = ctx.support(con.result)
    supports = [ctx.support(name) for name in con.sets]
    inter_all = set(supports[0])
    for s in supports[1:]:
        inter_all &= s
    for x in sorted(sh & inter_all):
        h = ctx.var(con.result, x)
        operand_vars = [ctx.var(name, x) for name in con.sets]
        ctx.emit([-v for v in operand_vars] + [h])
        for v in operand_vars:
            ctx.emit([-h, v])
    for x in sorted(inter_all - sh):
        ctx.emit([-ctx.var(name, x) for name in con.sets])
    for x in sorted(sh - inter_all):
        ctx.emit([-ctx.var(con.result, x)])


def encode_share_at_most(ctx: EncodingContext, con: ShareAtMost) -> None:
    """Forbid every (bound+1)-subset of the common support from sitting
    in both sets at once; no intermediate intersection set is built."""
    common = sorted(ctx.support(con.left) & ctx.support(con.right))
    k = con.bound
    if len(common) <= k:
        return
    both_orders = ctx.options.share_pairs == "all" and k == 1
    if (
        k == 1
        and con.left != con.right
        and len(common) >= 24
        and not ctx.has_fixed(con.left)
        and not ctx.has_fixed(con.right)
    ):
        a = np.fromiter((ctx.var(con.left, x) for x in common), dtype=np.int32)
        b = np.fromiter((ctx.var(con.right, x) for x in common), dtype=np.int32)
        iu, ju = np.triu_indices(len(common), k=1)
        block = np.column_stack((-a[iu], -a[ju], -b[iu], -b[ju]))
        ctx.emit_block(block)
        if both_orders:
            ctx.emit_block(np.column_stack((-a[ju], -a[iu], -b[ju], -b[iu])))
        return
    for subset in combinations(common, k + 1):
        lits = [-ctx.var(con.left, x) for x in subset]
        lits += [-ctx.var(con.right, x) for x in subset]
        ctx.emit(lits)
        if both_orders:
            x, y = subset
            ctx.emit(
                [-ctx.var(con.left, y), -ctx.var(con.left, x),
                 -ctx.var(con.right, y), -ctx.var(con.right, x)]
            )


def encode_constant_assign(ctx: EncodingContext, con: ConstantAssign) -> None:
    """One unit clause per support element: positive for members,
    negative for the rest.  Emitted unfiltered; these are the constants
    every other rule substitutes."""
    members = set(con.elements)
    for x in ctx.model.sets[con.set_name].support:
        var = ctx.var(con.set_name, x)
        ctx.formula.add_clause([var if x in members else -var])


def _encode_card_eq(ctx: EncodingContext, con: CardinalityEq) -> None:
    encode_cardinality_eq(ctx, con.set_name, con.k)


def _encode_card_atmost(ctx: EncodingContext, con: CardinalityAtMost) -> None:
    encode_cardinality_atmost(ctx, con.set_name, con.k)


_RULES = {
    Member: encode_member,
    Equal: encode_equal,
    Intersection: encode_intersection,
    EmptyIntersection: encode_empty_intersection,
    Union: encode_union,
    Subset: encode_subset,
    Difference: encode_difference,
    MultiUnion: encode_multi_union,
    MultiIntersection: encode_multi_intersection,
    CardinalityEq: _encode_card_eq,
    CardinalityAtMost: _encode_card_atmost,
    ConstantAssign: encode_constant_assign,
    ShareAtMost: encode_share_at_most,
}
