"""Shared brute-force oracles for the test suite.

Everything here evaluates encodings the slow, independent way:
satisfying assignments of a formula are found by checking every
bitmask, and set-constraint semantics are evaluated over universe
bitmasks.  None of it reuses the encoder's clause logic.
"""

from itertools import product

import numpy as np

from setcnf.encoder import EncodeOptions, encode_model
from setcnf.model import ProblemModel, SetVariable, Universe

LABELS = "abcdefgh"


def universe_of(size: int) -> Universe:
    return Universe(LABELS[:size])


def popcount(a: np.ndarray) -> np.ndarray:
    a = a - ((a >> 1) & 0x55555555)
    a = (a & 0x33333333) + ((a >> 2) & 0x33333333)
    a = (a + (a >> 4)) & 0x0F0F0F0F
    return (a * 0x01010101) >> 24


def cnf_models_mask(formula) -> np.ndarray:
    """All satisfying assignments of a small formula as bitmasks
    (bit v-1 is variable v)."""
    num_vars = formula.num_vars
    assert num_vars <= 22, f"too many variables for exhaustive check: {num_vars}"
    arr = np.arange(1 << num_vars, dtype=np.uint32)
    ok = np.ones(arr.shape, dtype=bool)
    for clause in formula.clauses():
        pos = neg = 0
        for lit in clause:
            if lit > 0:
                pos |= 1 << (lit - 1)
            else:
                neg |= 1 << (-lit - 1)
        ok &= ~(((arr & pos) == 0) & ((arr & neg) == neg))
    return arr[ok]


def projected_solutions(formula, support_bits: int) -> tuple[set[int], bool]:
    """CNF solutions projected onto the first support_bits variables.

    Returns the projection set and whether every projected solution has
    exactly one extension over the auxiliary variables.
    """
    sols = cnf_models_mask(formula)
    proj = sols & np.uint32((1 << support_bits) - 1)
    uniq, counts = np.unique(proj, return_counts=True)
    return set(int(x) for x in uniq), bool((counts == 1).all())


def build_model(universe: Universe, supports: dict[str, tuple[int, ...]], constraints) -> ProblemModel:
    model = ProblemModel(universe)
    for name, support in supports.items():
        model.add_set(SetVariable(name, support))
    for con in constraints:
        model.add_constraint(con)
    return model


def set_universe_masks(model: ProblemModel, assignments: np.ndarray) -> dict[str, np.ndarray]:
    """Per-set universe bitmasks for every support-variable assignment.

    ``assignments`` are bitmasks over the support variables laid out in
    declaration order (the encoder's variable order)."""
    masks = {}
    offset = 0
    for name, sv in model.sets.items():
        k = len(sv.support)
        table = np.zeros(1 << k, dtype=np.uint32)
        for local in range(1 << k):
            m = 0
            for i, x in enumerate(sv.support):
                if local >> i & 1:
                    m |= 1 << x
            table[local] = m
        masks[name] = table[(assignments >> offset) & ((1 << k) - 1)]
        offset += k
    return masks


def semantic_solution_set(model: ProblemModel, predicate) -> set[int]:
    """Support-variable assignments whose set interpretation satisfies
    ``predicate`` (a vectorized function of the per-set universe-mask
    dict and the universe mask)."""
    total_bits = sum(len(sv.support) for sv in model.sets.values())
    assert total_bits <= 20
    assignments = np.arange(1 << total_bits, dtype=np.uint32)
    masks = set_universe_masks(model, assignments)
    umask = np.uint32((1 << len(model.universe)) - 1)
    ok = predicate(masks, umask)
    return set(int(x) for x in assignments[ok])


def check_constraint_oracle(model: ProblemModel, predicate, options=None) -> None:
    """Assert CNF-projected solutions equal the semantic solution set,
    and that auxiliaries (if any) are uniquely determined."""
    formula = encode_model(model, options or EncodeOptions())
    support_bits = sum(len(sv.support) for sv in model.sets.values())
    got, unique_aux = projected_solutions(formula, support_bits)
    want = semantic_solution_set(model, predicate)
    assert got == want, (
        f"solution mismatch: extra={sorted(got - want)[:5]} "
        f"missing={sorted(want - got)[:5]}"
    )
    assert unique_aux, "auxiliary variables not uniquely determined"


def all_supports(universe_size: int):
    """Every subset of the universe, as an index tuple."""
    return [
        tuple(i for i in range(universe_size) if mask >> i & 1)
        for mask in range(1 << universe_size)
    ]


def canonical_support_combos(universe_size: int, arity: int):
    """One representative per orbit of support-mask tuples under
    universe permutation.  The encodings treat elements uniformly, so
    projected-solution equality on representatives covers every combo
    (checked exhaustively at smaller sizes)."""
    from itertools import permutations

    n = universe_size
    perms = list(permutations(range(n)))
    perm_map = np.zeros((len(perms), 1 << n), dtype=np.int64)
    for pi, perm in enumerate(perms):
        for mask in range(1 << n):
            out = 0
            for i in range(n):
                if mask >> i & 1:
                    out |= 1 << perm[i]
            perm_map[pi, mask] = out
    grids = np.meshgrid(*([np.arange(1 << n)] * arity), indexing="ij")
    cols = [g.ravel() for g in grids]
    shift = arity * n

    def key(columns):
        k = np.zeros(columns[0].shape, dtype=np.int64)
        for c in columns:
            k = (k << n) | c
        return k

    base = key(cols)
    best = base.copy()
    for pi in range(len(perms)):
        np.minimum(best, key([perm_map[pi][c] for c in cols]), out=best)
    keep = base == best
    masks = [tuple(int(c[i]) for c in cols) for i in np.flatnonzero(keep)]
    supports = all_supports(n)
    return [tuple(supports[m] for m in combo) for combo in masks]
