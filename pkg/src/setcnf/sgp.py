"""Social golfer instance builders, schedule decoding and verification.

An instance g-p-w schedules q = g*p players into g groups of p over w
weeks so that no pair of players shares a group twice.  Three encodings
are provided:

* ``build_de``: positional direct encoding (variables: player at
  position in group in week), clause families f1..f6.
* ``build_tme``: adds one membership variable per (player, group, week)
  abstracting positions, which collapses the socialization family; its
  same-player family f3 ranges over all position pairs, not just the
  ordered ones.  ``sb=True`` appends the three lexicographic ordering
  families f14..f16 (players within a group, groups within a week by
  first player, weeks by the second player of the first group).
* ``build_sce_model``/``apply_sbc``/``build_sbm_model``: set-constraint
  models (groups as sets with cardinality, weekly union, and pairwise
  share-at-most-one socialization), encoded through the generic rules.
  SBC adds first-week/diagonal membership constraints; SBM instead
  fixes week one outright and shrinks every later support, which is
  where the size reduction comes from.

``int_sizes``/``PUBLISHED_SIZES`` carry the closed-form and published
regression baselines for the fourteen benchmark instances; a handful of
published cells omit clause families and are listed with their gaps.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .cnf import CnfFormula, Origin
from .model import (
    CardinalityAtMost,
    CardinalityEq,
    ConstantAssign,
    EmptyIntersection,
    Equal,
    Intersection,
    Member,
    MultiUnion,
    ProblemModel,
    SetVariable,
    ShareAtMost,
    Union,
    Universe,
)


class DecodeError(Exception):
    pass


@dataclass(frozen=True)
class SgpConfig:
    g: int  # groups per week
    p: int  # players per group
    w: int  # weeks

    def __post_init__(self):
        if self.g < 1 or self.p < 1 or self.w < 1:
            raise ValueError("g, p, w must all be at least 1")

    @property
    def q(self) -> int:
        return self.g * self.p

    @property
    def name(self) -> str:
        return f"{self.g}-{self.p}-{self.w}"

    @classmethod
    def parse(cls, text: str) -> "SgpConfig":
        m = re.fullmatch(r"(\d+)-(\d+)-(\d+)", text.strip())
        if not m:
            raise ValueError(f"expected g-p-w, got {text!r}")
        return cls(*(int(x) for x in m.groups()))


@dataclass(frozen=True)
class SgpVariant:
    encoding: str = "sce"  # de | tme | sce
    symmetry: str = "none"  # none | tme | sbc | sbm
    socialization: str = "implication"  # implication | cardinality (sce only)
    unit_propagate: bool = False

    def __post_init__(self):
        if self.encoding not in ("de", "tme", "sce"):
            raise ValueError(f"unknown encoding {self.encoding!r}")
        if self.symmetry not in ("none", "tme", "sbc", "sbm"):
            raise ValueError(f"unknown symmetry mode {self.symmetry!r}")
        if self.symmetry == "tme" and self.encoding != "tme":
            raise ValueError("symmetry 'tme' requires the tme encoding")
        if self.symmetry in ("sbc", "sbm") and self.encoding != "sce":
            raise ValueError(f"symmetry {self.symmetry!r} requires the sce encoding")
        if self.socialization not in ("implication", "cardinality"):
            raise ValueError(f"unknown socialization {self.socialization!r}")

    @property
    def key(self) -> str:
        base = {"none": "", "tme": "_sb", "sbc": "_sbc", "sbm": "_sbm"}[self.symmetry]
        return f"{self.encoding}{base}" + ("_up" if self.unit_propagate else "")


# Schedule: w weeks, each a tuple of g groups, each a sorted tuple of
# 1-based player numbers.
Schedule = tuple[tuple[tuple[int, ...], ...], ...]


# --- direct encodings ---------------------------------------------------------


class _DirectBuilder:
    """Shared index tables for the positional encodings.

    Variable ids: pos(q', p', g', w') = (((q'-1)p + p'-1)g + g'-1)w + w'
    with membership variables (tme) appended after all position
    variables: mem(q', g', w') = qpgw + ((q'-1)g + g'-1)w + w'.
    """

    def __init__(self, config: SgpConfig, with_membership: bool):
        self.cfg = config
        g, p, w, q = config.g, config.p, config.w, config.q
        self.formula = CnfFormula()
        for q_ in range(1, q + 1):
            for p_ in range(1, p + 1):
                for g_ in range(1, g + 1):
                    for w_ in range(1, w + 1):
                        self.formula.new_var(("pos", q_, p_, g_, w_))
        if with_membership:
            for q_ in range(1, q + 1):
                for g_ in range(1, g + 1):
                    for w_ in range(1, w + 1):
                        self.formula.new_var(("mem", q_, g_, w_))
        # pos(q', p', g', w') = atab[q'-1, p'-1] + offtab[g'-1, w'-1]
        self.atab = (
            (np.arange(q, dtype=np.int64)[:, None] * p + np.arange(p, dtype=np.int64)[None, :])
            * g * w
        )
        self.offtab = np.arange(g, dtype=np.int64)[:, None] * w + np.arange(1, w + 1, dtype=np.int64)[None, :]
        self.memtab = q * p * g * w + np.arange(q, dtype=np.int64) * g * w

    def emit(self, tag: str, block: np.ndarray) -> None:
        self.formula.begin_constraint(tag)
        self.formula.add_clauses_block(block.reshape(-1, block.shape[-1]))

    def family_plays_each_week(self) -> None:
        """f1: every player occupies some position every week (q*w clauses)."""
        a, off = self.atab, self.offtab
        block = a[:, None, :, None] + off.T[None, :, None, :]  # (q, w, p, g)
        q, w = block.shape[0], block.shape[1]
        self.emit("f1", block.reshape(q, w, -1))

    def family_one_position_per_group(self) -> None:
        """f2: no player at two positions of one group (q*w*g*C(p,2))."""
        p = self.cfg.p
        if p < 2:
            self.formula.begin_constraint("f2")
            return
        pi, pj = np.triu_indices(p, 1)
        a, off = self.atab, self.offtab
        l1 = a[:, pi][:, None, None, :] + off.T[None, :, :, None]  # (q, w, g, npp)
        l2 = a[:, pj][:, None, None, :] + off.T[None, :, :, None]
        self.emit("f2", np.stack((-l1, -l2), axis=-1))

    def family_one_group_per_week(self, full_pairs: bool) -> None:
        """f3: no player in two groups one week.  Positions pair
        triangularly in the direct encoding and exhaustively (p^2) in
        the membership encoding."""
        p, g = self.cfg.p, self.cfg.g
        if g < 2:
            self.formula.begin_constraint("f3")
            return
        if full_pairs:
            pi, pj = [x.ravel() for x in np.meshgrid(np.arange(p), np.arange(p), indexing="ij")]
        else:
            if p < 2:
                self.formula.begin_constraint("f3")
                return
            pi, pj = np.triu_indices(p, 1)
        gi, gj = np.triu_indices(g, 1)
        a, off = self.atab, self.offtab
        l1 = a[:, pi][:, None, :, None] + off[gi].T[None, :, None, :]  # (q, w, npp, ngg)
        l2 = a[:, pj][:, None, :, None] + off[gj].T[None, :, None, :]
        self.emit("f3", np.stack((-l1, -l2), axis=-1))

    def family_position_filled(self) -> None:
        """f4: someone sits at every position of every group (w*p*g)."""
        a, off = self.atab, self.offtab
        block = off.T[:, None, :, None] + a.T[None, :, None, :]  # (w, p, g, q)
        self.emit("f4", block)

    def family_position_unique(self) -> None:
        """f5: at most one player per position (C(q,2)*w*p*g)."""
        q = self.cfg.q
        if q < 2:
            self.formula.begin_constraint("f5")
            return
        qi, qj = np.triu_indices(q, 1)
        a, off = self.atab, self.offtab
        l1 = off.T[:, None, :, None] + a[qi].T[None, :, None, :]  # (w, p, g, nqq)
        l2 = off.T[:, None, :, None] + a[qj].T[None, :, None, :]
        self.emit("f5", np.stack((-l1, -l2), axis=-1))

    def family_socialization_positional(self) -> None:
        """f6: a pair sharing a group may not share another group in a
        later week, expanded over all four positions."""
        cfg = self.cfg
        g, p, w, q = cfg.g, cfg.p, cfg.w, cfg.q
        self.formula.begin_constraint("f6")
        if q < 2 or w < 2:
            return
        qi, qj = np.triu_indices(q, 1)
        shape = (len(qi), p, p, p, p)
        a = self.atab
        a1 = np.broadcast_to(a[qi][:, :, None, None, None], shape).ravel()
        a2 = np.broadcast_to(a[qj][:, None, :, None, None], shape).ravel()
        a3 = np.broadcast_to(a[qi][:, None, None, :, None], shape).ravel()
        a4 = np.broadcast_to(a[qj][:, None, None, None, :], shape).ravel()
        off = self.offtab
        for w1 in range(1, w):
            for g1 in range(1, g + 1):
                for w2 in range(w1 + 1, w + 1):
                    for g2 in range(1, g + 1):
                        o1 = int(off[g1 - 1, w1 - 1])
                        o2 = int(off[g2 - 1, w2 - 1])
                        block = np.column_stack(
                            (-(a1 + o1), -(a2 + o1), -(a3 + o2), -(a4 + o2))
                        )
                        self.formula.add_clauses_block(block)

    def family_membership_definition(self) -> None:
        """f7: membership variable holds iff some position does."""
        p = self.cfg.p
        a, off, mem = self.atab, self.offtab, self.memtab
        m = mem[:, None, None] + off[None, :, :]  # (q, g, w)
        positions = a[:, None, None, :] + off[None, :, :, None]  # (q, g, w, p)
        self.emit("f7", np.concatenate((-m[..., None], positions), axis=-1))
        self.formula.add_clauses_block(
            np.stack(
                (np.broadcast_to(m[..., None], positions.shape), -positions), axis=-1
            ).reshape(-1, 2)
        )

    def family_socialization_membership(self) -> None:
        """f8: socialization over membership variables (C(w,2)*g^2*C(q,2))."""
        cfg = self.cfg
        g, w, q = cfg.g, cfg.w, cfg.q
        self.formula.begin_constraint("f8")
        if q < 2 or w < 2:
            return
        qi, qj = np.triu_indices(q, 1)
        mi, mj = self.memtab[qi], self.memtab[qj]
        off = self.offtab
        for w1 in range(1, w):
            for g1 in range(1, cfg.g + 1):
                for w2 in range(w1 + 1, w + 1):
                    for g2 in range(1, g + 1):
                        o1 = int(off[g1 - 1, w1 - 1])
                        o2 = int(off[g2 - 1, w2 - 1])
                        block = np.column_stack(
                            (-(mi + o1), -(mj + o1), -(mi + o2), -(mj + o2))
                        )
                        self.formula.add_clauses_block(block)

    def family_order_players(self) -> None:
        """f14: within a group, higher positions take higher players."""
        cfg = self.cfg
        self.formula.begin_constraint("f14")
        ti, tm = np.tril_indices(cfg.q)
        a, off = self.atab, self.offtab
        for j in range(1, cfg.p):
            for k in range(1, cfg.g + 1):
                for l in range(1, cfg.w + 1):
                    o = int(off[k - 1, l - 1])
                    block = np.column_stack(
                        (-(a[ti, j - 1] + o), -(a[tm, j] + o))
                    )
                    self.formula.add_clauses_block(block)

    def family_order_groups(self) -> None:
        """f15: groups within a week ordered by their first players."""
        cfg = self.cfg
        self.formula.begin_constraint("f15")
        ti, tm = np.tril_indices(cfg.q)
        a, off = self.atab, self.offtab
        for k in range(1, cfg.g):
            for l in range(1, cfg.w + 1):
                block = np.column_stack(
                    (
                        -(a[ti, 0] + int(off[k - 1, l - 1])),
                        -(a[tm, 0] + int(off[k, l - 1])),
                    )
                )
                self.formula.add_clauses_block(block)

    def family_order_weeks(self) -> None:
        """f16: weeks ordered by the second player of their first group."""
        cfg = self.cfg
        self.formula.begin_constraint("f16")
        if cfg.p < 2:
            return
        ti, tm = np.tril_indices(cfg.q)
        a, off = self.atab, self.offtab
        for l in range(1, cfg.w):
            block = np.column_stack(
                (
                    -(a[ti, 1] + int(off[0, l - 1])),
                    -(a[tm, 1] + int(off[0, l])),
                )
            )
            self.formula.add_clauses_block(block)


def build_de(config: SgpConfig) -> CnfFormula:
    """Positional direct encoding, clause families f1..f6."""
    b = _DirectBuilder(config, with_membership=False)
    b.family_plays_each_week()
    b.family_one_position_per_group()
    b.family_one_group_per_week(full_pairs=False)
    b.family_position_filled()
    b.family_position_unique()
    b.family_socialization_positional()
    return b.formula


def build_tme(config: SgpConfig, sb: bool = False) -> CnfFormula:
    """Membership encoding f1..f5 + f7, f8; sb adds f14..f16."""
    b = _DirectBuilder(config, with_membership=True)
    b.family_plays_each_week()
    b.family_one_position_per_group()
    b.family_one_group_per_week(full_pairs=True)
    b.family_position_filled()
    b.family_position_unique()
    b.family_membership_definition()
    b.family_socialization_membership()
    if sb:
        b.family_order_players()
        b.family_order_groups()
        b.family_order_weeks()
    return b.formula


def build_tme_sb(config: SgpConfig) -> CnfFormula:
    return build_tme(config, sb=True)


# --- closed-form instance sizes ----------------------------------------------


def de_counts(config: SgpConfig) -> tuple[int, int]:
    g, p, w, q = config.g, config.p, config.w, config.q
    variables = q * p * g * w
    clauses = (
        q * w
        + q * w * g * (p * (p - 1) // 2)
        + q * w * (p * (p - 1) // 2) * (g * (g - 1) // 2)
        + w * p * g
        + (q * (q - 1) // 2) * w * p * g
        + (w * (w - 1) // 2) * g * g * (q * (q - 1) // 2) * p**4
    )
    return variables, clauses


def tme_counts(config: SgpConfig) -> tuple[int, int]:
    g, p, w, q = config.g, config.p, config.w, config.q
    variables = q * p * g * w + q * g * w
    clauses = (
        q * w
        + q * w * g * (p * (p - 1) // 2)
        + q * w * p * p * (g * (g - 1) // 2)
        + w * p * g
        + (q * (q - 1) // 2) * w * p * g
        + q * w * g * (p + 1)
        + (w * (w - 1) // 2) * g * g * (q * (q - 1) // 2)
    )
    return variables, clauses


def tme_sb_counts(config: SgpConfig) -> tuple[int, int]:
    g, p, w, q = config.g, config.p, config.w, config.q
    variables, clauses = tme_counts(config)
    tri = q * (q + 1) // 2
    clauses += (p - 1) * g * w * tri + (g - 1) * w * tri + (w - 1) * tri
    return variables, clauses


def closed_form_counts(kind: str, config: SgpConfig) -> tuple[int, int]:
    return {"de": de_counts, "tme": tme_counts, "tme_sb": tme_sb_counts}[kind](config)


BENCHMARK_CONFIGS: tuple[SgpConfig, ...] = tuple(
    SgpConfig(*t)
    for t in [
        (5, 3, 6), (5, 3, 7),
        (8, 4, 4), (8, 4, 5), (8, 4, 6), (8, 4, 7), (8, 4, 8), (8, 4, 9), (8, 4, 10),
        (9, 4, 6), (9, 4, 7), (9, 4, 8), (9, 4, 9), (9, 4, 10),
    ]
)

# Published (vars, clauses) regression baselines per encoding.
PUBLISHED_SIZES: dict[str, dict[tuple[int, int, int], tuple[int, int]]] = {
    "de": {
        (5, 3, 6): (1350, 3203055), (5, 3, 7): (1575, 4481085),
        (8, 4, 4): (4096, 48850176), (8, 4, 5): (5120, 81378880),
        (8, 4, 6): (6144, 121896960), (8, 4, 7): (7168, 170815680),
        (8, 4, 8): (8192, 227723776), (8, 4, 9): (9216, 292552704),
        (8, 4, 10): (10240, 365690880), (9, 4, 6): (7776, 196150032),
        (9, 4, 7): (9072, 274564584), (9, 4, 8): (10368, 366042816),
        (9, 4, 9): (11664, 470584728), (9, 4, 10): (12960, 588190320),
    },
    "tme": {
        (5, 3, 6): (1800, 60255), (5, 3, 7): (2100, 79485),
        (8, 4, 4): (5120, 322816), (8, 4, 5): (6400, 482880),
        (8, 4, 6): (7680, 674688), (8, 4, 7): (8960, 898240),
        (8, 4, 8): (10240, 1153536), (8, 4, 9): (11520, 1440576),
        (8, 4, 10): (12800, 1759360), (9, 4, 6): (9720, 1047762),
        (9, 4, 7): (11340, 1400994), (9, 4, 8): (12960, 1805256),
        (9, 4, 9): (14580, 2260548), (9, 4, 10): (16200, 2766870),
    },
    "tme_sb": {
        (5, 3, 6): (1800, 70935), (5, 3, 7): (2100, 91965),
        (8, 4, 4): (5120, 389872), (8, 4, 5): (6400, 566832),
        (8, 4, 6): (7680, 775536), (8, 4, 7): (8960, 1015984),
        (8, 4, 8): (10240, 1288176), (8, 4, 9): (11520, 1592112),
        (8, 4, 10): (12800, 1927792), (9, 4, 6): (9720, 1190952),
        (9, 4, 7): (11340, 1568160), (9, 4, 8): (12960, 1996398),
        (9, 4, 9): (14580, 2260548), (9, 4, 10): (16200, 3005964),
    },
    "sce": {
        (5, 3, 6): (8625, 50400), (5, 3, 7): (11110, 67985),
        (8, 4, 4): (24224, 234912), (8, 4, 5): (34752, 372992),
        (8, 4, 6): (47072, 542816), (8, 4, 7): (61184, 744384),
        (8, 4, 8): (77088, 977696), (8, 4, 9): (94784, 1242752),
        (8, 4, 10): (114272, 1539552), (9, 4, 6): (117324, 858366),
        (9, 4, 7): (157284, 1180026), (9, 4, 8): (203076, 1552716),
        (9, 4, 9): (254700, 1976436), (9, 4, 10): (312156, 2451186),
    },
    "sce_up": {
        (5, 3, 6): (1410, 43905), (5, 3, 7): (1645, 60410),
        (8, 4, 4): (3840, 204928), (8, 4, 5): (4800, 335520),
        (8, 4, 6): (5760, 497856), (8, 4, 7): (6720, 691936),
        (8, 4, 8): (7680, 917760), (8, 4, 9): (8640, 1175328),
        (8, 4, 10): (9600, 1464640), (9, 4, 6): (7344, 792882),
        (9, 4, 7): (8568, 1103634), (9, 4, 8): (9792, 1465416),
        (9, 4, 9): (11016, 1878228), (9, 4, 10): (12240, 2342070),
    },
    "sce_sbm": {
        (5, 3, 6): (5702, 21487), (5, 3, 7): (7734, 30243),
        (8, 4, 4): (14192, 95712), (8, 4, 5): (22476, 173180),
        (8, 4, 6): (32552, 273440), (8, 4, 7): (44420, 396492),
        (8, 4, 8): (58080, 542336), (8, 4, 9): (73532, 710972),
        (8, 4, 10): (90776, 902400), (9, 4, 6): (46344, 447832),
        (9, 4, 7): (63368, 652344), (9, 4, 8): (82984, 895176),
        (9, 4, 9): (105192, 1176328), (9, 4, 10): (129992, 1495800),
    },
    "sce_sbc": {
        (5, 3, 6): (8625, 50430), (5, 3, 7): (11110, 68018),
        (8, 4, 4): (24224, 234956), (8, 4, 5): (34752, 373040),
        (8, 4, 6): (47072, 542868), (8, 4, 7): (61184, 744440),
        (8, 4, 8): (77088, 977756), (8, 4, 9): (94784, 1242816),
        (8, 4, 10): (114272, 1539620), (9, 4, 6): (117324, 858422),
        (9, 4, 7): (157284, 1180086), (9, 4, 8): (203076, 1552780),
        (9, 4, 9): (254700, 1976504), (9, 4, 10): (312156, 2451258),
    },
}

# Published clause cells that fall short of the family sums.  Each gap
# equals the total of the families the cell omits: the three direct
# cells miss families f1..f5, the one ordering cell misses f14..f16.
PUBLISHED_CLAUSE_GAPS: dict[tuple[str, tuple[int, int, int]], int] = {
    ("de", (8, 4, 6)): 137088,
    ("de", (8, 4, 9)): 205632,
    ("de", (8, 4, 10)): 228480,
    ("tme_sb", (9, 4, 9)): 215118,
}


def expected_counts(kind: str, config: SgpConfig) -> tuple[int, int]:
    """Regression expectation: the published cell, plus the documented
    gap where the published cell omits families."""
    variables, clauses = PUBLISHED_SIZES[kind][(config.g, config.p, config.w)]
    clauses += PUBLISHED_CLAUSE_GAPS.get((kind, (config.g, config.p, config.w)), 0)
    return variables, clauses


# --- set-constraint models ----------------------------------------------------


def _player_labels(config: SgpConfig) -> list[str]:
    return [f"p{i}" for i in range(1, config.q + 1)]


def _group_name(week: int, group: int) -> str:
    return f"G_{week}_{group}"


def _add_weekly_cover(model: ProblemModel, names: list[str], result: str) -> None:
    if len(names) == 1:
        model.add_constraint(Equal(names[0], result))
    elif len(names) == 2:
        model.add_constraint(Union(names[0], names[1], result))
    else:
        model.add_constraint(MultiUnion(tuple(names), result))


def build_sce_model(
    config: SgpConfig, socialization: str = "implication", slot_pairs: str = "all"
) -> ProblemModel:
    """Groups as sets over the full player universe.

    Constraints: every group has p players; every week's groups cover
    all players (the cover target is a constant full set, so the union
    rule degenerates to one at-least-one clause per player per week);
    and socialization between group slots of different weeks.  The
    implication form emits share-at-most-one constraints per slot pair;
    the cardinality form materializes each slot-pair intersection and
    bounds it instead.

    slot_pairs picks the quantification: "all" covers every pair of
    slots from distinct weeks and is the sound default; "asymmetric"
    restricts to pairs where the later week's group index is >= the
    earlier one's, which shrinks the instance but leaves pair meetings
    in the uncovered slot combinations unconstrained (satisfying
    assignments may then decode to schedules that fail verification).
    """
    universe = Universe(_player_labels(config))
    model = ProblemModel(universe)
    everyone = tuple(range(config.q))
    for i in range(1, config.w + 1):
        for j in range(1, config.g + 1):
            model.add_set(SetVariable(_group_name(i, j), everyone))
    model.add_set(SetVariable("P", everyone))
    if slot_pairs not in ("all", "asymmetric"):
        raise ValueError(f"unknown slot_pairs mode {slot_pairs!r}")
    pairs = [
        (w1, g1, w2, g2)
        for w1 in range(2, config.w + 1)
        for w2 in range(1, w1)
        for g1 in range(1, config.g + 1)
        for g2 in range(1, (config.g if slot_pairs == "all" else g1) + 1)
        if (w1, g1) != (w2, g2)
    ]
    if socialization == "cardinality":
        for w1, g1, w2, g2 in pairs:
            model.add_set(SetVariable(f"I_{w1}_{g1}_{w2}_{g2}", everyone))

    model.add_constraint(ConstantAssign("P", everyone))
    for i in range(1, config.w + 1):
        for j in range(1, config.g + 1):
            model.add_constraint(CardinalityEq(_group_name(i, j), config.p))
    for i in range(1, config.w + 1):
        names = [_group_name(i, j) for j in range(1, config.g + 1)]
        _add_weekly_cover(model, names, "P")
    if socialization == "implication":
        for w1, g1, w2, g2 in pairs:
            model.add_constraint(ShareAtMost(_group_name(w1, g1), _group_name(w2, g2), 1))
    else:
        for w1, g1, w2, g2 in pairs:
            inter = f"I_{w1}_{g1}_{w2}_{g2}"
            model.add_constraint(
                Intersection(_group_name(w1, g1), _group_name(w2, g2), inter)
            )
            model.add_constraint(CardinalityAtMost(inter, 1))
    return model


def apply_sbc(model: ProblemModel, config: SgpConfig) -> ProblemModel:
    """Add the symmetry-breaking membership constraints: week one is
    filled block-wise (players 1..p into group 1 and so on), and in
    every later week player j plays in group j.  All of them encode to
    unit clauses (q + (w-1)*min(p, g) of them) that vanish under unit
    propagation."""
    out = ProblemModel(model.universe)
    for sv in model.sets.values():
        out.add_set(sv)
    out.constraints = list(model.constraints)
    for i in range(1, config.q + 1):
        group = (i + config.p - 1) // config.p
        out.add_constraint(Member(i - 1, _group_name(1, group), True))
    for i in range(2, config.w + 1):
        for j in range(1, min(config.p, config.g) + 1):
            out.add_constraint(Member(j - 1, _group_name(i, j), True))
    return out


def build_sbm_model(config: SgpConfig) -> ProblemModel:
    """Symmetry breaking by reshaping the model itself.

    Week-one groups keep only their own p players as support and are
    fixed outright; the first min(p, g) players are spread over the
    diagonal of every later week, so later groups live on the reduced
    player set and the diagonal groups need one player fewer.  The
    socialization families distinguish equally-numbered early groups
    (which must be disjoint, sharing their fixed player), week-one
    groups against later ones, and the remaining group pairs.  For
    g < p the first week-one group joins the share constraints, which
    makes the instance unsatisfiable immediately, as it must be.
    """
    g, p, w, q = config.g, config.p, config.w, config.q
    m = min(p, g)
    universe = Universe(_player_labels(config))
    model = ProblemModel(universe)
    week1_support = {
        i: tuple(range((i - 1) * p, i * p)) for i in range(1, g + 1)
    }
    rest = tuple(range(m, q))
    for i in range(1, g + 1):
        model.add_set(SetVariable(_group_name(1, i), week1_support[i]))
    for i in range(2, w + 1):
        for j in range(1, g + 1):
            model.add_set(SetVariable(_group_name(i, j), rest))
    model.add_set(SetVariable("P2", rest))

    for i in range(1, g + 1):
        model.add_constraint(ConstantAssign(_group_name(1, i), week1_support[i]))
    model.add_constraint(ConstantAssign("P2", rest))
    for i in range(1, g + 1):
        model.add_constraint(CardinalityEq(_group_name(1, i), p))
    for j in range(2, w + 1):
        for i in range(1, m + 1):
            model.add_constraint(CardinalityEq(_group_name(j, i), p - 1))
    for j in range(2, w + 1):
        for i in range(m + 1, g + 1):
            model.add_constraint(CardinalityEq(_group_name(j, i), p))
    for j in range(2, w + 1):
        names = [_group_name(j, i) for i in range(1, g + 1)]
        _add_weekly_cover(model, names, "P2")
    # equally-numbered diagonal groups share a fixed player: disjoint
    for w1 in range(3, w + 1):
        for w2 in range(2, w1):
            for g1 in range(1, m + 1):
                model.add_constraint(
                    EmptyIntersection((_group_name(w1, g1), _group_name(w2, g1)))
                )
    # week-one groups against all later slots
    first = 1 if g < p else 2
    for g1 in range(first, g + 1):
        for w1 in range(2, w + 1):
            for g2 in range(1, g + 1):
                model.add_constraint(
                    ShareAtMost(_group_name(1, g1), _group_name(w1, g2), 1)
                )
    # equally-numbered late groups beyond the diagonal
    for w1 in range(3, w + 1):
        for w2 in range(2, w1):
            for g1 in range(m + 1, g + 1):
                model.add_constraint(
                    ShareAtMost(_group_name(w1, g1), _group_name(w2, g1), 1)
                )
    # differently-numbered groups of later weeks, both orders
    for w1 in range(3, w + 1):
        for w2 in range(2, w1):
            for g1 in range(1, g + 1):
                for g2 in range(1, g + 1):
                    if g1 != g2:
                        model.add_constraint(
                            ShareAtMost(_group_name(w1, g1), _group_name(w2, g2), 1)
                        )
    return model


def build_sgp_model(
    config: SgpConfig, variant: SgpVariant, slot_pairs: str = "all"
) -> ProblemModel:
    if variant.encoding != "sce":
        raise ValueError("only the sce family is model-based")
    if variant.symmetry == "sbm":
        return build_sbm_model(config)
    model = build_sce_model(config, variant.socialization, slot_pairs)
    if variant.symmetry == "sbc":
        model = apply_sbc(model, config)
    return model


# --- decoding and verification -------------------------------------------------


def verify_schedule(config: SgpConfig, schedule: Schedule) -> list[str]:
    """Independent checker: weekly partitions of the right shape, and no
    player pair sharing a group twice.  Returns violations, empty when
    the schedule is valid."""
    g, p, w, q = config.g, config.p, config.w, config.q
    violations = []
    if len(schedule) != w:
        violations.append(f"expected {w} weeks, got {len(schedule)}")
    seen_pairs: dict[tuple[int, int], tuple[int, int]] = {}
    for wi, week in enumerate(schedule, start=1):
        if len(week) != g:
            violations.append(f"week {wi}: expected {g} groups, got {len(week)}")
        covered: list[int] = []
        for gi, group in enumerate(week, start=1):
            if len(group) != p:
                violations.append(
                    f"week {wi} group {gi}: group size {len(group)}, expected {p}"
                )
            covered.extend(group)
            for a_i in range(len(group)):
                for b_i in range(a_i + 1, len(group)):
                    pair = tuple(sorted((group[a_i], group[b_i])))
                    if pair in seen_pairs:
                        pw, pg = seen_pairs[pair]
                        violations.append(
                            f"pair {pair} meets twice: week {pw} group {pg} "
                            f"and week {wi} group {gi}"
                        )
                    else:
                        seen_pairs[pair] = (wi, gi)
        if sorted(covered) != list(range(1, q + 1)):
            violations.append(f"week {wi}: groups do not partition players 1..{q}")
    return violations


class ScheduleDecoder:
    """Decoder with the variable meanings precomputed once, for runs
    that decode many assignments of the same instance."""

    def __init__(
        self,
        config: SgpConfig,
        variant: SgpVariant,
        origins: Mapping[int, Origin] | CnfFormula,
    ):
        if isinstance(origins, CnfFormula):
            origins = {v: origins.origin(v) for v in range(1, origins.num_vars + 1)}
        self.config = config
        self.variant = variant
        self.positional = variant.encoding in ("de", "tme")
        # (var, player, week, group) for the variables that place players
        self.placements: list[tuple[int, int, int, int]] = []
        if self.positional:
            for var, origin in origins.items():
                if origin[0] == "pos":
                    _, q_, _p_, g_, w_ = origin
                    self.placements.append((var, q_, w_, g_))
        else:
            group_re = re.compile(r"G_(\d+)_(\d+)$")
            for var, origin in origins.items():
                if origin[0] != "sv":
                    continue
                m_ = group_re.match(str(origin[1]))
                if not m_:
                    continue
                self.placements.append(
                    (var, int(str(origin[2])[1:]), int(m_.group(1)), int(m_.group(2)))
                )

    def decode(self, model) -> Schedule:
        """Rebuild the schedule a satisfying assignment describes.

        ``model`` maps variable to truth (dict, or list indexed by
        variable).  A player placed twice in one week, a wrong group
        size, or a non-partition week raises DecodeError; socialization
        is verify_schedule's business.
        """
        cfg = self.config
        g, p, w, q = cfg.g, cfg.p, cfg.w, cfg.q
        getter = model.get if isinstance(model, dict) else lambda v: model[v]
        groups: dict[tuple[int, int], list[int]] = {
            (wi, gi): [] for wi in range(1, w + 1) for gi in range(1, g + 1)
        }
        seen_weeks: set[tuple[int, int]] = set()
        for var, player, wi, gi in self.placements:
            if not getter(var):
                continue
            if self.positional:
                key = (player, wi)
                if key in seen_weeks:
                    raise DecodeError(f"player {player} holds two positions in week {wi}")
                seen_weeks.add(key)
            groups[(wi, gi)].append(player)
        if self.variant.symmetry == "sbm":
            for wi in range(2, w + 1):
                for j in range(1, min(p, g) + 1):
                    groups[(wi, j)].append(j)
        schedule: list[tuple[tuple[int, ...], ...]] = []
        for wi in range(1, w + 1):
            week = tuple(tuple(sorted(groups[(wi, gi)])) for gi in range(1, g + 1))
            for gi, grp in enumerate(week, start=1):
                if len(grp) != p:
                    raise DecodeError(
                        f"week {wi} group {gi}: decoded size {len(grp)}, expected {p}"
                    )
            flat = sorted(x for grp in week for x in grp)
            if flat != list(range(1, q + 1)):
                raise DecodeError(f"week {wi}: decoded groups do not partition players")
            schedule.append(week)
        return tuple(schedule)


def decode_schedule(
    config: SgpConfig,
    variant: SgpVariant,
    model,
    origins: Mapping[int, Origin] | CnfFormula,
) -> Schedule:
    """One-shot decode; see ScheduleDecoder for repeated use."""
    return ScheduleDecoder(config, variant, origins).decode(model)


def canonical_schedule(schedule: Schedule) -> Schedule:
    """Collapse within-group order and group numbering (weeks stay put)."""
    return tuple(tuple(sorted(tuple(sorted(g)) for g in week)) for week in schedule)


def format_schedule(schedule: Schedule) -> str:
    lines = []
    for wi, week in enumerate(schedule, start=1):
        groups = "  ".join("{" + " ".join(str(x) for x in grp) + "}" for grp in week)
        lines.append(f"week {wi}: {groups}")
    return "\n".join(lines)
