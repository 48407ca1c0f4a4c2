"""Domain model for finite-set constraint problems.

A problem is a universe of labelled elements, a family of set variables
(each drawing its members from an ordered *support*, a subset of the
universe), and a list of constraints over those sets.  Elements are
interned to integer indices at universe construction; everything past
this module works on indices so that clause generation over large
products never touches strings.

Models are immutable once validated and safe to share between
concurrent encoding jobs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence


class ModelError(Exception):
    """Raised for structurally invalid models or unresolvable names."""


@dataclass(frozen=True)
class ElementId:
    """A universe element: position within the universe plus display label."""

    index: int
    label: str


class Universe:
    """Ordered, duplicate-free collection of element labels."""

    __slots__ = ("elements", "_by_label")

    def __init__(self, labels: Iterable[str]):
        labels = list(labels)
        if not labels:
            raise ModelError("universe must not be empty")
        self.elements: tuple[ElementId, ...] = tuple(
            ElementId(i, lab) for i, lab in enumerate(labels)
        )
        self._by_label: dict[str, int] = {}
        for e in self.elements:
            if e.label in self._by_label:
                raise ModelError(f"duplicate universe element {e.label!r}")
            self._by_label[e.label] = e.index

    def __len__(self) -> int:
        return len(self.elements)

    def __eq__(self, other) -> bool:
        return isinstance(other, Universe) and self.labels() == other.labels()

    def __hash__(self):
        return hash(self.labels())

    def labels(self) -> tuple[str, ...]:
        return tuple(e.label for e in self.elements)

    def label_of(self, index: int) -> str:
        return self.elements[index].label

    def index_of(self, label: str) -> int:
        try:
            return self._by_label[label]
        except KeyError:
            raise ModelError(f"element {label!r} not in universe") from None

    def __contains__(self, label: str) -> bool:
        return label in self._by_label


@dataclass(frozen=True)
class SetVariable:
    """A named set variable over an ordered support of universe indices.

    The support is canonicalized on construction: sorted by universe
    index with duplicates removed, so any insertion order yields the
    same stored sequence.
    """

    name: str
    support: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(sorted(set(self.support))))

    @classmethod
    def from_labels(cls, name: str, labels: Iterable[str], universe: Universe) -> "SetVariable":
        return cls(name, tuple(universe.index_of(lab) for lab in labels))


# --- Constraint forms ------------------------------------------------------
#
# Every constraint names declared sets only; nested set expressions are not
# representable (each intermediate result must live in its own set).

@dataclass(frozen=True)
class Member:
    """element in set (positive=True) / element not in set (positive=False)."""
    element: int
    set_name: str
    positive: bool = True


@dataclass(frozen=True)
class Equal:
    """left == right (positive=True) / left != right (positive=False)."""
    left: str
    right: str
    positive: bool = True


@dataclass(frozen=True)
class Intersection:
    """left ∩ right == result."""
    left: str
    right: str
    result: str


@dataclass(frozen=True)
class EmptyIntersection:
    """∩ sets == {} (two or more operands)."""
    sets: tuple[str, ...]


@dataclass(frozen=True)
class Union:
    """left ∪ right == result."""
    left: str
    right: str
    result: str


@dataclass(frozen=True)
class Subset:
    """left ⊆ right."""
    left: str
    right: str


@dataclass(frozen=True)
class Difference:
    """left \\ right == result."""
    left: str
    right: str
    result: str


@dataclass(frozen=True)
class MultiUnion:
    """∪ sets == result (two or more operands)."""
    sets: tuple[str, ...]
    result: str


@dataclass(frozen=True)
class MultiIntersection:
    """∩ sets == result (two or more operands)."""
    sets: tuple[str, ...]
    result: str


@dataclass(frozen=True)
class CardinalityEq:
    """|set| == k.  k > |support| is legal input; it encodes to UNSAT."""
    set_name: str
    k: int


@dataclass(frozen=True)
class CardinalityAtMost:
    """|set| <= k."""
    set_name: str
    k: int


@dataclass(frozen=True)
class ConstantAssign:
    """set == explicit subset of its support (element indices)."""
    set_name: str
    elements: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(sorted(set(self.elements))))


@dataclass(frozen=True)
class ShareAtMost:
    """|left ∩ right| <= bound, emitted directly over membership pairs.

    No intermediate intersection set is introduced; the constraint is
    clausified pairwise (bound=1 forbids any two elements from sitting
    in both sets at once).
    """
    left: str
    right: str
    bound: int = 1


Constraint = (
    Member | Equal | Intersection | EmptyIntersection | Union | Subset
    | Difference | MultiUnion | MultiIntersection | CardinalityEq
    | CardinalityAtMost | ConstantAssign | ShareAtMost
)


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, message: str) -> None:
        self.violations.append(message)


class ProblemModel:
    """Universe + named set variables + constraint sequence.

    Set declarations keep insertion order (it fixes variable allocation
    order during encoding); equality is structural so that two models
    built from the same source text compare equal.
    """

    def __init__(self, universe: Universe):
        self.universe = universe
        self.sets: dict[str, SetVariable] = {}
        self.constraints: list[Constraint] = []
        self._duplicate_names: list[str] = []

    def add_set(self, sv: SetVariable) -> None:
        if sv.name in self.sets:
            self._duplicate_names.append(sv.name)
            return
        self.sets[sv.name] = sv

    def add_constraint(self, con: Constraint) -> None:
        self.constraints.append(con)

    def support_of(self, name: str) -> tuple[int, ...]:
        return self.sets[name].support

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ProblemModel)
            and self.universe == other.universe
            and self.sets == other.sets
            and self.constraints == other.constraints
        )

    def _set_refs(self, con: Constraint) -> tuple[str, ...]:
        if isinstance(con, Member):
            return (con.set_name,)
        if isinstance(con, (Equal, Subset)):
            return (con.left, con.right)
        if isinstance(con, (Intersection, Union, Difference)):
            return (con.left, con.right, con.result)
        if isinstance(con, EmptyIntersection):
            return con.sets
        if isinstance(con, (MultiUnion, MultiIntersection)):
            return con.sets + (con.result,)
        if isinstance(con, (CardinalityEq, CardinalityAtMost, ConstantAssign)):
            return (con.set_name,)
        if isinstance(con, ShareAtMost):
            return (con.left, con.right)
        raise ModelError(f"unknown constraint form {con!r}")

    def validate(self) -> ValidationReport:
        """Check referential integrity; violations are reported, not raised."""
        report = ValidationReport()
        n = len(self.universe)
        for name in self._duplicate_names:
            report.add(f"duplicate set name {name}")
        for sv in self.sets.values():
            for idx in sv.support:
                if not 0 <= idx < n:
                    report.add(f"set {sv.name}: element index {idx} not in universe")
        for i, con in enumerate(self.constraints):
            where = f"constraint {i + 1}"
            for ref in self._set_refs(con):
                if ref not in self.sets:
                    report.add(f"{where}: unknown set {ref}")
            if isinstance(con, Member) and not 0 <= con.element < n:
                report.add(f"{where}: element index {con.element} not in universe")
            if isinstance(con, (CardinalityEq, CardinalityAtMost, ShareAtMost)):
                k = con.k if not isinstance(con, ShareAtMost) else con.bound
                if k < 0:
                    report.add(f"{where}: negative bound {k}")
            if isinstance(con, (EmptyIntersection, MultiUnion, MultiIntersection)):
                if len(con.sets) < 2:
                    report.add(f"{where}: needs at least two operand sets")
            if isinstance(con, ConstantAssign) and con.set_name in self.sets:
                support = set(self.sets[con.set_name].support)
                for idx in con.elements:
                    if idx not in support:
                        report.add(
                            f"{where}: element index {idx} outside support of {con.set_name}"
                        )
        return report
