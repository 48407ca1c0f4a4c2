import pytest

from setcnf.model import (
    CardinalityEq,
    ConstantAssign,
    Member,
    ModelError,
    ProblemModel,
    SetVariable,
    ShareAtMost,
    Subset,
    Universe,
)


def test_universe_interns_labels():
    u = Universe(["a", "b", "c"])
    assert len(u) == 3
    assert u.index_of("b") == 1
    assert u.label_of(2) == "c"
    assert "a" in u and "z" not in u


def test_universe_rejects_duplicates_and_empty():
    with pytest.raises(ModelError):
        Universe(["a", "a"])
    with pytest.raises(ModelError):
        Universe([])


def test_support_canonicalization_insertion_order_invariant():
    a = SetVariable("F", (3, 1, 2))
    b = SetVariable("F", (2, 3, 1, 1))
    assert a.support == (1, 2, 3)
    assert a == b


def test_validate_ok():
    u = Universe(["a", "b"])
    m = ProblemModel(u)
    m.add_set(SetVariable("F", (0, 1)))
    m.add_constraint(Member(0, "F", True))
    assert m.validate().ok


def test_validate_unknown_set():
    u = Universe(["a", "b"])
    m = ProblemModel(u)
    m.add_set(SetVariable("F", (0,)))
    m.add_constraint(Subset("F", "H"))
    report = m.validate()
    assert not report.ok
    assert any("unknown set H" in v for v in report.violations)


def test_validate_element_outside_universe():
    u = Universe(["a", "b"])
    m = ProblemModel(u)
    m.add_set(SetVariable("F", (0, 7)))
    report = m.validate()
    assert any("not in universe" in v for v in report.violations)


def test_validate_duplicate_set_name():
    u = Universe(["a"])
    m = ProblemModel(u)
    m.add_set(SetVariable("F", (0,)))
    m.add_set(SetVariable("F", ()))
    report = m.validate()
    assert any("duplicate set name F" in v for v in report.violations)


def test_validate_constant_assign_outside_support():
    u = Universe(["a", "b", "c"])
    m = ProblemModel(u)
    m.add_set(SetVariable("F", (0, 1)))
    m.add_constraint(ConstantAssign("F", (0, 2)))
    report = m.validate()
    assert any("outside support" in v for v in report.violations)


def test_validate_multi_needs_two_operands():
    from setcnf.model import MultiUnion

    u = Universe(["a"])
    m = ProblemModel(u)
    m.add_set(SetVariable("F", (0,)))
    m.add_constraint(MultiUnion(("F",), "F"))
    assert not m.validate().ok


def test_cardinality_beyond_support_is_legal_input():
    u = Universe(["a", "b"])
    m = ProblemModel(u)
    m.add_set(SetVariable("F", (0, 1)))
    m.add_constraint(CardinalityEq("F", 5))
    assert m.validate().ok  # encodes to UNSAT, but the model is fine


def test_negative_bound_rejected():
    u = Universe(["a"])
    m = ProblemModel(u)
    m.add_set(SetVariable("F", (0,)))
    m.add_constraint(ShareAtMost("F", "F", -1))
    assert not m.validate().ok


def test_structural_equality():
    def build():
        u = Universe(["a", "b"])
        m = ProblemModel(u)
        m.add_set(SetVariable("F", (1, 0)))
        m.add_constraint(Member(1, "F", False))
        return m

    assert build() == build()
