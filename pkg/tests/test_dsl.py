import random

import pytest

from setcnf import sgp
from setcnf.dsl import ParseError, SemanticError, format_model, parse_model
from setcnf.model import (
    CardinalityAtMost,
    CardinalityEq,
    ConstantAssign,
    Difference,
    EmptyIntersection,
    Equal,
    Intersection,
    Member,
    MultiIntersection,
    MultiUnion,
    ShareAtMost,
    Subset,
    Union,
)


def test_parse_member_constraint():
    m = parse_model("universe a b c; set F support {a b}; constraint a in F;")
    assert len(m.sets) == 1
    assert m.constraints == [Member(0, "F", True)]


def test_parse_notin_and_inequality():
    m = parse_model(
        "universe a b; set F support {a}; set G support {b};"
        "constraint b notin F; constraint F != G;"
    )
    assert m.constraints == [Member(1, "F", False), Equal("F", "G", False)]


def test_parse_cardinality():
    m = parse_model("universe a b c; set F support {a b c}; constraint card F == 2;")
    assert m.constraints == [CardinalityEq("F", 2)]
    m = parse_model("universe a b c; set F support {a b c}; constraint card F <= 1;")
    assert m.constraints == [CardinalityAtMost("F", 1)]


def test_parse_union_and_multi():
    text = (
        "universe a b; set F support {a}; set G support {b}; set H support {a b};"
        "constraint union(F, G) == H;"
    )
    assert parse_model(text).constraints == [Union("F", "G", "H")]
    text = (
        "universe a; set F support {a}; set G support {a}; set I support {a};"
        "set H support {a}; constraint union(F, G, I) == H;"
    )
    assert parse_model(text).constraints == [MultiUnion(("F", "G", "I"), "H")]


def test_parse_intersection_forms():
    base = "universe a; set F support {a}; set G support {a}; set H support {a};"
    assert parse_model(base + "constraint inter(F, G) == H;").constraints == [
        Intersection("F", "G", "H")
    ]
    assert parse_model(base + "constraint inter(F, G) == {};").constraints == [
        EmptyIntersection(("F", "G"))
    ]
    assert parse_model(base + "constraint inter(F, G, H) == {};").constraints == [
        EmptyIntersection(("F", "G", "H"))
    ]
    assert parse_model(base + "constraint inter(F, G, H) == H;").constraints == [
        MultiIntersection(("F", "G", "H"), "H")
    ]


def test_parse_subset_diff_assign_common():
    base = "universe a b; set F support {a b}; set G support {a}; set H support {b};"
    m = parse_model(
        base
        + "constraint F subset G; constraint diff(F, G) == H;"
        + "constraint F == {a}; constraint common(F, G) <= 1;"
    )
    assert m.constraints == [
        Subset("F", "G"),
        Difference("F", "G", "H"),
        ConstantAssign("F", (0,)),
        ShareAtMost("F", "G", 1),
    ]


def test_comments_and_whitespace():
    m = parse_model(
        "# header\nuniverse a b;  # trailing\n\n   set F support { a };\nconstraint a in F;"
    )
    assert m.constraints == [Member(0, "F", True)]


@pytest.mark.parametrize(
    "text",
    [
        "universe a b; set F support {a}; constraint F;",
        "universe a; set F support {a} constraint a in F;",
        "universe a; set F support {a}; constraint union(F) == F;",
        "universe a; set F support {a}; constraint union(F, F) == {};",
        "universe a; set F support {a}; constraint card F = 2;",
        "universe a; set set support {a};",
        "universe a; @",
    ],
)
def test_syntax_errors_carry_spans(text):
    with pytest.raises(ParseError) as exc:
        parse_model(text)
    span = exc.value.span
    assert 0 <= span.start <= span.end <= len(text)
    assert span.line >= 1 and span.column >= 1


@pytest.mark.parametrize(
    "text,needle",
    [
        ("universe a; constraint a in H;", "unknown set H"),
        ("universe a; set F support {z};", "element z not in universe"),
        ("universe a; set F support {a}; set F support {};", "duplicate set name"),
        ("universe a a; set F support {a};", "duplicate universe element"),
        ("set F support {a};", "no universe"),
        ("universe a; set F support {}; constraint F == {a};", "outside support"),
        ("universe a; set F support {a}; constraint z in F;", "not in universe"),
    ],
)
def test_semantic_errors(text, needle):
    with pytest.raises(SemanticError) as exc:
        parse_model(text)
    assert any(needle in v for v in exc.value.report.violations)


def test_format_empty_constraint_model():
    m = parse_model("universe a b; set F support {a};")
    text = format_model(m)
    assert text == "universe a b;\nset F support {a};\n"


def test_format_sorts_sets_by_name():
    m = parse_model("universe a; set Z support {a}; set A support {a};")
    text = format_model(m)
    assert text.index("set A") < text.index("set Z")
    assert parse_model(text) == m


def test_round_trip_handwritten():
    text = (
        "universe a b c d;\n"
        "set F support {a b c};\nset G support {b d};\nset H support {a d};\n"
        "constraint a in F;\nconstraint d notin G;\nconstraint F == G;\n"
        "constraint F != H;\nconstraint inter(F, G) == H;\n"
        "constraint inter(F, G, H) == {};\nconstraint union(F, G) == H;\n"
        "constraint union(F, G, H) == F;\nconstraint F subset G;\n"
        "constraint diff(F, G) == H;\nconstraint card F == 2;\n"
        "constraint card G <= 1;\nconstraint F == {a c};\n"
        "constraint common(F, H) <= 1;\n"
    )
    m = parse_model(text)
    assert parse_model(format_model(m)) == m


def _random_model_text(rng: random.Random) -> str:
    size = rng.randint(1, 5)
    labels = [f"e{i}" for i in range(size)]
    names = ["F", "G", "H", "K"][: rng.randint(2, 4)]
    lines = ["universe " + " ".join(labels) + ";"]
    supports = {}
    for name in names:
        sup = sorted(rng.sample(labels, rng.randint(0, size)))
        supports[name] = sup
        lines.append(f"set {name} support {{{' '.join(sup)}}};")
    for _ in range(rng.randint(0, 6)):
        kind = rng.choice(["in", "eq", "card", "union", "subset", "common", "assign"])
        a, b = rng.choice(names), rng.choice(names)
        if kind == "in":
            lines.append(f"constraint {rng.choice(labels)} in {a};")
        elif kind == "eq":
            lines.append(f"constraint {a} {rng.choice(['==', '!='])} {b};")
        elif kind == "card":
            lines.append(f"constraint card {a} <= {rng.randint(0, 3)};")
        elif kind == "union" and len(names) >= 3:
            ops = rng.sample(names, rng.randint(2, len(names)))
            lines.append(f"constraint union({', '.join(ops)}) == {a};")
        elif kind == "subset":
            lines.append(f"constraint {a} subset {b};")
        elif kind == "common":
            lines.append(f"constraint common({a}, {b}) <= 1;")
        else:
            chosen = sorted(rng.sample(supports[a], rng.randint(0, len(supports[a]))))
            lines.append(f"constraint {a} == {{{' '.join(chosen)}}};")
    return "\n".join(lines)


def test_round_trip_random_models():
    rng = random.Random(2024)
    for _ in range(200):
        model = parse_model(_random_model_text(rng))
        assert parse_model(format_model(model)) == model


def test_round_trip_generated_sgp_models():
    configs = [sgp.SgpConfig(3, 2, 2), sgp.SgpConfig(4, 2, 3), sgp.SgpConfig(2, 2, 4)]
    variants = [
        sgp.SgpVariant("sce"),
        sgp.SgpVariant("sce", "sbc"),
        sgp.SgpVariant("sce", "sbm"),
        sgp.SgpVariant("sce", socialization="cardinality"),
    ]
    for config in configs:
        for variant in variants:
            model = sgp.build_sgp_model(config, variant)
            assert parse_model(format_model(model)) == model
