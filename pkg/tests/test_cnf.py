import io

import numpy as np
import pytest

from setcnf.cnf import CnfError, CnfFormula, dimacs_text, parse_dimacs, read_varmap
from setcnf.dsl import parse_model
from setcnf.encoder import encode_model


def fresh(n=0):
    f = CnfFormula()
    for i in range(n):
        f.new_var(("sv", "F", f"x{i}"))
    return f


def test_support_var_idempotent_and_distinct():
    f = CnfFormula()
    f.register_set("F", (0, 1), ["a", "b"])
    assert f.support_var("F", 0) == f.support_var("F", 0) == 1
    assert f.support_var("F", 1) == 2


def test_support_var_outside_support_errors():
    f = CnfFormula()
    f.register_set("F", (0, 1), ["a", "b"])
    with pytest.raises(CnfError):
        f.support_var("F", 5)


def test_emit_dimacs_tail():
    f = fresh(2)
    f.add_clause([1, -2])
    out = dimacs_text(f)
    assert out.endswith(b"p cnf 2 1\n1 -2 0\n")
    assert out.startswith(b"c var 1 = sv F x0\n")


def test_emit_empty_formula():
    assert dimacs_text(CnfFormula()) == b"p cnf 0 0\n"


def test_emit_false_marker():
    f = fresh(1)
    f.add_clause([1])
    f.add_empty_clause()
    lines = dimacs_text(f).decode().splitlines()
    assert "0" in lines
    assert lines[-2:] == ["1 0", "0"]
    assert f.has_empty_clause


def test_mixed_width_emission_round_trips():
    f = fresh(4)
    f.add_clause([1, 2, 3, 4])
    f.add_empty_clause()
    f.add_clause([-3])
    f.add_clause([2, -4])
    nv, clauses = parse_dimacs(dimacs_text(f).decode())
    assert nv == 4
    assert clauses == [(1, 2, 3, 4), (), (-3,), (2, -4)]


def test_duplicate_and_tautology_rejected():
    f = fresh(2)
    with pytest.raises(CnfError):
        f.add_clause([1, 1])
    with pytest.raises(CnfError):
        f.add_clause([1, -1])
    with pytest.raises(CnfError):
        f.add_clause([3])
    with pytest.raises(CnfError):
        f.add_clause([0])


def test_bulk_block_checks():
    f = fresh(3)
    f.add_clauses_block(np.array([[1, -2], [2, 3]], dtype=np.int32))
    assert f.num_clauses == 2
    with pytest.raises(CnfError):
        f.add_clauses_block(np.array([[1, -1]], dtype=np.int32))
    with pytest.raises(CnfError):
        f.add_clauses_block(np.array([[1, 4]], dtype=np.int32))


def test_stats_histogram_and_spans():
    f = fresh(4)
    f.begin_constraint("first")
    f.add_clause([1])
    f.add_clause([1, 2])
    f.begin_constraint("second")
    f.add_clause([1, 2, 3])
    f.add_clause([1, 2, 3, 4])
    f.add_empty_clause()
    stats = f.stats()
    assert stats.variables == 4 and stats.clauses == 5
    assert stats.histogram == {"unit": 1, "binary": 1, "ternary": 1, "other": 2}
    assert sum(stats.histogram.values()) == stats.clauses
    assert stats.per_constraint == [("first", 2), ("second", 3)]


def test_deterministic_bytes_for_same_model():
    text = (
        "universe a b c; set F support {a b}; set G support {b c};"
        "constraint union(F, G) == G; constraint card F == 1;"
    )
    one = dimacs_text(encode_model(parse_model(text)))
    two = dimacs_text(encode_model(parse_model(text)))
    assert one == two


def test_varmap_round_trip(tmp_path):
    f = fresh(2)
    f.new_var(("tot", 3, 1, 2))
    path = tmp_path / "x.varmap"
    f.write_varmap(path)
    origins = read_varmap(path)
    assert origins[1] == ("sv", "F", "x0")
    assert origins[3] == ("tot", 3, 1, 2)


def test_parse_dimacs_errors():
    with pytest.raises(CnfError):
        parse_dimacs("1 2 0\n")  # missing header
    with pytest.raises(CnfError):
        parse_dimacs("p cnf 2 1\n1 2\n")  # unterminated clause
    nv, clauses = parse_dimacs("c hi\np cnf 3 2\n1 -3 0 2 0\n")
    assert nv == 3 and clauses == [(1, -3), (2,)]
