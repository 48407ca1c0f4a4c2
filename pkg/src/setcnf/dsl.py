"""Text front end for the set-constraint language.

Grammar (whitespace-insensitive, ``#`` comments to end of line):

    model      := stmt* ;
    stmt       := "universe" ident+ ";"
                | "set" ident "support" "{" ident* "}" ";"
                | "constraint" constr ";" ;
    constr     := ident "in" ident | ident "notin" ident
                | ident "==" setlit                   constant assignment
                | ident ("==" | "!=") ident           equality / inequality
                | "inter" "(" identlist ")" "==" (ident | "{}")
                | "union" "(" identlist ")" "==" ident
                | ident "subset" ident
                | "diff" "(" ident "," ident ")" "==" ident
                | "card" ident ("==" | "<=") integer
                | "common" "(" ident "," ident ")" "<=" integer ;
    setlit     := "{" ident* "}" ;
    identlist  := ident ("," ident)+ ;

``inter``/``union`` with exactly two operands produce the binary
constraint forms; three or more produce the multi forms.  ``common``
bounds the number of elements two sets may share.  Keywords are
reserved and cannot name sets or elements.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .model import (
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
    ProblemModel,
    SetVariable,
    ShareAtMost,
    Subset,
    Union,
    Universe,
    ValidationReport,
)

KEYWORDS = frozenset(
    "universe set support constraint in notin subset card union inter diff common".split()
)


@dataclass(frozen=True)
class SourceSpan:
    """Position of a token in the source text (1-based line/column)."""

    line: int
    column: int
    start: int
    end: int

    def __str__(self) -> str:
        return f"line {self.line}, column {self.column}"


class ParseError(Exception):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{message} at {span}")
        self.span = span


class SemanticError(Exception):
    def __init__(self, report: ValidationReport):
        super().__init__("; ".join(report.violations))
        self.report = report


@dataclass(frozen=True)
class _Token:
    kind: str  # IDENT, INT, PUNCT, EOF
    value: str
    span: SourceSpan


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<comment>#[^\n]*)|(?P<nl>\n)"
    r"|(?P<punct>==|!=|<=|[;{}(),])"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<int>\d+)"
)


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            span = SourceSpan(line, pos - line_start + 1, pos, pos + 1)
            raise ParseError(f"unexpected character {text[pos]!r}", span)
        kind = m.lastgroup
        span = SourceSpan(line, m.start() - line_start + 1, m.start(), m.end())
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "punct":
            tokens.append(_Token("PUNCT", m.group(), span))
        elif kind == "ident":
            tokens.append(_Token("IDENT", m.group(), span))
        elif kind == "int":
            tokens.append(_Token("INT", m.group(), span))
        pos = m.end()
    eof = SourceSpan(line, len(text) - line_start + 1, len(text), len(text))
    tokens.append(_Token("EOF", "", eof))
    return tokens


class _Parser:
    """Recursive-descent parser producing raw (string-level) statements."""

    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_punct(self, value: str) -> _Token:
        tok = self.peek()
        if tok.kind != "PUNCT" or tok.value != value:
            raise ParseError(f"expected {value!r}, found {tok.value!r}", tok.span)
        return self.advance()

    def expect_ident(self) -> _Token:
        tok = self.peek()
        if tok.kind != "IDENT":
            raise ParseError(f"expected identifier, found {tok.value!r}", tok.span)
        return self.advance()

    def expect_keyword(self, word: str) -> _Token:
        tok = self.peek()
        if tok.kind != "IDENT" or tok.value != word:
            raise ParseError(f"expected {word!r}, found {tok.value!r}", tok.span)
        return self.advance()

    def expect_int(self) -> int:
        tok = self.peek()
        if tok.kind != "INT":
            raise ParseError(f"expected integer, found {tok.value!r}", tok.span)
        self.advance()
        return int(tok.value)

    def name(self) -> tuple[str, SourceSpan]:
        """An identifier that is not a reserved word."""
        tok = self.expect_ident()
        if tok.value in KEYWORDS:
            raise ParseError(f"reserved word {tok.value!r} cannot be used as a name", tok.span)
        return tok.value, tok.span

    def setlit(self) -> list[tuple[str, SourceSpan]]:
        self.expect_punct("{")
        items = []
        while self.peek().kind == "IDENT":
            items.append(self.name())
        self.expect_punct("}")
        return items

    def identlist(self) -> list[tuple[str, SourceSpan]]:
        items = [self.name()]
        while self.peek().value == ",":
            self.advance()
            items.append(self.name())
        if len(items) < 2:
            raise ParseError("expected at least two comma-separated names", self.peek().span)
        return items

    def parse(self) -> list[tuple]:
        stmts = []
        while self.peek().kind != "EOF":
            tok = self.peek()
            if tok.kind != "IDENT":
                raise ParseError(f"expected statement, found {tok.value!r}", tok.span)
            if tok.value == "universe":
                self.advance()
                labels = [self.name()]
                while self.peek().kind == "IDENT":
                    labels.append(self.name())
                self.expect_punct(";")
                stmts.append(("universe", labels, tok.span))
            elif tok.value == "set":
                self.advance()
                name = self.name()
                self.expect_keyword("support")
                support = self.setlit()
                self.expect_punct(";")
                stmts.append(("set", name, support))
            elif tok.value == "constraint":
                self.advance()
                con = self.constr()
                self.expect_punct(";")
                stmts.append(("constraint", con))
            else:
                raise ParseError(
                    f"expected 'universe', 'set' or 'constraint', found {tok.value!r}",
                    tok.span,
                )
        return stmts

    def constr(self) -> tuple:
        tok = self.peek()
        if tok.kind != "IDENT":
            raise ParseError(f"expected constraint, found {tok.value!r}", tok.span)
        if tok.value == "card":
            self.advance()
            name = self.name()
            op = self.peek()
            if op.value not in ("==", "<="):
                raise ParseError(f"expected '==' or '<=', found {op.value!r}", op.span)
            self.advance()
            k = self.expect_int()
            return ("card", name, op.value, k)
        if tok.value in ("inter", "union"):
            self.advance()
            self.expect_punct("(")
            operands = self.identlist()
            self.expect_punct(")")
            self.expect_punct("==")
            nxt = self.peek()
            if nxt.value == "{":
                if tok.value == "union":
                    raise ParseError("union result must be a named set", nxt.span)
                self.advance()
                self.expect_punct("}")
                return ("empty_inter", operands)
            result = self.name()
            return (tok.value, operands, result)
        if tok.value == "diff":
            self.advance()
            self.expect_punct("(")
            left = self.name()
            self.expect_punct(",")
            right = self.name()
            self.expect_punct(")")
            self.expect_punct("==")
            result = self.name()
            return ("diff", left, right, result)
        if tok.value == "common":
            self.advance()
            self.expect_punct("(")
            left = self.name()
            self.expect_punct(",")
            right = self.name()
            self.expect_punct(")")
            self.expect_punct("<=")
            k = self.expect_int()
            return ("common", left, right, k)
        # ident-led forms
        first = self.name()
        op = self.peek()
        if op.value in ("in", "notin"):
            self.advance()
            target = self.name()
            return ("member", first, target, op.value == "in")
        if op.value == "subset":
            self.advance()
            target = self.name()
            return ("subset", first, target)
        if op.value in ("==", "!="):
            self.advance()
            if op.value == "==" and self.peek().value == "{":
                elements = self.setlit()
                return ("assign", first, elements)
            target = self.name()
            return ("equal", first, target, op.value == "==")
        raise ParseError(f"expected constraint operator, found {op.value!r}", op.span)


class _Resolver:
    """Turns raw statements into a validated ProblemModel."""

    def __init__(self, stmts: list[tuple]):
        self.stmts = stmts
        self.report = ValidationReport()

    def fail(self, message: str, span: SourceSpan) -> None:
        self.report.add(f"{message} ({span})")

    def resolve(self) -> ProblemModel:
        universes = [s for s in self.stmts if s[0] == "universe"]
        if not universes:
            self.fail("no universe declared", SourceSpan(1, 1, 0, 0))
            raise SemanticError(self.report)
        if len(universes) > 1:
            self.fail("multiple universe declarations", universes[1][2])
        labels = [lab for lab, _ in universes[0][1]]
        seen = set()
        for lab, span in universes[0][1]:
            if lab in seen:
                self.fail(f"duplicate universe element {lab}", span)
            seen.add(lab)
        if len(set(labels)) != len(labels):
            raise SemanticError(self.report)
        universe = Universe(labels)
        model = ProblemModel(universe)

        for stmt in self.stmts:
            if stmt[0] != "set":
                continue
            (name, span), support = stmt[1], stmt[2]
            indices = []
            for lab, lspan in support:
                if lab in universe:
                    indices.append(universe.index_of(lab))
                else:
                    self.fail(f"element {lab} not in universe", lspan)
            if name in model.sets:
                self.fail(f"duplicate set name {name}", span)
                continue
            model.add_set(SetVariable(name, tuple(indices)))

        for stmt in self.stmts:
            if stmt[0] != "constraint":
                continue
            con = self._constraint(stmt[1], model)
            if con is not None:
                model.add_constraint(con)

        if not self.report.ok:
            raise SemanticError(self.report)
        post = model.validate()
        if not post.ok:
            raise SemanticError(post)
        return model

    def _set(self, ref: tuple[str, SourceSpan], model: ProblemModel) -> str | None:
        name, span = ref
        if name not in model.sets:
            self.fail(f"unknown set {name}", span)
            return None
        return name

    def _element(self, ref: tuple[str, SourceSpan], model: ProblemModel) -> int | None:
        label, span = ref
        if label not in model.universe:
            self.fail(f"element {label} not in universe", span)
            return None
        return model.universe.index_of(label)

    def _constraint(self, raw: tuple, model: ProblemModel):
        kind = raw[0]
        if kind == "member":
            elem = self._element(raw[1], model)
            target = self._set(raw[2], model)
            if elem is None or target is None:
                return None
            return Member(elem, target, raw[3])
        if kind == "subset":
            left, right = self._set(raw[1], model), self._set(raw[2], model)
            if left is None or right is None:
                return None
            return Subset(left, right)
        if kind == "equal":
            left, right = self._set(raw[1], model), self._set(raw[2], model)
            if left is None or right is None:
                return None
            return Equal(left, right, raw[3])
        if kind == "assign":
            target = self._set(raw[1], model)
            elements = [self._element(ref, model) for ref in raw[2]]
            if target is None or any(e is None for e in elements):
                return None
            support = set(model.sets[target].support)
            for ref, idx in zip(raw[2], elements):
                if idx not in support:
                    self.fail(f"element {ref[0]} outside support of {target}", ref[1])
                    return None
            return ConstantAssign(target, tuple(elements))
        if kind == "card":
            target = self._set(raw[1], model)
            if target is None:
                return None
            return CardinalityEq(target, raw[3]) if raw[2] == "==" else CardinalityAtMost(target, raw[3])
        if kind == "common":
            left, right = self._set(raw[1], model), self._set(raw[2], model)
            if left is None or right is None:
                return None
            return ShareAtMost(left, right, raw[3])
        if kind == "empty_inter":
            names = [self._set(ref, model) for ref in raw[1]]
            if any(n is None for n in names):
                return None
            return EmptyIntersection(tuple(names))
        if kind in ("inter", "union"):
            names = [self._set(ref, model) for ref in raw[1]]
            result = self._set(raw[2], model)
            if any(n is None for n in names) or result is None:
                return None
            if kind == "inter":
                if len(names) == 2:
                    return Intersection(names[0], names[1], result)
                return MultiIntersection(tuple(names), result)
            if len(names) == 2:
                return Union(names[0], names[1], result)
            return MultiUnion(tuple(names), result)
        if kind == "diff":
            left, right = self._set(raw[1], model), self._set(raw[2], model)
            result = self._set(raw[3], model)
            if left is None or right is None or result is None:
                return None
            return Difference(left, right, result)
        raise AssertionError(f"unhandled raw constraint {kind}")


def parse_model(text: str) -> ProblemModel:
    """Parse source text into a validated ProblemModel.

    Raises ParseError (with a SourceSpan) on syntax errors and
    SemanticError (with a ValidationReport) on resolution failures.
    """
    return _Resolver(_Parser(text).parse()).resolve()


def format_model(model: ProblemModel) -> str:
    """Render a model as canonical source text (sets sorted by name).

    parse_model(format_model(m)) is structurally equal to m.
    """
    universe = model.universe
    lines = ["universe " + " ".join(universe.labels()) + ";"]
    for name in sorted(model.sets):
        labels = " ".join(universe.label_of(i) for i in model.sets[name].support)
        lines.append(f"set {name} support {{{labels}}};")
    for con in model.constraints:
        lines.append(f"constraint {_format_constraint(con, universe)};")
    return "\n".join(lines) + "\n"


def _format_constraint(con, universe: Universe) -> str:
    lab = universe.label_of
    if isinstance(con, Member):
        op = "in" if con.positive else "notin"
        return f"{lab(con.element)} {op} {con.set_name}"
    if isinstance(con, Equal):
        op = "==" if con.positive else "!="
        return f"{con.left} {op} {con.right}"
    if isinstance(con, ConstantAssign):
        return f"{con.set_name} == {{{' '.join(lab(i) for i in con.elements)}}}"
    if isinstance(con, Intersection):
        return f"inter({con.left}, {con.right}) == {con.result}"
    if isinstance(con, EmptyIntersection):
        return f"inter({', '.join(con.sets)}) == {{}}"
    if isinstance(con, Union):
        return f"union({con.left}, {con.right}) == {con.result}"
    if isinstance(con, MultiIntersection):
        return f"inter({', '.join(con.sets)}) == {con.result}"
    if isinstance(con, MultiUnion):
        return f"union({', '.join(con.sets)}) == {con.result}"
    if isinstance(con, Subset):
        return f"{con.left} subset {con.right}"
    if isinstance(con, Difference):
        return f"diff({con.left}, {con.right}) == {con.result}"
    if isinstance(con, CardinalityEq):
        return f"card {con.set_name} == {con.k}"
    if isinstance(con, CardinalityAtMost):
        return f"card {con.set_name} <= {con.k}"
    if isinstance(con, ShareAtMost):
        return f"common({con.left}, {con.right}) <= {con.bound}"
    raise ValueError(f"cannot format constraint {con!r}")
