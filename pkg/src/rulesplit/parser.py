"""Text front end: parse a defined input-language subset and render it back.

The supported language covers facts, disjunctive rules, constraints,
default negation, builtin comparisons, integer arithmetic (+, -, *, /),
#count/#sum/#max/#min aggregates with one or two guards, and weak
constraints ``:~ body. [w@l, t]`` (level defaults to 0 when omitted).
Comments run from ``%`` to end of line.  Variable pooling, classical
negation, and function terms are rejected as unsupported constructs.

``parse(render(p))`` is structurally identical to ``p``, and ``render`` is
a pure function, so output text is byte-stable.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast import (
    AGGREGATE_FUNCTIONS,
    Aggregate,
    AggregateElement,
    ArithTerm,
    Assignment,
    Atom,
    BodyElement,
    Comparison,
    Constant,
    Cost,
    Literal,
    Program,
    Rule,
    Term,
    Variable,
    vars_of,
)
from .safety import unsafe_vars


@dataclass(frozen=True, slots=True)
class SourceLocation:
    """1-based line and column of a token in the input text."""

    line: int
    column: int

    def __post_init__(self) -> None:
        if self.line < 1 or self.column < 1:
            raise ValueError("source locations are 1-based")

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class ParseError(Exception):
    """Raised on any lexical, syntactic, or unsupported-construct failure.

    ``kind`` is one of ``"lexical"``, ``"syntactic"``,
    ``"unsupported-construct"``.
    """

    def __init__(self, location: SourceLocation, message: str, kind: str = "syntactic"):
        if not message:
            raise ValueError("parse errors need a message")
        super().__init__(f"{location}: {kind}: {message}")
        self.location = location
        self.message = message
        self.kind = kind


_RELOPS = {"<", "<=", "=", "!=", ">=", ">"}
_MIRROR = {"<": ">", "<=": ">=", "=": "=", "!=": "!=", ">": "<", ">=": "<="}
_PUNCT2 = (":-", ":~", "!=", "<=", ">=")
_PUNCT1 = ".,()[]{};:|@=<>+-*/"


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str  # ident | variable | integer | aggregate | punct | eof
    text: str
    location: SourceLocation


def _lex(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col, i, n = 1, 1, 0, len(text)

    def loc() -> SourceLocation:
        return SourceLocation(line, col)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = text[i]
        if c in " \t\r\n":
            advance(1)
            continue
        if c == "%":
            while i < n and text[i] != "\n":
                advance(1)
            continue
        start = loc()
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(_Token("integer", text[i:j], start))
            advance(j - i)
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word[0] == "_" and len(word) > 1:
                raise ParseError(start, f"variable names must start uppercase: {word!r}", "lexical")
            kind = "variable" if (word[0].isupper() or word == "_") else "ident"
            tokens.append(_Token(kind, word, start))
            advance(j - i)
            continue
        if c == "#":
            j = i + 1
            while j < n and text[j].isalpha():
                j += 1
            name = text[i + 1 : j]
            if name not in AGGREGATE_FUNCTIONS:
                raise ParseError(start, f"unknown directive #{name}", "lexical")
            tokens.append(_Token("aggregate", name, start))
            advance(j - i)
            continue
        two = text[i : i + 2]
        if two in _PUNCT2:
            tokens.append(_Token("punct", two, start))
            advance(2)
            continue
        if c in _PUNCT1:
            tokens.append(_Token("punct", c, start))
            advance(1)
            continue
        raise ParseError(start, f"unexpected character {c!r}", "lexical")
    tokens.append(_Token("eof", "", loc()))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0
        # Names already taken by real variables anywhere in the document;
        # fresh names for anonymous variables must avoid them.
        self.taken = {t.text for t in tokens if t.kind == "variable" and t.text != "_"}
        self.anon_count = 0

    def peek(self, ahead: int = 0) -> _Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at_punct(self, *texts: str) -> bool:
        t = self.peek()
        return t.kind == "punct" and t.text in texts

    def expect(self, text: str) -> _Token:
        tok = self.peek()
        if tok.kind != "punct" or tok.text != text:
            raise ParseError(tok.location, f"expected {text!r}, found {tok.text or 'end of input'!r}")
        return self.next()

    def fail(self, message: str, kind: str = "syntactic") -> ParseError:
        return ParseError(self.peek().location, message, kind)

    # ------------------------------------------------------------ program

    def program(self) -> Program:
        rules = []
        while self.peek().kind != "eof":
            rules.append(self.statement())
        return Program(tuple(rules))

    def statement(self) -> Rule:
        start = self.peek().location
        if self.at_punct(":-"):
            self.next()
            body = self.body()
            self.expect(".")
            rule = Rule((), tuple(body))
        elif self.at_punct(":~"):
            self.next()
            body = self.body()
            self.expect(".")
            cost = self.cost_annotation()
            rule = Rule((), tuple(body), cost)
        else:
            head = [self.head_atom()]
            while self.at_punct("|"):
                self.next()
                head.append(self.head_atom())
            if self.at_punct(":-"):
                self.next()
                body = self.body()
            else:
                body = []
            self.expect(".")
            rule = Rule(tuple(head), tuple(body))
        unsafe = unsafe_vars(rule)
        if unsafe:
            names = ", ".join(sorted(unsafe))
            raise ParseError(start, f"unsafe variables: {names}", "unsupported-construct")
        return rule

    def cost_annotation(self) -> Cost:
        self.expect("[")
        weight = self.term()
        if self.at_punct("@"):
            self.next()
            level = self.term()
        else:
            level = Constant(0)
        terms = []
        while self.at_punct(","):
            self.next()
            terms.append(self.term())
        self.expect("]")
        return Cost(weight, level, tuple(terms))

    # --------------------------------------------------------------- body

    def body(self) -> list[BodyElement]:
        elements = list(self.body_element())
        while self.at_punct(","):
            self.next()
            elements.extend(self.body_element())
        return elements

    def body_element(self) -> list[BodyElement]:
        """Parse one source-level body element.

        A two-sided aggregate guard ``l <= #agg{..} <= u`` normalizes into
        two aggregate elements sharing the element list, hence the list
        return type.
        """
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "not":
            self.next()
            if self.peek().kind == "ident" and self.peek().text != "not":
                return [Literal(self.atom(), negated=True)]
            raise ParseError(
                tok.location,
                "only atoms can be negated (negated aggregates and comparisons"
                " are not supported)",
                "unsupported-construct",
            )
        if tok.kind == "punct" and tok.text == "-" and self.peek(1).kind == "ident":
            raise self.fail("classical negation is not supported", "unsupported-construct")
        if tok.kind == "aggregate":
            agg, loc = self.aggregate_tail(None, None)
            if self.peek().kind == "punct" and self.peek().text in _RELOPS:
                rel = self.next().text
                bound = self.term()
                return [Aggregate(bound, _MIRROR[rel], agg.func, agg.elements)]
            raise ParseError(loc, "aggregate needs at least one guard", "unsupported-construct")
        if tok.kind == "ident" and not (
            self.peek(1).kind == "punct" and self.peek(1).text in (_RELOPS | set("+-*/"))
        ):
            return [Literal(self.atom())]
        lhs = self.term()
        tok = self.peek()
        if not (tok.kind == "punct" and tok.text in _RELOPS):
            raise self.fail("expected a comparison operator")
        rel = self.next().text
        if self.peek().kind == "aggregate":
            agg, _ = self.aggregate_tail(lhs, rel)
            out = [agg]
            if self.peek().kind == "punct" and self.peek().text in _RELOPS:
                rel2 = self.next().text
                bound = self.term()
                out.append(Aggregate(bound, _MIRROR[rel2], agg.func, agg.elements))
            return out
        rhs = self.term()
        if rel == "=" and isinstance(lhs, (Variable, Constant)):
            return [Assignment(lhs, rhs)]
        return [Comparison(rel, lhs, rhs)]

    def aggregate_tail(self, guard: Term | None, relation: str | None):
        """Parse ``#func{elements}`` given an already-parsed left guard."""
        tok = self.next()
        func = tok.text
        self.expect("{")
        elements = [self.aggregate_element()]
        while self.at_punct(";"):
            self.next()
            elements.append(self.aggregate_element())
        self.expect("}")
        if guard is None:
            # placeholder guard; the caller replaces it via the right guard
            return Aggregate(Constant(0), "=", func, tuple(elements)), tok.location
        return Aggregate(guard, relation, func, tuple(elements)), tok.location

    def aggregate_element(self) -> AggregateElement:
        terms: list[Term] = []
        if not self.at_punct(":"):
            terms.append(self.term())
            while self.at_punct(","):
                self.next()
                terms.append(self.term())
        condition: list[BodyElement] = []
        if self.at_punct(":"):
            self.next()
            if not self.at_punct(";", "}"):
                condition.extend(self.body_element())
                while self.at_punct(","):
                    self.next()
                    condition.extend(self.body_element())
        return AggregateElement(tuple(terms), tuple(condition))

    # -------------------------------------------------------------- atoms

    def head_atom(self) -> Atom:
        tok = self.peek()
        if tok.kind == "punct" and tok.text == "-" and self.peek(1).kind == "ident":
            raise self.fail("classical negation is not supported", "unsupported-construct")
        return self.atom()

    def atom(self) -> Atom:
        tok = self.next()
        if tok.kind != "ident":
            raise ParseError(tok.location, f"expected a predicate name, found {tok.text!r}")
        args: list[Term] = []
        if self.at_punct("("):
            self.next()
            args.append(self.term())
            while True:
                if self.at_punct(";"):
                    raise self.fail("variable pooling is not supported", "unsupported-construct")
                if not self.at_punct(","):
                    break
                self.next()
                args.append(self.term())
            self.expect(")")
        return Atom(tok.text, tuple(args))

    # -------------------------------------------------------------- terms

    def term(self) -> Term:
        left = self.term_factor()
        while self.at_punct("+", "-"):
            op = self.next().text
            left = ArithTerm(op, left, self.term_factor())
        return left

    def term_factor(self) -> Term:
        left = self.term_primary()
        while self.at_punct("*", "/"):
            op = self.next().text
            left = ArithTerm(op, left, self.term_primary())
        return left

    def term_primary(self) -> Term:
        tok = self.peek()
        if tok.kind == "integer":
            self.next()
            return Constant(int(tok.text))
        if tok.kind == "punct" and tok.text == "-":
            if self.peek(1).kind == "integer":
                self.next()
                value = self.next().text
                return Constant(-int(value))
            raise self.fail("unary minus applies to integer literals only")
        if tok.kind == "variable":
            self.next()
            if tok.text == "_":
                return Variable(self.fresh_anon())
            return Variable(tok.text)
        if tok.kind == "ident":
            if self.peek(1).kind == "punct" and self.peek(1).text == "(":
                raise self.fail("function terms are not supported", "unsupported-construct")
            self.next()
            return Constant(tok.text)
        if tok.kind == "punct" and tok.text == "(":
            self.next()
            inner = self.term()
            self.expect(")")
            return inner
        raise ParseError(tok.location, f"expected a term, found {tok.text or 'end of input'!r}")

    def fresh_anon(self) -> str:
        while True:
            self.anon_count += 1
            name = f"Anon{self.anon_count}"
            if name not in self.taken:
                self.taken.add(name)
                return name


def parse(text: str) -> Program:
    """Parse program text; raises ParseError on the first failure."""
    return _Parser(_lex(text)).program()


# ------------------------------------------------------------------ render

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def render_term(term: Term, min_prec: int = 0) -> str:
    if isinstance(term, Constant):
        text = str(term.value)
        if min_prec > 0 and isinstance(term.value, int) and term.value < 0:
            return f"({text})"
        return text
    if isinstance(term, Variable):
        return term.name
    prec = _PREC[term.op]
    text = f"{render_term(term.left, prec)}{term.op}{render_term(term.right, prec + 1)}"
    return f"({text})" if prec < min_prec else text


def render_atom(atom: Atom) -> str:
    if not atom.args:
        return atom.predicate
    return f"{atom.predicate}({','.join(render_term(t) for t in atom.args)})"


def render_body_element(elem: BodyElement) -> str:
    if isinstance(elem, Literal):
        prefix = "not " if elem.negated else ""
        return prefix + render_atom(elem.atom)
    if isinstance(elem, Comparison):
        return f"{render_term(elem.lhs)} {elem.relation} {render_term(elem.rhs)}"
    if isinstance(elem, Assignment):
        return f"{render_term(elem.target)} = {render_term(elem.expr)}"
    if isinstance(elem, Aggregate):
        parts = "; ".join(_render_aggregate_element(e) for e in elem.elements)
        return f"{render_term(elem.guard)} {elem.relation} #{elem.func}{{{parts}}}"
    raise TypeError(f"cannot render {type(elem).__name__}")


def _render_aggregate_element(elem: AggregateElement) -> str:
    terms = ",".join(render_term(t) for t in elem.terms)
    if not elem.condition:
        return terms
    condition = ", ".join(render_body_element(c) for c in elem.condition)
    return f"{terms} : {condition}" if terms else f": {condition}"


def render_rule(rule: Rule) -> str:
    head = " | ".join(render_atom(a) for a in rule.head)
    body = ", ".join(render_body_element(b) for b in rule.body)
    if rule.cost is not None:
        weight = render_term(rule.cost.weight)
        level = render_term(rule.cost.level)
        terms = "".join(f", {render_term(t)}" for t in rule.cost.terms)
        return f":~ {body}. [{weight}@{level}{terms}]"
    if not rule.head:
        return f":- {body}."
    if not rule.body:
        return f"{head}."
    return f"{head} :- {body}."


def render(program: Program) -> str:
    """Deterministic text for a program, one rule per line."""
    if not program.rules:
        return ""
    return "\n".join(render_rule(r) for r in program.rules) + "\n"
