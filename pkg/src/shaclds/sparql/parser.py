"""Recursive-descent parser for the SPARQL SELECT subset used by constraints."""

from __future__ import annotations

import bisect
import re
from typing import Optional
from urllib.parse import urljoin

from ..model import IRI, Literal
from .algebra import (
    BGP, AlternativePath, BinaryExpr, Bind, ExistsExpr, Filter, FunctionCall, Group,
    GraphPattern, InExpr, InversePath, MinusPattern, OneOrMorePath, OptionalPattern, Projection,
    Query, SequencePath, ServicePattern, TriplePattern, UnaryExpr, UnionPattern, ValuesPattern,
    Var, ZeroOrMorePath,
)

XSD = "http://www.w3.org/2001/XMLSchema#"
RDF_TYPE = IRI("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")


class SparqlSyntaxError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0) -> None:
        self.line = line
        self.column = column
        where = f"{line}:{column}: " if line else ""
        super().__init__(where + message)


class UnsupportedFeatureError(SparqlSyntaxError):
    def __init__(self, feature: str, line: int = 0, column: int = 0) -> None:
        self.feature = feature
        SparqlSyntaxError.__init__(self, f"unsupported feature: {feature}", line, column)


class ProhibitedFeatureError(ValueError):
    def __init__(self, violations: list) -> None:
        self.violations = violations
        super().__init__("prohibited SPARQL features: " + "; ".join(str(v) for v in violations))


_NAME = r"[A-Za-z_\u00C0-\uFFFD][A-Za-z0-9_\-.\u00B7\u00C0-\uFFFD]*"
_PN_LOCAL = r"(?:[A-Za-z0-9_:\u00C0-\uFFFD]|%[0-9A-Fa-f]{2}|\\[_~.\-!$&'()*+,;=/?#@%])" \
            r"(?:(?:[A-Za-z0-9_\-.:\u00B7\u00C0-\uFFFD]|%[0-9A-Fa-f]{2}|\\[_~.\-!$&'()*+,;=/?#@%])*" \
            r"(?:[A-Za-z0-9_\-:\u00B7\u00C0-\uFFFD]|%[0-9A-Fa-f]{2}|\\[_~.\-!$&'()*+,;=/?#@%]))?"
_PN_PREFIX = r"[A-Za-z\u00C0-\uFFFD](?:[A-Za-z0-9_\-.\u00B7\u00C0-\uFFFD]*[A-Za-z0-9_\-\u00B7\u00C0-\uFFFD])?"
_ESC = r"\\[tbnrf\"'\\]|\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8}"

_TOKENS = [
    ("IRIREF", r"<[^<>\"{}|^`\\\x00-\x20]*>"),
    ("STRING", rf'"""(?:(?:"|"")?(?:[^"\\]|{_ESC}))*"""|\'\'\'(?:(?:\'|\'\')?(?:[^\'\\]|{_ESC}))*\'\'\''
               rf'|"(?:[^"\\\n\r]|{_ESC})*"|\'(?:[^\'\\\n\r]|{_ESC})*\''),
    ("VAR", r"[?$][A-Za-z0-9_\u00C0-\uFFFD]+"),
    ("BNODE", r"_:[A-Za-z0-9_](?:[A-Za-z0-9_\-.]*[A-Za-z0-9_\-])?"),
    ("LANGTAG", r"@[a-zA-Z]+(?:-[a-zA-Z0-9]+)*"),
    ("PNAME_LN", rf"(?:{_PN_PREFIX})?:{_PN_LOCAL}"),
    ("PNAME_NS", rf"(?:{_PN_PREFIX})?:"),
    ("DOUBLE", r"[0-9]+\.[0-9]*[eE][+-]?[0-9]+|\.?[0-9]+[eE][+-]?[0-9]+"),
    ("DECIMAL", r"[0-9]*\.[0-9]+"),
    ("INTEGER", r"[0-9]+"),
    ("WORD", r"[A-Za-z_][A-Za-z0-9_]*"),
    ("OP", r"\^\^|&&|\|\||!=|<=|>=|[{}()\[\].;,*+?/|^!=<>\-]"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{k}>{v})" for k, v in _TOKENS))
_SKIP_RE = re.compile(r"(?:\s+|#[^\n]*)+")
_ESC_RE = re.compile(_ESC)
_ECHARS = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}

# builtins accepted in expressions, with their arities
BUILTINS = {
    "STR": (1, 1), "LANG": (1, 1), "DATATYPE": (1, 1), "BOUND": (1, 1), "SAMETERM": (2, 2),
    "ISIRI": (1, 1), "ISURI": (1, 1), "ISBLANK": (1, 1), "ISLITERAL": (1, 1), "ISNUMERIC": (1, 1),
    "REGEX": (2, 3), "CONTAINS": (2, 2), "STRSTARTS": (2, 2), "STRENDS": (2, 2),
    "STRLEN": (1, 1), "LCASE": (1, 1), "UCASE": (1, 1), "LANGMATCHES": (2, 2),
}
_UNSUPPORTED_BUILTINS = {
    "COUNT", "SUM", "MIN", "MAX", "AVG", "SAMPLE", "GROUP_CONCAT", "IF", "COALESCE", "CONCAT",
    "SUBSTR", "REPLACE", "ENCODE_FOR_URI", "IRI", "URI", "BNODE", "RAND", "ABS", "CEIL", "FLOOR",
    "ROUND", "NOW", "YEAR", "MONTH", "DAY", "HOURS", "MINUTES", "SECONDS", "TIMEZONE", "TZ",
    "MD5", "SHA1", "SHA256", "SHA384", "SHA512", "UUID", "STRUUID", "STRLANG", "STRDT",
    "STRBEFORE", "STRAFTER",
}


def _unescape(text: str) -> str:
    def repl(m: re.Match) -> str:
        s = m.group(0)
        return chr(int(s[2:], 16)) if s[1] in "uU" else _ECHARS[s[1]]

    return _ESC_RE.sub(repl, text)


class _Tok:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind: str, text: str, pos: int) -> None:
        self.kind, self.text, self.pos = kind, text, pos


class _QueryParser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.line_starts = [0] + [m.end() for m in re.finditer("\n", text)]
        self.toks: list[_Tok] = []
        pos = 0
        while True:
            m = _SKIP_RE.match(text, pos)
            if m:
                pos = m.end()
            if pos >= len(text):
                break
            m = _TOKEN_RE.match(text, pos)
            if not m:
                raise self._err(f"unexpected character {text[pos]!r}", pos)
            self.toks.append(_Tok(m.lastgroup, m.group(0), pos))
            pos = m.end()
        self.toks.append(_Tok("EOF", "", len(text)))
        self.i = 0
        self.prefixes: dict[str, str] = {}
        self.base: Optional[str] = None
        self.anon = 0

    # helpers

    def _pos(self, offset: int) -> tuple[int, int]:
        idx = bisect.bisect_right(self.line_starts, offset) - 1
        return idx + 1, offset - self.line_starts[idx] + 1

    def _err(self, message: str, offset: Optional[int] = None) -> SparqlSyntaxError:
        line, col = self._pos(self.toks[self.i].pos if offset is None else offset)
        return SparqlSyntaxError(message, line, col)

    def unsupported(self, feature: str) -> UnsupportedFeatureError:
        line, col = self._pos(self.tok.pos)
        return UnsupportedFeatureError(feature, line, col)

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at_op(self, *ops: str) -> bool:
        return self.tok.kind == "OP" and self.tok.text in ops

    def at_kw(self, *words: str, tok: Optional[_Tok] = None) -> bool:
        tok = tok or self.tok
        return tok.kind == "WORD" and tok.text.upper() in words

    def expect_op(self, op: str) -> None:
        if not self.at_op(op):
            raise self._err(f"expected {op!r}, found {self.tok.text or 'end of query'!r}")
        self.advance()

    def expect_kw(self, word: str) -> None:
        if not self.at_kw(word):
            raise self._err(f"expected {word}, found {self.tok.text or 'end of query'!r}")
        self.advance()

    def fresh_var(self) -> Var:
        self.anon += 1
        return Var(f"_anon{self.anon}")

    # terms

    def iri(self) -> IRI:
        tok = self.tok
        if tok.kind == "IRIREF":
            self.advance()
            value = tok.text[1:-1]
            if not re.match(r"^[A-Za-z][A-Za-z0-9+.\-]*:", value):
                if self.base is None:
                    raise self._err(f"relative IRI <{value}> with no base", tok.pos)
                value = urljoin(self.base, value)
            return IRI(value)
        if tok.kind in ("PNAME_LN", "PNAME_NS"):
            self.advance()
            prefix, _, local = tok.text.partition(":")
            if prefix not in self.prefixes:
                raise self._err(f"undeclared prefix {prefix!r}", tok.pos)
            return IRI(self.prefixes[prefix] + re.sub(r"\\(.)", r"\1", local))
        raise self._err(f"expected an IRI, found {tok.text or 'end of query'!r}")

    def is_iri_start(self) -> bool:
        return self.tok.kind in ("IRIREF", "PNAME_LN", "PNAME_NS")

    def literal(self) -> Literal:
        tok = self.tok
        if tok.kind == "STRING":
            self.advance()
            q = 3 if tok.text[:3] in ('"""', "'''") and len(tok.text) >= 6 else 1
            lexical = _unescape(tok.text[q:-q])
            if self.tok.kind == "LANGTAG":
                return Literal(lexical, language=self.advance().text[1:])
            if self.at_op("^^"):
                self.advance()
                return Literal(lexical, self.iri().value)
            return Literal(lexical)
        return self.numeric_or_boolean()

    def numeric_or_boolean(self, sign: str = "") -> Literal:
        tok = self.tok
        kinds = {"INTEGER": "integer", "DECIMAL": "decimal", "DOUBLE": "double"}
        if tok.kind in kinds:
            self.advance()
            return Literal(sign + tok.text, XSD + kinds[tok.kind])
        if not sign and tok.kind == "WORD" and tok.text in ("true", "false"):
            self.advance()
            return Literal(tok.text, XSD + "boolean")
        raise self._err(f"expected a literal, found {tok.text or 'end of query'!r}")

    def var_or_term(self):
        tok = self.tok
        if tok.kind == "VAR":
            self.advance()
            return Var(tok.text[1:])
        if tok.kind == "BNODE":
            self.advance()
            return Var("_bnode_" + tok.text[2:])
        if self.is_iri_start():
            return self.iri()
        if tok.kind in ("STRING", "INTEGER", "DECIMAL", "DOUBLE") or (
                tok.kind == "WORD" and tok.text in ("true", "false")):
            return self.literal()
        if self.at_op("-", "+") and self.peek().kind in ("INTEGER", "DECIMAL", "DOUBLE"):
            sign = self.advance().text
            return self.numeric_or_boolean(sign)
        raise self._err(f"expected a variable or term, found {tok.text or 'end of query'!r}")

    # query

    def query(self) -> Query:
        while True:
            if self.at_kw("PREFIX"):
                self.advance()
                tok = self.tok
                if tok.kind != "PNAME_NS":
                    raise self._err("expected a prefix name")
                self.advance()
                self.prefixes[tok.text[:-1]] = self.iri().value
            elif self.at_kw("BASE"):
                self.advance()
                self.base = self.iri().value
            else:
                break
        if self.at_kw("ASK", "CONSTRUCT", "DESCRIBE"):
            raise self.unsupported(f"{self.tok.text.upper()} query form")
        self.expect_kw("SELECT")
        distinct = False
        if self.at_kw("DISTINCT", "REDUCED"):
            distinct = self.advance().text.upper() == "DISTINCT"
        projection = []
        if self.at_op("*"):
            self.advance()
        else:
            while self.tok.kind == "VAR" or self.at_op("("):
                if self.tok.kind == "VAR":
                    projection.append(Var(self.advance().text[1:]))
                else:
                    self.advance()
                    expr = self.expression()
                    self.expect_kw("AS")
                    if self.tok.kind != "VAR":
                        raise self._err("expected a variable after AS")
                    var = Var(self.advance().text[1:])
                    self.expect_op(")")
                    projection.append(Projection(expr, var))
            if not projection:
                raise self._err("expected a projection")
        from_graphs, from_named = [], []
        while self.at_kw("FROM"):
            self.advance()
            if self.at_kw("NAMED"):
                self.advance()
                from_named.append(self.iri())
            else:
                from_graphs.append(self.iri())
        if self.at_kw("WHERE"):
            self.advance()
        where = self.group()
        for word, feature in (("GROUP", "GROUP BY"), ("HAVING", "HAVING"), ("ORDER", "ORDER BY"),
                              ("LIMIT", "LIMIT"), ("OFFSET", "OFFSET")):
            if self.at_kw(word):
                raise self.unsupported(feature)
        values = None
        if self.at_kw("VALUES"):
            values = self.values()
        if self.tok.kind != "EOF":
            raise self._err(f"unexpected {self.tok.text!r} after query")
        return Query(tuple(projection), where, tuple(from_graphs), tuple(from_named), distinct,
                     values, tuple(sorted(self.prefixes.items())))

    def group(self) -> Group:
        self.expect_op("{")
        if self.at_kw("SELECT"):
            raise self.unsupported("subquery")
        elements: list = []
        triples: list = []

        def flush() -> None:
            if triples:
                elements.append(BGP(tuple(triples)))
                triples.clear()

        while not self.at_op("}"):
            tok = self.tok
            if tok.kind == "EOF":
                raise self._err("unterminated group pattern")
            if self.at_op("{"):
                flush()
                first = self.group()
                groups = [first]
                while self.at_kw("UNION"):
                    self.advance()
                    groups.append(self.group())
                elements.append(UnionPattern(tuple(groups)) if len(groups) > 1 else first)
            elif self.at_kw("OPTIONAL"):
                flush()
                self.advance()
                elements.append(OptionalPattern(self.group()))
            elif self.at_kw("MINUS"):
                flush()
                self.advance()
                elements.append(MinusPattern(self.group()))
            elif self.at_kw("GRAPH"):
                flush()
                self.advance()
                name = Var(self.advance().text[1:]) if self.tok.kind == "VAR" else self.iri()
                elements.append(GraphPattern(name, self.group()))
            elif self.at_kw("SERVICE"):
                flush()
                self.advance()
                silent = False
                if self.at_kw("SILENT"):
                    self.advance()
                    silent = True
                endpoint = Var(self.advance().text[1:]) if self.tok.kind == "VAR" else self.iri()
                elements.append(ServicePattern(endpoint, self.group(), silent))
            elif self.at_kw("FILTER"):
                flush()
                self.advance()
                elements.append(Filter(self.constraint()))
            elif self.at_kw("BIND"):
                flush()
                self.advance()
                self.expect_op("(")
                expr = self.expression()
                self.expect_kw("AS")
                if self.tok.kind != "VAR":
                    raise self._err("expected a variable after AS")
                var = Var(self.advance().text[1:])
                self.expect_op(")")
                elements.append(Bind(expr, var))
            elif self.at_kw("VALUES"):
                flush()
                elements.append(self.values())
            else:
                self.triples_same_subject(triples)
                if not self.at_op("."):
                    if not self.at_op("}") and not self.at_kw(
                            "OPTIONAL", "MINUS", "GRAPH", "SERVICE", "FILTER", "BIND", "VALUES") \
                            and not self.at_op("{"):
                        raise self._err(f"expected '.' or '}}', found {self.tok.text!r}")
                    continue
            if self.at_op("."):
                self.advance()
        self.advance()
        flush()
        return Group(tuple(elements))

    def values(self) -> ValuesPattern:
        self.expect_kw("VALUES")
        variables = []
        if self.tok.kind == "VAR":
            variables.append(Var(self.advance().text[1:]))
            single = True
        else:
            self.expect_op("(")
            while self.tok.kind == "VAR":
                variables.append(Var(self.advance().text[1:]))
            self.expect_op(")")
            single = False
        self.expect_op("{")
        rows = []
        while not self.at_op("}"):
            if self.tok.kind == "EOF":
                raise self._err("unterminated VALUES block")
            if single:
                rows.append((self.data_value(),))
            else:
                self.expect_op("(")
                row = []
                while not self.at_op(")"):
                    row.append(self.data_value())
                self.advance()
                rows.append(tuple(row))
        self.advance()
        return ValuesPattern(tuple(variables), tuple(rows))

    def data_value(self):
        if self.at_kw("UNDEF"):
            self.advance()
            return None
        return self.var_or_term()

    # triples

    def triples_same_subject(self, out: list) -> None:
        if self.at_op("["):
            subject = self.blank_node_property_list(out)
            if self.at_op(".", "}"):
                return
        elif self.at_op("("):
            raise self.unsupported("collection syntax in query patterns")
        else:
            subject = self.var_or_term()
        self.property_list(subject, out)

    def blank_node_property_list(self, out: list) -> Var:
        self.expect_op("[")
        node = self.fresh_var()
        if not self.at_op("]"):
            self.property_list(node, out)
        self.expect_op("]")
        return node

    def property_list(self, subject, out: list) -> None:
        self.object_list(subject, self.verb(), out)
        while self.at_op(";"):
            while self.at_op(";"):
                self.advance()
            if self.at_op(".", "]", "}"):
                return
            self.object_list(subject, self.verb(), out)

    def verb(self):
        if self.tok.kind == "VAR":
            return Var(self.advance().text[1:])
        path = self.path()
        return path

    def object_list(self, subject, predicate, out: list) -> None:
        out.append(TriplePattern(subject, predicate, self.graph_node(out)))
        while self.at_op(","):
            self.advance()
            out.append(TriplePattern(subject, predicate, self.graph_node(out)))

    def graph_node(self, out: list):
        if self.at_op("["):
            return self.blank_node_property_list(out)
        if self.at_op("("):
            raise self.unsupported("collection syntax in query patterns")
        return self.var_or_term()

    # paths

    def path(self):
        options = [self.path_sequence()]
        while self.at_op("|"):
            self.advance()
            options.append(self.path_sequence())
        return options[0] if len(options) == 1 else AlternativePath(tuple(options))

    def path_sequence(self):
        steps = [self.path_elt_or_inverse()]
        while self.at_op("/"):
            self.advance()
            steps.append(self.path_elt_or_inverse())
        return steps[0] if len(steps) == 1 else SequencePath(tuple(steps))

    def path_elt_or_inverse(self):
        if self.at_op("^"):
            self.advance()
            return InversePath(self.path_elt())
        return self.path_elt()

    def path_elt(self):
        if self.at_op("!"):
            raise self.unsupported("negated property set path")
        if self.at_op("("):
            self.advance()
            primary = self.path()
            self.expect_op(")")
        elif self.tok.kind == "WORD" and self.tok.text == "a":
            self.advance()
            primary = RDF_TYPE
        else:
            primary = self.iri()
        if self.at_op("+"):
            self.advance()
            return OneOrMorePath(primary)
        if self.at_op("*"):
            self.advance()
            return ZeroOrMorePath(primary)
        if self.at_op("?"):
            raise self.unsupported("zero-or-one path (?)")
        return primary

    # expressions

    def constraint(self):
        if self.at_op("("):
            self.advance()
            expr = self.expression()
            self.expect_op(")")
            return expr
        return self.primary()

    def expression(self):
        left = self.and_expr()
        while self.at_op("||"):
            self.advance()
            left = BinaryExpr("||", left, self.and_expr())
        return left

    def and_expr(self):
        left = self.relational()
        while self.at_op("&&"):
            self.advance()
            left = BinaryExpr("&&", left, self.relational())
        return left

    def relational(self):
        left = self.additive()
        if self.at_op("=", "!=", "<", ">", "<=", ">="):
            op = self.advance().text
            return BinaryExpr(op, left, self.additive())
        negated = False
        if self.at_kw("NOT") and self.at_kw("IN", tok=self.peek()):
            self.advance()
            negated = True
        if self.at_kw("IN"):
            self.advance()
            self.expect_op("(")
            options = []
            while not self.at_op(")"):
                options.append(self.expression())
                if self.at_op(","):
                    self.advance()
            self.advance()
            return InExpr(left, tuple(options), negated)
        return left

    def additive(self):
        left = self.multiplicative()
        while self.at_op("+", "-"):
            op = self.advance().text
            left = BinaryExpr(op, left, self.multiplicative())
        return left

    def multiplicative(self):
        left = self.unary()
        while self.at_op("*", "/"):
            op = self.advance().text
            left = BinaryExpr(op, left, self.unary())
        return left

    def unary(self):
        if self.at_op("!", "-", "+"):
            op = self.advance().text
            return UnaryExpr(op, self.unary())
        return self.primary()

    def primary(self):
        tok = self.tok
        if self.at_op("("):
            self.advance()
            expr = self.expression()
            self.expect_op(")")
            return expr
        if tok.kind == "VAR":
            self.advance()
            return Var(tok.text[1:])
        if tok.kind == "WORD":
            name = tok.text.upper()
            if name == "NOT" and self.at_kw("EXISTS", tok=self.peek()):
                self.advance()
                self.advance()
                return ExistsExpr(self.group(), negated=True)
            if name == "EXISTS":
                self.advance()
                return ExistsExpr(self.group())
            if name in BUILTINS:
                return self.call(name)
            if name in _UNSUPPORTED_BUILTINS:
                raise self.unsupported(f"function {name}")
            if tok.text in ("true", "false"):
                return self.literal()
            raise self._err(f"unknown function or keyword {tok.text!r}")
        if self.is_iri_start():
            iri = self.iri()
            if self.at_op("("):
                raise self.unsupported(f"extension function <{iri.value}>")
            return iri
        if tok.kind in ("STRING", "INTEGER", "DECIMAL", "DOUBLE"):
            return self.literal()
        raise self._err(f"unexpected {tok.text or 'end of query'!r} in expression")

    def call(self, name: str) -> FunctionCall:
        self.advance()
        self.expect_op("(")
        args = []
        while not self.at_op(")"):
            args.append(self.expression())
            if self.at_op(","):
                self.advance()
            elif not self.at_op(")"):
                raise self._err(f"expected ',' or ')' in {name} arguments")
        self.advance()
        lo, hi = BUILTINS[name]
        if not lo <= len(args) <= hi:
            raise self._err(f"{name} takes {lo}..{hi} arguments, got {len(args)}")
        if name == "BOUND" and not isinstance(args[0], Var):
            raise self._err("BOUND takes a variable")
        return FunctionCall(name, tuple(args))


def parse_query(text: str, strict: bool = True) -> Query:
    """Parse a SELECT query.

    With ``strict`` (the default) queries using a feature forbidden in
    SPARQL-based constraints raise :class:`ProhibitedFeatureError`.
    """
    query = _QueryParser(text).query()
    if strict:
        from .prohibited import check_prohibited

        violations = check_prohibited(query)
        if violations:
            raise ProhibitedFeatureError(violations)
    return query
