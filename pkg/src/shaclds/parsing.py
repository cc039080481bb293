"""TriG, Turtle and N-Quads parsing into :class:`Dataset` objects."""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union
from urllib.parse import urljoin

from .model import BNode, Dataset, Graph, IRI, Literal

XSD = "http://www.w3.org/2001/XMLSchema#"
RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"

FORMATS = ("trig", "turtle", "nquads")


@dataclass(frozen=True)
class ParseDiagnostic:
    line: int
    column: int
    message: str
    severity: str = "error"

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


class ParseError(ValueError):
    def __init__(self, diagnostic: ParseDiagnostic, source: Optional[str] = None) -> None:
        self.diagnostic = diagnostic
        self.source = source
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{diagnostic}")


_PN_CHARS_BASE = (
    "A-Za-z\u00C0-\u00D6\u00D8-\u00F6\u00F8-\u02FF\u0370-\u037D\u037F-\u1FFF"
    "\u200C-\u200D\u2070-\u218F\u2C00-\u2FEF\u3001-\uD7FF\uF900-\uFDCF"
    "\uFDF0-\uFFFD\U00010000-\U000EFFFF"
)
_PN_CHARS_U = _PN_CHARS_BASE + "_"
_PN_CHARS = _PN_CHARS_U + r"\-0-9\u00B7\u0300-\u036F\u203F-\u2040"
_PLX = r"(?:%[0-9A-Fa-f]{2}|\\[_~.\-!$&'()*+,;=/?#@%])"
_PN_PREFIX = f"[{_PN_CHARS_BASE}](?:[{_PN_CHARS}.]*[{_PN_CHARS}])?"
_PN_LOCAL = (
    f"(?:[{_PN_CHARS_U}:0-9]|{_PLX})"
    f"(?:(?:[{_PN_CHARS}.:]|{_PLX})*(?:[{_PN_CHARS}:]|{_PLX}))?"
)
_UCHAR = r"\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8}"
_ECHAR = r"\\[tbnrf\"'\\]"

_TOKEN_SPEC = [
    ("IRIREF", rf"<(?:[^\x00-\x20<>\"{{}}|^`\\]|{_UCHAR})*>"),
    ("STRING_LONG2", rf'"""(?:(?:"|"")?(?:[^"\\]|{_ECHAR}|{_UCHAR}))*"""'),
    ("STRING_LONG1", rf"'''(?:(?:'|'')?(?:[^'\\]|{_ECHAR}|{_UCHAR}))*'''"),
    ("STRING2", rf'"(?:[^"\\\n\r]|{_ECHAR}|{_UCHAR})*"'),
    ("STRING1", rf"'(?:[^'\\\n\r]|{_ECHAR}|{_UCHAR})*'"),
    ("BNODE", rf"_:[{_PN_CHARS_U}0-9](?:[{_PN_CHARS}.]*[{_PN_CHARS}])?"),
    ("AT", r"@[a-zA-Z]+(?:-[a-zA-Z0-9]+)*"),
    ("PNAME_LN", rf"(?:{_PN_PREFIX})?:{_PN_LOCAL}"),
    ("PNAME_NS", rf"(?:{_PN_PREFIX})?:"),
    ("DOUBLE", r"[+-]?(?:[0-9]+\.[0-9]*[eE][+-]?[0-9]+|\.?[0-9]+[eE][+-]?[0-9]+)"),
    ("DECIMAL", r"[+-]?[0-9]*\.[0-9]+"),
    ("INTEGER", r"[+-]?[0-9]+"),
    ("WORD", r"[A-Za-z][A-Za-z0-9_]*"),
    ("HATS", r"\^\^"),
    ("PUNCT", r"[.;,\[\](){}]"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{name}>{rx})" for name, rx in _TOKEN_SPEC))
_SKIP_RE = re.compile(r"(?:[ \t\r\n]+|#[^\n]*)+")
_ESCAPE_RE = re.compile(rf"{_UCHAR}|{_ECHAR}")
_LOCAL_ESC_RE = re.compile(r"\\(.)")
_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")

_ECHARS = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


def _unescape(text: str) -> str:
    def repl(m: re.Match) -> str:
        s = m.group(0)
        if s[1] in "uU":
            return chr(int(s[2:], 16))
        return _ECHARS[s[1]]

    return _ESCAPE_RE.sub(repl, text)


@dataclass
class Token:
    kind: str
    text: str
    pos: int


class _Lexer:
    def __init__(self, text: str) -> None:
        self.text = text
        self.line_starts = [0] + [m.end() for m in re.finditer("\n", text)]
        self.tokens: list[Token] = []
        pos = 0
        n = len(text)
        while True:
            m = _SKIP_RE.match(text, pos)
            if m:
                pos = m.end()
            if pos >= n:
                break
            m = _TOKEN_RE.match(text, pos)
            if not m:
                raise self.error(pos, f"unexpected character {text[pos]!r}")
            self.tokens.append(Token(m.lastgroup, m.group(0), pos))
            pos = m.end()
        self.tokens.append(Token("EOF", "", n))

    def position(self, offset: int) -> tuple[int, int]:
        idx = bisect.bisect_right(self.line_starts, offset) - 1
        return idx + 1, offset - self.line_starts[idx] + 1

    def error(self, offset: int, message: str) -> ParseError:
        line, col = self.position(offset)
        return ParseError(ParseDiagnostic(line, col, message))


class _Parser:
    def __init__(self, text: str, fmt: str, base: Optional[str]) -> None:
        self.lexer = _Lexer(text)
        self.tokens = self.lexer.tokens
        self.i = 0
        self.fmt = fmt
        self.base = base
        self.prefixes: dict[str, str] = {}
        self.bnode_labels: dict[str, BNode] = {}
        self.bnode_counter = 0
        self.dataset = Dataset()
        self.graph: Graph = self.dataset.default

    # -- token helpers --

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def error(self, message: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.tok
        return self.lexer.error(tok.pos, message)

    def is_punct(self, ch: str, tok: Optional[Token] = None) -> bool:
        tok = tok or self.tok
        return tok.kind == "PUNCT" and tok.text == ch

    def expect(self, ch: str) -> Token:
        if not self.is_punct(ch):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {ch!r}, found {found!r}")
        return self.advance()

    def is_word(self, word: str, tok: Optional[Token] = None) -> bool:
        tok = tok or self.tok
        return tok.kind == "WORD" and tok.text.upper() == word

    # -- terms --

    def fresh_bnode(self) -> BNode:
        node = BNode(f"b{self.bnode_counter}")
        self.bnode_counter += 1
        return node

    def bnode(self, label: str) -> BNode:
        node = self.bnode_labels.get(label)
        if node is None:
            node = self.bnode_labels[label] = self.fresh_bnode()
        return node

    def resolve(self, iri: str, tok: Token) -> IRI:
        if not _SCHEME_RE.match(iri):
            if self.base is None:
                raise self.error(f"relative IRI <{iri}> with no base", tok)
            iri = urljoin(self.base, iri)
            if not _SCHEME_RE.match(iri):
                raise self.error(f"cannot resolve relative IRI <{iri}>", tok)
        return IRI(iri)

    def iriref(self, tok: Token) -> IRI:
        return self.resolve(_unescape(tok.text[1:-1]), tok)

    def pname(self, tok: Token) -> IRI:
        prefix, _, local = tok.text.partition(":")
        if prefix not in self.prefixes:
            raise self.error(f"undeclared prefix {prefix!r}", tok)
        return IRI(self.prefixes[prefix] + _LOCAL_ESC_RE.sub(r"\1", local))

    def iri(self) -> IRI:
        tok = self.tok
        if tok.kind == "IRIREF":
            self.advance()
            return self.iriref(tok)
        if tok.kind in ("PNAME_LN", "PNAME_NS"):
            self.advance()
            return self.pname(tok)
        raise self.error(f"expected an IRI, found {tok.text or 'end of input'!r}")

    def emit(self, s, p, o) -> None:
        self.graph.add((s, p, o))

    # -- document --

    def parse(self) -> Dataset:
        if self.fmt == "nquads":
            self.parse_nquads()
        else:
            while self.tok.kind != "EOF":
                self.statement()
        return self.dataset

    def directive(self) -> bool:
        tok = self.tok
        if tok.kind == "AT" and tok.text in ("@prefix", "@base"):
            self.advance()
            if tok.text == "@prefix":
                self.prefix_decl()
            else:
                self.base_decl()
            self.expect(".")
            return True
        if self.is_word("PREFIX") and self.peek().kind == "PNAME_NS":
            self.advance()
            self.prefix_decl()
            return True
        if self.is_word("BASE") and self.peek().kind == "IRIREF":
            self.advance()
            self.base_decl()
            return True
        return False

    def prefix_decl(self) -> None:
        tok = self.tok
        if tok.kind != "PNAME_NS":
            raise self.error("expected a prefix name")
        self.advance()
        ref = self.tok
        if ref.kind != "IRIREF":
            raise self.error("expected an IRI for the prefix")
        self.advance()
        self.prefixes[tok.text[:-1]] = self.iriref(ref).value

    def base_decl(self) -> None:
        ref = self.tok
        if ref.kind != "IRIREF":
            raise self.error("expected an IRI for the base")
        self.advance()
        self.base = self.iriref(ref).value

    def statement(self) -> None:
        if self.directive():
            return
        if self.fmt == "turtle":
            self.triples()
            self.expect(".")
            return
        tok = self.tok
        if self.is_word("GRAPH"):
            self.advance()
            name = self.graph_label()
            self.wrapped_graph(name)
            return
        if self.is_punct("{"):
            self.wrapped_graph(None)
            return
        if tok.kind in ("IRIREF", "PNAME_LN", "PNAME_NS", "BNODE") and self.is_punct("{", self.peek()):
            name = self.graph_label()
            self.wrapped_graph(name)
            return
        if self.is_punct("[") and self.is_punct("]", self.peek()) and self.is_punct("{", self.peek(2)):
            raise self.error("blank-node graph names are not supported")
        self.triples()
        self.expect(".")

    def graph_label(self) -> IRI:
        if self.tok.kind == "BNODE":
            raise self.error("blank-node graph names are not supported")
        return self.iri()

    def wrapped_graph(self, name: Optional[IRI]) -> None:
        self.expect("{")
        previous = self.graph
        if name is None:
            self.graph = self.dataset.default
        else:
            self.graph = self.dataset.named.setdefault(name, Graph())
        while not self.is_punct("}"):
            if self.tok.kind == "EOF":
                raise self.error("unterminated graph block")
            self.triples()
            if self.is_punct("."):
                self.advance()
            elif not self.is_punct("}"):
                raise self.error(f"expected '.' or '}}', found {self.tok.text!r}")
        self.advance()
        self.graph = previous

    def triples(self) -> None:
        if self.is_punct("["):
            subject = self.blank_node_property_list()
            if self.is_punct(".") or self.is_punct("}"):
                return
            self.predicate_object_list(subject)
            return
        if self.is_punct("("):
            subject = self.collection()
        else:
            subject = self.subject()
        self.predicate_object_list(subject)

    def subject(self):
        tok = self.tok
        if tok.kind == "BNODE":
            self.advance()
            return self.bnode(tok.text[2:])
        if tok.kind in ("IRIREF", "PNAME_LN", "PNAME_NS"):
            return self.iri()
        raise self.error(f"expected a subject, found {tok.text or 'end of input'!r}")

    def verb(self) -> IRI:
        tok = self.tok
        if tok.kind == "WORD" and tok.text == "a":
            self.advance()
            return IRI(RDF + "type")
        if tok.kind in ("IRIREF", "PNAME_LN", "PNAME_NS"):
            return self.iri()
        raise self.error(f"expected a predicate, found {tok.text or 'end of input'!r}")

    def predicate_object_list(self, subject) -> None:
        self.object_list(subject, self.verb())
        while self.is_punct(";"):
            while self.is_punct(";"):
                self.advance()
            if self.is_punct(".") or self.is_punct("]") or self.is_punct("}") or self.tok.kind == "EOF":
                return
            self.object_list(subject, self.verb())

    def object_list(self, subject, predicate) -> None:
        self.emit(subject, predicate, self.object())
        while self.is_punct(","):
            self.advance()
            self.emit(subject, predicate, self.object())

    def object(self):
        tok = self.tok
        if tok.kind == "BNODE":
            self.advance()
            return self.bnode(tok.text[2:])
        if tok.kind in ("IRIREF", "PNAME_LN", "PNAME_NS"):
            return self.iri()
        if self.is_punct("["):
            return self.blank_node_property_list()
        if self.is_punct("("):
            return self.collection()
        return self.literal()

    def literal(self) -> Literal:
        tok = self.tok
        kind = tok.kind
        if kind.startswith("STRING"):
            self.advance()
            quote = 3 if kind.startswith("STRING_LONG") else 1
            lexical = _unescape(tok.text[quote:-quote])
            if self.tok.kind == "AT":
                lang = self.advance().text[1:]
                return Literal(lexical, language=lang)
            if self.tok.kind == "HATS":
                self.advance()
                return Literal(lexical, self.iri().value)
            return Literal(lexical)
        if kind == "INTEGER":
            self.advance()
            return Literal(tok.text, XSD + "integer")
        if kind == "DECIMAL":
            self.advance()
            return Literal(tok.text, XSD + "decimal")
        if kind == "DOUBLE":
            self.advance()
            return Literal(tok.text, XSD + "double")
        if kind == "WORD" and tok.text in ("true", "false"):
            self.advance()
            return Literal(tok.text, XSD + "boolean")
        raise self.error(f"expected an object, found {tok.text or 'end of input'!r}")

    def blank_node_property_list(self) -> BNode:
        self.expect("[")
        node = self.fresh_bnode()
        if self.is_punct("]"):
            self.advance()
            return node
        self.predicate_object_list(node)
        self.expect("]")
        return node

    def collection(self):
        self.expect("(")
        items = []
        while not self.is_punct(")"):
            if self.tok.kind == "EOF":
                raise self.error("unterminated collection")
            items.append(self.object())
        self.advance()
        if not items:
            return IRI(RDF + "nil")
        cells = [self.fresh_bnode() for _ in items]
        for idx, (cell, item) in enumerate(zip(cells, items)):
            self.emit(cell, IRI(RDF + "first"), item)
            rest = cells[idx + 1] if idx + 1 < len(cells) else IRI(RDF + "nil")
            self.emit(cell, IRI(RDF + "rest"), rest)
        return cells[0]

    # -- N-Quads --

    def parse_nquads(self) -> None:
        while self.tok.kind != "EOF":
            s = self.nq_term(("IRIREF", "BNODE"), "subject")
            p = self.nq_term(("IRIREF",), "predicate")
            o = self.nq_term(("IRIREF", "BNODE", "STRING2"), "object")
            g = None
            if self.tok.kind in ("IRIREF",):
                g = self.nq_term(("IRIREF",), "graph label")
            elif self.tok.kind == "BNODE":
                raise self.error("blank-node graph names are not supported")
            self.expect(".")
            graph = self.dataset.default if g is None else self.dataset.named.setdefault(g, Graph())
            graph.add((s, p, o))

    def nq_term(self, kinds: tuple, role: str):
        tok = self.tok
        if tok.kind not in kinds:
            raise self.error(f"expected {role}, found {tok.text or 'end of input'!r}")
        if tok.kind == "IRIREF":
            self.advance()
            value = _unescape(tok.text[1:-1])
            if not _SCHEME_RE.match(value):
                raise self.error(f"relative IRI <{value}> not allowed in N-Quads", tok)
            return IRI(value)
        if tok.kind == "BNODE":
            self.advance()
            return self.bnode(tok.text[2:])
        self.advance()
        lexical = _unescape(tok.text[1:-1])
        if self.tok.kind == "AT":
            return Literal(lexical, language=self.advance().text[1:])
        if self.tok.kind == "HATS":
            self.advance()
            return Literal(lexical, self.nq_term(("IRIREF",), "datatype IRI").value)
        return Literal(lexical)


def parse_dataset(data: Union[bytes, str], format: str = "trig",
                  base: Optional[str] = None) -> Dataset:
    """Parse a whole document.

    Blank nodes are relabelled ``b0, b1, ...`` in order of first appearance,
    so equal input always yields a term-identical dataset.
    """
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(ParseDiagnostic(1, exc.start + 1, "input is not valid UTF-8")) from None
    else:
        text = data
    if text.startswith("\ufeff"):
        text = text[1:]
    return _Parser(text, format, base).parse()


def parse_graph(data: Union[bytes, str], base: Optional[str] = None) -> Graph:
    return parse_dataset(data, "turtle", base).default


def guess_format(path: Union[str, Path]) -> str:
    suffix = Path(path).suffix.lower()
    return {".nq": "nquads", ".ttl": "turtle", ".nt": "nquads"}.get(suffix, "trig")


def load_dataset(path: Union[str, Path], format: Optional[str] = None) -> Dataset:
    path = Path(path)
    try:
        return parse_dataset(path.read_bytes(), format or guess_format(path))
    except ParseError as exc:
        raise ParseError(exc.diagnostic, str(path)) from None
