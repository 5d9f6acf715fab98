"""Tokenizer and recursive-descent syntax check for the ASP-Core-2 subset
that the encoders emit."""

from __future__ import annotations

import re
from typing import List, NamedTuple

_TOKEN = re.compile(r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<directive>\#[a-z]+)
  | (?P<number>\d+)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<id>[a-z][A-Za-z0-9_']*)
  | (?P<var>[A-Z_][A-Za-z0-9_']*)
  | (?P<op>:-|\.\.|!=|<>|<=|>=|[=<>.,;:(){}+\-*/\\|])
""", re.VERBOSE)


class Token(NamedTuple):
    kind: str
    text: str
    line: int


class AspSyntaxError(ValueError):
    def __init__(self, message, line):
        super().__init__("line %d: %s" % (line, message))
        self.line = line


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos, line = 0, 1
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match:
            raise AspSyntaxError("unexpected character %r" % text[pos], line)
        kind = match.lastgroup
        value = match.group()
        if kind != "ws":
            tokens.append(Token(kind, value, line))
        line += value.count("\n")
        pos = match.end()
    tokens.append(Token("eof", "", line))
    return tokens


_CMP = {"=", "!=", "<>", "<", ">", "<=", ">="}


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def at(self, text=None, kind=None):
        t = self.tok
        return (text is None or t.text == text) and (kind is None or t.kind == kind)

    def eat(self, text=None, kind=None):
        if not self.at(text, kind):
            want = text or kind
            raise AspSyntaxError("expected %s, found %r" % (want, self.tok.text or "end of input"),
                                 self.tok.line)
        t = self.tok
        self.i += 1
        return t

    def program(self):
        count = 0
        while not self.at(kind="eof"):
            self.statement()
            count += 1
        return count

    def statement(self):
        if self.at(kind="directive"):
            return self.directive()
        if self.at(":-"):
            self.eat(":-")
            self.body()
            self.eat(".")
            return
        self.head()
        if self.at(":-"):
            self.eat(":-")
            self.body()
        self.eat(".")

    def directive(self):
        name = self.eat(kind="directive")
        if name.text == "#const":
            self.eat(kind="id")
            self.eat("=")
            self.term()
        elif name.text == "#show":
            if self.at(kind="id"):
                self.eat(kind="id")
                self.eat("/")
                self.eat(kind="number")
        else:
            raise AspSyntaxError("unknown directive %s" % name.text, name.line)
        self.eat(".")

    def head(self):
        if self.at("{") or self._starts_bound_choice():
            self.choice()
        else:
            self.atom()

    def _starts_bound_choice(self):
        return self.tok.kind in ("number", "var") and self.toks[self.i + 1].text == "{"

    def choice(self):
        if not self.at("{"):
            self.term()
        self.eat("{")
        if not self.at("}"):
            self.choice_element()
            while self.at(";"):
                self.eat(";")
                self.choice_element()
        self.eat("}")
        if not self.at(":-") and not self.at("."):
            self.term()

    def choice_element(self):
        self.atom()
        if self.at(":"):
            self.eat(":")
            self.literal()
            while self.at(","):
                self.eat(",")
                self.literal()

    def body(self):
        self.literal()
        while self.at(","):
            self.eat(",")
            self.literal()

    def literal(self):
        if self.at("not", "id"):
            self.eat()
            self.atom()
            return
        # comparison or atom
        start = self.i
        if self.at(kind="id"):
            self.atom()
            if self.tok.text not in _CMP:
                return
            self.i = start
        self.term()
        if self.tok.text not in _CMP:
            raise AspSyntaxError("expected comparison, found %r" % self.tok.text, self.tok.line)
        self.eat()
        self.term()

    def atom(self):
        self.eat(kind="id")
        if self.at("("):
            self.eat("(")
            self.terms()
            self.eat(")")

    def terms(self):
        self.term()
        while self.at(","):
            self.eat(",")
            self.term()

    def term(self):
        self.factor()
        while self.tok.text in ("+", "-", "*", "/", "\\", ".."):
            self.eat()
            self.factor()

    def factor(self):
        t = self.tok
        if t.text == "-":
            self.eat()
            self.factor()
        elif t.kind in ("number", "var", "string"):
            self.eat()
        elif t.kind == "id":
            self.atom()
        elif t.text == "(":
            self.eat("(")
            self.terms()
            self.eat(")")
        else:
            raise AspSyntaxError("expected a term, found %r" % (t.text or "end of input"), t.line)


def check_syntax(text: str) -> int:
    """Raise AspSyntaxError unless ``text`` parses; returns the statement count."""
    return _Parser(tokenize(text)).program()
