"""Tokenizer and recursive-descent parser for `.itp` process sources.

Deterministic with bounded backtracking (saved positions); every error
carries the source span it points at.  The grammar is documented in
docs/grammar.md.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from ..values import FALSE, TRUE, UNIT, Event, VEnum, VInt, VList, VPair, VStr, Value
from .ast import (
    ChanDeclNode,
    ConstDecl,
    EBinop,
    ECall,
    EList,
    ELit,
    EPair,
    EUnop,
    EVar,
    EvChannels,
    EvExplicit,
    PAssign,
    PChoice,
    PDiv,
    PDo,
    PGuard,
    PGuardProc,
    PHide,
    PIndexedInterleave,
    PInpValue,
    PInputPrefix,
    PInterleave,
    PLoop,
    PNsPar,
    POutputPrefix,
    PPar,
    PRef,
    PRet,
    PSeq,
    PSkip,
    PStop,
    PWhile,
    Program,
    ProcessDecl,
    SBind,
    SList,
    SProc,
    SRange,
    SRet,
    Span,
    StateField,
    TypeNode,
)


class ParseError(Exception):
    def __init__(self, message: str, span: Span, src: str = ""):
        self.message = message
        self.span = span
        self.src = src
        super().__init__(self._render())

    def _render(self) -> str:
        out = f"parse error at {self.span.line}:{self.span.col}: {self.message}"
        if self.src:
            lines = self.src.splitlines()
            if 1 <= self.span.line <= len(lines):
                line = lines[self.span.line - 1]
                out += "\n  " + line + "\n  " + " " * (self.span.col - 1) + "^"
        return out


KEYWORDS = {
    "chan", "const", "process", "state", "loop", "while", "do", "ret",
    "skip", "stop", "div", "guard", "true", "false", "not", "and", "or",
    "unit", "bool", "int", "str", "list", "enum",
}

SYMBOLS = [
    "{|", "|}", "[|", "|]", "|||", "[]", "->", "<-", ":=", "..", "++",
    "==", "!=", "<=", ">=", "(", ")", "{", "}", "[", "]", ",", ";", ":",
    ".", "?", "!", "&", "\\", "@", "+", "-", "*", "/", "%", "<", ">",
    "=", "|",
]

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<comment>--[^\n]*)"
    r"|(?P<int>\d+)"
    r"|(?P<ident>[A-Za-z_]\w*)"
    r'|(?P<str>"(\\.|[^"\\])*")'
    r"|(?P<sym>" + "|".join(re.escape(s) for s in SYMBOLS) + r")"
)


@dataclass(frozen=True)
class Token:
    kind: str  # kw | ident | int | str | sym | eof
    text: str
    span: Span


def tokenize(src: str) -> List[Token]:
    toks: List[Token] = []
    pos = 0
    line = 1
    line_start = 0
    n = len(src)
    while pos < n:
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            sp = Span(pos, pos + 1, line, pos - line_start + 1)
            raise ParseError(f"unexpected character {src[pos]!r}", sp, src)
        text = m.group(0)
        sp = Span(pos, m.end(), line, pos - line_start + 1)
        if m.lastgroup == "int":
            toks.append(Token("int", text, sp))
        elif m.lastgroup == "ident":
            toks.append(Token("kw" if text in KEYWORDS else "ident", text, sp))
        elif m.lastgroup == "str":
            toks.append(Token("str", text, sp))
        elif m.lastgroup == "sym":
            toks.append(Token("sym", text, sp))
        # whitespace / comments: track lines
        nl = text.count("\n")
        if nl:
            line += nl
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    toks.append(Token("eof", "", Span(n, n, line, n - line_start + 1)))
    return toks


def _unquote(text: str) -> str:
    out = []
    i = 1
    while i < len(text) - 1:
        ch = text[i]
        if ch == "\\":
            nxt = text[i + 1]
            out.append({"n": "\n", "t": "\t"}.get(nxt, nxt))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


class Parser:
    def __init__(self, src: str):
        self.src = src
        self.toks = tokenize(src)
        self.pos = 0

    # -- token plumbing ----------------------------------------------------

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind in ("sym", "kw")

    def eat(self, text: str) -> bool:
        if self.at(text):
            self.next()
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            t = self.peek()
            raise ParseError(f"expected {text!r}, found {t.text!r}", t.span, self.src)
        return self.next()

    def expect_ident(self, what: str = "identifier") -> Token:
        t = self.peek()
        if t.kind != "ident":
            raise ParseError(f"expected {what}, found {t.text!r}", t.span, self.src)
        return self.next()

    def save(self) -> int:
        return self.pos

    def restore(self, mark: int):
        self.pos = mark

    def err(self, msg: str, span: Optional[Span] = None):
        raise ParseError(msg, span or self.peek().span, self.src)

    # -- program -------------------------------------------------------------

    def parse_program(self) -> Program:
        decls = []
        while self.peek().kind != "eof":
            if self.at("chan"):
                decls.append(self.parse_chan_decl())
            elif self.at("const"):
                decls.append(self.parse_const_decl())
            elif self.at("process"):
                decls.append(self.parse_process_decl())
            else:
                self.err("expected a declaration (chan, const, or process)")
        return Program(tuple(decls))

    def parse_chan_decl(self) -> ChanDeclNode:
        start = self.expect("chan")
        name = self.expect_ident("channel name")
        self.expect(":")
        ty = self.parse_type()
        domain = None
        if self.at("{"):
            domain = self.parse_set()
        return ChanDeclNode(name.text, ty, domain, span=start.span)

    def parse_const_decl(self) -> ConstDecl:
        start = self.expect("const")
        name = self.expect_ident("constant name")
        self.expect("=")
        e = self.parse_expr()
        return ConstDecl(name.text, e, span=start.span)

    def parse_process_decl(self) -> ProcessDecl:
        start = self.expect("process")
        name = self.expect_ident("process name")
        params: List[Tuple[str, TypeNode]] = []
        if self.eat("("):
            while True:
                pn = self.expect_ident("parameter name")
                self.expect(":")
                pt = self.parse_type()
                params.append((pn.text, pt))
                if not self.eat(","):
                    break
            self.expect(")")
        self.expect("=")
        state = None
        if self.eat("state"):
            self.expect("{")
            fields = []
            while not self.at("}"):
                fn = self.expect_ident("state field name")
                self.expect(":")
                ft = self.parse_type()
                self.expect(":=")
                fi = self.parse_expr()
                fields.append(StateField(fn.text, ft, fi, span=fn.span))
                if not self.eat(","):
                    break
            self.expect("}")
            state = tuple(fields)
        body = self.parse_proc()
        return ProcessDecl(name.text, tuple(params), state, body, span=start.span)

    # -- types ------------------------------------------------------------------

    def parse_type(self) -> TypeNode:
        t = self.peek()
        if self.eat("unit"):
            base = TypeNode("unit", span=t.span)
        elif self.eat("bool"):
            base = TypeNode("bool", span=t.span)
        elif self.eat("int"):
            base = TypeNode("int", span=t.span)
        elif self.eat("str"):
            base = TypeNode("str", span=t.span)
        elif self.eat("enum"):
            self.expect("{")
            tags = [self.expect_ident("enum tag").text]
            while self.eat(","):
                tags.append(self.expect_ident("enum tag").text)
            self.expect("}")
            base = TypeNode("enum", tuple(tags), span=t.span)
        elif self.eat("("):
            a = self.parse_type()
            self.expect(",")
            b = self.parse_type()
            self.expect(")")
            base = TypeNode("pair", (a, b), span=t.span)
        else:
            self.err("expected a type")
        while self.eat("list"):
            base = TypeNode("list", (base,), span=t.span)
        return base

    # -- finite sets ---------------------------------------------------------------

    def parse_set(self):
        start = self.expect("{")
        if self.at("}"):
            self.next()
            return SList((), span=start.span)
        first = self.parse_expr()
        if self.eat(".."):
            if self.at("}"):
                self.err(
                    "input domains must be finite: give an upper bound, e.g. {0..3}",
                    start.span,
                )
            hi = self.parse_expr()
            self.expect("}")
            return SRange(first, hi, span=start.span)
        items = [first]
        while self.eat(","):
            items.append(self.parse_expr())
        self.expect("}")
        return SList(tuple(items), span=start.span)

    # -- event sets -------------------------------------------------------------------

    def parse_evset(self):
        t = self.peek()
        if self.eat("{|"):
            chans = [self.expect_ident("channel name").text]
            while self.eat(","):
                chans.append(self.expect_ident("channel name").text)
            self.expect("|}")
            return EvChannels(tuple(chans), span=t.span)
        if self.eat("{"):
            events: List[Tuple[str, Optional[Value]]] = []
            while not self.at("}"):
                ch = self.expect_ident("channel name").text
                v = None
                if self.eat("."):
                    v = self.parse_value_literal()
                events.append((ch, v))
                if not self.eat(","):
                    break
            self.expect("}")
            return EvExplicit(tuple(events), span=t.span)
        self.err("expected an event set: {| channels |} or { events }")

    # -- value literals ------------------------------------------------------------------

    def parse_value_literal(self) -> Value:
        t = self.peek()
        if t.kind == "int":
            self.next()
            return VInt(int(t.text))
        if self.eat("-"):
            n = self.peek()
            if n.kind != "int":
                self.err("expected a number after '-'")
            self.next()
            return VInt(-int(n.text))
        if t.kind == "str":
            self.next()
            return VStr(_unquote(t.text))
        if self.eat("true"):
            return TRUE
        if self.eat("false"):
            return FALSE
        if self.eat("[]"):
            return VList(())
        if self.eat("["):
            items = []
            while not self.at("]"):
                items.append(self.parse_value_literal())
                if not self.eat(","):
                    break
            self.expect("]")
            return VList(tuple(items))
        if self.eat("("):
            if self.eat(")"):
                return UNIT
            a = self.parse_value_literal()
            self.expect(",")
            b = self.parse_value_literal()
            self.expect(")")
            return VPair(a, b)
        if t.kind == "ident":
            self.next()
            return VEnum(t.text)
        self.err("expected a value literal")

    # -- expressions ------------------------------------------------------------------------

    def parse_expr(self):
        return self.parse_or()

    def parse_or(self):
        e = self.parse_and()
        while self.at("or"):
            t = self.next()
            e = EBinop("or", e, self.parse_and(), span=t.span)
        return e

    def parse_and(self):
        e = self.parse_not()
        while self.at("and"):
            t = self.next()
            e = EBinop("and", e, self.parse_not(), span=t.span)
        return e

    def parse_not(self):
        if self.at("not"):
            t = self.next()
            return EUnop("not", self.parse_not(), span=t.span)
        return self.parse_cmp()

    def parse_cmp(self):
        e = self.parse_add()
        for op in ("==", "!=", "<=", ">=", "<", ">"):
            if self.at(op):
                t = self.next()
                return EBinop(op, e, self.parse_add(), span=t.span)
        return e

    def parse_add(self):
        e = self.parse_mul()
        while True:
            if self.at("++"):
                t = self.next()
                e = EBinop("++", e, self.parse_mul(), span=t.span)
            elif self.at("+"):
                t = self.next()
                e = EBinop("+", e, self.parse_mul(), span=t.span)
            elif self.at("-"):
                t = self.next()
                e = EBinop("-", e, self.parse_mul(), span=t.span)
            else:
                return e

    def parse_mul(self):
        e = self.parse_unary()
        while True:
            for op in ("*", "/", "%"):
                if self.at(op):
                    t = self.next()
                    e = EBinop(op, e, self.parse_unary(), span=t.span)
                    break
            else:
                return e

    def parse_unary(self):
        if self.at("-"):
            t = self.next()
            return EUnop("-", self.parse_unary(), span=t.span)
        return self.parse_atom_expr()

    def parse_atom_expr(self):
        t = self.peek()
        if t.kind == "int":
            self.next()
            return ELit(VInt(int(t.text)), span=t.span)
        if t.kind == "str":
            self.next()
            return ELit(VStr(_unquote(t.text)), span=t.span)
        if self.eat("true"):
            return ELit(TRUE, span=t.span)
        if self.eat("false"):
            return ELit(FALSE, span=t.span)
        if self.eat("[]"):
            return EList((), span=t.span)
        if self.eat("["):
            items = []
            while not self.at("]"):
                items.append(self.parse_expr())
                if not self.eat(","):
                    break
            self.expect("]")
            return EList(tuple(items), span=t.span)
        if self.eat("("):
            if self.eat(")"):
                return ELit(UNIT, span=t.span)
            e = self.parse_expr()
            if self.eat(","):
                e2 = self.parse_expr()
                self.expect(")")
                return EPair(e, e2, span=t.span)
            self.expect(")")
            return e
        if t.kind == "ident":
            self.next()
            if self.at("("):
                mark = self.save()
                self.next()
                if self.at(")"):
                    self.restore(mark)
                    return EVar(t.text, span=t.span)
                args = [self.parse_expr()]
                while self.eat(","):
                    args.append(self.parse_expr())
                self.expect(")")
                return ECall(t.text, tuple(args), span=t.span)
            return EVar(t.text, span=t.span)
        self.err("expected an expression")

    # -- processes ---------------------------------------------------------------------------

    def parse_proc(self):
        return self.parse_choice()

    def parse_choice(self):
        p = self.parse_par()
        while self.at("[]"):
            t = self.next()
            p = PChoice(p, self.parse_par(), span=t.span)
        return p

    def parse_par(self):
        p = self.parse_hide()
        while True:
            if self.at("|||"):
                t = self.next()
                p = PInterleave(p, self.parse_hide(), span=t.span)
            elif self.at("[|"):
                t = self.next()
                mark = self.save()
                ns_form = self._try_ns_header()
                if ns_form is not None:
                    ns1, evset, ns2 = ns_form
                    self.expect("|]")
                    p = PNsPar(p, ns1, evset, ns2, self.parse_hide(), span=t.span)
                else:
                    self.restore(mark)
                    evset = self.parse_evset()
                    self.expect("|]")
                    p = PPar(p, evset, self.parse_hide(), span=t.span)
            else:
                return p

    def _try_ns_header(self):
        try:
            if not self.eat("{"):
                return None
            ns1 = []
            while not self.at("}"):
                ns1.append(self.expect_ident("state field").text)
                if not self.eat(","):
                    break
            self.expect("}")
            if not self.eat("|"):
                return None
            evset = self.parse_evset()
            if not self.eat("|"):
                return None
            self.expect("{")
            ns2 = []
            while not self.at("}"):
                ns2.append(self.expect_ident("state field").text)
                if not self.eat(","):
                    break
            self.expect("}")
            return tuple(ns1), evset, tuple(ns2)
        except ParseError:
            return None

    def parse_hide(self):
        p = self.parse_seq()
        while self.at("\\"):
            t = self.next()
            p = PHide(p, self.parse_evset(), span=t.span)
        return p

    def parse_seq(self, no_seq: bool = False):
        p = self.parse_prefix()
        if no_seq:
            return p
        while self.at(";"):
            t = self.next()
            p = PSeq(p, self.parse_prefix(), span=t.span)
        return p

    def parse_prefix(self):
        t = self.peek()
        if self.eat("skip"):
            return PSkip(span=t.span)
        if self.eat("stop"):
            return PStop(span=t.span)
        if self.eat("div"):
            return PDiv(span=t.span)
        if self.eat("ret"):
            return PRet(self.parse_expr(), span=t.span)
        if self.eat("guard"):
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            return PGuardProc(cond, span=t.span)
        if self.eat("do"):
            return self.parse_do(t.span)
        if self.eat("loop"):
            self.expect("{")
            body = self.parse_proc()
            self.expect("}")
            return PLoop(body, span=t.span)
        if self.eat("while"):
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            self.expect("{")
            body = self.parse_proc()
            self.expect("}")
            return PWhile(cond, body, span=t.span)
        if self.eat("|||"):
            var = self.expect_ident("index variable")
            self.expect(":")
            dom = self.parse_set()
            self.expect("@")
            body = self.parse_prefix()
            return PIndexedInterleave(var.text, dom, body, span=t.span)

        # assignment: x, y := e, f
        mark = self.save()
        asg = self._try_assignment()
        if asg is not None:
            return asg
        self.restore(mark)

        # guard: expr & proc
        guard = self._try_expr_guard()
        if guard is not None:
            return guard
        self.restore(mark)

        # channel operation or process reference
        if t.kind == "ident":
            return self._parse_ident_proc()

        if self.at("("):
            self.next()
            p = self.parse_proc()
            self.expect(")")
            return p

        self.err("expected a process")

    def _try_assignment(self):
        if self.peek().kind != "ident":
            return None
        targets = [self.next().text]
        while self.at(",") and self.peek(1).kind == "ident":
            self.next()
            targets.append(self.next().text)
        if not self.at(":="):
            return None
        t = self.next()
        exprs = [self.parse_expr()]
        while self.eat(","):
            exprs.append(self.parse_expr())
        if len(exprs) != len(targets):
            self.err(f"{len(targets)} targets but {len(exprs)} expressions", t.span)
        return PAssign(tuple(targets), tuple(exprs), span=t.span)

    def _try_expr_guard(self):
        mark = self.save()
        try:
            cond = self.parse_expr()
        except ParseError:
            self.restore(mark)
            return None
        if self.at("&"):
            t = self.next()
            return PGuard(cond, self.parse_prefix(), span=t.span)
        self.restore(mark)
        return None

    def _parse_ident_proc(self):
        name = self.next()
        dots: List[object] = []
        while self.at("."):
            self.next()
            dots.append(self.parse_unary())
        if self.at("?"):
            self.next()
            # binder form: c?(x) / c?(x : {..}) -> P ;  value form: c?{..}
            if self.at("("):
                self.next()
                binder = self.expect_ident("input binder")
                domain = None
                if self.eat(":"):
                    domain = self.parse_set()
                self.expect(")")
                self.expect("->")
                cont = self.parse_prefix()
                return PInputPrefix(name.text, tuple(dots), binder.text, domain, cont, span=name.span)
            domain = None
            if self.at("{"):
                domain = self.parse_set()
            return PInpValue(name.text, tuple(dots), domain, span=name.span)
        if self.at("!"):
            self.next()
            e = self.parse_unary()
            cont = None
            if self.eat("->"):
                cont = self.parse_prefix()
            return POutputPrefix(name.text, tuple(dots), e, cont, span=name.span)
        if self.at("->"):
            self.next()
            cont = self.parse_prefix()
            return POutputPrefix(name.text, tuple(dots), None, cont, span=name.span)
        if dots:
            self.err("expected '?', '!' or '->' after a dotted channel", name.span)
        if self.at("("):
            self.next()
            args = []
            if not self.at(")"):
                args.append(self.parse_expr())
                while self.eat(","):
                    args.append(self.parse_expr())
            self.expect(")")
            return PRef(name.text, tuple(args), span=name.span)
        return PRef(name.text, (), span=name.span)

    def parse_do(self, span):
        self.expect("{")
        stmts: List[object] = []
        while True:
            t = self.peek()
            if self.eat("ret"):
                stmts.append(SRet(self.parse_expr(), span=t.span))
            elif t.kind == "ident" and self.peek(1).text == "<-":
                self.next()
                self.next()
                stmts.append(SBind(t.text, self._parse_stmt_proc(), span=t.span))
            else:
                stmts.append(SProc(self._parse_stmt_proc(), span=t.span))
            if not self.eat(";"):
                break
        self.expect("}")
        return PDo(tuple(stmts), span=span)

    def _parse_stmt_proc(self):
        # statements bind looser than prefix but `;` separates statements,
        # so parse everything except top-level seq
        p = self.parse_prefix()
        while True:
            if self.at("[]"):
                t = self.next()
                p = PChoice(p, self.parse_prefix(), span=t.span)
            elif self.at("|||"):
                t = self.next()
                p = PInterleave(p, self.parse_prefix(), span=t.span)
            else:
                return p


def parse(src: str) -> Program:
    """Parse a whole source unit."""
    return Parser(src).parse_program()


def parse_proc_text(src: str):
    """Parse a single process expression (tests and the CLI prompt)."""
    p = Parser(src)
    node = p.parse_proc()
    if p.peek().kind != "eof":
        p.err(f"trailing input {p.peek().text!r}")
    return node


def parse_value(text: str) -> Value:
    """Parse a value literal in the canonical display syntax."""
    p = Parser(text)
    v = p.parse_value_literal()
    if p.peek().kind != "eof":
        p.err(f"trailing input {p.peek().text!r}")
    return v


def parse_event(text: str) -> Event:
    """Parse an event literal: channel or channel.value."""
    p = Parser(text)
    name = p.expect_ident("channel name")
    payload = UNIT
    if p.eat("."):
        payload = p.parse_value_literal()
    if p.peek().kind != "eof":
        p.err(f"trailing input {p.peek().text!r}")
    return Event(name.text, payload)
