"""Syntax tree for the process language, with spans and a pretty-printer.

Node equality ignores spans so parse∘pretty round-trips compare cleanly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

from ..values import Value, format_value


@dataclass(frozen=True)
class Span:
    start: int
    end: int
    line: int
    col: int

    def __repr__(self):
        return f"{self.line}:{self.col}"


NO_SPAN = Span(0, 0, 0, 0)


def _sp():
    return field(default=NO_SPAN, compare=False, repr=False)


# -- types -------------------------------------------------------------------


@dataclass(frozen=True)
class TypeNode:
    kind: str  # unit|bool|int|str|list|pair|enum
    args: tuple = ()
    span: Span = _sp()

    def pretty(self) -> str:
        if self.kind == "list":
            return f"{self.args[0].pretty()} list"
        if self.kind == "pair":
            return f"({self.args[0].pretty()}, {self.args[1].pretty()})"
        if self.kind == "enum":
            return "enum {" + ", ".join(self.args) + "}"
        return self.kind


# -- expressions ----------------------------------------------------------------


@dataclass(frozen=True)
class ELit:
    value: Value
    span: Span = _sp()

    def pretty(self):
        return format_value(self.value)


@dataclass(frozen=True)
class EVar:
    name: str
    span: Span = _sp()

    def pretty(self):
        return self.name


@dataclass(frozen=True)
class EUnop:
    op: str
    arg: "ExprNode"
    span: Span = _sp()

    def pretty(self):
        if self.op == "not":
            return f"not {self.arg.pretty()}"
        return f"{self.op}{self.arg.pretty()}"


@dataclass(frozen=True)
class EBinop:
    op: str
    left: "ExprNode"
    right: "ExprNode"
    span: Span = _sp()

    def pretty(self):
        return f"({self.left.pretty()} {self.op} {self.right.pretty()})"


@dataclass(frozen=True)
class ECall:
    fn: str
    args: Tuple["ExprNode", ...]
    span: Span = _sp()

    def pretty(self):
        return f"{self.fn}(" + ", ".join(a.pretty() for a in self.args) + ")"


@dataclass(frozen=True)
class EList:
    items: Tuple["ExprNode", ...]
    span: Span = _sp()

    def pretty(self):
        return "[" + ", ".join(a.pretty() for a in self.items) + "]"


@dataclass(frozen=True)
class EPair:
    fst: "ExprNode"
    snd: "ExprNode"
    span: Span = _sp()

    def pretty(self):
        return f"({self.fst.pretty()}, {self.snd.pretty()})"


ExprNode = object  # union of the above


# -- finite sets -------------------------------------------------------------------


@dataclass(frozen=True)
class SRange:
    lo: ExprNode
    hi: ExprNode
    span: Span = _sp()

    def pretty(self):
        return f"{{{self.lo.pretty()}..{self.hi.pretty()}}}"


@dataclass(frozen=True)
class SList:
    items: Tuple[ExprNode, ...]
    span: Span = _sp()

    def pretty(self):
        return "{" + ", ".join(a.pretty() for a in self.items) + "}"


SetNode = object


# -- event sets ----------------------------------------------------------------------


@dataclass(frozen=True)
class EvChannels:
    channels: Tuple[str, ...]
    span: Span = _sp()

    def pretty(self):
        return "{| " + ", ".join(self.channels) + " |}"


@dataclass(frozen=True)
class EvExplicit:
    events: Tuple[Tuple[str, Optional[Value]], ...]  # (channel, payload literal)
    span: Span = _sp()

    def pretty(self):
        parts = []
        for ch, v in self.events:
            parts.append(ch if v is None else f"{ch}.{format_value(v)}")
        return "{" + ", ".join(parts) + "}"


EvSetNode = object


# -- processes ------------------------------------------------------------------------


@dataclass(frozen=True)
class PSkip:
    span: Span = _sp()

    def pretty(self, ind=""):
        return "skip"


@dataclass(frozen=True)
class PStop:
    span: Span = _sp()

    def pretty(self, ind=""):
        return "stop"


@dataclass(frozen=True)
class PDiv:
    span: Span = _sp()

    def pretty(self, ind=""):
        return "div"


@dataclass(frozen=True)
class PRet:
    expr: ExprNode
    span: Span = _sp()

    def pretty(self, ind=""):
        return f"ret {self.expr.pretty()}"


@dataclass(frozen=True)
class PGuardProc:
    cond: ExprNode
    span: Span = _sp()

    def pretty(self, ind=""):
        return f"guard({self.cond.pretty()})"


@dataclass(frozen=True)
class PInputPrefix:
    channel: str
    dots: Tuple[ExprNode, ...]
    binder: str
    domain: Optional[SetNode]
    cont: "ProcNode"
    span: Span = _sp()

    def pretty(self, ind=""):
        ch = self.channel + "".join("." + d.pretty() for d in self.dots)
        dom = f" : {self.domain.pretty()}" if self.domain is not None else ""
        return f"{ch}?({self.binder}{dom}) -> {self.cont.pretty(ind)}"


@dataclass(frozen=True)
class PInpValue:
    channel: str
    dots: Tuple[ExprNode, ...]
    domain: Optional[SetNode]
    span: Span = _sp()

    def pretty(self, ind=""):
        ch = self.channel + "".join("." + d.pretty() for d in self.dots)
        dom = self.domain.pretty() if self.domain is not None else "?"
        return f"{ch}?{dom}"


@dataclass(frozen=True)
class POutputPrefix:
    channel: str
    dots: Tuple[ExprNode, ...]
    expr: Optional[ExprNode]  # None: bare sync on a unit channel
    cont: Optional["ProcNode"]  # None: implicit skip (statement position)
    span: Span = _sp()

    def pretty(self, ind=""):
        ch = self.channel + "".join("." + d.pretty() for d in self.dots)
        head = ch if self.expr is None else f"{ch}!{self.expr.pretty()}"
        if self.cont is None:
            return head
        return f"{head} -> {self.cont.pretty(ind)}"


@dataclass(frozen=True)
class PGuard:
    cond: ExprNode
    cont: "ProcNode"
    span: Span = _sp()

    def pretty(self, ind=""):
        return f"{self.cond.pretty()} & {self.cont.pretty(ind)}"


@dataclass(frozen=True)
class PAssign:
    targets: Tuple[str, ...]
    exprs: Tuple[ExprNode, ...]
    span: Span = _sp()

    def pretty(self, ind=""):
        return ", ".join(self.targets) + " := " + ", ".join(e.pretty() for e in self.exprs)


@dataclass(frozen=True)
class PChoice:
    left: "ProcNode"
    right: "ProcNode"
    span: Span = _sp()

    def pretty(self, ind=""):
        return f"({self.left.pretty(ind)} [] {self.right.pretty(ind)})"


@dataclass(frozen=True)
class PSeq:
    left: "ProcNode"
    right: "ProcNode"
    span: Span = _sp()

    def pretty(self, ind=""):
        return f"({self.left.pretty(ind)} ; {self.right.pretty(ind)})"


@dataclass(frozen=True)
class PPar:
    left: "ProcNode"
    evset: EvSetNode
    right: "ProcNode"
    span: Span = _sp()

    def pretty(self, ind=""):
        return f"({self.left.pretty(ind)} [| {self.evset.pretty()} |] {self.right.pretty(ind)})"


@dataclass(frozen=True)
class PInterleave:
    left: "ProcNode"
    right: "ProcNode"
    span: Span = _sp()

    def pretty(self, ind=""):
        return f"({self.left.pretty(ind)} ||| {self.right.pretty(ind)})"


@dataclass(frozen=True)
class PNsPar:
    left: "ProcNode"
    ns1: Tuple[str, ...]
    evset: EvSetNode
    ns2: Tuple[str, ...]
    right: "ProcNode"
    span: Span = _sp()

    def pretty(self, ind=""):
        n1 = "{" + ", ".join(self.ns1) + "}"
        n2 = "{" + ", ".join(self.ns2) + "}"
        return (
            f"({self.left.pretty(ind)} [| {n1} | {self.evset.pretty()} | {n2} |] "
            f"{self.right.pretty(ind)})"
        )


@dataclass(frozen=True)
class PHide:
    proc: "ProcNode"
    evset: EvSetNode
    span: Span = _sp()

    def pretty(self, ind=""):
        return f"({self.proc.pretty(ind)} \\ {self.evset.pretty()})"


@dataclass(frozen=True)
class PLoop:
    body: "ProcNode"
    span: Span = _sp()

    def pretty(self, ind=""):
        return f"loop {{ {self.body.pretty(ind)} }}"


@dataclass(frozen=True)
class PWhile:
    cond: ExprNode
    body: "ProcNode"
    span: Span = _sp()

    def pretty(self, ind=""):
        return f"while ({self.cond.pretty()}) {{ {self.body.pretty(ind)} }}"


@dataclass(frozen=True)
class PIndexedInterleave:
    var: str
    domain: SetNode
    body: "ProcNode"
    span: Span = _sp()

    def pretty(self, ind=""):
        return f"(||| {self.var} : {self.domain.pretty()} @ {self.body.pretty(ind)})"


@dataclass(frozen=True)
class SBind:
    name: str
    proc: "ProcNode"
    span: Span = _sp()

    def pretty(self, ind=""):
        return f"{self.name} <- {self.proc.pretty(ind)}"


@dataclass(frozen=True)
class SProc:
    proc: "ProcNode"
    span: Span = _sp()

    def pretty(self, ind=""):
        return self.proc.pretty(ind)


@dataclass(frozen=True)
class SRet:
    expr: ExprNode
    span: Span = _sp()

    def pretty(self, ind=""):
        return f"ret {self.expr.pretty()}"


@dataclass(frozen=True)
class PDo:
    stmts: Tuple[object, ...]
    span: Span = _sp()

    def pretty(self, ind=""):
        return "do { " + " ; ".join(s.pretty(ind) for s in self.stmts) + " }"


@dataclass(frozen=True)
class PRef:
    name: str
    args: Tuple[ExprNode, ...]
    span: Span = _sp()

    def pretty(self, ind=""):
        if not self.args:
            return self.name
        return f"{self.name}(" + ", ".join(a.pretty() for a in self.args) + ")"


ProcNode = object


# -- declarations --------------------------------------------------------------------


@dataclass(frozen=True)
class ChanDeclNode:
    name: str
    type: TypeNode
    domain: Optional[SetNode]
    span: Span = _sp()

    def pretty(self):
        dom = f" {self.domain.pretty()}" if self.domain is not None else ""
        return f"chan {self.name} : {self.type.pretty()}{dom}"


@dataclass(frozen=True)
class ConstDecl:
    name: str
    expr: ExprNode
    span: Span = _sp()

    def pretty(self):
        return f"const {self.name} = {self.expr.pretty()}"


@dataclass(frozen=True)
class StateField:
    name: str
    type: TypeNode
    init: ExprNode
    span: Span = _sp()

    def pretty(self):
        return f"{self.name} : {self.type.pretty()} := {self.init.pretty()}"


@dataclass(frozen=True)
class ProcessDecl:
    name: str
    params: Tuple[Tuple[str, TypeNode], ...]
    state: Optional[Tuple[StateField, ...]]  # present iff stateful (Circus-style)
    body: ProcNode
    span: Span = _sp()

    def pretty(self):
        ps = ""
        if self.params:
            ps = "(" + ", ".join(f"{n} : {t.pretty()}" for n, t in self.params) + ")"
        st = ""
        if self.state is not None:
            st = "state { " + ", ".join(f.pretty() for f in self.state) + " } "
        return f"process {self.name}{ps} = {st}{self.body.pretty()}"


@dataclass(frozen=True)
class Program:
    decls: Tuple[object, ...]
    span: Span = _sp()

    def pretty(self):
        return "\n".join(d.pretty() for d in self.decls) + "\n"
