"""Static checks and elaboration of parsed programs into kernel trees.

A program yields a process table; instantiating a named process with
argument values produces a simulation target: always a plain tree, plus
(for stateful processes whose body is a single top-level loop) the loop
body as an action so the simulator can surface the state at each
iteration boundary.

Tree-mode processes (no state block) are value-level: do-blocks, ret,
prefixes over lexical bindings.  Action-mode processes (state block) are
state-level: assignments, guards, prefixes threading the state record.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from ..circus import (
    CircusAction,
    assigns,
    cextchoice,
    cloop,
    cseq,
    cskip,
    circus_par,
    cwhile,
    encapsulate,
    lift_tree,
)
from ..csp import cpar, extchoice, guard, hide, interleave, outp
from ..itree import ITree, Ret, Suspend, Vis, bind, div, skip, stop, while_
from ..optics import (
    ChanDecl,
    Expr,
    Registry,
    SchemaError,
    StateSchema,
    StateSpace,
    Subst,
    T_BOOL,
    T_INT,
    T_STR,
    T_UNIT,
    VType,
    field_lens,
    fields_lens,
    prism_of,
    t_enum,
    t_list,
    t_pair,
)
from ..pfun import PFun
from ..values import (
    TRUE,
    UNIT,
    Event,
    EventSet,
    VBool,
    VEnum,
    VInt,
    VList,
    VPair,
    VStr,
    Value,
    channels_of,
    format_value,
    vbool,
)
from . import ast as A
from .parser import parse


class ElabError(Exception):
    def __init__(self, message: str, span: A.Span = A.NO_SPAN, src: str = ""):
        self.message = message
        self.span = span
        super().__init__(self._render(src))

    def _render(self, src: str) -> str:
        loc = f" at {self.span.line}:{self.span.col}" if self.span is not A.NO_SPAN else ""
        return f"elaboration error{loc}: {self.message}"


class EvalError(Exception):
    pass


ANY = VType("any")


def _unify(a: VType, b: VType, span, what: str) -> VType:
    if a.kind == "any":
        return b
    if b.kind == "any":
        return a
    if a.kind != b.kind:
        raise ElabError(f"{what}: type mismatch ({a!r} vs {b!r})", span)
    if a.kind in ("list", "pair"):
        args = tuple(_unify(x, y, span, what) for x, y in zip(a.args, b.args))
        return VType(a.kind, args)
    if a.kind == "enum" and set(a.args) != set(b.args):
        raise ElabError(f"{what}: different enums ({a!r} vs {b!r})", span)
    return a


def type_node_to_vtype(t: A.TypeNode) -> VType:
    if t.kind in ("unit", "bool", "int", "str"):
        return VType(t.kind)
    if t.kind == "list":
        return t_list(type_node_to_vtype(t.args[0]))
    if t.kind == "pair":
        return t_pair(type_node_to_vtype(t.args[0]), type_node_to_vtype(t.args[1]))
    if t.kind == "enum":
        return t_enum(*t.args)
    raise ElabError(f"unknown type {t.kind}", t.span)


# ---------------------------------------------------------------------------
# expression compilation (shared by both modes; tree mode uses an empty state)


_BUILTINS = {"len": 1, "hd": 1, "tl": 1, "fst": 1, "snd": 1, "abs": 1, "min": 2, "max": 2}


def compile_expr(node, env: Dict[str, Value], schema: Optional[StateSchema]) -> Expr:
    """Compile to an evaluator over the state, tracking read state fields."""
    if isinstance(node, A.ELit):
        v = node.value
        return Expr(frozenset(), lambda s: v)
    if isinstance(node, A.EVar):
        if node.name in env:
            v = env[node.name]
            return Expr(frozenset(), lambda s: v)
        if schema is not None and node.name in schema.names():
            name = node.name
            return Expr(frozenset({name}), lambda s: s[name])
        raise ElabError(f"undeclared variable {node.name}", node.span)
    if isinstance(node, A.EUnop):
        a = compile_expr(node.arg, env, schema)
        if node.op == "-":
            return Expr(a.reads, lambda s: VInt(-_int(a.eval(s), node)))
        if node.op == "not":
            return Expr(a.reads, lambda s: vbool(not _bool(a.eval(s), node)))
        raise ElabError(f"unknown operator {node.op}", node.span)
    if isinstance(node, A.EBinop):
        l = compile_expr(node.left, env, schema)
        r = compile_expr(node.right, env, schema)
        reads = l.reads | r.reads
        op = node.op
        if op in ("+", "-", "*", "/", "%"):
            fn = {
                "+": lambda a, b: a + b,
                "-": lambda a, b: a - b,
                "*": lambda a, b: a * b,
                "/": lambda a, b: _div_int(a, b, node),
                "%": lambda a, b: _mod_int(a, b, node),
            }[op]
            return Expr(reads, lambda s: VInt(fn(_int(l.eval(s), node), _int(r.eval(s), node))))
        if op == "++":
            return Expr(
                reads,
                lambda s: VList(_list(l.eval(s), node) + _list(r.eval(s), node)),
            )
        if op in ("==", "!="):
            pos = op == "=="
            return Expr(reads, lambda s: vbool((l.eval(s) == r.eval(s)) == pos))
        if op in ("<", "<=", ">", ">="):
            fn = {
                "<": lambda a, b: a < b,
                "<=": lambda a, b: a <= b,
                ">": lambda a, b: a > b,
                ">=": lambda a, b: a >= b,
            }[op]
            return Expr(reads, lambda s: vbool(fn(_int(l.eval(s), node), _int(r.eval(s), node))))
        if op in ("and", "or"):
            fn = (lambda a, b: a and b) if op == "and" else (lambda a, b: a or b)
            return Expr(reads, lambda s: vbool(fn(_bool(l.eval(s), node), _bool(r.eval(s), node))))
        raise ElabError(f"unknown operator {op}", node.span)
    if isinstance(node, A.ECall):
        args = [compile_expr(a, env, schema) for a in node.args]
        reads = frozenset().union(*(a.reads for a in args)) if args else frozenset()
        fn = node.fn
        if fn not in _BUILTINS:
            raise ElabError(f"unknown function {fn}", node.span)
        if len(args) != _BUILTINS[fn]:
            raise ElabError(f"{fn} takes {_BUILTINS[fn]} argument(s)", node.span)
        if fn == "len":
            return Expr(reads, lambda s: VInt(len(_list(args[0].eval(s), node))))
        if fn == "hd":
            return Expr(reads, lambda s: _head(_list(args[0].eval(s), node), node))
        if fn == "tl":
            return Expr(reads, lambda s: VList(_tail(_list(args[0].eval(s), node), node)))
        if fn == "fst":
            return Expr(reads, lambda s: _pair(args[0].eval(s), node).fst)
        if fn == "snd":
            return Expr(reads, lambda s: _pair(args[0].eval(s), node).snd)
        if fn == "abs":
            return Expr(reads, lambda s: VInt(abs(_int(args[0].eval(s), node))))
        if fn == "min":
            return Expr(reads, lambda s: VInt(min(_int(args[0].eval(s), node), _int(args[1].eval(s), node))))
        if fn == "max":
            return Expr(reads, lambda s: VInt(max(_int(args[0].eval(s), node), _int(args[1].eval(s), node))))
    if isinstance(node, A.EList):
        items = [compile_expr(x, env, schema) for x in node.items]
        reads = frozenset().union(*(a.reads for a in items)) if items else frozenset()
        return Expr(reads, lambda s: VList(tuple(a.eval(s) for a in items)))
    if isinstance(node, A.EPair):
        l = compile_expr(node.fst, env, schema)
        r = compile_expr(node.snd, env, schema)
        return Expr(l.reads | r.reads, lambda s: VPair(l.eval(s), r.eval(s)))
    raise ElabError(f"cannot compile expression {node!r}", getattr(node, "span", A.NO_SPAN))


def _int(v, node) -> int:
    if not isinstance(v, VInt):
        raise EvalError(f"expected an int, got {format_value(v)} (line {node.span.line})")
    return v.n


def _bool(v, node) -> bool:
    if not isinstance(v, VBool):
        raise EvalError(f"expected a bool, got {format_value(v)} (line {node.span.line})")
    return v.b


def _list(v, node) -> tuple:
    if not isinstance(v, VList):
        raise EvalError(f"expected a list, got {format_value(v)} (line {node.span.line})")
    return v.items


def _pair(v, node) -> VPair:
    if not isinstance(v, VPair):
        raise EvalError(f"expected a pair, got {format_value(v)} (line {node.span.line})")
    return v


def _head(items, node):
    if not items:
        raise EvalError(f"hd of empty list (line {node.span.line})")
    return items[0]


def _tail(items, node):
    if not items:
        raise EvalError(f"tl of empty list (line {node.span.line})")
    return items[1:]


def _div_int(a, b, node):
    if b == 0:
        raise EvalError(f"division by zero (line {node.span.line})")
    return a // b


def _mod_int(a, b, node):
    if b == 0:
        raise EvalError(f"modulo by zero (line {node.span.line})")
    return a % b


def eval_expr(node, env: Dict[str, Value]) -> Value:
    """Evaluate a state-free expression (constants, tree-mode code)."""
    e = compile_expr(node, env, None)
    return e.eval(_DUMMY_STATE)


_DUMMY_STATE = StateSchema().make()


# ---------------------------------------------------------------------------
# static expression typing


def type_expr(node, tenv: Dict[str, VType]) -> VType:
    if isinstance(node, A.ELit):
        return type_of_value(node.value)
    if isinstance(node, A.EVar):
        if node.name not in tenv:
            raise ElabError(f"undeclared variable {node.name}", node.span)
        return tenv[node.name]
    if isinstance(node, A.EUnop):
        t = type_expr(node.arg, tenv)
        want = T_INT if node.op == "-" else T_BOOL
        _unify(t, want, node.span, f"operand of {node.op}")
        return want
    if isinstance(node, A.EBinop):
        lt = type_expr(node.left, tenv)
        rt = type_expr(node.right, tenv)
        op = node.op
        if op in ("+", "-", "*", "/", "%"):
            _unify(lt, T_INT, node.span, op)
            _unify(rt, T_INT, node.span, op)
            return T_INT
        if op == "++":
            t = _unify(lt, rt, node.span, "++")
            return _unify(t, t_list(ANY), node.span, "++")
        if op in ("==", "!="):
            _unify(lt, rt, node.span, op)
            return T_BOOL
        if op in ("<", "<=", ">", ">="):
            _unify(lt, T_INT, node.span, op)
            _unify(rt, T_INT, node.span, op)
            return T_BOOL
        if op in ("and", "or"):
            _unify(lt, T_BOOL, node.span, op)
            _unify(rt, T_BOOL, node.span, op)
            return T_BOOL
        raise ElabError(f"unknown operator {op}", node.span)
    if isinstance(node, A.ECall):
        ats = [type_expr(a, tenv) for a in node.args]
        fn = node.fn
        if fn not in _BUILTINS:
            raise ElabError(f"unknown function {fn}", node.span)
        if len(ats) != _BUILTINS[fn]:
            raise ElabError(f"{fn} takes {_BUILTINS[fn]} argument(s)", node.span)
        if fn == "len":
            _unify(ats[0], t_list(ANY), node.span, "len")
            return T_INT
        if fn == "hd":
            t = _unify(ats[0], t_list(ANY), node.span, "hd")
            return t.args[0]
        if fn == "tl":
            return _unify(ats[0], t_list(ANY), node.span, "tl")
        if fn == "fst":
            t = _unify(ats[0], t_pair(ANY, ANY), node.span, "fst")
            return t.args[0]
        if fn == "snd":
            t = _unify(ats[0], t_pair(ANY, ANY), node.span, "snd")
            return t.args[1]
        if fn in ("abs",):
            _unify(ats[0], T_INT, node.span, fn)
            return T_INT
        if fn in ("min", "max"):
            _unify(ats[0], T_INT, node.span, fn)
            _unify(ats[1], T_INT, node.span, fn)
            return T_INT
    if isinstance(node, A.EList):
        t = ANY
        for x in node.items:
            t = _unify(t, type_expr(x, tenv), node.span, "list elements")
        return t_list(t)
    if isinstance(node, A.EPair):
        return t_pair(type_expr(node.fst, tenv), type_expr(node.snd, tenv))
    raise ElabError(f"cannot type expression {node!r}", getattr(node, "span", A.NO_SPAN))


def type_of_value(v: Value) -> VType:
    if isinstance(v, VInt):
        return T_INT
    if isinstance(v, VBool):
        return T_BOOL
    if isinstance(v, VStr):
        return T_STR
    if isinstance(v, VList):
        t = ANY
        for x in v.items:
            t = _unify(t, type_of_value(x), A.NO_SPAN, "list")
        return t_list(t)
    if isinstance(v, VPair):
        return t_pair(type_of_value(v.fst), type_of_value(v.snd))
    if isinstance(v, VEnum):
        return t_enum(v.tag)
    return T_UNIT


# ---------------------------------------------------------------------------
# process table


@dataclass
class SimTarget:
    """An elaborated process ready to simulate or analyze."""

    name: str
    tree: ITree
    schema: Optional[StateSchema] = None
    init_state: Optional[StateSpace] = None
    loop_action: Optional[CircusAction] = None  # body of a top-level loop


class ProcTable:
    def __init__(self, registry: Registry, consts: Dict[str, Value], procs: Dict[str, A.ProcessDecl], src: str = ""):
        self.registry = registry
        self.consts = consts
        self.procs = procs
        self.src = src

    def process_names(self) -> List[str]:
        return list(self.procs)

    def params_of(self, name: str) -> Tuple[Tuple[str, VType], ...]:
        decl = self._lookup(name, A.NO_SPAN)
        return tuple((n, type_node_to_vtype(t)) for n, t in decl.params)

    def _lookup(self, name: str, span) -> A.ProcessDecl:
        if name not in self.procs:
            raise ElabError(f"process {name} is not declared", span)
        return self.procs[name]

    def instantiate(self, name: str, args: Optional[List[Value]] = None) -> SimTarget:
        args = list(args or [])
        decl = self._lookup(name, A.NO_SPAN)
        params = self.params_of(name)
        if len(args) != len(params):
            raise ElabError(
                f"process {name} takes {len(params)} argument(s), got {len(args)}",
                decl.span,
            )
        env = dict(self.consts)
        for (pname, ptype), v in zip(params, args):
            if not ptype.matches(v):
                raise ElabError(
                    f"argument {pname} of {name}: {format_value(v)} does not match {ptype!r}",
                    decl.span,
                )
            env[pname] = v
        return _Elaborator(self, env, (name,)).instantiate(decl)


def load_program(src: str) -> ProcTable:
    """Parse, statically check, and return the process table."""
    prog = parse(src)
    registry = Registry()
    consts: Dict[str, Value] = {}
    procs: Dict[str, A.ProcessDecl] = {}
    for d in prog.decls:
        if isinstance(d, A.ChanDeclNode):
            ty = type_node_to_vtype(d.type)
            domain = None
            if d.domain is not None:
                domain = tuple(_const_set_values(d.domain, consts))
            try:
                registry.declare(ChanDecl(d.name, ty, domain))
            except SchemaError as e:
                raise ElabError(str(e), d.span) from None
        elif isinstance(d, A.ConstDecl):
            if d.name in consts:
                raise ElabError(f"constant {d.name} already defined", d.span)
            consts[d.name] = eval_expr(d.expr, dict(consts))
        elif isinstance(d, A.ProcessDecl):
            if d.name in procs:
                raise ElabError(f"process {d.name} already defined", d.span)
            procs[d.name] = d
    table = ProcTable(registry, consts, procs, src)
    checker = _Checker(table)
    for d in procs.values():
        checker.check_process(d)
    _reject_recursion(procs)
    return table


def _reject_recursion(procs: Dict[str, A.ProcessDecl]):
    """References must be acyclic; iteration belongs to loop/while."""

    def refs_of(node, acc):
        if isinstance(node, A.PRef):
            acc.add(node.name)
        for f in getattr(node, "__dataclass_fields__", {}):
            v = getattr(node, f)
            if isinstance(v, tuple):
                for x in v:
                    refs_of(x, acc) if hasattr(x, "__dataclass_fields__") else None
            elif hasattr(v, "__dataclass_fields__"):
                refs_of(v, acc)
        return acc

    graph = {name: refs_of(d.body, set()) & set(procs) for name, d in procs.items()}
    done: Dict[str, bool] = {}

    def visit(name, stack):
        if name in stack:
            cycle = " -> ".join(stack[stack.index(name):] + [name])
            raise ElabError(
                f"recursive process reference ({cycle}); iterate with loop/while",
                procs[name].span,
            )
        if done.get(name):
            return
        for dep in graph[name]:
            visit(dep, stack + [name])
        done[name] = True

    for name in procs:
        visit(name, [])


def load_file(path) -> ProcTable:
    with open(path, "r", encoding="utf-8") as fh:
        return load_program(fh.read())


def _const_set_values(setnode, consts) -> List[Value]:
    if isinstance(setnode, A.SRange):
        lo = eval_expr(setnode.lo, dict(consts))
        hi = eval_expr(setnode.hi, dict(consts))
        if not isinstance(lo, VInt) or not isinstance(hi, VInt):
            raise ElabError("range bounds must be ints", setnode.span)
        return [VInt(i) for i in range(lo.n, hi.n + 1)]
    return [eval_expr(x, dict(consts)) for x in setnode.items]


# ---------------------------------------------------------------------------
# static checking


class _Checker:
    def __init__(self, table: ProcTable):
        self.table = table

    def check_process(self, decl: A.ProcessDecl):
        tenv: Dict[str, VType] = {n: type_of_value(v) for n, v in self.table.consts.items()}
        for pname, ptype in decl.params:
            tenv[pname] = type_node_to_vtype(ptype)
        if decl.state is not None:
            fields = []
            for f in decl.state:
                ft = type_node_to_vtype(f.type)
                it = type_expr(f.init, tenv)
                _unify(ft, it, f.span, f"initial value of {f.name}")
                fields.append((f.name, ft))
            schema_env = dict(tenv)
            for n, t in fields:
                if n in schema_env:
                    raise ElabError(f"state field {n} shadows another name", decl.span)
                schema_env[n] = t
            self.check_proc(decl.body, schema_env, mode="action", loop_state=None)
        else:
            loop_state = None
            if len(decl.params) == 1:
                loop_state = type_node_to_vtype(decl.params[0][1])
            self.check_proc(decl.body, tenv, mode="tree", loop_state=loop_state)

    def _channel(self, name: str, span) -> ChanDecl:
        if name not in self.table.registry:
            raise ElabError(f"channel {name} is not declared", span)
        return self.table.registry.lookup(name)

    def _payload_after_dots(self, chan: ChanDecl, dots, tenv, span) -> VType:
        ty = chan.payload_kind
        for d in dots:
            if ty.kind != "pair":
                raise ElabError(
                    f"channel {chan.name} payload {ty!r} has fewer components than the dots",
                    span,
                )
            dt = type_expr(d, tenv)
            _unify(dt, ty.args[0], span, f"dotted component of {chan.name}")
            ty = ty.args[1]
        return ty

    def _check_domain(self, setnode, want: VType, tenv, span, chan: ChanDecl):
        if setnode is None:
            if chan.enum_domain is None:
                raise ElabError(
                    f"input on {chan.name} needs a finite domain "
                    "(write c?(x : {0..3}) or declare one on the channel)",
                    span,
                )
            return
        if isinstance(setnode, A.SRange):
            _unify(type_expr(setnode.lo, tenv), T_INT, setnode.span, "range bound")
            _unify(type_expr(setnode.hi, tenv), T_INT, setnode.span, "range bound")
            _unify(want, T_INT, setnode.span, "input domain")
        else:
            for x in setnode.items:
                _unify(type_expr(x, tenv), want, setnode.span, "input domain")

    def _check_evset(self, node, span):
        if isinstance(node, A.EvChannels):
            for c in node.channels:
                self._channel(c, node.span)
        else:
            for ch, v in node.events:
                decl = self._channel(ch, node.span)
                payload = v if v is not None else UNIT
                if not decl.payload_kind.matches(payload):
                    raise ElabError(
                        f"event {ch}.{format_value(payload)} does not match channel payload",
                        node.span,
                    )

    def check_proc(self, node, tenv: Dict[str, VType], mode: str, loop_state: Optional[VType]):
        rec = lambda n, env=None: self.check_proc(n, env or tenv, mode, loop_state)
        if isinstance(node, (A.PSkip, A.PStop, A.PDiv)):
            return
        if isinstance(node, A.PRet):
            if mode == "action":
                raise ElabError("ret is for stateless processes; assign to state instead", node.span)
            t = type_expr(node.expr, tenv)
            if loop_state is not None:
                _unify(t, loop_state, node.span, "loop state")
            return
        if isinstance(node, A.PGuardProc):
            _unify(type_expr(node.cond, tenv), T_BOOL, node.span, "guard")
            return
        if isinstance(node, A.PInputPrefix):
            chan = self._channel(node.channel, node.span)
            want = self._payload_after_dots(chan, node.dots, tenv, node.span)
            self._check_domain(node.domain, want, tenv, node.span, chan)
            env = dict(tenv)
            env[node.binder] = want
            self.check_proc(node.cont, env, mode, loop_state)
            return
        if isinstance(node, A.PInpValue):
            chan = self._channel(node.channel, node.span)
            want = self._payload_after_dots(chan, node.dots, tenv, node.span)
            self._check_domain(node.domain, want, tenv, node.span, chan)
            return
        if isinstance(node, A.POutputPrefix):
            chan = self._channel(node.channel, node.span)
            want = self._payload_after_dots(chan, node.dots, tenv, node.span)
            if node.expr is None:
                _unify(want, T_UNIT, node.span, f"bare event {node.channel}")
            else:
                _unify(type_expr(node.expr, tenv), want, node.span, f"output on {node.channel}")
            if node.cont is not None:
                rec(node.cont)
            return
        if isinstance(node, A.PGuard):
            _unify(type_expr(node.cond, tenv), T_BOOL, node.span, "guard")
            rec(node.cont)
            return
        if isinstance(node, A.PAssign):
            if mode != "action":
                raise ElabError("assignment needs a state block", node.span)
            for t_name, e in zip(node.targets, node.exprs):
                if t_name not in tenv:
                    raise ElabError(f"undeclared state field {t_name}", node.span)
                _unify(type_expr(e, tenv), tenv[t_name], node.span, f"assignment to {t_name}")
            if len(set(node.targets)) != len(node.targets):
                raise ElabError("duplicate assignment targets", node.span)
            return
        if isinstance(node, (A.PChoice, A.PSeq, A.PInterleave)):
            if isinstance(node, A.PInterleave) and mode == "action":
                raise ElabError(
                    "parallel between stateful actions needs name sets: [| {ns} | E | {ns} |]",
                    node.span,
                )
            rec(node.left)
            rec(node.right)
            return
        if isinstance(node, A.PPar):
            if mode == "action":
                raise ElabError(
                    "parallel between stateful actions needs name sets: [| {ns} | E | {ns} |]",
                    node.span,
                )
            self._check_evset(node.evset, node.span)
            rec(node.left)
            rec(node.right)
            return
        if isinstance(node, A.PNsPar):
            if mode != "action":
                raise ElabError("name-set parallel needs a state block", node.span)
            self._check_evset(node.evset, node.span)
            for ns in (node.ns1, node.ns2):
                for f in ns:
                    if f not in tenv:
                        raise ElabError(f"undeclared state field {f} in name set", node.span)
            if set(node.ns1) & set(node.ns2):
                raise ElabError(
                    f"name sets must be independent; both contain {sorted(set(node.ns1) & set(node.ns2))}",
                    node.span,
                )
            rec(node.left)
            rec(node.right)
            return
        if isinstance(node, A.PHide):
            self._check_evset(node.evset, node.span)
            rec(node.proc)
            return
        if isinstance(node, A.PLoop):
            rec(node.body)
            return
        if isinstance(node, A.PWhile):
            _unify(type_expr(node.cond, tenv), T_BOOL, node.span, "while condition")
            rec(node.body)
            return
        if isinstance(node, A.PIndexedInterleave):
            if mode == "action":
                raise ElabError("indexed interleave lives in stateless processes", node.span)
            self._check_domain(node.domain, T_INT, tenv, node.span, _FAKE_INT_CHAN)
            env = dict(tenv)
            env[node.var] = T_INT
            self.check_proc(node.body, env, mode, loop_state)
            return
        if isinstance(node, A.PDo):
            if mode == "action":
                raise ElabError("do-blocks are for stateless processes", node.span)
            env = dict(tenv)
            for i, s in enumerate(node.stmts):
                last = i == len(node.stmts) - 1
                if isinstance(s, A.SRet):
                    if not last:
                        raise ElabError("ret must end the do-block", s.span)
                    t = type_expr(s.expr, env)
                    if loop_state is not None:
                        _unify(t, loop_state, s.span, "loop state")
                elif isinstance(s, A.SBind):
                    t = self._type_of_value_proc(s.proc, env)
                    self.check_proc(s.proc, env, mode, None)
                    env[s.name] = t
                else:
                    self.check_proc(s.proc, env, mode, None)
            return
        if isinstance(node, A.PRef):
            decl = self.table._lookup(node.name, node.span)
            if len(node.args) != len(decl.params):
                raise ElabError(
                    f"process {node.name} takes {len(decl.params)} argument(s), got {len(node.args)}",
                    node.span,
                )
            for a, (pn, pt) in zip(node.args, decl.params):
                _unify(type_expr(a, tenv), type_node_to_vtype(pt), node.span, f"argument {pn}")
            return
        raise ElabError(f"unsupported construct {type(node).__name__}", getattr(node, "span", A.NO_SPAN))

    def _type_of_value_proc(self, node, tenv) -> VType:
        """Type of the value produced by a proc in a do-bind."""
        if isinstance(node, A.PInpValue):
            chan = self._channel(node.channel, node.span)
            return self._payload_after_dots(chan, node.dots, tenv, node.span)
        if isinstance(node, A.PRet):
            return type_expr(node.expr, tenv)
        if isinstance(node, A.PDo):
            last = node.stmts[-1]
            if isinstance(last, A.SRet):
                return type_expr(last.expr, tenv)
        return ANY


_FAKE_INT_CHAN = ChanDecl("_range", T_INT, None)


# ---------------------------------------------------------------------------
# elaboration proper


class _Elaborator:
    def __init__(self, table: ProcTable, env: Dict[str, Value], call_stack: Tuple[str, ...]):
        self.table = table
        self.env = env
        self.call_stack = call_stack

    # -- entry -------------------------------------------------------------

    def instantiate(self, decl: A.ProcessDecl) -> SimTarget:
        if decl.state is not None:
            fields = [(f.name, type_node_to_vtype(f.type)) for f in decl.state]
            schema = StateSchema(fields)
            init_vals = {f.name: eval_expr(f.init, self.env) for f in decl.state}
            init_state = schema.make(**init_vals)
            action = self.elab_action(decl.body, self.env, schema)
            target = SimTarget(
                name=decl.name,
                tree=encapsulate(action, init_state),
                schema=schema,
                init_state=init_state,
            )
            if isinstance(decl.body, A.PLoop):
                target.loop_action = self.elab_action(decl.body.body, self.env, schema)
            return target
        tree = self.elab_tree(decl.body, self.env, decl.params)
        return SimTarget(name=decl.name, tree=tree)

    # -- helpers -----------------------------------------------------------

    def _channel(self, name: str, span) -> ChanDecl:
        if name not in self.table.registry:
            raise ElabError(f"channel {name} is not declared", span)
        return self.table.registry.lookup(name)

    def _evset(self, node) -> EventSet:
        if isinstance(node, A.EvChannels):
            for c in node.channels:
                self._channel(c, node.span)
            return channels_of(*node.channels)
        events = []
        for ch, v in node.events:
            self._channel(ch, node.span)
            events.append(Event(ch, v if v is not None else UNIT))
        return EventSet(events=events)

    def _set_values(self, setnode, env, s: Optional[StateSpace]) -> List[Value]:
        def ev(e):
            c = compile_expr(e, env, s.schema if s is not None else None)
            return c.eval(s if s is not None else _DUMMY_STATE)

        if isinstance(setnode, A.SRange):
            lo, hi = ev(setnode.lo), ev(setnode.hi)
            if not isinstance(lo, VInt) or not isinstance(hi, VInt):
                raise ElabError("range bounds must be ints", setnode.span)
            return [VInt(i) for i in range(lo.n, hi.n + 1)]
        return [ev(x) for x in setnode.items]

    def _input_payloads(self, chan: ChanDecl, dots, domain, env, s) -> List[Tuple[Value, Value]]:
        """(payload, bound value) pairs for an input menu."""

        def ev(e):
            c = compile_expr(e, env, s.schema if s is not None else None)
            return c.eval(s if s is not None else _DUMMY_STATE)

        dot_vals = [ev(d) for d in dots]
        if domain is not None:
            values = self._set_values(domain, env, s)
        else:
            base = chan.enum_domain
            if base is None:
                raise ElabError(f"input on {chan.name} needs a finite domain", A.NO_SPAN)
            values = list(base)
            for dv in dot_vals:
                values = [v.snd for v in values if isinstance(v, VPair) and v.fst == dv]
        out = []
        for v in values:
            payload = v
            for dv in reversed(dot_vals):
                payload = VPair(dv, payload)
            out.append((payload, v))
        return out

    def _ref_tree(self, node: A.PRef, env) -> ITree:
        if node.name in self.call_stack:
            raise ElabError(
                f"recursive process reference {node.name}; iterate with loop/while",
                node.span,
            )
        args = [eval_expr(a, env) for a in node.args]
        decl = self.table._lookup(node.name, node.span)
        sub_env = dict(self.table.consts)
        params = self.table.params_of(node.name)
        if len(args) != len(params):
            raise ElabError(
                f"process {node.name} takes {len(params)} argument(s), got {len(args)}",
                node.span,
            )
        for (pname, ptype), v in zip(params, args):
            if not ptype.matches(v):
                raise ElabError(
                    f"argument {pname} of {node.name}: {format_value(v)} does not match {ptype!r}",
                    node.span,
                )
            sub_env[pname] = v
        sub = _Elaborator(self.table, sub_env, self.call_stack + (node.name,))
        return sub.instantiate(decl).tree

    # -- tree mode -----------------------------------------------------------

    def elab_tree(self, node, env: Dict[str, Value], params: Tuple) -> ITree:
        rec = lambda n, e=None: self.elab_tree(n, e if e is not None else env, params)
        if isinstance(node, A.PSkip):
            return skip()
        if isinstance(node, A.PStop):
            return stop()
        if isinstance(node, A.PDiv):
            return div()
        if isinstance(node, A.PRet):
            return Ret(eval_expr(node.expr, env))
        if isinstance(node, A.PGuardProc):
            return guard(eval_expr(node.cond, env) == TRUE)
        if isinstance(node, A.PInpValue):
            return self._inp_tree(node.channel, node.dots, node.domain, env, node.span)
        if isinstance(node, A.PInputPrefix):
            chan = self._channel(node.channel, node.span)
            pairs = self._input_payloads(chan, node.dots, node.domain, env, None)
            prism = prism_of(chan)
            entries = []
            for payload, bound in pairs:
                ev = prism.build(payload)
                cont = _lazy(lambda b=bound: rec(node.cont, {**env, node.binder: b}))
                entries.append((ev, cont))
            return Vis(PFun.of(entries))
        if isinstance(node, A.POutputPrefix):
            chan = self._channel(node.channel, node.span)
            payload = self._out_payload(chan, node, env, None)
            cont = node.cont
            after = _lazy(lambda: rec(cont)) if cont is not None else skip()
            return bind(outp(chan, payload), lambda _x: after)
        if isinstance(node, A.PGuard):
            c = eval_expr(node.cond, env) == TRUE
            return bind(guard(c), lambda _x: _lazy(lambda: rec(node.cont)))
        if isinstance(node, A.PAssign):
            raise ElabError("assignment needs a state block", node.span)
        if isinstance(node, A.PChoice):
            return extchoice(rec(node.left), rec(node.right))
        if isinstance(node, A.PSeq):
            right = node.right
            return bind(rec(node.left), lambda _v: _lazy(lambda: rec(right)))
        if isinstance(node, A.PPar):
            return cpar(rec(node.left), self._evset(node.evset), rec(node.right))
        if isinstance(node, A.PInterleave):
            return interleave(rec(node.left), rec(node.right))
        if isinstance(node, A.PHide):
            return hide(rec(node.proc), self._evset(node.evset))
        if isinstance(node, A.PLoop) or isinstance(node, A.PWhile):
            return self._tree_loop(node, env, params)
        if isinstance(node, A.PIndexedInterleave):
            values = self._set_values(node.domain, env, None)
            trees = [rec(node.body, {**env, node.var: v}) for v in values]
            if not trees:
                return skip()
            # balanced reduction: one changed component re-merges log-many levels
            while len(trees) > 1:
                trees = [
                    interleave(trees[i], trees[i + 1]) if i + 1 < len(trees) else trees[i]
                    for i in range(0, len(trees), 2)
                ]
            return trees[0]
        if isinstance(node, A.PDo):
            return self._elab_do(list(node.stmts), env, params)
        if isinstance(node, A.PRef):
            return self._ref_tree(node, env)
        raise ElabError(f"unsupported construct {type(node).__name__}", getattr(node, "span", A.NO_SPAN))

    def _inp_tree(self, channel, dots, domain, env, span) -> ITree:
        chan = self._channel(channel, span)
        pairs = self._input_payloads(chan, dots, domain, env, None)
        prism = prism_of(chan)
        return Vis(PFun.of((prism.build(p), Ret(b)) for p, b in pairs))

    def _out_payload(self, chan: ChanDecl, node: A.POutputPrefix, env, s) -> Value:
        def ev(e):
            c = compile_expr(e, env, s.schema if s is not None else None)
            return c.eval(s if s is not None else _DUMMY_STATE)

        parts = [ev(d) for d in node.dots]
        if node.expr is not None:
            parts.append(ev(node.expr))
        if not parts:
            return UNIT
        payload = parts[-1]
        for dv in reversed(parts[:-1]):
            payload = VPair(dv, payload)
        return payload

    def _tree_loop(self, node, env, params) -> ITree:
        if len(params) > 1:
            raise ElabError(
                "loop/while in a value process needs at most one parameter (bundle state in one value)",
                node.span,
            )
        pname = params[0][0] if params else None
        init = env[pname] if pname else UNIT

        def body_fn(state):
            e = dict(env)
            if pname:
                e[pname] = state
            body = node.body
            return self.elab_tree(body, e, params)

        if isinstance(node, A.PWhile):
            cond = node.cond

            def cond_fn(state):
                e = dict(env)
                if pname:
                    e[pname] = state
                return eval_expr(cond, e) == TRUE

            return while_(cond_fn, body_fn)(init)
        return while_(lambda _s: True, body_fn)(init)

    def _elab_do(self, stmts, env, params) -> ITree:
        head, rest = stmts[0], stmts[1:]
        if isinstance(head, A.SRet):
            return Ret(eval_expr(head.expr, env))
        if isinstance(head, A.SBind):
            t = self.elab_tree(head.proc, env, params)
            if not rest:
                return t
            return bind(
                t, lambda v: _lazy(lambda: self._elab_do(rest, {**env, head.name: v}, params))
            )
        t = self.elab_tree(head.proc, env, params)
        if not rest:
            return t
        return bind(t, lambda _v: _lazy(lambda: self._elab_do(rest, env, params)))

    # -- action mode -----------------------------------------------------------

    def elab_action(self, node, env: Dict[str, Value], schema: StateSchema) -> CircusAction:
        rec = lambda n, e=None: self.elab_action(n, e if e is not None else env, schema)
        if isinstance(node, A.PSkip):
            return cskip(schema)
        if isinstance(node, A.PStop):
            return CircusAction(lambda s: stop(), schema)
        if isinstance(node, A.PDiv):
            return CircusAction(lambda s: div(), schema)
        if isinstance(node, A.PGuardProc):
            cond = compile_expr(node.cond, env, schema)
            return CircusAction(lambda s: bind(guard(cond.eval(s) == TRUE), lambda _x: Ret(s)), schema)
        if isinstance(node, A.PInputPrefix):
            chan = self._channel(node.channel, node.span)
            prism = prism_of(chan)
            binder, cont, dots, domain = node.binder, node.cont, node.dots, node.domain

            def fn(s: StateSpace) -> ITree:
                pairs = self._input_payloads(chan, dots, domain, env, s)
                entries = []
                for payload, bound in pairs:
                    ev = prism.build(payload)
                    entries.append(
                        (ev, _lazy(lambda b=bound: rec(cont, {**env, binder: b})(s)))
                    )
                return Vis(PFun.of(entries))

            return CircusAction(fn, schema)
        if isinstance(node, A.POutputPrefix):
            chan = self._channel(node.channel, node.span)
            cont = node.cont

            def fn(s: StateSpace) -> ITree:
                payload = self._out_payload(chan, node, env, s)
                after = rec(cont) if cont is not None else cskip(schema)
                return bind(outp(chan, payload), lambda _x: after(s))

            return CircusAction(fn, schema)
        if isinstance(node, A.PGuard):
            cond = compile_expr(node.cond, env, schema)
            cont = rec(node.cont)
            return CircusAction(lambda s: bind(guard(cond.eval(s) == TRUE), lambda _x: cont(s)), schema)
        if isinstance(node, A.PAssign):
            assignments = []
            for t_name, e in zip(node.targets, node.exprs):
                if t_name not in schema.names():
                    raise ElabError(f"undeclared state field {t_name}", node.span)
                assignments.append((field_lens(t_name), compile_expr(e, env, schema)))
            return assigns(Subst(assignments), schema)
        if isinstance(node, A.PChoice):
            return cextchoice(rec(node.left), rec(node.right))
        if isinstance(node, A.PSeq):
            return cseq(rec(node.left), rec(node.right))
        if isinstance(node, A.PNsPar):
            ns1 = fields_lens(node.ns1) if node.ns1 else fields_lens([])
            ns2 = fields_lens(node.ns2) if node.ns2 else fields_lens([])
            try:
                return circus_par(rec(node.left), ns1, self._evset(node.evset), ns2, rec(node.right))
            except SchemaError as e:
                raise ElabError(str(e), node.span) from None
        if isinstance(node, A.PHide):
            inner = rec(node.proc)
            evset = self._evset(node.evset)
            return CircusAction(lambda s: hide(inner(s), evset), schema)
        if isinstance(node, A.PLoop):
            return cloop(rec(node.body))
        if isinstance(node, A.PWhile):
            return cwhile(compile_expr(node.cond, env, schema), rec(node.body))
        if isinstance(node, A.PRef):
            return lift_tree(self._ref_tree(node, env), schema)
        if isinstance(node, (A.PPar, A.PInterleave)):
            raise ElabError(
                "parallel between stateful actions needs name sets: [| {ns} | E | {ns} |]",
                node.span,
            )
        if isinstance(node, A.PDo):
            raise ElabError("do-blocks are for stateless processes", node.span)
        if isinstance(node, A.PRet):
            raise ElabError("ret is for stateless processes; assign to state instead", node.span)
        raise ElabError(f"unsupported construct {type(node).__name__}", getattr(node, "span", A.NO_SPAN))


def _lazy(fn) -> ITree:
    return Suspend(fn)
