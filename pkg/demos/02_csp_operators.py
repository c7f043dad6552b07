# The CSP operator suite: communication, choice, parallel, hiding.

from itreesim import (
    ChanDecl,
    Event,
    T_INT,
    T_UNIT,
    VInt,
    bind,
    bisim_to_depth,
    channels_of,
    events_of,
    extchoice,
    format_event,
    gpar,
    hide,
    inp,
    interleave,
    iter_,
    outp,
    ret,
    skip,
    stabilises_within,
    stop,
    sync,
    vis,
    weak_bisim_to_depth,
)
from itreesim.semantics import traces, format_trace

c = ChanDecl("c", T_INT)
d = ChanDecl("d", T_INT)
e = ChanDecl("e", T_UNIT)

print("== inp offers a finite menu and returns the received value")
t = inp(c, [VInt(i) for i in range(4)])
print("menu:", [format_event(ev) for ev in t.force().choices])

print("\n== a pipeline: read x, write 2*x")
prog = bind(inp(c, [VInt(1), VInt(2)]), lambda x: outp(d, VInt(2 * x.n)))
for tr in sorted(traces(prog, 3), key=len):
    print("  trace:", format_trace(tr))

print("\n== external choice excludes clashing events (determinism by construction)")
clash = extchoice(vis({Event('a'): ret(VInt(1))}), vis({Event('a'): ret(VInt(2))}))
print("(a -> P) [] (a -> Q) forces to:", clash.force())

print("\n== choice laws at a glance")
p = vis({Event("a"): skip()})
print("stop [] p = p :", bisim_to_depth(extchoice(stop(), p), p))

print("\n== parallel: synchronize on shared events, interleave the rest")
left = bind(inp(c, [VInt(0), VInt(1)]), lambda v: skip())
right = bind(inp(c, [VInt(1), VInt(2)]), lambda v: skip())
both = gpar(left, channels_of("c"), right)
print("sync menu (intersection):", [format_event(ev) for ev in both.force().choices])

ab = interleave(vis({Event("a"): skip()}), vis({Event("b"): skip()}))
print("interleavings of a and b:", sorted(format_trace(t) for t in traces(ab, 2) if len(t) == 2))

print("\n== hiding internalizes events; hiding a loop diverges")
spin = hide(iter_(sync(e)), channels_of("e"))
print("(iter(sync e)) \\ {e} stabilises?", stabilises_within(spin, 1000))
print("              weakly equals div:", weak_bisim_to_depth(spin, __import__('itreesim').div()))
