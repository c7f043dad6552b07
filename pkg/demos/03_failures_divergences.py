# The denotational view: traces, refusal families, divergences, health.

from itreesim import (
    ChanDecl,
    Event,
    T_INT,
    VInt,
    bind,
    div,
    div_free,
    divergences,
    failure_check,
    failures_enum,
    healthiness_suite,
    inp,
    outp,
    run,
    skip,
    stop,
    vis,
)
from itreesim.semantics import Tick, format_trace, traces

c = ChanDecl("c", T_INT)

print("== failures of inp c {0..3}: one refusal family per stable state")
for desc in failures_enum(inp(c, [VInt(i) for i in range(4)]), 3):
    print("  ", desc)

print("\n== a specific failure membership check")
p = inp(c, [VInt(0), VInt(1)])
c0, c1 = Event("c", VInt(0)), Event("c", VInt(1))
print("([], {c.0}) is a failure?      ", failure_check(p, (), [c0]))
print("([c.1], {c.0,c.1}) is a failure?", failure_check(p, (c1,), [c0, c1]))

print("\n== divergences come with extension closure built in")
after_c1 = bind(outp(c, VInt(1)), lambda _v: div())
d = divergences(after_c1, 3)
print("minimal points:", d)
print("an extension is still divergent:", (c1, c0) in d)

print("\n== divergence freedom explores the state graph")
print("run {a,b}:", div_free(run([Event('a'), Event('b')])))
print("div      :", div_free(div()))

print("\n== the healthiness report bundles the model checks")
print(healthiness_suite(inp(c, [VInt(0), VInt(1)]), max_len=3).to_text())
