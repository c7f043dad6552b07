# Interaction trees from first principles: build a few, run the checkers.
#
# A tree either returns a value (Ret), takes an internal step (Sil), or
# offers a menu of events (Vis).  Nothing here is ever compared with ==;
# equality questions go to the bounded bisimulation checkers.

from itreesim import (
    Event,
    VInt,
    bind,
    bisim_to_depth,
    div,
    iter_,
    ret,
    run,
    skip,
    stabilises_within,
    stop,
    vis,
    weak_bisim_to_depth,
    while_,
)

a, b = Event("a"), Event("b")

print("== a tiny tree: a -> done | b -> deadlock")
t = vis({a: ret(VInt(1)), b: stop()})
print("root:", t.force())

print("\n== bind sequences computations")
doubled = bind(t, lambda v: ret(VInt(v.n * 2)) if isinstance(v, VInt) else skip())
print("after a:", doubled.force().choices[a].force())

print("\n== div never stabilises (proven by τ-cycle, not by burning fuel)")
print(stabilises_within(div(), 10**6))

print("\n== the constants absorb bind")
print("div >>= k  = div      :", bisim_to_depth(bind(div(), ret), div()))
r = run([a, b])
print("run E >>= k = run E   :", bisim_to_depth(bind(r, ret), r))

print("\n== loops: while counts τ steps, iter(skip) spins forever")
k = while_(lambda s: s.n < 3, lambda s: ret(VInt(s.n + 1)))
print("while(<3) from 0:", stabilises_within(k(VInt(0)), 10))
print("iter(skip) ~ div :", weak_bisim_to_depth(iter_(skip()), div()))

print("\n== three-valued verdicts: refuted checks carry a distinguishing path")
p = vis({a: vis({b: ret(VInt(1))})})
q = vis({a: vis({b: ret(VInt(2))})})
print(bisim_to_depth(p, q))
