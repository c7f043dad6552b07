# The process language: load the bundled buffer, poke it, compare variants.

from itreesim import Event, VInt, VList, stabilises_within, weak_bisim_to_depth
from itreesim.corpus import corpus_source
from itreesim.lang import load_program
from itreesim.values import format_event, vint, vlist

table = load_program(corpus_source("buffer.itp"))
print("processes in buffer.itp:", table.process_names())

print("\n== drive the CSP-style buffer by hand")
t = table.instantiate("buffer", [VList(())])
cur = t.tree
for ev in (Event("Input", vint(1)), Event("Input", vint(2))):
    node = stabilises_within(cur, 100).node
    print("menu:", [format_event(e) for e in node.choices])
    cur = node.choices[ev]
node = stabilises_within(cur, 100).node
print("menu after 1,2:", [format_event(e) for e in node.choices])
print("the State event carries the whole contents:", format_event(Event("State", vlist([vint(1), vint(2)]))))

print("\n== the state-variable variant elaborates to the same behavior")
csp = table.instantiate("buffer", [VList(())]).tree
circ = table.instantiate("cbuffer", []).tree
print("weak bisim to depth 5:", weak_bisim_to_depth(csp, circ, depth=5))
print("(unknown-at-depth is the honest verdict for an infinite-state process;")
print(" the acceptance suite drives 200 random depth-32 paths against a queue oracle)")

print("\n== errors point at the source")
from itreesim.lang import ParseError, parse

try:
    parse("chan c : int\nprocess p = do { x <- c?{0..} ; ret x }")
except ParseError as e:
    print(e)
