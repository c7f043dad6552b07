# The distributed ring buffer, driven through simulator sessions.

import random
import time
from collections import deque

from itreesim import Event, stabilises_within
from itreesim.corpus import corpus_source
from itreesim.lang import load_program
from itreesim.sim.session import Menu, StateNote, choose, start_session
from itreesim.values import format_event, vint

table = load_program(corpus_source("ring.itp"))

print("== a scripted session on the 5-cell ring (capacity 6)")
target = table.instantiate("ring5", [])
session, msgs = start_session(target)
for m in msgs:
    if isinstance(m, Menu):
        print("menu:", [format_event(e) for e in m.events])
for ev in (Event("Input", vint(1)), Event("Input", vint(2)), Event("Output", vint(1))):
    session, msgs = choose(session, ev)
    print(f"after {format_event(ev)}:")
    for m in msgs:
        if isinstance(m, Menu):
            print("  menu:", [format_event(e) for e in m.events])

print("\n== random walk against a FIFO oracle")
rng = random.Random(7)
cur = table.instantiate("ring5", []).tree
queue = deque()
for step in range(12):
    node = stabilises_within(cur, 10_000).node
    menu = set(node.choices.dom())
    expected = set()
    if len(queue) < 6:
        expected |= {Event("Input", vint(i)) for i in range(4)}
    if queue:
        expected.add(Event("Output", queue[0]))
    assert menu == expected, (menu, expected)
    e = rng.choice(sorted(menu, key=format_event))
    queue.append(e.payload) if e.channel == "Input" else queue.popleft()
    cur = node.choices[e]
    print(f"step {step}: {format_event(e):10s} queue={[v.n for v in queue]}")
print("oracle satisfied")

print("\n== scaling: time one step of a 100-cell ring")
big = table.instantiate("ring", [vint(100)])
t0 = time.perf_counter()
node = stabilises_within(big.tree, 100_000).node
_ = list(node.choices.keys())
print(f"first step: {time.perf_counter() - t0:.3f}s, menu size {len(node.choices)}")
