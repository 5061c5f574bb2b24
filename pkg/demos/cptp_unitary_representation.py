#!/usr/bin/env python3
"""One unitary representation for a whole channel family.

Channels sitting on the edges of a graph compose along normal forms into a
channel per group element.  Each element gets a reflection dilation on a
shared environment, and a single unitary representation on finitely
supported group-indexed vectors reproduces every assigned channel through
the partial trace - without assuming the family composes edge to edge.
"""

import numpy as np

from graphdyn import rewrite
from graphdyn.dilate import (Channel, FormalVector, dilate_cptp, ved_apply,
                             ved_verify)
from graphdyn.dynamics import LinearOrderGraph
from graphdyn.linops import trace_norm
from graphdyn.rewrite import embed_edge, gmul

rng = np.random.default_rng(12)
graph = LinearOrderGraph([0, 1, 2])
channels = {(0, 1): Channel.random(rng, 2),
            (1, 2): Channel.random(rng, 2),
            (0, 2): Channel.random(rng, 2)}
ident = Channel.identity(2)
assign = lambda e: channels.get(tuple(e), ident)

system = {"graph": graph, "channels": assign, "dim": 2, "family": None}
dilated = dilate_cptp(system)
dil = dilated.dilation
ctx = graph.context()

print("== reconstruction along edges ==")
s = np.array([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]], dtype=complex)
for e in [(0, 1), (1, 2), (0, 2)]:
    g = embed_edge(ctx, e)
    print(f"edge {e}: trace-norm defect = {ved_verify(dil, g, s):.2e}")

print("\n== the representation law, exactly on tags ==")
p = dil.dim * dil.env_dim
x = embed_edge(ctx, (0, 1))
y = embed_edge(ctx, (1, 2))
zeta = rng.standard_normal(p) + 1j * rng.standard_normal(p)
v = FormalVector.of([(rewrite.identity(), zeta)])
two = ved_apply(dil, x, ved_apply(dil, y, v))
one = ved_apply(dil, gmul(x, y), v)
print(f"U(x)U(y) vs U(xy) on a random vector: {two.distance(one):.2e}")

print("\n== indivisibility is preserved, not repaired ==")
gh = gmul(x, y)  # the word (0,1)(1,2) rewrites to the single letter (0,2)
print("x*y =", [tuple(l) for l in gh.letters])
dilated_val = dil.assignment(gh).apply(s)
composed = channels[(0, 1)].apply(channels[(1, 2)].apply(s))
family_gap = trace_norm(channels[(0, 2)].apply(s) - composed)
print(f"family's own defect |phi(0,2) - phi(0,1) phi(1,2)| = {family_gap:.6f}")
print(f"dilated value differs from the composition by      = "
      f"{trace_norm(dilated_val - composed):.6f}")
print("the dilation reproduces the assigned channel at x*y, so the gap "
      "matches exactly.")
