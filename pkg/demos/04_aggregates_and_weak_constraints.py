"""Splitting inside aggregates and under weak constraints.

Aggregate conditions can hide large joins: the part of a condition that is
disconnected from the rest of the rule moves into its own rule, and the
condition keeps only a projection atom.  Weak constraints are first turned
into a plain rule deriving a temp atom that carries the weight, level, and
annotation terms; the weak constraint then only weighs that atom.
"""

from rulesplit import decompose_program, parse, render

AGGREGATE = """
popular(X) :- account(X), 2 <= #count{Y : follows(Y,X), follows(Z,Y), active(Z)}.
account(1). account(2).
follows(2,1). follows(3,2). follows(3,1). active(3).
"""

print("aggregate input:")
print(render(parse(AGGREGATE)))
rewritten, _ = decompose_program(parse(AGGREGATE))
print("aggregate output (the Y,Z join left the condition):")
print(render(rewritten))

WEAK = """
:~ assign(T,P), room(P,R), near(R,B), not quiet(B). [1@0, T]
assign(1,2). room(2,3). near(3,4).
"""

print("weak-constraint input:")
print(render(parse(WEAK)))
rewritten, _ = decompose_program(parse(WEAK))
print("weak-constraint output (the join moved out of the weak constraint):")
print(render(rewritten))
