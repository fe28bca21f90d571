"""Groebner basis of the left ideal A(Sq1, Sq2) and its quotient dimensions.

The staircase of the basis counts A/A(Sq1, Sq2) degree by degree; the same
numbers come out of plain linear algebra over the Milnor basis.
"""

from fcgb import oracles
from fcgb.groebner import buchberger
from fcgb.milnor import MilnorElt, milnor_to_pst
from fcgb.order import monomials_of_degree

TOP = 16
gens = [milnor_to_pst(MilnorElt.sq(n)).raw for n in (1, 2)]
H = buchberger(gens, deg_cap=TOP)
print(H.dump(), end="")

staircase = [len(H.staircase([0], d, monomials_of_degree)) for d in range(TOP + 1)]
ranks = oracles.quotient_dimensions([frozenset({(0, (1,))}), frozenset({(0, (2,))})], [0], TOP)
print("staircase:", staircase)
print("ranks:    ", ranks)
assert staircase == ranks
