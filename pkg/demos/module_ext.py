"""Ext of a module given in the text format, and the action of h0 and h1 on it.

A / A Sq1 is the cohomology of the integral Eilenberg-MacLane spectrum, whose
Ext is a single h0-tower.
"""

from fcgb import ext_chart, parse_module, products, resolve

text = """
# A / A Sq1
rank 1
degrees 0
relation Sq(1)*v1
"""
T = 12
module = resolve(parse_module(text), s_max=8, t_max=T)
f2 = resolve("F2", s_max=8, t_max=T)
chart = ext_chart(module)
print(chart.to_tsv(), end="")

bottom = chart.entries[0].name
table = products(module, [bottom], t_max=T, chart=chart, target=f2)
print("h0 *", bottom, "=", table[(bottom, "h0")])
print("h1 *", bottom, "=", table[(bottom, "h1")] or 0)
