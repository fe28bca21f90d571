"""Resolve F_2 over the Steenrod algebra and print the low part of the Adams chart.

    python demos/adams_chart.py [t_max]
"""

import sys

from fcgb import ext_chart, products, resolve

t_max = int(sys.argv[1]) if len(sys.argv) > 1 else 20
state = resolve("F2", s_max=t_max, t_max=t_max)
chart = ext_chart(state)

grid: dict[tuple[int, int], int] = {}
for e in chart.entries:
    grid[(e.t - e.s, e.s)] = grid.get((e.t - e.s, e.s), 0) + 1
s_top = max(s for _, s in grid)
for s in range(min(s_top, 10), -1, -1):
    row = "".join(f"{grid.get((n, s), 0) or '.':>3}" for n in range(t_max + 1))
    print(f"s={s:<3}{row}")
print("    " + "".join(f"{n:>3}" for n in range(t_max + 1)))

table = products(state, ["h0", "h1", "h2"], t_max=t_max, chart=chart)
print("\nh0*h1 =", table[("h0", "h1")] or 0)
print("h1*h2 =", table[("h1", "h2")] or 0)
print("h1*h1 =", table[("h1", "h1")])
