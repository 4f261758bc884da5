"""
Per-mode error accumulation factors
===================================

The one-step defect of mode l is delta_l and n steps add up through the
geometric sum S_{n,l}.  Under tau < h^2/pi the product stays below pi tau / 2
for every mode and every n; with tau = 4 h^2 some modes resonate.
"""
import math

from splitnlse.analysis import rco_diagnostics
from splitnlse.spectral import Grid

grid = Grid(-16.0, 16.0, 256)
cfl = grid.h ** 2 / math.pi

for ratio in (0.5, 0.9, 0.999, 4 * math.pi):
    tau = ratio * cfl
    worst = max(rco_diagnostics(grid, tau, n).max_product for n in (1, 10, 100, 1000, 5000))
    print(f"tau = {ratio:7.3f} h^2/pi  max |delta S| / (pi tau/2) = {worst / (math.pi * tau / 2):.3f}")

# where is the largest product for the resonant step?
table = rco_diagnostics(grid, 4 * grid.h ** 2, 777)
top = sorted(table.rows(), key=lambda r: -r[4])[:5]
for l, mu, d, s, p in top:
    print(f"l={l:5d} mu={mu:8.3f} |delta|={d:.3e} |S|={s:9.2f} product={p:.3e}")
