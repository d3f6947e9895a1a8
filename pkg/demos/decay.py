## Decay of the local integral along spherical translates diag(p^-n, 1).
## Run: python demos/decay.py

import math

from padic_periods.characters import e_chars
from padic_periods.padic_base import make_params
from padic_periods.torus_integral import decay_experiment

p = 5
E = make_params(p, "inert")

for level in (0, 1):
    omega = e_chars(E, level)[-1]
    rows, slope, drift = decay_experiment(p, omega, 6)
    print(f"Omega of level {level}: fitted slope {slope:.3f} (need <= -0.325), refinement drift {drift:.1e}")
    for n, size in rows:
        bar = "#" * max(0, int(20 + 4 * math.log(size, p))) if size > 0 else ""
        print(f"  n={n}  |I| = {size:.3e}  {bar}")
