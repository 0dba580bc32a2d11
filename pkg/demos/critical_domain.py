"""How large must a hostile-boundary habitat be?

The closed form says pi for d=1, rho=1, q=0, and infinity once the
advection reaches 2 sqrt(d rho). The simulation bisects on the interval
length, classifying each probe as persistent or extinct.
"""

import math

from impulse_front import ModelParams, analytic, hybrid
from impulse_front.core import LinearMap, LogisticGrowth
from impulse_front.season import Box

params = ModelParams.isotropic(1.0, LogisticGrowth(1.0), LinearMap(1.0))
print("closed form:", analytic.critical_size(params, "interval"))

for L in (0.5 * math.pi, 0.9 * math.pi, 1.1 * math.pi, 2 * math.pi):
    res = hybrid.classify_persistence(params, Box.cube(L))
    print(f"L = {L:.3f}: {res.verdict.value} after {res.generations} generations")

est = hybrid.critical_length_search(params, (0.5 * math.pi, 2 * math.pi))
print(f"bisection estimate {est.estimate:.4f} (pi = {math.pi:.4f})")

for q in (0.0, 1.0, 1.9, 2.0, 2.5):
    print(f"q = {q}: critical size {analytic.critical_size(params.replace(q=[q])).size:.4f}")
