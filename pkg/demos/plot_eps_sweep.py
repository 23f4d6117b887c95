"""
How the cycle moves with the damping strength
=============================================

For small ``eps`` averaging predicts a circle of radius 1 traversed with
frequency ``1 + eps/8``; as ``eps`` grows the orbit deforms and becomes
strongly attracting.
"""

import math
import sys

from limcyc.model import ETBA_TEMPLATE
from limcyc.verify import epsilon_sweep, epsilon_sweep_csv

eps = [0.01, 0.03, 0.1, 0.3, 1.0, 3.0]
entries = epsilon_sweep(ETBA_TEMPLATE, eps)
for e in entries:
    c = e.cycle
    print(f"eps={e.eps:<5g} x*={c.x_star:.6f}  T={c.period:.5f}  "
          f"averaging T={2 * math.pi / (1 + e.eps / 8):.5f}  multiplier={c.floquet_multiplier:.3e}")

epsilon_sweep_csv(entries, sys.stdout)
