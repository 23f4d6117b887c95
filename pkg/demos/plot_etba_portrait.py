"""
Phase portrait of a damped oscillator with one limit cycle
==========================================================

The damping ``phi = eps (x^2 + xy + y^2 - 1)`` is negative near the origin
and positive far away, so orbits spiral out from the origin and in from
infinity. The certificates below show that exactly one periodic orbit sits
between them; the integrator then finds it.
"""

import numpy as np

from limcyc import analyze, etba, integrate, IntegratorOptions, State, plot_svg

m = etba(1.0)
rep = analyze(m, sweep=False)
print(rep.verdict.kind.value, "sigma =", rep.trapping.sigma)

# the cycle: crossing of the positive x-axis, period, Floquet multiplier
c = rep.cycle
print(f"x* = {c.x_star:.8f}  T = {c.period:.6f}  multiplier = {c.floquet_multiplier:.3e}")

# one orbit from inside, one from outside the cycle
inner = integrate(m, State(0.05, 0.0), IntegratorOptions(t_end=40.0))
outer = integrate(m, State(3.0, 0.0), IntegratorOptions(t_end=40.0))
for tr in (inner, outer):
    print("final radius", np.hypot(*tr.final))

plot_svg(rep, "etba_portrait.svg", trajectories=[inner, outer])
