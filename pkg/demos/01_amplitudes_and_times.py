"""Transmission amplitude of a rectangular barrier and the two time parameters.

Below the barrier top the modulus of A falls off exponentially with width.
The phase time is measured relative to free motion, so the traversal time
is tau_w + w / v0; it saturates for opaque barriers (the width-independence
usually called the Hartman effect) while the amplitude time keeps growing.
"""

import numpy as np

from tunneltime import make_rectangular, transmission_amplitudes, tunneling_times

V0, MASS, K0 = 1.0, 1.0, 1.0
grid = np.linspace(0.5, 1.5, 2001)

print(f"reference momentum {K0}, barrier height {V0} (energy {K0**2 / 2} < V0)\n")
print(f"{'width':>6} {'|A|^2':>12} {'tau_w':>10} {'tau_a':>10} {'tau_bl':>10} {'w / v0':>8}")
for w in (0.25, 0.5, 1.0, 2.0, 4.0, 8.0):
    amps = transmission_amplitudes(make_rectangular(V0, w), MASS, grid)
    tt = tunneling_times(amps, K0)
    a2 = abs(amps.evaluate(np.array([K0]))[0]) ** 2
    print(f"{w:6.2f} {a2:12.4e} {tt.tau_w:10.4f} {tt.tau_a:10.4f} {tt.tau_bl:10.4f} {w / tt.v0:8.2f}")

# tau_w here is measured against free motion across the barrier, so the
# total traversal time is tau_w + w / v0; it stops growing with w
print("\ntau_w + w/v0 approaches a constant for opaque barriers:")
for w in (4.0, 8.0, 16.0):
    tt = tunneling_times(transmission_amplitudes(make_rectangular(V0, w), MASS, grid), K0)
    print(f"  w = {w:5.1f}: {tt.tau_w + w / tt.v0:.6f}")
