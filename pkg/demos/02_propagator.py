"""The transmission propagator T(r, p) of a rectangular barrier.

T vanishes for r < 0 (no part of the packet is moved forward by more than
the free motion would allow at r = 0), integrates to |A(p)|^2, and its
first moment is |A|^2 d(arg A)/dp.
"""

import numpy as np

from tunneltime import amplitude, make_rectangular, transmission_amplitudes, transmission_propagator

b = make_rectangular(1.0, 2.0)
amps = transmission_amplitudes(b, 1.0, np.linspace(0.4, 2.2, 2001))

for p in (0.6, 1.0, 1.6):
    prop = transmission_propagator(amps, p)
    a2 = abs(amplitude(b, 1.0, np.array([p]))[0]) ** 2
    neg = prop.r < -prop.dr
    pos = (prop.r > prop.dr) & (prop.r < 20)
    print(f"p = {p}: sigma_max {prop.sigma_max:g}, dr {prop.dr:.4g}, {prop.r.size} samples")
    print(f"  int T dr = {prop.integral():.12f}   |A|^2 = {a2:.12f}")
    print(f"  max |T| for r < 0 relative to max |T|: {np.max(np.abs(prop.values[neg])) / np.max(np.abs(prop.values)):.2e}")
    print(f"  T just after r = 0: {prop.values[pos][0]:+.4f}; at r = 5: "
          f"{np.interp(5.0, prop.r, prop.values):+.3e}")
