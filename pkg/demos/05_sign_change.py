"""Delay that turns into an advance.

For a thin barrier the phase time is positive: a packet that has just
cleared the barrier lags behind the free one by about v0 * tau_w. The
momentum-filtering advance grows linearly in time and overtakes the delay
at t* = m tau_w / (2 tau_a dp0^2).
"""

import numpy as np

from tunneltime import (
    GaussianWignerState,
    make_rectangular,
    shift_observables,
    sign_change_time,
    transmission_amplitudes,
    transmitted_exact,
    tunneling_times,
)

b = make_rectangular(1.0, 0.2)
s = GaussianWignerState.pure(1.0, -60.0, 25.0)
amps = transmission_amplitudes(b, 1.0, np.linspace(0.5, 1.5, 2001))
tt = tunneling_times(amps, s.p0)
t_star = sign_change_time(tt, s)
print(f"tau_w = {tt.tau_w:.5f} (> 0), tau_a = {tt.tau_a:.5f}, t* = {t_star:.1f}\n")
print(f"{'t':>7} {'first-order shift':>18} {'exact shift':>12}")
for t in (130.0, 0.5 * t_star, 0.9 * t_star, t_star, 1.1 * t_star, 2.0 * t_star, 4.0 * t_star):
    Q, w = s.center(t), s.width(t)
    q = np.linspace(Q - 0.5 * w, Q + 0.5 * w, 2001)
    exact = transmitted_exact(amps, s, t, q).peak() - Q
    print(f"{t:7.0f} {shift_observables(tt, s, t).delta_q_peak:18.5f} {exact:12.5f}")
