"""Hot-path stepping kernels (numba).

The RK4 step of dz/dt = -f nu with the same 4th-order periodic stencils the
analysis code uses.  Keeping the whole step in one jitted loop makes a
single desk-scale run (10^4..10^5 steps) a matter of seconds.
"""

import math

import numpy as np
from numba import njit

# advance() reason codes
OK = 0
HIT_MIN_R = 1
HIT_MAX_F = 2
UNDERFLOW = 3


@njit(cache=True)
def rhs(z, n, h, out_v):
    """Velocity -f*nu at each node; returns max |f|."""
    N = z.shape[0]
    inv12h = 1.0 / (12.0 * h)
    inv12h2 = 1.0 / (12.0 * h * h)
    maxf = 0.0
    for j in range(N):
        jm2 = j - 2
        jm1 = j - 1
        jp1 = j + 1
        jp2 = j + 2
        if jm2 < 0:
            jm2 += N
        if jm1 < 0:
            jm1 += N
        if jp1 >= N:
            jp1 -= N
        if jp2 >= N:
            jp2 -= N
        zp = (8.0 * (z[jp1] - z[jm1]) - (z[jp2] - z[jm2])) * inv12h
        zpp = (-(z[jp2] + z[jm2]) + 16.0 * (z[jp1] + z[jm1]) - 30.0 * z[j]) * inv12h2
        g = zp.real * zp.real + zp.imag * zp.imag
        sg = math.sqrt(g)
        nux = zp.imag / sg
        nuy = -zp.real / sg
        f = -(zpp.real * nux + zpp.imag * nuy) / g
        if n > 1:
            r2 = z[j].real * z[j].real + z[j].imag * z[j].imag
            f += (n - 1) * (z[j].real * nux + z[j].imag * nuy) / r2
        out_v[j] = complex(-f * nux, -f * nuy)
        af = abs(f)
        if af > maxf:
            maxf = af
    return maxf


@njit(cache=True)
def advance(z, n, h, cfl, stop_min_r, stop_max_f, nsteps, t0, dt_fixed):
    """Advance z in place by up to nsteps RK4 steps.

    Stop checks run before each step.  dt_fixed > 0 overrides the CFL rule.
    Returns (t, steps_done, reason, dt_last).
    """
    N = z.shape[0]
    v1 = np.empty(N, np.complex128)
    v2 = np.empty(N, np.complex128)
    v3 = np.empty(N, np.complex128)
    v4 = np.empty(N, np.complex128)
    zs = np.empty(N, np.complex128)
    t = t0
    steps = 0
    dt_last = 0.0
    while steps < nsteps:
        minr = 1e300
        cmin = 1e300
        for j in range(N):
            rj = abs(z[j])
            if rj < minr:
                minr = rj
            jp1 = j + 1
            if jp1 >= N:
                jp1 -= N
            c = abs(z[jp1] - z[j])
            if c < cmin:
                cmin = c
        if minr <= stop_min_r:
            return t, steps, HIT_MIN_R, dt_last
        maxf = rhs(z, n, h, v1)
        if maxf > stop_max_f:
            return t, steps, HIT_MAX_F, dt_last
        if dt_fixed > 0.0:
            dt = dt_fixed
        else:
            dt = cfl * cmin * cmin / (1.0 + maxf * cmin)
        if dt < 1e-15:
            return t, steps, UNDERFLOW, dt_last
        half = 0.5 * dt
        for j in range(N):
            zs[j] = z[j] + half * v1[j]
        rhs(zs, n, h, v2)
        for j in range(N):
            zs[j] = z[j] + half * v2[j]
        rhs(zs, n, h, v3)
        for j in range(N):
            zs[j] = z[j] + dt * v3[j]
        rhs(zs, n, h, v4)
        sixth = dt / 6.0
        for j in range(N):
            z[j] = z[j] + sixth * (v1[j] + 2.0 * (v2[j] + v3[j]) + v4[j])
        t += dt
        steps += 1
        dt_last = dt
    return t, steps, OK, dt_last
