"""Jitted inner loop of the mode integrator.

One code path serves both schemes: each mode advances by
``x' = phi @ x + lmat @ (g1, g2)`` where ``phi`` is either the Euler update
matrix ``I + M*dt`` or the exact transition ``exp(M*dt)``, and ``lmat`` maps
the pair of standard normal draws to the (u, v) noise increment.  The first
draw always carries the dominant velocity noise so that both schemes can be
driven by the same stream.

Modes are the outer loop so the pair state stays in registers for a whole
chunk; ``gauss`` is mode-major ``(N, steps, 2)`` to keep reads contiguous.
"""

from numba import njit


@njit(cache=True)
def advance(u, v, phi, lmat, gauss, out_u, out_v):
    """Advance all modes ``gauss.shape[1]`` steps, recording post-step states.

    ``u``/``v`` (length N) are updated in place; ``out_u``/``out_v`` have
    shape ``(steps, N)`` and receive the state after each step.
    """
    n = u.shape[0]
    steps = gauss.shape[1]
    for i in range(n):
        p00 = phi[i, 0, 0]
        p01 = phi[i, 0, 1]
        p10 = phi[i, 1, 0]
        p11 = phi[i, 1, 1]
        l00 = lmat[i, 0, 0]
        l01 = lmat[i, 0, 1]
        l10 = lmat[i, 1, 0]
        l11 = lmat[i, 1, 1]
        uu = u[i]
        vv = v[i]
        for t in range(steps):
            g1 = gauss[i, t, 0]
            g2 = gauss[i, t, 1]
            unew = p00 * uu + p01 * vv + l00 * g1 + l01 * g2
            vnew = p10 * uu + p11 * vv + l10 * g1 + l11 * g2
            uu = unew
            vv = vnew
            out_u[t, i] = uu
            out_v[t, i] = vv
        u[i] = uu
        v[i] = vv


def advance_python(u, v, phi, lmat, gauss, out_u, out_v):
    """Reference implementation of :func:`advance` (vectorised numpy).

    Used in tests to pin down the jitted kernel; the per-step arithmetic and
    evaluation order are identical, so results agree bit for bit.
    """
    steps = gauss.shape[1]
    for t in range(steps):
        g1 = gauss[:, t, 0]
        g2 = gauss[:, t, 1]
        uu = phi[:, 0, 0] * u + phi[:, 0, 1] * v + lmat[:, 0, 0] * g1 + lmat[:, 0, 1] * g2
        vv = phi[:, 1, 0] * u + phi[:, 1, 1] * v + lmat[:, 1, 0] * g1 + lmat[:, 1, 1] * g2
        u[:] = uu
        v[:] = vv
        out_u[t] = uu
        out_v[t] = vv


__all__ = ["advance", "advance_python"]
