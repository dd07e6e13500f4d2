"""Fixed-step RK4 propagation of dpsi/dt = -i H(t) psi.

H(t) is represented as a constant (generally non-Hermitian) matrix plus
modulated terms,

    H(t) = H0 + sum_m a_m(t) exp(i w_m t) K_m + h.c. of the modulated part,

which covers every drive in this package: envelopes a_m are evaluated on
the stage-time grid up front, so the inner loop touches no Python objects.
The step is fixed (no adaptive control) to keep runs bit-reproducible.

The hot loop is JIT-compiled with numba when available; a numpy fallback
implements the identical arithmetic.
"""

from __future__ import annotations

import numpy as np

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False


def _rk4_core_py(h0, kmats, freqs, env, psi0, dt, n_steps, keep_every):
    dim = psi0.shape[0]
    n_keep = n_steps // keep_every + 1
    out = np.empty((n_keep, dim), complex)
    psi = psi0.copy()
    out[0] = psi
    half = 0.5 * dt

    def hmat(stage_idx, ts):
        H = h0.copy()
        for m in range(kmats.shape[0]):
            z = env[m, stage_idx] * np.exp(1j * freqs[m] * ts)
            H += z * kmats[m]
            H += np.conj(z) * kmats[m].conj().T
        return H

    for k in range(n_steps):
        t = k * dt
        H1 = hmat(3 * k, t)
        H2 = hmat(3 * k + 1, t + half)
        H3 = hmat(3 * k + 2, t + dt)
        k1 = -1j * (H1 @ psi)
        k2 = -1j * (H2 @ (psi + half * k1))
        k3 = -1j * (H2 @ (psi + half * k2))
        k4 = -1j * (H3 @ (psi + dt * k3))
        psi = psi + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if (k + 1) % keep_every == 0:
            out[(k + 1) // keep_every] = psi
    return out


if _HAVE_NUMBA:

    @numba.njit(cache=True)
    def _rk4_core_nb(h0, kmats, freqs, env, psi0, dt, n_steps, keep_every):  # pragma: no cover
        dim = psi0.shape[0]
        n_terms = kmats.shape[0]
        n_keep = n_steps // keep_every + 1
        out = np.empty((n_keep, dim), numba.complex128)
        psi = psi0.copy()
        out[0] = psi
        H = np.empty((dim, dim), numba.complex128)
        k1 = np.empty(dim, numba.complex128)
        k2 = np.empty(dim, numba.complex128)
        k3 = np.empty(dim, numba.complex128)
        k4 = np.empty(dim, numba.complex128)
        tmp = np.empty(dim, numba.complex128)
        half = 0.5 * dt
        for k in range(n_steps):
            t = k * dt
            for stage in range(3):
                ts = t + half * stage
                for i in range(dim):
                    for j in range(dim):
                        H[i, j] = h0[i, j]
                for m in range(n_terms):
                    z = env[m, 3 * k + stage] * np.exp(1j * freqs[m] * ts)
                    zc = np.conj(z)
                    for i in range(dim):
                        for j in range(dim):
                            kij = kmats[m, i, j]
                            if kij != 0:
                                H[i, j] += z * kij
                                H[j, i] += zc * np.conj(kij)
                if stage == 0:
                    for i in range(dim):
                        acc = 0j
                        for j in range(dim):
                            acc += H[i, j] * psi[j]
                        k1[i] = -1j * acc
                    for i in range(dim):
                        tmp[i] = psi[i] + half * k1[i]
                elif stage == 1:
                    for i in range(dim):
                        acc = 0j
                        for j in range(dim):
                            acc += H[i, j] * tmp[j]
                        k2[i] = -1j * acc
                    for i in range(dim):
                        tmp[i] = psi[i] + half * k2[i]
                    for i in range(dim):
                        acc = 0j
                        for j in range(dim):
                            acc += H[i, j] * tmp[j]
                        k3[i] = -1j * acc
                    for i in range(dim):
                        tmp[i] = psi[i] + dt * k3[i]
                else:
                    for i in range(dim):
                        acc = 0j
                        for j in range(dim):
                            acc += H[i, j] * tmp[j]
                        k4[i] = -1j * acc
            for i in range(dim):
                psi[i] = psi[i] + (dt / 6.0) * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i])
            if (k + 1) % keep_every == 0:
                out[(k + 1) // keep_every] = psi
        return out


def rk4_propagate(h0, terms, psi0, dt, n_steps, keep_every=1, use_numba=True):
    """Propagate and return states at every ``keep_every``-th step (incl. t=0).

    ``terms`` is a sequence of (K, freq, envelope) with ``envelope`` callable
    on float arrays; K may be any complex matrix (its Hermitian conjugate is
    added automatically with the conjugate coefficient).
    """
    dim = len(psi0)
    h0 = np.ascontiguousarray(h0, dtype=complex)
    psi0 = np.ascontiguousarray(psi0, dtype=complex)
    if n_steps % keep_every:
        raise ValueError("n_steps must be a multiple of keep_every")
    if not terms:
        terms = [(np.zeros((dim, dim)), 0.0, lambda t: np.zeros_like(t))]
    kmats = np.ascontiguousarray([K for K, _, _ in terms], dtype=complex)
    freqs = np.ascontiguousarray([w for _, w, _ in terms], dtype=float)
    base = np.arange(n_steps) * dt
    stage_t = np.empty(3 * n_steps)
    stage_t[0::3] = base
    stage_t[1::3] = base + 0.5 * dt
    stage_t[2::3] = base + dt
    env = np.ascontiguousarray(
        [np.broadcast_to(np.asarray(f(stage_t), dtype=complex), stage_t.shape)
         for _, _, f in terms], dtype=complex)
    core = _rk4_core_nb if (_HAVE_NUMBA and use_numba) else _rk4_core_py
    return core(h0, kmats, freqs, env, psi0, float(dt), int(n_steps), int(keep_every))


def warm_up():
    """Trigger JIT compilation once so later runs are not charged for it."""
    rk4_propagate(np.zeros((2, 2)), [(np.eye(2), 1.0, lambda t: np.ones_like(t))],
                  np.array([1.0, 0.0]), 0.1, 2, 1)
