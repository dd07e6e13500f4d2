"""No-jump propagation, population traces, decay fits, and jump sampling.

Between detection events the state evolves under the non-Hermitian
generator; its squared norm is the no-jump survival probability. First
emissions are sampled by inverse transform from the stored survival curve,
and emission directions from the direction-resolved rate at the sampled
jump time, so one deterministic propagation serves any number of
trajectories.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._integrator import rk4_propagate, warm_up
from .coupling import AtomGeometry, dipole_pattern
from .exceptions import DomainError, TailMassWarning
from .hamiltonian import CollectiveBasis, EffectiveHamiltonian, lowering_operator

DEFAULT_BASE_STEP = 1e-3
PHASE_RESOLUTION = 0.05          # max (frequency x step) the integrator allows
SURVIVAL_TAIL_THRESHOLD = 1e-3


@dataclass(frozen=True)
class StateTrace:
    """Unnormalised state vectors on a strictly increasing time grid."""

    times: np.ndarray
    states: np.ndarray                  # (n_times, dim) complex
    basis: str = "product"              # or "collective"
    labels: tuple | None = None
    step: float = np.nan                # internal integrator step actually used
    substeps: int = 1

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def norms_squared(self) -> np.ndarray:
        return np.einsum("ti,ti->t", self.states.conj(), self.states).real

    def state_at(self, index: int) -> np.ndarray:
        return self.states[index]


@dataclass(frozen=True)
class EmissionEvent:
    """One detected photon: when, which direction, and what remains."""

    trajectory: int
    time: float
    theta: float
    post_state: np.ndarray


def recommended_step(h: EffectiveHamiltonian, t_probe: Sequence[float],
                     min_pulse_width: float | None = None) -> float:
    """Fixed step resolving the generator norm, carrier beats, and pulse widths.

    min(1e-3, T_min/50, 0.05 / (max ||H|| + max |carrier|)); the carrier
    frequencies enter because a detuned drive oscillates faster than its
    matrix norm suggests.
    """
    hnorm = max(np.linalg.norm(h(t), 2) for t in t_probe)
    wmax = max((abs(w) for _, w, _ in h.terms), default=0.0)
    cap = PHASE_RESOLUTION / max(hnorm + wmax, 1e-12)
    step = min(DEFAULT_BASE_STEP, cap)
    if min_pulse_width is not None:
        step = min(step, min_pulse_width / 50)
    return step


def evolve(h: EffectiveHamiltonian, psi0: np.ndarray, t_grid: np.ndarray,
           step: float | None = None, use_numba: bool = True) -> StateTrace:
    """Propagate dpsi/dt = -i H(t) psi across a uniform output grid.

    The integrator subdivides each grid interval into equal substeps no
    larger than ``step`` (default from :func:`recommended_step`), so output
    times are hit exactly. Aborts on non-finite amplitudes.
    """
    t_grid = np.asarray(t_grid, float)
    if t_grid.ndim != 1 or len(t_grid) < 2:
        raise DomainError("t_grid must contain at least two times")
    dt_out = np.diff(t_grid)
    if np.any(dt_out <= 0) or not np.allclose(dt_out, dt_out[0], rtol=1e-9, atol=0):
        raise DomainError("t_grid must be uniform and increasing")
    if abs(t_grid[0]) > 1e-12:
        raise DomainError("traces start at t = 0")
    psi0 = np.asarray(psi0, complex)
    if abs(np.linalg.norm(psi0) - 1) > 1e-9:
        raise DomainError("initial state must be normalised")
    out_step = float(dt_out[0])
    if step is None:
        probes = np.linspace(t_grid[0], t_grid[-1], 13)
        step = recommended_step(h, probes)
    substeps = max(1, int(np.ceil(out_step / step - 1e-12)))
    dt = out_step / substeps
    n_steps = substeps * (len(t_grid) - 1)
    if n_steps > 50_000_000:
        raise DomainError(f"step {dt:g} underflows the horizon ({n_steps} steps)")
    states = rk4_propagate(h.h0, list(h.terms), psi0, dt, n_steps,
                           keep_every=substeps, use_numba=use_numba)
    finite = np.all(np.isfinite(states), axis=1)
    norms = np.where(finite, np.einsum("ti,ti->t", states.conj(), states).real, np.inf)
    if not np.all(finite) or np.any(norms > 4.0):
        # no-jump evolution never grows the norm, so growth means instability
        bad = int(np.flatnonzero(~finite | (norms > 4.0))[0])
        raise FloatingPointError(
            f"unstable amplitudes at t ~ {t_grid[bad]:g}; the step {dt:g} "
            "is too coarse for this generator")
    return StateTrace(times=t_grid, states=states,
                      basis="collective" if h.labels else "product",
                      labels=h.labels, step=dt, substeps=substeps)


def populations(trace: StateTrace, basis: CollectiveBasis | None = None,
                normalized: bool = False):
    """Per-level |amplitude|^2 time series.

    With ``basis`` the trace is rotated into the collective frame first.
    ``normalized=True`` divides by the survival probability, giving
    populations conditioned on no emission so far.
    """
    if basis is not None:
        if basis.transform.shape[1] != trace.dim:
            raise DomainError("basis dimension does not match the trace")
        amps = trace.states @ basis.transform.conj().T
        labels = basis.labels
    else:
        amps = trace.states
        labels = trace.labels or tuple(str(i) for i in range(trace.dim))
    p = np.abs(amps) ** 2
    if normalized:
        p = p / np.maximum(p.sum(axis=1, keepdims=True), 1e-300)
    return labels, p


def fit_decay_rate(trace: StateTrace, window: tuple) -> float:
    """Least-squares exponential rate of the survival probability on a window."""
    t0, t1 = window
    mask = (trace.times >= t0) & (trace.times <= t1)
    if int(mask.sum()) < 10:
        raise DomainError("fit window holds fewer than 10 samples")
    n2 = trace.norms_squared()[mask]
    if np.any(n2 <= 0):
        raise DomainError("survival probability vanishes inside the window")
    slope = np.polyfit(trace.times[mask], np.log(n2), 1)[0]
    return -float(slope)


# ---------------------------------------------------------------------------
# jump-trajectory sampling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrajectoryEnsemble:
    """First-emission samples plus the deterministic trace they came from."""

    trace: StateTrace
    trajectory_ids: np.ndarray
    times: np.ndarray
    thetas: np.ndarray
    post_states: np.ndarray
    n_censored: int               # trajectories with no emission inside the horizon
    tail_mass: float
    seed: int

    @property
    def n_trajectories(self) -> int:
        return len(self.trajectory_ids) + self.n_censored

    def events(self):
        return [EmissionEvent(int(i), float(t), float(th), self.post_states[k])
                for k, (i, t, th) in enumerate(zip(self.trajectory_ids, self.times, self.thetas))]

    def statistics(self) -> dict:
        frac = len(self.times) / max(self.n_trajectories, 1)
        return {
            "n_trajectories": self.n_trajectories,
            "n_emitted": int(len(self.times)),
            "emitted_fraction": frac,
            "mean_emission_time": float(np.mean(self.times)) if len(self.times) else np.nan,
            "tail_mass": self.tail_mass,
        }


def _emission_correlations(trace: StateTrace, n_atoms: int) -> np.ndarray:
    """C_jk(t) = <psi(t)| sigma_j^+ sigma_k^- |psi(t)>, shape (n_t, N, N)."""
    lows = [trace.states @ lowering_operator(n_atoms, j).T for j in range(n_atoms)]
    C = np.empty((trace.states.shape[0], n_atoms, n_atoms), complex)
    for j in range(n_atoms):
        for k in range(n_atoms):
            C[:, j, k] = np.einsum("ti,ti->t", lows[j].conj(), lows[k])
    return C


def direction_density(C_t: np.ndarray, thetas: np.ndarray, geom: AtomGeometry) -> np.ndarray:
    """gamma D(theta) sum_jk conj(p_j) p_k C_jk per theta; rows follow C_t."""
    n = C_t.shape[-1]
    zeta = 2 * np.pi * geom.spacing_s * np.cos(thetas)
    phases = np.exp(-1j * np.outer(zeta, np.arange(n)))
    vals = np.einsum("aj,tjk,ak->ta", phases.conj(), C_t, phases).real
    return geom.gamma * dipole_pattern(thetas)[None, :] * vals


def sample_trajectories(h: EffectiveHamiltonian, psi0: np.ndarray, geom: AtomGeometry,
                        t_grid: np.ndarray, n_traj: int, seed: int,
                        theta_bins: int = 361, step: float | None = None,
                        trace: StateTrace | None = None) -> TrajectoryEnsemble:
    """Sample first-emission (time, direction) pairs for ``n_traj`` unravellings.

    Times come from the survival curve by inverse transform with monotone
    linear interpolation; directions from the jump-operator rate at the
    sampled time, discretised on ``theta_bins`` points. Trajectory i consumes
    row i of a pre-drawn uniform matrix, so results are reproducible and
    independent of evaluation order. Requires the dipole-perpendicular
    configuration (alpha = pi/2) because directions integrate out the
    azimuth there.
    """
    if n_traj < 1:
        raise DomainError("n_traj must be at least 1")
    if trace is None:
        trace = evolve(h, psi0, t_grid, step=step)
    surv = trace.norms_squared()
    tail = float(surv[-1])
    if tail > SURVIVAL_TAIL_THRESHOLD:
        warnings.warn(f"survival {tail:.3e} at the end of the horizon exceeds "
                      f"{SURVIVAL_TAIL_THRESHOLD:g}; late emissions are censored",
                      TailMassWarning, stacklevel=2)

    rng = np.random.default_rng(seed)
    U = rng.random((n_traj, 2))

    emitted = U[:, 0] > tail
    u_time = U[emitted, 0]
    u_dir = U[emitted, 1]
    ids = np.flatnonzero(emitted)

    # survival is decreasing; invert by bracketing on the stored grid
    dec = -surv
    idx = np.searchsorted(dec, -u_time, side="right") - 1
    idx = np.clip(idx, 0, len(surv) - 2)
    denom = surv[idx] - surv[idx + 1]
    frac = np.where(denom > 0, (surv[idx] - u_time) / np.where(denom > 0, denom, 1.0), 0.0)
    t_jump = trace.times[idx] + frac * (trace.times[1] - trace.times[0])

    C = _emission_correlations(trace, geom.n_atoms)
    thetas = np.linspace(0.0, np.pi, theta_bins)
    if abs(geom.alpha - np.pi / 2) > 1e-12:
        from .exceptions import UnsupportedConfigurationError
        raise UnsupportedConfigurationError("direction sampling needs alpha = pi/2")

    theta_out = np.empty(len(ids))
    post = np.empty((len(ids), trace.dim), complex)
    sin_th = np.sin(thetas)
    chunk = 8192
    from .emission import jump_operator
    for lo in range(0, len(ids), chunk):
        sl = slice(lo, min(lo + chunk, len(ids)))
        Ct = C[idx[sl]] + frac[sl, None, None] * (C[idx[sl] + 1] - C[idx[sl]])
        dens = direction_density(Ct, thetas, geom) * sin_th[None, :]
        cdf = np.cumsum((dens[:, 1:] + dens[:, :-1]) * 0.5 * np.diff(thetas)[None, :], axis=1)
        total = cdf[:, -1:]
        cdf = cdf / np.maximum(total, 1e-300)
        pick = np.sum(cdf < u_dir[sl, None], axis=1)
        pick = np.clip(pick, 0, theta_bins - 2)
        c_lo = np.where(pick > 0, np.take_along_axis(cdf, pick[:, None] - 1, 1)[:, 0], 0.0)
        c_hi = np.take_along_axis(cdf, pick[:, None], 1)[:, 0]
        f2 = np.where(c_hi > c_lo, (u_dir[sl] - c_lo) / np.where(c_hi > c_lo, c_hi - c_lo, 1.0), 0.5)
        theta_out[sl] = thetas[pick] + f2 * (thetas[1] - thetas[0])
    # post-jump states at the stored grid point nearest each jump
    near = np.clip(np.round((t_jump - trace.times[0]) / (trace.times[1] - trace.times[0])).astype(int),
                   0, len(trace.times) - 1)
    for k, (i_t, th) in enumerate(zip(near, theta_out)):
        s_psi = jump_operator(th, geom) @ trace.states[i_t]
        nrm = np.linalg.norm(s_psi)
        post[k] = s_psi / nrm if nrm > 0 else s_psi
    return TrajectoryEnsemble(trace=trace, trajectory_ids=ids, times=t_jump,
                              thetas=theta_out, post_states=post,
                              n_censored=int(n_traj - emitted.sum()),
                              tail_mass=tail, seed=seed)


__all__ = [
    "StateTrace", "EmissionEvent", "TrajectoryEnsemble", "evolve", "populations",
    "fit_decay_rate", "sample_trajectories", "direction_density", "recommended_step",
    "warm_up",
]
