"""Time envelopes: Gaussian pulses, trains, and counter-intuitive pulse pairs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .exceptions import DomainError

FIGURE_IDS = ("fig1b", "fig2", "fig5")


@dataclass(frozen=True)
class GaussianPulse:
    """A(t) = amplitude * exp(-shape_c * (t - center)^2 / width^2)."""

    amplitude: float
    center: float
    width: float
    shape_c: float = 1.0

    def __post_init__(self):
        if self.amplitude < 0:
            raise DomainError("amplitude must be nonnegative")
        if self.width <= 0 or self.shape_c <= 0:
            raise DomainError("width and shape_c must be positive")

    def value(self, t):
        t = np.asarray(t, dtype=float)
        out = self.amplitude * np.exp(-self.shape_c * (t - self.center) ** 2 / self.width**2)
        return out if out.ndim else float(out)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        out = self.value(t) * (-2 * self.shape_c * (t - self.center) / self.width**2)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class PulseTrain:
    """Sum of Gaussian pulses; evaluation is linear in the members."""

    pulses: Tuple[GaussianPulse, ...]

    def __post_init__(self):
        object.__setattr__(self, "pulses", tuple(self.pulses))

    def value(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for p in self.pulses:
            out = out + p.value(t)
        return out if out.ndim else float(out)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for p in self.pulses:
            out = out + p.derivative(t)
        return out if out.ndim else float(out)

    @property
    def last_center(self) -> float:
        return max(p.center for p in self.pulses)


def evaluate(train: PulseTrain, t):
    """Envelope value at time t (sum over members)."""
    return train.value(t)


@dataclass(frozen=True)
class StirapSchedule:
    """A pump/Stokes envelope pair over a common horizon.

    ``pump`` is the component addressing the initially unpopulated branch;
    in the counter-intuitive ordering it peaks first.
    """

    pump: PulseTrain
    stokes: PulseTrain

    @property
    def pump_leads(self) -> bool:
        return min(p.center for p in self.pump.pulses) <= min(p.center for p in self.stokes.pulses)

    @property
    def recommended_t_end(self) -> float:
        """Horizon covering the trains: last center plus six widths."""
        return max(p.center + 6 * p.width
                   for train in (self.pump, self.stokes) for p in train.pulses)


def make_fig_schedule(figure_id: str) -> StirapSchedule:
    """Built-in pulse schedules, parameters taken verbatim from the figure captions.

    The fig2 and fig5 centre lists end with an ellipsis in the source; only
    the explicitly listed centres are instantiated (fig5 lists four pump
    centres but only three Stokes centres).
    """
    if figure_id == "fig1b":
        T = 5.5
        t_mu = 4.5 * T
        t_nu = t_mu + 2.75 * T
        pump = PulseTrain((GaussianPulse(0.75, t_mu, T, shape_c=0.2),))
        stokes = PulseTrain((GaussianPulse(0.75, t_nu, T, shape_c=0.2),))
        return StirapSchedule(pump=pump, stokes=stokes)
    if figure_id == "fig2":
        mu_centers = (1.23, 3.31, 4.53, 6.62)
        nu_centers = (1.72, 2.94, 5.02, 6.25)
        pump = PulseTrain(tuple(GaussianPulse(60.0, c, 1.0, shape_c=3.27) for c in mu_centers))
        stokes = PulseTrain(tuple(GaussianPulse(60.0, c, 1.0, shape_c=3.27) for c in nu_centers))
        return StirapSchedule(pump=pump, stokes=stokes)
    if figure_id == "fig5":
        T = 1.15
        t_mu = 10 * T
        t_nu = t_mu + 3.75 * T
        mu_n = (1.0, 2.5, 3.25, 4.8)
        nu_n = (1.0, 1.55, 2.65)
        pump = PulseTrain(tuple(GaussianPulse(20.0, n * t_mu, T, shape_c=0.09) for n in mu_n))
        stokes = PulseTrain(tuple(GaussianPulse(20.0, n * t_nu, T, shape_c=0.09) for n in nu_n))
        return StirapSchedule(pump=pump, stokes=stokes)
    raise DomainError(f"unknown figure id {figure_id!r}; expected one of {FIGURE_IDS}")


def adiabaticity_margin(schedule: StirapSchedule, t: float) -> float:
    """|d theta/dt| / sqrt(E_pump^2 + E_stokes^2) with tan(theta) = E_pump/E_stokes.

    Values well below 1 indicate the mixing angle turns slowly enough for
    dark-state following. Undefined where both envelopes vanish.
    """
    ep, es = schedule.pump.value(t), schedule.stokes.value(t)
    dp, ds = schedule.pump.derivative(t), schedule.stokes.derivative(t)
    norm2 = ep**2 + es**2
    if norm2 == 0:
        raise DomainError(f"both envelopes vanish at t={t}; mixing angle undefined")
    theta_dot = (dp * es - ep * ds) / norm2
    return abs(theta_dot) / np.sqrt(norm2)
