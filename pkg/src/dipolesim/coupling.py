"""Geometry and pairwise coupling coefficients for a linear chain of two-level atoms.

Conventions
-----------
- The single-atom decay rate ``gamma`` is the unit of every rate in the
  package; times are in units of 1/gamma. Scenario files quote all Rabi
  frequencies and detunings on this scale.
- Atoms sit on a line at positions (i-1)*s in units of the emission
  wavelength, so the dimensionless pair separation is
  ``xi_ij = k0 r_ij = 2*pi*s*|i-j|``.
- ``alpha`` is the angle between the (common) dipole direction and the
  interatomic axis, in radians.

The complex pair coefficient returned by :func:`xi_coefficient` splits into
a coherent exchange part ``delta_ij = Re`` and a dissipative part
``gamma_ij = -2 Im``; the latter tends to ``gamma`` at zero separation and
oscillates with decaying amplitude at large separation (it changes sign
near xi ~ 2.6 for perpendicular dipoles, so only ``|gamma_ij| <= gamma`` is
enforced here).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError

MAX_ATOMS = 8


def xi_coefficient(xi_arg: float, alpha: float, gamma: float = 1.0) -> complex:
    """Complex coupling coefficient for one atom pair.

    Parameters
    ----------
    xi_arg:
        Dimensionless separation ``k0 r`` of the pair, strictly positive.
    alpha:
        Dipole-axis angle in radians.
    gamma:
        Single-atom decay rate (sets the unit).

    Returns
    -------
    complex
        ``-(3 gamma / 4) (e^{i xi} / xi^3) [xi^2 sin^2(alpha)
        - (1 - i xi)(1 - 3 cos^2(alpha))]``
    """
    if xi_arg <= 0:
        raise DomainError(f"pair separation must be positive, got xi={xi_arg}")
    xi = float(xi_arg)
    bracket = xi**2 * np.sin(alpha) ** 2 - (1 - 1j * xi) * (1 - 3 * np.cos(alpha) ** 2)
    return complex(-(0.75 * gamma) * np.exp(1j * xi) / xi**3 * bracket)


def dipole_pattern(theta):
    """Azimuth-integrated single-atom radiation density, 3/4 - (3/8) sin^2(theta).

    Normalised so that ``integral D(theta) sin(theta) dtheta = 1`` over
    [0, pi]. Out-of-range angles are rejected rather than clamped.
    """
    th = np.asarray(theta, dtype=float)
    if np.any(th < 0) or np.any(th > np.pi):
        raise DomainError("theta must lie in [0, pi]")
    out = 0.75 - 0.375 * np.sin(th) ** 2
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class AtomGeometry:
    """Physical parameters of the chain. The single source of truth for them.

    ``spacing_s`` is the neighbour separation in units of the emission
    wavelength. Use :meth:`from_xi` when a configuration quotes the
    dimensionless separation ``xi12 = k0 r`` instead.
    """

    n_atoms: int
    spacing_s: float = 0.0
    alpha: float = 0.0
    gamma: float = 1.0

    def __post_init__(self):
        if not 1 <= self.n_atoms <= MAX_ATOMS:
            raise DomainError(f"n_atoms must be in 1..{MAX_ATOMS}, got {self.n_atoms}")
        if self.n_atoms >= 2 and self.spacing_s <= 0:
            raise DomainError("spacing_s must be positive for n_atoms >= 2")
        if self.gamma <= 0:
            raise DomainError("gamma must be positive")

    @classmethod
    def from_xi(cls, n_atoms: int, xi12: float, alpha: float = 0.0, gamma: float = 1.0):
        return cls(n_atoms, xi12 / (2 * np.pi), alpha, gamma)

    @property
    def positions(self) -> np.ndarray:
        """Atom positions along the axis, in wavelength units."""
        return np.arange(self.n_atoms) * self.spacing_s

    def xi(self, i: int, j: int) -> float:
        """Dimensionless separation of atoms i and j (0-based)."""
        return 2 * np.pi * self.spacing_s * abs(i - j)


@dataclass(frozen=True)
class CouplingMatrix:
    """Pairwise coefficients of a geometry, with the coherent/dissipative split.

    The diagonal is stored as zero and never read; the single-atom decay
    ``gamma`` rides along because the collective widths need it.
    """

    xi: np.ndarray         # complex pair coefficients, zero diagonal
    delta: np.ndarray      # Re xi
    gamma_ij: np.ndarray   # -2 Im xi
    xi_args: np.ndarray    # dimensionless separations 2 pi s |i-j|
    gamma: float = 1.0

    def __post_init__(self):
        xi = np.asarray(self.xi)
        if not np.array_equal(xi, xi.T):
            raise DomainError("coupling matrix must be symmetric")
        if not (np.allclose(self.delta, xi.real, rtol=0, atol=0)
                and np.allclose(self.gamma_ij, -2 * xi.imag, rtol=0, atol=0)):
            raise DomainError("delta/gamma_ij do not reassemble xi")
        off = ~np.eye(xi.shape[0], dtype=bool)
        if np.any(np.abs(self.gamma_ij[off]) > self.gamma * (1 + 1e-12)):
            raise DomainError("|gamma_ij| exceeds the single-atom rate")

    @property
    def n_atoms(self) -> int:
        return self.xi.shape[0]

    def pair(self, i: int, j: int) -> complex:
        if i == j:
            raise DomainError("the self coefficient is not defined")
        return complex(self.xi[i, j])


def coupling_matrix(geom: AtomGeometry) -> CouplingMatrix:
    """All pair coefficients of a geometry."""
    n = geom.n_atoms
    xi = np.zeros((n, n), complex)
    args = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            a = geom.xi(i, j)
            z = xi_coefficient(a, geom.alpha, geom.gamma)
            xi[i, j] = xi[j, i] = z
            args[i, j] = args[j, i] = a
    return CouplingMatrix(xi=xi, delta=xi.real.copy(), gamma_ij=(-2 * xi.imag).copy(),
                          xi_args=args, gamma=geom.gamma)
