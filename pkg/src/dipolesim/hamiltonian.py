"""Effective Hamiltonians in the frame rotating at the atomic frequency.

The optical carrier never appears numerically: each drive component enters
through its detuning from the atomic resonance, and the no-jump generator is

    H(t) = H_sys + sum_f A_f(t) e^{i d_f t} sum_i w_{f,i} sigma_i^-  + h.c.

with per-atom complex weights w encoding standing-wave sign patterns or
plane-wave propagation phases. H_sys carries the pairwise exchange
couplings and, when decay is enabled, the anti-Hermitian -i/2 decay terms
(self and cross).

Collective-basis machinery for two and three atoms lives here as well:
level labels a..d (two atoms) and a..h (three atoms), the closed-form
three-atom spectrum, Raman/adiabatic-passage reductions, and dark states.

Product-basis index convention: atom 1 is the most significant bit, so for
two atoms the order is |00>, |01>, |10>, |11>.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence, Tuple

import numpy as np

from .coupling import AtomGeometry, CouplingMatrix
from .exceptions import (AmbiguityError, DomainError, SingularConfigurationError,
                         UnsupportedConfigurationError, ValidityWarning)

RAMAN_VALIDITY_FACTOR = 5.0


# ---------------------------------------------------------------------------
# product-basis operators
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def lowering_operator(n_atoms: int, atom: int) -> np.ndarray:
    """sigma^- of one atom in the product basis (atom 0 is the leftmost bit)."""
    dim = 2**n_atoms
    bit = 1 << (n_atoms - 1 - atom)
    M = np.zeros((dim, dim))
    for idx in range(dim):
        if idx & bit:
            M[idx & ~bit, idx] = 1.0
    M.setflags(write=False)
    return M


def product_index(bits: str) -> int:
    """Index of a product state given as a bit string, e.g. '10' -> atom 1 excited."""
    return int(bits, 2)


# ---------------------------------------------------------------------------
# drives
# ---------------------------------------------------------------------------

def as_envelope(env) -> Callable[[np.ndarray], np.ndarray]:
    """Normalise scalars, pulse objects, and callables to one callable form."""
    if np.isscalar(env):
        amp = complex(env)
        return lambda t: amp * np.ones_like(np.asarray(t, dtype=float), dtype=complex)
    if hasattr(env, "value"):
        return env.value
    if callable(env):
        return env
    raise DomainError(f"cannot interpret {env!r} as an envelope")


def symmetric_weights(n_atoms: int) -> np.ndarray:
    return np.ones(n_atoms, complex)


def antisymmetric_weights() -> np.ndarray:
    """Alternating standing-wave pattern for a pair."""
    return np.array([1.0, -1.0], complex)


def plane_wave_weights(n_atoms: int, spacing_s: float, beta: float = 0.0) -> np.ndarray:
    """w_j = exp(-i 2 pi s (j-1) cos(beta)) for propagation angle beta to the axis."""
    phase = 2 * np.pi * spacing_s * np.cos(beta)
    return np.exp(-1j * phase * np.arange(n_atoms))


@dataclass(frozen=True)
class DriveField:
    """One monochromatic component: envelope x carrier phase x weight pattern.

    ``scale`` multiplies the envelope; builders use it to fix amplitude
    conventions without touching the stored pulse shapes.
    """

    weights: np.ndarray
    detuning: float
    envelope: object
    scale: complex = 1.0

    def __post_init__(self):
        w = np.asarray(self.weights, complex)
        if np.any(np.abs(w) > 1 + 1e-12):
            raise DomainError("weight magnitudes must not exceed 1")
        object.__setattr__(self, "weights", w)

    def amplitude(self, t):
        return self.scale * np.asarray(as_envelope(self.envelope)(t), complex)


@dataclass(frozen=True)
class DriveSpec:
    """A bichromatic (or general multi-component) classical drive."""

    n_atoms: int
    fields: Tuple[DriveField, ...]
    omega_delta: float | None = None   # two-photon detuning, for Raman setups

    def __post_init__(self):
        object.__setattr__(self, "fields", tuple(self.fields))
        for f in self.fields:
            if len(f.weights) != self.n_atoms:
                raise DomainError("weight vector length must equal n_atoms")

    def coupling_operators(self) -> list[np.ndarray]:
        """Sigma^- sums, one per field, weights included."""
        ops = []
        for f in self.fields:
            L = sum(f.weights[i] * lowering_operator(self.n_atoms, i)
                    for i in range(self.n_atoms))
            ops.append(np.asarray(L, complex))
        return ops


def drive_hamiltonian(drive: DriveSpec, t: float) -> np.ndarray:
    """H_I(t) = sum_i E_i(t) sigma_i^- + h.c. in the rotating frame."""
    dim = 2**drive.n_atoms
    H = np.zeros((dim, dim), complex)
    for f, L in zip(drive.fields, drive.coupling_operators()):
        z = f.amplitude(t) * np.exp(1j * f.detuning * t)
        H += z * L
    return H + H.conj().T


# ---------------------------------------------------------------------------
# the no-jump generator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EffectiveHamiltonian:
    """H(t) = h0 + sum_m a_m(t) e^{i w_m t} K_m + h.c., evaluated lazily.

    ``terms`` holds (K, frequency, envelope-callable) triples in the form the
    integrator consumes; ``labels`` names the basis states of the frame the
    generator is written in.
    """

    dimension: int
    h0: np.ndarray
    terms: Tuple[tuple, ...] = ()
    frame: str = "rotating@omega0"
    labels: Tuple[str, ...] | None = None

    def __post_init__(self):
        h0 = np.asarray(self.h0, complex)
        if h0.shape != (self.dimension, self.dimension):
            raise DomainError("h0 shape does not match dimension")
        object.__setattr__(self, "h0", h0)
        object.__setattr__(self, "terms", tuple(self.terms))

    def __call__(self, t: float) -> np.ndarray:
        H = self.h0.copy()
        for K, w, env in self.terms:
            z = complex(np.asarray(as_envelope(env)(t), complex)) * np.exp(1j * w * t)
            H += z * K + np.conj(z) * np.asarray(K).conj().T
        return H

    def conjugated(self, U: np.ndarray, labels=None) -> "EffectiveHamiltonian":
        """The same generator rewritten in the basis ``new = U @ old``."""
        Ud = U.conj().T
        return EffectiveHamiltonian(
            dimension=self.dimension,
            h0=U @ self.h0 @ Ud,
            terms=tuple((U @ np.asarray(K, complex) @ Ud, w, env) for K, w, env in self.terms),
            frame=self.frame + "+rotated",
            labels=labels,
        )


def system_hamiltonian(geom: AtomGeometry, couplings: CouplingMatrix,
                       include_cross_decay: bool = True,
                       include_decay: bool = True,
                       drive: DriveSpec | None = None) -> EffectiveHamiltonian:
    """Chain Hamiltonian in the rotating frame, optionally with a drive attached.

    ``include_decay=False`` drops every anti-Hermitian piece (the coherent
    manipulation sections work in this limit); ``include_cross_decay=False``
    keeps the self terms -i gamma/2 but drops the pairwise -i gamma_ij/2.
    """
    n = geom.n_atoms
    dim = 2**n
    H = np.zeros((dim, dim), complex)
    for i in range(n):
        sm_i = lowering_operator(n, i)
        if include_decay:
            H += -0.5j * geom.gamma * (sm_i.T @ sm_i)
        for j in range(n):
            if i == j:
                continue
            z = couplings.xi[i, j]
            if not include_decay:
                z = z.real
            elif not include_cross_decay:
                z = z.real
            H += z * (sm_i.T @ lowering_operator(n, j))
    terms = ()
    if drive is not None:
        if drive.n_atoms != n:
            raise DomainError("drive atom count does not match the geometry")
        terms = tuple((L, f.detuning, _scaled_envelope(f))
                      for f, L in zip(drive.fields, drive.coupling_operators()))
    return EffectiveHamiltonian(dimension=dim, h0=H, terms=terms)


def _scaled_envelope(f: DriveField):
    base = as_envelope(f.envelope)
    scale = f.scale
    return lambda t: scale * np.asarray(base(t), complex)


# ---------------------------------------------------------------------------
# two-atom collective basis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CollectiveBasis:
    """Named eigenstates of the exchange coupling, as rows of a unitary.

    ``transform @ psi_product`` gives collective components; energies are
    rotating-frame values and widths are norm-squared decay rates
    (expectation of the dissipative matrix in each state).
    """

    labels: Tuple[str, ...]
    transform: np.ndarray
    energies: np.ndarray
    widths: np.ndarray

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def state(self, label: str) -> np.ndarray:
        """Product-basis vector of one collective state."""
        return self.transform[self.index(label)].conj()

    def to_collective(self, psi_product: np.ndarray) -> np.ndarray:
        return self.transform @ psi_product


def collective_basis_two(couplings: CouplingMatrix) -> CollectiveBasis:
    """Labels a,b,c,d with b the antisymmetric and c the symmetric Bell state."""
    if couplings.n_atoms != 2:
        raise DomainError("two-atom basis requested for n != 2")
    delta = couplings.delta[0, 1]
    big_gamma = couplings.gamma_ij[0, 1]
    g = couplings.gamma
    s2 = np.sqrt(2.0)
    U = np.zeros((4, 4), complex)
    U[0, 0] = 1.0                          # a = |00>
    U[1, 2], U[1, 1] = 1 / s2, -1 / s2     # b = (|10> - |01>)/sqrt2
    U[2, 2], U[2, 1] = 1 / s2, 1 / s2      # c = (|10> + |01>)/sqrt2
    U[3, 3] = 1.0                          # d = |11>
    return CollectiveBasis(
        labels=("a", "b", "c", "d"),
        transform=U,
        energies=np.array([0.0, -delta, +delta, 0.0]),
        widths=np.array([0.0, g - big_gamma, g + big_gamma, 2 * g]),
    )


def two_atom_collective_drive(E_mu: complex, E_nu: complex, omega_delta: float,
                              Delta: float, t: float) -> np.ndarray:
    """Bichromatic field Hamiltonian in the (a,b,c,d) basis, interaction picture.

    Carriers sit at -Delta-omega_delta (symmetric field mu) and
    +Delta-omega_delta (antisymmetric field nu) relative to the atomic
    frequency, leaving the four couplings with phases exp(-i t omega_delta),
    exp(-i t (2 Delta + omega_delta)) and exp(+i t (2 Delta - omega_delta)).
    """
    s2 = np.sqrt(2.0)
    H = np.zeros((4, 4), complex)
    H[2, 3] = E_mu * np.exp(-1j * omega_delta * t) / s2
    H[1, 3] = E_nu * np.exp(-1j * omega_delta * t) / s2
    H[0, 2] = E_mu * np.exp(-1j * (2 * Delta + omega_delta) * t) / s2
    H[0, 1] = -E_nu * np.exp(1j * (2 * Delta - omega_delta) * t) / s2
    return H + H.conj().T


def two_atom_collective_generator(E_mu_env, E_nu_env, omega_delta: float, Delta: float,
                                  widths: np.ndarray | None = None) -> EffectiveHamiltonian:
    """Time-parametrised version of :func:`two_atom_collective_drive`.

    ``widths`` (per-label decay rates) adds -i/2 diagonal terms; omit it to
    reproduce the decay-free manipulation dynamics.
    """

    def K(i, j):
        M = np.zeros((4, 4), complex)
        M[i, j] = 1 / np.sqrt(2.0)
        return M

    emu, enu = as_envelope(E_mu_env), as_envelope(E_nu_env)
    neg_enu = lambda t: -np.asarray(enu(t), complex)
    terms = (
        (K(2, 3), -omega_delta, emu),
        (K(1, 3), -omega_delta, enu),
        (K(0, 2), -(2 * Delta + omega_delta), emu),
        (K(0, 1), +(2 * Delta - omega_delta), neg_enu),
    )
    h0 = np.zeros((4, 4), complex)
    if widths is not None:
        h0 = np.diag(-0.5j * np.asarray(widths, complex))
    return EffectiveHamiltonian(dimension=4, h0=h0, terms=terms,
                                frame="collective-interaction-picture",
                                labels=("a", "b", "c", "d"))


def two_atom_bichromatic_drive(E_mu_env, E_nu_env, omega_delta: float,
                               Delta: float) -> DriveSpec:
    """Product-frame drive matching :func:`two_atom_collective_drive`.

    The symmetric component carries half the quoted amplitude on each atom
    and the antisymmetric one the alternating pattern (-1, +1)/2, which is
    what makes the collective matrix elements come out as E/sqrt(2).
    """
    mu = DriveField(weights=symmetric_weights(2), detuning=-Delta - omega_delta,
                    envelope=E_mu_env, scale=0.5)
    nu = DriveField(weights=np.array([-1.0, 1.0], complex), detuning=+Delta - omega_delta,
                    envelope=E_nu_env, scale=0.5)
    return DriveSpec(n_atoms=2, fields=(mu, nu), omega_delta=omega_delta)


def raman_effective_coupling(E_mu: complex, E_nu: complex, omega_delta: float) -> complex:
    """Two-photon coupling conj(E_nu) E_mu / (2 omega_delta) between the Bell states.

    Warns when the detuning is not at least ``RAMAN_VALIDITY_FACTOR`` times
    the field amplitudes, where eliminating the far levels stops being
    quantitatively reliable.
    """
    if omega_delta == 0:
        raise DomainError("omega_delta = 0 is the resonant (dark-state) regime")
    biggest = max(abs(E_mu), abs(E_nu))
    if biggest > 0 and abs(omega_delta) < RAMAN_VALIDITY_FACTOR * biggest:
        warnings.warn(
            f"|omega_delta| = {abs(omega_delta):g} is below "
            f"{RAMAN_VALIDITY_FACTOR:g} x max field ({biggest:g}); the two-photon "
            "reduction is only qualitative here", ValidityWarning, stacklevel=2)
    result = np.conj(E_nu) * E_mu / (2 * omega_delta)
    return complex(result) if np.iscomplexobj(result) or isinstance(result, complex) else float(result)


def dark_state_two(E_mu: float, E_nu: float) -> np.ndarray:
    """Normalised (b, c) components of the uncoupled superposition.

    Returns (-sin(theta), cos(theta)) with tan(theta) = E_mu/E_nu, i.e. the
    state E_nu|c> - E_mu|b> normalised.
    """
    if E_mu == 0 and E_nu == 0:
        raise DomainError("dark state undefined for vanishing fields")
    v = np.array([-E_mu, E_nu], complex)
    return v / np.linalg.norm(v)


# ---------------------------------------------------------------------------
# three-atom collective basis and spectrum
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThreeAtomSpectrum:
    """Closed-form quantities of the equally spaced three-atom chain."""

    delta_12: float
    delta_13: float
    delta_split: float          # sqrt(8 delta_12^2 + delta_13^2)
    kappa: float
    eta: float
    varsigma: float
    delta_pm: Tuple[float, float]
    gamma_b: float
    gamma_c: float

    @classmethod
    def from_deltas(cls, delta_12: float, delta_13: float,
                    gamma_b: float = np.nan, gamma_c: float = np.nan):
        d = float(np.sqrt(8 * delta_12**2 + delta_13**2))
        kappa = 2 * delta_12**2 + delta_13 * (delta_13 - d)
        eta = (delta_12 + delta_13) * (d - 2 * delta_12 - delta_13)
        varsigma = 2 * delta_12 * delta_13 * (6 * delta_12**2 - d**2 + 3 * delta_13**2)
        return cls(delta_12=delta_12, delta_13=delta_13, delta_split=d,
                   kappa=kappa, eta=eta, varsigma=varsigma,
                   delta_pm=((d + 3 * delta_13) / 2, (d - 3 * delta_13) / 2),
                   gamma_b=gamma_b, gamma_c=gamma_c)

    @property
    def level_energies(self) -> tuple:
        """One-excitation energies (E_b, E_c, E_d) in the rotating frame."""
        return ((self.delta_13 - self.delta_split) / 2,
                -self.delta_13,
                (self.delta_13 + self.delta_split) / 2)


def _symmetric_sector_vectors(delta_12: float, delta_13: float):
    """(b, d) coefficient triples (v1, v2, v3) with v1 = v3, unnormalised."""
    d = np.sqrt(8 * delta_12**2 + delta_13**2)
    lam_b = (delta_13 - d) / 2
    lam_d = (delta_13 + d) / 2
    if d == 0:
        raise AmbiguityError("symmetric sector degenerate: delta_12 = delta_13 = 0")
    # eigenvector (1, 2*delta_12/lam, 1); guard the lam -> 0 corner
    def vec(lam):
        if abs(lam) < 1e-300:
            return np.array([0.0, 1.0, 0.0])
        v = np.array([1.0, 2 * delta_12 / lam, 1.0])
        return v / np.linalg.norm(v)
    return vec(lam_b), vec(lam_d), lam_b, lam_d


def _fix_phase(v: np.ndarray) -> np.ndarray:
    """Largest-magnitude component made real positive (first index on ties)."""
    mags = np.abs(v)
    idx = int(np.flatnonzero(mags >= mags.max() * (1 - 1e-12))[0])
    return v / (v[idx] / mags[idx])


def collective_basis_three(couplings: CouplingMatrix):
    """Labels a..h for the equally spaced chain, plus the closed-form spectrum.

    c is the one-excitation eigenvector antisymmetric under exchanging the
    outer atoms, b the remaining slow symmetric-sector state, d the bright
    one; e, f, g mirror b, c, d in the two-excitation sector and h is the
    fully inverted state. Raises if the symmetric sector cannot be split.
    """
    if couplings.n_atoms != 3:
        raise DomainError("three-atom basis requested for n != 3")
    d12 = couplings.delta[0, 1]
    d13 = couplings.delta[0, 2]
    if abs(couplings.delta[0, 1] - couplings.delta[1, 2]) > 1e-9 * max(abs(d12), 1e-300):
        raise DomainError("chain must be equally spaced")
    g = couplings.gamma
    dsplit = np.sqrt(8 * d12**2 + d13**2)
    scale = max(abs(d12), abs(d13), 1e-300)
    if dsplit < 1e-9 * scale:
        raise AmbiguityError("one-excitation spectrum degenerate beyond tolerance")

    vb, vd, lam_b, lam_d = _symmetric_sector_vectors(d12, d13)
    vc = np.array([1.0, 0.0, -1.0]) / np.sqrt(2.0)

    # dissipative matrices for the two excitation sectors
    g12, g13 = couplings.gamma_ij[0, 1], couplings.gamma_ij[0, 2]
    G1 = np.array([[g, g12, g13], [g12, g, g12], [g13, g12, g]])
    G2 = G1 + g * np.eye(3)

    def width(G, v):
        return float(np.real(v @ G @ v))

    e1, e2, e3 = (product_index(b) for b in ("100", "010", "001"))
    h1, h2, h3 = (product_index(b) for b in ("011", "101", "110"))

    U = np.zeros((8, 8), complex)
    labels = ("a", "b", "c", "d", "e", "f", "g", "h")
    U[0, 0] = 1.0
    for row, v in ((1, vb), (2, vc), (3, vd)):
        U[row, e1], U[row, e2], U[row, e3] = v
    for row, v in ((4, vb), (5, vc), (6, vd)):
        U[row, h1], U[row, h2], U[row, h3] = v
    U[7, 7] = 1.0
    for row in range(8):
        U[row] = _fix_phase(U[row])

    energies = np.array([0.0, lam_b, -d13, lam_d, lam_b, -d13, lam_d, 0.0])
    widths = np.array([0.0, width(G1, vb), width(G1, vc), width(G1, vd),
                       width(G2, vb), width(G2, vc), width(G2, vd), 3 * g])
    basis = CollectiveBasis(labels=labels, transform=U, energies=energies, widths=widths)
    spectrum = ThreeAtomSpectrum.from_deltas(d12, d13, gamma_b=widths[1], gamma_c=widths[2])
    return basis, spectrum


def three_atom_prep_coupling(spectrum: ThreeAtomSpectrum, E_mu: complex,
                             k_dot_r: float) -> complex:
    """Ground-to-b coupling for a single travelling field resonant with that line."""
    if spectrum.kappa == 0:
        raise SingularConfigurationError("kappa = 0; the closed form is singular")
    d12, d13, d = spectrum.delta_12, spectrum.delta_13, spectrum.delta_split
    kap = spectrum.kappa
    return (np.exp(-1j * k_dot_r) * np.sqrt(1 - d13 / d) * (E_mu / (2 * kap))
            * (3 * d12 * d13 - d * d12 + 2 * kap * np.cos(k_dot_r)))


def three_atom_stirap_couplings(spectrum: ThreeAtomSpectrum, E_mu: complex,
                                E_nu: complex, k_dot_r: float, t: float):
    """Time-dependent c-g and b-g couplings for co-propagating resonant fields.

    The fields sit on the c-g and b-g lines respectively; the returned pair
    (E_cg, E_bg) are interaction-picture matrix elements including their
    residual beat phases.
    """
    d12, d13, d = spectrum.delta_12, spectrum.delta_13, spectrum.delta_split
    kap, var = spectrum.kappa, spectrum.varsigma
    if kap == 0 or d == 0:
        raise SingularConfigurationError("kappa or the level splitting vanishes")
    common = 2 * d12**2 + d13 * (d + d13)
    e_cg = (d12 * (d + 3 * d13) * np.sqrt(d + d13) / (2 * np.sqrt(2 * d) * common)
            * np.exp(-1j * (4 * k_dot_r + 3 * d13 * t) / 2)
            * (np.exp(2j * k_dot_r) - 1)
            * (np.exp(1j * d * t / 2) * E_nu + np.exp(3j * d13 * t / 2) * E_mu))
    e_bg = (np.sqrt(d**2 - d13**2) * np.exp(-1j * k_dot_r)
            * (E_nu + np.exp(-1j * (d - 3 * d13) * t / 2) * E_mu)
            / (2 * d * common)
            * ((2 * d12**2 + d13**2) ** 2 - d**2 * d13**2 + var * np.cos(k_dot_r)) / kap)
    return complex(e_cg), complex(e_bg)


def dark_state_three(E_cg: complex, E_bg: complex) -> np.ndarray:
    """Normalised (b, c) components of E_cg |b> - E_bg |c>."""
    if E_cg == 0 and E_bg == 0:
        raise DomainError("dark state undefined for vanishing couplings")
    v = np.array([E_cg, -E_bg], complex)
    return v / np.linalg.norm(v)


def three_atom_stirap_drive(spectrum: ThreeAtomSpectrum, geom: AtomGeometry,
                            E_mu_env, E_nu_env) -> DriveSpec:
    """Co-propagating bichromatic drive on the c-g and b-g lines.

    Both components travel along the chain (plane-wave weights); detunings
    are the rotating-frame line positions (3 delta_13 + delta)/2 and delta.
    """
    w = plane_wave_weights(geom.n_atoms, geom.spacing_s, beta=0.0)
    d13, d = spectrum.delta_13, spectrum.delta_split
    mu = DriveField(weights=w, detuning=(3 * d13 + d) / 2, envelope=E_mu_env)
    nu = DriveField(weights=w, detuning=d, envelope=E_nu_env)
    return DriveSpec(n_atoms=geom.n_atoms, fields=(mu, nu))
