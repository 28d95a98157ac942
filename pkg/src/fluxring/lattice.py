"""Ring and chain tight-binding lattices: Hamiltonians, dispersion, eigenbases.

Magnetic flux through the ring enters as a uniform phase on every hopping
bond; the open chain has free ends and carries no flux. All time evolution
downstream is spectral, so the eigensystem is constructed analytically
(plane waves on the ring, sine modes on the chain) and cross-checked against
a dense Hermitian eigensolver in the test suite.

Conventions: sites are labeled 1..N, hbar = 1, lattice spacing = 1, and time
is measured in units of 1/hopping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class Topology(Enum):
    RING = "ring"
    CHAIN = "chain"


@dataclass(frozen=True)
class LatticeSpec:
    """Geometry and couplings of a one-dimensional tight-binding lattice.

    `flux` is measured in flux quanta and is meaningful only for rings;
    an open chain must have zero flux because a gauge transformation removes
    any bond phase there.
    """

    topology: Topology
    n_sites: int
    hopping: float = 1.0
    flux: float = 0.0

    def __post_init__(self):
        if self.n_sites < 3:
            raise ValueError(f"n_sites must be >= 3, got {self.n_sites}")
        if self.hopping <= 0:
            raise ValueError(f"hopping must be positive, got {self.hopping}")
        if self.topology is Topology.CHAIN and self.flux != 0.0:
            raise ValueError("an open chain cannot carry flux; set flux=0")

    @property
    def sites(self) -> np.ndarray:
        """Site coordinates 1..N as floats."""
        return np.arange(1, self.n_sites + 1, dtype=float)

    @property
    def bond_phase(self) -> float:
        """Phase angle 2*pi*flux/N acquired on each forward bond.

        The flux is reduced mod N first so that fluxes differing by a whole
        number of N give bitwise identical Hamiltonians.
        """
        if self.topology is Topology.CHAIN:
            return 0.0
        return 2.0 * math.pi * (self.flux % self.n_sites) / self.n_sites


def quantized_flux(n: int, n_sites: int) -> float:
    """Flux value (n/2 + 1/4)*N that makes the band linear around k = 0.

    At this flux the bond phase is pi*(n + 1/2), the band becomes
    (-1)^n * 2J sin k, and packets built from momenta near zero move rigidly
    with velocity (-1)^n * 2J.
    """
    if n < 0:
        raise ValueError(f"n must be a non-negative integer, got {n}")
    return (0.5 * n + 0.25) * n_sites


def ring_momentum_labels(n_sites: int) -> np.ndarray:
    """Integer momentum indices m in the symmetric window around zero."""
    half = n_sites // 2
    return np.arange(-half, n_sites - half)


def ring_momentum(label: int, n_sites: int) -> float:
    """Momentum 2*pi*m/N of the ring plane wave with integer index m."""
    return 2.0 * math.pi * label / n_sites


def chain_momentum(label: int, n_sites: int) -> float:
    """Pseudo-momentum pi*l/(N+1) of the chain sine mode, l = 1..N."""
    return math.pi * label / (n_sites + 1)


def build_hamiltonian(spec: LatticeSpec) -> np.ndarray:
    """Dense single-particle Hamiltonian in the site basis.

    Ring: H[j, j+1 mod N] = -J * exp(i*2*pi*flux/N) on every bond, plus the
    Hermitian conjugate. Chain: real tridiagonal with -J off-diagonals and
    open ends.
    """
    n = spec.n_sites
    amp = -spec.hopping * np.exp(1j * spec.bond_phase)
    h = np.zeros((n, n), dtype=complex)
    idx = np.arange(n - 1)
    h[idx, idx + 1] = amp
    if spec.topology is Topology.RING:
        h[n - 1, 0] = amp
    h += h.conj().T
    return h


def dispersion(spec: LatticeSpec, k: float) -> float:
    """Band energy at a momentum on the lattice's exact grid.

    Ring momenta are 2*pi*m/N (any integer m; the band is 2*pi periodic),
    chain momenta are pi*l/(N+1) with l = 1..N. Off-grid momenta are
    rejected because only grid values correspond to exact eigenvalues.
    """
    if spec.topology is Topology.RING:
        m = k * spec.n_sites / (2.0 * math.pi)
        m_int = round(m)
        if abs(m - m_int) > 1e-9:
            raise ValueError(
                f"k={k} is not on the ring momentum grid 2*pi*m/{spec.n_sites}"
            )
        k_exact = ring_momentum(m_int, spec.n_sites)
        return -2.0 * spec.hopping * math.cos(k_exact + spec.bond_phase)

    ell = k * (spec.n_sites + 1) / math.pi
    ell_int = round(ell)
    if abs(ell - ell_int) > 1e-9 or not 1 <= ell_int <= spec.n_sites:
        raise ValueError(
            f"k={k} is not on the chain grid pi*l/{spec.n_sites + 1}, l=1..{spec.n_sites}"
        )
    return -2.0 * spec.hopping * math.cos(chain_momentum(ell_int, spec.n_sites))


@dataclass(frozen=True)
class EigenBasis:
    """Exact eigensystem of a lattice Hamiltonian, momentum-ordered.

    `modes[:, a]` is the a-th orthonormal eigenvector, `energies[a]` its
    eigenvalue, `momenta[a]` its momentum, and `labels[a]` the integer
    momentum index (m for rings, l for chains).
    """

    energies: np.ndarray
    modes: np.ndarray
    momenta: np.ndarray
    labels: np.ndarray

    @property
    def n_sites(self) -> int:
        return self.modes.shape[0]


def eigensystem(spec: LatticeSpec) -> EigenBasis:
    """Analytic eigenbasis: plane waves on the ring, sine modes on the chain.

    Energies are evaluated through :func:`dispersion` at each grid momentum,
    so they agree with it bitwise by construction.
    """
    n = spec.n_sites
    j = spec.sites
    if spec.topology is Topology.RING:
        labels = ring_momentum_labels(n)
        momenta = np.array([ring_momentum(m, n) for m in labels])
        modes = np.exp(1j * np.outer(j, momenta)) / math.sqrt(n)
    else:
        labels = np.arange(1, n + 1)
        momenta = np.array([chain_momentum(ell, n) for ell in labels])
        modes = np.sqrt(2.0 / (n + 1)) * np.sin(np.outer(j, momenta)) + 0j
    energies = np.array([dispersion(spec, k) for k in momenta])
    return EigenBasis(energies=energies, modes=modes, momenta=momenta, labels=labels)
