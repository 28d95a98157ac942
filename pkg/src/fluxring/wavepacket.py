"""Gaussian wave packets with spin, qubit encodings, and momentum boosts.

The Hamiltonian never couples the two spin components, so a state is simply
a pair of complex amplitude vectors evolving under the same unitary. Packet
envelopes are evaluated on the physical sites 1..N only (no periodic images);
the width condition enforced by :func:`width_check` is what justifies that.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .lattice import LatticeSpec

_HALF_WIDTH_FACTOR = 2.0 * math.sqrt(math.log(2.0))


class WidthConditionWarning(UserWarning):
    """Packet too wide for its lattice: head and tail overlap from the start."""


@dataclass(frozen=True)
class PacketSpec:
    """Parameters of a Gaussian packet: inverse width `alpha`, carrier
    momentum `k0`, center site `center` (may be fractional), and complex
    spin weights (up, down) normalized to one."""

    alpha: float
    center: float
    k0: float = 0.0
    spin_weights: tuple[complex, complex] = (1.0 + 0j, 0.0 + 0j)

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        up, down = self.spin_weights
        total = abs(up) ** 2 + abs(down) ** 2
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"spin weights must be normalized, |w|^2 = {total}")


@dataclass(frozen=True)
class SpinState:
    """Wavefunction on N sites: one complex amplitude vector per spin."""

    up: np.ndarray
    down: np.ndarray

    def __post_init__(self):
        up = np.asarray(self.up, dtype=complex)
        down = np.asarray(self.down, dtype=complex)
        if up.shape != down.shape or up.ndim != 1:
            raise ValueError("spin components must be 1-d vectors of equal length")
        object.__setattr__(self, "up", up)
        object.__setattr__(self, "down", down)

    @property
    def n_sites(self) -> int:
        return self.up.shape[0]

    def norm(self) -> float:
        return math.sqrt(
            float(np.sum(np.abs(self.up) ** 2) + np.sum(np.abs(self.down) ** 2))
        )

    def site_density(self) -> np.ndarray:
        """Probability per site, summed over spin."""
        return np.abs(self.up) ** 2 + np.abs(self.down) ** 2


def inner(a: SpinState, b: SpinState) -> complex:
    """Full inner product <a|b>, summed over sites and spin."""
    if a.n_sites != b.n_sites:
        raise ValueError(f"dimension mismatch: {a.n_sites} vs {b.n_sites}")
    return complex(np.vdot(a.up, b.up) + np.vdot(a.down, b.down))


def width_check(alpha: float, n_sites: int, strictness: float = 10.0) -> tuple[bool, float]:
    """Test the locality condition: Gaussian half width much less than N.

    Returns (ok, margin) where margin = N*alpha / (2*sqrt(ln 2)) is the ratio
    of the lattice size to the packet's full width at half maximum. `ok` is
    True when the margin reaches `strictness` (default 10). Marginal packets
    are usable but their head and tail overlap measurably.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    margin = n_sites * alpha / _HALF_WIDTH_FACTOR
    return margin >= strictness, margin


def gaussian_packet(lattice: LatticeSpec, spec: PacketSpec) -> SpinState:
    """Normalized Gaussian packet exp(-(alpha^2/2)(j-c)^2) exp(i k0 j).

    The envelope is summed over the physical sites only; the normalization
    is the discrete sum of the squared envelope. A packet violating the
    locality condition triggers a :class:`WidthConditionWarning` but is
    still constructed.
    """
    n = lattice.n_sites
    if not 1.0 <= spec.center <= n:
        raise ValueError(f"center must lie in [1, {n}], got {spec.center}")
    ok, margin = width_check(spec.alpha, n)
    if not ok:
        warnings.warn(
            f"packet width violates locality condition (margin {margin:.2f} < 10); "
            "head and tail overlap from the start",
            WidthConditionWarning,
            stacklevel=2,
        )
    j = lattice.sites
    envelope = np.exp(-0.5 * spec.alpha**2 * (j - spec.center) ** 2)
    psi = envelope * np.exp(1j * spec.k0 * j) / math.sqrt(np.sum(envelope**2))
    up_w, down_w = spec.spin_weights
    return SpinState(up=up_w * psi, down=down_w * psi)


def encode_qubit(
    theta: float,
    phi_angle: float,
    lattice: LatticeSpec,
    alpha: float,
    center: float,
    k0: float = math.pi / 2,
) -> SpinState:
    """Bloch-sphere qubit carried by a Gaussian packet.

    The spin weights are (cos(theta/2), sin(theta/2) e^{i phi_angle}) and the
    carrier momentum defaults to pi/2, where the chain and the flux-tuned
    ring are both dispersionless, so the packet flies without degrading the
    encoded state.
    """
    weights = (
        complex(math.cos(0.5 * theta)),
        math.sin(0.5 * theta) * complex(math.cos(phi_angle), math.sin(phi_angle)),
    )
    spec = PacketSpec(alpha=alpha, center=center, k0=k0, spin_weights=weights)
    return gaussian_packet(lattice, spec)


def momentum_boost(state: SpinState, k0: float) -> SpinState:
    """Multiply each site amplitude by exp(i k0 j); sitewise density is kept.

    Boosting a resting packet by 2*pi*flux/N reproduces, gauge-equivalently,
    the effect of threading that flux through the ring.
    """
    j = np.arange(1, state.n_sites + 1, dtype=float)
    phase = np.exp(1j * k0 * j)
    return SpinState(up=state.up * phase, down=state.down * phase)
