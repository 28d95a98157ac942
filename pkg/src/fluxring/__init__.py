"""Bloch-electron wave packets on flux-threaded rings and open chains.

Exact spectral simulation of a spin-carrying tight-binding electron, with
the analytic predictions (rigid transport at quantized flux, spreading and
self-interference fringes, quantum revivals, boundary reflection) exposed
alongside so they can be checked against the simulation.
"""

__version__ = "0.1.0"

from .lattice import (
    EigenBasis,
    LatticeSpec,
    Topology,
    build_hamiltonian,
    chain_momentum,
    dispersion,
    eigensystem,
    quantized_flux,
    ring_momentum,
    ring_momentum_labels,
)
from .wavepacket import (
    PacketSpec,
    SpinState,
    WidthConditionWarning,
    encode_qubit,
    gaussian_packet,
    inner,
    momentum_boost,
    width_check,
)
from .propagator import (
    AnalyticSpreadParams,
    SpectralPropagator,
    analytic_spread_packet,
    evolve_dense_oracle,
    folded_chain_center,
    reflect_map,
    translate,
)
from .analysis import (
    FringeProfile,
    Regime,
    RevivalMechanism,
    RevivalPrediction,
    TimeSeries,
    autocorrelation,
    autocorrelation_series,
    bloch_vector,
    fringe_measure,
    fringe_predict,
    interference_region,
    revival_detect,
    revival_predict,
    spin_reduced_state,
    transfer_fidelity,
)
