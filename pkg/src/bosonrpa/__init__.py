"""Bosonized effective Hamiltonian of a high-density Fermi gas.

Builds the per-mode quadratic boson Hamiltonian on an equal-area patch
decomposition of the Fermi surface, diagonalizes it (dense symplectic path
and rank-one secular path), and compares with the continuum plasmon
relation and the RPA correlation-energy integral.
"""

__version__ = "0.1.0"

from .lattice import KAPPA, FermiBall, build_fermi_ball, count_pairs_exact
from .patches import PatchSet, ModeIndexSets, partition_sphere, index_sets, normalization, in_half_space
from .mode import (
    ModeHamiltonian,
    Potential,
    QuadraticBlocks,
    assemble_blocks,
    assemble_grand_matrix,
    build_mode,
    coulomb_potential,
    indicator_potential,
    mode_from_u,
    parse_potential,
    zero_potential,
)
from .bogoliubov import (
    BosonSpectrum,
    SymplecticFactorization,
    build_factorization,
    diagonalize_mode,
    excitation_energies,
    sqrt_psd,
)
from .secular import (
    SecularProblem,
    coulomb_secular_residual,
    plasmon_root,
    secular_roots,
    secular_value,
)
from .continuum import (
    CorrelationEnergyReport,
    PlasmonCurve,
    continuum_lhs,
    plasmon_continuum,
    plasmon_series,
    rpa_bracket,
    total_energy,
)
